#![no_main]

use congruent::cli::CertificateJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 1 << 16 {
        return;
    }
    if let Ok(report) = serde_json::from_str::<CertificateJson>(text) {
        // check_exact must never panic on hostile reports; a forged
        // congruent verdict has to come back as Err, not unwind.
        let _ = report.check_exact();
    }
});
