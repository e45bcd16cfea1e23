#![no_main]

use congruent::arith::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Bound the input so pathological digit blobs don't turn the round
    // trip into a bignum stress test.
    if text.len() > 4096 {
        return;
    }
    if let Some(r) = parse_rational(text) {
        let rendered = format_rational(&r);
        let back = parse_rational(&rendered).expect("rendered rational must parse");
        assert_eq!(back, r);
    }
});
