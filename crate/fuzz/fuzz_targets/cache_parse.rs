#![no_main]

use congruent::lseries::cache;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = cache::parse(text) {
        // Anything accepted must survive a render/parse round trip
        // bit-exactly.
        let rendered = cache::render(&table);
        let back = cache::parse(&rendered).expect("rendered cache must parse");
        assert_eq!(back, table);
        assert_eq!(cache::render(&back), rendered);
    }
});
