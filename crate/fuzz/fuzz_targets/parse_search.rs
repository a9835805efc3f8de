#![no_main]

use libfuzzer_sys::fuzz_target;
use setfam::io::parse_search;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_search(text) {
        assert_eq!(r.value, r.witness.family.len());
    }
});
