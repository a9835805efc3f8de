#![no_main]

use libfuzzer_sys::fuzz_target;
use setfam::io::{parse_set_list, set_text};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_set_list(text, 30) {
        assert_eq!(parse_set_list(&set_text(s), 30), Ok(s));
    }
});
