#![no_main]

use libfuzzer_sys::fuzz_target;
use setfam::io::{parse_family, render_file};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_family(text) {
        // Rendering is canonical: it must parse back to the same family.
        let out = render_file(&f);
        let back = parse_family(&out).expect("rendered family parses");
        assert_eq!(back, f);
        assert_eq!(render_file(&back), out);
    }
});
