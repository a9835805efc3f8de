#![no_main]

use libfuzzer_sys::fuzz_target;
use setfam::Bias;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<Bias>() {
        assert!((0.0..=1.0).contains(&p.to_f64()));
        if p.is_exact() {
            let back: Bias = p.to_string().parse().expect("displayed bias parses");
            assert_eq!(back, p);
        }
    }
    let _ = Bias::parse_exact(text);
});
