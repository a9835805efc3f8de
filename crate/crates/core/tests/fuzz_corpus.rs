//! Replays the fuzz corpus seeds through the fuzz targets' assertions.

use std::path::PathBuf;

use setfam::io::{parse_family, parse_search, parse_set_list, render_file, set_text};
use setfam::Bias;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn family_seeds() {
    let mut ok = 0;
    for (name, text) in seeds("parse_family") {
        if let Ok(f) = parse_family(&text) {
            let out = render_file(&f);
            assert_eq!(parse_family(&out).unwrap(), f, "{name}");
            ok += 1;
        }
    }
    assert!(ok >= 5);
}

#[test]
fn bias_seeds() {
    for (name, text) in seeds("parse_bias") {
        if let Ok(p) = text.parse::<Bias>() {
            assert!((0.0..=1.0).contains(&p.to_f64()), "{name}");
            if p.is_exact() {
                assert_eq!(p.to_string().parse::<Bias>().unwrap(), p, "{name}");
            }
        }
    }
}

#[test]
fn search_seeds() {
    for (name, text) in seeds("parse_search") {
        let r = parse_search(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(r.value, r.witness.family.len());
    }
}

#[test]
fn set_list_seeds() {
    for (name, text) in seeds("parse_set_list") {
        let s = parse_set_list(&text, 30).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_set_list(&set_text(s), 30), Ok(s));
    }
}
