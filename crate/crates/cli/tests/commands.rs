use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use setfam::bits::{self, Mask};
use setfam::io::{parse_family, parse_search};

fn setfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setfam")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn star(n: usize, k: usize) -> String {
    let mut text = format!("{n} {k}\n");
    for s in bits::k_subsets_lex(n, k) {
        if s & 1 == 1 {
            let els: Vec<String> = bits::elements(s).iter().map(|x| x.to_string()).collect();
            text.push_str(&els.join(" "));
            text.push('\n');
        }
    }
    text
}

/// Largest pairwise t-intersecting subfamily of `sets`, by plain recursion.
fn brute_max(sets: &[Mask], t: usize) -> usize {
    fn go(sets: &[Mask], t: usize, i: usize, chosen: &mut Vec<Mask>) -> usize {
        if i == sets.len() {
            return chosen.len();
        }
        let mut best = go(sets, t, i + 1, chosen);
        if chosen.iter().all(|&c| (c & sets[i]).count_ones() as usize >= t) {
            chosen.push(sets[i]);
            best = best.max(go(sets, t, i + 1, chosen));
            chosen.pop();
        }
        best
    }
    go(sets, t, 0, &mut Vec::new())
}

#[test]
fn fmax_prints_optimum_and_valid_witness() {
    let o = setfam(&["fmax", "--n", "6", "--k", "3", "--t", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("4"));
    let rep = parse_search(&text).unwrap();
    assert_eq!(rep.value, brute_max(&bits::k_subsets_colex(6, 3), 2));
    assert_eq!(rep.witness.k, Some(3));
    assert!(rep.witness.family.is_t_intersecting(2));
}

#[test]
fn gmax_witness_avoids_the_forbidden_size() {
    let o = setfam(&["gmax", "--n", "6", "--k", "2", "--t", "2"]);
    assert!(o.status.success());
    let rep = parse_search(&stdout(&o)).unwrap();
    assert!(rep.value > 1);
    assert!(rep.witness.family.forbidden_witness(2).is_none());
}

#[test]
fn measure_of_and_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "and12.fam", "3 *\n1 2\n1 2 3\n");
    let o = setfam(&["measure", "--p", "1/3", "--family", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1/9");
    let o = setfam(&["--exact", "influence", "--p", "0.25", "--family", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains('.'));
}

#[test]
fn decompose_star_passes_its_audit() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "star.fam", &star(8, 4));
    let args = ["decompose", "--zeta", "0.25", "--delta", "0.2", "--h", "1", "--eps", "0.1", "--family"];
    let o = setfam(&[&args[..], &[f.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.ends_with("audit pass\n"));
    assert!(text.contains("\nJ 1\n"));
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.fam", "3 2\n1 4\n");
    let o = setfam(&["measure", "--p", "1/2", "--family", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = setfam(&["fmax", "--n", "9", "--k", "4", "--t", "1", "--budget-nodes", "50"]);
    assert_eq!(o.status.code(), Some(2));
    let o = setfam(&["fmax", "--n", "6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = setfam(&["frankl", "--n", "5", "--t", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_is_reproducible_and_round_trips() {
    for kind in ["uniform", "increasing", "intersecting", "paired"] {
        let args = ["gen", "--kind", kind, "--n", "8", "--k", "3", "--t", "2", "--seed", "11"];
        let a = setfam(&args);
        let b = setfam(&args);
        assert!(a.status.success(), "{kind}");
        assert_eq!(a.stdout, b.stdout, "{kind}");
        let text = stdout(&a);
        let f = parse_family(&text).unwrap();
        assert_eq!(setfam::io::render_file(&f), text, "{kind}");
    }
}

#[test]
fn emitted_families_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let g = setfam(&["gen", "--kind", "intersecting", "--n", "6", "--t", "1", "--seed", "4"]);
    let f = write(dir.path(), "g.fam", &stdout(&g));
    let f = f.to_str().unwrap();
    let shifted = setfam(&["shift", "--family", f, "--i", "1", "--j", "6"]);
    assert!(parse_family(&stdout(&shifted)).is_ok());
    for cmd in [
        vec!["shift", "--family", f, "--coord", "6", "--p", "1/3"],
        vec!["pipeline", "--family", f, "--p", "1/4", "--t", "1", "--c", "1", "--zeta", "0.1"],
    ] {
        let o = setfam(&cmd);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let fam = &text[text.find("---\n").unwrap() + 4..];
        let parsed = parse_family(fam).unwrap();
        assert!(parsed.family.is_increasing());
    }
    let s = write(dir.path(), "s.fam", &star(6, 3));
    let sh = setfam(&["shadow", "--family", s.to_str().unwrap()]);
    assert_eq!(parse_family(&stdout(&sh)).unwrap().family.len(), 15);
}

#[test]
fn out_flag_and_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_setfam"))
        .env("SETFAM_THREADS", "2")
        .args(["frankl", "--n", "10", "--k", "4", "--t", "2", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "f 28\nr 0\n");
}

#[test]
fn witness_and_cross_audit() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.fam", "4 *\n1\n1 2\n");
    let b = write(dir.path(), "b.fam", "4 *\n1 3\n2 3\n");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = setfam(&["witness", "--family", a, "--family", b, "--t", "1"]);
    assert_eq!(stdout(&o), "a 1\nb 2,3\n");
    let o = setfam(&["cross-audit", "--family", a, "--family", b, "--p", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
}
