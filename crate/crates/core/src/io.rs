//! Text formats.
//!
//! Family file: a header `n k` (or `n *` for a non-uniform family), then one
//! member per line as ascending space-separated elements; an empty line is
//! the empty set. Members are rendered in lex order.
//!
//! Search report: the optimum on its own line, the witness as a family file,
//! a `---` line, then `key value` statistics.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::bits::{self, Mask, MAX_DENSE_N, MAX_N};
use crate::error::{Error, Result};
use crate::family::{Family, Mode, UniformFamily};
use crate::regularity::Decomposition;
use crate::scalar::fmt_f64;
use crate::search::SearchResult;
use crate::shifting::Trace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyFile {
    pub n: usize,
    /// `None` for `*`.
    pub k: Option<usize>,
    pub family: Family,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn lines(text: &str) -> Vec<&str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}

fn parse_header(line: &str, at: usize) -> Result<(usize, Option<usize>)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let [n, k] = toks[..] else {
        return Err(perr(at, "header must be `n k` or `n *`"));
    };
    let n: usize = n.parse().map_err(|_| perr(at, format!("bad ground-set size `{n}`")))?;
    if n > MAX_N {
        return Err(perr(at, format!("n = {n} exceeds {MAX_N}")));
    }
    let k = match k {
        "*" => None,
        _ => {
            let k: usize = k.parse().map_err(|_| perr(at, format!("bad uniformity `{k}`")))?;
            if k > n {
                return Err(perr(at, format!("k = {k} exceeds n = {n}")));
            }
            Some(k)
        }
    };
    Ok((n, k))
}

fn parse_set(line: &str, n: usize, at: usize) -> Result<Mask> {
    let mut mask: Mask = 0;
    let mut last = 0usize;
    for tok in line.split_whitespace() {
        let x: usize = tok.parse().map_err(|_| perr(at, format!("bad element `{tok}`")))?;
        if x == 0 || x > n {
            return Err(perr(at, format!("element {x} outside [{n}]")));
        }
        if x <= last {
            return Err(perr(at, "elements must be strictly ascending"));
        }
        last = x;
        mask |= bits::bit(x);
    }
    Ok(mask)
}

fn parse_members(ls: &[&str], first_line: usize, n: usize, k: Option<usize>) -> Result<Vec<Mask>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(ls.len());
    for (i, l) in ls.iter().enumerate() {
        let at = first_line + i;
        let s = parse_set(l, n, at)?;
        if let Some(k) = k {
            if bits::size(s) != k {
                return Err(perr(at, format!("set has {} elements, expected {k}", bits::size(s))));
            }
        }
        if !seen.insert(s) {
            return Err(perr(at, "duplicate set"));
        }
        out.push(s);
    }
    Ok(out)
}

fn build(n: usize, k: Option<usize>, members: Vec<Mask>) -> Result<FamilyFile> {
    let mode = if k.is_none() && n <= MAX_DENSE_N { Mode::PowerSet } else { Mode::Layer };
    Ok(FamilyFile { n, k, family: Family::from_masks(n, mode, members)? })
}

pub fn parse_family(text: &str) -> Result<FamilyFile> {
    let ls = lines(text);
    if text.is_empty() {
        return Err(perr(1, "missing header"));
    }
    let (n, k) = parse_header(ls[0], 1)?;
    let members = parse_members(&ls[1..], 2, n, k)?;
    build(n, k, members)
}

/// Smallest header that fits: `n k` when all members share a size.
pub fn render_family(f: &Family) -> String {
    let counts = f.layer_counts();
    let nonzero: Vec<usize> = (0..counts.len()).filter(|&s| counts[s] > 0).collect();
    let k = match nonzero[..] {
        [k] => Some(k),
        _ => None,
    };
    render_family_with(f, k)
}

pub fn render_family_with(f: &Family, k: Option<usize>) -> String {
    let mut out = match k {
        Some(k) => format!("{} {k}\n", f.n()),
        None => format!("{} *\n", f.n()),
    };
    for s in f.members_lex() {
        let els: Vec<String> = bits::elements(s).iter().map(|x| x.to_string()).collect();
        out.push_str(&els.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_uniform(f: &UniformFamily) -> String {
    render_family_with(f, Some(f.k()))
}

pub fn render_file(f: &FamilyFile) -> String {
    render_family_with(&f.family, f.k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub value: usize,
    pub witness: FamilyFile,
    pub stats: Vec<(String, String)>,
}

pub fn render_search(r: &SearchResult) -> String {
    let mut out = format!("{}\n", r.value);
    out.push_str(&render_uniform(&r.family));
    out.push_str("---\n");
    let _ = writeln!(out, "nodes {}", r.nodes);
    let _ = writeln!(out, "elapsed_secs {}", fmt_f64(r.elapsed.as_secs_f64()));
    if let Some(o) = &r.optima {
        let _ = writeln!(out, "optima_classes {}", o.len());
    }
    out
}

pub fn parse_search(text: &str) -> Result<SearchReport> {
    let ls = lines(text);
    if text.is_empty() {
        return Err(perr(1, "missing value line"));
    }
    let value: usize = ls[0].trim().parse().map_err(|_| perr(1, "bad value line"))?;
    let sep = ls
        .iter()
        .position(|&l| l == "---")
        .ok_or_else(|| perr(ls.len(), "missing `---` separator"))?;
    if sep < 2 {
        return Err(perr(2, "missing witness header"));
    }
    let (n, k) = parse_header(ls[1], 2)?;
    let members = parse_members(&ls[2..sep], 3, n, k)?;
    let witness = build(n, k, members)?;
    if witness.family.len() != value {
        return Err(perr(1, format!("value {value} but the witness has {} members", witness.family.len())));
    }
    let mut stats = Vec::new();
    for (i, l) in ls[sep + 1..].iter().enumerate() {
        let at = sep + 2 + i;
        let (key, val) = l.split_once(' ').ok_or_else(|| perr(at, "stat lines are `key value`"))?;
        if key.is_empty() {
            return Err(perr(at, "empty stat key"));
        }
        stats.push((key.to_string(), val.to_string()));
    }
    Ok(SearchReport { value, witness, stats })
}

/// Elements joined by commas, `-` for the empty set.
pub fn set_text(s: Mask) -> String {
    if s == 0 {
        return "-".to_string();
    }
    let els: Vec<String> = bits::elements(s).iter().map(|x| x.to_string()).collect();
    els.join(",")
}

/// `step tag coords mu_before mu_after modification bound` per step, then
/// `---` and the resulting family.
pub fn render_trace(t: &Trace) -> String {
    let mut out = String::new();
    for s in &t.steps {
        let coords: Vec<String> = s.coords.iter().map(|c| c.to_string()).collect();
        let coords = if coords.is_empty() { "-".to_string() } else { coords.join(",") };
        let _ = writeln!(out, "step {} {coords} {} {} {} {}", s.tag, s.mu_before, s.mu_after, s.modification, s.bound);
    }
    out.push_str("---\n");
    out.push_str(&render_family(&t.family));
    out
}

/// Comma- or space-separated elements, `-` for the empty set.
pub fn parse_set_list(text: &str, n: usize) -> Result<Mask> {
    let text = text.trim();
    if text == "-" || text.is_empty() {
        return Ok(0);
    }
    parse_set(&text.replace(',', " "), n, 1)
}

/// One slice per line (`slice B class density margin`), then a summary.
pub fn render_decomposition(d: &Decomposition) -> String {
    let mut out = String::new();
    for (i, l) in d.log.iter().enumerate() {
        let _ = writeln!(
            out,
            "iteration {i} J {} phi {} eta {} outside {}",
            set_text(l.j),
            fmt_f64(l.phi),
            fmt_f64(l.eta),
            fmt_f64(l.outside)
        );
    }
    for s in &d.slices {
        let margin = s.margin.map_or("-".to_string(), fmt_f64);
        let _ = writeln!(out, "slice {} {} {} {}", set_text(s.b), s.class, fmt_f64(s.density), margin);
    }
    let _ = writeln!(out, "J {}", set_text(d.j));
    let _ = writeln!(out, "good {}", d.good.len());
    let _ = writeln!(out, "eta {}", fmt_f64(d.eta));
    let _ = writeln!(out, "outside {}", fmt_f64(d.outside));
    let _ = writeln!(out, "iterations {}", d.log.len() - 1);
    out
}
