//! Shifting operators, compression towards one coordinate, the two
//! measure-increasing constructions, and the junta pipeline built from them.

use std::fmt;

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::family::{Family, Mode};
use crate::measures::{influence_with, influential_sets, mu_with};
use crate::scalar::{Bias, Scalar, Value};

fn check_coord(f: &Family, i: usize) -> Result<()> {
    if i == 0 || i > f.n() {
        return Err(Error::input(format!("coordinate {i} outside [{}]", f.n())));
    }
    Ok(())
}

/// Would `S_ij` move some member of `F`?
fn shift_moves(f: &Family, i: usize, j: usize) -> bool {
    let (bi, bj) = (bits::bit(i), bits::bit(j));
    f.iter().any(|a| a & bi != 0 && a & bj == 0 && !f.contains(a ^ bi ^ bj))
}

/// `S_ij(F)`: replace `i` by `j` in every member where the image is free.
pub fn shift(f: &Family, i: usize, j: usize) -> Result<Family> {
    check_coord(f, i)?;
    check_coord(f, j)?;
    if i == j {
        return Err(Error::input("shift needs two distinct coordinates"));
    }
    let (bi, bj) = (bits::bit(i), bits::bit(j));
    let image = f.iter().map(|a| {
        if a & bi != 0 && a & bj == 0 && !f.contains(a ^ bi ^ bj) {
            a ^ bi ^ bj
        } else {
            a
        }
    });
    Family::from_masks(f.n(), f.mode(), image.collect::<Vec<_>>())
}

/// `S_{coord,j}(F) = F` for every `j < coord`.
pub fn is_compressed(f: &Family, coord: usize) -> bool {
    (1..coord).all(|j| !shift_moves(f, coord, j))
}

/// Fixed by every `S_ij` with `j < i`.
pub fn is_shifted(f: &Family) -> bool {
    (2..=f.n()).all(|i| is_compressed(f, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepTag {
    Compress,
    IncreaseOffDiagonal,
    IncreaseDiagonal,
    UpClose,
}

impl fmt::Display for StepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepTag::Compress => "compress",
            StepTag::IncreaseOffDiagonal => "increase-offdiag",
            StepTag::IncreaseDiagonal => "increase-diag",
            StepTag::UpClose => "up-close",
        })
    }
}

/// One modification `F_{i-1} -> F_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub tag: StepTag,
    /// Coordinates involved, in the caller's labelling.
    pub coords: Vec<usize>,
    pub mu_before: Value,
    pub mu_after: Value,
    /// `μ_p(F_{i-1} \ F_i)`.
    pub modification: Value,
    /// The bound the modification is certified against.
    pub bound: Value,
}

impl Step {
    pub fn within_bound(&self) -> bool {
        match (&self.modification, &self.bound) {
            (Value::Exact(m), Value::Exact(b)) => m <= b,
            (m, b) => m.to_f64() <= b.to_f64() + 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub family: Family,
}

fn step<T: Scalar>(tag: StepTag, coords: Vec<usize>, before: &Family, after: &Family, p: &T, bound: &T) -> Step {
    let removed = before.filter(|a| !after.contains(a));
    Step {
        tag,
        coords,
        mu_before: mu_with(before, p).into_value(),
        mu_after: mu_with(after, p).into_value(),
        modification: mu_with(&removed, p).into_value(),
        bound: bound.clone().into_value(),
    }
}

fn check_increasing_intersecting(f: &Family, t: usize) -> Result<()> {
    if !f.is_increasing() {
        return Err(Error::contract("family is not increasing"));
    }
    if let Some((a, b)) = f.t_intersecting_witness(t) {
        return Err(Error::contract(format!(
            "family is not {t}-intersecting: {:?} and {:?}",
            bits::elements(a),
            bits::elements(b)
        )));
    }
    Ok(())
}

/// Apply `S_{coord,j}` with the smallest movable `j` until `F` is compressed.
/// Every step is bounded by `δ = I_coord(F)` of the input.
fn compress_steps<T: Scalar>(f: &Family, coord: usize, p: &T, label: &dyn Fn(usize) -> usize) -> (Vec<Step>, Family) {
    let delta = influence_with(f, coord, p);
    let mut cur = f.clone();
    let mut steps = Vec::new();
    while let Some(j) = (1..coord).find(|&j| shift_moves(&cur, coord, j)) {
        let next = shift(&cur, coord, j).expect("coordinates validated");
        steps.push(step(StepTag::Compress, vec![label(coord), label(j)], &cur, &next, p, &delta));
        cur = next;
    }
    (steps, cur)
}

/// Compress `F` towards `coord` by shifts with the smallest available `j`.
pub fn compress_to(f: &Family, coord: usize, t: usize, p: &Bias) -> Result<Trace> {
    check_coord(f, coord)?;
    check_increasing_intersecting(f, t)?;
    p.check_open_unit()?;
    let (steps, family) = match p {
        Bias::Exact(q) => compress_steps(f, coord, q, &|x| x),
        Bias::Float(x) => compress_steps(f, coord, x, &|c| c),
    };
    Ok(Trace { steps, family })
}

/// `(F \ (I_n ∩ F)^(a)) ∪ (I_n \ F)^(b-1)` on the top coordinate.
fn offdiag_candidate(f: &Family, influential: &Family, a: usize, b: usize) -> Family {
    let mut g = f.filter(|s| !(bits::size(s) == a && influential.contains(s)));
    for s in influential.iter() {
        if b >= 1 && bits::size(s) == b - 1 && !f.contains(s) {
            g.insert(s);
        }
    }
    g
}

/// Both off-diagonal candidates and the one kept (1 or 2).
#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagonal {
    pub g1: Family,
    pub g2: Family,
    pub chosen: usize,
}

impl OffDiagonal {
    pub fn family(&self) -> &Family {
        if self.chosen == 1 {
            &self.g1
        } else {
            &self.g2
        }
    }
}

fn check_increase_input(f: &Family, t: usize) -> Result<()> {
    check_increasing_intersecting(f, t)?;
    if !is_compressed(f, f.n()) {
        return Err(Error::contract("family is not compressed towards its last coordinate"));
    }
    Ok(())
}

fn offdiag_with<T: Scalar>(f: &Family, a: usize, b: usize, p: &T) -> OffDiagonal {
    let inf = influential_sets(f, f.n());
    let g1 = offdiag_candidate(f, &inf, a, b);
    let g2 = offdiag_candidate(f, &inf, b, a);
    let chosen = if mu_with(&g2, p) > mu_with(&g1, p) { 2 } else { 1 };
    OffDiagonal { g1, g2, chosen }
}

/// Trade the influential members of sizes `a` and `b` (with `a + b = n + t`)
/// for smaller sets on the top coordinate; keep the better of the two trades.
pub fn increase_offdiagonal(f: &Family, a: usize, b: usize, t: usize, p: &Bias) -> Result<OffDiagonal> {
    let n = f.n();
    if a + b != n + t {
        return Err(Error::input(format!("a + b = {} but n + t = {}", a + b, n + t)));
    }
    if a == b {
        return Err(Error::input("off-diagonal step needs a != b"));
    }
    if a == 0 || b == 0 || a > n || b > n {
        return Err(Error::input("layer sizes must lie in [n]"));
    }
    check_increase_input(f, t)?;
    Ok(match p {
        Bias::Exact(q) => offdiag_with(f, a, b, q),
        Bias::Float(x) => offdiag_with(f, a, b, x),
    })
}

/// Every diagonal candidate `G_i`, `i in [n-1]`, and the index of the best.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonal {
    pub candidates: Vec<Family>,
    /// 1-based coordinate `i` of the chosen candidate.
    pub best: usize,
}

impl Diagonal {
    pub fn family(&self) -> &Family {
        &self.candidates[self.best - 1]
    }
}

fn diag_with<T: Scalar>(f: &Family, a: usize, p: &T) -> Diagonal {
    let n = f.n();
    let inf = influential_sets(f, n);
    let candidates: Vec<Family> = (1..n)
        .map(|i| {
            let bi = bits::bit(i);
            let mut g = f.filter(|s| !(bits::size(s) == a && s & bi != 0 && inf.contains(s)));
            for s in inf.iter() {
                if bits::size(s) + 1 == a && s & bi == 0 && !f.contains(s) {
                    g.insert(s);
                }
            }
            g
        })
        .collect();
    let mut best = 0;
    let mut best_mu = mu_with(&candidates[0], p);
    for (i, g) in candidates.iter().enumerate().skip(1) {
        let m = mu_with(g, p);
        if m > best_mu {
            best = i;
            best_mu = m;
        }
    }
    Diagonal { candidates, best: best + 1 }
}

/// The middle-layer construction for `n + t` even, `a = (n + t) / 2`.
pub fn increase_diagonal(f: &Family, t: usize, p: &Bias, zeta: f64) -> Result<Diagonal> {
    let n = f.n();
    if (n + t) % 2 != 0 {
        return Err(Error::contract(format!("parity: n + t = {} is odd", n + t)));
    }
    if n < 2 {
        return Err(Error::contract("need at least two coordinates"));
    }
    check_increase_input(f, t)?;
    if !f.depends_on(n) {
        return Err(Error::contract("influence: the last coordinate has zero influence"));
    }
    if !(zeta > 0.0 && p.to_f64() <= 0.5 - zeta && p.to_f64() > 0.0) {
        return Err(Error::contract(format!("bias: need 0 < p <= 1/2 - zeta, got p = {p}, zeta = {zeta}")));
    }
    if n as f64 <= t as f64 / (2.0 * zeta) {
        return Err(Error::contract(format!("size: need n > t/(2 zeta) = {}", t as f64 / (2.0 * zeta))));
    }
    let a = (n + t) / 2;
    let inf = influential_sets(f, n);
    if !f.iter().any(|s| bits::size(s) == a && inf.contains(s)) {
        return Err(Error::contract(format!("emptiness: no influential member of size {a}")));
    }
    Ok(match p {
        Bias::Exact(q) => diag_with(f, a, q),
        Bias::Float(x) => diag_with(f, a, x),
    })
}

/// Pairs `A, B ∈ F` with `|A ∩ B| = t` and `n ∈ A ∩ B` must cover `[n]`.
/// Returns the first offending pair.
pub fn exact_intersection_audit(f: &Family, t: usize) -> Option<(Mask, Mask)> {
    let n = f.n();
    let top = bits::bit(n);
    let all = bits::full(n);
    let m: Vec<Mask> = f.iter().filter(|&a| a & top != 0).collect();
    for (i, &a) in m.iter().enumerate() {
        for &b in &m[i..] {
            if bits::size(a & b) == t && (a | b != all || bits::size(a) + bits::size(b) != n + t) {
                return Some((a, b));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub p: Bias,
    pub t: usize,
    /// Influence scale: the loop stops once every live influence is at least `c/2`.
    pub c: f64,
    /// Margin with `p <= 1/2 - zeta`.
    pub zeta: f64,
    /// Stop once at most `max(coord_threshold, t/(2 zeta))` coordinates are live.
    pub coord_threshold: usize,
    /// Optional cap below the built-in iteration bound.
    pub max_iterations: Option<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    FewCoordinates,
    LargeInfluences,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutcome {
    pub trace: Trace,
    /// Coordinates the final family depends on.
    pub coords: Vec<usize>,
    pub stop: StopReason,
    pub iterations: usize,
}

/// Number of distinct values `μ_p` can take on `P([n])`, plus a margin.
pub fn iteration_bound(n: usize) -> u128 {
    (0..=n)
        .map(|s| bits::binom(n, s) + 1)
        .fold(1u128, |acc, x| acc.saturating_mul(x))
        .saturating_add(16)
}

fn pipeline_with<T: Scalar>(f: &Family, prm: &PipelineParams, p: &T) -> Result<PipelineOutcome> {
    let n = f.n();
    let t = prm.t;
    let stop_at = (prm.coord_threshold as f64).max(t as f64 / (2.0 * prm.zeta));
    let half_c = prm.c / 2.0;
    let limit = prm.max_iterations.unwrap_or(u128::MAX).min(iteration_bound(n));
    let mut fam = f.to_mode(Mode::PowerSet)?;
    let mut steps = Vec::new();
    let mut iterations = 0usize;
    loop {
        let live = fam.live_coords();
        if live.len() as f64 <= stop_at {
            return Ok(PipelineOutcome { trace: Trace { steps, family: fam }, coords: live, stop: StopReason::FewCoordinates, iterations });
        }
        let infl: Vec<T> = live.iter().map(|&i| influence_with(&fam, i, p)).collect();
        let mut arg = 0;
        for i in 1..live.len() {
            if infl[i] < infl[arg] {
                arg = i;
            }
        }
        if infl[arg].to_f64() >= half_c {
            return Ok(PipelineOutcome { trace: Trace { steps, family: fam }, coords: live, stop: StopReason::LargeInfluences, iterations });
        }
        iterations += 1;
        if iterations as u128 > limit {
            return Err(Error::resource(format!(
                "pipeline exceeded its iteration bound {limit} without stopping"
            )));
        }
        let m = live[arg];
        let width = live.len();
        // Project onto the live coordinates with m moved to the last position.
        let live_mask = bits::from_elements(&live);
        let order: Vec<usize> = live.iter().copied().filter(|&x| x != m).chain([m]).collect();
        let mut perm = vec![0usize; width];
        for (new, &orig) in order.iter().enumerate() {
            let old = live.iter().position(|&x| x == orig).expect("live coordinate");
            perm[old] = new + 1;
        }
        let mut inverse = vec![0usize; width];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new - 1] = old + 1;
        }
        let label = |x: usize| order[x - 1];
        let g = fam.restrict_to(live_mask)?.permute(&perm)?;

        let (mut compress, g) = compress_steps(&g, width, p, &label);
        steps.append(&mut compress);

        let bound = influence_with(&g, width, p);
        if !g.depends_on(width) {
            // Compression alone removed coordinate m: one fewer live coordinate.
            let back = g.permute(&inverse)?;
            fam = Family::junta(n, live_mask, &back)?;
            continue;
        }
        let inf = influential_sets(&g, width);
        let diag_layer = (width + t) / 2;
        let diagonal = (width + t) % 2 == 0 && g.iter().any(|s| bits::size(s) == diag_layer && inf.contains(s));
        let (tag, coords, next) = if diagonal {
            let d = diag_with(&g, diag_layer, p);
            let chosen = d.family().clone();
            (StepTag::IncreaseDiagonal, vec![label(width), label(d.best)], chosen)
        } else {
            let mut best: Option<(T, Family, usize)> = None;
            for a in t..=width {
                let b = width + t - a;
                if b <= a || b > width {
                    continue;
                }
                let o = offdiag_with(&g, a, b, p);
                let cand = o.family().clone();
                let mu = mu_with(&cand, p);
                if best.as_ref().map_or(true, |(bm, _, _)| mu > *bm) {
                    best = Some((mu, cand, a));
                }
            }
            let (_, cand, _) = best.ok_or_else(|| Error::resource("no valid off-diagonal layer pair"))?;
            (StepTag::IncreaseOffDiagonal, vec![label(width)], cand)
        };
        if mu_with(&next, p) <= mu_with(&g, p) {
            return Err(Error::resource(format!(
                "increase step on coordinate {m} did not raise the measure"
            )));
        }
        steps.push(step(tag, coords, &g, &next, p, &bound));
        let closed = next.up_closure()?;
        steps.push(step(StepTag::UpClose, vec![], &next, &closed, p, &T::zero()));

        let back = closed.permute(&inverse)?;
        fam = Family::junta(n, live_mask, &back)?;
    }
}

/// Repeatedly compress towards the least influential live coordinate and
/// raise the measure, until few coordinates remain or all influences are large.
pub fn stability_pipeline(f: &Family, prm: &PipelineParams) -> Result<PipelineOutcome> {
    check_increasing_intersecting(f, prm.t)?;
    let p = prm.p.to_f64();
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::contract("pipeline needs 0 < p < 1/2"));
    }
    if !(prm.c > 0.0) {
        return Err(Error::contract("pipeline needs c > 0"));
    }
    if !(prm.zeta > 0.0 && p <= 0.5 - prm.zeta) {
        return Err(Error::contract(format!("pipeline needs 0 < zeta <= 1/2 - p, got zeta = {}", prm.zeta)));
    }
    match &prm.p {
        Bias::Exact(q) => pipeline_with(f, prm, q),
        Bias::Float(x) => pipeline_with(f, prm, x),
    }
}
