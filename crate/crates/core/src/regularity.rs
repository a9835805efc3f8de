//! Slice statistics of uniform families: the potential `φ`, stability and
//! quasirandomness testers, the Jensen-gap bounds, and the regularity
//! decomposition into good, bad and exceptional slices.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{self, binom, Mask};
use crate::error::{Error, Result};
use crate::family::{spread, squeeze, Family, UniformFamily};
use crate::scalar::Scalar;

/// Largest number of coordinate sets a single scan may visit.
pub const SCAN_BUDGET: u128 = 2_000_000;

/// `Pr_{A ~ binom([n],k)}[A ∩ J = B]` for every `B ⊆ J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceDistribution {
    pub n: usize,
    pub k: usize,
    pub j: Mask,
    /// `(B, probability)` over all `B ⊆ J`, indexed by `squeeze(B, J)`.
    pub table: Vec<(Mask, BigRational)>,
}

impl SliceDistribution {
    pub fn probability(&self, b: Mask) -> &BigRational {
        &self.table[squeeze(b, self.j) as usize].1
    }
}

pub fn slice_distribution(n: usize, k: usize, j: Mask) -> Result<SliceDistribution> {
    if k > n || j & !bits::full(n) != 0 {
        return Err(Error::input("need k <= n and J ⊆ [n]"));
    }
    let m = bits::size(j);
    let total = BigRational::from_count(binom(n, k));
    let table = (0..1u32 << m)
        .map(|c| {
            let b = spread(c, j);
            let w = bits::binom_i((n - m) as i64, k as i64 - bits::size(b) as i64);
            (b, BigRational::from_count(w) / total.clone())
        })
        .collect();
    Ok(SliceDistribution { n, k, j, table })
}

fn x_log_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Member counts per slice key, indexed by `squeeze(A ∩ J, J)`.
fn slice_counts(f: &UniformFamily, j: Mask) -> Vec<u64> {
    let mut c = vec![0u64; 1 << bits::size(j)];
    for a in f.iter() {
        c[squeeze(a & j, j) as usize] += 1;
    }
    c
}

/// `(probability, density)` of every slice over `J` with positive probability.
fn slice_stats(f: &UniformFamily, j: Mask) -> Vec<(Mask, f64, f64)> {
    let (n, k) = (f.n(), f.k());
    let m = bits::size(j);
    let total = binom(n, k) as f64;
    let counts = slice_counts(f, j);
    (0..1u32 << m)
        .filter_map(|c| {
            let b = spread(c, j);
            let room = bits::binom_i((n - m) as i64, k as i64 - bits::size(b) as i64);
            (room > 0).then(|| (b, room as f64 / total, counts[c as usize] as f64 / room as f64))
        })
        .collect()
}

/// `φ(F, J) = E_B α log α` with `α = μ(F_J^B)` and `0 log 0 = 0`.
pub fn potential(f: &UniformFamily, j: Mask) -> Result<f64> {
    if j & !bits::full(f.n()) != 0 {
        return Err(Error::input("coordinate set outside [n]"));
    }
    Ok(compensated_sum(slice_stats(f, j).into_iter().map(|(_, p, a)| p * x_log_x(a))))
}

fn scan_sets(n: usize, h: usize) -> Result<Vec<Mask>> {
    if h > n {
        return Err(Error::input(format!("h = {h} exceeds n = {n}")));
    }
    let count: u128 = (0..=h).map(|s| binom(n, s)).sum();
    if count > SCAN_BUDGET {
        return Err(Error::resource(format!(
            "scanning {count} coordinate sets exceeds the budget {SCAN_BUDGET}"
        )));
    }
    Ok((0..=h).flat_map(|s| bits::k_subsets_lex(n, s)).collect())
}

/// `None` when `φ(F,J) < φ(F,∅) + η` for all `|J| <= h`; otherwise the first
/// violating `J` in size-then-lex order.
pub fn is_potentially_stable(f: &UniformFamily, eta: f64, h: usize) -> Result<Option<Mask>> {
    let base = potential(f, 0)?;
    for j in scan_sets(f.n(), h)? {
        if potential(f, j)? >= base + eta {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Largest `|μ(F_J^B) - μ(F)|` over `|J| <= h` and positive-probability `B`,
/// with the first `(J, B)` attaining it.
pub fn max_slice_deviation(f: &UniformFamily, h: usize) -> Result<(f64, Option<(Mask, Mask)>)> {
    let mu = f.len() as f64 / binom(f.n(), f.k()) as f64;
    let mut best = (0.0, None);
    for j in scan_sets(f.n(), h)? {
        for (b, _, a) in slice_stats(f, j) {
            let dev = (a - mu).abs();
            if dev > best.0 {
                best = (dev, Some((j, b)));
            }
        }
    }
    Ok(best)
}

/// `None` when `|μ(F_J^B) - μ(F)| < δ` for all `|J| <= h`; otherwise the first
/// `J` (size-then-lex) with a violation, paired with its most deviating `B`
/// (lexicographically first on ties).
pub fn is_slice_quasirandom(f: &UniformFamily, delta: f64, h: usize) -> Result<Option<(Mask, Mask)>> {
    let mu = f.len() as f64 / binom(f.n(), f.k()) as f64;
    let n = f.n();
    for j in scan_sets(n, h)? {
        let mut worst: Option<(f64, Mask)> = None;
        for (b, _, a) in slice_stats(f, j) {
            let dev = (a - mu).abs();
            if dev >= delta {
                let better = match worst {
                    None => true,
                    Some((d, wb)) => dev > d || (dev == d && bits::lex_key(b, n) < bits::lex_key(wb, n)),
                };
                if better {
                    worst = Some((dev, b));
                }
            }
        }
        if let Some((_, b)) = worst {
            return Ok(Some((j, b)));
        }
    }
    Ok(None)
}

/// `η = min{λδ²/(2C), λ³δ²/(2(1-λ)²C)}`.
pub fn eta_for(lambda: f64, delta: f64, c: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0 && delta > 0.0 && delta < 1.0 && c > 0.0) {
        return Err(Error::input("need 0 < lambda < 1, 0 < delta < 1, C > 0"));
    }
    let a = lambda * delta * delta / (2.0 * c);
    let b = lambda.powi(3) * delta * delta / (2.0 * (1.0 - lambda).powi(2) * c);
    Ok(a.min(b))
}

/// Smallest positive slice probability over `|J| <= h` in `binom([n], k)`.
pub fn min_slice_probability(n: usize, k: usize, h: usize) -> f64 {
    let total = binom(n, k) as f64;
    let mut lo = 1.0f64;
    for j in 1..=h.min(n) {
        for b in 0..=j {
            let w = bits::binom_i((n - j) as i64, k as i64 - b as i64);
            if w > 0 {
                lo = lo.min(w as f64 / total);
            }
        }
    }
    lo
}

fn check_distribution(probs: &[f64], xs: &[f64]) -> Result<()> {
    if probs.len() != xs.len() || probs.is_empty() {
        return Err(Error::input("probabilities and values must have the same positive length"));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) || xs.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::input("probabilities and values must be non-negative"));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::input(format!("probabilities sum to {s}, not 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoxCheck {
    /// `E f(X)`.
    pub lhs: f64,
    /// `f(EX) + (1 - β + f(β)) Pr[X <= β EX] EX`.
    pub rhs: f64,
    pub holds: bool,
}

/// The Jensen-gap lower bound for `f(x) = x log x`.
pub fn fox_gap_check(probs: &[f64], xs: &[f64], beta: f64) -> Result<FoxCheck> {
    check_distribution(probs, xs)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::input("need 0 < beta < 1"));
    }
    let ex = compensated_sum(probs.iter().zip(xs).map(|(p, x)| p * x));
    let lhs = compensated_sum(probs.iter().zip(xs).map(|(p, &x)| p * x_log_x(x)));
    let low: f64 = probs.iter().zip(xs).filter(|(_, &x)| x <= beta * ex).map(|(p, _)| p).sum();
    let rhs = x_log_x(ex) + (1.0 - beta + x_log_x(beta)) * low * ex;
    Ok(FoxCheck { lhs, rhs, holds: lhs >= rhs - 1e-12 })
}

/// If `E f(X) < f(EX) + η` (with `η = eta_for(λ, δ, C)`, every atom of mass
/// at least `λ`, `EX <= C`) then every value lies within `δ` of `EX`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationCheck {
    pub eta: f64,
    pub premise: bool,
    pub max_deviation: f64,
    pub conclusion: bool,
}

pub fn jensen_concentration_check(probs: &[f64], xs: &[f64], lambda: f64, delta: f64, c: f64) -> Result<ConcentrationCheck> {
    check_distribution(probs, xs)?;
    let eta = eta_for(lambda, delta, c)?;
    if probs.iter().any(|&p| p < lambda) {
        return Err(Error::contract("some atom has probability below lambda"));
    }
    let ex = compensated_sum(probs.iter().zip(xs).map(|(p, x)| p * x));
    if ex > c {
        return Err(Error::contract("E X exceeds C"));
    }
    let efx = compensated_sum(probs.iter().zip(xs).map(|(p, &x)| p * x_log_x(x)));
    let premise = efx < x_log_x(ex) + eta;
    let max_deviation = xs.iter().map(|x| (x - ex).abs()).fold(0.0, f64::max);
    Ok(ConcentrationCheck { eta, premise, max_deviation, conclusion: max_deviation < delta })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeParams {
    pub zeta: f64,
    pub delta: f64,
    pub h: usize,
    pub eps: f64,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        DecomposeParams { zeta: 0.25, delta: 0.2, h: 1, eps: 0.25 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceClass {
    Good,
    Bad,
    Exceptional,
}

impl fmt::Display for SliceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceClass::Good => "good",
            SliceClass::Bad => "bad",
            SliceClass::Exceptional => "exceptional",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceDiag {
    /// Slice key `B ⊆ J` in original coordinates.
    pub b: Mask,
    pub class: SliceClass,
    pub probability: f64,
    pub density: f64,
    /// Good slices: `δ - max deviation` over `|J'| <= h`.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationLog {
    pub j: Mask,
    pub phi: f64,
    /// Smallest stability threshold used on a bad slice this round.
    pub eta: f64,
    /// `μ(F \ ⟨G⟩)` for this round's good keys.
    pub outside: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub j: Mask,
    pub good: Vec<Mask>,
    pub slices: Vec<SliceDiag>,
    pub log: Vec<IterationLog>,
    /// Threshold from `eta_for((ζ/2)^h, δ, 1)`.
    pub eta: f64,
    pub outside: f64,
}

impl Decomposition {
    /// `φ` gained from each round to the next, with the required minimum `η ε / 2`.
    pub fn increments(&self, eps: f64) -> Vec<(f64, f64)> {
        self.log.windows(2).map(|w| (w[1].phi - w[0].phi, w[0].eta * eps / 2.0)).collect()
    }

    /// Recheck the guarantees from `f` itself: uncovered measure below `ε`,
    /// every good slice dense and `(δ, h)`-quasirandom, and the potential
    /// growing by at least `η ε / 2` per round.
    pub fn audit(&self, f: &UniformFamily, prm: &DecomposeParams) -> Result<()> {
        let (n, k) = (f.n(), f.k());
        let rest = bits::full(n) & !self.j;
        let mut groups: HashMap<Mask, Vec<Mask>> = HashMap::new();
        for a in f.iter() {
            groups.entry(a & self.j).or_default().push(squeeze(a, rest));
        }
        let covered: usize = self.good.iter().map(|b| groups.get(b).map_or(0, Vec::len)).sum();
        let outside = (f.len() - covered) as f64 / binom(n, k) as f64;
        if outside >= prm.eps {
            return Err(Error::contract(format!("coverage: uncovered measure {outside} >= eps = {}", prm.eps)));
        }
        let n2 = n - bits::size(self.j);
        for &b in &self.good {
            let k2 = k - bits::size(b);
            let sub = UniformFamily::new(n2, k2, groups.remove(&b).unwrap_or_default())?;
            let density = sub.len() as f64 / binom(n2, k2) as f64;
            if density <= prm.eps / 2.0 {
                return Err(Error::contract(format!("density: good slice {:?} has density {density}", bits::elements(b))));
            }
            if let Some((jj, bb)) = is_slice_quasirandom(&sub, prm.delta, prm.h.min(n2))? {
                return Err(Error::contract(format!(
                    "quasirandomness: good slice {:?} deviates at J = {:?}, B = {:?}",
                    bits::elements(b),
                    bits::elements(jj),
                    bits::elements(bb)
                )));
            }
        }
        for (i, (gain, need)) in self.increments(prm.eps).into_iter().enumerate() {
            if gain < need - 1e-12 {
                return Err(Error::contract(format!("potential: round {i} gained {gain}, needed {need}")));
            }
        }
        Ok(())
    }
}

/// Split `F` into slices over a growing coordinate set `J` until the
/// non-good slices carry measure below `ε`.
pub fn regularity_decompose(f: &UniformFamily, prm: &DecomposeParams) -> Result<Decomposition> {
    let (n, k) = (f.n(), f.k());
    let DecomposeParams { zeta, delta, h, eps } = *prm;
    if !(zeta > 0.0 && zeta < 0.5) || !(eps > 0.0 && eps < 1.0) || h == 0 {
        return Err(Error::input("need 0 < zeta < 1/2, 0 < eps < 1, h >= 1"));
    }
    if !(zeta * (n as f64) < k as f64 && (k as f64) < (1.0 - zeta) * n as f64) {
        return Err(Error::contract(format!("uniformity: need zeta n < k < (1 - zeta) n, got n = {n}, k = {k}")));
    }
    let lam = (zeta / 2.0).powi(h as i32);
    let eta = eta_for(lam, delta, 1.0)?;
    let mut j: Mask = 0;
    let mut log = Vec::new();
    let mut eta_min = eta;
    loop {
        let phi = potential(f, j)?;
        let rest = bits::full(n) & !j;
        let mut slices = Vec::new();
        let mut grow: Mask = 0;
        let mut round_eta = eta;
        let mut groups: HashMap<Mask, Vec<Mask>> = HashMap::new();
        for a in f.iter() {
            groups.entry(a & j).or_default().push(squeeze(a, rest));
        }
        for (b, prob, density) in slice_stats(f, j) {
            let class;
            let mut margin = None;
            if density <= eps / 2.0 {
                class = SliceClass::Exceptional;
            } else {
                let (n2, k2) = (n - bits::size(j), k - bits::size(b));
                let sub = UniformFamily::new(n2, k2, groups.remove(&b).unwrap_or_default())?;
                let lam_b = lam.min(min_slice_probability(n2, k2, h));
                let eta_b = if lam_b < 1.0 { eta_for(lam_b, delta, 1.0)? } else { eta };
                match is_potentially_stable(&sub, eta_b, h.min(n2))? {
                    None => {
                        class = SliceClass::Good;
                        margin = Some(delta - max_slice_deviation(&sub, h.min(n2))?.0);
                    }
                    Some(s) => {
                        class = SliceClass::Bad;
                        grow |= spread(s, rest);
                        round_eta = round_eta.min(eta_b);
                    }
                }
            }
            slices.push(SliceDiag { b, class, probability: prob, density, margin });
        }
        let outside = compensated_sum(
            slices.iter().filter(|s| s.class != SliceClass::Good).map(|s| s.probability * s.density),
        );
        log.push(IterationLog { j, phi, eta: round_eta, outside });
        if outside < eps {
            let good = slices.iter().filter(|s| s.class == SliceClass::Good).map(|s| s.b).collect();
            return Ok(Decomposition { j, good, slices, log, eta, outside });
        }
        eta_min = eta_min.min(round_eta);
        let bound = 2.0 / (std::f64::consts::E * eta_min * eps);
        if log.len() as f64 > bound || grow == 0 {
            let trail: Vec<String> = log.iter().map(|l| format!("{:?}:{}", bits::elements(l.j), l.phi)).collect();
            return Err(Error::resource(format!(
                "decomposition exceeded its iteration bound {bound:.1}; potential log {}",
                trail.join(" ")
            )));
        }
        j |= grow;
    }
}

/// Lexicographically first `(A, B)` with `|A ∩ B| = t - 1`.
pub fn intersection_witness(a: &Family, b: &Family, t: usize) -> Option<(Mask, Mask)> {
    if t == 0 {
        return None;
    }
    let bl = b.members_lex();
    for x in a.members_lex() {
        if let Some(&y) = bl.iter().find(|&&y| bits::size(x & y) == t - 1) {
            return Some((x, y));
        }
    }
    None
}

/// One of `S`, `[n] \ S` for every `n/2`-set `S`, by independent fair coins.
pub fn gen_paired_random(n: usize, seed: u64) -> Result<UniformFamily> {
    if n % 2 == 1 || n == 0 || n > bits::MAX_N {
        return Err(Error::input(format!("paired-random families need an even 2 <= n <= {}, got {n}", bits::MAX_N)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = bits::full(n);
    let members: Vec<Mask> = bits::k_subsets_lex(n, n / 2)
        .into_iter()
        .filter(|&s| s & 1 == 1)
        .map(|s| if rng.gen_bool(0.5) { s } else { full & !s })
        .collect();
    UniformFamily::new(n, n / 2, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn slice_distribution_examples() {
        let d = slice_distribution(4, 2, 0b1).unwrap();
        assert_eq!(d.probability(0b1), &rational(1, 2));
        let d = slice_distribution(4, 2, 0b11).unwrap();
        assert_eq!(d.probability(0b1), &rational(1, 3));
    }

    #[test]
    fn star_potential() {
        let star = UniformFamily::from_predicate(4, 2, |s| s & 1 != 0).unwrap();
        assert_eq!(potential(&star, 1).unwrap(), 0.0);
        let half = potential(&star, 0).unwrap();
        assert!((half - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(is_potentially_stable(&star, 0.01, 1).unwrap(), Some(1));
    }

    #[test]
    fn eta_plug_in() {
        assert!((eta_for(0.5, 0.1, 1.0).unwrap() - 0.0025).abs() < 1e-15);
    }
}
