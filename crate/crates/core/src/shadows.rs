//! Lower shadows, lexicographic segments, and the cross-intersection bounds.

use num_rational::BigRational;
use num_traits::One;

use crate::bits::{self, binom, binom_i, Mask};
use crate::error::{Error, Result};
use crate::family::{Family, UniformFamily};
use crate::measures::mu_with;

/// `∂A`: all `(k-1)`-sets contained in some member.
pub fn lower_shadow(a: &UniformFamily) -> Result<UniformFamily> {
    if a.k() == 0 {
        return Err(Error::input("the shadow of a 0-uniform family is undefined"));
    }
    let mut out = Vec::with_capacity(a.len() * a.k());
    for s in a.iter() {
        let mut w = s;
        while w != 0 {
            let low = w & w.wrapping_neg();
            out.push(s ^ low);
            w ^= low;
        }
    }
    UniformFamily::new(a.n(), a.k() - 1, out)
}

pub fn iterated_shadow(a: &UniformFamily, steps: usize) -> Result<UniformFamily> {
    if steps > a.k() {
        return Err(Error::input(format!("cannot take {steps} shadows of a {}-uniform family", a.k())));
    }
    let mut cur = a.clone();
    for _ in 0..steps {
        cur = lower_shadow(&cur)?;
    }
    Ok(cur)
}

/// `∂⁺A`: all `(k+1)`-sets containing some member.
pub fn upper_shadow(a: &UniformFamily) -> Result<UniformFamily> {
    if a.k() == a.n() {
        return Err(Error::input("the upper shadow of the top layer is undefined"));
    }
    let full = bits::full(a.n());
    let mut out = Vec::new();
    for s in a.iter() {
        let mut w = full & !s;
        while w != 0 {
            let low = w & w.wrapping_neg();
            out.push(s | low);
            w ^= low;
        }
    }
    UniformFamily::new(a.n(), a.k() + 1, out)
}

/// The first `m` sets of `binom([n], k)` in colex order; these have the
/// smallest lower shadow among families of that size.
pub fn colex_segment(n: usize, k: usize, m: usize) -> Result<UniformFamily> {
    let total = binom(n, k);
    if m as u128 > total {
        return Err(Error::input(format!("segment of size {m} exceeds binom({n},{k}) = {total}")));
    }
    UniformFamily::new(n, k, bits::k_subsets_colex(n, k).into_iter().take(m))
}

/// The first `m` sets of `binom([n], k)` in lexicographic order; these have
/// the smallest upper shadow among families of that size.
pub fn lex_segment(n: usize, k: usize, m: usize) -> Result<UniformFamily> {
    let total = binom(n, k);
    if m as u128 > total {
        return Err(Error::input(format!("segment of size {m} exceeds binom({n},{k}) = {total}")));
    }
    let sets = bits::k_subsets_lex(n, k);
    UniformFamily::new(n, k, sets.into_iter().take(m))
}

/// `L(F)`: the lexicographic segment of the same size.
pub fn lex_compress(f: &UniformFamily) -> UniformFamily {
    lex_segment(f.n(), f.k(), f.len()).expect("size fits its own layer")
}

/// Lexicographically smallest `(A, B)` with `A ∩ B = ∅`, or `None` when the
/// families are cross-intersecting.
pub fn cross_intersecting_witness(a: &Family, b: &Family) -> Option<(Mask, Mask)> {
    let bl = b.members_lex();
    for x in a.members_lex() {
        if let Some(&y) = bl.iter().find(|&&y| x & y == 0) {
            return Some((x, y));
        }
    }
    None
}

pub fn cross_intersecting(a: &Family, b: &Family) -> bool {
    cross_intersecting_witness(a, b).is_none()
}

fn require_cross(a: &Family, b: &Family) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::input("families live on different ground sets"));
    }
    if let Some((x, y)) = cross_intersecting_witness(a, b) {
        return Err(Error::contract(format!(
            "not cross-intersecting: {:?} and {:?} are disjoint",
            bits::elements(x),
            bits::elements(y)
        )));
    }
    Ok(())
}

/// `|B| <= C(n-r, l-r)` when `|A| >= C(n,k) - C(n-r,k)`, and the shadow chain
/// `|∂^{n-k-l}(complements of A)| >= C(n,l) - C(n-r,l-r)` behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KkReport {
    pub b_size: u128,
    pub bound: u128,
    pub holds: bool,
    pub chain_size: u128,
    pub chain_bound: u128,
    pub chain_holds: bool,
}

pub fn kk_cross_bound_audit(a: &UniformFamily, b: &UniformFamily, r: usize) -> Result<KkReport> {
    let (n, k, l) = (a.n(), a.k(), b.k());
    if n < k + l {
        return Err(Error::contract(format!("size: need n >= k + l, got {n} < {}", k + l)));
    }
    require_cross(a, b)?;
    let need = binom(n, k) - binom_i(n as i64 - r as i64, k as i64);
    if (a.len() as u128) < need {
        return Err(Error::contract(format!("hypothesis: |A| = {} < C(n,k) - C(n-r,k) = {need}", a.len())));
    }
    let bound = binom_i(n as i64 - r as i64, l as i64 - r as i64);
    let comp = UniformFamily::new(n, n - k, a.complements().iter())?;
    let chain = iterated_shadow(&comp, n - k - l)?;
    let chain_bound = binom(n, l) - binom_i(n as i64 - r as i64, l as i64 - r as i64);
    Ok(KkReport {
        b_size: b.len() as u128,
        bound,
        holds: b.len() as u128 <= bound,
        chain_size: chain.len() as u128,
        chain_bound,
        chain_holds: chain.len() as u128 >= chain_bound,
    })
}

/// Sufficient binomial conditions under which the weighted bound's induction
/// goes through for weight `w` on an `l`-uniform / `k`-uniform pair.
pub fn weighted_chain_admissible(n: usize, l: usize, k: usize, w: f64) -> bool {
    if n < k + l {
        return false;
    }
    for j in 0..=k {
        let (nj, lj, kj) = (n as i64 - 2 * j as i64, l as i64 - j as i64, (k - j) as i64);
        let lhs = if kj == 0 { w } else { w * binom_i(nj, kj) as f64 };
        let rhs = if kj == 0 { binom_i(nj - 1, lj - 1) } else { binom_i(nj - 2, lj - 1) } as f64;
        if w > 0.0 && lhs > rhs {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Whether the explicit binomial conditions (standing in for a large
    /// enough `c0`) hold for these parameters.
    pub chain_admissible: bool,
}

fn weighted_check(lhs: f64, rhs: f64, chain_admissible: bool) -> WeightedReport {
    WeightedReport { lhs, rhs, holds: lhs <= rhs + 1e-9 * rhs.abs().max(1.0), chain_admissible }
}

/// `|A| + C|B| <= C(n,l) - C(n-d,l) + C·C(n-d,k-d)` for cross-intersecting
/// `A ⊆ binom([n], l)`, `B ⊆ binom([n], k)` with `|A| <= C(n,l) - C(n-d,l)`.
pub fn weighted_cross_bound_audit(
    a: &UniformFamily,
    b: &UniformFamily,
    weight: f64,
    d: usize,
    eta: f64,
    c0: usize,
) -> Result<WeightedReport> {
    let (n, l, k) = (a.n(), a.k(), b.k());
    if !(weight >= 0.0) || !(eta > 0.0) {
        return Err(Error::input("need weight >= 0 and eta > 0"));
    }
    if (n as f64) < (1.0 + eta) * l as f64 + (k + c0) as f64 {
        return Err(Error::contract(format!("size: n = {n} < (1+eta) l + k + c0")));
    }
    if l + 1 < k + c0 {
        return Err(Error::contract(format!("gap: l = {l} < k + c0 - 1 = {}", k + c0 - 1)));
    }
    require_cross(a, b)?;
    let cap = binom(n, l) - binom_i(n as i64 - d as i64, l as i64);
    if a.len() as u128 > cap {
        return Err(Error::contract(format!("hypothesis: |A| = {} > C(n,l) - C(n-d,l) = {cap}", a.len())));
    }
    let lhs = a.len() as f64 + weight * b.len() as f64;
    let rhs = cap as f64 + weight * binom_i(n as i64 - d as i64, k as i64 - d as i64) as f64;
    Ok(weighted_check(lhs, rhs, weighted_chain_admissible(n, l, k, weight)))
}

/// `|F| + M|G| <= C(n,k1) - C(n-d,k1) + M·C(n-d,k2-d)` for cross-intersecting
/// `F ⊆ binom([n], k1)`, `G ⊆ binom([n], k2)` with
/// `C(n-d,k2-d) <= |G| <= C(n-c,k2-c)` and `c <= d <= k2`.
pub fn sandwiched_cross_bound_audit(
    f: &UniformFamily,
    g: &UniformFamily,
    weight: f64,
    c: usize,
    d: usize,
) -> Result<WeightedReport> {
    let (n, k1, k2) = (f.n(), f.k(), g.k());
    if !(weight >= 0.0) {
        return Err(Error::input("need weight >= 0"));
    }
    if c > d || d > k2 {
        return Err(Error::contract(format!("range: need c <= d <= k2, got c = {c}, d = {d}, k2 = {k2}")));
    }
    require_cross(f, g)?;
    let lo = binom(n - d, k2 - d);
    let hi = binom(n - c, k2 - c);
    let gs = g.len() as u128;
    if gs < lo || gs > hi {
        return Err(Error::contract(format!("hypothesis: |G| = {gs} outside [{lo}, {hi}]")));
    }
    let lhs = f.len() as f64 + weight * g.len() as f64;
    let rhs = (binom(n, k1) - binom(n - d, k1)) as f64 + weight * lo as f64;
    let admissible = n >= k1 + k2 && weighted_chain_admissible(n - c, k1, k2 - c, weight);
    Ok(weighted_check(lhs, rhs, admissible))
}

/// `μ_p(F) <= (1 - μ_p(G))^{log_{1-p} p}` and `μ_{1/2}(F) + μ_{1/2}(G) <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedCrossReport {
    pub mu_f: f64,
    pub mu_g: f64,
    pub power_bound: f64,
    pub power_holds: bool,
    pub power_equality: bool,
    pub half_sum: BigRational,
    pub half_holds: bool,
}

pub fn power_bound(mu_g: f64, p: f64) -> f64 {
    (1.0 - mu_g).powf(p.ln() / (1.0 - p).ln())
}

pub fn biased_cross_bounds_audit(f: &Family, g: &Family, p: f64) -> Result<BiasedCrossReport> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::contract("need 0 < p <= 1/2"));
    }
    require_cross(f, g)?;
    let mu_f = mu_with(f, &p);
    let mu_g = mu_with(g, &p);
    let bound = power_bound(mu_g, p);
    let half = BigRational::new(1.into(), 2.into());
    let half_sum = mu_with(f, &half) + mu_with(g, &half);
    Ok(BiasedCrossReport {
        mu_f,
        mu_g,
        power_bound: bound,
        power_holds: mu_f <= bound + 1e-12,
        power_equality: (mu_f - bound).abs() <= 1e-12,
        half_holds: half_sum <= BigRational::one(),
        half_sum,
    })
}

/// Result of checking both biased bounds on every cross-intersecting pair of
/// families over a small ground set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExhaustiveCrossSummary {
    pub pairs: u64,
    pub power_violations: u64,
    pub half_violations: u64,
    pub power_equalities: u64,
}

/// Enumerate all pairs `(F, G)` of cross-intersecting families on `[n]`, `n <= 4`.
pub fn exhaustive_cross_audit(n: usize, p: f64) -> Result<ExhaustiveCrossSummary> {
    if n > 4 {
        return Err(Error::resource("exhaustive cross-intersecting enumeration is limited to n <= 4"));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::contract("need 0 < p <= 1/2"));
    }
    let sets = 1usize << n;
    let fams = 1usize << sets;
    let weight: Vec<f64> = (0..sets).map(|s| {
        let k = (s as u32).count_ones() as i32;
        p.powi(k) * (1.0 - p).powi(n as i32 - k)
    }).collect();
    // μ_p and |.| of every family, indexed by its truth table.
    let mut mu = vec![0.0f64; fams];
    for m in 1..fams {
        let low = m.trailing_zeros() as usize;
        mu[m] = mu[m & (m - 1)] + weight[low];
    }
    let mut out = ExhaustiveCrossSummary::default();
    for g in 0..fams {
        // Sets meeting every member of G.
        let mut allowed = 0usize;
        for s in 0..sets {
            if (0..sets).all(|b| g >> b & 1 == 0 || s & b != 0) {
                allowed |= 1 << s;
            }
        }
        let bound = power_bound(mu[g], p);
        let g_size = (g as u64).count_ones();
        let mut f = allowed;
        loop {
            out.pairs += 1;
            let diff = mu[f] - bound;
            if diff > 1e-12 {
                out.power_violations += 1;
            } else if diff.abs() <= 1e-12 {
                out.power_equalities += 1;
            }
            if (f as u64).count_ones() + g_size > sets as u32 {
                out.half_violations += 1;
            }
            if f == 0 {
                break;
            }
            f = (f - 1) & allowed;
        }
    }
    Ok(out)
}
