//! Uniform and p-biased measures, influences and the inequalities relating them.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bits;
use crate::error::{Error, Result};
use crate::exact::cmp_scaled_logs;
use crate::family::{Family, UniformFamily};
use crate::scalar::{Bias, Scalar, Value};

/// `w[s] = p^s (1-p)^(n-s)`.
pub fn layer_weights<T: Scalar>(n: usize, p: &T) -> Vec<T> {
    let q = T::one() - p.clone();
    (0..=n).map(|s| p.powu(s) * q.powu(n - s)).collect()
}

fn weigh<T: Scalar>(counts: &[u64], w: &[T]) -> T {
    counts
        .iter()
        .zip(w)
        .filter(|(&c, _)| c != 0)
        .fold(T::zero(), |acc, (&c, x)| acc + T::from_count(c as u128) * x.clone())
}

/// `μ(F) = |F| / binom(n, k)`.
pub fn mu_uniform(f: &UniformFamily) -> BigRational {
    let total = f.layer_size();
    if total == 0 {
        return BigRational::zero();
    }
    BigRational::from_count(f.len() as u128) / BigRational::from_count(total)
}

pub fn mu_with<T: Scalar>(f: &Family, p: &T) -> T {
    weigh(&f.layer_counts(), &layer_weights(f.n(), p))
}

/// `μ_p(F)`, exact for fractional `p`.
pub fn mu_p(f: &Family, p: &Bias) -> Value {
    match p {
        Bias::Exact(q) => mu_with(f, q).into_value(),
        Bias::Float(x) => mu_with(f, x).into_value(),
    }
}

/// Sizes of the members of `I_i(F) = {S : exactly one of S, S△{i} in F}`.
fn influence_counts(f: &Family, i: usize) -> Vec<u64> {
    let b = bits::bit(i);
    let mut c = vec![0u64; f.n() + 1];
    for a in f.iter() {
        if !f.contains(a ^ b) {
            c[bits::size(a)] += 1;
            c[bits::size(a ^ b)] += 1;
        }
    }
    c
}

/// The set `I_i(F)` itself, in the mode of `F`.
pub fn influential_sets(f: &Family, i: usize) -> Family {
    let b = bits::bit(i);
    let mut out = Family::empty(f.n(), f.mode()).expect("same ground");
    for a in f.iter() {
        if !f.contains(a ^ b) {
            out.insert(a);
            out.insert(a ^ b);
        }
    }
    out
}

pub fn influence_with<T: Scalar>(f: &Family, i: usize, p: &T) -> T {
    weigh(&influence_counts(f, i), &layer_weights(f.n(), p))
}

pub fn influences_with<T: Scalar>(f: &Family, p: &T) -> Vec<T> {
    let w = layer_weights(f.n(), p);
    (1..=f.n())
        .into_par_iter()
        .map(|i| weigh(&influence_counts(f, i), &w))
        .collect()
}

fn check_coord(f: &Family, i: usize) -> Result<()> {
    if i == 0 || i > f.n() {
        return Err(Error::input(format!("coordinate {i} outside [{}]", f.n())));
    }
    Ok(())
}

/// `I_i^p(F)`.
pub fn influence(f: &Family, i: usize, p: &Bias) -> Result<Value> {
    check_coord(f, i)?;
    Ok(match p {
        Bias::Exact(q) => influence_with(f, i, q).into_value(),
        Bias::Float(x) => influence_with(f, i, x).into_value(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub mu: Value,
    pub influences: Vec<Value>,
    pub total_influence: Value,
}

fn report_with<T: Scalar>(f: &Family, p: &T) -> MeasureReport {
    let inf = influences_with(f, p);
    let total = inf.iter().cloned().fold(T::zero(), |a, b| a + b);
    MeasureReport {
        mu: mu_with(f, p).into_value(),
        influences: inf.into_iter().map(Scalar::into_value).collect(),
        total_influence: total.into_value(),
    }
}

pub fn measure_report(f: &Family, p: &Bias) -> MeasureReport {
    match p {
        Bias::Exact(q) => report_with(f, q),
        Bias::Float(x) => report_with(f, x),
    }
}

/// Central difference `(μ_{p+h} - μ_{p-h}) / 2h`.
pub fn mu_derivative(f: &Family, p: f64, h: f64) -> f64 {
    (mu_with(f, &(p + h)) - mu_with(f, &(p - h))) / (2.0 * h)
}

/// Degree-one Fourier coefficients `E_p[f · χ_i]` with
/// `χ_i(x) = (x_i - p) / sqrt(p(1-p))`.
pub fn fourier_level1(f: &Family, p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::contract("bias must lie strictly between 0 and 1"));
    }
    let n = f.n();
    let w = layer_weights(n, &p);
    let sd = (p * (1.0 - p)).sqrt();
    let hi = (1.0 - p) / sd;
    let lo = -p / sd;
    let mut coef = vec![0.0; n];
    for a in f.iter() {
        let wa = w[bits::size(a)];
        for (i, c) in coef.iter_mut().enumerate() {
            *c += wa * if a >> i & 1 == 1 { hi } else { lo };
        }
    }
    Ok(coef)
}

/// `p · I^p(F)` against `μ_p(F) · log_p μ_p(F)` (with `0 log 0 = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct IsoperimetryCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
}

pub fn isoperimetry_check(f: &Family, p: &Bias) -> Result<IsoperimetryCheck> {
    if !f.is_increasing() {
        return Err(Error::contract("isoperimetric inequality needs an increasing family"));
    }
    p.check_open_unit()?;
    Ok(match p {
        Bias::Exact(q) => {
            let mu = mu_with(f, q);
            let total: BigRational = influences_with(f, q).into_iter().fold(BigRational::zero(), |a, b| a + b);
            let x = q * &total;
            let lhs = Scalar::to_f64(&x);
            let (holds, equality, rhs) = if mu.is_zero() || mu.is_one() {
                (true, x.is_zero(), 0.0)
            } else {
                // p I >= μ ln μ / ln p  <=>  (pI) ln p <= μ ln μ, since ln p < 0
                let ord = cmp_scaled_logs(&x, q, &mu, &mu);
                let m = Scalar::to_f64(&mu);
                (ord != Ordering::Greater, ord == Ordering::Equal, m * m.ln() / Scalar::to_f64(q).ln())
            };
            IsoperimetryCheck { lhs, rhs, holds, equality }
        }
        Bias::Float(x) => {
            let mu = mu_with(f, x);
            let total: f64 = influences_with(f, x).iter().sum();
            let lhs = x * total;
            let rhs = if mu <= 0.0 { 0.0 } else { mu * mu.ln() / x.ln() };
            let tol = 1e-12 * lhs.abs().max(1.0);
            IsoperimetryCheck { lhs, rhs, holds: lhs >= rhs - tol, equality: (lhs - rhs).abs() <= tol }
        }
    })
}

/// `log_p μ_p(F)` in floating point (`None` when `μ_p(F) = 0`).
pub fn log_p_mu(f: &Family, p: f64) -> Option<f64> {
    let mu = mu_with(f, &p);
    (mu > 0.0).then(|| mu.ln() / p.ln())
}

/// `|F^(k)| / binom(n, k)` for every layer.
pub fn layer_densities(f: &Family) -> Vec<BigRational> {
    let n = f.n();
    f.layer_counts()
        .iter()
        .enumerate()
        .map(|(k, &c)| BigRational::from_count(c as u128) / BigRational::from_count(bits::binom(n, k)))
        .collect()
}

/// Members of `F` of size exactly `k`, as a fraction of the layer.
pub fn layer_density(f: &Family, k: usize) -> f64 {
    let c = f.iter().filter(|&a| bits::size(a) == k).count();
    c as f64 / bits::binom(f.n(), k) as f64
}

/// Lower bound `|F^(k)|/binom(n,k) · (1 - δ)` on `μ_p(F)` for an increasing
/// family, valid once `p >= (k + sqrt(2 n ln(1/δ))) / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationCheck {
    pub threshold: f64,
    pub applicable: bool,
    pub mu: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn monotone_approximation_check(f: &Family, k: usize, p: f64, delta: f64) -> Result<ApproximationCheck> {
    if !f.is_increasing() {
        return Err(Error::contract("approximation bound needs an increasing family"));
    }
    if !(delta > 0.0 && delta < 1.0) || k > f.n() {
        return Err(Error::input("need 0 < delta < 1 and k <= n"));
    }
    let n = f.n() as f64;
    let threshold = (k as f64 + (2.0 * n * (1.0 / delta).ln()).sqrt()) / n;
    let mu = mu_with(f, &p);
    let bound = layer_density(f, k) * (1.0 - delta);
    Ok(ApproximationCheck {
        threshold,
        applicable: p >= threshold,
        mu,
        bound,
        holds: mu >= bound - 1e-12,
    })
}
