//! The families `{S : |S ∩ B| >= t + r}` with `|B| = t + 2r`, their sizes and
//! measures, the best choice of `r`, and the two-clause tightness families.

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::family::{Family, UniformFamily};
use crate::scalar::{Bias, Scalar, Value};

/// Parameters of `F_{n,t,r}` with an explicit base set of size `t + 2r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FranklSpec {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub base: Mask,
}

impl FranklSpec {
    /// Base set `[t + 2r]`.
    pub fn standard(n: usize, t: usize, r: usize) -> Result<FranklSpec> {
        let spec = FranklSpec { n, t, r, base: bits::prefix(t + 2 * r) };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_base(n: usize, t: usize, r: usize, base: Mask) -> Result<FranklSpec> {
        let spec = FranklSpec { n, t, r, base };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::input("t must be at least 1"));
        }
        if self.t + 2 * self.r > self.n || self.n > bits::MAX_N {
            return Err(Error::input(format!(
                "t + 2r = {} does not fit in a ground set of size {}",
                self.t + 2 * self.r,
                self.n
            )));
        }
        if bits::size(self.base) != self.t + 2 * self.r || self.base & !bits::full(self.n) != 0 {
            return Err(Error::input("base set must be a (t+2r)-subset of [n]"));
        }
        Ok(())
    }

    pub fn accepts(&self, a: Mask) -> bool {
        bits::size(a & self.base) >= self.t + self.r
    }

    /// `F_{n,t,r}` in power-set mode.
    pub fn dense(&self) -> Result<Family> {
        Family::from_predicate(self.n, |a| self.accepts(a))
    }

    /// `F_{n,k,t,r}`.
    pub fn uniform(&self, k: usize) -> Result<UniformFamily> {
        UniformFamily::from_predicate(self.n, k, |a| self.accepts(a))
    }
}

/// `|F_{n,k,t,r}| = Σ_{i=t+r}^{t+2r} C(t+2r, i) C(n-t-2r, k-i)`.
pub fn frankl_size(n: usize, k: usize, t: usize, r: usize) -> u128 {
    let b = t + 2 * r;
    if b > n {
        return 0;
    }
    (t + r..=b).map(|i| bits::binom(b, i) * bits::binom_i((n - b) as i64, k as i64 - i as i64)).sum()
}

/// Largest Frankl family in `binom([n], k)`: the size and every optimal `r`.
pub fn f_uniform(n: usize, k: usize, t: usize) -> Result<(u128, Vec<usize>)> {
    if t == 0 || t > k || k > n {
        return Err(Error::input("need 1 <= t <= k <= n"));
    }
    let mut best = 0u128;
    let mut rs = Vec::new();
    for r in 0..=(k - t) {
        if t + 2 * r > n {
            break;
        }
        let s = frankl_size(n, k, t, r);
        if s > best {
            best = s;
            rs.clear();
        }
        if s == best {
            rs.push(r);
        }
    }
    Ok((best, rs))
}

/// `μ_p(F_{t,r}) = Σ_{i=t+r}^{t+2r} C(t+2r, i) p^i (1-p)^(t+2r-i)`.
pub fn frankl_mu_with<T: Scalar>(t: usize, r: usize, p: &T) -> T {
    let b = t + 2 * r;
    let q = T::one() - p.clone();
    (t + r..=b).fold(T::zero(), |acc, i| acc + T::from_count(bits::binom(b, i)) * p.powu(i) * q.powu(b - i))
}

pub fn frankl_mu(t: usize, r: usize, p: &Bias) -> Value {
    match p {
        Bias::Exact(q) => frankl_mu_with(t, r, q).into_value(),
        Bias::Float(x) => frankl_mu_with(t, r, x).into_value(),
    }
}

fn check_below_half(p: &Bias) -> Result<()> {
    let ok = match p {
        Bias::Exact(q) => q.is_positive() && *q < BigRational::new(1.into(), 2.into()),
        Bias::Float(x) => *x > 0.0 && *x < 0.5,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::contract(format!("bias {p} must lie in (0, 1/2)")))
    }
}

/// Smallest `r >= 1` with `r / (t + 2r - 1) > p`; no optimal `r` lies beyond it.
pub fn r_scan_limit(t: usize, p: &Bias) -> usize {
    let mut r = 1usize;
    loop {
        let beyond = match p {
            Bias::Exact(q) => BigRational::new((r as i64).into(), ((t + 2 * r - 1) as i64).into()) > *q,
            Bias::Float(x) => r as f64 / (t + 2 * r - 1) as f64 > *x,
        };
        if beyond {
            return r;
        }
        r += 1;
    }
}

const FLOAT_TIE: f64 = 1e-12;

/// `(index of first maximum, all maxima, candidates within 10x the float tolerance)`.
fn argmax_values(values: &[Value]) -> (usize, Vec<usize>, Vec<usize>) {
    let exact = matches!(values.first(), Some(Value::Exact(_)));
    let mut best = 0;
    for i in 1..values.len() {
        let better = match (&values[i], &values[best]) {
            (Value::Exact(a), Value::Exact(b)) => a > b,
            (a, b) => a.to_f64() > b.to_f64() + if exact { 0.0 } else { FLOAT_TIE },
        };
        if better {
            best = i;
        }
    }
    let within = |i: usize, tol: f64| match (&values[i], &values[best]) {
        (Value::Exact(a), Value::Exact(b)) => a == b,
        (a, b) => (a.to_f64() - b.to_f64()).abs() <= tol,
    };
    let ties = (0..values.len()).filter(|&i| within(i, FLOAT_TIE)).collect();
    let near = (0..values.len()).filter(|&i| within(i, 10.0 * FLOAT_TIE)).collect();
    (best, ties, near)
}

/// `f(n, p, t)`: the best `μ_p(F_{n,t,r})` and every `r` attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedMax {
    pub value: Value,
    pub rs: Vec<usize>,
}

pub fn f_biased(n: usize, p: &Bias, t: usize) -> Result<BiasedMax> {
    check_below_half(p)?;
    if t == 0 || t > n {
        return Err(Error::input("need 1 <= t <= n"));
    }
    let limit = r_scan_limit(t, p);
    let rs: Vec<usize> = (0..=limit).take_while(|&r| t + 2 * r <= n).collect();
    let values: Vec<Value> = rs.iter().map(|&r| frankl_mu(t, r, p)).collect();
    let (best, ties, _) = argmax_values(&values);
    Ok(BiasedMax { value: values[best].clone(), rs: ties.into_iter().map(|i| rs[i]).collect() })
}

/// The optimal `r` for density `β`, flagged singular when two values of `r` tie.
#[derive(Clone, Debug, PartialEq)]
pub struct RStar {
    pub r: usize,
    pub singular: bool,
    /// Floating inputs only: values of `r` within ten times the tie tolerance.
    pub near: Vec<usize>,
}

pub fn r_star(beta: &Bias, t: usize) -> Result<RStar> {
    check_below_half(beta)?;
    if t == 0 {
        return Err(Error::input("t must be at least 1"));
    }
    let limit = r_scan_limit(t, beta);
    let values: Vec<Value> = (0..=limit).map(|r| frankl_mu(t, r, beta)).collect();
    let (_, ties, near) = argmax_values(&values);
    Ok(RStar {
        r: ties[0],
        singular: ties.len() > 1,
        near: if beta.is_exact() { Vec::new() } else { near },
    })
}

/// The two-clause family: `|A ∩ [t+2r]| >= t+r` and `A` meets `D`, or
/// `|A ∩ [t+2r]| = t+r-1` and `D ⊆ A`, where `D = {t+2r+1 .. t+2r+s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightnessSpec {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub s: usize,
}

impl TightnessSpec {
    pub fn new(n: usize, t: usize, r: usize, s: usize) -> Result<TightnessSpec> {
        if t == 0 {
            return Err(Error::input("t must be at least 1"));
        }
        if t + 2 * r + s > n || n > bits::MAX_N {
            return Err(Error::input(format!("t + 2r + s = {} exceeds n = {n}", t + 2 * r + s)));
        }
        Ok(TightnessSpec { n, t, r, s })
    }

    pub fn accepts(&self, a: Mask) -> bool {
        let b = self.t + 2 * self.r;
        let base = bits::size(a & bits::prefix(b));
        let d = bits::interval(b + 1, b + self.s);
        (base >= self.t + self.r && a & d != 0) || (base + 1 == self.t + self.r && a & d == d)
    }

    pub fn dense(&self) -> Result<Family> {
        Family::from_predicate(self.n, |a| self.accepts(a))
    }

    pub fn uniform(&self, k: usize) -> Result<UniformFamily> {
        UniformFamily::from_predicate(self.n, k, |a| self.accepts(a))
    }
}

/// `(μ_p(H), μ_p(H \ F_{t,r}))` in closed form.
pub fn tightness_closed_forms_with<T: Scalar>(t: usize, r: usize, s: usize, p: &T) -> (T, T) {
    let q = T::one() - p.clone();
    let excess = T::from_count(bits::binom(t + 2 * r, t + r - 1)) * p.powu(t + r - 1) * q.powu(r + 1) * p.powu(s);
    let mu = frankl_mu_with(t, r, p) * (T::one() - q.powu(s)) + excess.clone();
    (mu, excess)
}

pub fn tightness_closed_forms(t: usize, r: usize, s: usize, p: &Bias) -> Result<(Value, Value)> {
    if t == 0 {
        return Err(Error::input("t must be at least 1"));
    }
    Ok(match p {
        Bias::Exact(q) => {
            let (a, b) = tightness_closed_forms_with(t, r, s, q);
            (a.into_value(), b.into_value())
        }
        Bias::Float(x) => {
            let (a, b) = tightness_closed_forms_with(t, r, s, x);
            (a.into_value(), b.into_value())
        }
    })
}

/// Smallest `|F \ F_{n,k,t,r}(B)|` over `r <= r_max` and all bases `B`, with
/// ties going to the smaller `r` and then the lexicographically first base.
pub fn distance_to_frankl(f: &UniformFamily, t: usize, r_max: usize) -> Result<(usize, FranklSpec)> {
    let n = f.n();
    if t == 0 {
        return Err(Error::input("t must be at least 1"));
    }
    if t + 2 * r_max > n {
        return Err(Error::input(format!("t + 2 r_max = {} exceeds n = {n}", t + 2 * r_max)));
    }
    let members = f.members();
    let mut best: Option<(usize, usize, u64, Mask)> = None;
    for r in 0..=r_max {
        let bases = bits::k_subsets_lex(n, t + 2 * r);
        let found = bases
            .par_iter()
            .map(|&b| {
                let miss = members.iter().filter(|&&a| bits::size(a & b) < t + r).count();
                (miss, r, bits::lex_key(b, n), b)
            })
            .min();
        if let Some(c) = found {
            if best.map_or(true, |bb| c < bb) {
                best = Some(c);
            }
        }
    }
    let (d, r, _, base) = best.expect("at least one base exists");
    Ok((d, FranklSpec::with_base(n, t, r, base)?))
}

/// `p^t`, the value of `f(n, p, t)` below `p = 1/(t+1)`.
pub fn small_bias_value(p: &Bias, t: usize) -> Value {
    match p {
        Bias::Exact(q) => q.powu(t).into_value(),
        Bias::Float(x) => x.powu(t).into_value(),
    }
}

/// Does `p` lie in the interval `[r/(t+2r-1), (r+1)/(t+2r+1)]` where `r` is optimal?
pub fn in_optimal_interval(p: f64, t: usize, r: usize) -> bool {
    let lo = if r == 0 { 0.0 } else { r as f64 / (t + 2 * r - 1) as f64 };
    let hi = (r + 1) as f64 / (t + 2 * r + 1) as f64;
    lo - 1e-12 <= p && p <= hi + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::mu_p;
    use crate::scalar::rational;

    #[test]
    fn tie_at_two_fifths() {
        let m = f_biased(10, &"0.4".parse().unwrap(), 2).unwrap();
        assert!((m.value.to_f64() - 0.1792).abs() < 1e-12);
        assert_eq!(m.rs, vec![1, 2]);
        let exact = f_biased(10, &"2/5".parse().unwrap(), 2).unwrap();
        assert_eq!(exact.value, Value::Exact(rational(112, 625)));
        assert_eq!(exact.rs, vec![1, 2]);
        let rs = r_star(&"2/5".parse().unwrap(), 2).unwrap();
        assert_eq!((rs.r, rs.singular), (1, true));
    }

    #[test]
    fn size_formula_matches_members() {
        for (n, k, t, r) in [(10, 4, 2, 1), (9, 4, 1, 2), (8, 3, 1, 0)] {
            let f = FranklSpec::standard(n, t, r).unwrap().uniform(k).unwrap();
            assert_eq!(f.len() as u128, frankl_size(n, k, t, r));
        }
    }

    #[test]
    fn tightness_measure_matches_closed_form() {
        let p: Bias = "1/3".parse().unwrap();
        let h = TightnessSpec::new(8, 1, 1, 2).unwrap().dense().unwrap();
        let (mu, _) = tightness_closed_forms(1, 1, 2, &p).unwrap();
        assert_eq!(mu_p(&h, &p), mu);
    }
}
