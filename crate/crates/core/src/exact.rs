//! Exact sign of `x·ln(a) - y·ln(b)` for rationals.
//!
//! Equality is decided algebraically (`a^x = b^y`); otherwise a fixed-point
//! natural logarithm with a rigorous error bound is refined until the sign
//! is certain.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Compare `x·ln(a)` with `y·ln(b)`. Requires `a, b > 0` and `x, y >= 0`.
pub fn cmp_scaled_logs(x: &BigRational, a: &BigRational, y: &BigRational, b: &BigRational) -> Ordering {
    assert!(a.is_positive() && b.is_positive(), "logarithm of a non-positive number");
    assert!(!x.is_negative() && !y.is_negative(), "negative scale");
    if equal_powers(x, a, y, b) {
        return Ordering::Equal;
    }
    let mut bits = 96u64;
    loop {
        let (la, ea) = ln_fixed(a, bits);
        let (lb, eb) = ln_fixed(b, bits);
        let la = BigRational::from_integer(la);
        let lb = BigRational::from_integer(lb);
        let d = x * &la - y * &lb;
        let err = x * BigRational::from_integer(ea.into()) + y * BigRational::from_integer(eb.into());
        if d.abs() > err {
            return if d.is_positive() { Ordering::Greater } else { Ordering::Less };
        }
        bits *= 2;
        assert!(bits <= 1 << 20, "precision exhausted on unequal logarithms");
    }
}

/// Is `a^x = b^y`?
fn equal_powers(x: &BigRational, a: &BigRational, y: &BigRational, b: &BigRational) -> bool {
    let one = BigRational::one();
    if x.is_zero() || a == &one {
        return y.is_zero() || b == &one;
    }
    if y.is_zero() || b == &one {
        return false;
    }
    // a^(M) = b^(K) with M = xn*yd, K = yn*xd, reduced to coprime exponents.
    let m = x.numer() * y.denom();
    let k = y.numer() * x.denom();
    let g = m.gcd(&k);
    let (m, k) = (m / &g, k / &g);
    // Then a = w^K and b = w^M for some rational w != 1.
    let Some(w) = rational_root(a, &k) else { return false };
    match pow_bounded(&w, &m, b) {
        Some(p) => &p == b,
        None => false,
    }
}

fn bit_len(q: &BigRational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

/// Exact `k`-th root of a positive rational, if it exists and is not 1.
fn rational_root(a: &BigRational, k: &BigInt) -> Option<BigRational> {
    // w != 1 forces |numer| or |denom| of w^k to be at least 2^k.
    let k = k.to_u64().filter(|&k| k <= bit_len(a))? as u32;
    let rn = a.numer().nth_root(k);
    let rd = a.denom().nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == *a.numer() && num_traits::pow(rd.clone(), k as usize) == *a.denom() {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

/// `w^m` unless it is obviously too large to equal `target`.
fn pow_bounded(w: &BigRational, m: &BigInt, target: &BigRational) -> Option<BigRational> {
    let m = m.to_u64().filter(|&m| m <= bit_len(target))? as usize;
    Some(num_traits::pow(w.clone(), m))
}

/// `ln(q)` as an integer `L` with `|ln q - L / 2^bits| <= E / 2^bits`.
pub fn ln_fixed(q: &BigRational, bits: u64) -> (BigInt, u64) {
    let (ln_n, e_n) = ln_int(q.numer(), bits);
    let (ln_d, e_d) = ln_int(q.denom(), bits);
    (ln_n - ln_d, e_n + e_d)
}

/// Natural log of a positive integer in fixed point.
fn ln_int(n: &BigInt, bits: u64) -> (BigInt, u64) {
    assert_eq!(n.sign(), Sign::Plus);
    let k = n.bits() - 1;
    if k == 0 {
        return (BigInt::zero(), 0);
    }
    let pow2 = BigInt::one() << k;
    // n = 2^k * m with m in [1, 2); ln m = 2 atanh((m-1)/(m+1)).
    let (ln_m, e_m) = atanh2_fixed(&(n - &pow2), &(n + &pow2), bits);
    let (ln2, e2) = atanh2_fixed(&BigInt::one(), &BigInt::from(3), bits);
    (ln2 * BigInt::from(k) + ln_m, e2 * k + e_m)
}

/// `2·atanh(num/den)` for `0 <= num/den <= 1/3`, fixed point.
fn atanh2_fixed(num: &BigInt, den: &BigInt, bits: u64) -> (BigInt, u64) {
    let scale = BigInt::one() << bits;
    let s = (num * &scale).div_floor(den);
    let s2 = (&s * &s) >> bits;
    let mut term = s.clone();
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(2 * j + 1);
        term = (term * &s2) >> bits;
        j += 1;
    }
    // Each term carries at most a few ulps of truncation error.
    (sum * 2, 8 * (j + 2))
}
