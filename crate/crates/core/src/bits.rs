//! Subsets of `[n] = {1..n}` packed into machine words.
//!
//! Element `i` lives in bit `i - 1`. Numeric order on masks of a fixed size
//! is colex order.

use std::cmp::Ordering;

pub type Mask = u32;

/// Largest ground set supported by the layer (sorted-word) storage.
pub const MAX_N: usize = 30;
/// Largest ground set supported by the power-set bitmap storage.
pub const MAX_DENSE_N: usize = 24;

#[inline]
pub fn full(n: usize) -> Mask {
    if n >= 32 {
        Mask::MAX
    } else {
        (1u32 << n) - 1
    }
}

#[inline]
pub fn bit(i: usize) -> Mask {
    1u32 << (i - 1)
}

#[inline]
pub fn size(a: Mask) -> usize {
    a.count_ones() as usize
}

#[inline]
pub fn has(a: Mask, i: usize) -> bool {
    a & bit(i) != 0
}

/// Elements of `a` in ascending order (1-based).
pub fn elements(a: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(size(a));
    let mut w = a;
    while w != 0 {
        out.push(w.trailing_zeros() as usize + 1);
        w &= w - 1;
    }
    out
}

pub fn from_elements(xs: &[usize]) -> Mask {
    xs.iter().fold(0, |m, &i| m | bit(i))
}

/// `{1..m}` as a mask.
pub fn prefix(m: usize) -> Mask {
    full(m)
}

/// `{lo..=hi}` as a mask (empty when `lo > hi`).
pub fn interval(lo: usize, hi: usize) -> Mask {
    if lo > hi {
        0
    } else {
        full(hi) & !full(lo - 1)
    }
}

/// Compare two sets as ascending sequences, left to right, with a proper
/// prefix ranking first.
pub fn lex_cmp(a: Mask, b: Mask) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = (a ^ b).trailing_zeros();
    // Elements strictly greater than the first difference.
    let higher: Mask = if d >= 31 { 0 } else { !((1u32 << (d + 1)) - 1) };
    if a & (1 << d) != 0 {
        // a has the smaller next element unless b stops right here.
        if b & higher == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if a & higher == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Rank of `a` in the lexicographic order of all subsets of `[n]`
/// (the empty set has rank 0).
pub fn lex_key(a: Mask, n: usize) -> u64 {
    let mut rank = 0u64;
    let mut prev = 0usize;
    for e in elements(a) {
        rank += 1;
        for skipped in prev + 1..e {
            rank += 1u64 << (n - skipped);
        }
        prev = e;
    }
    rank
}

pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Binomial coefficient allowing negative arguments, which count as zero.
pub fn binom_i(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binom(n as usize, k as usize)
    }
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn k_subsets_lex(n: usize, k: usize) -> Vec<Mask> {
    let mut out = Vec::with_capacity(binom(n, k) as usize);
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        out.push(from_elements(&idx));
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - (k - 1 - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All `k`-subsets of `[n]` in colex (numeric) order.
pub fn k_subsets_colex(n: usize, k: usize) -> Vec<Mask> {
    let mut out = Vec::with_capacity(binom(n, k) as usize);
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    let limit = full(n) as u64;
    let mut v: u64 = (1u64 << k) - 1;
    while v <= limit {
        out.push(v as Mask);
        // Gosper's hack
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Subsets of `j` in size-then-lex order, smallest first.
pub fn subsets_by_size(ground: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let m = ground.len();
    for s in 0..=max_size.min(m) {
        for idx in k_subsets_lex(m, s) {
            out.push(elements(idx).iter().map(|&i| ground[i - 1]).collect());
        }
    }
    out
}
