//! Families of subsets of `[n]`.

use std::fmt;
use std::ops::Deref;

use crate::bits::{self, Mask, MAX_DENSE_N, MAX_N};
use crate::error::{Error, Result};

/// How members are stored. Conversions are explicit via [`Family::to_mode`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// One bit per subset of `[n]`; `n <= 24`.
    PowerSet,
    /// Sorted list of member words; `n <= 30`.
    Layer,
}

#[derive(Clone)]
enum Store {
    Dense { words: Vec<u64>, len: usize },
    Sparse(Vec<Mask>),
}

/// A family of subsets of `[n]`.
///
/// Equality compares the ground set and the members, not the storage mode.
#[derive(Clone)]
pub struct Family {
    n: usize,
    store: Store,
}

/// Pack the bits of `a` selected by `keep` into the low bits, in order.
pub fn squeeze(a: Mask, keep: Mask) -> Mask {
    let mut out = 0;
    let mut pos = 0;
    let mut w = keep;
    while w != 0 {
        let low = w & w.wrapping_neg();
        if a & low != 0 {
            out |= 1 << pos;
        }
        pos += 1;
        w &= w - 1;
    }
    out
}

/// Inverse of [`squeeze`]: place the low bits of `b` onto the positions of `keep`.
pub fn spread(b: Mask, keep: Mask) -> Mask {
    let mut out = 0;
    let mut pos = 0;
    let mut w = keep;
    while w != 0 {
        let low = w & w.wrapping_neg();
        if b & (1 << pos) != 0 {
            out |= low;
        }
        pos += 1;
        w &= w - 1;
    }
    out
}

fn check_n(n: usize, mode: Mode) -> Result<()> {
    let cap = match mode {
        Mode::PowerSet => MAX_DENSE_N,
        Mode::Layer => MAX_N,
    };
    if n > cap {
        return Err(Error::input(format!(
            "ground set of size {n} exceeds the {mode:?} capacity {cap}"
        )));
    }
    Ok(())
}

pub enum Members<'a> {
    Dense { words: &'a [u64], word: usize, cur: u64 },
    Sparse(std::slice::Iter<'a, Mask>),
}

impl Iterator for Members<'_> {
    type Item = Mask;

    fn next(&mut self) -> Option<Mask> {
        match self {
            Members::Sparse(it) => it.next().copied(),
            Members::Dense { words, word, cur } => loop {
                if *cur != 0 {
                    let b = cur.trailing_zeros() as usize;
                    *cur &= *cur - 1;
                    return Some((*word * 64 + b) as Mask);
                }
                *word += 1;
                if *word >= words.len() {
                    return None;
                }
                *cur = words[*word];
            },
        }
    }
}

impl Family {
    pub fn empty(n: usize, mode: Mode) -> Result<Family> {
        check_n(n, mode)?;
        let store = match mode {
            Mode::PowerSet => Store::Dense {
                words: vec![0; ((1usize << n) + 63) / 64],
                len: 0,
            },
            Mode::Layer => Store::Sparse(Vec::new()),
        };
        Ok(Family { n, store })
    }

    pub fn from_masks(n: usize, mode: Mode, masks: impl IntoIterator<Item = Mask>) -> Result<Family> {
        let mut f = Family::empty(n, mode)?;
        let limit = bits::full(n);
        match &mut f.store {
            Store::Dense { words, len } => {
                for m in masks {
                    if m & !limit != 0 {
                        return Err(Error::input(format!("set {:?} lies outside [{n}]", bits::elements(m))));
                    }
                    let (w, b) = (m as usize / 64, m as usize % 64);
                    if words[w] >> b & 1 == 0 {
                        words[w] |= 1 << b;
                        *len += 1;
                    }
                }
            }
            Store::Sparse(v) => {
                for m in masks {
                    if m & !limit != 0 {
                        return Err(Error::input(format!("set {:?} lies outside [{n}]", bits::elements(m))));
                    }
                    v.push(m);
                }
                v.sort_unstable();
                v.dedup();
            }
        }
        Ok(f)
    }

    /// Build from explicit element lists (1-based).
    pub fn from_sets(n: usize, mode: Mode, sets: &[&[usize]]) -> Result<Family> {
        let mut masks = Vec::with_capacity(sets.len());
        for s in sets {
            if let Some(&bad) = s.iter().find(|&&x| x == 0 || x > n) {
                return Err(Error::input(format!("element {bad} outside [{n}]")));
            }
            masks.push(bits::from_elements(s));
        }
        Family::from_masks(n, mode, masks)
    }

    /// Power-set family of all `S` with `pred(S)`.
    pub fn from_predicate(n: usize, pred: impl Fn(Mask) -> bool) -> Result<Family> {
        check_n(n, Mode::PowerSet)?;
        let mut words = vec![0u64; ((1usize << n) + 63) / 64];
        let mut len = 0;
        for s in 0..(1u64 << n) {
            if pred(s as Mask) {
                words[s as usize / 64] |= 1 << (s % 64);
                len += 1;
            }
        }
        Ok(Family { n, store: Store::Dense { words, len } })
    }

    pub fn power_set(n: usize) -> Result<Family> {
        Family::from_predicate(n, |_| true)
    }

    /// `{S : i in S}`.
    pub fn dictator(n: usize, i: usize) -> Result<Family> {
        if i == 0 || i > n {
            return Err(Error::input(format!("coordinate {i} outside [{n}]")));
        }
        Family::from_predicate(n, |s| bits::has(s, i))
    }

    /// `AND_B = {S : B ⊆ S}`.
    pub fn and_of(n: usize, b: Mask) -> Result<Family> {
        Family::from_predicate(n, |s| s & b == b)
    }

    /// `OR_B = {S : S ∩ B ≠ ∅}`.
    pub fn or_of(n: usize, b: Mask) -> Result<Family> {
        Family::from_predicate(n, |s| s & b != 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        match self.store {
            Store::Dense { .. } => Mode::PowerSet,
            Store::Sparse(_) => Mode::Layer,
        }
    }

    pub fn len(&self) -> usize {
        match &self.store {
            Store::Dense { len, .. } => *len,
            Store::Sparse(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, s: Mask) -> bool {
        match &self.store {
            Store::Dense { words, .. } => {
                let i = s as usize;
                i >> 6 < words.len() && s & !bits::full(self.n) == 0 && words[i >> 6] >> (i & 63) & 1 == 1
            }
            Store::Sparse(v) => v.binary_search(&s).is_ok(),
        }
    }

    /// Members in ascending numeric order.
    pub fn iter(&self) -> Members<'_> {
        match &self.store {
            Store::Dense { words, .. } => Members::Dense { words, word: 0, cur: words[0] },
            Store::Sparse(v) => Members::Sparse(v.iter()),
        }
    }

    pub fn members(&self) -> Vec<Mask> {
        self.iter().collect()
    }

    /// Members sorted in lexicographic order of their element lists.
    pub fn members_lex(&self) -> Vec<Mask> {
        let mut m = self.members();
        m.sort_by_key(|&a| bits::lex_key(a, self.n));
        m
    }

    pub fn insert(&mut self, s: Mask) {
        debug_assert!(s & !bits::full(self.n) == 0);
        match &mut self.store {
            Store::Dense { words, len } => {
                let i = s as usize;
                if words[i >> 6] >> (i & 63) & 1 == 0 {
                    words[i >> 6] |= 1 << (i & 63);
                    *len += 1;
                }
            }
            Store::Sparse(v) => {
                if let Err(pos) = v.binary_search(&s) {
                    v.insert(pos, s);
                }
            }
        }
    }

    pub fn remove(&mut self, s: Mask) {
        match &mut self.store {
            Store::Dense { words, len } => {
                let i = s as usize;
                if i >> 6 < words.len() && words[i >> 6] >> (i & 63) & 1 == 1 {
                    words[i >> 6] &= !(1 << (i & 63));
                    *len -= 1;
                }
            }
            Store::Sparse(v) => {
                if let Ok(pos) = v.binary_search(&s) {
                    v.remove(pos);
                }
            }
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Family> {
        if mode == self.mode() {
            return Ok(self.clone());
        }
        Family::from_masks(self.n, mode, self.iter())
    }

    /// Number of members of each size `0..=n`.
    pub fn layer_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.n + 1];
        for a in self.iter() {
            c[bits::size(a)] += 1;
        }
        c
    }

    /// `F^(k)`.
    pub fn layer(&self, k: usize) -> UniformFamily {
        let fam = Family {
            n: self.n,
            store: Store::Sparse(self.iter().filter(|&a| bits::size(a) == k).collect()),
        };
        UniformFamily { fam, k }
    }

    /// Same ground set, members satisfying `keep`, same mode.
    pub fn filter(&self, keep: impl Fn(Mask) -> bool) -> Family {
        let mut out = Family::empty(self.n, self.mode()).expect("n already validated");
        for a in self.iter().filter(|&a| keep(a)) {
            out.insert(a);
        }
        out
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        self.same_ground(other)?;
        let mut out = self.clone();
        for a in other.iter() {
            out.insert(a);
        }
        Ok(out)
    }

    pub fn difference(&self, other: &Family) -> Result<Family> {
        self.same_ground(other)?;
        Ok(self.filter(|a| !other.contains(a)))
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.n == other.n && self.iter().all(|a| other.contains(a))
    }

    fn same_ground(&self, other: &Family) -> Result<()> {
        if self.n != other.n {
            return Err(Error::input(format!(
                "ground sets differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn is_increasing(&self) -> bool {
        let n = self.n;
        self.iter()
            .all(|a| (1..=n).all(|i| bits::has(a, i) || self.contains(a | bits::bit(i))))
    }

    /// Smallest increasing family containing `F` (power-set mode).
    pub fn up_closure(&self) -> Result<Family> {
        check_n(self.n, Mode::PowerSet)?;
        let mut out = self.to_mode(Mode::PowerSet)?;
        for s in 0..(1u64 << self.n) as usize {
            let s = s as Mask;
            if out.contains(s) {
                for i in 1..=self.n {
                    out.insert(s | bits::bit(i));
                }
            }
        }
        Ok(out)
    }

    /// `F* = {S : [n] \ S ∉ F}` (power-set mode).
    pub fn dual(&self) -> Result<Family> {
        let all = bits::full(self.n);
        Family::from_predicate(self.n, |s| !self.contains(all & !s))
    }

    /// `P([n]) \ F` (power-set mode).
    pub fn complement_family(&self) -> Result<Family> {
        Family::from_predicate(self.n, |s| !self.contains(s))
    }

    /// `{[n] \ S : S ∈ F}`, same mode.
    pub fn complements(&self) -> Family {
        let all = bits::full(self.n);
        Family::from_masks(self.n, self.mode(), self.iter().map(|a| all & !a)).expect("same ground")
    }

    /// Lexicographically smallest pair `(A, B)`, `A` first in lex order, with
    /// `|A ∩ B| < t`; `None` when `F` is t-intersecting.
    pub fn t_intersecting_witness(&self, t: usize) -> Option<(Mask, Mask)> {
        let m = self.members_lex();
        for (i, &a) in m.iter().enumerate() {
            for &b in &m[i..] {
                if bits::size(a & b) < t {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_t_intersecting(&self, t: usize) -> bool {
        self.t_intersecting_witness(t).is_none()
    }

    /// Lexicographically smallest pair with `|A ∩ B| = t - 1`.
    pub fn forbidden_witness(&self, t: usize) -> Option<(Mask, Mask)> {
        if t == 0 {
            return None;
        }
        let m = self.members_lex();
        for (i, &a) in m.iter().enumerate() {
            for &b in &m[i..] {
                if bits::size(a & b) == t - 1 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `F_J^B = {S \ B : S ∈ F, S ∩ J = B}` on the ground set `[n] \ J`,
    /// re-indexed to `1..n-|J|` in element order. Mode is preserved.
    pub fn slice(&self, j: Mask, b: Mask) -> Result<Family> {
        self.check_slice(j, b)?;
        let keep = bits::full(self.n) & !j;
        let m = self.n - bits::size(j);
        let members = self.iter().filter(|&s| s & j == b).map(|s| squeeze(s, keep));
        Family::from_masks(m, self.mode(), members)
    }

    fn check_slice(&self, j: Mask, b: Mask) -> Result<()> {
        if j & !bits::full(self.n) != 0 {
            return Err(Error::input(format!("coordinate set outside [{}]", self.n)));
        }
        if b & !j != 0 {
            return Err(Error::input("slice key is not a subset of the coordinate set"));
        }
        Ok(())
    }

    /// `{B ⊆ J : B ∈ F}` re-indexed onto `[|J|]`.
    pub fn restrict_to(&self, j: Mask) -> Result<Family> {
        let rest = bits::full(self.n) & !j;
        self.slice(rest, 0)
    }

    /// The J-junta `⟨G⟩ = {S ⊆ [n] : S ∩ J ∈ G}` where `G` lives on `[|J|]`.
    pub fn junta(n: usize, j: Mask, g: &Family) -> Result<Family> {
        if g.n() != bits::size(j) || j & !bits::full(n) != 0 {
            return Err(Error::input("generator ground set does not match the coordinate set"));
        }
        Family::from_predicate(n, |s| g.contains(squeeze(s, j)))
    }

    /// Does membership depend only on `S ∩ J`?
    pub fn is_junta(&self, j: Mask) -> bool {
        if self.mode() == Mode::PowerSet {
            (0..(1u64 << self.n) as usize).all(|s| self.contains(s as Mask) == self.contains(s as Mask & j))
        } else {
            // Every non-empty slice must be the whole cube on the remaining points.
            let free = self.n - bits::size(j);
            let mut counts = std::collections::HashMap::new();
            for a in self.iter() {
                *counts.entry(a & j).or_insert(0u64) += 1;
            }
            counts.values().all(|&c| c == 1u64 << free)
        }
    }

    /// Is some set's membership changed by toggling `i`?
    pub fn depends_on(&self, i: usize) -> bool {
        let b = bits::bit(i);
        self.iter().any(|a| !self.contains(a ^ b))
    }

    /// Coordinates the family depends on, ascending.
    pub fn live_coords(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.depends_on(i)).collect()
    }

    /// Image under the bijection `i -> perm[i - 1]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Family> {
        check_perm(self.n, perm)?;
        let image = self.iter().map(|a| apply_perm(a, perm));
        Family::from_masks(self.n, self.mode(), image)
    }
}

fn check_perm(n: usize, perm: &[usize]) -> Result<()> {
    if perm.len() != n {
        return Err(Error::input(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n + 1];
    for &p in perm {
        if p == 0 || p > n || seen[p] {
            return Err(Error::input("not a permutation of [n]"));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn apply_perm(a: Mask, perm: &[usize]) -> Mask {
    bits::elements(a).into_iter().fold(0, |m, i| m | bits::bit(perm[i - 1]))
}

impl PartialEq for Family {
    fn eq(&self, other: &Family) -> bool {
        self.n == other.n && self.len() == other.len() && self.iter().eq(other.iter())
    }
}

impl Eq for Family {}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<Vec<usize>> = self.members_lex().into_iter().map(bits::elements).collect();
        write!(f, "Family(n={}, {:?}, {:?})", self.n, self.mode(), sets)
    }
}

/// A family all of whose members have size `k`, stored in layer mode.
#[derive(Clone, PartialEq, Eq)]
pub struct UniformFamily {
    fam: Family,
    k: usize,
}

impl Deref for UniformFamily {
    type Target = Family;

    fn deref(&self) -> &Family {
        &self.fam
    }
}

impl fmt::Debug for UniformFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Uniform(k={}) {:?}", self.k, self.fam)
    }
}

impl UniformFamily {
    pub fn new(n: usize, k: usize, masks: impl IntoIterator<Item = Mask>) -> Result<UniformFamily> {
        if k > n {
            return Err(Error::input(format!("uniformity {k} exceeds ground set size {n}")));
        }
        let fam = Family::from_masks(n, Mode::Layer, masks)?;
        if let Some(bad) = fam.iter().find(|&a| bits::size(a) != k) {
            return Err(Error::input(format!(
                "set {:?} does not have size {k}",
                bits::elements(bad)
            )));
        }
        Ok(UniformFamily { fam, k })
    }

    pub fn from_sets(n: usize, k: usize, sets: &[&[usize]]) -> Result<UniformFamily> {
        let fam = Family::from_sets(n, Mode::Layer, sets)?;
        UniformFamily::new(n, k, fam.iter())
    }

    /// `binom([n], k)`.
    pub fn full_layer(n: usize, k: usize) -> Result<UniformFamily> {
        check_n(n, Mode::Layer)?;
        UniformFamily::new(n, k, bits::k_subsets_colex(n, k))
    }

    /// Members of `binom([n], k)` satisfying `pred`.
    pub fn from_predicate(n: usize, k: usize, pred: impl Fn(Mask) -> bool) -> Result<UniformFamily> {
        check_n(n, Mode::Layer)?;
        UniformFamily::new(n, k, bits::k_subsets_colex(n, k).into_iter().filter(|&a| pred(a)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn family(&self) -> &Family {
        &self.fam
    }

    pub fn into_family(self) -> Family {
        self.fam
    }

    /// Size of the ambient layer `binom(n, k)`.
    pub fn layer_size(&self) -> u128 {
        bits::binom(self.n(), self.k)
    }

    pub fn filter(&self, keep: impl Fn(Mask) -> bool) -> UniformFamily {
        UniformFamily { fam: self.fam.filter(keep), k: self.k }
    }

    pub fn slice(&self, j: Mask, b: Mask) -> Result<UniformFamily> {
        let fam = self.fam.slice(j, b)?;
        let k = self.k.checked_sub(bits::size(b)).unwrap_or(0);
        Ok(UniformFamily { fam, k })
    }

    /// `{A ∈ binom([n], k) : A ∩ J ∈ G}` with `G` on `[|J|]`.
    pub fn junta(n: usize, k: usize, j: Mask, g: &Family) -> Result<UniformFamily> {
        if g.n() != bits::size(j) || j & !bits::full(n) != 0 {
            return Err(Error::input("generator ground set does not match the coordinate set"));
        }
        let rest = bits::full(n) & !j;
        let free = n - bits::size(j);
        let mut members = Vec::new();
        for b in g.iter() {
            let bs = bits::size(b);
            if bs > k || k - bs > free {
                continue;
            }
            let base = spread(b, j);
            for c in bits::k_subsets_colex(free, k - bs) {
                members.push(base | spread(c, rest));
            }
        }
        UniformFamily::new(n, k, members)
    }

    /// Within the layer: every non-empty slice over `J` is full.
    pub fn is_junta(&self, j: Mask) -> bool {
        let free = self.n() - bits::size(j);
        let mut counts = std::collections::HashMap::new();
        for a in self.iter() {
            *counts.entry(a & j).or_insert(0u128) += 1;
        }
        counts
            .iter()
            .all(|(&b, &c)| c == bits::binom(free, self.k - bits::size(b)))
    }

    pub fn permute(&self, perm: &[usize]) -> Result<UniformFamily> {
        Ok(UniformFamily { fam: self.fam.permute(perm)?, k: self.k })
    }

    /// The power-set-mode family with the same members.
    pub fn to_dense(&self) -> Result<Family> {
        self.fam.to_mode(Mode::PowerSet)
    }
}
