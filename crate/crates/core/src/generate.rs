//! Seeded generators of test families and the enumeration of all increasing
//! families on a small ground set.

use rand::Rng;

use crate::bits::{self, Mask};
use crate::error::{Error, Result};
use crate::family::{Family, Mode, UniformFamily};

/// Each k-set kept independently with probability `density`.
pub fn random_uniform<R: Rng + ?Sized>(n: usize, k: usize, density: f64, rng: &mut R) -> Result<UniformFamily> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::input("density must lie in [0, 1]"));
    }
    let members: Vec<Mask> = bits::k_subsets_colex(n, k).into_iter().filter(|_| rng.gen_bool(density)).collect();
    UniformFamily::new(n, k, members)
}

fn random_set<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Mask {
    (1..=n).filter(|_| rng.gen_bool(q)).fold(0, |m, i| m | bits::bit(i))
}

/// Up-closure of a few random generators.
pub fn random_increasing<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Family> {
    let gens = rng.gen_range(1..=4);
    let mut g = Family::empty(n, Mode::PowerSet)?;
    for _ in 0..gens {
        let q = rng.gen_range(0.2..0.8);
        g.insert(random_set(n, q, rng));
    }
    g.up_closure()
}

/// Up-closure of generators accepted greedily while they stay t-intersecting.
/// Never empty when `t <= n`.
pub fn random_increasing_t_intersecting<R: Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<Family> {
    if t == 0 || t > n {
        return Err(Error::input("need 1 <= t <= n"));
    }
    let q = rng.gen_range(0.45..0.9);
    let attempts = rng.gen_range(1..=8);
    let mut gens: Vec<Mask> = Vec::new();
    for _ in 0..attempts {
        let s = random_set(n, q, rng);
        if bits::size(s) >= t && gens.iter().all(|&g| bits::size(g & s) >= t) {
            gens.push(s);
        }
    }
    if gens.is_empty() {
        gens.push(bits::full(n));
    }
    Family::from_masks(n, Mode::PowerSet, gens)?.up_closure()
}

/// Truth tables (bit `S` set iff `S ∈ F`) of every increasing family on `[n]`,
/// including the empty family and the whole power set.
pub fn increasing_truth_tables(n: usize) -> Result<Vec<u64>> {
    if n > 6 {
        return Err(Error::input("increasing families are enumerated only for n <= 6"));
    }
    let mut tables = vec![0u64, 1u64];
    for m in 1..=n {
        let half = 1u32 << (m - 1);
        let mut next = Vec::new();
        // Split on element m: sets without it (low half) must be covered by sets with it.
        for &hi in &tables {
            for &lo in &tables {
                if lo & !hi == 0 {
                    next.push(lo | hi << half);
                }
            }
        }
        next.sort_unstable();
        tables = next;
    }
    Ok(tables)
}

pub fn from_truth_table(n: usize, table: u64) -> Result<Family> {
    Family::from_predicate(n, |s| table >> s & 1 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_increasing_families() {
        let counts: Vec<usize> = (0..=5).map(|n| increasing_truth_tables(n).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
    }
}
