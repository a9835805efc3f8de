//! Worked instances checked against brute-force oracles written here.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use setfam::bits::{self, binom, Mask};
use setfam::frankl::{
    distance_to_frankl, f_biased, f_uniform, frankl_mu, r_star, tightness_closed_forms, FranklSpec, TightnessSpec,
};
use setfam::generate::{increasing_truth_tables, from_truth_table, random_increasing, random_increasing_t_intersecting};
use setfam::measures::{fourier_level1, influences_with, isoperimetry_check, mu_p, mu_uniform, mu_with};
use setfam::regularity::{
    fox_gap_check, gen_paired_random, intersection_witness, is_potentially_stable, is_slice_quasirandom, potential,
    regularity_decompose, DecomposeParams, SliceClass,
};
use setfam::scalar::rational;
use setfam::search::{junta_approx_audit, local_extremality_audit, max_forbidden, max_t_intersecting, SearchOptions};
use setfam::shadows::{colex_segment, kk_cross_bound_audit, lex_segment, lower_shadow, upper_shadow};
use setfam::shifting::{
    compress_to, increase_diagonal, increase_offdiagonal, is_compressed, is_shifted, stability_pipeline,
    PipelineParams, StepTag,
};
use setfam::{Bias, Family, Mode, UniformFamily, Value};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pow(p: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * p)
}

/// `Σ_{S ∈ F} p^|S| (1-p)^(n-|S|)` over all `2^n` sets.
fn mu_direct(n: usize, p: &BigRational, pred: impl Fn(Mask) -> bool) -> BigRational {
    let q = BigRational::one() - p;
    (0..1u32 << n).filter(|&s| pred(s)).map(|s| pow(p, bits::size(s)) * pow(&q, n - bits::size(s))).sum()
}

fn pairwise_t_intersecting(sets: &[Mask], t: usize) -> bool {
    sets.iter().all(|&a| sets.iter().all(|&b| (a & b).count_ones() as usize >= t))
}

fn sets_of(n: usize, k: usize) -> Vec<Mask> {
    (0..1u32 << n).filter(|s| s.count_ones() as usize == k).collect()
}

/// Largest subfamily of `sets` whose pairs satisfy `ok`.
fn brute_clique(sets: &[Mask], ok: &dyn Fn(Mask, Mask) -> bool) -> usize {
    fn go(sets: &[Mask], ok: &dyn Fn(Mask, Mask) -> bool, i: usize, cur: &mut Vec<Mask>) -> usize {
        if i == sets.len() {
            return cur.len();
        }
        let mut best = go(sets, ok, i + 1, cur);
        if cur.iter().all(|&c| ok(c, sets[i])) {
            cur.push(sets[i]);
            best = best.max(go(sets, ok, i + 1, cur));
            cur.pop();
        }
        best
    }
    go(sets, ok, 0, &mut Vec::new())
}

#[test]
fn frankl_family_is_intersecting_with_uniform_measure_one_fifth() {
    let f = FranklSpec::standard(6, 2, 1).unwrap().uniform(3).unwrap();
    assert!(pairwise_t_intersecting(&f.members(), 2));
    let count = sets_of(6, 3).into_iter().filter(|s| (s & 0b1111).count_ones() >= 3).count();
    assert_eq!(count, 4);
    assert_eq!(mu_uniform(&f), rational(count as i64, 20));
    let expected: Vec<Mask> = sets_of(4, 3);
    let mut got = f.members();
    got.sort_unstable();
    assert_eq!(got, expected);
}

#[test]
fn dictator_is_self_dual() {
    let d = Family::dictator(2, 1).unwrap();
    assert_eq!(d.dual().unwrap(), d);
}

#[test]
fn slice_of_a_star() {
    let star = UniformFamily::from_predicate(4, 2, |s| s & 1 != 0).unwrap();
    let s = star.slice(bits::from_elements(&[1, 2]), bits::from_elements(&[1])).unwrap();
    assert_eq!(s.n(), 2);
    let mut m = s.members();
    m.sort_unstable();
    assert_eq!(m, vec![0b01, 0b10]);
}

#[test]
fn frankl_family_is_a_junta_on_its_base() {
    for (n, k, t, r) in [(8, 4, 1, 1), (9, 5, 2, 1), (10, 5, 2, 2), (7, 3, 3, 0)] {
        let base = bits::prefix(t + 2 * r);
        let g = Family::from_predicate(t + 2 * r, |b| bits::size(b) >= t + r).unwrap();
        let spec = FranklSpec::standard(n, t, r).unwrap();
        let uj = UniformFamily::junta(n, k, base, &g).unwrap();
        assert_eq!(uj, spec.uniform(k).unwrap());
        let dense = spec.dense().unwrap();
        assert!(dense.is_junta(base));
        assert_eq!(Family::junta(n, base, &g).unwrap(), dense);
    }
}

#[test]
fn biased_measure_of_frankl_family() {
    let p = rational(2, 5);
    let closed: BigRational = (3..=4)
        .map(|i| BigRational::from_integer((binom(4, i) as i64).into()) * pow(&p, i) * pow(&(BigRational::one() - &p), 4 - i))
        .sum();
    assert_eq!(closed, rational(1792, 10000));
    let f = FranklSpec::standard(9, 2, 1).unwrap().dense().unwrap();
    let direct = mu_direct(9, &p, |s| f.contains(s));
    assert_eq!(direct, closed);
    assert_eq!(mu_p(&f, &Bias::Exact(p.clone())), Value::Exact(closed.clone()));
    assert_eq!(frankl_mu(2, 1, &Bias::Exact(p)), Value::Exact(closed));
}

#[test]
fn level_one_fourier_coefficients() {
    let p = 0.3f64;
    let sd = (p * (1.0 - p)).sqrt();
    let direct = |f: &Family, i: usize| -> f64 {
        (0..1u32 << f.n())
            .map(|s| {
                let w = p.powi(s.count_ones() as i32) * (1.0 - p).powi((f.n() - s.count_ones() as usize) as i32);
                let chi = if bits::has(s, i) { (1.0 - p) / sd } else { -p / sd };
                if f.contains(s) { w * chi } else { 0.0 }
            })
            .sum()
    };
    let d = Family::dictator(5, 1).unwrap();
    let c = fourier_level1(&d, p).unwrap();
    assert!((c[0] - sd).abs() < 1e-12);
    assert!(c[1..].iter().all(|x| x.abs() < 1e-12));
    let mut r = rng(7);
    for _ in 0..30 {
        let n = r.gen_range(2..=10);
        let f = random_increasing(n, &mut r).unwrap();
        let c = fourier_level1(&f, p).unwrap();
        for i in 1..=n {
            assert!((c[i - 1] - direct(&f, i)).abs() < 1e-9);
        }
        // Pivotal probability computed from scratch.
        let total: f64 = (1..=n)
            .map(|i| {
                (0..1u32 << n)
                    .filter(|&s| !bits::has(s, i) && f.contains(s | bits::bit(i)) != f.contains(s))
                    .map(|s| p.powi(s.count_ones() as i32) * (1.0 - p).powi((n - 1 - s.count_ones() as usize) as i32))
                    .sum::<f64>()
            })
            .sum();
        let lhs: f64 = c.iter().sum::<f64>() / sd;
        assert!((lhs - total).abs() < 1e-9);
        let lib: f64 = influences_with(&f, &p).iter().sum();
        assert!((lib - total).abs() < 1e-9);
    }
}

#[test]
fn isoperimetry_on_every_increasing_family_of_four_points() {
    let tables = increasing_truth_tables(4).unwrap();
    assert_eq!(tables.len(), 168);
    for tt in tables {
        let f = from_truth_table(4, tt).unwrap();
        assert!(isoperimetry_check(&f, &Bias::Exact(rational(3, 10))).unwrap().holds);
        assert!(isoperimetry_check(&f, &Bias::Float(0.3)).unwrap().holds);
    }
}

#[test]
fn uniform_maximum_closed_forms() {
    for (n, k, t) in [(12, 3, 1), (14, 4, 2), (15, 3, 3), (9, 3, 1), (11, 5, 1)] {
        if n >= (t + 1) * (k - t + 1) {
            let (v, rs) = f_uniform(n, k, t).unwrap();
            assert_eq!(v, binom(n - t, k - t));
            assert_eq!(rs, vec![0]);
        }
    }
    for n in 3..=12usize {
        for k in 1..n {
            if 2 * k < n {
                assert_eq!(f_uniform(n, k, 1).unwrap().0, binom(n - 1, k - 1), "n={n} k={k}");
            }
        }
    }
    let sets = sets_of(6, 3);
    let brute = brute_clique(&sets, &|a, b| (a & b).count_ones() >= 2);
    assert_eq!(brute, 4);
    assert_eq!(f_uniform(6, 3, 2).unwrap().0, 4);
}

#[test]
fn biased_maximum_and_optimal_r() {
    let b = f_biased(12, &Bias::Float(0.3), 1).unwrap();
    assert!((b.value.to_f64() - 0.3).abs() < 1e-15);
    assert_eq!(b.rs, vec![0]);
    let b = f_biased(12, &Bias::Exact(rational(2, 5)), 2).unwrap();
    assert_eq!(b.value, Value::Exact(rational(1792, 10000)));
    assert_eq!(b.rs, vec![1, 2]);
    let b = f_biased(12, &Bias::Float(0.4), 2).unwrap();
    assert!((b.value.to_f64() - 0.1792).abs() < 1e-12);
    assert!(b.rs.contains(&1) && b.rs.contains(&2));
    let rs = r_star(&Bias::Exact(rational(2, 5)), 2).unwrap();
    assert_eq!((rs.r, rs.singular), (1, true));

    let p = 0.45f64;
    let value = |r: usize| -> f64 {
        (1 + r..=1 + 2 * r).map(|i| binom(1 + 2 * r, i) as f64 * p.powi(i as i32) * (1.0 - p).powi((1 + 2 * r - i) as i32)).sum()
    };
    let scan = (0..=20).max_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap()).unwrap();
    assert_eq!(r_star(&Bias::Float(p), 1).unwrap().r, scan);
}

#[test]
fn tightness_family_closed_forms_match_enumeration() {
    let p = rational(1, 3);
    let spec = TightnessSpec::new(10, 2, 0, 2).unwrap();
    let h = spec.dense().unwrap();
    let direct = mu_direct(10, &p, |s| spec.accepts(s));
    let (mu, excess) = tightness_closed_forms(2, 0, 2, &Bias::Exact(p.clone())).unwrap();
    assert_eq!(mu, Value::Exact(direct));
    let base_frankl = FranklSpec::standard(10, 2, 0).unwrap();
    let outside = mu_direct(10, &p, |s| h.contains(s) && !base_frankl.accepts(s));
    assert_eq!(excess, Value::Exact(outside));
    for t in 1..=3 {
        for s in 0..=3 {
            let (_, ex) = tightness_closed_forms(t, 0, s, &Bias::Exact(p.clone())).unwrap();
            let want = BigRational::from_integer((t as i64).into())
                * pow(&p, t - 1)
                * (BigRational::one() - &p)
                * pow(&p, s);
            assert_eq!(ex, Value::Exact(want));
        }
    }
    for (n, t, r, s) in [(8, 1, 0, 2), (9, 2, 1, 2), (10, 3, 1, 3), (7, 1, 1, 4)] {
        let h = TightnessSpec::new(n, t, r, s).unwrap().dense().unwrap();
        assert!(pairwise_t_intersecting(&h.members(), t));
    }
}

#[test]
fn distance_from_perturbed_star() {
    let h = TightnessSpec::new(8, 1, 0, 2).unwrap().uniform(3).unwrap();
    let members = h.members();
    let mut best = usize::MAX;
    for r in 0..=1usize {
        for base in sets_of(8, 1 + 2 * r) {
            let miss = members.iter().filter(|&&a| (a & base).count_ones() as usize <= r).count();
            best = best.min(miss);
        }
    }
    let excess = members.iter().filter(|&&a| a & 1 == 0 && a & 0b110 == 0b110).count();
    assert_eq!(excess, 5);
    // With one star allowed the excess is what remains; with r = 1 the family
    // is the majority of [3] inside the layer.
    let (d, spec) = distance_to_frankl(&h, 1, 0).unwrap();
    assert_eq!(d, excess);
    assert_eq!((spec.r, spec.base), (0, 1));
    let (d, spec) = distance_to_frankl(&h, 1, 1).unwrap();
    assert_eq!(d, best);
    assert_eq!((d, spec.r, spec.base), (0, 1, 0b111));
}

#[test]
fn compressing_a_two_point_family() {
    let f = Family::from_sets(2, Mode::PowerSet, &[&[2], &[1, 2]]).unwrap();
    let tr = compress_to(&f, 2, 1, &Bias::Exact(rational(1, 3))).unwrap();
    assert_eq!(tr.steps.len(), 1);
    assert_eq!(tr.steps[0].tag, StepTag::Compress);
    assert_eq!(tr.family, Family::from_sets(2, Mode::PowerSet, &[&[1], &[1, 2]]).unwrap());
}

/// Every increasing t-intersecting family on `[n]` compressed towards `n`.
fn compressed_intersecting(n: usize, t: usize) -> Vec<Family> {
    increasing_truth_tables(n)
        .unwrap()
        .into_iter()
        .map(|tt| from_truth_table(n, tt).unwrap())
        .filter(|f| !f.is_empty() && f.is_t_intersecting(t) && is_compressed(f, n))
        .collect()
}

#[test]
fn off_diagonal_increase_on_every_small_instance() {
    let p = Bias::Exact(rational(3, 10));
    let fams = compressed_intersecting(5, 1);
    assert!(!fams.is_empty());
    for f in &fams {
        let o = increase_offdiagonal(f, 2, 4, 1, &p).unwrap();
        assert!(o.g1.is_t_intersecting(1) && o.g2.is_t_intersecting(1));
        let before = mu_with(f, &rational(3, 10));
        let after = mu_with(o.family(), &rational(3, 10));
        assert!(after >= before);
        if o.g1 != *f || o.g2 != *f {
            assert!(after > before);
        }
    }
}

#[test]
fn diagonal_increase_is_strict_on_every_valid_small_instance() {
    let q = rational(3, 10);
    let p = Bias::Exact(q.clone());
    let mut valid = 0;
    for (n, t) in [(5, 1), (5, 3), (4, 2), (3, 1)] {
        for f in compressed_intersecting(n, t) {
            match increase_diagonal(&f, t, &p, 0.2) {
                Ok(d) => {
                    valid += 1;
                    assert!(d.candidates.iter().all(|g| g.is_t_intersecting(t)));
                    assert!(mu_with(d.family(), &q) > mu_with(&f, &q));
                }
                Err(e) => assert_eq!(e.exit_code(), 1),
            }
        }
    }
    assert!(valid > 0);
}

#[test]
fn pipeline_shrinks_a_perturbed_dictator() {
    let h = TightnessSpec::new(8, 1, 0, 2).unwrap().uniform(3).unwrap().up_closure().unwrap();
    let prm = PipelineParams {
        p: Bias::Exact(rational(3, 10)),
        t: 1,
        c: 0.1,
        zeta: 0.2,
        coord_threshold: 1,
        max_iterations: None,
    };
    // Outside [3] every influence is 3 p^2 (1-p)^5, just under c/2.
    let infl = influences_with(&h, &rational(3, 10));
    assert!(infl[3..].iter().all(|x| *x == rational(3 * 9 * 16807, 100 * 100000)));
    let out = stability_pipeline(&h, &prm).unwrap();
    let fin = &out.trace.family;
    assert!(fin.live_coords().len() < h.live_coords().len());
    assert!(fin.is_junta(bits::from_elements(&out.coords)));
    assert!(mu_p(fin, &prm.p).exact().unwrap() >= mu_p(&h, &prm.p).exact().unwrap());
    assert!(out.trace.steps.iter().all(|s| s.within_bound()));
}

#[test]
fn pipeline_never_loses_measure() {
    let mut r = rng(21);
    for _ in 0..40 {
        let n = r.gen_range(3..=8);
        let t = r.gen_range(1..=2);
        let f = random_increasing_t_intersecting(n, t, &mut r).unwrap();
        let p = Bias::Exact(rational(1, 4));
        let prm = PipelineParams { p: p.clone(), t, c: 1.0, zeta: 0.2, coord_threshold: 0, max_iterations: None };
        let out = stability_pipeline(&f, &prm).unwrap();
        assert!(mu_p(&out.trace.family, &p).exact().unwrap() >= mu_p(&f, &p).exact().unwrap());
    }
}

#[test]
fn segments_are_shifted_and_extremal_for_shadows() {
    let mut r = rng(3);
    for n in 2..=8 {
        for k in 1..n {
            for m in 0..=binom(n, k) as usize {
                assert!(is_shifted(&lex_segment(n, k, m).unwrap()));
                assert!(is_shifted(&colex_segment(n, k, m).unwrap()));
            }
        }
    }
    let direct_shadow = |f: &[Mask]| -> usize {
        let mut s: Vec<Mask> = f.iter().flat_map(|&a| bits::elements(a).into_iter().map(move |i| a & !bits::bit(i))).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let direct_up = |f: &[Mask], n: usize| -> usize {
        let mut s: Vec<Mask> =
            f.iter().flat_map(|&a| (1..=n).filter(move |&i| !bits::has(a, i)).map(move |i| a | bits::bit(i))).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    for _ in 0..300 {
        let n = r.gen_range(3..=10);
        let k = r.gen_range(1..n);
        let all = sets_of(n, k);
        let f: Vec<Mask> = all.iter().copied().filter(|_| r.gen_bool(0.3)).collect();
        let uf = UniformFamily::new(n, k, f.clone()).unwrap();
        let colex = colex_segment(n, k, f.len()).unwrap();
        let lex = lex_segment(n, k, f.len()).unwrap();
        assert_eq!(lower_shadow(&uf).unwrap().len(), direct_shadow(&f));
        assert!(direct_shadow(&colex.members()) <= direct_shadow(&f));
        assert_eq!(lower_shadow(&colex).unwrap().len(), direct_shadow(&colex.members()));
        assert!(direct_up(&lex.members(), n) <= direct_up(&f, n));
        assert_eq!(upper_shadow(&lex).unwrap().len(), direct_up(&lex.members(), n));
    }
}

#[test]
fn or_and_layers_are_tight_for_the_shadow_bound() {
    for (n, k, l, r) in [(9, 3, 4, 2), (10, 4, 4, 3), (8, 2, 3, 1), (12, 5, 5, 4)] {
        let base = bits::prefix(r);
        let a = UniformFamily::from_predicate(n, k, |s| s & base != 0).unwrap();
        let b = UniformFamily::from_predicate(n, l, |s| s & base == base).unwrap();
        let rep = kk_cross_bound_audit(&a, &b, r).unwrap();
        assert!(rep.holds && rep.chain_holds);
        assert_eq!(rep.b_size, rep.bound);
        assert_eq!(b.len() as u128, binom(n - r, l - r));
    }
}

#[test]
fn potential_grows_with_the_coordinate_set() {
    let mut r = rng(5);
    for _ in 0..60 {
        let n = r.gen_range(4..=9);
        let k = r.gen_range(1..n);
        let f = setfam::generate::random_uniform(n, k, r.gen_range(0.1..0.9), &mut r).unwrap();
        let j = (1..=n).filter(|_| r.gen_bool(0.4)).fold(0, |m, i| m | bits::bit(i));
        let j2 = j | bits::bit(r.gen_range(1..=n));
        assert!(potential(&f, j).unwrap() <= potential(&f, j2).unwrap() + 1e-12);
    }
}

#[test]
fn star_is_not_potentially_stable() {
    let (n, k) = (10, 4);
    let star = UniformFamily::from_predicate(n, k, |s| s & 1 != 0).unwrap();
    let mu = k as f64 / n as f64;
    assert!((potential(&star, 0).unwrap() - mu * mu.ln()).abs() < 1e-12);
    assert_eq!(potential(&star, 1).unwrap(), 0.0);
    assert_eq!(is_potentially_stable(&star, 0.01, 1).unwrap(), Some(1));
}

#[test]
fn paired_random_families_look_random() {
    let mut stable = 0;
    let mut quasi = 0;
    for seed in 0..6 {
        let f = gen_paired_random(16, seed).unwrap();
        assert_eq!(f.len() as u128, binom(16, 8) / 2);
        if is_potentially_stable(&f, 0.05, 2).unwrap().is_none() {
            stable += 1;
        }
        if is_slice_quasirandom(&f, 0.1, 2).unwrap().is_none() {
            quasi += 1;
        }
        assert!(f.forbidden_witness(1).is_none(), "never contains a set and its complement");
    }
    assert!(stable >= 5, "{stable} of 6 stable");
    assert!(quasi >= 5, "{quasi} of 6 quasirandom");
}

#[test]
fn two_point_jensen_gap() {
    let ex = 0.3;
    let c = fox_gap_check(&[0.5, 0.5], &[0.0, 2.0 * ex], 0.5).unwrap();
    let direct_lhs = 0.5 * (2.0 * ex) * (2.0 * ex as f64).ln();
    assert!((c.lhs - direct_lhs).abs() < 1e-15);
    assert!(c.holds && c.lhs > c.rhs);
}

#[test]
fn decomposition_of_a_star_finds_the_centre() {
    let star = UniformFamily::from_predicate(10, 4, |s| s & 1 != 0).unwrap();
    let prm = DecomposeParams { zeta: 0.25, delta: 0.2, h: 1, eps: 0.1 };
    let d = regularity_decompose(&star, &prm).unwrap();
    assert_eq!(d.j & 1, 1);
    assert_eq!(d.good, vec![1]);
    assert!(d.slices.iter().any(|s| s.b == 1 && s.class == SliceClass::Good));
    d.audit(&star, &prm).unwrap();
}

#[test]
fn stars_have_witnesses_of_every_small_intersection() {
    for (n, k1, k2) in [(5, 2, 3), (6, 3, 3), (7, 2, 4), (4, 2, 2)] {
        let a = UniformFamily::from_predicate(n, k1, |s| s & 1 != 0).unwrap();
        let b = UniformFamily::from_predicate(n, k2, |s| s & 1 != 0).unwrap();
        let (x, y) = intersection_witness(&a, &b, 2).unwrap();
        assert!(a.contains(x) && b.contains(y));
        assert_eq!(bits::size(x & y), 1);
    }
}

#[test]
fn small_searches_match_exhaustion() {
    let sets = sets_of(4, 2);
    let intersecting = brute_clique(&sets, &|a, b| a & b != 0);
    assert_eq!(intersecting, 3);
    // All 2^6 subfamilies, keeping those without a disjoint pair.
    let mut forb = 0;
    for m in 0..1u32 << sets.len() {
        let fam: Vec<Mask> = (0..sets.len()).filter(|&i| m >> i & 1 == 1).map(|i| sets[i]).collect();
        if fam.iter().all(|&a| fam.iter().all(|&b| a & b != 0)) {
            forb = forb.max(fam.len());
        }
    }
    assert_eq!(forb, 3);
    for opts in [SearchOptions::default(), SearchOptions::shifted()] {
        assert_eq!(max_t_intersecting(4, 2, 1, &opts).unwrap().value, 3);
        assert_eq!(max_forbidden(4, 2, 1, &opts).unwrap().value, 3);
    }
    let g = max_forbidden(6, 2, 2, &SearchOptions::default()).unwrap();
    let brute = brute_clique(&sets_of(6, 2), &|a, b| (a & b).count_ones() != 1);
    assert_eq!(g.value, brute);
    assert!(g.value >= 3 && g.value as u128 > binom(4, 0));
    for (n, k, t) in [(5, 4, 3), (6, 5, 2), (7, 5, 3)] {
        assert!(2 * k >= n + t);
        assert_eq!(max_forbidden(n, k, t, &SearchOptions::default()).unwrap().value as u128, binom(n, k));
    }
}

#[test]
fn junta_audit_of_perturbed_frankl_families() {
    for (n, k, t, r, s) in [(8, 3, 1, 0, 2), (10, 4, 2, 1, 2), (8, 4, 2, 0, 2)] {
        let h = TightnessSpec::new(n, t, r, s).unwrap().uniform(k).unwrap();
        let base = bits::prefix(t + 2 * r);
        let m = t + 2 * r;
        // Best t-intersecting generator family over P(base), by exhaustion.
        let subsets: Vec<Mask> = (0..1u32 << m).filter(|&b| bits::size(b) >= t).collect();
        let mut best = 0usize;
        for choice in 0u64..1 << subsets.len() {
            let g: Vec<Mask> = (0..subsets.len()).filter(|&i| choice >> i & 1 == 1).map(|i| subsets[i]).collect();
            if pairwise_t_intersecting(&g, t) {
                let covered = h.iter().filter(|&a| g.contains(&(a & base))).count();
                best = best.max(covered);
            }
        }
        let rep = junta_approx_audit(&h, t, base).unwrap();
        assert_eq!(rep.missed, h.len() - best);
        let excess = h.iter().filter(|&a| bits::size(a & base) < t + r).count();
        if (t, r) == (1, 0) {
            assert_eq!(rep.missed, excess);
        }
        assert!(rep.missed <= excess);
        assert_eq!(rep.eps, BigRational::new((rep.missed as i64).into(), (binom(n, k) as i64).into()));
    }
    let f = FranklSpec::standard(9, 2, 1).unwrap().uniform(4).unwrap();
    assert!(junta_approx_audit(&f, 2, bits::prefix(4)).unwrap().eps.is_zero());
}

#[test]
fn local_extremality_branches() {
    let g = Family::from_predicate(4, |b| bits::size(b) >= 3).unwrap();
    let full = UniformFamily::junta(9, 4, bits::prefix(4), &g).unwrap();
    let rep = local_extremality_audit(&full, 2, bits::prefix(4), &g, 0.5).unwrap();
    assert!(rep.holds && rep.equality);
    let first = full.iter().find(|&a| a & 0b1111 != 0b1111).unwrap();
    let fewer = full.filter(|a| a != first);
    let rep = local_extremality_audit(&fewer, 2, bits::prefix(4), &g, 0.5).unwrap();
    assert!(rep.holds && !rep.equality);
    // An extra member meeting a generator slice in exactly one point.
    let extra = bits::from_elements(&[1, 2, 5, 6]);
    let more = UniformFamily::new(9, 4, full.iter().chain([extra])).unwrap();
    assert!(local_extremality_audit(&more, 2, bits::prefix(4), &g, 0.5).is_err());
}
