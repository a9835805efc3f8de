//! Exact maximisation of t-intersecting and forbidden-intersection families
//! in a single layer, and audits of junta approximations.
//!
//! Both problems are maximum cliques in a compatibility graph on
//! `binom([n], k)`. The engine is a branch-and-bound with greedy colouring
//! bounds over `u64` bitsets; vertices are the k-sets in colex order and the
//! root always contains `[k]` (every non-empty instance is isomorphic to one
//! that does).

use std::time::{Duration, Instant};

use num_rational::BigRational;

use crate::bits::{self, binom, Mask};
use crate::error::{Error, Result};
use crate::family::{squeeze, Family, Mode, UniformFamily};
use crate::measures::mu_uniform;

/// Largest ground set searched without the shiftedness reduction.
pub const MAX_PLAIN_N: usize = 9;
/// Largest ground set searched over shifted families.
pub const MAX_SHIFTED_N: usize = 12;
/// Largest ground set for which all optima can be enumerated.
pub const MAX_ENUM_N: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Restrict to families closed under moving elements downwards.
    pub shifted: bool,
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    /// Also enumerate every optimum containing `[k]`, grouped up to relabelling.
    pub all_optima: bool,
    pub optima_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { shifted: false, max_nodes: None, max_time: None, all_optima: false, optima_cap: 20_000 }
    }
}

impl SearchOptions {
    pub fn shifted() -> Self {
        SearchOptions { shifted: true, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: usize,
    pub family: UniformFamily,
    pub nodes: u64,
    pub elapsed: Duration,
    /// One representative per isomorphism class of optima.
    pub optima: Option<Vec<UniformFamily>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
    fn and(&self, o: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn and_not_assign(&mut self, o: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= !b;
        }
    }
    fn or_assign(&mut self, o: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }
}

/// Componentwise comparison of sorted element lists (`a` below `b`).
fn shift_below(a: Mask, b: Mask) -> bool {
    let (ea, eb) = (bits::elements(a), bits::elements(b));
    ea.len() == eb.len() && ea.iter().zip(&eb).all(|(x, y)| x <= y)
}

struct Engine {
    verts: Vec<Mask>,
    adj: Vec<BitSet>,
    up: Option<Vec<BitSet>>,
    opts: SearchOptions,
    start: Instant,
    nodes: u64,
    best: Vec<usize>,
    cur: Vec<usize>,
    root_bound: usize,
    found: Option<Vec<Vec<usize>>>,
}

impl Engine {
    fn new(n: usize, k: usize, compat: impl Fn(Mask, Mask) -> bool, opts: &SearchOptions) -> Engine {
        let verts = bits::k_subsets_colex(n, k);
        let m = verts.len();
        let mut adj = vec![BitSet::new(m); m];
        for i in 0..m {
            for j in i + 1..m {
                if compat(verts[i], verts[j]) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        let up = opts.shifted.then(|| {
            (0..m)
                .map(|i| {
                    let mut s = BitSet::new(m);
                    for j in i..m {
                        if shift_below(verts[i], verts[j]) {
                            s.insert(j);
                        }
                    }
                    s
                })
                .collect()
        });
        Engine {
            verts,
            adj,
            up,
            opts: opts.clone(),
            start: Instant::now(),
            nodes: 0,
            best: Vec::new(),
            cur: Vec::new(),
            root_bound: 0,
            found: opts.all_optima.then(Vec::new),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        let over_nodes = self.opts.max_nodes.is_some_and(|m| self.nodes > m);
        let over_time = self.nodes % 4096 == 0 && self.opts.max_time.is_some_and(|t| self.start.elapsed() > t);
        if over_nodes || over_time {
            return Err(Error::Budget { nodes: self.nodes, lower: self.best.len(), upper: self.root_bound });
        }
        Ok(())
    }

    /// Greedy colouring of `p`: vertices in colour-class order with their colour.
    fn colour(&self, p: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.len());
        let mut cols = Vec::with_capacity(p.len());
        let mut rest = p.clone();
        let mut c = 0;
        while !rest.is_empty() {
            c += 1;
            let mut q = rest.clone();
            while let Some(v) = q.first() {
                rest.remove(v);
                q.remove(v);
                q.and_not_assign(&self.adj[v]);
                order.push(v);
                cols.push(c);
            }
        }
        (order, cols)
    }

    fn prunes(&self, bound: usize) -> bool {
        if self.found.is_some() {
            bound < self.best.len()
        } else {
            bound <= self.best.len()
        }
    }

    fn record(&mut self) -> Result<()> {
        let size = self.cur.len();
        if size > self.best.len() {
            self.best = self.cur.clone();
            if let Some(f) = self.found.as_mut() {
                f.clear();
            }
        }
        if size == self.best.len() {
            if let Some(f) = self.found.as_mut() {
                f.push(self.cur.clone());
                if f.len() > self.opts.optima_cap {
                    return Err(Error::resource(format!(
                        "more than {} optimal families; raise the cap",
                        self.opts.optima_cap
                    )));
                }
            }
        }
        Ok(())
    }

    fn expand(&mut self, mut p: BitSet) -> Result<()> {
        self.tick()?;
        if p.is_empty() {
            return self.record();
        }
        let (order, cols) = self.colour(&p);
        for idx in (0..order.len()).rev() {
            if self.prunes(self.cur.len() + cols[idx]) {
                return Ok(());
            }
            let v = order[idx];
            let np = p.and(&self.adj[v]);
            self.cur.push(v);
            self.expand(np)?;
            self.cur.pop();
            p.remove(v);
        }
        Ok(())
    }

    /// Down-set search in the shift order: branch on the smallest candidate.
    fn expand_shifted(&mut self, cand: BitSet) -> Result<()> {
        self.tick()?;
        let Some(v) = cand.first() else {
            return self.record();
        };
        let colours = self.colour(&cand).1.last().copied().unwrap_or(0);
        if self.prunes(self.cur.len() + colours) {
            return Ok(());
        }
        let up = self.up.as_ref().expect("shifted engine");
        let mut with = cand.clone();
        with.remove(v);
        let mut kill = BitSet::new(self.verts.len());
        for w in with.iter() {
            if !self.adj[v].contains(w) {
                kill.or_assign(&up[w]);
            }
        }
        with.and_not_assign(&kill);
        let mut without = cand;
        without.and_not_assign(&up[v]);
        self.cur.push(v);
        self.expand_shifted(with)?;
        self.cur.pop();
        self.expand_shifted(without)
    }

    fn run(&mut self) -> Result<()> {
        let m = self.verts.len();
        let mut all = BitSet::new(m);
        for i in 0..m {
            all.insert(i);
        }
        self.root_bound = self.colour(&all).1.last().copied().unwrap_or(0);
        if self.up.is_some() {
            self.expand_shifted(all)
        } else {
            // Vertex 0 is [k].
            self.cur.push(0);
            let p = self.adj[0].clone();
            let r = self.expand(p);
            self.cur.pop();
            r
        }
    }

    fn family(&self, n: usize, k: usize, idx: &[usize]) -> Result<UniformFamily> {
        UniformFamily::new(n, k, idx.iter().map(|&i| self.verts[i]))
    }
}

fn check_instance(n: usize, k: usize, t: usize, opts: &SearchOptions) -> Result<()> {
    if t == 0 || t > k || k > n {
        return Err(Error::input(format!("need 1 <= t <= k <= n, got n = {n}, k = {k}, t = {t}")));
    }
    let limit = if opts.shifted { MAX_SHIFTED_N } else { MAX_PLAIN_N };
    if n > limit {
        return Err(Error::input(format!("n = {n} beyond the search limit {limit}")));
    }
    if opts.all_optima && n > MAX_ENUM_N {
        return Err(Error::input(format!("enumerating all optima needs n <= {MAX_ENUM_N}")));
    }
    Ok(())
}

fn solve(n: usize, k: usize, compat: impl Fn(Mask, Mask) -> bool, opts: &SearchOptions) -> Result<SearchResult> {
    let mut e = Engine::new(n, k, compat, opts);
    e.run()?;
    let family = e.family(n, k, &e.best)?;
    let optima = match e.found.take() {
        None => None,
        Some(raw) => {
            let mut reps: Vec<UniformFamily> = Vec::new();
            for f in raw {
                let f = e.family(n, k, &f)?;
                if !reps.iter().any(|r| isomorphic(r, &f)) {
                    reps.push(f);
                }
            }
            Some(reps)
        }
    };
    Ok(SearchResult { value: family.len(), family, nodes: e.nodes, elapsed: e.start.elapsed(), optima })
}

/// Largest t-intersecting `F ⊆ binom([n], k)`.
pub fn max_t_intersecting(n: usize, k: usize, t: usize, opts: &SearchOptions) -> Result<SearchResult> {
    check_instance(n, k, t, opts)?;
    solve(n, k, |a, b| bits::size(a & b) >= t, opts)
}

/// Largest `F ⊆ binom([n], k)` with no `|A ∩ B| = t - 1`.
pub fn max_forbidden(n: usize, k: usize, t: usize, opts: &SearchOptions) -> Result<SearchResult> {
    check_instance(n, k, t, opts)?;
    if opts.shifted && t != 1 {
        return Err(Error::input("the shifted reduction is only valid for the forbidden problem when t = 1"));
    }
    solve(n, k, |a, b| bits::size(a & b) != t - 1, opts)
}

fn degrees(f: &Family) -> Vec<usize> {
    let mut d = vec![0; f.n()];
    for a in f.iter() {
        for i in bits::elements(a) {
            d[i - 1] += 1;
        }
    }
    d
}

/// Is there a relabelling of the ground set carrying `a` onto `b`?
pub fn isomorphic(a: &UniformFamily, b: &UniformFamily) -> bool {
    if a.n() != b.n() || a.k() != b.k() || a.len() != b.len() {
        return false;
    }
    let (da, db) = (degrees(a), degrees(b));
    let (mut sa, mut sb) = (da.clone(), db.clone());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let n = a.n();
    let mut perm = vec![0usize; n];
    let mut used = vec![false; n + 1];
    let target: Vec<Mask> = b.members();
    fn go(i: usize, n: usize, da: &[usize], db: &[usize], perm: &mut [usize], used: &mut [bool], a: &UniformFamily, target: &[Mask]) -> bool {
        if i == n {
            let mut img: Vec<Mask> = a.iter().map(|s| crate::family::apply_perm(s, perm)).collect();
            img.sort_unstable();
            return img == target;
        }
        for j in 1..=n {
            if !used[j] && db[j - 1] == da[i] {
                used[j] = true;
                perm[i] = j;
                if go(i + 1, n, da, db, perm, used, a, target) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, n, &da, &db, &mut perm, &mut used, a, &target)
}

fn check_generator(j: Mask, n: usize, max: usize) -> Result<usize> {
    if j & !bits::full(n) != 0 {
        return Err(Error::input("coordinate set outside [n]"));
    }
    let m = bits::size(j);
    if m > max {
        return Err(Error::resource(format!("|J| = {m} exceeds the audit limit {max}")));
    }
    Ok(m)
}

/// Largest `|J|` accepted by [`junta_approx_audit`].
pub const MAX_AUDIT_J: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct JuntaApprox {
    /// Best generator on `[|J|]`.
    pub g: Family,
    /// `|F \ ⟨G⟩|`.
    pub missed: usize,
    /// `|F \ ⟨G⟩| / binom(n, k)`.
    pub eps: BigRational,
}

/// Best t-intersecting `G ⊆ P(J)` for covering `F` by `⟨G⟩`.
pub fn junta_approx_audit(f: &UniformFamily, t: usize, j: Mask) -> Result<JuntaApprox> {
    let (n, k) = (f.n(), f.k());
    let m = check_generator(j, n, MAX_AUDIT_J)?;
    if let Some((a, b)) = f.forbidden_witness(t) {
        return Err(Error::contract(format!(
            "family has members {:?} and {:?} meeting in exactly t - 1 points",
            bits::elements(a),
            bits::elements(b)
        )));
    }
    let mut weight = vec![0usize; 1 << m];
    for a in f.iter() {
        weight[squeeze(a & j, j) as usize] += 1;
    }
    let verts: Vec<Mask> = (0..1u32 << m).filter(|&b| bits::size(b) >= t && weight[b as usize] > 0).collect();
    let mut best = (0usize, Vec::new());
    let mut cur = Vec::new();
    weighted_clique(&verts, &weight, t, 0, 0, &mut cur, &mut best);
    let g = Family::from_masks(m, Mode::PowerSet, best.1)?;
    let missed = f.len() - best.0;
    let eps = BigRational::new((missed as u64).into(), (binom(n, k) as u64).into());
    Ok(JuntaApprox { g, missed, eps })
}

fn weighted_clique(verts: &[Mask], w: &[usize], t: usize, from: usize, acc: usize, cur: &mut Vec<Mask>, best: &mut (usize, Vec<Mask>)) {
    if acc > best.0 {
        *best = (acc, cur.clone());
    }
    let rest: usize = verts[from..]
        .iter()
        .filter(|&&v| cur.iter().all(|&c| bits::size(c & v) >= t))
        .map(|&v| w[v as usize])
        .sum();
    if acc + rest <= best.0 {
        return;
    }
    for i in from..verts.len() {
        let v = verts[i];
        if cur.iter().all(|&c| bits::size(c & v) >= t) {
            cur.push(v);
            weighted_clique(verts, w, t, i + 1, acc + w[v as usize], cur, best);
            cur.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalExtremality {
    pub mu_f: BigRational,
    pub mu_g: BigRational,
    pub holds: bool,
    pub equality: bool,
    /// Largest slice density over keys outside `G`.
    pub delta: f64,
    /// Largest slice deficiency `1 - density` over keys in `G`.
    pub eps: f64,
}

/// Compare `μ(F)` with `μ(⟨G⟩)` for a family close to the junta `⟨G⟩`.
/// `G` lives on `[|J|]` and must be maximal t-intersecting there.
pub fn local_extremality_audit(f: &UniformFamily, t: usize, j: Mask, g: &Family, eps0: f64) -> Result<LocalExtremality> {
    let (n, k) = (f.n(), f.k());
    let m = check_generator(j, n, MAX_AUDIT_J + 3)?;
    if g.n() != m {
        return Err(Error::input("generator ground set does not match |J|"));
    }
    if let Some((a, b)) = g.t_intersecting_witness(t) {
        return Err(Error::contract(format!("G is not t-intersecting: {:?}, {:?}", bits::elements(a), bits::elements(b))));
    }
    if let Some(b) = (0..1u32 << m).find(|&b| !g.contains(b) && g.iter().all(|c| bits::size(b & c) >= t) && bits::size(b) >= t) {
        return Err(Error::contract(format!("G is not maximal: {:?} can be added", bits::elements(b))));
    }
    if let Some((a, b)) = f.forbidden_witness(t) {
        return Err(Error::contract(format!(
            "family has members {:?} and {:?} meeting in exactly t - 1 points",
            bits::elements(a),
            bits::elements(b)
        )));
    }
    let free = n - m;
    let mut counts = vec![0u128; 1 << m];
    for a in f.iter() {
        counts[squeeze(a & j, j) as usize] += 1;
    }
    let (mut delta, mut eps) = (0.0f64, 0.0f64);
    for c in 0..1u32 << m {
        let room = bits::binom_i(free as i64, k as i64 - bits::size(c) as i64);
        if room == 0 {
            continue;
        }
        let d = counts[c as usize] as f64 / room as f64;
        if g.contains(c) {
            if d <= 1.0 - eps0 {
                let b = bits::elements(crate::family::spread(c, j));
                return Err(Error::contract(format!("slice {b:?} has density {d}, not above 1 - eps0")));
            }
            eps = eps.max(1.0 - d);
        } else {
            delta = delta.max(d);
        }
    }
    let junta = UniformFamily::junta(n, k, j, g)?;
    let mu_f = mu_uniform(f);
    let mu_g = mu_uniform(&junta);
    Ok(LocalExtremality {
        holds: mu_f <= mu_g,
        equality: f.family() == junta.family(),
        mu_f,
        mu_g,
        delta,
        eps,
    })
}
