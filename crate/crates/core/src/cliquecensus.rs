//! The tangency graph on ovoids, its strongly regular parameters, and the
//! census of linear and non-linear cliques.

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::bitset::{self, Ones};
use crate::error::{Error, Result};
use crate::ovoid::GeometryX;
use crate::quadric::QuadricModel;

/// Full census is only attempted up to this field degree.
pub const FULL_CENSUS_MAX_N: u32 = 3;

const NO_TANGENCY: u16 = u16::MAX;

pub struct Gamma {
    n: usize,
    q: u32,
    field_n: u32,
    words: usize,
    rows: Vec<u64>,
    // Q-index of the tangency point per ordered pair, NO_TANGENCY off edges
    tangency: Vec<u16>,
}

impl Gamma {
    /// Adjacency by |X1 cap X2| = 1.
    pub fn build(model: &QuadricModel, gx: &GeometryX) -> Gamma {
        let n = gx.ovoids.len();
        let words = n.div_ceil(64);
        let strips: Vec<(Vec<u64>, Vec<u16>)> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut row = vec![0u64; words];
                let mut tang = vec![NO_TANGENCY; n];
                let oa = &gx.ovoids[a].bits;
                for (b, ob) in gx.ovoids.iter().enumerate() {
                    if a != b && oa.and_count(&ob.bits) == 1 {
                        row[b >> 6] |= 1 << (b & 63);
                        let s = oa.and(&ob.bits).first().unwrap();
                        tang[b] = model.q0()[s] as u16;
                    }
                }
                (row, tang)
            })
            .collect();
        let mut rows = Vec::with_capacity(n * words);
        let mut tangency = Vec::with_capacity(n * n);
        for (r, t) in strips {
            rows.extend(r);
            tangency.extend(t);
        }
        Gamma {
            n,
            q: model.q(),
            field_n: model.ctx().n(),
            words,
            rows,
            tangency,
        }
    }

    /// Adjacency from the covering: some points over A and B are collinear.
    pub fn adjacency_oracle(model: &QuadricModel, gx: &GeometryX, a: u32, b: u32) -> bool {
        let (oa, ob) = (&gx.ovoids[a as usize], &gx.ovoids[b as usize]);
        a != b && [oa.rep, oa.partner].iter().any(|&x| [ob.rep, ob.partner].iter().any(|&y| model.perp(x, y)))
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, a: u32) -> &[u64] {
        let a = a as usize;
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    #[inline]
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.row(a)[b as usize >> 6] >> (b & 63) & 1 == 1
    }

    #[inline]
    pub fn degree(&self, a: u32) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Q-index of the common point of two tangent ovoids.
    #[inline]
    pub fn tangency(&self, a: u32, b: u32) -> Option<u32> {
        let t = self.tangency[a as usize * self.n + b as usize];
        (t != NO_TANGENCY).then_some(t as u32)
    }

    #[inline]
    fn tang_raw(&self, a: u32, b: u32) -> u16 {
        self.tangency[a as usize * self.n + b as usize]
    }

    pub fn neighbors(&self, a: u32) -> impl Iterator<Item = u32> + '_ {
        Ones::new(self.row(a)).map(|x| x as u32)
    }

    pub fn common_neighbors(&self, vs: &[u32]) -> Vec<u64> {
        let mut acc = vec![!0u64; self.words];
        for &v in vs {
            for (a, b) in acc.iter_mut().zip(self.row(v)) {
                *a &= b;
            }
        }
        // clear padding bits
        if self.n % 64 != 0 {
            acc[self.words - 1] &= (1u64 << (self.n % 64)) - 1;
        }
        acc
    }

    /// Eccentricity maximum by breadth-first search from every vertex.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n {
            let mut seen = vec![0u64; self.words];
            seen[s >> 6] |= 1 << (s & 63);
            let mut frontier = seen.clone();
            let mut d = 0;
            loop {
                let mut next = vec![0u64; self.words];
                for v in Ones::new(&frontier) {
                    for (x, r) in next.iter_mut().zip(self.row(v as u32)) {
                        *x |= r;
                    }
                }
                for (x, s) in next.iter_mut().zip(&seen) {
                    *x &= !s;
                }
                if next.iter().all(|&w| w == 0) {
                    break;
                }
                for (s, x) in seen.iter_mut().zip(&next) {
                    *s |= x;
                }
                frontier = next;
                d += 1;
            }
            if Ones::new(&seen).count() != self.n {
                return None;
            }
            best = best.max(d);
        }
        Some(best)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    pub fn expected(q: u64) -> SrgParams {
        SrgParams {
            v: q * q * (q * q - 1) / 2,
            k: (q - 1) * (q * q + 1),
            lambda: q * q + q - 2,
            mu: 2 * q * (q - 1),
        }
    }

    /// k(k - lambda - 1) = mu(v - k - 1).
    pub fn feasible(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == self.mu * (self.v - self.k - 1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SrgReport {
    pub expected: SrgParams,
    pub vertices: usize,
    pub regular_ok: bool,
    pub lambda_ok: bool,
    pub mu_ok: bool,
    pub adjacent_pairs: u64,
    pub non_adjacent_pairs: u64,
    pub feasibility_lhs: u64,
    pub feasibility_rhs: u64,
    pub feasibility_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SrgReport {
    pub fn pass(&self) -> bool {
        self.regular_ok && self.lambda_ok && self.mu_ok && self.feasibility_ok && self.vertices as u64 == self.expected.v
    }
}

/// Checks every pair of vertices against the expected parameters.
pub fn verify_srg(g: &Gamma) -> SrgReport {
    let e = SrgParams::expected(g.q as u64);
    let n = g.n as u32;
    let regular_ok = (0..n).all(|a| g.degree(a) as u64 == e.k);
    let per: Vec<[u64; 4]> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut t = [0u64; 4];
            for b in a + 1..n {
                let c = bitset::and_count(g.row(a), g.row(b)) as u64;
                if g.adjacent(a, b) {
                    t[0] += 1;
                    t[2] += (c != e.lambda) as u64;
                } else {
                    t[1] += 1;
                    t[3] += (c != e.mu) as u64;
                }
            }
            t
        })
        .collect();
    let sum = |i: usize| per.iter().map(|t| t[i]).sum::<u64>();
    let (adjacent_pairs, non_adjacent_pairs) = (sum(0), sum(1));
    let lambda_ok = sum(2) == 0;
    let mu_ok = sum(3) == 0;
    let counterexample = per.iter().position(|t| t[2] + t[3] > 0).map(|a| {
        let a = a as u32;
        let b = (a + 1..n)
            .find(|&b| {
                let c = bitset::and_count(g.row(a), g.row(b)) as u64;
                c != if g.adjacent(a, b) { e.lambda } else { e.mu }
            })
            .unwrap();
        format!("pair {a},{b}: {} common neighbours", bitset::and_count(g.row(a), g.row(b)))
    });
    SrgReport {
        expected: e,
        vertices: g.n,
        regular_ok,
        lambda_ok,
        mu_ok,
        adjacent_pairs,
        non_adjacent_pairs,
        feasibility_lhs: e.k * (e.k - e.lambda - 1),
        feasibility_rhs: e.mu * (e.v - e.k - 1),
        feasibility_ok: e.feasible(),
        counterexample,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CliqueKind {
    Linear { base: u32 },
    NonLinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueRecord {
    pub vertices: Vec<u32>,
    pub kind: CliqueKind,
    pub maximal: bool,
}

impl CliqueRecord {
    pub fn is_linear(&self) -> bool {
        matches!(self.kind, CliqueKind::Linear { .. })
    }
}

pub fn classify_clique(g: &Gamma, vertices: &[u32]) -> Result<CliqueRecord> {
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() < 2 || vs.len() != vertices.len() {
        return Err(Error::CliqueSize(vertices.len()));
    }
    if let Some(&v) = vs.iter().find(|&&v| v as usize >= g.n) {
        return Err(Error::UnknownOvoid(v));
    }
    let mut base = None;
    let mut linear = true;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let t = g.tangency(vs[i], vs[j]).ok_or(Error::NotAClique(vs[i], vs[j]))?;
            match base {
                None => base = Some(t),
                Some(b) if b != t => linear = false,
                _ => {}
            }
        }
    }
    let maximal = g.common_neighbors(&vs).iter().all(|&w| w == 0);
    Ok(CliqueRecord {
        vertices: vs,
        kind: if linear {
            CliqueKind::Linear { base: base.unwrap() }
        } else {
            CliqueKind::NonLinear
        },
        maximal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CensusMode {
    Full,
    Sampled { seed: u64, samples: u64 },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LinearStats {
    pub rosettes: u64,
    pub linear_triangles: u64,
    pub rosettes_maximal: u64,
    /// Linear triangles whose common neighbours are exactly the q-3 other
    /// members of their rosette.
    pub linear_triangle_extensions_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SpectrumEntry {
    pub size: usize,
    pub linear: bool,
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExactCounts {
    pub n3: u64,
    pub n4: u64,
    pub n5: u64,
    pub n6: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleChecks {
    pub seed: u64,
    pub four_cliques_sampled: u64,
    pub triangles_with_q_plus_1_extensions: u64,
    pub four_cliques_with_expected_extensions: u64,
    /// Estimate of N3 from the sampled edges.
    pub n3_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub mode: CensusMode,
    pub q: u32,
    pub max_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<ExactCounts>,
    pub formula: ExactCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearStats>,
    /// Non-linear triangles with exactly q+1 common neighbours.
    pub triangle_extensions_ok: bool,
    /// No 4-clique mixes a linear triangle with a non-linear one.
    pub no_mixed_cliques: bool,
    /// Every non-linear 4-clique has 2 (n odd) or 0 (n even) common
    /// neighbours, adjacent when there are 2.
    pub four_clique_extensions_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_identity_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_identities_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<SpectrumEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CensusReport {
    pub fn pass(&self) -> bool {
        let counts_ok = match &self.counts {
            None => true,
            Some(c) => {
                let f = &self.formula;
                c.n3 == f.n3 && (self.max_size < 4 || c.n4 == f.n4) && (self.max_size < 6 || (c.n5 == f.n5 && c.n6 == f.n6))
            }
        };
        counts_ok
            && self.triangle_extensions_ok
            && self.no_mixed_cliques
            && self.four_clique_extensions_ok
            && self.triangle_identity_ok.unwrap_or(true)
            && self.extension_identities_ok.unwrap_or(true)
            && self.linear.as_ref().map_or(true, |l| l.linear_triangle_extensions_ok)
    }
}

/// Closed forms for N3..N6 (N5 and N6 vanish for even n).
pub fn formula_counts(field_n: u32) -> ExactCounts {
    let q = 1u64 << field_n;
    let n3 = (q.pow(4) - 1) * (q - 1) * q.pow(4) / 12;
    let n4 = n3 * (q + 1) / 4;
    let (n5, n6) = if field_n % 2 == 1 { (2 * n4 / 5, n4 / 15) } else { (0, 0) };
    ExactCounts { n3, n4, n5, n6 }
}

#[derive(Default)]
struct Acc {
    linear_tri: u64,
    n3: u64,
    n4: u64,
    n5: u64,
    n6: u64,
    tri_ext_bad: u64,
    mixed: u64,
    four_ext_bad: u64,
    linear_ext_bad: u64,
    first_bad: Option<String>,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        self.linear_tri += o.linear_tri;
        self.n3 += o.n3;
        self.n4 += o.n4;
        self.n5 += o.n5;
        self.n6 += o.n6;
        self.tri_ext_bad += o.tri_ext_bad;
        self.mixed += o.mixed;
        self.four_ext_bad += o.four_ext_bad;
        self.linear_ext_bad += o.linear_ext_bad;
        self.first_bad = self.first_bad.or(o.first_bad);
        self
    }

    fn bad(&mut self, msg: impl FnOnce() -> String) {
        if self.first_bad.is_none() {
            self.first_bad = Some(msg());
        }
    }
}

#[inline]
fn and_into(out: &mut [u64], a: &[u64], b: &[u64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x & y;
    }
}

#[inline]
fn popcount(w: &[u64]) -> usize {
    w.iter().map(|x| x.count_ones() as usize).sum()
}

/// Bits strictly above `v`.
#[inline]
fn above(w: &[u64], v: u32) -> impl Iterator<Item = u32> + '_ {
    Ones::new(w).map(|x| x as u32).filter(move |&x| x > v)
}

fn census_from(g: &Gamma, a: u32, max_size: usize, acc: &mut Acc) {
    let q = g.q as usize;
    let odd = g.field_n % 2 == 1;
    let w = g.words;
    let mut ab = vec![0u64; w];
    let mut abc = vec![0u64; w];
    let mut abcd = vec![0u64; w];
    for b in above(g.row(a), a) {
        and_into(&mut ab, g.row(a), g.row(b));
        let t_ab = g.tang_raw(a, b);
        for c in above(&ab, b) {
            let linear = g.tang_raw(a, c) == t_ab && g.tang_raw(b, c) == t_ab;
            and_into(&mut abc, &ab, g.row(c));
            if linear {
                acc.linear_tri += 1;
                // common neighbours of a linear triangle stay in its rosette
                let ok = popcount(&abc) + 3 == q && Ones::new(&abc).all(|d| g.tang_raw(a, d as u32) == t_ab);
                if !ok {
                    acc.linear_ext_bad += 1;
                    acc.mixed += 1;
                    acc.bad(|| format!("linear triangle {a},{b},{c} extends outside its rosette"));
                }
                continue;
            }
            acc.n3 += 1;
            if popcount(&abc) != q + 1 {
                acc.tri_ext_bad += 1;
                acc.bad(|| format!("triangle {a},{b},{c} has {} common neighbours", popcount(&abc)));
            }
            if max_size < 4 {
                continue;
            }
            for d in Ones::new(&abc).map(|x| x as u32) {
                // a non-linear triangle plus d must not contain a linear triangle
                let t = [(a, b), (a, c), (b, c)];
                if t.iter().any(|&(x, y)| {
                    let txy = g.tang_raw(x, y);
                    g.tang_raw(x, d) == txy && g.tang_raw(y, d) == txy
                }) {
                    acc.mixed += 1;
                    acc.bad(|| format!("4-clique {a},{b},{c},{d} is mixed"));
                }
                if d < c {
                    continue;
                }
                acc.n4 += 1;
                and_into(&mut abcd, &abc, g.row(d));
                let k = popcount(&abcd);
                let ext: Vec<u32> = Ones::new(&abcd).map(|x| x as u32).collect();
                let ok = if odd { k == 2 && g.adjacent(ext[0], ext[1]) } else { k == 0 };
                if !ok {
                    acc.four_ext_bad += 1;
                    acc.bad(|| format!("4-clique {a},{b},{c},{d} has {k} common neighbours"));
                }
                if max_size >= 5 {
                    for (i, &e) in ext.iter().enumerate() {
                        if e > d {
                            acc.n5 += 1;
                            for &f in &ext[i + 1..] {
                                if g.adjacent(e, f) {
                                    acc.n6 += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Sizes of all maximal cliques, by Bron-Kerbosch with pivoting inside each
/// vertex's later neighbourhood.
pub fn maximal_spectrum(g: &Gamma) -> Vec<SpectrumEntry> {
    let parts: Vec<BTreeMap<(usize, bool), u64>> = (0..g.n as u32)
        .into_par_iter()
        .map(|v| {
            let mut out = BTreeMap::new();
            let w = g.words;
            let mut p = vec![0u64; w];
            let mut x = vec![0u64; w];
            for (i, &r) in g.row(v).iter().enumerate() {
                // split N(v) at v
                let lo = if (i + 1) * 64 <= v as usize {
                    !0u64
                } else if i * 64 > v as usize {
                    0
                } else {
                    (1u64 << (v as usize - i * 64)) - 1
                };
                x[i] = r & lo;
                p[i] = r & !lo;
            }
            let mut r = vec![v];
            bk(g, &mut r, p, x, &mut out);
            out
        })
        .collect();
    let mut total: BTreeMap<(usize, bool), u64> = BTreeMap::new();
    for m in parts {
        for (k, c) in m {
            *total.entry(k).or_default() += c;
        }
    }
    total.into_iter().map(|((size, linear), count)| SpectrumEntry { size, linear, count }).collect()
}

fn bk(g: &Gamma, r: &mut Vec<u32>, mut p: Vec<u64>, mut x: Vec<u64>, out: &mut BTreeMap<(usize, bool), u64>) {
    if p.iter().all(|&w| w == 0) {
        if x.iter().all(|&w| w == 0) {
            let linear = linear_set(g, r);
            *out.entry((r.len(), linear)).or_default() += 1;
        }
        return;
    }
    // pivot maximizing |P cap N(u)| over u in P cup X
    let mut best = 0u32;
    let mut best_c = usize::MAX;
    for u in Ones::new(&p).chain(Ones::new(&x)) {
        let c = bitset::and_count(&p, g.row(u as u32));
        if best_c == usize::MAX || c > best_c {
            best = u as u32;
            best_c = c;
        }
    }
    let cand: Vec<u32> = Ones::new(&p).map(|u| u as u32).filter(|&u| !g.adjacent(best, u)).collect();
    for u in cand {
        let row = g.row(u);
        let np: Vec<u64> = p.iter().zip(row).map(|(a, b)| a & b).collect();
        let nx: Vec<u64> = x.iter().zip(row).map(|(a, b)| a & b).collect();
        r.push(u);
        bk(g, r, np, nx, out);
        r.pop();
        p[u as usize >> 6] &= !(1 << (u & 63));
        x[u as usize >> 6] |= 1 << (u & 63);
    }
}

fn linear_set(g: &Gamma, vs: &[u32]) -> bool {
    if vs.len() < 2 {
        return true;
    }
    let t = g.tang_raw(vs[0], vs[1]);
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.tang_raw(a, b) == t))
}

fn linear_stats(g: &Gamma, gx: &GeometryX, linear_tri: u64, ok: bool) -> LinearStats {
    let rosettes_maximal = gx.rosettes.iter().filter(|r| g.common_neighbors(&r.members).iter().all(|&w| w == 0)).count() as u64;
    LinearStats {
        rosettes: gx.rosettes.len() as u64,
        linear_triangles: linear_tri,
        rosettes_maximal,
        linear_triangle_extensions_ok: ok,
    }
}

fn binom3(k: u64) -> u64 {
    if k < 3 {
        0
    } else {
        k * (k - 1) * (k - 2) / 6
    }
}

/// A seeded random non-linear 4-clique: random edge, then random non-linear
/// third vertex, then random common neighbour.
fn sample_four_clique(g: &Gamma, rng: &mut SplitMix64) -> Option<[u32; 4]> {
    sample_non_linear_clique(g, rng, 4).map(|c| [c[0], c[1], c[2], c[3]])
}

/// A seeded random non-linear k-clique (3 <= k <= 6), grown from a random
/// edge and a random non-linear third vertex by random common neighbours.
/// Not uniform over cliques.
pub fn sample_non_linear_clique(g: &Gamma, rng: &mut SplitMix64, k: usize) -> Option<Vec<u32>> {
    assert!((3..=6).contains(&k));
    'attempt: for _ in 0..64 {
        let a = rng.gen_range(0..g.n as u32);
        let nb: Vec<u32> = g.neighbors(a).collect();
        let b = nb[rng.gen_range(0..nb.len())];
        let t = g.tang_raw(a, b);
        let ab = g.common_neighbors(&[a, b]);
        let cs: Vec<u32> = Ones::new(&ab).map(|x| x as u32).filter(|&c| !(g.tang_raw(a, c) == t && g.tang_raw(b, c) == t)).collect();
        if cs.is_empty() {
            continue;
        }
        let mut clique = vec![a, b, cs[rng.gen_range(0..cs.len())]];
        while clique.len() < k {
            let common = g.common_neighbors(&clique);
            let ds: Vec<u32> = Ones::new(&common).map(|x| x as u32).collect();
            if ds.is_empty() {
                continue 'attempt;
            }
            clique.push(ds[rng.gen_range(0..ds.len())]);
        }
        return Some(clique);
    }
    None
}

/// Runs the census. Full mode enumerates every clique; sampled mode checks
/// the extension properties on seeded random cliques.
pub fn census(g: &Gamma, gx: &GeometryX, mode: CensusMode, max_size: usize) -> Result<CensusReport> {
    let q = g.q as usize;
    let odd = g.field_n % 2 == 1;
    let formula = formula_counts(g.field_n);
    match mode {
        CensusMode::Full => {
            if g.field_n > FULL_CENSUS_MAX_N {
                return Err(Error::CensusTooLarge {
                    n: g.field_n,
                    max: FULL_CENSUS_MAX_N,
                });
            }
            let acc = (0..g.n as u32)
                .into_par_iter()
                .map(|a| {
                    let mut acc = Acc::default();
                    census_from(g, a, max_size, &mut acc);
                    acc
                })
                .reduce(Acc::default, Acc::merge);
            let e = SrgParams::expected(q as u64);
            let rosette_tris = gx.rosettes.len() as u64 * binom3(q as u64);
            let triangle_identity = acc.linear_tri == rosette_tris && 6 * (acc.linear_tri + acc.n3) == e.v * e.k * e.lambda;
            let ext_ok = 4 * acc.n4 == acc.n3 * (q as u64 + 1)
                && (max_size < 6 || if odd { 5 * acc.n5 == 2 * acc.n4 && 15 * acc.n6 == acc.n4 } else { acc.n5 == 0 && acc.n6 == 0 });
            let spectrum = maximal_spectrum(g);
            Ok(CensusReport {
                mode,
                q: g.q,
                max_size,
                counts: Some(ExactCounts {
                    n3: acc.n3,
                    n4: acc.n4,
                    n5: acc.n5,
                    n6: acc.n6,
                }),
                formula,
                linear: Some(linear_stats(g, gx, acc.linear_tri, acc.linear_ext_bad == 0)),
                triangle_extensions_ok: acc.tri_ext_bad == 0,
                no_mixed_cliques: acc.mixed == 0,
                four_clique_extensions_ok: acc.four_ext_bad == 0,
                triangle_identity_ok: Some(triangle_identity),
                extension_identities_ok: (max_size >= 4).then_some(ext_ok),
                spectrum: Some(spectrum),
                samples: None,
                counterexample: acc.first_bad,
            })
        }
        CensusMode::Sampled { seed, samples } => {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let mut tri_ok = 0;
            let mut four_ok = 0;
            let mut mixed = 0;
            let mut sampled = 0;
            let mut first_bad = None;
            for _ in 0..samples {
                let Some([a, b, c, d]) = sample_four_clique(g, &mut rng) else {
                    break;
                };
                sampled += 1;
                if popcount(&g.common_neighbors(&[a, b, c])) == q + 1 {
                    tri_ok += 1;
                } else {
                    first_bad.get_or_insert_with(|| format!("triangle {a},{b},{c}"));
                }
                let rec = classify_clique(g, &[a, b, c, d])?;
                let sub_linear = [[a, b, d], [a, c, d], [b, c, d]].iter().any(|t| linear_set(g, t));
                if rec.is_linear() || sub_linear {
                    mixed += 1;
                    first_bad.get_or_insert_with(|| format!("4-clique {a},{b},{c},{d} is mixed"));
                }
                if four_clique_extends(g, [a, b, c, d], odd) {
                    four_ok += 1;
                } else {
                    first_bad.get_or_insert_with(|| format!("4-clique {a},{b},{c},{d} extension count"));
                }
            }
            // edge-based estimate of N3
            let mut rng = SplitMix64::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            let edge_samples = samples.clamp(1, 100_000);
            let mut third = 0u64;
            for _ in 0..edge_samples {
                let a = rng.gen_range(0..g.n as u32);
                let nb: Vec<u32> = g.neighbors(a).collect();
                let b = nb[rng.gen_range(0..nb.len())];
                let t = g.tang_raw(a, b);
                third += Ones::new(&g.common_neighbors(&[a, b])).filter(|&c| !(g.tang_raw(a, c as u32) == t && g.tang_raw(b, c as u32) == t)).count() as u64;
            }
            let edges = (g.n * g.degree(0) / 2) as f64;
            Ok(CensusReport {
                mode,
                q: g.q,
                max_size,
                counts: None,
                formula,
                linear: None,
                triangle_extensions_ok: tri_ok == sampled,
                no_mixed_cliques: mixed == 0,
                four_clique_extensions_ok: four_ok == sampled && sampled == samples,
                triangle_identity_ok: None,
                extension_identities_ok: None,
                spectrum: None,
                samples: Some(SampleChecks {
                    seed,
                    four_cliques_sampled: sampled,
                    triangles_with_q_plus_1_extensions: tri_ok,
                    four_cliques_with_expected_extensions: four_ok,
                    n3_estimate: edges * third as f64 / edge_samples as f64 / 3.0,
                }),
                counterexample: first_bad,
            })
        }
    }
}

/// Whether a non-linear 4-clique has the extension pattern for its field:
/// two adjacent common neighbours for odd n, none for even n.
pub fn four_clique_extends(g: &Gamma, c: [u32; 4], odd: bool) -> bool {
    let ext: Vec<u32> = Ones::new(&g.common_neighbors(&c)).map(|x| x as u32).collect();
    if odd {
        ext.len() == 2 && g.adjacent(ext[0], ext[1])
    } else {
        ext.is_empty()
    }
}

/// Non-linear 5- and 6-cliques containing a given non-linear 4-clique.
pub fn extensions_of_four_clique(g: &Gamma, c: [u32; 4]) -> (Vec<[u32; 5]>, Vec<[u32; 6]>) {
    let ext: Vec<u32> = Ones::new(&g.common_neighbors(&c)).map(|x| x as u32).collect();
    let fives = ext.iter().map(|&e| [c[0], c[1], c[2], c[3], e]).collect();
    let mut sixes = Vec::new();
    for (i, &e) in ext.iter().enumerate() {
        for &f in &ext[i + 1..] {
            if g.adjacent(e, f) {
                sixes.push([c[0], c[1], c[2], c[3], e, f]);
            }
        }
    }
    (fives, sixes)
}

/// All non-linear k-cliques for small k, ascending, for exhaustive tests.
pub fn non_linear_cliques(g: &Gamma, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let all = g.common_neighbors(&[]);
    fn rec(g: &Gamma, k: usize, cand: &[u64], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            if !linear_set(g, cur) {
                out.push(cur.clone());
            }
            return;
        }
        let last = cur.last().copied();
        for v in Ones::new(cand).map(|x| x as u32) {
            if last.is_some_and(|l| v <= l) {
                continue;
            }
            let next: Vec<u64> = cand.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
            cur.push(v);
            rec(g, k, &next, cur, out);
            cur.pop();
        }
    }
    rec(g, k, &all, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::default_model;

    fn setup(n: u32) -> (QuadricModel, GeometryX, Gamma) {
        let m = default_model(n).unwrap();
        let gx = GeometryX::build(&m).unwrap();
        let g = Gamma::build(&m, &gx);
        (m, gx, g)
    }

    #[test]
    fn formula_values() {
        let f = formula_counts(1);
        assert_eq!((f.n3, f.n4, f.n5, f.n6), (20, 15, 6, 1));
        let f = formula_counts(2);
        assert_eq!((f.n3, f.n4, f.n5, f.n6), (16320, 20400, 0, 0));
        let f = formula_counts(3);
        assert_eq!((f.n3, f.n4, f.n5, f.n6), (9_784_320, 22_014_720, 8_805_888, 1_467_648));
        for q in [2u64, 4, 8, 16, 32] {
            assert!(SrgParams::expected(q).feasible());
        }
        assert_eq!(SrgParams::expected(4), SrgParams { v: 120, k: 51, lambda: 18, mu: 24 });
    }

    #[test]
    fn q2_is_complete() {
        let (_, _, g) = setup(1);
        assert_eq!(g.n_vertices(), 6);
        for a in 0..6 {
            assert_eq!(g.degree(a), 5);
        }
        assert!(verify_srg(&g).pass());
        assert_eq!(g.diameter(), Some(1));
    }

    #[test]
    fn q4_srg_and_oracle() {
        let (m, gx, g) = setup(2);
        let r = verify_srg(&g);
        assert!(r.pass(), "{r:?}");
        assert_eq!((r.feasibility_lhs, r.feasibility_rhs), (1632, 1632));
        for a in 0..120 {
            for b in 0..120 {
                assert_eq!(g.adjacent(a, b), Gamma::adjacency_oracle(&m, &gx, a, b));
            }
        }
        assert_eq!(g.diameter(), Some(2));
    }

    #[test]
    fn census_q2() {
        let (_, gx, g) = setup(1);
        let r = census(&g, &gx, CensusMode::Full, 6).unwrap();
        let c = r.counts.as_ref().unwrap();
        assert_eq!((c.n3, c.n4, c.n5, c.n6), (20, 15, 6, 1));
        assert!(r.pass(), "{r:?}");
        let spec = r.spectrum.unwrap();
        assert_eq!(spec, vec![SpectrumEntry { size: 6, linear: false, count: 1 }]);
    }

    #[test]
    fn census_q4() {
        let (_, gx, g) = setup(2);
        let r = census(&g, &gx, CensusMode::Full, 6).unwrap();
        assert!(r.pass(), "{r:?}");
        let c = r.counts.as_ref().unwrap();
        assert_eq!((c.n3, c.n4, c.n5, c.n6), (16320, 20400, 0, 0));
        let lin = r.linear.as_ref().unwrap();
        assert_eq!(lin.linear_triangles, 2040);
        assert_eq!(lin.rosettes_maximal, 510);
        let spec = r.spectrum.unwrap();
        assert_eq!(
            spec,
            vec![
                SpectrumEntry { size: 4, linear: false, count: 20400 },
                SpectrumEntry { size: 4, linear: true, count: 510 },
            ]
        );
    }

    #[test]
    fn census_guard_and_sampling() {
        let (_, gx, g) = setup(2);
        let r = census(&g, &gx, CensusMode::Sampled { seed: 7, samples: 300 }, 6).unwrap();
        assert!(r.pass(), "{r:?}");
        let est = r.samples.as_ref().unwrap().n3_estimate;
        assert!((est - 16320.0).abs() / 16320.0 < 0.1, "{est}");
        let again = census(&g, &gx, CensusMode::Sampled { seed: 7, samples: 300 }, 6).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn classify_examples() {
        let (_, gx, g) = setup(2);
        let r = &gx.rosettes[0];
        let rec = classify_clique(&g, &r.members[..3]).unwrap();
        assert_eq!(rec.kind, CliqueKind::Linear { base: r.base });
        assert!(!rec.maximal);
        let full = classify_clique(&g, &r.members).unwrap();
        assert!(full.maximal && full.is_linear());
        let tri = non_linear_cliques(&g, 3);
        assert_eq!(tri.len(), 16320);
        let rec = classify_clique(&g, &tri[0]).unwrap();
        assert_eq!(rec.kind, CliqueKind::NonLinear);
        let non = (1..120).find(|&b| !g.adjacent(0, b)).unwrap();
        assert_eq!(classify_clique(&g, &[0, non]), Err(Error::NotAClique(0, non)));
        assert_eq!(classify_clique(&g, &[0]), Err(Error::CliqueSize(1)));
    }

    #[test]
    fn linear_and_nonlinear_share_at_most_two() {
        let (_, gx, g) = setup(2);
        let fours = non_linear_cliques(&g, 4);
        assert_eq!(fours.len(), 20400);
        for c in &fours {
            for r in &gx.rosettes {
                let shared = c.iter().filter(|v| r.members.binary_search(v).is_ok()).count();
                assert!(shared <= 2);
            }
        }
    }
}
