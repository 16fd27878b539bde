//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use quadcover::cliquecensus::{census, classify_clique, formula_counts, non_linear_cliques, sample_non_linear_clique, verify_srg, CensusMode, CensusReport, Gamma, SrgParams};
use quadcover::covering::{canonical_covering, verify_covering, AffineQuadrangle, CoveringMap};
use quadcover::figures::{self, CentricFigure, FigureKind};
use quadcover::gf2n::{FieldCtx, FieldElement};
use quadcover::ovoid::{verify_semipartial, GeometryX};
use quadcover::quadric::default_model;
use quadcover::subf2::{count_identities, figure_subgeometry, SubgeometryType};
use quadcover::QuadricModel;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

const LIMIT_Q2: Duration = Duration::from_secs(1);
const LIMIT_Q4: Duration = Duration::from_secs(60);
const LIMIT_Q8: Duration = Duration::from_secs(15 * 60);
const SAMPLED_FOUR_CLIQUES: u64 = 10_000;
const LIFT_SAMPLES_Q8: usize = 10_000;
const HEXAGONS_Q8: usize = 100;
const SUBGEOMETRY_SAMPLES_Q8: [(usize, usize); 3] = [(3, 200), (4, 1000), (6, 100)];
const SEED: u64 = 20_261_014;

struct World {
    model: QuadricModel,
    gx: GeometryX,
    g: Gamma,
    aq: AffineQuadrangle,
    cov: CoveringMap,
}

impl World {
    fn build(n: u32) -> World {
        let model = default_model(n).unwrap();
        let gx = GeometryX::build(&model).unwrap();
        let g = Gamma::build(&model, &gx);
        let aq = AffineQuadrangle::build(&model).unwrap();
        let cov = canonical_covering(&model, &gx, &aq).unwrap();
        World { model, gx, g, aq, cov }
    }

    fn lift(&self, clique: &[u32]) -> Result<CentricFigure, String> {
        let rec = classify_clique(&self.g, clique).map_err(|e| e.to_string())?;
        figures::lift_clique_to_figure(&self.model, &self.cov, &rec).map_err(|e| format!("{clique:?}: {e}"))
    }

    fn samples(&self, k: usize, count: usize, seed: u64) -> Vec<Vec<u32>> {
        let mut rng = SplitMix64::seed_from_u64(seed);
        (0..count).map(|_| sample_non_linear_clique(&self.g, &mut rng, k).expect("sampling a clique")).collect()
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counts_of(r: &CensusReport) -> (u64, u64, u64, u64) {
    let c = r.counts.as_ref().expect("full census has counts");
    (c.n3, c.n4, c.n5, c.n6)
}

fn spectrum_sizes(r: &CensusReport) -> BTreeSet<usize> {
    r.spectrum.as_ref().map(|s| s.iter().map(|e| e.size).collect()).unwrap_or_default()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let w = World::build(1);
    ensure(w.g.n_vertices() == 6 && (0..6).all(|a| w.g.degree(a) == 5), || "Gamma is not K6".into())?;
    let r = census(&w.g, &w.gx, CensusMode::Full, 6).map_err(|e| e.to_string())?;
    let f = formula_counts(1);
    ensure(counts_of(&r) == (20, 15, 6, 1) && (f.n3, f.n4, f.n5, f.n6) == (20, 15, 6, 1) && r.pass(), || format!("counts {:?}", counts_of(&r)))?;
    let fig = w.lift(&[0, 1, 2, 3, 4, 5])?;
    ensure(fig.kind == FigureKind::Dodecade && fig.points() == w.model.affine(), || "Q \\ Q0 is not the lifted dodecade".into())?;
    ensure(figures::count_centric_on_fibers(&w.model, 6) == 1, || "centric dodecade with center n0 is not unique".into())?;
    let el = t.elapsed();
    ensure(el < LIMIT_Q2, || format!("took {el:.2?}"))?;
    Ok(format!("K6, N3..N6 = 20/15/6/1, Q\\Q0 is the unique dodecade ({el:.2?})"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let w = World::build(2);
    let s = verify_srg(&w.g);
    ensure(s.pass() && s.expected == SrgParams { v: 120, k: 51, lambda: 18, mu: 24 } && s.vertices == 120, || format!("{s:?}"))?;
    let sp = verify_semipartial(&w.model, &w.gx, None);
    ensure(sp.pass() && sp.exhaustive, || format!("{sp:?}"))?;
    let r = census(&w.g, &w.gx, CensusMode::Full, 6).map_err(|e| e.to_string())?;
    let (n3, n4, n5, n6) = counts_of(&r);
    ensure(r.pass() && (n3, n4, n5, n6) == (16320, 20400, 0, 0), || format!("counts {:?}", (n3, n4, n5, n6)))?;
    ensure(spectrum_sizes(&r) == BTreeSet::from([4]), || format!("spectrum {:?}", r.spectrum))?;
    let lin = r.linear.as_ref().unwrap().linear_triangles;
    ensure(lin == 2040 && lin + n3 == 120 * 51 * 18 / 6, || format!("linear triangles {lin}"))?;
    let el = t.elapsed();
    ensure(el < LIMIT_Q4, || format!("took {el:.2?}"))?;
    Ok(format!("SRG(120,51,18,24), alpha=2 on all pairs, N3=16320, N4=20400, N5=0, spectrum {{4}}, 2040+16320=18360 ({el:.2?})"))
}

fn criterion_3(w: &World, built: Duration) -> Outcome {
    let t = Instant::now();
    let s = verify_srg(&w.g);
    ensure(s.pass() && s.expected == SrgParams { v: 2016, k: 455, lambda: 70, mu: 112 }, || format!("{s:?}"))?;
    let r = census(&w.g, &w.gx, CensusMode::Full, 6).map_err(|e| e.to_string())?;
    let counts = counts_of(&r);
    ensure(r.pass() && counts == (9_784_320, 22_014_720, 8_805_888, 1_467_648), || format!("counts {counts:?}"))?;
    let lin = r.linear.as_ref().unwrap();
    ensure(lin.linear_triangles == 16380 * 56 && lin.rosettes == 16380, || format!("linear {lin:?}"))?;
    ensure(spectrum_sizes(&r) == BTreeSet::from([6, 8]), || format!("spectrum {:?}", r.spectrum))?;
    let sampled = census(&w.g, &w.gx, CensusMode::Sampled { seed: SEED, samples: SAMPLED_FOUR_CLIQUES }, 6).map_err(|e| e.to_string())?;
    let sc = sampled.samples.as_ref().unwrap();
    ensure(
        sampled.pass() && sc.four_cliques_sampled >= SAMPLED_FOUR_CLIQUES && sc.four_cliques_with_expected_extensions == sc.four_cliques_sampled,
        || format!("{sc:?}"),
    )?;
    let el = t.elapsed() + built;
    ensure(el < LIMIT_Q8, || format!("took {el:.2?}"))?;
    Ok(format!(
        "SRG(2016,455,70,112), N3..N6 = {counts:?}, linear 16380*56, spectrum {{8,6}}, {} sampled 4-cliques extend to 2+1 ({el:.1?})",
        sc.four_cliques_sampled
    ))
}

fn criterion_4() -> Outcome {
    let mut cases = 0u64;
    for n in 1..=4 {
        let ctx = FieldCtx::new(n).map_err(|e| e.to_string())?;
        let q = ctx.order() as usize;
        let elems: Vec<FieldElement> = ctx.elements().collect();
        for lam in elems.iter().copied().filter(|&l| ctx.trace(l) == 1) {
            for mu in elems.iter().copied().filter(|&m| m != FieldElement::ONE) {
                let mut brute = Vec::new();
                for &x in &elems {
                    for &y in &elems {
                        if ctx.square(x) + ctx.mul(x, y) + ctx.mul(lam, ctx.square(y)) + mu == FieldElement::ONE {
                            brute.push((x, y));
                        }
                    }
                }
                let mut fast = ctx.conic_solution_set(lam, mu).map_err(|e| e.to_string())?;
                fast.sort_unstable();
                brute.sort_unstable();
                ensure(brute.len() == q + 1 && fast == brute, || format!("q={q} lam={lam:?} mu={mu:?}: {} solutions", brute.len()))?;
                cases += 1;
            }
        }
    }
    Ok(format!("q+1 solutions in all {cases} (q, lambda, mu) cases, q = 2..16"))
}

fn criterion_5(q8: &World) -> Outcome {
    let mut sizes = Vec::new();
    for (n, want) in [(1u32, 3usize), (2, 45), (3, 441)] {
        let owned;
        let m = if n == 3 {
            &q8.model
        } else {
            owned = default_model(n).unwrap();
            &owned
        };
        let a = figures::i_of_f_parametric(m);
        let b = figures::i_of_f_bruteforce(m);
        ensure(a.len() == want && a == b, || format!("q={}: parametric {} vs brute force {}", m.q(), a.len(), b.len()))?;
        sizes.push(a.len());
    }
    Ok(format!("|I(F)| = {sizes:?}, parametric = brute force"))
}

fn criterion_6(q8: &World) -> Outcome {
    let mut pts = Vec::new();
    for n in 1..=3 {
        let owned;
        let w = if n == 3 {
            q8
        } else {
            owned = World::build(n);
            &owned
        };
        let r = verify_covering(&w.model, &w.gx, &w.aq, &w.cov);
        ensure(r.pass(), || format!("q={}: {r:?}", w.model.q()))?;
        pts.push(r.points_checked);
    }
    Ok(format!("fibers, line/pencil bijections, quotient iso at q=2,4,8 (points checked {pts:?})"))
}

fn check_lift(w: &World, c: &[u32]) -> Result<(), String> {
    let fig = w.lift(c)?;
    let mut sorted = c.to_vec();
    sorted.sort_unstable();
    ensure(&fig.center == w.model.n0(), || format!("{c:?}: center {:?}", fig.center))?;
    ensure(figures::project_figure(&w.cov, &fig) == sorted, || format!("{c:?}: projection differs"))?;
    ensure(FigureKind::from_pairs(c.len()) == Some(fig.kind), || format!("{c:?}: kind {:?}", fig.kind))
}

fn criterion_7(q4: &World, q8: &World) -> Outcome {
    let mut n4 = 0;
    for k in [3, 4] {
        for c in non_linear_cliques(&q4.g, k) {
            check_lift(q4, &c)?;
            n4 += 1;
        }
    }
    let mut n8 = 0;
    for (k, count) in [(3, LIFT_SAMPLES_Q8), (4, LIFT_SAMPLES_Q8), (5, 1000), (6, 1000)] {
        for c in q8.samples(k, count, SEED + k as u64) {
            check_lift(q8, &c)?;
            n8 += 1;
        }
    }
    Ok(format!("{n4} cliques at q=4 (all 3-/4-cliques), {n8} sampled at q=8, all centric with center n0"))
}

fn check_hexagon(m: &QuadricModel, hex: &CentricFigure) -> Result<(), String> {
    let a = figures::extend_hexagon_to_cubes(m, hex).map_err(|e| e.to_string())?;
    let b = figures::extend_by_search(m, hex);
    ensure(a.len() == m.q() as usize + 1, || format!("{} cubes", a.len()))?;
    ensure(a.iter().map(|f| f.pair_set()).eq(b.iter().map(|f| f.pair_set())), || format!("solver {} vs search {}", a.len(), b.len()))
}

fn criterion_8(q2: &World, q4: &World, q8: &World) -> Outcome {
    let mut done = Vec::new();
    for w in [q2, q4] {
        let mut count = 0;
        for c in non_linear_cliques(&w.g, 3) {
            check_hexagon(&w.model, &w.lift(&c)?)?;
            count += 1;
        }
        // hexagons with other centers, from the fundamental cubes
        for p in figures::CubeParams::all(w.model.ctx(), w.model.lambda()) {
            let cube = figures::fundamental_cube(&w.model, p).map_err(|e| e.to_string())?;
            for skip in 0..4 {
                let pairs = (0..4).filter(|&i| i != skip).map(|i| cube.pairs[i]).collect();
                check_hexagon(&w.model, &CentricFigure::new(&w.model, pairs, cube.center).map_err(|e| e.to_string())?)?;
                count += 1;
            }
        }
        done.push(count);
    }
    for c in q8.samples(3, HEXAGONS_Q8, SEED ^ 8) {
        check_hexagon(&q8.model, &q8.lift(&c)?)?;
    }
    Ok(format!("q+1 cubes, solver = search on {} (q=2), {} (q=4) and {HEXAGONS_Q8} (q=8) hexagons", done[0], done[1]))
}

fn check_subgeometry(w: &World, c: &[u32]) -> Result<(), String> {
    let fig = w.lift(c)?;
    let s = figure_subgeometry(&w.model, &fig).map_err(|e| e.to_string())?;
    let want = match fig.kind {
        FigureKind::Hexagon => (SubgeometryType::Qplus32, 9, 6),
        FigureKind::Cube => (SubgeometryType::Q42, 15, 15),
        _ => (SubgeometryType::Qminus52, 27, 45),
    };
    ensure(
        s.pass() && (s.report.type_tag, s.report.point_count, s.report.line_count) == want && s.report.contains_n0,
        || format!("{c:?}: {s:?}"),
    )?;
    if fig.kind == FigureKind::Cube {
        ensure(s.nucleus.is_some_and(|p| &p != w.model.n0()), || format!("{c:?}: nucleus is n0"))?;
    }
    Ok(())
}

fn criterion_9(q4: &World, q8: &World) -> Outcome {
    let mut n4 = 0;
    for k in [3, 4] {
        for c in non_linear_cliques(&q4.g, k) {
            check_subgeometry(q4, &c)?;
            n4 += 1;
        }
    }
    let mut n8 = 0;
    for (k, count) in SUBGEOMETRY_SAMPLES_Q8 {
        for c in q8.samples(k, count, SEED ^ (k as u64 * 9)) {
            check_subgeometry(q8, &c)?;
            n8 += 1;
        }
    }
    Ok(format!("Q+(3,2), Q(4,2), Q-(5,2) with n0 in the span on {n4} figures at q=4 and {n8} at q=8"))
}

fn criterion_10() -> Outcome {
    let rows = count_identities(1..=9);
    for r in &rows {
        ensure(r.pass(), || format!("n={}: {r:?}", r.n))?;
        ensure((r.n % 2 == 1) == r.subgeometries_times_36.is_some(), || format!("n={}: odd-n identities missing", r.n))?;
    }
    ensure(rows[0].subgeometries.as_deref() == Some("1") && rows[0].n6_bar.as_deref() == Some("36"), || "q=2 subgeometry count".into())?;
    Ok(format!("all identities exact for n=1..9; q=8 has {} subgeometries", rows[2].subgeometries.as_deref().unwrap_or("?")))
}

fn main() {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |i: usize, o: Outcome| {
        match &o {
            Ok(msg) => println!("PASS  criterion {i:>2}: {msg}"),
            Err(msg) => println!("FAIL  criterion {i:>2}: {msg}"),
        }
        results.push((i, o));
    };
    report(1, criterion_1());
    report(2, criterion_2());
    let t = Instant::now();
    let q8 = World::build(3);
    let built = t.elapsed();
    report(3, criterion_3(&q8, built));
    report(4, criterion_4());
    report(5, criterion_5(&q8));
    report(6, criterion_6(&q8));
    let q2 = World::build(1);
    let q4 = World::build(2);
    report(7, criterion_7(&q4, &q8));
    report(8, criterion_8(&q2, &q4, &q8));
    report(9, criterion_9(&q4, &q8));
    report(10, criterion_10());
    let failed = results.iter().filter(|(_, o)| o.is_err()).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
