use std::sync::OnceLock;

use quadcover::cliquecensus::{classify_clique, sample_non_linear_clique, Gamma};
use quadcover::covering::{canonical_covering, AffineQuadrangle, CoveringMap};
use quadcover::figures::*;
use quadcover::ovoid::GeometryX;
use quadcover::quadric::default_model;
use quadcover::subf2::{figure_subgeometry, scale_figure_representatives, SubgeometryType};
use quadcover::QuadricModel;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

struct World {
    model: QuadricModel,
    g: Gamma,
    cov: CoveringMap,
}

fn world() -> &'static World {
    static W: OnceLock<World> = OnceLock::new();
    W.get_or_init(|| {
        let model = default_model(3).unwrap();
        let gx = GeometryX::build(&model).unwrap();
        let g = Gamma::build(&model, &gx);
        let aq = AffineQuadrangle::build(&model).unwrap();
        let cov = canonical_covering(&model, &gx, &aq).unwrap();
        World { model, g, cov }
    })
}

fn sampled_figures(k: usize, count: usize, seed: u64) -> Vec<CentricFigure> {
    let w = world();
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = sample_non_linear_clique(&w.g, &mut rng, k).unwrap();
            let rec = classify_clique(&w.g, &c).unwrap();
            let fig = lift_clique_to_figure(&w.model, &w.cov, &rec).unwrap();
            let mut sorted = c.clone();
            sorted.sort_unstable();
            assert_eq!(project_figure(&w.cov, &fig), sorted);
            fig
        })
        .collect()
}

#[test]
fn i_of_f_q8() {
    let m = &world().model;
    let a = i_of_f_parametric(m);
    assert_eq!(a.len(), 441);
    assert_eq!(a, i_of_f_bruteforce(m));
}

#[test]
fn hexagon_extensions_q8() {
    let m = &world().model;
    for hex in sampled_figures(3, 10, 1) {
        let solved = extend_hexagon_to_cubes(m, &hex).unwrap();
        assert_eq!(solved.len(), 9);
        let searched = extend_by_search(m, &hex);
        assert_eq!(solved.iter().map(|f| f.pair_set()).collect::<Vec<_>>(), searched.iter().map(|f| f.pair_set()).collect::<Vec<_>>());
    }
}

#[test]
fn cube_extensions_q8() {
    let m = &world().model;
    for cube in sampled_figures(4, 10, 2) {
        let ext = extend_cube(m, &cube).unwrap();
        assert_eq!(ext.decades.len(), 2);
        let dodecade = ext.dodecade.unwrap();
        assert_eq!(dodecade.kind, FigureKind::Dodecade);
        let searched = extend_by_search(m, &cube);
        assert_eq!(ext.decades.iter().map(|f| f.pair_set()).collect::<Vec<_>>(), searched.iter().map(|f| f.pair_set()).collect::<Vec<_>>());
    }
    // a cube away from n0
    let p = CubeParams::all(m.ctx(), m.lambda())[100];
    let ext = extend_cube(m, &fundamental_cube(m, p).unwrap()).unwrap();
    assert_eq!(ext.decades.len(), 2);
}

#[test]
fn dodecades_close_to_elliptic_subquadric() {
    let m = &world().model;
    for fig in sampled_figures(6, 20, 3) {
        let reps = scale_figure_representatives(m, &fig).unwrap();
        for r in &reps {
            assert_eq!(quadcover::projgeom::add(&r[0], &r[1]), *fig.center.coords());
        }
        let s = figure_subgeometry(m, &fig).unwrap();
        assert!(s.pass(), "{s:?}");
        assert_eq!(s.report.type_tag, SubgeometryType::Qminus52);
        assert_eq!((s.report.rank, s.report.span_points, s.report.line_count), (6, 63, 45));
        assert!(s.report.contains_n0);
    }
}

#[test]
fn cubes_and_decades_close_q8() {
    let m = &world().model;
    for fig in sampled_figures(4, 20, 4) {
        let s = figure_subgeometry(m, &fig).unwrap();
        assert!(s.pass(), "{s:?}");
        assert_ne!(s.nucleus.as_ref(), Some(m.n0()));
    }
    for fig in sampled_figures(5, 10, 5) {
        let s = figure_subgeometry(m, &fig).unwrap();
        assert!(s.pass(), "{s:?}");
    }
}
