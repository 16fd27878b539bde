//! Centric hexagons, cubes, decades and dodecades of Q, the fundamental
//! cube, and the coordinate solvers that extend hexagons to cubes and cubes
//! to decades, each with a brute-force counterpart.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::cliquecensus::CliqueRecord;
use crate::covering::CoveringMap;
use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, FieldElement};
use crate::projgeom::{self, add, normalize, scale, ProjectivePoint, Subspace, Vec6, ZERO6};
use crate::quadric::QuadricModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Hexagon,
    Cube,
    Decade,
    Dodecade,
}

impl FigureKind {
    pub fn from_pairs(m: usize) -> Option<FigureKind> {
        match m {
            3 => Some(FigureKind::Hexagon),
            4 => Some(FigureKind::Cube),
            5 => Some(FigureKind::Decade),
            6 => Some(FigureKind::Dodecade),
            _ => None,
        }
    }

    pub fn pairs(self) -> usize {
        match self {
            FigureKind::Hexagon => 3,
            FigureKind::Cube => 4,
            FigureKind::Decade => 5,
            FigureKind::Dodecade => 6,
        }
    }
}

/// A centric figure. Each pair is stored as `[side 0, side 1]`, where the
/// sides are the two classes of the grid whose complement is the induced
/// collinearity graph; `pairs[0][0]` is on side 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentricFigure {
    pub kind: FigureKind,
    pub pairs: Vec<[u32; 2]>,
    pub center: ProjectivePoint,
}

impl CentricFigure {
    /// Verifies the centric structure and orients the pairs.
    pub fn new(model: &QuadricModel, pairs: Vec<[u32; 2]>, center: ProjectivePoint) -> Result<CentricFigure> {
        let m = pairs.len();
        let kind = FigureKind::from_pairs(m).ok_or_else(|| Error::NotCentric(format!("{m} pairs")))?;
        let ctx = model.ctx();
        if model.f_eval(&center).is_zero() {
            return Err(Error::NotCentric("center lies on Q".into()));
        }
        let mut all: Vec<u32> = pairs.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != 2 * m {
            return Err(Error::NotCentric("repeated vertex".into()));
        }
        for p in &pairs {
            if projgeom::rank(ctx, &[*model.coords(p[0]), *model.coords(p[1]), *center.coords()]) != 2 {
                return Err(Error::NotCentric(format!("pair {p:?} is not on a line through the center")));
            }
            if model.perp(p[0], p[1]) {
                return Err(Error::NotCentric(format!("opposite points {p:?} are collinear")));
            }
        }
        let anchor = pairs[0][0];
        let mut oriented = Vec::with_capacity(m);
        for (i, p) in pairs.iter().enumerate() {
            let flip = i > 0 && model.perp(anchor, p[0]);
            oriented.push(if flip { [p[1], p[0]] } else { *p });
        }
        for i in 0..m {
            for j in i + 1..m {
                for si in 0..2 {
                    for sj in 0..2 {
                        let (x, y) = (oriented[i][si], oriented[j][sj]);
                        if model.perp(x, y) != (si != sj) {
                            return Err(Error::NotCentric(format!("pairs {i} and {j} do not form a grid complement")));
                        }
                    }
                }
            }
        }
        Ok(CentricFigure {
            kind,
            pairs: oriented,
            center,
        })
    }

    pub fn points(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.pairs.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    /// The unordered set of unordered pairs, for comparisons.
    pub fn pair_set(&self) -> BTreeSet<[u32; 2]> {
        self.pairs.iter().map(|p| [p[0].min(p[1]), p[0].max(p[1])]).collect()
    }
}

/// The second point of Q on the line through the Q-point `x` and `c`.
pub fn second_point(model: &QuadricModel, x: u32, c: &Vec6) -> Option<u32> {
    let ctx = model.ctx();
    let a = model.alpha(model.coords(x), c);
    if a.is_zero() {
        return None;
    }
    let t = ctx.div(a, model.f_vec(c))?;
    model.index_of_vec(&add(model.coords(x), &scale(ctx, t, c)))
}

/// The preimage of a non-linear clique under the covering.
pub fn lift_clique_to_figure(model: &QuadricModel, cov: &CoveringMap, clique: &CliqueRecord) -> Result<CentricFigure> {
    if clique.is_linear() {
        return Err(Error::LinearClique);
    }
    if !(3..=6).contains(&clique.vertices.len()) {
        return Err(Error::CliqueSize(clique.vertices.len()));
    }
    let pairs = clique.vertices.iter().map(|&v| cov.fiber(v)).collect();
    CentricFigure::new(model, pairs, *model.n0())
}

/// The ovoids under the points of a figure.
pub fn project_figure(cov: &CoveringMap, fig: &CentricFigure) -> Vec<u32> {
    let mut v: Vec<u32> = fig.points().iter().map(|&x| cov.point_image[x as usize]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

// ---------------------------------------------------------------------------
// frames

/// A basis w1..w6 in which f reads x1x2 + x3x4 + x5^2 + x5x6 + lam x6^2.
#[derive(Clone, Debug)]
pub struct Frame {
    pub w: [Vec6; 6],
}

impl Frame {
    /// Frame coordinates of a vector.
    pub fn coords(&self, model: &QuadricModel, x: &Vec6) -> Vec6 {
        let w = &self.w;
        [
            model.alpha(x, &w[1]),
            model.alpha(x, &w[0]),
            model.alpha(x, &w[3]),
            model.alpha(x, &w[2]),
            model.alpha(x, &w[5]),
            model.alpha(x, &w[4]),
        ]
    }

    pub fn vector(&self, ctx: &FieldCtx, c: &Vec6) -> Vec6 {
        let mut v = ZERO6;
        for i in 0..6 {
            v = add(&v, &scale(ctx, c[i], &self.w[i]));
        }
        v
    }

    /// Completes a hyperbolic frame w1..w4 with an anisotropic pair spanning
    /// its perp.
    fn complete(model: &QuadricModel, w1: Vec6, w2: Vec6, w3: Vec6, w4: Vec6) -> Result<Frame> {
        let ctx = model.ctx();
        let lam = model.lambda();
        let perp = model.perp_space(&[w1, w2, w3, w4]);
        if perp.rank() != 2 {
            return Err(Error::BadFrame("hyperbolic part is degenerate".into()));
        }
        let z = perp.basis()[0];
        let fz = model.f_vec(&z);
        if fz.is_zero() {
            return Err(Error::BadFrame("perp is not anisotropic".into()));
        }
        let w5 = scale(ctx, ctx.inv(ctx.sqrt(fz)).unwrap(), &z);
        let y0 = perp.basis()[1];
        let a = model.alpha(&w5, &y0);
        let y = scale(ctx, ctx.inv(a).ok_or_else(|| Error::BadFrame("degenerate perp".into()))?, &y0);
        // w6 = y + c w5 with c^2 + c = lam + f(y)
        let roots = ctx.solve_artin_schreier(lam + model.f_vec(&y));
        let c = *roots.first().ok_or_else(|| Error::BadFrame("no Artin-Schreier root".into()))?;
        let w6 = add(&y, &scale(ctx, c, &w5));
        let fr = Frame { w: [w1, w2, w3, w4, w5, w6] };
        fr.check(model)?;
        Ok(fr)
    }

    fn check(&self, model: &QuadricModel) -> Result<()> {
        let lam = model.lambda();
        let f: Vec<FieldElement> = self.w.iter().map(|w| model.f_vec(w)).collect();
        let want_f = [FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE, lam];
        if f != want_f {
            return Err(Error::BadFrame("basis values of f".into()));
        }
        for i in 0..6 {
            for j in i + 1..6 {
                let want = matches!((i, j), (0, 1) | (2, 3) | (4, 5));
                if model.alpha(&self.w[i], &self.w[j]).is_zero() == want {
                    return Err(Error::BadFrame(format!("alpha(w{}, w{})", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    /// Frame sending a quadrangle a~b~c~d~a onto e1, e3, e2, e4.
    pub fn from_quadrangle(model: &QuadricModel, a: u32, b: u32, c: u32, d: u32) -> Result<Frame> {
        let ctx = model.ctx();
        let (va, vb, vc, vd) = (*model.coords(a), *model.coords(b), *model.coords(c), *model.coords(d));
        let ac = ctx.inv(model.alpha(&va, &vc)).ok_or_else(|| Error::BadFrame("a and c are collinear".into()))?;
        let bd = ctx.inv(model.alpha(&vb, &vd)).ok_or_else(|| Error::BadFrame("b and d are collinear".into()))?;
        Frame::complete(model, va, scale(ctx, ac, &vc), vb, scale(ctx, bd, &vd))
    }

    /// Frame sending a path a~b~c (a, c not collinear) onto e1, e3, e2.
    pub fn from_path(model: &QuadricModel, a: u32, b: u32, c: u32) -> Result<Frame> {
        let ctx = model.ctx();
        let (va, vb, vc) = (*model.coords(a), *model.coords(b), *model.coords(c));
        let ac = ctx.inv(model.alpha(&va, &vc)).ok_or_else(|| Error::BadFrame("a and c are collinear".into()))?;
        let w1 = va;
        let w2 = scale(ctx, ac, &vc);
        let w3 = vb;
        // z in <w1,w2>^perp with alpha(z, w3) = 1, then w4 = z + f(z) w3
        let perp = model.perp_space(&[w1, w2]);
        let z0 = perp
            .basis()
            .iter()
            .copied()
            .find(|z| !model.alpha(z, &w3).is_zero())
            .ok_or_else(|| Error::BadFrame("b is degenerate".into()))?;
        let z = scale(ctx, ctx.inv(model.alpha(&z0, &w3)).unwrap(), &z0);
        let w4 = add(&z, &scale(ctx, model.f_vec(&z), &w3));
        Frame::complete(model, w1, w2, w3, w4)
    }
}

// ---------------------------------------------------------------------------
// fundamental cube

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubeParams {
    pub u: FieldElement,
    pub v: FieldElement,
    pub r: FieldElement,
    pub s: FieldElement,
}

impl CubeParams {
    pub fn new(ctx: &FieldCtx, lam: FieldElement, u: FieldElement, v: FieldElement, r: FieldElement, s: FieldElement) -> Result<CubeParams> {
        let c = ctx.square(r) + ctx.mul(r, s) + ctx.mul(lam, ctx.square(s));
        if u.is_zero() || v.is_zero() || c != FieldElement::ONE {
            return Err(Error::BadCubeParams);
        }
        Ok(CubeParams { u, v, r, s })
    }

    /// All valid parameter choices.
    pub fn all(ctx: &FieldCtx, lam: FieldElement) -> Vec<CubeParams> {
        let rs = ctx.conic_solution_set(lam, FieldElement::ZERO).unwrap();
        let mut out = Vec::new();
        for u in ctx.nonzero_elements() {
            for v in ctx.nonzero_elements() {
                for &(r, s) in &rs {
                    out.push(CubeParams { u, v, r, s });
                }
            }
        }
        out
    }

    pub fn center(&self, ctx: &FieldCtx) -> Vec6 {
        let (u, v) = (self.u, self.v);
        [u, ctx.inv(u).unwrap(), v, ctx.inv(v).unwrap(), self.r, self.s]
    }

    /// The eight vertices a1, b1, c1, d1, a2, b2, c2, d2.
    pub fn vertices(&self, ctx: &FieldCtx) -> [Vec6; 8] {
        let (u, v, r, s) = (self.u, self.v, self.r, self.s);
        let m = |a, b| ctx.mul(a, b);
        let d = |a, b| ctx.div(a, b).unwrap();
        let one = FieldElement::ONE;
        let z = FieldElement::ZERO;
        let uv = m(u, v);
        [
            [one, z, z, z, z, z],
            [z, z, one, z, z, z],
            [z, one, z, z, z, z],
            [z, z, z, one, z, z],
            [z, d(one, m(u, u)), d(v, u), d(one, uv), d(r, u), d(s, u)],
            [d(u, v), d(one, uv), z, d(one, m(v, v)), d(r, v), d(s, v)],
            [m(u, u), z, uv, d(u, v), m(u, r), m(u, s)],
            [uv, d(v, u), m(v, v), z, m(v, r), m(v, s)],
        ]
    }
}

/// The cube with the fundamental quadrangle e1, e3, e2, e4 as a face and
/// center [u, 1/u, v, 1/v, r, s].
pub fn fundamental_cube(model: &QuadricModel, params: CubeParams) -> Result<CentricFigure> {
    let ctx = model.ctx();
    let p = CubeParams::new(ctx, model.lambda(), params.u, params.v, params.r, params.s)?;
    let vs = p.vertices(ctx);
    let idx: Vec<u32> = vs
        .iter()
        .map(|v| model.index_of_vec(v).ok_or_else(|| Error::Invariant("fundamental cube vertex off Q".into())))
        .collect::<Result<_>>()?;
    let pairs = (0..4).map(|i| [idx[i], idx[i + 4]]).collect();
    CentricFigure::new(model, pairs, normalize(ctx, &p.center(ctx))?)
}

/// I(F) for the fundamental quadrangle, from the parametrization.
pub fn i_of_f_parametric(model: &QuadricModel) -> BTreeSet<ProjectivePoint> {
    let ctx = model.ctx();
    CubeParams::all(ctx, model.lambda()).iter().map(|p| normalize(ctx, &p.center(ctx)).unwrap()).collect()
}

/// I(F) for the fundamental quadrangle, by testing every point off Q.
pub fn i_of_f_bruteforce(model: &QuadricModel) -> BTreeSet<ProjectivePoint> {
    let ctx = model.ctx();
    let face: Vec<u32> = (0..4).map(|i| model.index_of_vec(&projgeom::unit([0, 2, 1, 3][i])).unwrap()).collect();
    let cands: Vec<ProjectivePoint> = projgeom::pg5_points(ctx).filter(|p| !model.f_eval(p).is_zero()).collect();
    cands
        .par_iter()
        .filter(|p| {
            let c = p.coords();
            let mut pairs = Vec::with_capacity(4);
            for &x in &face {
                match second_point(model, x, c) {
                    Some(y) => pairs.push([x, y]),
                    None => return false,
                }
            }
            CentricFigure::new(model, pairs, **p).is_ok()
        })
        .copied()
        .collect()
}

// ---------------------------------------------------------------------------
// extensions

fn with_pair(model: &QuadricModel, fig: &CentricFigure, extra: &[[u32; 2]]) -> Result<CentricFigure> {
    let mut pairs = fig.pairs.clone();
    pairs.extend_from_slice(extra);
    CentricFigure::new(model, pairs, fig.center)
}

fn dedup_figures(mut v: Vec<CentricFigure>) -> Vec<CentricFigure> {
    v.sort_by_key(|f| f.pair_set());
    v.dedup_by_key(|f| f.pair_set());
    v
}

fn check_kind(fig: &CentricFigure, kind: FigureKind) -> Result<()> {
    if fig.kind != kind {
        return Err(Error::NotCentric(format!("expected a {kind:?}, got a {:?}", fig.kind)));
    }
    Ok(())
}

/// Cubes with the same center containing a centric hexagon, from the
/// coordinate conditions in the frame of a path of the hexagon.
pub fn extend_hexagon_to_cubes(model: &QuadricModel, hex: &CentricFigure) -> Result<Vec<CentricFigure>> {
    check_kind(hex, FigureKind::Hexagon)?;
    let hex = CentricFigure::new(model, hex.pairs.clone(), hex.center)?;
    let ctx = model.ctx();
    let lam = model.lambda();
    let (a1, b1, c1) = (hex.pairs[0][0], hex.pairs[1][1], hex.pairs[2][0]);
    let fr = Frame::from_path(model, a1, b1, c1)?;
    let p0 = fr.coords(model, hex.center.coords());
    let fp = model.f_vec(&fr.vector(ctx, &p0));
    let p = scale(ctx, ctx.inv(ctx.sqrt(fp)).unwrap(), &p0);
    if p[0].is_zero() || p[3].is_zero() || ctx.mul(p[0], p[1]) != FieldElement::ONE {
        return Err(Error::BadFrame(format!("hexagon center in frame: {:?}", projgeom::bits_of(&p))));
    }
    let p4inv = ctx.inv(p[3]).unwrap();
    let mu = ctx.square(p4inv) + FieldElement::ONE;
    let mut out = Vec::new();
    for (x, y) in ctx.conic_solution_set(lam, mu)? {
        let d5 = x + ctx.mul(p[4], p4inv);
        let d6 = y + ctx.mul(p[5], p4inv);
        let d3 = ctx.square(d5) + ctx.mul(d5, d6) + ctx.mul(lam, ctx.square(d6));
        let d1 = [FieldElement::ZERO, FieldElement::ZERO, d3, FieldElement::ONE, d5, d6];
        let d2 = add(&scale(ctx, p[3], &d1), &p);
        let i1 = model.index_of_vec(&fr.vector(ctx, &d1));
        let i2 = model.index_of_vec(&fr.vector(ctx, &d2));
        let (Some(i1), Some(i2)) = (i1, i2) else {
            return Err(Error::Invariant("hexagon extension point off Q".into()));
        };
        out.push(with_pair(model, &hex, &[[i1, i2]])?);
    }
    Ok(dedup_figures(out))
}

/// All ways to add one more opposite pair through the center, by search.
pub fn extend_by_search(model: &QuadricModel, fig: &CentricFigure) -> Vec<CentricFigure> {
    let c = fig.center.coords();
    let used = fig.points();
    let found: Vec<CentricFigure> = (0..model.points().len() as u32)
        .into_par_iter()
        .filter(|x| used.binary_search(x).is_err())
        .filter_map(|x| {
            let y = second_point(model, x, c)?;
            if x > y || used.binary_search(&y).is_ok() {
                return None;
            }
            with_pair(model, fig, &[[x, y]]).ok()
        })
        .collect();
    dedup_figures(found)
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeExtension {
    pub decades: Vec<CentricFigure>,
    pub dodecade: Option<CentricFigure>,
}

/// Decades and the dodecade containing a centric cube, from the coordinate
/// conditions in the frame of a face.
pub fn extend_cube(model: &QuadricModel, cube: &CentricFigure) -> Result<CubeExtension> {
    check_kind(cube, FigureKind::Cube)?;
    let cube = CentricFigure::new(model, cube.pairs.clone(), cube.center)?;
    let ctx = model.ctx();
    let lam = model.lambda();
    let face = [cube.pairs[0][0], cube.pairs[1][1], cube.pairs[2][0], cube.pairs[3][1]];
    let fr = Frame::from_quadrangle(model, face[0], face[1], face[2], face[3])?;
    let pc = fr.coords(model, cube.center.coords());
    let prod = ctx.mul(pc[0], pc[1]);
    if prod.is_zero() {
        return Err(Error::BadFrame("center collinear with the face".into()));
    }
    let chi = ctx.inv(ctx.sqrt(prod)).unwrap();
    let p = scale(ctx, chi, &pc);
    let params = CubeParams::new(ctx, lam, p[0], p[2], p[4], p[5]).map_err(|_| Error::BadFrame("center is not of fundamental shape".into()))?;
    if ctx.mul(p[2], p[3]) != FieldElement::ONE {
        return Err(Error::BadFrame("center is not of fundamental shape".into()));
    }
    // the frame carries the fundamental cube onto the given one
    let mut fund: Vec<u32> = params
        .vertices(ctx)
        .iter()
        .map(|v| model.index_of_vec(&fr.vector(ctx, v)).ok_or_else(|| Error::Invariant("fundamental vertex off Q".into())))
        .collect::<Result<_>>()?;
    fund.sort_unstable();
    if fund != cube.points() {
        return Err(Error::Invariant("frame image of the fundamental cube differs".into()));
    }

    let CubeParams { u, v, r, s } = params;
    let a = ctx.square(s) + FieldElement::ONE;
    let cc = ctx.square(r) + lam;
    // projective roots [X:Y] of a X^2 + X Y + cc Y^2 = 0
    let rays: Vec<(FieldElement, FieldElement)> = if a.is_zero() {
        vec![(FieldElement::ONE, FieldElement::ZERO), (cc, FieldElement::ONE)]
    } else {
        let ainv = ctx.inv(a).unwrap();
        ctx.solve_artin_schreier(ctx.mul(a, cc)).into_iter().map(|t| (ctx.mul(t, ainv), FieldElement::ONE)).collect()
    };
    let m = |x, y| ctx.mul(x, y);
    let dv = |x, y| ctx.div(x, y).unwrap();
    let mut decades = Vec::new();
    let mut new_pairs = Vec::new();
    for (x, y) in rays {
        let e1 = [m(x, m(u, s)) + m(y, m(u, r)), dv(m(x, s), u) + dv(m(y, r), u), FieldElement::ZERO, FieldElement::ZERO, x, y];
        let rs1 = FieldElement::ONE + m(r, s);
        let e2 = [
            FieldElement::ZERO,
            FieldElement::ZERO,
            m(x, m(s, v)) + m(y, m(r, v)),
            dv(m(s, x), v) + dv(m(r, y), v),
            m(x, rs1) + m(y, m(r, r)),
            m(x, m(s, s)) + m(y, rs1),
        ];
        let i1 = model.index_of_vec(&fr.vector(ctx, &e1)).ok_or_else(|| Error::Invariant("decade point off Q".into()))?;
        let i2 = model.index_of_vec(&fr.vector(ctx, &e2)).ok_or_else(|| Error::Invariant("decade point off Q".into()))?;
        if second_point(model, i1, cube.center.coords()) != Some(i2) {
            return Err(Error::Invariant("opposite decade points are not on a line through the center".into()));
        }
        decades.push(with_pair(model, &cube, &[[i1, i2]])?);
        new_pairs.push([i1, i2]);
    }
    let decades = dedup_figures(decades);
    let dodecade = match new_pairs[..] {
        [p, q] => Some(with_pair(model, &cube, &[p, q])?),
        [] => None,
        _ => return Err(Error::Invariant(format!("{} decades over a cube", new_pairs.len()))),
    };
    Ok(CubeExtension { decades, dodecade })
}

// ---------------------------------------------------------------------------
// counting

/// Closed form for the number of quadrangles of Q.
pub fn quadrangles_formula(q: u64) -> BigUint {
    let q = BigUint::from(q);
    let one = BigUint::from(1u32);
    (q.pow(3) + &one) * (q.pow(2) + &one) * (&q + &one) * q.pow(6) / BigUint::from(8u32)
}

/// Quadrangles a~b~c~d~a with a, c and b, d not collinear, counted as
/// ordered 4-tuples and divided by 8.
pub fn count_quadrangles(model: &QuadricModel) -> Result<u64> {
    if model.q() > 4 {
        return Err(Error::ExhaustiveTooLarge(model.q()));
    }
    let n = model.points().len();
    let nbr: Vec<BitSet> = (0..n as u32)
        .map(|a| BitSet::from_indices(n, (0..n as u32).filter(|&b| b != a && model.perp(a, b)).map(|b| b as usize)))
        .collect();
    let ordered: u64 = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut cnt = 0u64;
            for b in nbr[a].iter() {
                for c in nbr[b].iter() {
                    if c == a || nbr[a].contains(c) {
                        continue;
                    }
                    let mut d = nbr[a].and(&nbr[c]);
                    d.and_not_assign(&nbr[b]);
                    d.remove(b);
                    cnt += d.count() as u64;
                }
            }
            cnt
        })
        .sum();
    if ordered % 8 != 0 {
        return Err(Error::Invariant(format!("{ordered} ordered quadrangles")));
    }
    Ok(ordered / 8)
}

/// Centric figures with center n0 built from m nu-orbits whose points
/// realize the grid complement, counted from perpendicularity alone.
pub fn count_centric_on_fibers(model: &QuadricModel, m: usize) -> u64 {
    let fibers: Vec<[u32; 2]> = model.affine().iter().copied().filter(|&x| x < model.nu(x)).map(|x| [x, model.nu(x)]).collect();
    let k = fibers.len();
    // Some(same) when fibers i, j are matched by perpendicularity, `same`
    // telling whether their first points lie on the same side
    let orient = |i: usize, j: usize| -> Option<bool> {
        let (f, g) = (fibers[i], fibers[j]);
        let p = [[model.perp(f[0], g[0]), model.perp(f[0], g[1])], [model.perp(f[1], g[0]), model.perp(f[1], g[1])]];
        match p {
            [[false, true], [true, false]] => Some(true),
            [[true, false], [false, true]] => Some(false),
            _ => None,
        }
    };
    let table: Vec<Vec<Option<bool>>> = (0..k).into_par_iter().map(|i| (0..k).map(|j| if i == j { None } else { orient(i, j) }).collect()).collect();
    fn rec(table: &[Vec<Option<bool>>], m: usize, chosen: &mut Vec<(usize, bool)>, start: usize) -> u64 {
        if chosen.len() == m {
            return 1;
        }
        let mut total = 0;
        for j in start..table.len() {
            // side of fiber j relative to the first chosen fiber
            let Some(s0) = table[chosen[0].0][j] else { continue };
            let side = !s0 ^ chosen[0].1;
            let ok = chosen.iter().all(|&(i, si)| table[i][j].is_some_and(|same| (!same ^ si) == side));
            if ok {
                chosen.push((j, side));
                total += rec(table, m, chosen, j + 1);
                chosen.pop();
            }
        }
        total
    }
    (0..k)
        .into_par_iter()
        .map(|i| {
            let mut chosen = vec![(i, false)];
            rec(&table, m, &mut chosen, i + 1)
        })
        .sum()
}

/// The span of a figure, for tests and reports.
pub fn figure_span(model: &QuadricModel, fig: &CentricFigure) -> Subspace {
    let pts: Vec<ProjectivePoint> = fig.points().iter().map(|&i| *model.point(i)).collect();
    projgeom::span(model.ctx(), &pts)
}
