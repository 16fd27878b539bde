//! The elliptic quadric Q = Q^-(5,q) of
//! f(x) = x1 x2 + x3 x4 + x5^2 + x5 x6 + lam x6^2, its section
//! Q0 = Q(4,q) by H0 = {x6 = 0}, the nucleus n0 of Q0 and the elation nu.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, FieldElement};
use crate::projgeom::{self, normalize, pg5_points, PointIndex, ProjectivePoint, Subspace, Vec6};

/// Largest field degree for which a full model is built.
pub const MAX_MODEL_N: u32 = 3;

const NONE: u32 = u32::MAX;

#[inline]
pub fn form(ctx: &FieldCtx, lam: FieldElement, x: &Vec6) -> FieldElement {
    ctx.mul(x[0], x[1]) + ctx.mul(x[2], x[3]) + ctx.square(x[4]) + ctx.mul(x[4], x[5]) + ctx.mul(lam, ctx.square(x[5]))
}

#[inline]
pub fn polar(ctx: &FieldCtx, u: &Vec6, v: &Vec6) -> FieldElement {
    ctx.mul(u[0], v[1])
        + ctx.mul(u[1], v[0])
        + ctx.mul(u[2], v[3])
        + ctx.mul(u[3], v[2])
        + ctx.mul(u[4], v[5])
        + ctx.mul(u[5], v[4])
}

/// The functional v -> alpha(u, v) as a coefficient vector.
pub fn polar_functional(u: &Vec6) -> Vec6 {
    [u[1], u[0], u[3], u[2], u[5], u[4]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionType {
    Elliptic,
    Hyperbolic,
    Cone,
}

pub struct QuadricModel {
    ctx: FieldCtx,
    lam: FieldElement,
    points: Vec<ProjectivePoint>,
    index: PointIndex,
    in_h0: Vec<bool>,
    q0: Vec<u32>,
    q0_slot: Vec<u32>,
    affine: Vec<u32>,
    lines: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    h0: Subspace,
    n0: ProjectivePoint,
    nu: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub n: u32,
    pub q: u32,
    pub modulus: String,
    pub lambda: u16,
    pub points_q: usize,
    pub points_q0: usize,
    pub points_affine: usize,
    pub lines_q: usize,
    pub lines_q0: usize,
    pub n0: ProjectivePoint,
}

impl QuadricModel {
    pub fn build(ctx: FieldCtx, lam: FieldElement) -> Result<QuadricModel> {
        if ctx.n() > MAX_MODEL_N {
            return Err(Error::ModelTooLarge {
                n: ctx.n(),
                max: MAX_MODEL_N,
            });
        }
        if ctx.trace(lam) != 1 {
            return Err(Error::TraceZeroLambda(lam.0));
        }
        let points: Vec<ProjectivePoint> = pg5_points(&ctx).filter(|p| form(&ctx, lam, p.coords()).is_zero()).collect();
        let index = PointIndex::new(ctx.n(), points.iter());

        let h0 = Subspace::from_vectors(&ctx, &(0..5).map(projgeom::unit).collect::<Vec<_>>());
        let in_h0: Vec<bool> = points.iter().map(|p| p.coords()[5].is_zero()).collect();
        let mut q0 = Vec::new();
        let mut affine = Vec::new();
        let mut q0_slot = vec![NONE; points.len()];
        for (i, &h) in in_h0.iter().enumerate() {
            if h {
                q0_slot[i] = q0.len() as u32;
                q0.push(i as u32);
            } else {
                affine.push(i as u32);
            }
        }

        // radical of alpha restricted to H0
        let mut rows: Vec<Vec6> = h0.basis().iter().map(polar_functional).collect();
        rows.push(projgeom::unit(5));
        let rad = projgeom::nullspace(&ctx, &rows);
        if rad.len() != 1 {
            return Err(Error::Invariant(format!("radical of H0 has rank {}", rad.len())));
        }
        let n0 = normalize(&ctx, &rad[0])?;
        let f_n0 = form(&ctx, lam, n0.coords());
        if f_n0.is_zero() {
            return Err(Error::Invariant("nucleus lies on Q".into()));
        }

        // x + t n0 lies on Q for t = alpha(x, n0) / f(n0)
        let nu: Vec<u32> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if in_h0[i] {
                    return Ok(i as u32);
                }
                let t = ctx.div(polar(&ctx, p.coords(), n0.coords()), f_n0).unwrap();
                let y = projgeom::add(p.coords(), &projgeom::scale(&ctx, t, n0.coords()));
                let y = normalize(&ctx, &y)?;
                index.get(&y).ok_or_else(|| Error::Invariant("nu leaves Q".into()))
            })
            .collect::<Result<_>>()?;

        let mut model = QuadricModel {
            ctx,
            lam,
            points,
            index,
            in_h0,
            q0,
            q0_slot,
            affine,
            lines: Vec::new(),
            point_lines: Vec::new(),
            h0,
            n0,
            nu,
        };
        model.enumerate_lines()?;
        Ok(model)
    }

    /// Totally singular lines: for each x, scan y > x with alpha(x,y) = 0 and
    /// keep line(x,y) when x is its smallest point.
    fn enumerate_lines(&mut self) -> Result<()> {
        let ctx = &self.ctx;
        let pts = &self.points;
        let index = &self.index;
        let per_x: Vec<Vec<Vec<u32>>> = (0..pts.len())
            .into_par_iter()
            .map(|xi| {
                let x = pts[xi];
                let mut covered = std::collections::HashSet::new();
                let mut found = Vec::new();
                for yi in xi + 1..pts.len() {
                    if covered.contains(&(yi as u32)) || !polar(ctx, x.coords(), pts[yi].coords()).is_zero() {
                        continue;
                    }
                    let lp = projgeom::line_points(ctx, &x, &pts[yi]).unwrap();
                    let mut ids: Vec<u32> = lp.iter().map(|p| index.get(p).expect("singular line leaves Q")).collect();
                    ids.sort_unstable();
                    covered.extend(ids.iter().copied());
                    if ids[0] == xi as u32 {
                        found.push(ids);
                    }
                }
                found
            })
            .collect();
        self.lines = per_x.into_iter().flatten().collect();
        self.lines.sort();
        let mut point_lines = vec![Vec::new(); self.points.len()];
        for (li, l) in self.lines.iter().enumerate() {
            for &p in l {
                point_lines[p as usize].push(li as u32);
            }
        }
        self.point_lines = point_lines;
        Ok(())
    }

    #[inline]
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.ctx.order()
    }

    #[inline]
    pub fn lambda(&self) -> FieldElement {
        self.lam
    }

    /// Points of Q in lexicographic order; positions are Q-indices.
    #[inline]
    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    #[inline]
    pub fn point(&self, i: u32) -> &ProjectivePoint {
        &self.points[i as usize]
    }

    #[inline]
    pub fn coords(&self, i: u32) -> &Vec6 {
        self.points[i as usize].coords()
    }

    pub fn index_of(&self, p: &ProjectivePoint) -> Option<u32> {
        self.index.get(p)
    }

    /// Q-index of the point represented by `v`, if it lies on Q.
    pub fn index_of_vec(&self, v: &Vec6) -> Option<u32> {
        normalize(&self.ctx, v).ok().and_then(|p| self.index.get(&p))
    }

    #[inline]
    pub fn in_h0(&self, i: u32) -> bool {
        self.in_h0[i as usize]
    }

    /// Q-indices of Q0, ascending.
    #[inline]
    pub fn q0(&self) -> &[u32] {
        &self.q0
    }

    /// Position of a Q0 point in [`Self::q0`], used as its bit index.
    #[inline]
    pub fn q0_slot(&self, i: u32) -> Option<u32> {
        let s = self.q0_slot[i as usize];
        (s != NONE).then_some(s)
    }

    /// Q-indices of Q minus Q0, ascending.
    #[inline]
    pub fn affine(&self) -> &[u32] {
        &self.affine
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn lines_on(&self, i: u32) -> &[u32] {
        &self.point_lines[i as usize]
    }

    pub fn line_in_q0(&self, l: u32) -> bool {
        self.lines[l as usize].iter().all(|&p| self.in_h0[p as usize])
    }

    pub fn h0(&self) -> &Subspace {
        &self.h0
    }

    pub fn n0(&self) -> &ProjectivePoint {
        &self.n0
    }

    #[inline]
    pub fn nu(&self, i: u32) -> u32 {
        self.nu[i as usize]
    }

    pub fn f_eval(&self, p: &ProjectivePoint) -> FieldElement {
        form(&self.ctx, self.lam, p.coords())
    }

    #[inline]
    pub fn f_vec(&self, v: &Vec6) -> FieldElement {
        form(&self.ctx, self.lam, v)
    }

    pub fn bilinear(&self, a: &ProjectivePoint, b: &ProjectivePoint) -> FieldElement {
        polar(&self.ctx, a.coords(), b.coords())
    }

    #[inline]
    pub fn alpha(&self, u: &Vec6, v: &Vec6) -> FieldElement {
        polar(&self.ctx, u, v)
    }

    /// Whether two Q-points are collinear in Q (perpendicular); a point is
    /// perpendicular to itself.
    #[inline]
    pub fn perp(&self, a: u32, b: u32) -> bool {
        polar(&self.ctx, self.coords(a), self.coords(b)).is_zero()
    }

    /// The line of Q joining two distinct collinear points.
    pub fn line_through(&self, a: u32, b: u32) -> Option<u32> {
        if a == b {
            return None;
        }
        let lb = &self.point_lines[b as usize];
        self.point_lines[a as usize].iter().copied().find(|l| lb.contains(l))
    }

    /// x^perp cap Q0 for x in Q \ Q0, as ascending Q-indices.
    pub fn perp_section(&self, x: u32) -> Result<Vec<u32>> {
        if self.in_h0(x) {
            return Err(Error::PointOnQ0(x));
        }
        let xc = self.coords(x);
        Ok(self.q0.iter().copied().filter(|&y| polar(&self.ctx, xc, self.coords(y)).is_zero()).collect())
    }

    /// Hyperplane perp of an arbitrary vector.
    pub fn perp_space(&self, vectors: &[Vec6]) -> Subspace {
        let rows: Vec<Vec6> = vectors.iter().map(polar_functional).collect();
        Subspace::from_vectors(&self.ctx, &projgeom::nullspace(&self.ctx, &rows))
    }

    /// Q-indices of the points of Q inside a subspace.
    pub fn q_points_in(&self, s: &Subspace) -> Vec<u32> {
        let mut v: Vec<u32> = s.points(&self.ctx).iter().filter_map(|p| self.index.get(p)).collect();
        v.sort_unstable();
        v
    }

    pub fn section_type(&self, s: &Subspace) -> Result<SectionType> {
        if s.rank() != 4 {
            return Err(Error::WrongRank {
                got: s.rank(),
                expected: 4,
            });
        }
        if !s.basis().iter().all(|v| self.h0.contains(&self.ctx, v)) {
            return Err(Error::NotInH0);
        }
        let q = self.q() as usize;
        let k = self.q_points_in(s).len();
        Ok(if k == q * q + 1 {
            SectionType::Elliptic
        } else if k == (q + 1) * (q + 1) {
            SectionType::Hyperbolic
        } else {
            SectionType::Cone
        })
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            n: self.ctx.n(),
            q: self.q(),
            modulus: format!("{:b}", self.ctx.modulus()),
            lambda: self.lam.0,
            points_q: self.points.len(),
            points_q0: self.q0.len(),
            points_affine: self.affine.len(),
            lines_q: self.lines.len(),
            lines_q0: (0..self.lines.len() as u32).filter(|&l| self.line_in_q0(l)).count(),
            n0: self.n0,
        }
    }
}

/// Builds the model with the default modulus and form parameter for `n`.
pub fn default_model(n: u32) -> Result<QuadricModel> {
    let ctx = FieldCtx::new(n)?;
    let lam = ctx.default_lambda();
    QuadricModel::build(ctx, lam)
}

pub fn pg5_minus_q(q: u64) -> u64 {
    q * q * (q * q * q + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeom::{unit, vec6, DIM};

    fn pt(ctx: &FieldCtx, b: [u16; DIM]) -> ProjectivePoint {
        normalize(ctx, &vec6(b)).unwrap()
    }

    #[test]
    fn form_examples() {
        let m = default_model(1).unwrap();
        let c = m.ctx();
        assert_eq!(m.f_eval(&pt(c, [1, 0, 0, 0, 0, 0])), FieldElement::ZERO);
        assert_eq!(m.f_eval(&pt(c, [0, 0, 0, 0, 1, 0])), FieldElement::ONE);
        assert_eq!(m.f_eval(&pt(c, [1, 1, 0, 0, 0, 0])), FieldElement::ONE);
        let e1 = pt(c, [1, 0, 0, 0, 0, 0]);
        let e2 = pt(c, [0, 1, 0, 0, 0, 0]);
        let e5 = pt(c, [0, 0, 0, 0, 1, 0]);
        let e6 = pt(c, [0, 0, 0, 0, 0, 1]);
        assert_eq!(m.bilinear(&e1, &e2), FieldElement::ONE);
        assert_eq!(m.bilinear(&e5, &e5), FieldElement::ZERO);
        assert_eq!(m.bilinear(&e5, &e6), FieldElement::ONE);
    }

    #[test]
    fn polar_is_polarization() {
        let ctx = FieldCtx::new(3).unwrap();
        let lam = ctx.default_lambda();
        let vs: Vec<Vec6> = pg5_points(&ctx).step_by(331).map(|p| *p.coords()).collect();
        for u in &vs {
            assert!(polar(&ctx, u, u).is_zero());
            for v in &vs {
                let lhs = form(&ctx, lam, &projgeom::add(u, v)) + form(&ctx, lam, u) + form(&ctx, lam, v);
                assert_eq!(lhs, polar(&ctx, u, v));
                assert_eq!(polar(&ctx, u, v), polar(&ctx, v, u));
            }
        }
    }

    #[test]
    fn trace_zero_lambda_rejected() {
        let ctx = FieldCtx::new(2).unwrap();
        assert!(matches!(QuadricModel::build(ctx, FieldElement(1)), Err(Error::TraceZeroLambda(1))));
        let ctx = FieldCtx::new(4).unwrap();
        let lam = ctx.default_lambda();
        assert!(matches!(QuadricModel::build(ctx, lam), Err(Error::ModelTooLarge { .. })));
    }

    fn check_counts(n: u32) -> QuadricModel {
        let m = default_model(n).unwrap();
        let q = m.q() as usize;
        assert_eq!(m.points().len(), (q + 1) * (q * q * q + 1));
        assert_eq!(m.q0().len(), (q + 1) * (q * q + 1));
        assert_eq!(m.lines().len(), (q * q + 1) * (q * q * q + 1));
        for (i, _) in m.points().iter().enumerate() {
            assert_eq!(m.lines_on(i as u32).len(), q * q + 1);
        }
        for l in m.lines() {
            assert_eq!(l.len(), q + 1);
        }
        m
    }

    #[test]
    fn counts_q2_q4() {
        let m = check_counts(1);
        assert_eq!((m.points().len(), m.q0().len(), m.lines().len()), (27, 15, 45));
        let m = check_counts(2);
        assert_eq!((m.points().len(), m.q0().len()), (325, 85));
    }

    #[test]
    fn nucleus_and_elation() {
        for n in 1..=2 {
            let m = default_model(n).unwrap();
            let c = m.ctx();
            assert_eq!(m.n0().coords(), &unit(4));
            assert!(!m.f_eval(m.n0()).is_zero());
            assert!(m.h0().contains_point(c, m.n0()));
            for i in 0..m.points().len() as u32 {
                let j = m.nu(i);
                assert_eq!(m.nu(j), i);
                assert_eq!(i == j, m.in_h0(i));
                // closed form for the default frame: x + x6 e5
                let x = m.coords(i);
                let mut y = *x;
                y[4] += x[5];
                assert_eq!(m.index_of_vec(&y), Some(j));
                if !m.in_h0(i) {
                    let l = projgeom::line_points(c, m.point(i), m.n0()).unwrap();
                    let on_q: Vec<u32> = l.iter().filter_map(|p| m.index_of(p)).collect();
                    let mut want = vec![i, j];
                    want.sort();
                    let mut got = on_q;
                    got.sort();
                    assert_eq!(got, want);
                }
            }
            // lines of H0 through n0 meet Q0 at most once
            for p in m.h0().points(c) {
                if &p == m.n0() {
                    continue;
                }
                let l = projgeom::line_points(c, m.n0(), &p).unwrap();
                assert!(l.iter().filter(|x| m.index_of(x).is_some()).count() <= 1);
            }
        }
    }

    #[test]
    fn perp_sections_are_ovoids() {
        for n in 1..=2 {
            let m = default_model(n).unwrap();
            let q = m.q() as usize;
            let q0_lines: Vec<&Vec<u32>> = (0..m.lines().len() as u32).filter(|&l| m.line_in_q0(l)).map(|l| &m.lines()[l as usize]).collect();
            assert_eq!(q0_lines.len(), (q + 1) * (q * q + 1));
            for &x in m.affine() {
                let s = m.perp_section(x).unwrap();
                assert_eq!(s.len(), q * q + 1);
                for l in &q0_lines {
                    assert_eq!(l.iter().filter(|p| s.binary_search(p).is_ok()).count(), 1);
                }
                let span = projgeom::span(m.ctx(), &s.iter().map(|&i| *m.point(i)).collect::<Vec<_>>());
                assert_eq!(span.rank(), 4);
                assert_eq!(m.section_type(&span).unwrap(), SectionType::Elliptic);
            }
            assert_eq!(m.perp_section(m.q0()[0]), Err(Error::PointOnQ0(m.q0()[0])));
        }
    }

    #[test]
    fn section_type_cone_and_errors() {
        let m = default_model(2).unwrap();
        let c = m.ctx();
        // e1, e3 on Q0; lines e1e3 and e1e4 are singular, plane spanned with e5...
        // the 3-space <e1,e3,e4,e5> contains p=e1 and the lines e1e3, e1e4
        let s = Subspace::from_vectors(c, &[unit(0), unit(2), unit(3), unit(4)]);
        assert_eq!(m.section_type(&s).unwrap(), SectionType::Cone);
        let s = Subspace::from_vectors(c, &[unit(0), unit(1), unit(2), unit(3)]);
        assert_eq!(m.section_type(&s).unwrap(), SectionType::Hyperbolic);
        let s = Subspace::from_vectors(c, &[unit(0), unit(1), unit(2), unit(5)]);
        assert_eq!(m.section_type(&s), Err(Error::NotInH0));
        let s = Subspace::from_vectors(c, &[unit(0), unit(1)]);
        assert!(matches!(m.section_type(&s), Err(Error::WrongRank { .. })));
    }

    #[test]
    fn gq_axiom_exhaustive_small() {
        for n in 1..=2 {
            let m = default_model(n).unwrap();
            for (li, l) in m.lines().iter().enumerate() {
                for x in 0..m.points().len() as u32 {
                    if l.contains(&x) {
                        continue;
                    }
                    let k = l.iter().filter(|&&y| m.perp(x, y)).count();
                    assert_eq!(k, 1, "line {li} point {x}");
                }
            }
        }
    }

    #[test]
    fn summary_serializes() {
        let m = default_model(1).unwrap();
        let s = serde_json::to_value(m.summary()).unwrap();
        assert_eq!(s["points_q"], 27);
        assert_eq!(s["lines_q0"], 15);
        assert_eq!(s["n0"], serde_json::json!([0, 0, 0, 0, 1, 0]));
    }
}
