//! F2-representatives of centric figures, subset-sum spans, and recognition
//! of the small quadrics Q+(3,2), Q(4,2) and Q-(5,2) inside Q.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::figures::{CentricFigure, FigureKind};
use crate::gf2n::FieldElement;
use crate::projgeom::{self, add, bits_of, normalize, same_point, scale, ProjectivePoint, Vec6};
use crate::quadric::QuadricModel;

/// Representatives of a figure with rep(x1) + rep(x2) = rep(center) for
/// every opposite pair, in pair order `[x1, x2]`. The center representative
/// is its normalized coordinate vector.
pub fn scale_figure_representatives(model: &QuadricModel, fig: &CentricFigure) -> Result<Vec<[Vec6; 2]>> {
    let fig = CentricFigure::new(model, fig.pairs.clone(), fig.center)?;
    let ctx = model.ctx();
    let c = fig.center.coords();
    let mut out = Vec::with_capacity(fig.pairs.len());
    for p in &fig.pairs {
        let (x, y) = (model.coords(p[0]), model.coords(p[1]));
        let (i, j, det) = (0..6)
            .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, ctx.mul(x[i], y[j]) + ctx.mul(x[j], y[i])))
            .find(|t| !t.2.is_zero())
            .ok_or_else(|| Error::Invariant("opposite points coincide".into()))?;
        let a = ctx.div(ctx.mul(c[i], y[j]) + ctx.mul(c[j], y[i]), det).unwrap();
        let b = ctx.div(ctx.mul(x[i], c[j]) + ctx.mul(x[j], c[i]), det).unwrap();
        let (rx, ry) = (scale(ctx, a, x), scale(ctx, b, y));
        if add(&rx, &ry) != *c {
            return Err(Error::Invariant(format!("center is not on the line of pair {p:?}")));
        }
        out.push([rx, ry]);
    }
    Ok(out)
}

/// Points of the figure's F2-closure off the figure: the intersections of
/// the two edge lines joining each two pairs, and for a cube the sum of a
/// face. Each is located geometrically and then given the representative
/// that is the sum of its edge endpoints.
pub fn derived_points(model: &QuadricModel, fig: &CentricFigure, reps: &[[Vec6; 2]]) -> Result<Vec<Vec6>> {
    let ctx = model.ctx();
    let m = fig.pairs.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let p = projgeom::line_intersection(ctx, model.coords(fig.pairs[i][0]), model.coords(fig.pairs[j][1]), model.coords(fig.pairs[i][1]), model.coords(fig.pairs[j][0]))
                .ok_or_else(|| Error::Invariant(format!("edge lines of pairs {i}, {j} are skew")))?;
            let s = add(&reps[i][0], &reps[j][1]);
            if !same_point(ctx, &s, p.coords()) || s != add(&reps[i][1], &reps[j][0]) {
                return Err(Error::InconsistentScaling(bits_of(&s).to_vec()));
            }
            out.push(s);
        }
    }
    if fig.kind == FigureKind::Cube {
        let face = add(&add(&reps[0][0], &reps[1][1]), &add(&reps[2][0], &reps[3][1]));
        if projgeom::is_zero(&face) {
            return Err(Error::Invariant("face sum vanishes".into()));
        }
        out.push(face);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F2Span {
    pub basis: Vec<Vec6>,
    /// Normalized points of all nonzero subset sums, sorted.
    pub points: Vec<ProjectivePoint>,
    /// Q-indices of the points lying on Q, sorted.
    pub quadric_points: Vec<u32>,
}

impl F2Span {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_point(&self, p: &ProjectivePoint) -> bool {
        self.points.binary_search(p).is_ok()
    }
}

/// Greedy subset-sum basis of the input. A vector that is not a subset sum
/// of the current basis but is GF(q)-dependent on it does not fit any
/// F2-structure and is reported.
pub fn f2_closure(model: &QuadricModel, vectors: &[Vec6]) -> Result<F2Span> {
    let ctx = model.ctx();
    let mut basis: Vec<Vec6> = Vec::new();
    let mut sums: Vec<Vec6> = vec![[FieldElement::ZERO; 6]];
    let mut seen: HashSet<Vec6> = sums.iter().copied().collect();
    for v in vectors {
        if seen.contains(v) {
            continue;
        }
        let mut rows = basis.clone();
        rows.push(*v);
        if projgeom::rank(ctx, &rows) != rows.len() {
            return Err(Error::InconsistentScaling(bits_of(v).to_vec()));
        }
        let shifted: Vec<Vec6> = sums.iter().map(|s| add(s, v)).collect();
        seen.extend(shifted.iter().copied());
        sums.extend(shifted);
        basis.push(*v);
    }
    if basis.is_empty() {
        return Err(Error::ZeroVector);
    }
    let points: BTreeSet<ProjectivePoint> = sums[1..].iter().map(|s| normalize(ctx, s).unwrap()).collect();
    if points.len() != sums.len() - 1 {
        return Err(Error::Invariant("subset sums are not projectively distinct".into()));
    }
    let points: Vec<ProjectivePoint> = points.into_iter().collect();
    let mut quadric_points: Vec<u32> = points.iter().filter_map(|p| model.index_of(p)).collect();
    quadric_points.sort_unstable();
    Ok(F2Span { basis, points, quadric_points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubgeometryType {
    Qplus32,
    Q42,
    Qminus52,
    None,
}

impl SubgeometryType {
    /// (points, lines, lines per point) of the generalized quadrangle.
    fn shape(self) -> Option<(usize, usize, usize)> {
        match self {
            SubgeometryType::Qplus32 => Some((9, 6, 2)),
            SubgeometryType::Q42 => Some((15, 15, 3)),
            SubgeometryType::Qminus52 => Some((27, 45, 5)),
            SubgeometryType::None => None,
        }
    }

    pub fn expected_for(kind: FigureKind) -> SubgeometryType {
        match kind {
            FigureKind::Hexagon => SubgeometryType::Qplus32,
            FigureKind::Cube => SubgeometryType::Q42,
            FigureKind::Decade | FigureKind::Dodecade => SubgeometryType::Qminus52,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgeometryReport {
    pub type_tag: SubgeometryType,
    pub rank: usize,
    pub span_points: usize,
    pub point_count: usize,
    pub line_count: usize,
    /// Every induced line carries exactly three points.
    pub lines_full: bool,
    /// Number of induced lines through each point, when constant.
    pub lines_per_point: Option<usize>,
    pub gq_axiom: bool,
    pub contains_n0: bool,
    pub contains_center: bool,
}

/// Induced incidence structure of the span's quadric points.
pub fn recognize_subgeometry(model: &QuadricModel, span: &F2Span, center: &ProjectivePoint) -> SubgeometryReport {
    let pts = &span.quadric_points;
    let in_set = |x: u32| pts.binary_search(&x).is_ok();
    let mut lines: BTreeSet<u32> = BTreeSet::new();
    for (k, &a) in pts.iter().enumerate() {
        for &b in &pts[k + 1..] {
            if let Some(l) = model.line_through(a, b) {
                lines.insert(l);
            }
        }
    }
    let line_sets: Vec<Vec<u32>> = lines.iter().map(|&l| model.lines()[l as usize].iter().copied().filter(|&x| in_set(x)).collect()).collect();
    let lines_full = line_sets.iter().all(|l| l.len() == 3);
    let degrees: BTreeSet<usize> = pts.iter().map(|x| line_sets.iter().filter(|l| l.contains(x)).count()).collect();
    let lines_per_point = if degrees.len() == 1 { degrees.first().copied() } else { None };
    let gq_axiom = !line_sets.is_empty()
        && line_sets.iter().all(|l| pts.iter().filter(|x| !l.contains(x)).all(|&x| l.iter().filter(|&&y| model.perp(x, y)).count() == 1));
    let shape = (pts.len(), line_sets.len(), lines_per_point.unwrap_or(0));
    let type_tag = [SubgeometryType::Qplus32, SubgeometryType::Q42, SubgeometryType::Qminus52]
        .into_iter()
        .find(|t| t.shape() == Some(shape) && lines_full && gq_axiom)
        .unwrap_or(SubgeometryType::None);
    SubgeometryReport {
        type_tag,
        rank: span.rank(),
        span_points: span.points.len(),
        point_count: pts.len(),
        line_count: line_sets.len(),
        lines_full,
        lines_per_point,
        gq_axiom,
        contains_n0: span.contains_point(model.n0()),
        contains_center: span.contains_point(center),
    }
}

/// Radical of the polar form restricted to the GF(q)-span of the basis.
pub fn radical(model: &QuadricModel, basis: &[Vec6]) -> Vec<ProjectivePoint> {
    let ctx = model.ctx();
    let k = basis.len();
    let mut rows: Vec<Vec6> = basis
        .iter()
        .map(|bi| {
            let mut r = [FieldElement::ZERO; 6];
            for (j, bj) in basis.iter().enumerate() {
                r[j] = model.alpha(bi, bj);
            }
            r
        })
        .collect();
    rows.extend((k..6).map(projgeom::unit));
    projgeom::nullspace(ctx, &rows)
        .iter()
        .map(|c| {
            let v = (0..k).fold([FieldElement::ZERO; 6], |acc, i| add(&acc, &scale(ctx, c[i], &basis[i])));
            normalize(ctx, &v).unwrap()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureSubgeometry {
    pub kind: FigureKind,
    pub expected: SubgeometryType,
    pub report: SubgeometryReport,
    pub basis: Vec<[u16; 6]>,
    /// The figure is exactly the span's quadric points off center^perp.
    pub figure_is_complement: bool,
    /// The figure lies among them; a decade lies in a 12-point complement.
    pub figure_in_complement: bool,
    pub complement_size: usize,
    /// Nucleus of the span, when the span has odd rank.
    pub nucleus: Option<ProjectivePoint>,
    pub derived_on_quadric: bool,
}

impl FigureSubgeometry {
    pub fn pass(&self) -> bool {
        let nucleus_ok = match self.kind {
            FigureKind::Cube => self.nucleus.is_some(),
            _ => true,
        };
        let shape_ok = match self.kind {
            FigureKind::Decade => self.figure_in_complement && self.complement_size == 12,
            _ => self.figure_is_complement,
        };
        self.report.type_tag == self.expected && shape_ok && self.report.contains_center && self.derived_on_quadric && nucleus_ok
    }
}

/// Representatives, closure with derived points, and recognition.
pub fn figure_subgeometry(model: &QuadricModel, fig: &CentricFigure) -> Result<FigureSubgeometry> {
    let reps = scale_figure_representatives(model, fig)?;
    let derived = derived_points(model, fig, &reps)?;
    let derived_on_quadric = derived.iter().all(|d| model.index_of_vec(d).is_some_and(|i| model.alpha(model.coords(i), fig.center.coords()).is_zero()));
    let mut vectors: Vec<Vec6> = reps.iter().flatten().copied().collect();
    vectors.extend(derived);
    let span = f2_closure(model, &vectors)?;
    let report = recognize_subgeometry(model, &span, &fig.center);
    let c = fig.center.coords();
    let off_perp: Vec<u32> = span.quadric_points.iter().copied().filter(|&x| !model.alpha(model.coords(x), c).is_zero()).collect();
    let nucleus = if span.rank() % 2 == 1 {
        match radical(model, &span.basis)[..] {
            [p] => Some(p),
            _ => None,
        }
    } else {
        None
    };
    Ok(FigureSubgeometry {
        kind: fig.kind,
        expected: SubgeometryType::expected_for(fig.kind),
        basis: span.basis.iter().map(bits_of).collect(),
        figure_is_complement: off_perp == fig.points(),
        figure_in_complement: fig.points().iter().all(|x| off_perp.binary_search(x).is_ok()),
        complement_size: off_perp.len(),
        nucleus,
        derived_on_quadric,
        report,
    })
}

// ---------------------------------------------------------------------------
// counting identities

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub n: u32,
    pub q: String,
    pub n3: String,
    pub n4: String,
    pub n5: Option<String>,
    pub n6: Option<String>,
    pub n6_bar: Option<String>,
    pub subgeometries: Option<String>,
    pub divisions_exact: bool,
    pub n4_from_n3: bool,
    pub n5_from_n4: Option<bool>,
    pub n6_from_n4: Option<bool>,
    pub n6_bar_from_n6: Option<bool>,
    pub subgeometries_times_36: Option<bool>,
}

impl IdentityRow {
    pub fn pass(&self) -> bool {
        let opt = |b: Option<bool>| b.unwrap_or(true);
        self.divisions_exact && self.n4_from_n3 && opt(self.n5_from_n4) && opt(self.n6_from_n4) && opt(self.n6_bar_from_n6) && opt(self.subgeometries_times_36)
    }
}

fn exact_div(a: BigUint, d: u64, ok: &mut bool) -> BigUint {
    let d = BigUint::from(d);
    if &a % &d != BigUint::from(0u32) {
        *ok = false;
    }
    a / d
}

/// Evaluates each closed form separately and compares them with exact
/// integers.
pub fn identity_row(n: u32) -> IdentityRow {
    let one = BigUint::from(1u32);
    let q = BigUint::from(1u64) << n;
    let q2m1 = q.pow(2) - &one;
    let q4m1 = q.pow(4) - &one;
    let mut exact = true;
    let n3 = exact_div(&q4m1 * (&q - &one) * q.pow(4), 12, &mut exact);
    let n4 = exact_div(&q4m1 * &q2m1 * q.pow(4), 48, &mut exact);
    let n4_from_n3 = exact_div(&n3 * (&q + &one), 4, &mut exact) == n4;
    let mut row = IdentityRow {
        n,
        q: q.to_string(),
        n3: n3.to_string(),
        n4: n4.to_string(),
        n5: None,
        n6: None,
        n6_bar: None,
        subgeometries: None,
        divisions_exact: true,
        n4_from_n3,
        n5_from_n4: None,
        n6_from_n4: None,
        n6_bar_from_n6: None,
        subgeometries_times_36: None,
    };
    if n % 2 == 1 {
        let n5 = exact_div(&q4m1 * &q2m1 * q.pow(4), 15 * 8, &mut exact);
        let n6 = exact_div(&q4m1 * &q2m1 * q.pow(4), 15 * 48, &mut exact);
        row.n5_from_n4 = Some(exact_div(&n4 * 2u32, 5, &mut exact) == n5);
        row.n6_from_n4 = Some(exact_div(n4.clone(), 15, &mut exact) == n6);
        let q3p1 = q.pow(3) + &one;
        let off_q = exact_div(q.pow(6) - &one, (1u64 << n) - 1, &mut exact) - &q3p1 * (&q + &one);
        let n6_bar = exact_div(&q3p1 * &q4m1 * &q2m1 * q.pow(6), 48 * 15, &mut exact);
        row.n6_bar_from_n6 = Some(&n6 * &off_q == n6_bar);
        let subs = exact_div(&q3p1 * (q.pow(2) + &one) * (&q + &one).pow(2) * q.pow(6) * (&q - &one).pow(2), 9 * 5 * 9 * 64, &mut exact);
        row.subgeometries_times_36 = Some(&subs * 36u32 == n6_bar);
        row.n5 = Some(n5.to_string());
        row.n6 = Some(n6.to_string());
        row.n6_bar = Some(n6_bar.to_string());
        row.subgeometries = Some(subs.to_string());
    }
    row.divisions_exact = exact;
    row
}

pub fn count_identities(ns: impl IntoIterator<Item = u32>) -> Vec<IdentityRow> {
    ns.into_iter().map(identity_row).collect()
}
