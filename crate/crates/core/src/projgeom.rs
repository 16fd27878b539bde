//! Points and subspaces of PG(5,q).

use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, FieldElement};

pub const DIM: usize = 6;

pub type Vec6 = [FieldElement; DIM];

pub const ZERO6: Vec6 = [FieldElement::ZERO; DIM];

pub fn unit(i: usize) -> Vec6 {
    let mut v = ZERO6;
    v[i] = FieldElement::ONE;
    v
}

pub fn vec6(bits: [u16; DIM]) -> Vec6 {
    bits.map(FieldElement)
}

#[inline]
pub fn is_zero(v: &Vec6) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[inline]
pub fn add(a: &Vec6, b: &Vec6) -> Vec6 {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn scale(ctx: &FieldCtx, c: FieldElement, v: &Vec6) -> Vec6 {
    std::array::from_fn(|i| ctx.mul(c, v[i]))
}

pub fn bits_of(v: &Vec6) -> [u16; DIM] {
    v.map(|x| x.0)
}

/// A projective point, stored by its representative with leading
/// coordinate 1. Ordering is lexicographic on coordinate bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint {
    coords: Vec6,
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        bits_of(&self.coords).serialize(s)
    }
}

impl ProjectivePoint {
    #[inline]
    pub fn coords(&self) -> &Vec6 {
        &self.coords
    }
}

pub fn normalize(ctx: &FieldCtx, raw: &Vec6) -> Result<ProjectivePoint> {
    let lead = raw.iter().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let inv = ctx.inv(*lead).unwrap();
    Ok(ProjectivePoint {
        coords: scale(ctx, inv, raw),
    })
}

/// Whether two nonzero vectors represent the same projective point.
pub fn same_point(ctx: &FieldCtx, a: &Vec6, b: &Vec6) -> bool {
    match (normalize(ctx, a), normalize(ctx, b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// The q+1 points of the line through `a` and `b`.
pub fn line_points(ctx: &FieldCtx, a: &ProjectivePoint, b: &ProjectivePoint) -> Result<Vec<ProjectivePoint>> {
    if a == b {
        return Err(Error::DegenerateLine);
    }
    let mut out = Vec::with_capacity(ctx.order() as usize + 1);
    out.push(*b);
    for t in ctx.elements() {
        let v = add(a.coords(), &scale(ctx, t, b.coords()));
        out.push(normalize(ctx, &v)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Reduced row-echelon form of `rows`, zero rows dropped.
pub fn rref(ctx: &FieldCtx, rows: &[Vec6]) -> Vec<Vec6> {
    let mut m: Vec<Vec6> = rows.to_vec();
    let mut r = 0;
    for col in 0..DIM {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = ctx.inv(m[r][col]).unwrap();
        m[r] = scale(ctx, inv, &m[r]);
        let pivot = m[r];
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col];
                m[i] = add(&m[i], &scale(ctx, f, &pivot));
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

pub fn rank(ctx: &FieldCtx, rows: &[Vec6]) -> usize {
    rref(ctx, rows).len()
}

/// Basis of {x : <row, x> = 0 for every row} under the standard dot product.
pub fn nullspace(ctx: &FieldCtx, rows: &[Vec6]) -> Vec<Vec6> {
    let e = rref(ctx, rows);
    let mut pivots = Vec::with_capacity(e.len());
    for row in &e {
        pivots.push(row.iter().position(|x| !x.is_zero()).unwrap());
    }
    let mut out = Vec::new();
    for free in (0..DIM).filter(|c| !pivots.contains(c)) {
        let mut v = ZERO6;
        v[free] = FieldElement::ONE;
        for (row, &pc) in e.iter().zip(&pivots) {
            // char 2: x_pc = sum over free columns of row[free] * x_free
            v[pc] = row[free];
        }
        out.push(v);
    }
    out
}

/// A linear subspace of V(6,q) (projective subspace of PG(5,q)), kept in
/// reduced row-echelon form so equality is basis equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: Vec<Vec6>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<[u16; DIM]> = self.basis.iter().map(bits_of).collect();
        rows.serialize(s)
    }
}

impl Subspace {
    pub fn from_vectors(ctx: &FieldCtx, vectors: &[Vec6]) -> Subspace {
        Subspace {
            basis: rref(ctx, vectors),
        }
    }

    pub fn basis(&self) -> &[Vec6] {
        &self.basis
    }

    /// Vector-space rank (projective dimension + 1).
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, ctx: &FieldCtx, v: &Vec6) -> bool {
        // reduce v against the echelon basis
        let mut w = *v;
        for row in &self.basis {
            let pc = row.iter().position(|x| !x.is_zero()).unwrap();
            if !w[pc].is_zero() {
                let f = w[pc];
                w = add(&w, &scale(ctx, f, row));
            }
        }
        is_zero(&w)
    }

    pub fn contains_point(&self, ctx: &FieldCtx, p: &ProjectivePoint) -> bool {
        self.contains(ctx, p.coords())
    }

    pub fn intersect(&self, ctx: &FieldCtx, other: &Subspace) -> Subspace {
        let mut ann = nullspace(ctx, &self.basis);
        ann.extend(nullspace(ctx, &other.basis));
        Subspace::from_vectors(ctx, &nullspace(ctx, &ann))
    }

    pub fn join(&self, ctx: &FieldCtx, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend_from_slice(&other.basis);
        Subspace::from_vectors(ctx, &rows)
    }

    /// All projective points of the subspace, sorted. Size (q^r - 1)/(q - 1).
    pub fn points(&self, ctx: &FieldCtx) -> Vec<ProjectivePoint> {
        let r = self.basis.len();
        let q = ctx.order() as u64;
        let mut out = Vec::new();
        let total = q.pow(r as u32);
        for code in 1..total {
            let mut v = ZERO6;
            let mut c = code;
            for row in &self.basis {
                let coef = FieldElement((c % q) as u16);
                c /= q;
                v = add(&v, &scale(ctx, coef, row));
            }
            let p = normalize(ctx, &v).unwrap();
            out.push(p);
        }
        out.sort();
        out.dedup();
        out
    }
}

pub fn span(ctx: &FieldCtx, points: &[ProjectivePoint]) -> Subspace {
    let rows: Vec<Vec6> = points.iter().map(|p| *p.coords()).collect();
    Subspace::from_vectors(ctx, &rows)
}

/// The common point of lines ab and cd, if the lines are distinct and meet.
pub fn line_intersection(ctx: &FieldCtx, a: &Vec6, b: &Vec6, c: &Vec6, d: &Vec6) -> Option<ProjectivePoint> {
    let l = Subspace::from_vectors(ctx, &[*a, *b]);
    let m = Subspace::from_vectors(ctx, &[*c, *d]);
    let i = l.intersect(ctx, &m);
    if i.rank() == 1 {
        normalize(ctx, &i.basis[0]).ok()
    } else {
        None
    }
}

/// Number of points of PG(5,q).
pub fn pg5_size(q: u64) -> u64 {
    (q.pow(6) - 1) / (q - 1)
}

/// Every point of PG(5,q) in lexicographic order of coordinate masks.
pub fn pg5_points(ctx: &FieldCtx) -> impl Iterator<Item = ProjectivePoint> + '_ {
    let q = ctx.order() as u64;
    (0..DIM).rev().flat_map(move |lead| {
        let free = DIM - 1 - lead;
        (0..q.pow(free as u32)).map(move |code| {
            let mut v = ZERO6;
            v[lead] = FieldElement::ONE;
            let mut c = code;
            for i in (lead + 1..DIM).rev() {
                v[i] = FieldElement((c % q) as u16);
                c /= q;
            }
            ProjectivePoint { coords: v }
        })
    })
}

/// Packs normalized coordinates into a u64 key (n <= 10).
#[inline]
pub fn pack(n: u32, v: &Vec6) -> u64 {
    v.iter().fold(0u64, |acc, x| (acc << n) | x.0 as u64)
}

/// Maps normalized points to dense indices.
#[derive(Clone, Debug)]
pub enum PointIndex {
    // direct table over packed keys, used when 6n <= 24
    Dense { n: u32, table: Vec<u32> },
    Sparse { n: u32, map: HashMap<u64, u32> },
}

impl PointIndex {
    pub fn new<'a>(n: u32, points: impl Iterator<Item = &'a ProjectivePoint>) -> PointIndex {
        if 6 * n <= 24 {
            let mut table = vec![u32::MAX; 1usize << (6 * n)];
            for (i, p) in points.enumerate() {
                table[pack(n, p.coords()) as usize] = i as u32;
            }
            PointIndex::Dense { n, table }
        } else {
            let map = points.enumerate().map(|(i, p)| (pack(n, p.coords()), i as u32)).collect();
            PointIndex::Sparse { n, map }
        }
    }

    #[inline]
    pub fn get(&self, p: &ProjectivePoint) -> Option<u32> {
        match self {
            PointIndex::Dense { n, table } => {
                let i = table[pack(*n, p.coords()) as usize];
                (i != u32::MAX).then_some(i)
            }
            PointIndex::Sparse { n, map } => map.get(&pack(*n, p.coords())).copied(),
        }
    }
}
