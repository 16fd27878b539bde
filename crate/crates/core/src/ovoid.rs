//! Elliptic ovoids of Q0, rosettes with their tangent planes, and the
//! geometry X whose points are the ovoids and whose lines are the rosettes.

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::projgeom::{self, Subspace};
use crate::quadric::QuadricModel;

#[derive(Clone, Debug)]
pub struct Ovoid {
    pub id: u32,
    /// Smaller Q-index of the defining nu-orbit.
    pub rep: u32,
    /// The other point of the orbit.
    pub partner: u32,
    /// Q-indices, ascending.
    pub points: Vec<u32>,
    /// Membership over Q0 slots.
    pub bits: BitSet,
    pub span: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Tangent(u32),
    Conic(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rosette {
    pub id: u32,
    /// Q-index of the base point.
    pub base: u32,
    /// Ovoid ids, ascending; exactly q of them.
    pub members: Vec<u32>,
    pub tangent_plane: Subspace,
}

pub struct GeometryX {
    pub ovoids: Vec<Ovoid>,
    pub rosettes: Vec<Rosette>,
    /// For ovoid `o`, `incidence[o][k]` is the rosette through `o` based at
    /// `ovoids[o].points[k]`.
    pub incidence: Vec<Vec<u32>>,
    /// Ovoid ids through each Q0 slot.
    pub ovoids_at: Vec<Vec<u32>>,
    /// Rosette ids based at each Q0 slot.
    pub rosettes_at: Vec<Vec<u32>>,
    /// Ovoid id for each Q-index of Q \ Q0 (u32::MAX on Q0).
    pub ovoid_of_point: Vec<u32>,
}

fn q0_bits(model: &QuadricModel, pts: &[u32]) -> BitSet {
    BitSet::from_indices(model.q0().len(), pts.iter().map(|&p| model.q0_slot(p).unwrap() as usize))
}

/// One ovoid x^perp cap Q0 per nu-orbit {x, nu(x)} of Q \ Q0, in order of
/// the smaller orbit point.
pub fn enumerate_ovoids(model: &QuadricModel) -> Vec<Ovoid> {
    let reps: Vec<u32> = model.affine().iter().copied().filter(|&x| x < model.nu(x)).collect();
    reps.par_iter()
        .enumerate()
        .map(|(id, &x)| {
            let points = model.perp_section(x).unwrap();
            let pp: Vec<_> = points.iter().map(|&i| *model.point(i)).collect();
            Ovoid {
                id: id as u32,
                rep: x,
                partner: model.nu(x),
                bits: q0_bits(model, &points),
                span: projgeom::span(model.ctx(), &pp),
                points,
            }
        })
        .collect()
}

/// Every 3-space of H0 meeting Q0 in q^2+1 points, found by scanning all
/// hyperplanes of H0. Returned as sorted Q-index sets, sorted.
pub fn elliptic_sections_bruteforce(model: &QuadricModel) -> Vec<Vec<u32>> {
    let ctx = model.ctx();
    let q = model.q() as usize;
    // hyperplanes of H0 are given by nonzero functionals on x1..x5
    let functionals: Vec<_> = projgeom::pg5_points(ctx).filter(|p| p.coords()[0].is_zero()).collect();
    let mut out: Vec<Vec<u32>> = functionals
        .par_iter()
        .filter_map(|h| {
            let c = h.coords();
            let pts: Vec<u32> = model
                .q0()
                .iter()
                .copied()
                .filter(|&i| {
                    let x = model.coords(i);
                    (0..5).fold(crate::FieldElement::ZERO, |acc, k| acc + ctx.mul(c[k + 1], x[k])).is_zero()
                })
                .collect();
            (pts.len() == q * q + 1).then_some(pts)
        })
        .collect();
    out.sort();
    out
}

pub fn intersection_kind(model: &QuadricModel, a: &Ovoid, b: &Ovoid) -> Result<Intersection> {
    if a.id == b.id {
        return Err(Error::SameOvoid(a.id, b.id));
    }
    let common = a.bits.and(&b.bits);
    let k = common.count();
    let q = model.q() as usize;
    let pts: Vec<u32> = common.iter().map(|s| model.q0()[s]).collect();
    if k == 1 {
        Ok(Intersection::Tangent(pts[0]))
    } else if k == q + 1 {
        Ok(Intersection::Conic(pts))
    } else {
        Err(Error::BadIntersection(a.id, b.id, k))
    }
}

/// Q0 points not collinear with `p`, as Q0 slots.
pub fn non_collinear_slots(model: &QuadricModel, p: u32) -> BitSet {
    BitSet::from_indices(
        model.q0().len(),
        model.q0().iter().enumerate().filter(|(_, &y)| !model.perp(p, y)).map(|(s, _)| s),
    )
}

/// The rosette through two ovoids tangent at a point p: all ovoids through
/// p meeting both in {p}, together with the pair. The partition of the
/// points not collinear with p is verified.
pub fn rosette_from_pair(model: &QuadricModel, ovoids: &[Ovoid], ovoids_at_p: &[u32], a: u32, b: u32) -> Result<Rosette> {
    let (oa, ob) = (&ovoids[a as usize], &ovoids[b as usize]);
    let p = match intersection_kind(model, oa, ob)? {
        Intersection::Tangent(p) => p,
        Intersection::Conic(_) => return Err(Error::NotTangent(a, b)),
    };
    let mut members = vec![a, b];
    for &y in ovoids_at_p {
        if y == a || y == b {
            continue;
        }
        let oy = &ovoids[y as usize];
        if oy.bits.and_count(&oa.bits) == 1 && oy.bits.and_count(&ob.bits) == 1 {
            members.push(y);
        }
    }
    members.sort_unstable();
    let q = model.q() as usize;
    if members.len() != q {
        return Err(Error::Invariant(format!("rosette at {p} has {} members", members.len())));
    }
    // deleted members partition the points not collinear with p
    let target = non_collinear_slots(model, p);
    let ps = model.q0_slot(p).unwrap() as usize;
    let mut union = BitSet::new(model.q0().len());
    let mut total = 0;
    for &m in &members {
        let mut d = ovoids[m as usize].bits.clone();
        d.remove(ps);
        total += d.count();
        union.or_assign(&d);
    }
    if union != target || total != target.count() {
        return Err(Error::Invariant(format!("rosette at {p} is not a partition")));
    }
    let tangent_plane = tangent_plane_of(model, ovoids, &members)?;
    Ok(Rosette {
        id: 0,
        base: p,
        members,
        tangent_plane,
    })
}

fn tangent_plane_of(model: &QuadricModel, ovoids: &[Ovoid], members: &[u32]) -> Result<Subspace> {
    let a = &ovoids[members[0] as usize].span;
    let b = &ovoids[members[1] as usize].span;
    let plane = a.intersect(model.ctx(), b);
    if plane.rank() != 3 {
        return Err(Error::WrongRank {
            got: plane.rank(),
            expected: 3,
        });
    }
    Ok(plane)
}

/// The plane <X_i> cap <X_j> for two chosen members of a rosette.
pub fn tangent_plane(model: &QuadricModel, gx: &GeometryX, r: &Rosette, i: usize, j: usize) -> Result<Subspace> {
    tangent_plane_of(model, &gx.ovoids, &[r.members[i], r.members[j]])
}

impl GeometryX {
    pub fn build(model: &QuadricModel) -> Result<GeometryX> {
        let ovoids = enumerate_ovoids(model);
        let nq0 = model.q0().len();
        let mut ovoids_at = vec![Vec::new(); nq0];
        for o in &ovoids {
            for s in o.bits.iter() {
                ovoids_at[s].push(o.id);
            }
        }
        let mut ovoid_of_point = vec![u32::MAX; model.points().len()];
        for o in &ovoids {
            ovoid_of_point[o.rep as usize] = o.id;
            ovoid_of_point[o.partner as usize] = o.id;
        }

        let per_slot: Vec<Vec<Rosette>> = (0..nq0)
            .into_par_iter()
            .map(|s| {
                let p = model.q0()[s];
                let at = &ovoids_at[s];
                let mut assigned = vec![false; at.len()];
                let mut found = Vec::new();
                for i in 0..at.len() {
                    if assigned[i] {
                        continue;
                    }
                    let x = &ovoids[at[i] as usize];
                    let partner = at.iter().copied().find(|&y| y != x.id && ovoids[y as usize].bits.and_count(&x.bits) == 1);
                    let Some(y) = partner else {
                        return Err(Error::Invariant(format!("ovoid {} has no tangent mate at {p}", x.id)));
                    };
                    let r = rosette_from_pair(model, &ovoids, at, x.id, y)?;
                    for m in &r.members {
                        let k = at.iter().position(|t| t == m).unwrap();
                        if assigned[k] {
                            return Err(Error::Invariant(format!("rosettes at {p} overlap")));
                        }
                        assigned[k] = true;
                    }
                    found.push(r);
                }
                Ok(found)
            })
            .collect::<Result<_>>()?;

        let mut rosettes = Vec::new();
        let mut rosettes_at = vec![Vec::new(); nq0];
        for (s, rs) in per_slot.into_iter().enumerate() {
            for mut r in rs {
                r.id = rosettes.len() as u32;
                rosettes_at[s].push(r.id);
                rosettes.push(r);
            }
        }
        let mut incidence: Vec<Vec<u32>> = ovoids.iter().map(|o| vec![u32::MAX; o.points.len()]).collect();
        for r in &rosettes {
            for &m in &r.members {
                let o = &ovoids[m as usize];
                let k = o.points.binary_search(&r.base).unwrap();
                incidence[m as usize][k] = r.id;
            }
        }
        Ok(GeometryX {
            ovoids,
            rosettes,
            incidence,
            ovoids_at,
            rosettes_at,
            ovoid_of_point,
        })
    }

    pub fn ovoid(&self, id: u32) -> Result<&Ovoid> {
        self.ovoids.get(id as usize).ok_or(Error::UnknownOvoid(id))
    }

    /// The rosette through `o` based at the Q0 point `p`.
    pub fn rosette_at(&self, o: u32, p: u32) -> Option<u32> {
        let ov = &self.ovoids[o as usize];
        ov.points.binary_search(&p).ok().map(|k| self.incidence[o as usize][k])
    }

    /// Ovoids through Q0 point `x` tangent to both `a` and `b`.
    pub fn common_tangent_through(&self, model: &QuadricModel, a: u32, b: u32, x: u32) -> Vec<u32> {
        let s = model.q0_slot(x).unwrap() as usize;
        let (ba, bb) = (&self.ovoids[a as usize].bits, &self.ovoids[b as usize].bits);
        self.ovoids_at[s]
            .iter()
            .copied()
            .filter(|&y| y != a && y != b)
            .filter(|&y| {
                let by = &self.ovoids[y as usize].bits;
                by.and_count(ba) == 1 && by.and_count(bb) == 1
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SemipartialReport {
    pub s_plus_1: usize,
    pub t_plus_1: usize,
    pub line_sizes_ok: bool,
    pub point_degrees_ok: bool,
    pub pairs_checked: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    /// Histogram of tangent members seen on non-incident (ovoid, rosette) pairs.
    pub alpha_histogram: Vec<u64>,
    pub alpha_ok: bool,
}

impl SemipartialReport {
    pub fn pass(&self) -> bool {
        self.line_sizes_ok && self.point_degrees_ok && self.alpha_ok
    }
}

fn tangent_members(gx: &GeometryX, o: usize, r: &Rosette) -> usize {
    let b = &gx.ovoids[o].bits;
    r.members.iter().filter(|&&m| gx.ovoids[m as usize].bits.and_count(b) == 1).count()
}

/// Checks sizes, degrees and, for non-incident (ovoid, rosette) pairs, that
/// the number of tangent members is 0 or 2. All pairs when `samples` is
/// `None`, otherwise that many seeded random pairs.
pub fn verify_semipartial(model: &QuadricModel, gx: &GeometryX, samples: Option<(u64, u64)>) -> SemipartialReport {
    let q = model.q() as usize;
    let line_sizes_ok = gx.rosettes.iter().all(|r| r.members.len() == q);
    let point_degrees_ok = gx.incidence.iter().all(|inc| inc.len() == q * q + 1 && inc.iter().all(|&r| r != u32::MAX));
    let nr = gx.rosettes.len();
    let hist = |pairs: &mut dyn Iterator<Item = (usize, usize)>| {
        let mut h = vec![0u64; q + 1];
        let mut n = 0u64;
        for (o, r) in pairs {
            let ros = &gx.rosettes[r];
            if ros.members.binary_search(&(o as u32)).is_ok() {
                continue;
            }
            h[tangent_members(gx, o, ros)] += 1;
            n += 1;
        }
        (h, n)
    };
    let (alpha_histogram, pairs_checked, seed) = match samples {
        None => {
            let parts: Vec<(Vec<u64>, u64)> = (0..gx.ovoids.len()).into_par_iter().map(|o| hist(&mut (0..nr).map(move |r| (o, r)))).collect();
            let mut h = vec![0u64; q + 1];
            let mut n = 0;
            for (ph, pn) in parts {
                for (a, b) in h.iter_mut().zip(ph) {
                    *a += b;
                }
                n += pn;
            }
            (h, n, None)
        }
        Some((seed, count)) => {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let nv = gx.ovoids.len();
            let mut it = (0..count).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nr)));
            let (h, n) = hist(&mut it);
            (h, n, Some(seed))
        }
    };
    let alpha_ok = alpha_histogram.iter().enumerate().all(|(k, &c)| c == 0 || k == 0 || k == 2);
    SemipartialReport {
        s_plus_1: q,
        t_plus_1: q * q + 1,
        line_sizes_ok,
        point_degrees_ok,
        pairs_checked,
        exhaustive: samples.is_none(),
        seed,
        alpha_histogram,
        alpha_ok,
    }
}
