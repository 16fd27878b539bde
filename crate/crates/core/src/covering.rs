//! The affine quadrangle Q \ Q0, the relation given by the orbits of nu, and
//! the canonical 2-fold covering onto the ovoid geometry.

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::ovoid::GeometryX;
use crate::quadric::QuadricModel;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLine {
    /// Line id in the model.
    pub line: u32,
    /// The q points off Q0, ascending Q-indices.
    pub points: Vec<u32>,
    /// The single point of the line on Q0.
    pub infinity: u32,
}

pub struct AffineQuadrangle {
    /// Q-indices of the points, ascending.
    pub points: Vec<u32>,
    pub lines: Vec<AffineLine>,
    /// Affine line ids through each point, indexed by Q-index.
    pub lines_on: Vec<Vec<u32>>,
    /// Model line id to affine line id.
    pub affine_id: Vec<u32>,
}

impl AffineQuadrangle {
    pub fn build(model: &QuadricModel) -> Result<AffineQuadrangle> {
        let mut lines = Vec::new();
        let mut affine_id = vec![NONE; model.lines().len()];
        let mut lines_on = vec![Vec::new(); model.points().len()];
        for (li, l) in model.lines().iter().enumerate() {
            let (inf, pts): (Vec<u32>, Vec<u32>) = l.iter().partition(|&&p| model.in_h0(p));
            if pts.is_empty() {
                continue;
            }
            if inf.len() != 1 {
                return Err(Error::Invariant(format!("line {li} meets Q0 in {} points", inf.len())));
            }
            let id = lines.len() as u32;
            affine_id[li] = id;
            for &p in &pts {
                lines_on[p as usize].push(id);
            }
            lines.push(AffineLine {
                line: li as u32,
                points: pts,
                infinity: inf[0],
            });
        }
        Ok(AffineQuadrangle {
            points: model.affine().to_vec(),
            lines,
            lines_on,
            affine_id,
        })
    }

    /// Position of a Q-index in [`Self::points`].
    pub fn position(&self, x: u32) -> Option<usize> {
        self.points.binary_search(&x).ok()
    }

    /// Collinearity rows over positions in [`Self::points`].
    pub fn collinearity(&self) -> Vec<BitSet> {
        let n = self.points.len();
        let mut rows = vec![BitSet::new(n); n];
        for l in &self.lines {
            let pos: Vec<usize> = l.points.iter().map(|&p| self.position(p).unwrap()).collect();
            for &a in &pos {
                for &b in &pos {
                    if a != b {
                        rows[a].insert(b);
                    }
                }
            }
        }
        rows
    }

    /// The affine line through two collinear points, if any.
    pub fn line_through(&self, a: u32, b: u32) -> Option<u32> {
        let lb = &self.lines_on[b as usize];
        self.lines_on[a as usize].iter().copied().find(|l| lb.contains(l))
    }
}

/// The inverse of the quotient isomorphism: each ovoid X goes to the pair
/// <X>^perp cap Q and each rosette at p to the two lines of Q in the perp of
/// its tangent plane, punctured at p.
pub struct QuotientIso {
    pub point_class: Vec<[u32; 2]>,
    pub line_class: Vec<[u32; 2]>,
}

pub fn quotient_iso(model: &QuadricModel, gx: &GeometryX, aq: &AffineQuadrangle) -> Result<QuotientIso> {
    let point_class = gx
        .ovoids
        .par_iter()
        .map(|o| {
            let perp = model.perp_space(o.span.basis());
            let pts = model.q_points_in(&perp);
            match pts[..] {
                [a, b] => Ok([a, b]),
                _ => Err(Error::Invariant(format!("span perp of ovoid {} meets Q in {} points", o.id, pts.len()))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let line_class = gx
        .rosettes
        .par_iter()
        .map(|r| {
            let perp = model.perp_space(r.tangent_plane.basis());
            let on = model.q_points_in(&perp);
            let mut ls: Vec<u32> = model
                .lines_on(r.base)
                .iter()
                .copied()
                .filter(|&l| model.lines()[l as usize].iter().all(|p| on.binary_search(p).is_ok()))
                .map(|l| aq.affine_id[l as usize])
                .collect();
            ls.sort_unstable();
            match ls[..] {
                [a, b] if a != NONE && b != NONE => Ok([a, b]),
                _ => Err(Error::Invariant(format!("rosette {} has {} perp lines", r.id, ls.len()))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientIso { point_class, line_class })
}

#[derive(Clone, Debug)]
pub struct CoveringMap {
    /// Per ovoid, the two points of Q \ Q0 over it (ascending Q-indices).
    pub point_fiber: Vec<[u32; 2]>,
    /// Per rosette, the two affine lines over it.
    pub line_fiber: Vec<[u32; 2]>,
    /// Per Q-index, the ovoid x^perp cap Q0 (NONE on Q0).
    pub point_image: Vec<u32>,
    /// Per affine line, its rosette.
    pub line_image: Vec<u32>,
}

impl CoveringMap {
    pub fn fiber(&self, ovoid: u32) -> [u32; 2] {
        self.point_fiber[ovoid as usize]
    }
}

/// The covering x -> x^perp cap Q0, l -> rosette at l^inf through the images
/// of the points of l.
pub fn canonical_covering(_model: &QuadricModel, gx: &GeometryX, aq: &AffineQuadrangle) -> Result<CoveringMap> {
    let point_image = gx.ovoid_of_point.clone();
    let line_image = aq
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let o = point_image[l.points[0] as usize];
            gx.rosette_at(o, l.infinity)
                .ok_or_else(|| Error::Invariant(format!("affine line {i}: image of a point misses the point at infinity")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let mut point_fiber = vec![[NONE; 2]; gx.ovoids.len()];
    for o in &gx.ovoids {
        point_fiber[o.id as usize] = [o.rep.min(o.partner), o.rep.max(o.partner)];
    }
    let mut line_fiber = vec![[NONE; 2]; gx.rosettes.len()];
    for (i, &r) in line_image.iter().enumerate() {
        let f = &mut line_fiber[r as usize];
        if f[0] == NONE {
            f[0] = i as u32;
        } else if f[1] == NONE {
            f[1] = i as u32;
        } else {
            return Err(Error::Invariant(format!("rosette {r} has more than two lines over it")));
        }
    }
    Ok(CoveringMap {
        point_fiber,
        line_fiber,
        point_image,
        line_image,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoveringReport {
    pub fibers_ok: bool,
    pub line_bijections_ok: bool,
    pub pencil_bijections_ok: bool,
    pub quotient_iso_ok: bool,
    pub points_checked: usize,
    pub lines_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CoveringReport {
    pub fn pass(&self) -> bool {
        self.fibers_ok && self.line_bijections_ok && self.pencil_bijections_ok && self.quotient_iso_ok
    }

    fn fail(&mut self, msg: String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(msg);
        }
    }
}

pub fn verify_covering(model: &QuadricModel, gx: &GeometryX, aq: &AffineQuadrangle, cov: &CoveringMap) -> CoveringReport {
    let mut rep = CoveringReport {
        points_checked: aq.points.len(),
        lines_checked: aq.lines.len(),
        ..Default::default()
    };
    let fmt_pt = |x: u32| format!("{:?}", crate::projgeom::bits_of(model.coords(x)));

    // fibers: two points, swapped by nu, at distance 3 in the collinearity graph
    let coll = aq.collinearity();
    let pos = |x: u32| aq.position(x).unwrap();
    rep.fibers_ok = true;
    for (o, f) in cov.point_fiber.iter().enumerate() {
        if f[0] == NONE || f[1] == NONE || f[0] == f[1] || model.nu(f[0]) != f[1] {
            rep.fibers_ok = false;
            rep.fail(format!("ovoid {o}: bad fiber {f:?}"));
            continue;
        }
        if f.iter().any(|&x| cov.point_image[x as usize] != o as u32) {
            rep.fibers_ok = false;
            rep.fail(format!("ovoid {o}: fiber point maps elsewhere"));
            continue;
        }
        let (a, b) = (pos(f[0]), pos(f[1]));
        let adjacent = coll[a].contains(b);
        let dist2 = coll[a].and_count(&coll[b]) > 0;
        let dist3 = coll[a].iter().any(|z| coll[z].and_count(&coll[b]) > 0);
        if adjacent || dist2 || !dist3 {
            rep.fibers_ok = false;
            rep.fail(format!("ovoid {o}: fiber {} {} not at distance 3", fmt_pt(f[0]), fmt_pt(f[1])));
        }
    }
    let preimages = cov.point_image.iter().filter(|&&o| o != NONE).count();
    if preimages != 2 * gx.ovoids.len() {
        rep.fibers_ok = false;
        rep.fail(format!("{preimages} points mapped for {} ovoids", gx.ovoids.len()));
    }

    // each affine line goes bijectively onto the members of its rosette
    rep.line_bijections_ok = true;
    for (i, l) in aq.lines.iter().enumerate() {
        let r = &gx.rosettes[cov.line_image[i] as usize];
        let mut imgs: Vec<u32> = l.points.iter().map(|&x| cov.point_image[x as usize]).collect();
        imgs.sort_unstable();
        if imgs != r.members {
            rep.line_bijections_ok = false;
            rep.fail(format!("affine line {i} (through {}) is not mapped onto rosette {}", fmt_pt(l.points[0]), r.id));
        }
    }

    // the pencil at x goes bijectively onto the rosettes through its image
    rep.pencil_bijections_ok = true;
    for &x in &aq.points {
        let o = cov.point_image[x as usize];
        if o == NONE {
            rep.pencil_bijections_ok = false;
            rep.fail(format!("point {} has no image", fmt_pt(x)));
            continue;
        }
        let mut imgs: Vec<u32> = aq.lines_on[x as usize].iter().map(|&l| cov.line_image[l as usize]).collect();
        imgs.sort_unstable();
        let mut want = gx.incidence[o as usize].clone();
        want.sort_unstable();
        if imgs != want {
            rep.pencil_bijections_ok = false;
            rep.fail(format!("pencil at {} is not mapped onto the rosettes of ovoid {o}", fmt_pt(x)));
        }
    }

    // the geometry on nu-orbits agrees with X through the quotient isomorphism
    rep.quotient_iso_ok = match quotient_iso(model, gx, aq) {
        Err(e) => {
            rep.fail(e.to_string());
            false
        }
        Ok(iso) => {
            let mut ok = iso.point_class == cov.point_fiber;
            if !ok {
                rep.fail("point classes differ from the covering fibers".into());
            }
            for (r, lc) in iso.line_class.iter().enumerate() {
                let mut f = cov.line_fiber[r];
                f.sort_unstable();
                let nu_pair = {
                    let a = &aq.lines[lc[0] as usize].points;
                    let mut img: Vec<u32> = a.iter().map(|&x| model.nu(x)).collect();
                    img.sort_unstable();
                    img == aq.lines[lc[1] as usize].points
                };
                if *lc != f || !nu_pair {
                    ok = false;
                    rep.fail(format!("rosette {r}: line class {lc:?} vs fiber {f:?}"));
                }
            }
            // every incident (ovoid, rosette) pair has exactly two flags over it
            let mut flags = vec![0u8; gx.ovoids.len() * gx.rosettes.len().max(1)];
            let nr = gx.rosettes.len();
            for (l, al) in aq.lines.iter().enumerate() {
                let r = cov.line_image[l] as usize;
                for &x in &al.points {
                    let o = cov.point_image[x as usize] as usize;
                    flags[o * nr + r] = flags[o * nr + r].saturating_add(1);
                }
            }
            for (o, inc) in gx.incidence.iter().enumerate() {
                for &r in inc {
                    if flags[o * nr + r as usize] != 2 {
                        ok = false;
                        rep.fail(format!("flag (ovoid {o}, rosette {r}) has {} preimages", flags[o * nr + r as usize]));
                    }
                    flags[o * nr + r as usize] = 0;
                }
            }
            if flags.iter().any(|&c| c != 0) {
                ok = false;
                rep.fail("a flag of the cover maps to a non-incident pair".into());
            }
            ok
        }
    };
    rep
}

/// Lifts a walk in the tangency graph to the collinearity graph of the
/// affine quadrangle, starting at `start`.
pub fn lift_path(model: &QuadricModel, cov: &CoveringMap, path: &[u32], start: u32) -> Result<Vec<u32>> {
    let Some(&first) = path.first() else {
        return Ok(Vec::new());
    };
    if !cov.fiber(first).contains(&start) {
        return Err(Error::WrongFiber(start));
    }
    let mut out = vec![start];
    let mut cur = start;
    for w in path.windows(2) {
        let cands: Vec<u32> = cov.fiber(w[1]).iter().copied().filter(|&y| y != cur && model.perp(cur, y)).collect();
        cur = match cands[..] {
            [y] => y,
            [] => return Err(Error::NotAdjacent(w[0], w[1])),
            _ => return Err(Error::Invariant(format!("two liftings of edge {} {}", w[0], w[1]))),
        };
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::default_model;

    fn setup(n: u32) -> (QuadricModel, GeometryX, AffineQuadrangle, CoveringMap) {
        let m = default_model(n).unwrap();
        let gx = GeometryX::build(&m).unwrap();
        let aq = AffineQuadrangle::build(&m).unwrap();
        let cov = canonical_covering(&m, &gx, &aq).unwrap();
        (m, gx, aq, cov)
    }

    #[test]
    fn affine_sizes() {
        for (n, want) in [(1, 12), (2, 240)] {
            let (m, _, aq, _) = setup(n);
            let q = m.q() as usize;
            assert_eq!(aq.points.len(), want);
            assert!(aq.lines.iter().all(|l| l.points.len() == q));
        }
    }

    #[test]
    fn q2_collinearity_is_grid_complement() {
        let (m, _, aq, _) = setup(1);
        let coll = aq.collinearity();
        let n = aq.points.len();
        for a in 0..n {
            assert_eq!(coll[a].count(), 5);
            let x = aq.points[a];
            let mate = aq.position(m.nu(x)).unwrap();
            assert!(!coll[a].contains(mate));
            let side: Vec<usize> = (0..n).filter(|&b| b != mate && !coll[a].contains(b)).collect();
            assert_eq!(side.len(), 6);
            for &b in &side {
                for &c in &side {
                    assert!(!coll[b].contains(c));
                }
            }
            let other: Vec<usize> = side.iter().map(|&b| aq.position(m.nu(aq.points[b])).unwrap()).collect();
            for &b in &side {
                for &c in &other {
                    let paired = aq.position(m.nu(aq.points[b])).unwrap() == c;
                    assert_eq!(coll[b].contains(c), !paired);
                }
            }
        }
    }

    #[test]
    fn covering_passes_small() {
        for n in 1..=2 {
            let (m, gx, aq, cov) = setup(n);
            let rep = verify_covering(&m, &gx, &aq, &cov);
            assert!(rep.pass(), "{rep:?}");
            assert!(cov.line_fiber.iter().all(|f| f[0] != NONE && f[1] != NONE));
        }
        let (_, gx, _, _) = setup(2);
        assert_eq!(gx.rosettes.len(), 510);
    }

    #[test]
    fn corrupted_map_fails() {
        let (m, gx, aq, mut cov) = setup(2);
        let [a, _] = cov.point_fiber[0];
        let [b, _] = cov.point_fiber[1];
        cov.point_image.swap(a as usize, b as usize);
        let rep = verify_covering(&m, &gx, &aq, &cov);
        assert!(!rep.pass());
        assert!(!rep.line_bijections_ok);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn lifting_edges_and_triangles() {
        let (m, gx, _, cov) = setup(2);
        let tangent = |a: u32, b: u32| gx.ovoids[a as usize].bits.and_count(&gx.ovoids[b as usize].bits) == 1;
        let b = (1..120).find(|&b| tangent(0, b)).unwrap();
        let [x1, x2] = cov.fiber(0);
        let l1 = lift_path(&m, &cov, &[0, b], x1).unwrap();
        let l2 = lift_path(&m, &cov, &[0, b], x2).unwrap();
        assert_ne!(l1[1], l2[1]);
        assert_eq!(m.nu(l1[1]), l2[1]);
        assert_eq!(lift_path(&m, &cov, &[0, b], cov.fiber(b)[0]), Err(Error::WrongFiber(cov.fiber(b)[0])));

        let mut saw_linear = false;
        let mut saw_nonlinear = false;
        for c in 1..120u32 {
            if c == b || !tangent(0, c) || !tangent(b, c) {
                continue;
            }
            let walk = lift_path(&m, &cov, &[0, b, c, 0], x1).unwrap();
            let p = |u: u32, v: u32| (gx.ovoids[u as usize].bits.and(&gx.ovoids[v as usize].bits)).first();
            let linear = p(0, b) == p(0, c) && p(0, b) == p(b, c);
            if linear {
                saw_linear = true;
                assert_eq!(walk[3], x1);
            } else {
                saw_nonlinear = true;
                assert_eq!(walk[3], x2);
            }
        }
        assert!(saw_linear && saw_nonlinear);
        let nb = (1..120).find(|&c| !tangent(0, c)).unwrap();
        assert_eq!(lift_path(&m, &cov, &[0, nb], x1), Err(Error::NotAdjacent(0, nb)));
    }
}
