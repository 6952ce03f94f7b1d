//! Incremental (quickhull-order) convex hull for dimensions 3 to 6.
//!
//! Facets are simplices with outward unit normals and explicit adjacency.
//! Each round takes the furthest outside point of some facet, floods the
//! visible region, and cones the horizon to the new point. Coplanar inputs
//! (cube faces, boxes) are handled by an absolute distance tolerance: a
//! point within `eps` of a facet plane is never outside it, so flat faces
//! come out triangulated and interior face points are never added.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::linalg::det_in_place;

pub const MAX_DIM: usize = 6;
const NONE: u32 = u32::MAX;

/// Relative tolerance for plane tests and rank detection.
pub const REL_EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Facet {
    pub verts: [u32; MAX_DIM],
    neighbors: [u32; MAX_DIM],
    pub normal: [f64; MAX_DIM],
    pub offset: f64,
    outside: Vec<u32>,
    furthest: u32,
    furthest_dist: f64,
    alive: bool,
    mark: u32,
}

#[derive(Debug, Clone)]
pub struct RawHull {
    pub d: usize,
    pub center: [f64; MAX_DIM],
    pub facets: Vec<Facet>,
}

impl RawHull {
    /// Sum of the cone volumes from `center` over the simplicial facets.
    pub fn volume(&self, pts: &[f64]) -> f64 {
        let d = self.d;
        let mut m = [0.0; MAX_DIM * MAX_DIM];
        let mut total = 0.0;
        for f in &self.facets {
            for (r, &v) in f.verts[..d].iter().enumerate() {
                let p = &pts[v as usize * d..(v as usize + 1) * d];
                for c in 0..d {
                    m[r * d + c] = p[c] - self.center[c];
                }
            }
            total += det_in_place(&mut m[..d * d], d).abs();
        }
        total / factorial(d)
    }

    /// Hull vertices whose incident facet normals span `R^d`.
    pub fn extreme_points(&self) -> Vec<usize> {
        let d = self.d;
        let mut incident: HashMap<u32, Vec<usize>> = HashMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            for &v in &f.verts[..d] {
                incident.entry(v).or_default().push(fi);
            }
        }
        let mut out: Vec<usize> = incident
            .into_iter()
            .filter(|(_, fs)| {
                let mut basis: Vec<[f64; MAX_DIM]> = Vec::with_capacity(d);
                for &fi in fs {
                    let mut r = self.facets[fi].normal;
                    for _ in 0..2 {
                        for b in &basis {
                            let c: f64 = (0..d).map(|i| r[i] * b[i]).sum();
                            for i in 0..d {
                                r[i] -= c * b[i];
                            }
                        }
                    }
                    let nr = (0..d).map(|i| r[i] * r[i]).sum::<f64>().sqrt();
                    if nr > 1e-7 {
                        for x in r.iter_mut().take(d) {
                            *x /= nr;
                        }
                        basis.push(r);
                        if basis.len() == d {
                            return true;
                        }
                    }
                }
                false
            })
            .map(|(v, _)| v as usize)
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn factorial(d: usize) -> f64 {
    (1..=d).map(|i| i as f64).product()
}

/// Coordinate range of a flat point array, the length scale for tolerances.
pub fn extent(pts: &[f64], d: usize) -> f64 {
    let mut s: f64 = 0.0;
    for c in 0..d {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts.chunks_exact(d) {
            lo = lo.min(p[c]);
            hi = hi.max(p[c]);
        }
        s = s.max(hi - lo);
    }
    s
}

/// Greedy affinely independent subset: starts at the lexicographically
/// smallest point and repeatedly adds the point furthest from the current
/// affine span. Returns the chosen indices, stopping early when the
/// residual drops below `tol`.
pub fn affine_basis(pts: &[f64], d: usize, tol: f64) -> Vec<usize> {
    let m = pts.len() / d;
    if m == 0 {
        return Vec::new();
    }
    let p = |i: usize| &pts[i * d..(i + 1) * d];
    let mut i0 = 0;
    for i in 1..m {
        if p(i).iter().zip(p(i0)).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
            == Some(std::cmp::Ordering::Less)
        {
            i0 = i;
        }
    }
    let mut chosen = vec![i0];
    let mut basis: Vec<[f64; MAX_DIM]> = Vec::new();
    let mut resid = vec![0.0; d];
    while chosen.len() <= d {
        let (mut best, mut best_norm) = (usize::MAX, -1.0);
        let mut best_vec = [0.0; MAX_DIM];
        for i in 0..m {
            for c in 0..d {
                resid[c] = p(i)[c] - p(i0)[c];
            }
            for _ in 0..2 {
                for b in &basis {
                    let t: f64 = (0..d).map(|c| resid[c] * b[c]).sum();
                    for c in 0..d {
                        resid[c] -= t * b[c];
                    }
                }
            }
            let nr = resid.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nr > best_norm {
                best_norm = nr;
                best = i;
                best_vec[..d].copy_from_slice(&resid);
            }
        }
        if best_norm <= tol {
            break;
        }
        for x in best_vec.iter_mut().take(d) {
            *x /= best_norm;
        }
        basis.push(best_vec);
        chosen.push(best);
    }
    chosen
}

struct Builder<'a> {
    pts: &'a [f64],
    d: usize,
    eps: f64,
    center: [f64; MAX_DIM],
    facets: Vec<Facet>,
    round: u32,
}

impl<'a> Builder<'a> {
    #[inline]
    fn point(&self, i: u32) -> &'a [f64] {
        let d = self.d;
        &self.pts[i as usize * d..(i as usize + 1) * d]
    }

    #[inline]
    fn dist(&self, f: &Facet, i: u32) -> f64 {
        let p = self.point(i);
        let mut s = -f.offset;
        for c in 0..self.d {
            s += f.normal[c] * p[c];
        }
        s
    }

    fn plane(&self, verts: &[u32]) -> Result<([f64; MAX_DIM], f64)> {
        let d = self.d;
        let q0 = self.point(verts[0]);
        let mut basis: Vec<[f64; MAX_DIM]> = Vec::with_capacity(d);
        for &v in &verts[1..d] {
            let q = self.point(v);
            let mut e = [0.0; MAX_DIM];
            for c in 0..d {
                e[c] = q[c] - q0[c];
            }
            let original = (0..d).map(|c| e[c] * e[c]).sum::<f64>().sqrt();
            for _ in 0..2 {
                for b in &basis {
                    let t: f64 = (0..d).map(|c| e[c] * b[c]).sum();
                    for c in 0..d {
                        e[c] -= t * b[c];
                    }
                }
            }
            let ne = (0..d).map(|c| e[c] * e[c]).sum::<f64>().sqrt();
            if ne <= 1e-13 * original.max(self.eps) {
                continue;
            }
            for x in e.iter_mut().take(d) {
                *x /= ne;
            }
            basis.push(e);
        }
        let mut r = [0.0; MAX_DIM];
        for c in 0..d {
            r[c] = q0[c] - self.center[c];
        }
        for _ in 0..2 {
            for b in &basis {
                let t: f64 = (0..d).map(|c| r[c] * b[c]).sum();
                for c in 0..d {
                    r[c] -= t * b[c];
                }
            }
        }
        let nr = (0..d).map(|c| r[c] * r[c]).sum::<f64>().sqrt();
        if !(nr > 0.0) {
            return Err(Error::Numerical("hull facet plane through interior point".into()));
        }
        for x in r.iter_mut().take(d) {
            *x /= nr;
        }
        let offset = (0..d).map(|c| r[c] * q0[c]).sum();
        Ok((r, offset))
    }

    fn new_facet(&mut self, verts: &[u32]) -> Result<u32> {
        let (normal, offset) = self.plane(verts)?;
        let mut v = [NONE; MAX_DIM];
        v[..self.d].copy_from_slice(verts);
        self.facets.push(Facet {
            verts: v,
            neighbors: [NONE; MAX_DIM],
            normal,
            offset,
            outside: Vec::new(),
            furthest: NONE,
            furthest_dist: 0.0,
            alive: true,
            mark: 0,
        });
        Ok((self.facets.len() - 1) as u32)
    }

    fn assign(&mut self, candidates: &[u32], point: u32) -> bool {
        for &fi in candidates {
            let dist = self.dist(&self.facets[fi as usize], point);
            if dist > self.eps {
                let f = &mut self.facets[fi as usize];
                f.outside.push(point);
                if dist > f.furthest_dist {
                    f.furthest_dist = dist;
                    f.furthest = point;
                }
                return true;
            }
        }
        false
    }

    fn run(mut self, simplex: &[usize]) -> Result<RawHull> {
        let d = self.d;
        let m = (self.pts.len() / d) as u32;
        for c in 0..d {
            self.center[c] =
                simplex.iter().map(|&i| self.pts[i * d + c]).sum::<f64>() / (d + 1) as f64;
        }
        let s: Vec<u32> = simplex.iter().map(|&i| i as u32).collect();
        for i in 0..=d {
            let verts: Vec<u32> = (0..=d).filter(|&j| j != i).map(|j| s[j]).collect();
            self.new_facet(&verts)?;
        }
        for i in 0..=d {
            let mut t = 0;
            for j in 0..=d {
                if j != i {
                    self.facets[i].neighbors[t] = j as u32;
                    t += 1;
                }
            }
        }
        let all: Vec<u32> = (0..=d as u32).collect();
        let mut in_simplex = vec![false; m as usize];
        for &i in simplex {
            in_simplex[i] = true;
        }
        for p in 0..m {
            if !in_simplex[p as usize] {
                self.assign(&all, p);
            }
        }

        let mut stack: Vec<u32> = all.iter().rev().copied().collect();
        let mut visible: Vec<u32> = Vec::new();
        let mut created: Vec<u32> = Vec::new();
        let mut ridges: HashMap<[u32; MAX_DIM], (u32, usize)> = HashMap::new();
        while let Some(fi) = stack.pop() {
            let f = &self.facets[fi as usize];
            if !f.alive || f.outside.is_empty() {
                continue;
            }
            let apex = f.furthest;
            self.round += 1;
            let vis_mark = 2 * self.round;
            let hid_mark = 2 * self.round + 1;

            visible.clear();
            visible.push(fi);
            self.facets[fi as usize].mark = vis_mark;
            let mut head = 0;
            while head < visible.len() {
                let h = visible[head];
                head += 1;
                for t in 0..d {
                    let g = self.facets[h as usize].neighbors[t];
                    let gm = self.facets[g as usize].mark;
                    if gm == vis_mark || gm == hid_mark {
                        continue;
                    }
                    if self.dist(&self.facets[g as usize], apex) > self.eps {
                        self.facets[g as usize].mark = vis_mark;
                        visible.push(g);
                    } else {
                        self.facets[g as usize].mark = hid_mark;
                    }
                }
            }

            created.clear();
            ridges.clear();
            for vi in 0..visible.len() {
                let h = visible[vi];
                for t in 0..d {
                    let g = self.facets[h as usize].neighbors[t];
                    if self.facets[g as usize].mark == vis_mark {
                        continue;
                    }
                    let hv = self.facets[h as usize].verts;
                    let mut verts = [NONE; MAX_DIM];
                    let mut w = 0;
                    for (j, &v) in hv[..d].iter().enumerate() {
                        if j != t {
                            verts[w] = v;
                            w += 1;
                        }
                    }
                    verts[d - 1] = apex;
                    let nf = self.new_facet(&verts[..d])?;
                    created.push(nf);
                    self.facets[nf as usize].neighbors[d - 1] = g;
                    let gn = &mut self.facets[g as usize].neighbors;
                    match gn[..d].iter().position(|&x| x == h) {
                        Some(s) => gn[s] = nf,
                        None => return Err(Error::Numerical("hull adjacency corrupted".into())),
                    }
                    for r in 0..d - 1 {
                        let mut key = [NONE; MAX_DIM];
                        let mut w = 0;
                        for (j, &v) in verts[..d - 1].iter().enumerate() {
                            if j != r {
                                key[w] = v;
                                w += 1;
                            }
                        }
                        key[..d - 2].sort_unstable();
                        match ridges.remove(&key) {
                            Some((pf, pr)) => {
                                self.facets[nf as usize].neighbors[r] = pf;
                                self.facets[pf as usize].neighbors[pr] = nf;
                            }
                            None => {
                                ridges.insert(key, (nf, r));
                            }
                        }
                    }
                }
            }
            if !ridges.is_empty() {
                return Err(Error::Numerical("hull horizon is not a closed ridge cycle".into()));
            }

            let mut orphans: Vec<u32> = Vec::new();
            for &h in &visible {
                let f = &mut self.facets[h as usize];
                f.alive = false;
                orphans.append(&mut f.outside);
            }
            for p in orphans {
                if p != apex {
                    self.assign(&created, p);
                }
            }
            for &nf in created.iter().rev() {
                if !self.facets[nf as usize].outside.is_empty() {
                    stack.push(nf);
                }
            }
        }

        let facets = self.facets.into_iter().filter(|f| f.alive).collect();
        Ok(RawHull { d, center: self.center, facets })
    }
}

/// Hull of `pts` (flat, dimension `d` in 3..=6). Fails with
/// [`Error::DegenerateInput`] if the points do not span `R^d`.
pub fn quickhull(pts: &[f64], d: usize) -> Result<RawHull> {
    if !(3..=MAX_DIM).contains(&d) {
        return Err(Error::BadDims(format!("quickhull needs 3 <= d <= {MAX_DIM}, got {d}")));
    }
    let scale = extent(pts, d);
    let simplex = affine_basis(pts, d, REL_EPS * scale);
    if simplex.len() < d + 1 {
        return Err(Error::DegenerateInput { expected: d, found: simplex.len() - 1 });
    }
    let attempt = |eps: f64| {
        Builder { pts, d, eps, center: [0.0; MAX_DIM], facets: Vec::new(), round: 0 }.run(&simplex)
    };
    // A wider tolerance absorbs rare inconsistent visibility decisions.
    attempt(REL_EPS * scale)
        .or_else(|_| attempt(1e-8 * scale))
        .or_else(|_| attempt(1e-6 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_points(d: usize) -> Vec<f64> {
        let mut pts = Vec::new();
        for mask in 0..(1u32 << d) {
            for c in 0..d {
                pts.push(((mask >> c) & 1) as f64);
            }
        }
        pts
    }

    #[test]
    fn unit_cubes() {
        for d in 3..=6 {
            let pts = cube_points(d);
            let h = quickhull(&pts, d).unwrap();
            assert!((h.volume(&pts) - 1.0).abs() < 1e-12, "d = {d}");
            assert_eq!(h.extreme_points().len(), 1 << d);
        }
    }

    #[test]
    fn interior_and_face_points_are_not_extreme() {
        let mut pts = cube_points(3);
        pts.extend_from_slice(&[0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 0.5, 0.0, 0.0]);
        let h = quickhull(&pts, 3).unwrap();
        assert_eq!(h.extreme_points(), (0..8).collect::<Vec<_>>());
        assert!((h.volume(&pts) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_input_is_degenerate() {
        let pts = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        assert!(matches!(
            quickhull(&pts, 3),
            Err(Error::DegenerateInput { expected: 3, found: 2 })
        ));
    }
}
