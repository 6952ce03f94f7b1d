//! Euclidean distance to a body, and the parallel body `K + tB` built on it.
//!
//! For polytopes the nearest point is found by Frank–Wolfe with away steps
//! over vertex weights. Every iterate `p ∈ K` gives the upper bound `|x − p|`;
//! the Frank–Wolfe gap `g` gives two lower bounds, `(|d|² − g)/|d|` from the
//! support function in direction `d = x − p` and `sqrt(|d|² − 2g)` from
//! convexity of the squared distance.

use super::{Body, Ellipsoid, VPolytope};
use crate::error::{Error, Result};
use crate::numerics::linalg::dot;

pub const MAX_ITERATIONS: usize = 10_000;
pub const GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceBounds {
    fn exact(d: f64) -> Self {
        DistanceBounds { lower: d, upper: d }
    }
}

/// Bounds on `dist(x, K)`. With `threshold = Some(t)` the iteration stops as
/// soon as the bounds decide `dist ≤ t` either way.
pub fn distance_bounds(b: &Body, x: &[f64], threshold: Option<f64>) -> Result<DistanceBounds> {
    if x.len() != b.dim() {
        return Err(Error::dims(b.dim(), x.len()));
    }
    match b {
        Body::VPoly(p) => Ok(polytope_distance(p, x, threshold)),
        Body::Ellipsoid(e) => Ok(ellipsoid_distance(e, x, threshold)),
        Body::HPoly(_) => Err(Error::UnsupportedRepresentation("H-polytope")),
    }
}

fn decided(bounds: DistanceBounds, threshold: Option<f64>) -> bool {
    match threshold {
        Some(t) => bounds.upper <= t || bounds.lower > t,
        None => false,
    }
}

fn lower_bound(dn2: f64, gap: f64) -> f64 {
    let dn = dn2.sqrt();
    let support = (dn2 - gap) / dn;
    let convex = (dn2 - 2.0 * gap).max(0.0).sqrt();
    support.max(convex).max(0.0)
}

fn polytope_distance(p: &VPolytope, x: &[f64], threshold: Option<f64>) -> DistanceBounds {
    let n = p.dim();
    let m = p.n_vertices();
    // start at the nearest vertex
    let mut start = 0;
    let mut best = f64::INFINITY;
    for i in 0..m {
        let d2: f64 = p.vertex(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < best {
            best = d2;
            start = i;
        }
    }
    let mut lambda = vec![0.0; m];
    lambda[start] = 1.0;
    let mut q = p.vertex(start).to_vec();
    let mut d = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut bounds = DistanceBounds { lower: 0.0, upper: best.sqrt() };
    for _ in 0..MAX_ITERATIONS {
        for c in 0..n {
            d[c] = x[c] - q[c];
        }
        let dn2 = dot(&d, &d);
        if dn2 == 0.0 {
            return DistanceBounds::exact(0.0);
        }
        let dq = dot(&d, &q);
        let (mut fw, mut fw_val) = (0, f64::NEG_INFINITY);
        let (mut away, mut away_val) = (usize::MAX, f64::INFINITY);
        for i in 0..m {
            let s = dot(&d, p.vertex(i));
            if s > fw_val {
                fw_val = s;
                fw = i;
            }
            if lambda[i] > 0.0 && s < away_val {
                away_val = s;
                away = i;
            }
        }
        let gap = (fw_val - dq).max(0.0);
        bounds = DistanceBounds { lower: lower_bound(dn2, gap), upper: dn2.sqrt() };
        if gap <= GAP_TOL || decided(bounds, threshold) {
            return bounds;
        }
        let away_gap = dq - away_val;
        let (gamma_max, toward) = if gap >= away_gap {
            for c in 0..n {
                dir[c] = p.vertex(fw)[c] - q[c];
            }
            (1.0, true)
        } else {
            for c in 0..n {
                dir[c] = q[c] - p.vertex(away)[c];
            }
            let la = lambda[away];
            (la / (1.0 - la), false)
        };
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            return bounds;
        }
        let gamma = (dot(&d, &dir) / dd).clamp(0.0, gamma_max);
        if toward {
            for l in lambda.iter_mut() {
                *l *= 1.0 - gamma;
            }
            lambda[fw] += gamma;
        } else {
            for l in lambda.iter_mut() {
                *l *= 1.0 + gamma;
            }
            lambda[away] -= gamma;
            if gamma >= gamma_max {
                lambda[away] = 0.0;
            }
        }
        for c in 0..n {
            q[c] += gamma * dir[c];
        }
    }
    bounds
}

fn ellipsoid_distance(e: &Ellipsoid, x: &[f64], threshold: Option<f64>) -> DistanceBounds {
    if let Some(r) = e.ball_radius() {
        let dc: f64 = x.iter().zip(e.center().iter()).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
        return DistanceBounds::exact((dc - r).max(0.0));
    }
    if e.contains(x) {
        return DistanceBounds::exact(0.0);
    }
    // Plain Frank–Wolfe with the closed-form linear oracle.
    let n = x.len();
    let mut q = e.center().to_vec();
    let mut d = vec![0.0; n];
    let mut bounds = DistanceBounds { lower: 0.0, upper: f64::INFINITY };
    for _ in 0..MAX_ITERATIONS {
        for c in 0..n {
            d[c] = x[c] - q[c];
        }
        let dn2 = dot(&d, &d);
        let s = e.support_point(&d);
        let gap = (dot(&d, &s) - dot(&d, &q)).max(0.0);
        bounds = DistanceBounds { lower: lower_bound(dn2, gap), upper: dn2.sqrt() };
        if gap <= GAP_TOL || decided(bounds, threshold) {
            return bounds;
        }
        let dir: Vec<f64> = s.iter().zip(&q).map(|(a, b)| a - b).collect();
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            return bounds;
        }
        let gamma = (dot(&d, &dir) / dd).clamp(0.0, 1.0);
        for c in 0..n {
            q[c] += gamma * dir[c];
        }
    }
    bounds
}

/// Membership oracle for `K + tB`.
#[derive(Debug, Clone)]
pub struct ParallelBody {
    body: Body,
    t: f64,
}

impl ParallelBody {
    pub fn new(body: Body, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("parallel radius {t}")));
        }
        if matches!(body, Body::HPoly(_)) {
            return Err(Error::UnsupportedRepresentation("H-polytope"));
        }
        let body = body.reduced()?;
        Ok(ParallelBody { body, t })
    }

    pub fn radius(&self) -> f64 {
        self.t
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if self.t == 0.0 {
            return self.body.contains(x);
        }
        match distance_bounds(&self.body, x, Some(self.t)) {
            Ok(b) if b.upper <= self.t => true,
            Ok(b) if b.lower > self.t => false,
            Ok(b) => 0.5 * (b.lower + b.upper) <= self.t,
            Err(_) => false,
        }
    }

    /// `h_{K+tB}(x) = h_K(x) + t|x|`.
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        Ok(self.body.support(x)? + self.t * dot(x, x).sqrt())
    }

    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut lo, mut hi) = self.body.bounding_box()?;
        for v in lo.iter_mut() {
            *v -= self.t;
        }
        for v in hi.iter_mut() {
            *v += self.t;
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};
    use crate::numerics::linalg::{Matrix, Vector};

    #[test]
    fn cube_face_distance() {
        let c = standard_body("cube", 3, &BodyParams::default()).unwrap();
        let b = distance_bounds(&c, &[1.3, 0.5, 0.5], None).unwrap();
        assert!((b.upper - 0.3).abs() < 1e-6 && (b.lower - 0.3).abs() < 1e-6, "{b:?}");
        assert!(c.minkowski_sum_ball(0.5).unwrap().contains(&[1.3, 0.5, 0.5]));
        assert!(!c.minkowski_sum_ball(0.5).unwrap().contains(&[1.3, 1.3, 1.3]));
        // corner region: distance to (1,1,1) is sqrt(3)·0.2
        let b = distance_bounds(&c, &[1.2, 1.2, 1.2], None).unwrap();
        assert!((b.upper - 0.2 * 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn ball_parallel_body() {
        let ball = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(3), 1.0).unwrap());
        let pb = ball.minkowski_sum_ball(0.5).unwrap();
        assert!(pb.contains(&[1.5 - 1e-9, 0.0, 0.0]));
        assert!(!pb.contains(&[1.5 + 1e-9, 0.0, 0.0]));
    }

    #[test]
    fn ellipsoid_distance_along_axis() {
        let e = Body::Ellipsoid(Ellipsoid::new(Vector::zeros(2), Matrix::diagonal(&[2.0, 1.0])).unwrap());
        let b = distance_bounds(&e, &[3.0, 0.0], None).unwrap();
        assert!((b.upper - 1.0).abs() < 1e-4 && b.lower <= 1.0 + 1e-12, "{b:?}");
    }

    #[test]
    fn h_polytope_is_rejected() {
        let h = crate::bodies::HPolytope::from_rows(1, &[(vec![1.0], 1.0), (vec![-1.0], 1.0)]).unwrap();
        assert!(matches!(Body::HPoly(h).minkowski_sum_ball(1.0), Err(Error::UnsupportedRepresentation(_))));
    }
}
