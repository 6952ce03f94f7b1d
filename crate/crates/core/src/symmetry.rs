//! Chords along a direction, Steiner symmetrals and the fiberwise shadow
//! system `K_u(t)` whose fiber over `y` is `[t·m(y) − ℓ(y)/2, t·m(y) + ℓ(y)/2]`.
//!
//! Symmetrals are inner approximations: the output is the hull of chord
//! endpoints over a finite set of base points, so it is contained in the true
//! body, has the same shadow on `u^⊥`, and is exactly symmetric under `R_u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{reflect_point, Body, Ellipsoid, VPolytope};
use crate::error::{Error, Result};
use crate::numerics::linalg::{dot, Matrix, Vector};
use crate::numerics::rng::RngStream;

/// Relative tolerance below which a slightly inverted interval is a point.
const CHORD_TOL: f64 = 1e-9;

/// `{s : y + s u ∈ K}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordResult {
    pub lower: f64,
    pub upper: f64,
}

impl ChordResult {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

fn check_direction(u: &[f64], n: usize) -> Result<()> {
    if u.len() != n {
        return Err(Error::dims(n, u.len()));
    }
    let nu = dot(u, u).sqrt();
    if (nu - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector(nu));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum ChordShape {
    Halfspaces { normals: Vec<f64>, offsets: Vec<f64>, scale: f64 },
    Ellipsoid { center: Vector, inv: crate::numerics::Matrix },
}

/// Chords of one body along one direction.
#[derive(Debug, Clone)]
pub struct ChordOracle {
    n: usize,
    u: Vector,
    shape: ChordShape,
}

impl ChordOracle {
    pub fn new(b: &Body, u: &[f64]) -> Result<Self> {
        let n = b.dim();
        check_direction(u, n)?;
        let shape = match b {
            Body::VPoly(p) => {
                let (normals, offsets) = p.facets()?;
                let scale = offsets.iter().fold(1.0f64, |m, o| m.max(o.abs()));
                ChordShape::Halfspaces { normals, offsets, scale }
            }
            Body::HPoly(h) => {
                let scale = h.offsets().iter().fold(1.0f64, |m, o| m.max(o.abs()));
                ChordShape::Halfspaces { normals: h.normals().to_vec(), offsets: h.offsets().to_vec(), scale }
            }
            Body::Ellipsoid(e) => ChordShape::Ellipsoid { center: e.center().clone(), inv: e.shape().inverse()? },
        };
        Ok(ChordOracle { n, u: Vector::from(u), shape })
    }

    pub fn direction(&self) -> &[f64] {
        &self.u
    }

    /// The chord over `y`, or `None` when the line misses the body.
    pub fn chord(&self, y: &[f64]) -> Result<Option<ChordResult>> {
        if y.len() != self.n {
            return Err(Error::dims(self.n, y.len()));
        }
        let (lower, upper, tol) = match &self.shape {
            ChordShape::Halfspaces { normals, offsets, scale } => {
                let tol = CHORD_TOL * scale;
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (a, &b) in normals.chunks_exact(self.n).zip(offsets) {
                    let au = dot(a, &self.u);
                    let slack = b - dot(a, y);
                    if au.abs() <= 1e-14 {
                        if slack < -tol {
                            return Ok(None);
                        }
                    } else if au > 0.0 {
                        hi = hi.min(slack / au);
                    } else {
                        lo = lo.max(slack / au);
                    }
                }
                (lo, hi, tol)
            }
            ChordShape::Ellipsoid { center, inv } => {
                // |inv (y − c) + s inv u|² ≤ 1
                let d: Vec<f64> = y.iter().zip(center.iter()).map(|(a, b)| a - b).collect();
                let p = inv.mul_vec(&d)?;
                let q = inv.mul_vec(&self.u)?;
                let (a, b, c) = (q.dot(&q), p.dot(&q), p.dot(&p) - 1.0);
                let disc = b * b - a * c;
                if disc < -CHORD_TOL * a {
                    return Ok(None);
                }
                let r = disc.max(0.0).sqrt();
                ((-b - r) / a, (-b + r) / a, CHORD_TOL)
            }
        };
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidBody("unbounded chord".into()));
        }
        if lower > upper + tol {
            return Ok(None);
        }
        if lower > upper {
            let m = 0.5 * (lower + upper);
            return Ok(Some(ChordResult { lower: m, upper: m }));
        }
        Ok(Some(ChordResult { lower, upper }))
    }
}

/// The chord of `b` along unit `u` over `y ∈ u^⊥`.
pub fn chord(b: &Body, u: &[f64], y: &[f64]) -> Result<Option<ChordResult>> {
    check_direction(u, b.dim())?;
    if dot(y, u).abs() > 1e-10 * (1.0 + dot(y, y).sqrt()) {
        return Err(Error::InvalidParameter("base point must lie in u^⊥".into()));
    }
    ChordOracle::new(b, u)?.chord(y)
}

/// Default number of extra base points.
pub fn default_extra(n: usize) -> usize {
    if n <= 4 {
        2000
    } else {
        8000
    }
}

/// Base points and chords shared by every member of a shadow system.
#[derive(Debug, Clone)]
pub struct ShadowSystem {
    base: VPolytope,
    u: Vector,
    /// Base points in `u^⊥`, flat.
    points: Vec<f64>,
    chords: Vec<ChordResult>,
}

/// One member `K_u(t)` of a shadow system.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowBody {
    pub t: f64,
    pub u: Vector,
    pub body: VPolytope,
}

impl ShadowSystem {
    /// Base points are the vertex projections plus `n_extra` Dirichlet(1,1,1)
    /// combinations of three projected vertices, combination `i` drawn from
    /// `rng.substream(i)`.
    pub fn new(b: &VPolytope, u: &[f64], n_extra: usize, rng: RngStream) -> Result<Self> {
        let n = b.dim();
        check_direction(u, n)?;
        let base = b.hull_reduced()?;
        let m = base.n_vertices();
        let proj = |x: &[f64]| -> Vec<f64> {
            let s = dot(x, u);
            x.iter().zip(u).map(|(a, b)| a - s * b).collect()
        };
        let mut points: Vec<f64> = Vec::with_capacity((m + n_extra) * n);
        for i in 0..m {
            points.extend(proj(base.vertex(i)));
        }
        let projected = points.clone();
        let extra: Vec<f64> = (0..n_extra as u64)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut r = rng.substream(i).rng();
                let idx: Vec<usize> = (0..3).map(|_| ((r.uniform() * m as f64) as usize).min(m - 1)).collect();
                let w: Vec<f64> = (0..3).map(|_| -(1.0 - r.uniform()).ln()).collect();
                let tot: f64 = w.iter().sum();
                let mut y = vec![0.0; n];
                for (&j, wj) in idx.iter().zip(&w) {
                    for (c, yc) in y.iter_mut().enumerate() {
                        *yc += wj / tot * projected[j * n + c];
                    }
                }
                // keep exactly in u^⊥
                proj(&y)
            })
            .collect();
        points.extend(extra);
        let oracle = ChordOracle::new(&Body::VPoly(base.clone()), u)?;
        let chords = points
            .par_chunks_exact(n)
            .map(|y| {
                oracle
                    .chord(y)?
                    .ok_or_else(|| Error::Numerical("base point outside the shadow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShadowSystem { base, u: Vector::from(u), points, chords })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn direction(&self) -> &[f64] {
        &self.u
    }

    pub fn base(&self) -> &VPolytope {
        &self.base
    }

    pub fn n_base_points(&self) -> usize {
        self.chords.len()
    }

    pub fn base_point(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.points[i * n..(i + 1) * n]
    }

    pub fn chords(&self) -> &[ChordResult] {
        &self.chords
    }

    /// All chord endpoints `y + (t·m ± ℓ/2) u`, before hull reduction.
    pub fn cloud(&self, t: f64) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * self.points.len());
        for (y, c) in self.points.chunks_exact(n).zip(&self.chords) {
            let mid = t * c.midpoint();
            let half = 0.5 * c.length();
            for s in [mid - half, mid + half] {
                out.extend(y.iter().zip(self.u.iter()).map(|(a, b)| a + s * b));
            }
        }
        out
    }

    /// `K_u(t)`; the vertices of `K` at `t = 1` and of `R_u K` at `t = −1`.
    pub fn at(&self, t: f64) -> Result<ShadowBody> {
        if !t.is_finite() {
            return Err(Error::NonFinite("t"));
        }
        let body = if t == 1.0 {
            self.base.clone()
        } else if t == -1.0 {
            self.base.map_vertices(|v| reflect_point(v, &self.u))?
        } else {
            VPolytope::from_flat(self.dim(), self.cloud(t))?.hull_reduced()?
        };
        let body = VPolytope::from_flat(self.dim(), body.sorted_vertices().concat())?;
        Ok(ShadowBody { t, u: self.u.clone(), body })
    }
}

/// `K_u(t)` of an ellipsoid: the shear `x ↦ x + (t − 1) m(P_{u⊥} x) u`,
/// which is affine with determinant one because the midpoint map is affine.
pub fn ellipsoid_shadow(e: &Ellipsoid, u: &[f64], t: f64) -> Result<Ellipsoid> {
    let n = e.dim();
    check_direction(u, n)?;
    let m = e.shape();
    let q = m.matmul(&m.transpose())?;
    let qu = q.solve(u)?;
    let quu = dot(&qu, u);
    // m(y) = α + ⟨g, y⟩ on u^⊥, with g = −P_{u⊥}(Q⁻¹u)/⟨Q⁻¹u, u⟩
    let alpha = dot(&qu, e.center()) / quu;
    let mut g: Vec<f64> = qu.iter().map(|v| -v / quu).collect();
    let gu = dot(&g, u);
    for (gi, ui) in g.iter_mut().zip(u) {
        *gi -= gu * ui;
    }
    let mut lin = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            lin[(i, j)] += (t - 1.0) * u[i] * g[j];
        }
    }
    let c = e.center();
    let shift = (t - 1.0) * (alpha + dot(&g, c));
    let center: Vec<f64> = c.iter().zip(u).map(|(a, b)| a + shift * b).collect();
    Ellipsoid::new(Vector::from(center), lin.matmul(m)?)
}

/// A shadow system for any body: exact for ellipsoids, the inner
/// approximation for polytopes.
#[derive(Debug, Clone)]
pub enum ShadowFamily {
    Polytope(ShadowSystem),
    Ellipsoid { body: Ellipsoid, u: Vector },
}

impl ShadowFamily {
    pub fn new(b: &Body, u: &[f64], n_extra: usize, rng: RngStream) -> Result<Self> {
        match b {
            Body::VPoly(p) => Ok(ShadowFamily::Polytope(ShadowSystem::new(p, u, n_extra, rng)?)),
            Body::HPoly(h) => Ok(ShadowFamily::Polytope(ShadowSystem::new(&h.vertex_enumeration()?, u, n_extra, rng)?)),
            Body::Ellipsoid(e) => {
                check_direction(u, e.dim())?;
                Ok(ShadowFamily::Ellipsoid { body: e.clone(), u: Vector::from(u) })
            }
        }
    }

    pub fn at(&self, t: f64) -> Result<Body> {
        match self {
            ShadowFamily::Polytope(s) => Ok(Body::VPoly(s.at(t)?.body)),
            ShadowFamily::Ellipsoid { body, u } => Ok(Body::Ellipsoid(ellipsoid_shadow(body, u, t)?)),
        }
    }
}

/// Inner approximation of `S_u K`.
pub fn steiner_symmetral(b: &VPolytope, u: &[f64], n_extra: usize, rng: RngStream) -> Result<VPolytope> {
    Ok(ShadowSystem::new(b, u, n_extra, rng)?.at(0.0)?.body)
}

/// Inner approximation of `K_u(t)`.
pub fn shadow_body(b: &VPolytope, u: &[f64], t: f64, n_extra: usize, rng: RngStream) -> Result<ShadowBody> {
    ShadowSystem::new(b, u, n_extra, rng)?.at(t)
}
