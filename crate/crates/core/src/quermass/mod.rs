//! Projection volumes and the quermassintegral functionals built on them.
//!
//! With `σ` the Haar probability on `G_{n,k}`:
//! `W_{n−k}`-type means are `Q_{k,p}(K) = |B_n|/|B_k| (∫ |P_F K|^p dσ)^{1/p}`,
//! `p = 0` is the geometric mean, `Φ_k = Q_{k,−n}` and
//! `I_{k,p} = Q_{k,p}(K) / (|B_n|^{(n−k)/n} |K|^{k/n})`.
//!
//! Every estimator draws sample `i` from `stream.substream(i)` of a stream
//! that depends only on `(seed, n, k)`, so two bodies of the same dimension
//! evaluated with the same seed see the same subspaces and their difference
//! carries a joint standard error.

mod petty;
mod steiner;

pub use petty::{polar_projection_linear, polar_projection_norm, polar_projection_volume, sphere_stream};
pub use steiner::{steiner_poly_fit, SteinerFit};

use rayon::prelude::*;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::hull::{body_volume, convex_hull, hull_volume, VolumeResult};
use crate::numerics::linalg::{det_in_place, dot, gram_schmidt_columns, Matrix, Vector};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::unit_ball_volume;
use crate::numerics::stats::{Linear, McEstimate, Transform};

/// Relative slack on the inscribed-ball lower bound `|P_F K| ≥ |B_k| ρ^k`.
const INRADIUS_SLACK: f64 = 1e-9;

/// Which functional to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuermassSpec {
    pub k: usize,
    /// Moment order; `0` is the geometric mean.
    pub p: f64,
    pub budget: usize,
}

impl QuermassSpec {
    pub fn new(k: usize, p: f64, budget: usize) -> Self {
        QuermassSpec { k, p, budget }
    }

    /// `Φ_k`, i.e. `p = −n`.
    pub fn phi(n: usize, k: usize, budget: usize) -> Self {
        QuermassSpec { k, p: -(n as f64), budget }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Ball(f64),
    /// `M Mᵀ`.
    Ellipsoid(Matrix),
    Polytope {
        coords: Vec<f64>,
        /// `A_f ν_f` per facet, for the hyperplane formula.
        facet_vectors: Vec<f64>,
    },
}

/// A body prepared for repeated projection-volume queries.
#[derive(Debug, Clone)]
pub struct ProjectionOracle {
    n: usize,
    shape: Shape,
    inradius: f64,
    volume: VolumeResult,
}

fn facet_vectors(coords: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Ok(Vec::new());
    }
    let pts: Vec<Vector> = coords.chunks_exact(n).map(Vector::from).collect();
    let hull = convex_hull(&pts, n)?;
    let fact: f64 = (1..n).map(|i| i as f64).product();
    let mut out = Vec::with_capacity(hull.facets.len() * n);
    let mut m = vec![0.0; n * n];
    for f in &hull.facets {
        let v0 = hull.point(f.vertices[0]);
        for (r, &v) in f.vertices[1..].iter().enumerate() {
            for (c, (a, b)) in hull.point(v).iter().zip(v0).enumerate() {
                m[r * n + c] = a - b;
            }
        }
        m[(n - 1) * n..].copy_from_slice(&f.normal);
        let area = det_in_place(&mut m, n).abs() / fact;
        out.extend(f.normal.iter().map(|x| x * area));
    }
    Ok(out)
}

impl ProjectionOracle {
    pub fn new(b: &Body) -> Result<Self> {
        let n = b.dim();
        let volume = body_volume(b, 200_000, RngStream::new(0, label_hash("oracle/volume")))?;
        let (shape, inradius) = match b {
            Body::Ellipsoid(e) => match e.ball_radius() {
                Some(r) => (Shape::Ball(r), r),
                None => {
                    let m = e.shape();
                    (Shape::Ellipsoid(m.matmul(&m.transpose())?), e.inradius())
                }
            },
            Body::VPoly(p) => {
                let p = p.hull_reduced()?;
                let fv = facet_vectors(p.coords(), n)?;
                (Shape::Polytope { coords: p.coords().to_vec(), facet_vectors: fv }, b.inradius()?)
            }
            Body::HPoly(h) => {
                let p = h.vertex_enumeration()?;
                let fv = facet_vectors(p.coords(), n)?;
                (Shape::Polytope { coords: p.coords().to_vec(), facet_vectors: fv }, h.inradius())
            }
        };
        if !(inradius > 0.0) {
            return Err(Error::InvalidBody("body has empty interior".into()));
        }
        Ok(ProjectionOracle { n, shape, inradius, volume })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    /// `|K|` as computed when the oracle was prepared.
    pub fn volume(&self) -> VolumeResult {
        self.volume
    }

    /// True when every projection volume of dimension `k` is the same.
    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball(_))
    }

    /// `|P_{θ⊥} K|` for a unit `θ`.
    pub fn hyperplane_shadow(&self, theta: &[f64]) -> Result<f64> {
        let n = self.n;
        let k = n - 1;
        let v = match &self.shape {
            Shape::Ball(r) => unit_ball_volume(k) * r.powi(k as i32),
            Shape::Ellipsoid(a) => {
                // det(Fᵀ A F) = det(A) · ⟨θ, A⁻¹ θ⟩ for F an orthonormal frame of θ^⊥
                let det = a.det()?;
                let ainv_theta = a.solve(theta)?;
                unit_ball_volume(k) * (det * dot(theta, &ainv_theta)).sqrt()
            }
            Shape::Polytope { facet_vectors, .. } => {
                0.5 * facet_vectors.chunks_exact(n).map(|w| dot(w, theta).abs()).sum::<f64>()
            }
        };
        self.check(v, k)
    }

    /// `|P_F K|`.
    pub fn volume_of(&self, f: &Subspace) -> Result<f64> {
        let k = f.dim();
        if k == 0 || f.ambient_dim() != self.n {
            return Err(Error::BadDims(format!("projection onto a {k}-subspace of R^{}", f.ambient_dim())));
        }
        if k == self.n {
            return Ok(self.volume.value);
        }
        if k == self.n - 1 && !matches!(self.shape, Shape::Ball(_)) {
            return self.hyperplane_shadow(&normal_of(f));
        }
        let v = match &self.shape {
            Shape::Ball(r) => unit_ball_volume(k) * r.powi(k as i32),
            Shape::Ellipsoid(a) => {
                let fr = f.frame();
                let g = fr.transpose().matmul(&a.matmul(&fr)?)?;
                unit_ball_volume(k) * g.det()?.max(0.0).sqrt()
            }
            Shape::Polytope { coords, .. } => {
                let n = self.n;
                if k == 1 {
                    let b = f.basis_vector(0);
                    let (lo, hi) = coords
                        .chunks_exact(n)
                        .map(|v| dot(v, b))
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
                    hi - lo
                } else {
                    let mut flat = vec![0.0; coords.len() / n * k];
                    for (v, out) in coords.chunks_exact(n).zip(flat.chunks_exact_mut(k)) {
                        f.coords_into(v, out);
                    }
                    hull_volume(&flat, k)?
                }
            }
        };
        self.check(v, k)
    }

    fn check(&self, v: f64, k: usize) -> Result<f64> {
        let floor = unit_ball_volume(k) * self.inradius.powi(k as i32);
        if !v.is_finite() || v < floor * (1.0 - INRADIUS_SLACK) {
            return Err(Error::Numerical(format!(
                "projection volume {v} below the inscribed-ball bound {floor}"
            )));
        }
        Ok(v)
    }
}

/// Unit normal of a hyperplane through its frame: the largest residual of a
/// coordinate vector, normalized.
fn normal_of(f: &Subspace) -> Vec<f64> {
    let n = f.ambient_dim();
    let mut best = Vec::new();
    let mut best_norm = -1.0;
    for i in 0..n {
        let r = f.residual(&Vector::basis(n, i));
        let nr = dot(&r, &r);
        if nr > best_norm {
            best_norm = nr;
            best = r;
        }
    }
    let s = best_norm.sqrt();
    best.iter().map(|x| x / s).collect()
}

/// `|P_F K|` for a single subspace.
pub fn projection_volume(b: &Body, f: &Subspace) -> Result<VolumeResult> {
    Ok(VolumeResult::exact(ProjectionOracle::new(b)?.volume_of(f)?))
}

/// The Haar stream shared by all estimators for `(seed, n, k)`.
pub fn grassmann_stream(seed: u64, n: usize, k: usize) -> RngStream {
    RngStream::new(seed, label_hash("grassmann")).labeled(&format!("{n}/{k}"))
}

/// Draws `F_i` from substream `i` and returns `|P_{F_i} K|` in index order.
pub fn shadow_volumes(oracle: &ProjectionOracle, k: usize, count: usize, stream: RngStream) -> Result<Vec<f64>> {
    let n = oracle.dim();
    if k == 0 || k > n {
        return Err(Error::BadDims(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("sample budget must be positive".into()));
    }
    if oracle.is_ball() || k == n {
        return Ok(vec![oracle.volume_of(&Subspace::coordinate(n, &(0..k).collect::<Vec<_>>())?)?; count]);
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = stream.substream(i).rng();
            let f = if k == n - 1 {
                let theta = loop {
                    let g: Vec<f64> = (0..n).map(|_| r.gaussian()).collect();
                    if let Ok(t) = Vector::from(g).normalized() {
                        break t;
                    }
                };
                return oracle.hyperplane_shadow(&theta);
            } else {
                let mut cols: Vec<f64>;
                loop {
                    cols = (0..n * k).map(|_| r.gaussian()).collect();
                    if gram_schmidt_columns(&mut cols, n, k) {
                        break;
                    }
                }
                Subspace::from_basis(n, cols)
            };
            oracle.volume_of(&f)
        })
        .collect()
}

/// Shared samples for one `(body, k)`: the shadow volumes and their group.
#[derive(Debug, Clone)]
pub struct ShadowSample {
    pub n: usize,
    pub k: usize,
    pub group: u64,
    pub seed: u64,
    pub volumes: Vec<f64>,
}

impl ShadowSample {
    pub fn draw(oracle: &ProjectionOracle, k: usize, budget: usize, seed: u64) -> Result<Self> {
        let stream = grassmann_stream(seed, oracle.dim(), k);
        let volumes = shadow_volumes(oracle, k, budget, stream)?;
        Ok(ShadowSample { n: oracle.dim(), k, group: stream.id(), seed, volumes })
    }

    /// `(∫ |P_F K|^p dσ)^{1/p}` without the ball constant; geometric mean at `p = 0`.
    pub fn moment(&self, p: f64) -> Linear {
        if p == 0.0 {
            Linear::mean(self.group, self.volumes.iter().map(|v| v.ln()).collect()).exp()
        } else {
            Linear::mean(self.group, self.volumes.iter().map(|v| v.powf(p)).collect()).powf(1.0 / p)
        }
    }

    /// `Q_{k,p}`.
    pub fn q(&self, p: f64) -> Linear {
        self.moment(p).scale(unit_ball_volume(self.n) / unit_ball_volume(self.k))
    }

    /// `Φ_k`.
    pub fn phi(&self) -> Linear {
        self.q(-(self.n as f64))
    }

    /// Mean of `|P_F K|^{−n}`, the raw polar moment.
    pub fn raw_negative_moment(&self) -> Linear {
        let e = -(self.n as f64);
        Linear::mean(self.group, self.volumes.iter().map(|v| v.powf(e)).collect())
    }
}

/// `Q_{k,p}` of the same body under the oracle's own volume: the ball value
/// `|B_n|^{(n−k)/n} |K|^{k/n}`, as a linear estimate (exact when `|K|` is).
pub fn ball_bound(oracle: &ProjectionOracle, k: usize) -> Linear {
    let n = oracle.dim() as f64;
    let vol = oracle.volume();
    let v = Linear::independent(label_hash("volume") ^ vol.value.to_bits(), vol.value, vol.stderr);
    v.powf(k as f64 / n).scale(unit_ball_volume(oracle.dim()).powf((n - k as f64) / n))
}

fn transform_for(p: f64) -> Transform {
    if p == 0.0 {
        Transform::ExpMean
    } else {
        Transform::ReciprocalRoot { p }
    }
}

/// `Q_{k,p}(K)`.
pub fn q_kp(b: &Body, spec: &QuermassSpec, seed: u64) -> Result<McEstimate> {
    check_spec(b.dim(), spec)?;
    let oracle = ProjectionOracle::new(b)?;
    let s = ShadowSample::draw(&oracle, spec.k, spec.budget, seed)?;
    Ok(s.q(spec.p).to_estimate(seed, transform_for(spec.p)))
}

/// `I_{k,p}(K)`; identically 1 at `k = n`.
pub fn i_kp(b: &Body, spec: &QuermassSpec, seed: u64) -> Result<McEstimate> {
    check_spec(b.dim(), spec)?;
    if spec.k == b.dim() {
        return Ok(McEstimate::exact(1.0, seed));
    }
    let oracle = ProjectionOracle::new(b)?;
    let s = ShadowSample::draw(&oracle, spec.k, spec.budget, seed)?;
    Ok(s.q(spec.p).div(&ball_bound(&oracle, spec.k)).to_estimate(seed, transform_for(spec.p)))
}

fn check_spec(n: usize, spec: &QuermassSpec) -> Result<()> {
    if spec.k == 0 || spec.k > n {
        return Err(Error::BadDims(format!("need 1 <= k <= n, got n = {n}, k = {}", spec.k)));
    }
    if !spec.p.is_finite() {
        return Err(Error::NonFinite("p"));
    }
    if spec.budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be positive".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};
    use crate::bodies::Ellipsoid;
    use crate::grassmann::sample_grassmannian;

    fn cube(n: usize) -> Body {
        standard_body("cube", n, &BodyParams::default()).unwrap()
    }

    #[test]
    fn cube_shadows() {
        let c = cube(3);
        let f = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert!((projection_volume(&c, &f).unwrap().value - 1.0).abs() < 1e-12);
        let theta = [1.0 / 3f64.sqrt(); 3];
        let f = Subspace::orthogonal_to(&theta).unwrap();
        assert!((projection_volume(&c, &f).unwrap().value - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_formula_matches_hull_path() {
        let p = BodyParams { m: Some(25), seed: Some(2), ..Default::default() };
        let b = standard_body("random-poly", 4, &p).unwrap();
        let o = ProjectionOracle::new(&b).unwrap();
        let coords = b.as_vpoly().unwrap().coords().to_vec();
        let mut r = RngStream::new(1, 1).rng();
        for _ in 0..20 {
            let f = sample_grassmannian(4, 3, &mut r).unwrap();
            let mut flat = vec![0.0; coords.len() / 4 * 3];
            for (v, out) in coords.chunks_exact(4).zip(flat.chunks_exact_mut(3)) {
                f.coords_into(v, out);
            }
            let direct = hull_volume(&flat, 3).unwrap();
            assert!((o.volume_of(&f).unwrap() - direct).abs() < 1e-10 * direct);
        }
    }

    #[test]
    fn ellipsoid_hyperplane_formula() {
        let m = Matrix::from_rows(&[vec![2.0, 0.3, 0.0], vec![0.0, 1.0, 0.2], vec![0.1, 0.0, 0.5]]).unwrap();
        let b = Body::Ellipsoid(Ellipsoid::new(Vector::zeros(3), m).unwrap());
        let o = ProjectionOracle::new(&b).unwrap();
        let mut r = RngStream::new(2, 2).rng();
        for _ in 0..20 {
            let f = sample_grassmannian(3, 2, &mut r).unwrap();
            let fr = f.frame();
            let Shape::Ellipsoid(a) = &o.shape else { panic!() };
            let g = fr.transpose().matmul(&a.matmul(&fr).unwrap()).unwrap();
            let direct = std::f64::consts::PI * g.det().unwrap().sqrt();
            assert!((o.volume_of(&f).unwrap() - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn ball_is_exact() {
        let b = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(3), 1.5).unwrap());
        for p in [-3.0, 0.0, 1.0] {
            let q = q_kp(&b, &QuermassSpec::new(2, p, 100), 1).unwrap();
            assert_eq!(q.stderr, 0.0);
            let target = unit_ball_volume(3) * 1.5f64.powi(2);
            assert!((q.value - target).abs() < 1e-12 * target);
        }
        let i = i_kp(&b, &QuermassSpec::phi(3, 1, 100), 1).unwrap();
        assert!((i.value - 1.0).abs() < 1e-12);
        assert_eq!(i.stderr, 0.0);
    }

    #[test]
    fn cube_surface_area() {
        let q = q_kp(&cube(3), &QuermassSpec::new(2, 1.0, 20_000), 5).unwrap();
        assert!((q.value - 2.0).abs() < 4.0 * q.stderr + 1e-3, "{q:?}");
    }

    #[test]
    fn samples_are_shared_across_bodies() {
        let o1 = ProjectionOracle::new(&cube(3)).unwrap();
        let o2 = ProjectionOracle::new(&cube(3).scale(2.0).unwrap()).unwrap();
        let s1 = ShadowSample::draw(&o1, 1, 2000, 9).unwrap();
        let s2 = ShadowSample::draw(&o2, 1, 2000, 9).unwrap();
        let d = s2.q(1.0).sub(&s1.q(1.0).scale(2.0));
        assert!(d.value.abs() < 1e-12 && d.stderr() < 1e-12);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(matches!(q_kp(&cube(3), &QuermassSpec::new(4, 1.0, 10), 0), Err(Error::BadDims(_))));
        assert!(q_kp(&cube(3), &QuermassSpec::new(3, 1.0, 10), 0).unwrap().value > 0.0);
    }
}
