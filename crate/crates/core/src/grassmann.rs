//! Haar sampling of rotations, spheres and Grassmannians, and the split
//! sampler `(E, θ)` with `E ⊂ u^⊥` of dimension `k − 1` and `θ ∈ S(E^⊥)`,
//! weighted by `|⟨θ, u⟩|^{k−1}`.
//!
//! The split sampler realizes the change of variables
//! `c_{n,k} ∫_{G_{n,k}} f dσ = ∫_{G_{u⊥,k−1}} ∫_{S(E⊥)} f(span(E, θ)) |⟨θ,u⟩|^{k−1} dθ dE`,
//! and [`bp_ratio_check`] estimates the unknown constant as a ratio of means.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::linalg::{dot, gram_schmidt_columns, orthogonal_complement, Matrix, Vector};
use crate::numerics::rng::{RngStream, StreamRng};
use crate::numerics::special::{gamma, sphere_area};
use crate::numerics::stats::Linear;

/// A `k`-dimensional linear subspace of `R^n`, held as `k` orthonormal basis
/// vectors stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    k: usize,
    basis: Vec<f64>,
}

impl Subspace {
    /// From an `n × k` matrix with orthonormal columns (checked to 1e-10).
    pub fn new(frame: &Matrix) -> Result<Self> {
        if !frame.is_orthonormal_columns(1e-10) {
            return Err(Error::RankDeficient);
        }
        let (n, k) = (frame.rows(), frame.cols());
        let mut basis = Vec::with_capacity(n * k);
        for j in 0..k {
            basis.extend_from_slice(&frame.col(j));
        }
        Ok(Subspace { n, k, basis })
    }

    /// From `k` contiguous orthonormal vectors; the caller guarantees
    /// orthonormality.
    pub(crate) fn from_basis(n: usize, basis: Vec<f64>) -> Self {
        debug_assert_eq!(basis.len() % n, 0);
        Subspace { n, k: basis.len() / n, basis }
    }

    pub fn empty(n: usize) -> Self {
        Subspace { n, k: 0, basis: Vec::new() }
    }

    /// `span(e_i : i ∈ axes)`.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let mut basis = vec![0.0; n * axes.len()];
        for (j, &a) in axes.iter().enumerate() {
            if a >= n || axes[..j].contains(&a) {
                return Err(Error::BadDims(format!("axes {axes:?} in R^{n}")));
            }
            basis[j * n + a] = 1.0;
        }
        Ok(Subspace { n, k: axes.len(), basis })
    }

    /// `θ^⊥` for a nonzero `θ`.
    pub fn orthogonal_to(theta: &[f64]) -> Result<Self> {
        let u = Vector::from(theta).normalized()?;
        let c = orthogonal_complement(&u);
        Subspace::new(&c)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn basis_vector(&self, j: usize) -> &[f64] {
        &self.basis[j * self.n..(j + 1) * self.n]
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    /// The `n × k` frame matrix.
    pub fn frame(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.k);
        for j in 0..self.k {
            for i in 0..self.n {
                m[(i, j)] = self.basis[j * self.n + i];
            }
        }
        m
    }

    /// `P = frame · frameᵀ`.
    pub fn projection_matrix(&self) -> Matrix {
        let f = self.frame();
        f.matmul(&f.transpose()).expect("conformable")
    }

    /// Coordinates `frameᵀ x` of the projection of `x`.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        (0..self.k).map(|j| dot(self.basis_vector(j), x)).collect()
    }

    /// Writes `frameᵀ x` into `out[..k]`.
    #[inline]
    pub fn coords_into(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.k) {
            *o = dot(&self.basis[j * self.n..(j + 1) * self.n], x);
        }
    }

    /// `P_F x` in ambient coordinates.
    pub fn project(&self, x: &[f64]) -> Vector {
        let mut out = vec![0.0; self.n];
        for j in 0..self.k {
            let b = self.basis_vector(j);
            let c = dot(b, x);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        Vector::from(out)
    }

    /// `P_{F⊥} x`, with a second pass for accuracy.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = x.to_vec();
        for _ in 0..2 {
            for j in 0..self.k {
                let b = &self.basis[j * self.n..(j + 1) * self.n];
                let c = dot(b, &r);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        r
    }

    /// `max |frameᵀ frame − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                let d = dot(self.basis_vector(i), self.basis_vector(j)) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// Image under a linear map with orthonormal columns `q` (`m × n`),
    /// i.e. embedding a subspace of `R^n` into `R^m`.
    pub fn embed(&self, q: &Matrix) -> Subspace {
        let m = q.rows();
        let mut basis = Vec::with_capacity(m * self.k);
        for j in 0..self.k {
            basis.extend_from_slice(&q.mul_vec(self.basis_vector(j)).expect("conformable"));
        }
        Subspace { n: m, k: self.k, basis }
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::BadDims(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// Gaussian `n × k` frame, orthonormalized with a positive-diagonal QR.
fn gaussian_frame(n: usize, k: usize, rng: &mut StreamRng) -> Vec<f64> {
    loop {
        let mut cols: Vec<f64> = (0..n * k).map(|_| rng.gaussian()).collect();
        if gram_schmidt_columns(&mut cols, n, k) {
            return cols;
        }
    }
}

/// Haar-random `F ∈ G_{n,k}`.
pub fn sample_grassmannian(n: usize, k: usize, rng: &mut StreamRng) -> Result<Subspace> {
    check_dims(n, k)?;
    Ok(Subspace { n, k, basis: gaussian_frame(n, k, rng) })
}

/// Haar-random rotation in `SO(n)`.
pub fn sample_rotation(n: usize, rng: &mut StreamRng) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::BadDims(format!("rotations need n >= 2, got {n}")));
    }
    let cols = gaussian_frame(n, n, rng);
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            q[(i, j)] = cols[j * n + i];
        }
    }
    if q.det()? < 0.0 {
        for i in 0..n {
            q[(i, n - 1)] = -q[(i, n - 1)];
        }
    }
    Ok(q)
}

/// Uniform point on `S^{n−1}`.
pub fn sample_sphere(n: usize, rng: &mut StreamRng) -> Vector {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        if let Ok(v) = Vector::from(g).normalized() {
            return v;
        }
    }
}

/// One draw of the split sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSample {
    pub e: Subspace,
    pub theta: Vector,
    /// `|⟨θ, u⟩|^{k−1}`.
    pub weight: f64,
}

impl SplitSample {
    /// `span(E, θ)`.
    pub fn span(&self) -> Subspace {
        let mut basis = self.e.basis.clone();
        basis.extend_from_slice(&self.theta);
        Subspace::from_basis(self.e.n, basis)
    }
}

/// `E` Haar on `G_{u⊥,k−1}` and `θ` uniform on the unit sphere of `E^⊥`.
pub fn sample_split(u: &[f64], n: usize, k: usize, rng: &mut StreamRng) -> Result<SplitSample> {
    check_dims(n, k)?;
    if k >= n || u.len() != n {
        return Err(Error::BadDims(format!("split sampler needs 1 <= k <= n - 1 and u in R^{n}, got k = {k}")));
    }
    let nu = dot(u, u).sqrt();
    if (nu - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector(nu));
    }
    let e = if k == 1 {
        Subspace::empty(n)
    } else {
        let inner = Subspace { n: n - 1, k: k - 1, basis: gaussian_frame(n - 1, k - 1, rng) };
        inner.embed(&orthogonal_complement(u))
    };
    let theta = loop {
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        if let Ok(t) = Vector::from(e.residual(&g)).normalized() {
            break t;
        }
    };
    let weight = dot(&theta, u).abs().powi(k as i32 - 1);
    Ok(SplitSample { e, theta, weight })
}

/// `span(E, x)`, adding the normalized residual of `x`.
pub fn span_of(e: &Subspace, x: &[f64]) -> Result<Subspace> {
    if x.len() != e.n {
        return Err(Error::dims(e.n, x.len()));
    }
    let r = e.residual(x);
    let nr = dot(&r, &r).sqrt();
    let nx = dot(x, x).sqrt();
    if !(nr > 1e-10 * nx) {
        return Err(Error::DependentVector);
    }
    let mut basis = e.basis.clone();
    basis.extend(r.iter().map(|v| v / nr));
    Ok(Subspace::from_basis(e.n, basis))
}

/// Both sides of the split-sampler identity for one test function.
#[derive(Debug, Clone)]
pub struct BpCheck {
    /// Mean of `f` over Haar `F ∈ G_{n,k}`.
    pub lhs: Linear,
    /// `|S^{n−k}| ·` mean of `f(span(E, θ)) |⟨θ,u⟩|^{k−1}` over split draws.
    pub rhs: Linear,
}

impl BpCheck {
    /// `rhs / lhs`, an estimate of the constant `c_{n,k}`.
    pub fn ratio(&self) -> Linear {
        self.rhs.div(&self.lhs)
    }
}

/// Haar samples `F_i ∈ G_{n,k}`, sample `i` drawn from `stream.substream(i)`.
pub fn grassmann_samples(n: usize, k: usize, count: usize, stream: RngStream) -> Result<Vec<Subspace>> {
    check_dims(n, k)?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = stream.substream(i).rng();
            Subspace { n, k, basis: gaussian_frame(n, k, &mut r) }
        })
        .collect())
}

/// Split samples, sample `i` drawn from `stream.substream(i)`.
pub fn split_samples(u: &[f64], n: usize, k: usize, count: usize, stream: RngStream) -> Result<Vec<SplitSample>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_split(u, n, k, &mut stream.substream(i).rng()))
        .collect()
}

/// The split-sampler constant `c_{n,k} = ∫_{S^{n−k}} |θ_1|^{k−1} dθ
/// = 2π^{(n−k)/2} Γ(k/2) / Γ(n/2)`, the value at `f = 1`.
pub fn split_constant(n: usize, k: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf((n - k) as f64 / 2.0) * gamma(k as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// Estimates both sides for each test function in `fs`, sharing one Haar
/// sample set and one split sample set across all of them, so ratios for
/// different functions can be compared with their joint standard error.
pub fn bp_ratio_check<F>(fs: &[F], u: &[f64], n: usize, k: usize, count: usize, stream: RngStream) -> Result<Vec<BpCheck>>
where
    F: Fn(&Subspace) -> Result<f64> + Sync,
{
    let haar_stream = stream.labeled("bp/haar");
    let split_stream = stream.labeled("bp/split");
    let haar = grassmann_samples(n, k, count, haar_stream)?;
    let split = split_samples(u, n, k, count, split_stream)?;
    let spans: Vec<Subspace> = split.par_iter().map(SplitSample::span).collect();
    let area = sphere_area(n - k + 1);
    fs.iter()
        .map(|f| {
            let lhs_vals: Vec<f64> = haar.par_iter().map(f).collect::<Result<_>>()?;
            let rhs_vals: Vec<f64> = spans
                .par_iter()
                .zip(&split)
                .map(|(s, d)| f(s).map(|v| area * v * d.weight))
                .collect::<Result<_>>()?;
            Ok(BpCheck {
                lhs: Linear::mean(haar_stream.id(), lhs_vals),
                rhs: Linear::mean(split_stream.id(), rhs_vals),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_dimensional_subspace_projects_identically() {
        let mut r = RngStream::new(1, 2).rng();
        let f = sample_grassmannian(4, 4, &mut r).unwrap();
        assert!(f.projection_matrix().max_abs_diff(&Matrix::identity(4)) < 1e-9);
        assert!(matches!(sample_grassmannian(3, 4, &mut r), Err(Error::BadDims(_))));
    }

    #[test]
    fn split_constant_values() {
        use std::f64::consts::PI;
        assert!((split_constant(3, 2) - 4.0).abs() < 1e-12);
        assert!((split_constant(4, 2) - 2.0 * PI).abs() < 1e-12);
        assert!((split_constant(4, 3) - PI).abs() < 1e-12);
        // k = 1: the full sphere area
        assert!((split_constant(3, 1) - sphere_area(3)).abs() < 1e-12);
    }

    #[test]
    fn lines_are_isotropic() {
        let fs = grassmann_samples(3, 1, 100_000, RngStream::new(3, 3)).unwrap();
        let mut acc = [[0.0; 3]; 3];
        for f in &fs {
            let t = f.basis_vector(0);
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += t[i] * t[j] / fs.len() as f64;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((acc[i][j] - target).abs() < 0.01, "{acc:?}");
            }
        }
    }

    #[test]
    fn rotations_are_proper() {
        let mut r = RngStream::new(4, 4).rng();
        for _ in 0..20 {
            let q = sample_rotation(5, &mut r).unwrap();
            assert!(q.orthonormality_defect() < 1e-10);
            assert!((q.det().unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn split_samples_are_orthogonal() {
        let u = [0.0, 0.6, 0.8, 0.0];
        let mut r = RngStream::new(5, 5).rng();
        for k in 1..4 {
            for _ in 0..200 {
                let s = sample_split(&u, 4, k, &mut r).unwrap();
                assert_eq!(s.e.dim(), k - 1);
                for j in 0..s.e.dim() {
                    assert!(dot(s.e.basis_vector(j), &s.theta).abs() < 1e-9);
                    assert!(dot(s.e.basis_vector(j), &u).abs() < 1e-9);
                }
                assert!((0.0..=1.0).contains(&s.weight));
                if k == 1 {
                    assert_eq!(s.weight, 1.0);
                }
                assert!(s.span().orthonormality_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn span_examples() {
        let e = Subspace::coordinate(3, &[0]).unwrap();
        let f = span_of(&e, &[0.0, 1.0, 0.0]).unwrap();
        assert!(f.project(&[3.0, 4.0, 5.0]).max_abs_diff(&[3.0, 4.0, 0.0]) < 1e-15);
        let g = span_of(&Subspace::empty(3), &[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(g.basis(), &[0.0, 0.0, 1.0]);
        assert_eq!(span_of(&e, &[2.0, 0.0, 0.0]), Err(Error::DependentVector));
    }
}
