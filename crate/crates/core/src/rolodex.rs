//! Wedge projection volumes `|P_{E∧x} K| = |P_{E⊥} x| · |P_{span(E,x)} K|`,
//! the sets `L_E(K) = {x ∈ E^⊥ : |P_{E∧x} K| ≤ 1}` through their gauge, and
//! numerical checks of the slice formula, the linear-map rule and the
//! Rolodex measure `μ_u(L_{k,u}(K))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, VPolytope};
use crate::error::{Error, Result};
use crate::grassmann::{sample_split, span_of, Subspace};
use crate::hull::hull_volume;
use crate::numerics::linalg::{dot, qr_orthonormalize, Matrix, Vector};
use crate::numerics::lp::{LpOutcome, LpProblem};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::sphere_area;
use crate::numerics::stats::{Linear, McEstimate, Transform};
use crate::quermass::ProjectionOracle;

impl ProjectionOracle {
    /// `|P_{E∧x} K|`; zero when `x ∈ E`.
    pub fn wedge_volume(&self, e: &Subspace, x: &[f64]) -> Result<f64> {
        let r = e.residual(x);
        let nr = dot(&r, &r).sqrt();
        if nr <= 1e-14 * (1.0 + dot(x, x).sqrt()) {
            return Ok(0.0);
        }
        let f = span_of(e, x)?;
        Ok(nr * self.volume_of(&f)?)
    }
}

/// `|P_{E∧x} K|`.
pub fn wedge_volume(b: &Body, e: &Subspace, x: &[f64]) -> Result<f64> {
    if e.ambient_dim() != b.dim() || x.len() != b.dim() {
        return Err(Error::dims(b.dim(), x.len()));
    }
    let r = e.residual(x);
    if dot(&r, &r).sqrt() <= 1e-14 * (1.0 + dot(x, x).sqrt()) {
        return Ok(0.0);
    }
    ProjectionOracle::new(b)?.wedge_volume(e, x)
}

fn check_in_complement(e: &Subspace, x: &[f64]) -> Result<()> {
    let off = e.coords(x).iter().map(|c| c * c).sum::<f64>().sqrt();
    if off > 1e-9 * (1.0 + dot(x, x).sqrt()) {
        return Err(Error::InvalidParameter("x must lie in E^⊥".into()));
    }
    Ok(())
}

/// `x ∈ L_E(K)`, i.e. `‖x‖_{L_E(K)} = |P_{E∧x} K| ≤ 1`.
pub fn le_membership(b: &Body, e: &Subspace, x: &[f64]) -> Result<bool> {
    check_in_complement(e, x)?;
    Ok(wedge_volume(b, e, x)? <= 1.0)
}

/// Both sides of `|P_{E∧x} K| = ∫_E (h_{K^w}(x) + h_{K^w}(−x)) dw`,
/// with `K^w = (K − w) ∩ E^⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FubiniCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl FubiniCheck {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// `max/min ⟨z, x⟩` over `z ∈ K` with `P_E z = w`, by LP over vertex weights.
struct SliceWidth {
    n_vertices: usize,
    /// `⟨v_i, x⟩`.
    heights: Vec<f64>,
    /// `E`-coordinates of every vertex, one row per basis vector of `E`.
    e_rows: Vec<Vec<f64>>,
}

impl SliceWidth {
    fn new(p: &VPolytope, e: &Subspace, x: &[f64]) -> Self {
        let m = p.n_vertices();
        let heights = (0..m).map(|i| dot(p.vertex(i), x)).collect();
        let e_rows = (0..e.dim())
            .map(|j| (0..m).map(|i| dot(p.vertex(i), e.basis_vector(j))).collect())
            .collect();
        SliceWidth { n_vertices: m, heights, e_rows }
    }

    fn extreme(&self, w: &[f64], sign: f64) -> Result<Option<f64>> {
        let mut lp = LpProblem::new(self.n_vertices).maximize(self.heights.iter().map(|h| sign * h).collect())?;
        lp.add_eq(vec![1.0; self.n_vertices], 1.0)?;
        for (row, &wj) in self.e_rows.iter().zip(w) {
            lp.add_eq(row.clone(), wj)?;
        }
        Ok(match lp.solve()? {
            LpOutcome::Optimal(s) => Some(sign * s.value),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => return Err(Error::Numerical("unbounded slice LP".into())),
        })
    }

    /// `h_{K^w}(x) + h_{K^w}(−x)`, zero outside `P_E K`.
    fn width(&self, w: &[f64]) -> Result<f64> {
        match (self.extreme(w, 1.0)?, self.extreme(w, -1.0)?) {
            (Some(hi), Some(lo)) => Ok((hi - lo).max(0.0)),
            _ => Ok(0.0),
        }
    }

    fn range(&self, j: usize) -> (f64, f64) {
        self.e_rows[j].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)))
    }
}

fn trapezoid(vals: &[f64], h: f64) -> f64 {
    let last = vals.len() - 1;
    h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[last]))
}

/// Trapezoid rule at `grid` and `grid/2` panels, Richardson-extrapolated.
fn richardson(vals: &[f64], h: f64) -> f64 {
    let fine = trapezoid(vals, h);
    let coarse: Vec<f64> = vals.iter().step_by(2).copied().collect();
    let coarse = trapezoid(&coarse, 2.0 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Checks the slice formula for `dim E ∈ {1, 2}` and `x ∈ E^⊥`; `grid` is
/// the (even) number of panels per axis.
pub fn fubini_check(b: &VPolytope, e: &Subspace, x: &[f64], grid: usize) -> Result<FubiniCheck> {
    if !(1..=2).contains(&e.dim()) {
        return Err(Error::BadDims(format!("slice quadrature needs dim E in 1..=2, got {}", e.dim())));
    }
    if grid < 2 || grid % 2 != 0 {
        return Err(Error::InvalidParameter("grid must be a positive even number".into()));
    }
    check_in_complement(e, x)?;
    let lhs = wedge_volume(&Body::VPoly(b.clone()), e, x)?;
    let slices = SliceWidth::new(b, e, x);
    let (a0, a1) = slices.range(0);
    let ha = (a1 - a0) / grid as f64;
    let rhs = if e.dim() == 1 {
        let vals = (0..=grid)
            .into_par_iter()
            .map(|i| slices.width(&[a0 + i as f64 * ha]))
            .collect::<Result<Vec<_>>>()?;
        richardson(&vals, ha)
    } else {
        // inner integral over the second coordinate on the exact extent of
        // P_E K at each first coordinate
        let outer = (0..=grid)
            .into_par_iter()
            .map(|i| {
                let a = a0 + i as f64 * ha;
                let Some((b0, b1)) = shadow_extent(&slices, a)? else { return Ok(0.0) };
                let hb = (b1 - b0) / grid as f64;
                if hb <= 0.0 {
                    return Ok(0.0);
                }
                let vals = (0..=grid).map(|j| slices.width(&[a, b0 + j as f64 * hb])).collect::<Result<Vec<_>>>()?;
                Ok(richardson(&vals, hb))
            })
            .collect::<Result<Vec<_>>>()?;
        richardson(&outer, ha)
    };
    Ok(FubiniCheck { lhs, rhs })
}

/// `{b : (a, b) ∈ P_E K}` for a two-dimensional `E`.
fn shadow_extent(s: &SliceWidth, a: f64) -> Result<Option<(f64, f64)>> {
    let m = s.n_vertices;
    let solve = |sign: f64| -> Result<Option<f64>> {
        let mut lp = LpProblem::new(m).maximize(s.e_rows[1].iter().map(|v| sign * v).collect())?;
        lp.add_eq(vec![1.0; m], 1.0)?;
        lp.add_eq(s.e_rows[0].clone(), a)?;
        Ok(lp.solve()?.optimal().map(|o| sign * o.value))
    };
    Ok(match (solve(-1.0)?, solve(1.0)?) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        _ => None,
    })
}

/// Both sides of `|P_{x_1∧…∧x_k} T(K)| = |P_{Tᵀx_1∧…∧Tᵀx_k} K|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeTransformCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// `Δ(x_1..x_k) · |P_{span} A|`, with `Δ` the parallelepiped volume.
fn multi_wedge(p: &VPolytope, xs: &[Vector]) -> Result<f64> {
    let n = p.dim();
    let k = xs.len();
    let cols: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
    let m = Matrix::from_cols(&cols)?;
    let gram = m.transpose().matmul(&m)?;
    let delta = gram.det()?.max(0.0).sqrt();
    if delta <= 1e-12 * xs.iter().map(|x| x.norm()).product::<f64>() {
        return Err(Error::DependentVector);
    }
    let q = qr_orthonormalize(&m)?;
    let f = Subspace::new(&q)?;
    let vol = if k == n {
        hull_volume(p.coords(), n)?
    } else {
        let mut flat = vec![0.0; p.n_vertices() * k];
        for (v, out) in p.coords().chunks_exact(n).zip(flat.chunks_exact_mut(k)) {
            f.coords_into(v, out);
        }
        hull_volume(&flat, k)?
    };
    Ok(delta * vol)
}

/// Evaluates both sides with exact hull volumes.
pub fn wedge_transform_check(b: &VPolytope, t: &Matrix, xs: &[Vector]) -> Result<WedgeTransformCheck> {
    let n = b.dim();
    if t.rows() != n || t.cols() != n {
        return Err(Error::dims(n, t.rows()));
    }
    if xs.is_empty() || xs.len() > n {
        return Err(Error::BadDims(format!("need 1..={n} vectors, got {}", xs.len())));
    }
    let image = b.map_vertices(|v| t.mul_vec(v).expect("conformable").into_vec())?;
    let lhs = multi_wedge(&image, xs)?;
    let pulled: Vec<Vector> = xs.iter().map(|x| t.tr_mul_vec(x)).collect::<Result<_>>()?;
    let rhs = multi_wedge(b, &pulled)?;
    Ok(WedgeTransformCheck { lhs, rhs })
}

/// The split-sampler stream for `(seed, n, k, u)`, shared across bodies.
pub fn split_stream(seed: u64, n: usize, k: usize) -> RngStream {
    RngStream::new(seed, label_hash("rolodex")).labeled(&format!("{n}/{k}"))
}

/// `μ_u(L_{k,u}(K)) = |S^{n−k}|/n · E[|⟨θ,u⟩|^{k−1} |P_{span(E,θ)} K|^{−n}]`
/// with `E` Haar on `G_{u⊥,k−1}` and `θ` uniform on the sphere of `E^⊥`;
/// the radial integral is done in closed form.
pub fn mu_linear(oracle: &ProjectionOracle, u: &[f64], k: usize, budget: usize, stream: RngStream) -> Result<Linear> {
    let n = oracle.dim();
    if k == 0 || k >= n {
        return Err(Error::BadDims(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be positive".into()));
    }
    let vals = (0..budget as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_split(u, n, k, &mut stream.substream(i).rng())?;
            let v = oracle.volume_of(&s.span())?;
            Ok(s.weight * v.powi(-(n as i32)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Linear::mean(stream.id(), vals).scale(sphere_area(n - k + 1) / n as f64))
}

/// `μ_u(L_{k,u}(K))`.
pub fn mu_estimate(b: &Body, u: &[f64], k: usize, budget: usize, seed: u64) -> Result<McEstimate> {
    let oracle = ProjectionOracle::new(b)?;
    Ok(mu_linear(&oracle, u, k, budget, split_stream(seed, b.dim(), k))?.to_estimate(seed, Transform::None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{polar, standard_body, BodyParams, Ellipsoid};
    use crate::grassmann::sample_rotation;

    fn named(kind: &str, n: usize) -> VPolytope {
        standard_body(kind, n, &BodyParams::default()).unwrap().as_vpoly().unwrap().clone()
    }

    #[test]
    fn wedge_examples() {
        let cube = Body::VPoly(named("cube", 3));
        let e = Subspace::coordinate(3, &[0]).unwrap();
        assert!((wedge_volume(&cube, &e, &[0.0, 1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((wedge_volume(&cube, &e, &[0.0, 2.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(wedge_volume(&cube, &e, &[3.0, 0.0, 0.0]).unwrap(), 0.0);
        let cross = Body::VPoly(named("cross-polytope", 3));
        let x = [0.3, -0.4, 0.5];
        let h = cross.support(&x).unwrap();
        let w = wedge_volume(&cross, &Subspace::empty(3), &x).unwrap();
        assert!((w - 2.0 * h).abs() < 1e-12);
    }

    #[test]
    fn k1_level_set_is_half_polar() {
        let cross = named("cross-polytope", 3);
        let pol = polar(&cross).unwrap();
        let body = Body::VPoly(cross);
        let mut r = RngStream::new(6, 6).rng();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| 0.8 * (r.uniform() - 0.5)).collect();
            let inside = le_membership(&body, &Subspace::empty(3), &x).unwrap();
            let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            let g = wedge_volume(&body, &Subspace::empty(3), &x).unwrap();
            if (g - 1.0).abs() > 1e-9 {
                assert_eq!(inside, pol.contains(&doubled));
            }
        }
    }

    #[test]
    fn fubini_axis_cube() {
        let e = Subspace::coordinate(3, &[0]).unwrap();
        let c = fubini_check(&named("cube", 3), &e, &[0.0, 1.0, 0.0], 16).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 1.0).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn fubini_simplex_two_dimensional_e() {
        let e = Subspace::coordinate(3, &[0, 1]).unwrap();
        let c = fubini_check(&named("simplex", 3), &e, &[0.0, 0.0, 1.0], 32).unwrap();
        assert!(c.relative_error() < 5e-3, "{c:?}");
    }

    #[test]
    fn wedge_rule_for_rotations_and_scalings() {
        let cube = named("cube", 3);
        let xs = vec![Vector::basis(3, 0), Vector::basis(3, 1)];
        let c = wedge_transform_check(&cube, &Matrix::diagonal(&[2.0, 1.0, 1.0]), &xs).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-9 && (c.rhs - 2.0).abs() < 1e-9);
        let q = sample_rotation(3, &mut RngStream::new(1, 1).rng()).unwrap();
        let c = wedge_transform_check(&cube, &q, &xs).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-9);
    }

    #[test]
    fn mu_is_u_independent_on_the_ball() {
        let ball = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(3), 1.0).unwrap());
        let o = ProjectionOracle::new(&ball).unwrap();
        let a = mu_linear(&o, &[1.0, 0.0, 0.0], 2, 20_000, split_stream(1, 3, 2)).unwrap();
        let b = mu_linear(&o, &[0.0, 0.6, 0.8], 2, 20_000, split_stream(2, 3, 2)).unwrap();
        let d = a.sub(&b);
        assert!(d.value.abs() <= 4.0 * d.stderr(), "{} ± {}", d.value, d.stderr());
        // k = 1 is the plain sphere average
        let one = mu_linear(&o, &[1.0, 0.0, 0.0], 1, 100, split_stream(1, 3, 1)).unwrap();
        assert!((one.value - sphere_area(3) / 3.0 / 8.0).abs() < 1e-12);
    }
}
