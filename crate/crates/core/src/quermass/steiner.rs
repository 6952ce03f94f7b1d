use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::hull::{body_volume, volume_mc, VolumeResult};
use crate::numerics::linalg::Matrix;
use crate::numerics::rng::RngStream;
use crate::numerics::special::binomial;

/// Least-squares fit of `|K + tB| = Σ_k C(n,k) W_k t^{n−k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerFit {
    /// `Ŵ_0, …, Ŵ_n`; `Ŵ_0 ≈ |B_n|` and `Ŵ_n ≈ |K|`.
    pub coefficients: Vec<f64>,
    /// Standard errors from the weighted normal equations.
    pub stderr: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub volumes: Vec<VolumeResult>,
}

/// Volumes of the parallel bodies on `t_grid` (exact at `t = 0`, Monte Carlo
/// with `budget` samples otherwise), then a weighted fit of the Steiner
/// polynomial with weights `1/max(σ², (1e-6 V)²)`.
pub fn steiner_poly_fit(b: &Body, t_grid: &[f64], budget: usize, rng: RngStream) -> Result<SteinerFit> {
    let n = b.dim();
    let mut distinct: Vec<f64> = t_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < n + 1 {
        return Err(Error::InvalidParameter(format!("need at least {} distinct radii", n + 1)));
    }
    if t_grid.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter("radii must be finite and non-negative".into()));
    }
    let volumes = t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t == 0.0 {
                return body_volume(b, budget, rng.labeled("volume"));
            }
            let pb = b.minkowski_sum_ball(t)?;
            let (lo, hi) = pb.bounding_box()?;
            volume_mc(|x| pb.contains(x), &lo, &hi, budget, rng.substream(i as u64))
        })
        .collect::<Result<Vec<_>>>()?;

    let cols = n + 1;
    let mut ata = Matrix::zeros(cols, cols);
    let mut atv = vec![0.0; cols];
    for (&t, v) in t_grid.iter().zip(&volumes) {
        let row: Vec<f64> = (0..cols).map(|k| binomial(n, k) * t.powi((n - k) as i32)).collect();
        let w = 1.0 / v.stderr.powi(2).max((1e-6 * v.value).powi(2));
        for i in 0..cols {
            atv[i] += w * row[i] * v.value;
            for j in 0..cols {
                ata[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    let coefficients = ata.solve(&atv)?.into_vec();
    let cov = ata.inverse()?;
    let stderr = (0..cols).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    Ok(SteinerFit { coefficients, stderr, t_grid: t_grid.to_vec(), volumes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};
    use crate::numerics::special::unit_ball_volume;

    #[test]
    fn square_fit() {
        let sq = standard_body("cube", 2, &BodyParams::default()).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5];
        let fit = steiner_poly_fit(&sq, &grid, 20_000, RngStream::new(1, 1)).unwrap();
        // |K + tB| = 1 + 4t + πt²
        assert!((fit.coefficients[2] - 1.0).abs() < 1e-6);
        assert!((fit.coefficients[1] - 2.0).abs() < 0.05, "{fit:?}");
        assert!((fit.coefficients[0] - unit_ball_volume(2)).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn too_few_radii() {
        let sq = standard_body("cube", 3, &BodyParams::default()).unwrap();
        assert!(steiner_poly_fit(&sq, &[0.0, 1.0, 1.0, 2.0], 10, RngStream::new(1, 1)).is_err());
    }
}
