use rayon::prelude::*;

use super::ProjectionOracle;
use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::numerics::linalg::{dot, Vector};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::sphere_area;
use crate::numerics::stats::{Linear, McEstimate, Transform};

impl ProjectionOracle {
    /// `‖x‖_{Π*K} = |x| · |P_{x̂⊥} K|`.
    pub fn polar_norm(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::dims(self.dim(), x.len()));
        }
        let r = dot(x, x).sqrt();
        if r == 0.0 {
            return Err(Error::ZeroVector);
        }
        let theta: Vec<f64> = x.iter().map(|v| v / r).collect();
        Ok(r * self.hyperplane_shadow(&theta)?)
    }
}

/// The gauge of the polar projection body at `x`.
pub fn polar_projection_norm(b: &Body, x: &[f64]) -> Result<f64> {
    ProjectionOracle::new(b)?.polar_norm(x)
}

/// Uniform sphere directions for `(seed, n)`, shared across bodies.
pub fn sphere_stream(seed: u64, n: usize) -> RngStream {
    RngStream::new(seed, label_hash("sphere")).labeled(&n.to_string())
}

/// `|Π*K| = (|S^{n−1}|/n) · mean_θ |P_{θ⊥} K|^{−n}` on the sphere stream.
pub fn polar_projection_linear(oracle: &ProjectionOracle, budget: usize, stream: RngStream) -> Result<Linear> {
    let n = oracle.dim();
    if n < 2 {
        return Err(Error::BadDims("polar projection bodies need n >= 2".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidParameter("sample budget must be positive".into()));
    }
    let vals: Vec<f64> = if oracle.is_ball() {
        vec![oracle.hyperplane_shadow(&Vector::basis(n, 0))?.powi(-(n as i32)); budget]
    } else {
        (0..budget as u64)
            .into_par_iter()
            .map(|i| {
                let mut r = stream.substream(i).rng();
                let theta = loop {
                    let g: Vec<f64> = (0..n).map(|_| r.gaussian()).collect();
                    if let Ok(t) = Vector::from(g).normalized() {
                        break t;
                    }
                };
                oracle.hyperplane_shadow(&theta).map(|v| v.powi(-(n as i32)))
            })
            .collect::<Result<_>>()?
    };
    Ok(Linear::mean(stream.id(), vals).scale(sphere_area(n) / n as f64))
}

/// `|Π*K|` by Monte Carlo over uniform directions.
pub fn polar_projection_volume(b: &Body, budget: usize, seed: u64) -> Result<McEstimate> {
    let oracle = ProjectionOracle::new(b)?;
    let est = polar_projection_linear(&oracle, budget, sphere_stream(seed, b.dim()))?;
    Ok(est.to_estimate(seed, Transform::None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};
    use crate::bodies::Ellipsoid;
    use std::f64::consts::PI;

    #[test]
    fn ball_values() {
        let b = Body::Ellipsoid(Ellipsoid::ball(Vector::zeros(3), 1.0).unwrap());
        assert!((polar_projection_norm(&b, &[0.0, 0.6, 0.8]).unwrap() - PI).abs() < 1e-12);
        let v = polar_projection_volume(&b, 10, 1).unwrap();
        assert_eq!(v.stderr, 0.0);
        let target = (4.0 * PI / 3.0) / PI.powi(3);
        assert!((v.value - target).abs() < 1e-12 * target);
    }

    #[test]
    fn gauge_examples() {
        let c = standard_body("cube", 3, &BodyParams::default()).unwrap();
        let o = ProjectionOracle::new(&c).unwrap();
        assert!((o.polar_norm(&[0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let x = [0.3, -0.2, 0.7];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((o.polar_norm(&x2).unwrap() - 2.0 * o.polar_norm(&x).unwrap()).abs() < 1e-12);
        assert_eq!(o.polar_norm(&[0.0; 3]), Err(Error::ZeroVector));
    }

    #[test]
    fn scaling_law() {
        let c = standard_body("simplex", 3, &BodyParams::default()).unwrap();
        let a = polar_projection_linear(&ProjectionOracle::new(&c).unwrap(), 3000, sphere_stream(4, 3)).unwrap();
        let big = c.scale(2.0).unwrap();
        let b = polar_projection_linear(&ProjectionOracle::new(&big).unwrap(), 3000, sphere_stream(4, 3)).unwrap();
        let scale = a.value;
        let d = b.sub(&a.scale(2f64.powi(-6)));
        assert!(d.value.abs() <= 4.0 * d.stderr() + 1e-12 * scale);
    }
}
