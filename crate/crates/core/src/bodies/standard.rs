use serde::{Deserialize, Serialize};

use super::{Body, Ellipsoid, VPolytope};
use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::{label_hash, RngStream};

pub const KINDS: &[&str] = &[
    "cube",
    "box",
    "simplex",
    "cross-polytope",
    "random-poly",
    "ball-polytope",
    "ellipsoid",
    "ball",
];

/// Generator parameters; unused fields are ignored by each kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyParams {
    /// Vertex count for the random kinds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Box side lengths, or ellipsoid semi-axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<f64>>,
    /// Full ellipsoid shape matrix, by rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

fn need<T: Clone>(v: &Option<T>, what: &str, kind: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidParameter(format!("`{kind}` needs `{what}`")))
}

fn sides(params: &BodyParams, n: usize, kind: &str) -> Result<Vec<f64>> {
    let s = need(&params.sides, "sides", kind)?;
    if s.len() != n {
        return Err(Error::dims(n, s.len()));
    }
    if s.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("`{kind}` sides must be positive")));
    }
    Ok(s)
}

fn center(params: &BodyParams, n: usize) -> Result<Vector> {
    match &params.center {
        Some(c) if c.len() != n => Err(Error::dims(n, c.len())),
        Some(c) => Vector::new(c.clone()),
        None => Ok(Vector::zeros(n)),
    }
}

fn gaussian_points(n: usize, m: usize, seed: u64, kind: &str, on_sphere: bool) -> Vec<f64> {
    let stream = RngStream::new(seed, label_hash(kind));
    let mut out = Vec::with_capacity(n * m);
    for i in 0..m as u64 {
        let mut r = stream.substream(i).rng();
        let mut p: Vec<f64> = (0..n).map(|_| r.gaussian()).collect();
        if on_sphere {
            let nr = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter_mut().for_each(|x| *x /= nr);
        }
        out.extend(p);
    }
    out
}

/// Named body generators. `cube` and `box` have a vertex at the origin and
/// extend along the positive axes; `simplex` is `conv{0, e_1, …, e_n}`;
/// random kinds are deterministic functions of `seed`.
pub fn standard_body(name: &str, n: usize, params: &BodyParams) -> Result<Body> {
    if !(1..=crate::hull::MAX_DIM).contains(&n) {
        return Err(Error::BadDims(format!("body dimension must be in 1..=6, got {n}")));
    }
    let corner_box = |s: &[f64]| -> Result<Body> {
        let mut coords = Vec::with_capacity(n << n);
        for mask in 0..(1usize << n) {
            for (c, side) in s.iter().enumerate() {
                coords.push(if (mask >> c) & 1 == 1 { *side } else { 0.0 });
            }
        }
        Ok(Body::VPoly(VPolytope::from_flat(n, coords)?))
    };
    match name {
        "cube" => corner_box(&vec![1.0; n]),
        "box" => corner_box(&sides(params, n, name)?),
        "simplex" => {
            let mut coords = vec![0.0; n];
            for i in 0..n {
                coords.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            }
            Ok(Body::VPoly(VPolytope::from_flat(n, coords)?))
        }
        "cross-polytope" => {
            let mut coords = Vec::with_capacity(2 * n * n);
            for i in 0..n {
                for s in [1.0, -1.0] {
                    coords.extend((0..n).map(|j| if i == j { s } else { 0.0 }));
                }
            }
            Ok(Body::VPoly(VPolytope::from_flat(n, coords)?))
        }
        "random-poly" | "ball-polytope" => {
            let m = need(&params.m, "m", name)?;
            let seed = need(&params.seed, "seed", name)?;
            if m < n + 1 {
                return Err(Error::InvalidParameter(format!("`{name}` needs m >= n + 1")));
            }
            let pts = gaussian_points(n, m, seed, name, name == "ball-polytope");
            Ok(Body::VPoly(VPolytope::from_flat(n, pts)?.hull_reduced()?))
        }
        "ellipsoid" => {
            let shape = match (&params.shape, &params.sides) {
                (Some(rows), _) => Matrix::from_rows(rows)?,
                (None, Some(_)) => Matrix::diagonal(&sides(params, n, name)?),
                (None, None) => return Err(Error::InvalidParameter("`ellipsoid` needs `shape` or `sides`".into())),
            };
            if shape.rows() != n || shape.cols() != n {
                return Err(Error::dims(n, shape.rows()));
            }
            Ok(Body::Ellipsoid(Ellipsoid::new(center(params, n)?, shape)?))
        }
        "ball" => Ok(Body::Ellipsoid(Ellipsoid::ball(center(params, n)?, params.radius.unwrap_or(1.0))?)),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{body_volume, VolumeMethod};

    #[test]
    fn named_bodies() {
        let p = BodyParams::default();
        let cube = standard_body("cube", 3, &p).unwrap();
        assert_eq!(cube.as_vpoly().unwrap().n_vertices(), 8);
        let s = RngStream::new(0, 0);
        assert!((body_volume(&cube, 1, s).unwrap().value - 1.0).abs() < 1e-12);
        let simplex = standard_body("simplex", 3, &p).unwrap();
        assert!((body_volume(&simplex, 1, s).unwrap().value - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(standard_body("dodecahedron", 3, &p), Err(Error::UnknownName("dodecahedron".into())));
    }

    #[test]
    fn random_kinds_are_seeded() {
        let p = BodyParams { m: Some(30), seed: Some(7), ..Default::default() };
        let a = standard_body("random-poly", 4, &p).unwrap();
        let b = standard_body("random-poly", 4, &p).unwrap();
        assert_eq!(a, b);
        assert!(standard_body("random-poly", 4, &BodyParams { m: Some(30), ..Default::default() }).is_err());
    }

    #[test]
    fn ball_polytope_volume_near_ball() {
        let p = BodyParams { m: Some(400), seed: Some(3), ..Default::default() };
        let b = standard_body("ball-polytope", 3, &p).unwrap();
        let v = body_volume(&b, 1, RngStream::new(0, 0)).unwrap();
        assert_eq!(v.method, VolumeMethod::Exact);
        let ball = 4.0 * std::f64::consts::PI / 3.0;
        assert!(v.value < ball && v.value > 0.95 * ball, "{}", v.value);
    }
}
