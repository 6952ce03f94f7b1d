//! JSON form of a body:
//! `{"kind": "vpoly", "dim": n, "vertices": [[..], ..]}`,
//! `{"kind": "hpoly", "dim": n, "rows": [[a_1, .., a_n, b], ..]}`,
//! `{"kind": "ellipsoid", "dim": n, "center": [..], "shape": [[..], ..]}`.
//!
//! Floats are written in shortest round-trip form, so reading back
//! reproduces every coordinate bit for bit.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Body, Ellipsoid, HPolytope, VPolytope};
use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, Vector};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum BodyRepr {
    Vpoly { dim: usize, vertices: Vec<Vec<f64>> },
    Hpoly { dim: usize, rows: Vec<Vec<f64>> },
    Ellipsoid { dim: usize, center: Vec<f64>, shape: Vec<Vec<f64>> },
}

impl From<&Body> for BodyRepr {
    fn from(b: &Body) -> Self {
        match b {
            Body::VPoly(p) => BodyRepr::Vpoly {
                dim: p.dim(),
                vertices: p.coords().chunks_exact(p.dim()).map(<[f64]>::to_vec).collect(),
            },
            Body::HPoly(h) => BodyRepr::Hpoly {
                dim: h.dim(),
                rows: (0..h.n_rows())
                    .map(|i| {
                        let (a, b) = h.row(i);
                        let mut r = a.to_vec();
                        r.push(b);
                        r
                    })
                    .collect(),
            },
            Body::Ellipsoid(e) => BodyRepr::Ellipsoid {
                dim: e.dim(),
                center: e.center().to_vec(),
                shape: e.shape().to_rows(),
            },
        }
    }
}

impl TryFrom<BodyRepr> for Body {
    type Error = Error;

    fn try_from(r: BodyRepr) -> Result<Body> {
        match r {
            BodyRepr::Vpoly { dim, vertices } => {
                let mut coords = Vec::with_capacity(dim * vertices.len());
                for v in &vertices {
                    if v.len() != dim {
                        return Err(Error::dims(dim, v.len()));
                    }
                    coords.extend_from_slice(v);
                }
                Ok(Body::VPoly(VPolytope::from_flat(dim, coords)?))
            }
            BodyRepr::Hpoly { dim, rows } => {
                let mut normals = Vec::with_capacity(dim * rows.len());
                let mut offsets = Vec::with_capacity(rows.len());
                for r in &rows {
                    if r.len() != dim + 1 {
                        return Err(Error::dims(dim + 1, r.len()));
                    }
                    normals.extend_from_slice(&r[..dim]);
                    offsets.push(r[dim]);
                }
                Ok(Body::HPoly(HPolytope::new(dim, normals, offsets)?))
            }
            BodyRepr::Ellipsoid { dim, center, shape } => {
                if center.len() != dim || shape.len() != dim {
                    return Err(Error::dims(dim, center.len()));
                }
                Ok(Body::Ellipsoid(Ellipsoid::new(Vector::new(center)?, Matrix::from_rows(&shape)?)?))
            }
        }
    }
}

impl Serialize for Body {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BodyRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Body {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BodyRepr::deserialize(d)?;
        Body::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl Body {
    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)?)
    }

    /// Parse errors are serialization errors; a well-formed but invalid
    /// body reports the validation error itself.
    pub fn from_json(s: &str) -> Result<Body> {
        let repr: BodyRepr = serde_json::from_str(s)?;
        Body::try_from(repr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};

    #[test]
    fn round_trip_is_bit_exact() {
        let p = BodyParams { m: Some(20), seed: Some(11), ..Default::default() };
        let b = standard_body("random-poly", 3, &p).unwrap();
        let back = Body::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(b, back);
        let e = standard_body(
            "ellipsoid",
            2,
            &BodyParams { shape: Some(vec![vec![0.1, 0.2], vec![0.3, 1.0 / 3.0]]), ..Default::default() },
        )
        .unwrap();
        assert_eq!(Body::from_json(&e.to_json().unwrap()).unwrap(), e);
    }

    #[test]
    fn h_rows_carry_the_offset_last() {
        let json = r#"{"kind":"hpoly","dim":1,"rows":[[1.0,2.0],[-1.0,0.5]]}"#;
        let b = Body::from_json(json).unwrap();
        assert_eq!(b.bounding_box().unwrap(), (vec![-0.5], vec![2.0]));
        assert!(Body::from_json(r#"{"kind":"sphere","dim":1}"#).is_err());
    }
}
