use crate::bodies::{difference_body, Body, HPolytope};
use crate::error::{Error, Result};
use crate::hull::hull_volume;
use crate::quermass::{ball_bound, ProjectionOracle, ShadowSample};

use super::inequalities::{bodies, rounding};
use super::{random_directions, Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const SLAB_BODIES: &[&str] = &["cube3", "simplex3", "cross3", "rpoly3a"];

/// `K̃_m = ∩_j {|⟨x, θ_j⟩| ≤ w_K(θ_j)/2}` from `m` directions.
pub fn slab_body(b: &Body, thetas: &[crate::numerics::linalg::Vector]) -> Result<HPolytope> {
    let n = b.dim();
    let mut normals = Vec::with_capacity(2 * n * thetas.len());
    let mut offsets = Vec::with_capacity(2 * thetas.len());
    for t in thetas {
        let neg: Vec<f64> = t.as_slice().iter().map(|x| -x).collect();
        let half = 0.5 * (b.support(t.as_slice())? + b.support(&neg)?);
        normals.extend_from_slice(t.as_slice());
        offsets.push(half);
        normals.extend_from_slice(&neg);
        offsets.push(half);
    }
    HPolytope::new(n, normals, offsets)
}

/// `|K| ≤ |½(K − K)| ≤ |K̃_m|` with exact volumes, and `Φ_1(K) ≥ Φ_1(B_K)`.
pub fn suite_slab_body(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let m = cfg.dirs.unwrap_or(200);
    let mut cases = Vec::new();
    for (id, b) in bodies(catalog, cfg, SLAB_BODIES)? {
        let n = b.dim();
        let Some(p) = b.as_vpoly() else {
            return Err(Error::UnsupportedRepresentation("non-polytope"));
        };
        let c = p.centroid();
        let centered = b.translate(&c.scale(-1.0).into_vec())?;
        let thetas = random_directions(cfg.seed, &format!("slab/{id}"), n, m);
        let slab = slab_body(&centered, &thetas)?.vertex_enumeration()?;
        let v_slab = hull_volume(slab.coords(), n)?;
        let v_k = hull_volume(p.coords(), n)?;
        let half_diff = difference_body(&centered)?.scale(0.5)?;
        let v_half = hull_volume(half_diff.as_vpoly().expect("polytope").coords(), n)?;
        cases.push(
            CaseRecord::new(format!("{id}/slab-volume"), &id, n)
                .values(v_slab, v_k, 0.0, Assertion::AtLeast { slack: rounding(v_k) }),
        );
        cases.push(
            CaseRecord::new(format!("{id}/difference-volume"), &id, n)
                .values(v_half, v_k, 0.0, Assertion::AtLeast { slack: rounding(v_k) }),
        );
        cases.push(
            CaseRecord::new(format!("{id}/slab-contains-difference"), &id, n)
                .values(v_slab, v_half, 0.0, Assertion::AtLeast { slack: rounding(v_half) }),
        );
        let oracle = ProjectionOracle::new(&centered)?;
        let s = ShadowSample::draw(&oracle, 1, budget, cfg.seed)?;
        cases.push(
            CaseRecord::new(format!("{id}/phi1"), &id, n)
                .k(1)
                .p(-(n as f64))
                .linear(&s.phi(), &ball_bound(&oracle, 1), Assertion::at_least()),
        );
    }
    Ok(SuiteReport::new("slab", cfg.seed, budget, cases).with_note("directions", m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};
    use crate::numerics::linalg::Vector;

    #[test]
    fn axis_slabs_of_the_cube() {
        let c = standard_body("cube", 3, &BodyParams::default()).unwrap();
        let thetas: Vec<Vector> = (0..3).map(|i| Vector::basis(3, i)).collect();
        let h = slab_body(&c, &thetas).unwrap();
        let v = hull_volume(h.vertex_enumeration().unwrap().coords(), 3).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
