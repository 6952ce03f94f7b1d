use crate::error::Result;
use crate::grassmann::sample_sphere;
use crate::numerics::linalg::{dot, Vector};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::unit_ball_volume;
use crate::numerics::stats::Linear;
use crate::quermass::{polar_projection_linear, sphere_stream, ProjectionOracle};
use crate::symmetry::{default_extra, ShadowFamily};

use super::inequalities::{bodies, rounding};
use super::{Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const ITERS: usize = 200;

/// Length of `{s : ‖y + s u‖ ≤ 1}` for the gauge of `Π*K`, which is convex
/// in `s`: golden-section search for the minimum, then bisection on each side.
/// `r` bounds the body, so `|s| ≤ r` on the chord.
fn polar_chord(oracle: &ProjectionOracle, y: &[f64], u: &[f64], r: f64) -> Result<f64> {
    if dot(y, y) == 0.0 {
        return Ok(2.0 / oracle.polar_norm(u)?);
    }
    let g = |s: f64| -> Result<f64> {
        let x: Vec<f64> = y.iter().zip(u).map(|(a, b)| a + s * b).collect();
        oracle.polar_norm(&x)
    };
    let bound = 1.01 * r;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (-bound, bound);
    let tol = 1e-13 * bound;
    for _ in 0..ITERS {
        if b - a <= tol {
            break;
        }
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c)? < g(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let s_min = 0.5 * (a + b);
    if g(s_min)? > 1.0 {
        return Ok(0.0);
    }
    let crossing = |inside: f64, outside: f64| -> Result<f64> {
        let (mut lo, mut hi) = (inside, outside);
        for _ in 0..ITERS {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid)? <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    Ok(crossing(s_min, bound)? - crossing(s_min, -bound)?)
}

/// `Π*K ⊆ R·B` with `R = 1/(|B_{n−1}| ρ^{n−1})`.
fn polar_radius(oracle: &ProjectionOracle) -> f64 {
    let n = oracle.dim();
    1.0 / (unit_ball_volume(n - 1) * oracle.inradius().powi(n as i32 - 1))
}

const PETTY_BODIES: &[&str] = &["simplex3", "cube3", "rpoly3a"];
const CHORD_POINTS: usize = 50;

/// `|Π*K| ≤ |Π*S_u K|`, globally by paired Monte Carlo and chord by chord
/// along `u` with deterministic root finding; plus the ball value.
pub fn suite_petty(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let dirs = cfg.dirs.unwrap_or(4);
    let mut cases = Vec::new();

    let n_ball = cfg.n.unwrap_or(3);
    let ball = ProjectionOracle::new(&catalog.body(&format!("ball{n_ball}"))?)?;
    let got = polar_projection_linear(&ball, budget, sphere_stream(cfg.seed, n_ball))?;
    let expected = unit_ball_volume(n_ball) / unit_ball_volume(n_ball - 1).powi(n_ball as i32);
    cases.push(
        CaseRecord::new("ball/volume", format!("ball{n_ball}"), n_ball)
            .linear(&got, &Linear::constant(expected), Assertion::Equal { slack: 1e-12 * expected }),
    );

    for (id, b) in bodies(catalog, cfg, PETTY_BODIES)? {
        let n = b.dim();
        let ok = ProjectionOracle::new(&b)?;
        let pk = polar_projection_linear(&ok, budget, sphere_stream(cfg.seed, n))?;
        let points = RngStream::new(cfg.seed, label_hash("petty/chords")).labeled(&id);
        for (j, u) in cfg.directions(&format!("petty/{id}"), n, dirs)?.into_iter().enumerate() {
            let u = u.as_slice();
            let family_rng = RngStream::new(cfg.seed, label_hash("shadow-system")).labeled(&id).substream(j as u64);
            let sym = ShadowFamily::new(&b, u, default_extra(n), family_rng)?.at(0.0)?;
            let os = ProjectionOracle::new(&sym)?;
            let ps = polar_projection_linear(&os, budget, sphere_stream(cfg.seed, n))?;
            let prefix = format!("{id}/u{j}");
            cases.push(
                CaseRecord::new(format!("{prefix}/global"), &id, n)
                    .u(u)
                    .linear(&ps, &pk, Assertion::AtLeast { slack: rounding(pk.value) }),
            );

            let r = polar_radius(&ok).max(polar_radius(&os));
            let slack = 4e-9 * r;
            let origin = vec![0.0; n];
            let (lk, ls) = (polar_chord(&ok, &origin, u, r)?, polar_chord(&os, &origin, u, r)?);
            cases.push(
                CaseRecord::new(format!("{prefix}/chord-origin"), &id, n)
                    .u(u)
                    .values(ls, lk, 0.0, Assertion::AtLeast { slack }),
            );
            let mut worst: Option<(f64, f64)> = None;
            for i in 0..CHORD_POINTS as u64 {
                let mut rng = points.substream(j as u64).substream(i).rng();
                let w = sample_sphere(n, &mut rng);
                let s = dot(w.as_slice(), u);
                let w: Vec<f64> = w.as_slice().iter().zip(u).map(|(a, b)| a - s * b).collect();
                let Ok(w) = Vector::from(w).normalized() else { continue };
                let extent = 1.0 / os.polar_norm(w.as_slice())?;
                let y = w.scale(rng.uniform() * extent);
                let (lk, ls) = (polar_chord(&ok, y.as_slice(), u, r)?, polar_chord(&os, y.as_slice(), u, r)?);
                if worst.is_none_or(|(a, b)| ls - lk < a - b) {
                    worst = Some((ls, lk));
                }
            }
            if let Some((ls, lk)) = worst {
                cases.push(
                    CaseRecord::new(format!("{prefix}/chord-worst"), &id, n)
                        .u(u)
                        .values(ls, lk, 0.0, Assertion::AtLeast { slack }),
                );
            }
        }
    }
    Ok(SuiteReport::new("petty", cfg.seed, budget, cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{standard_body, BodyParams};

    #[test]
    fn ball_chords() {
        let b = standard_body("ball", 3, &BodyParams::default()).unwrap();
        let o = ProjectionOracle::new(&b).unwrap();
        // Π*B is the ball of radius 1/π
        let u = [0.0, 0.0, 1.0];
        let r = polar_radius(&o);
        let l0 = polar_chord(&o, &[0.0, 0.0, 0.0], &u, r).unwrap();
        assert!((l0 - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        let y = [0.2 / std::f64::consts::PI, 0.0, 0.0];
        let l = polar_chord(&o, &y, &u, r).unwrap();
        let want = 2.0 * (1.0 - 0.04f64).sqrt() / std::f64::consts::PI;
        assert!((l - want).abs() < 1e-10, "{l} {want}");
        assert_eq!(polar_chord(&o, &[0.5, 0.0, 0.0], &u, r).unwrap(), 0.0);
    }
}
