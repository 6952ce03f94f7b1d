use crate::bodies::{standard_body, BodyParams};
use crate::error::Result;
use crate::grassmann::Subspace;
use crate::hull::{body_volume, hull_volume};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::unit_ball_volume;
use crate::quermass::{q_kp, steiner_poly_fit, ProjectionOracle, QuermassSpec};

use super::{random_directions, Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const VOLUME_TOL: f64 = 1e-12;
const SHADOW_TOL: f64 = 1e-9;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Exact volumes and cube shadows. Deterministic apart from the directions.
pub fn suite_geometry(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let dirs = cfg.dirs.unwrap_or(100);
    let mut cases = Vec::new();
    for n in cfg.dims_or(&[3, 4]) {
        for (kind, expected) in [("cube", 1.0), ("simplex", 1.0 / factorial(n)), ("cross-polytope", 2f64.powi(n as i32) / factorial(n))] {
            let b = standard_body(kind, n, &BodyParams::default())?;
            let v = body_volume(&b, 1, RngStream::new(cfg.seed, 0))?;
            cases.push(
                CaseRecord::new(format!("volume/{kind}/n{n}"), format!("{kind}{n}"), n)
                    .values(v.value, expected, v.stderr, Assertion::Within { tol: VOLUME_TOL }),
            );
        }
        let cube = standard_body("cube", n, &BodyParams::default())?;
        let oracle = ProjectionOracle::new(&cube)?;
        let p = cube.as_vpoly().expect("cube is a polytope");
        let (mut worst_cauchy, mut worst_hull) = ((0.0f64, 0.0f64), (0.0f64, 0.0f64));
        for theta in random_directions(cfg.seed, &format!("geometry/{n}"), n, dirs) {
            let expected: f64 = theta.as_slice().iter().map(|x| x.abs()).sum();
            let cauchy = oracle.hyperplane_shadow(theta.as_slice())?;
            let f = Subspace::orthogonal_to(theta.as_slice())?;
            let flat: Vec<f64> = p.coords().chunks_exact(n).flat_map(|v| f.coords(v)).collect();
            let hull = hull_volume(&flat, n - 1)?;
            for (worst, got) in [(&mut worst_cauchy, cauchy), (&mut worst_hull, hull)] {
                if (got - expected).abs() >= (worst.0 - worst.1).abs() {
                    *worst = (got, expected);
                }
            }
        }
        for (path, (got, want)) in [("facets", worst_cauchy), ("hull", worst_hull)] {
            cases.push(
                CaseRecord::new(format!("cube-shadow/{path}/n{n}"), format!("cube{n}"), n)
                    .k(n - 1)
                    .values(got, want, 0.0, Assertion::Within { tol: SHADOW_TOL }),
            );
        }
    }
    Ok(SuiteReport::new("geometry", cfg.seed, dirs, cases))
}

/// Radii for the Steiner polynomial fit.
pub const STEINER_GRID: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];

/// `Q_{2,1}` of the unit cube against its surface area, and the Steiner
/// polynomial of `C + tB` against its closed-form coefficients.
pub fn suite_kubota(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let cube = catalog.body("cube3")?;
    let mut cases = Vec::new();
    let q = q_kp(&cube, &QuermassSpec::new(2, 1.0, budget), cfg.seed)?;
    cases.push(
        CaseRecord::new("q21", "cube3", 3)
            .k(2)
            .p(1.0)
            .values(q.value, 2.0, q.stderr, Assertion::Within { tol: 0.01 * 2.0 }),
    );
    let fit = steiner_poly_fit(&cube, &STEINER_GRID, budget, RngStream::new(cfg.seed, label_hash("kubota")))?;
    let targets = [
        (0, unit_ball_volume(3), Some(0.03)),
        (1, std::f64::consts::PI, None),
        (2, 2.0, Some(0.05)),
        (3, 1.0, Some(0.03)),
    ];
    for (i, want, rel) in targets {
        let assertion = match rel {
            Some(r) => Assertion::Within { tol: r * want },
            None => Assertion::Info,
        };
        cases.push(
            CaseRecord::new(format!("steiner-w{i}"), "cube3", 3).values(fit.coefficients[i], want, fit.stderr[i], assertion),
        );
    }
    Ok(SuiteReport::new("kubota", cfg.seed, budget, cases))
}
