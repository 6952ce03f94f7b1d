use crate::bodies::VPolytope;
use crate::error::Result;
use crate::grassmann::{bp_ratio_check, split_constant, sample_grassmannian, sample_rotation, sample_sphere, Subspace};
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::stats::Linear;
use crate::quermass::{ProjectionOracle, ShadowSample};
use crate::rolodex::{fubini_check, mu_linear, split_stream, wedge_transform_check};

use super::{random_directions, Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const SPLITS: &[(usize, usize)] = &[(3, 2), (4, 2), (4, 3)];

fn splits(cfg: &SuiteConfig) -> Vec<(usize, usize)> {
    SPLITS
        .iter()
        .copied()
        .filter(|&(n, k)| cfg.n.is_none_or(|m| m == n) && cfg.k.is_none_or(|m| m == k))
        .collect()
}

fn direction(cfg: &SuiteConfig, tag: &str, n: usize) -> Result<Vector> {
    Ok(cfg.directions(tag, n, 1)?.remove(0))
}

/// `μ_u(L_{k,u}(K)) / E|P_F K|^{−n}` is the same for every body, namely `c_{n,k}/n`.
pub fn suite_mu(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let mut cases = Vec::new();
    for (n, k) in splits(cfg) {
        let u = direction(cfg, &format!("rolodex/{n}"), n)?;
        let ratio = |id: &str| -> Result<Linear> {
            let oracle = ProjectionOracle::new(&catalog.body(id)?)?;
            let mu = mu_linear(&oracle, u.as_slice(), k, budget, split_stream(cfg.seed, n, k))?;
            let moment = ShadowSample::draw(&oracle, k, budget, cfg.seed)?.raw_negative_moment();
            Ok(mu.div(&moment))
        };
        let reference = ratio(&format!("ball{n}"))?;
        let exact = split_constant(n, k) / n as f64;
        cases.push(
            CaseRecord::new(format!("n{n}/k{k}/ball-constant"), format!("ball{n}"), n)
                .k(k)
                .u(u.as_slice())
                .linear(&reference, &Linear::constant(exact), Assertion::equal()),
        );
        for kind in ["cube", "simplex"] {
            let id = format!("{kind}{n}");
            cases.push(
                CaseRecord::new(format!("n{n}/k{k}/{kind}"), &id, n)
                    .k(k)
                    .u(u.as_slice())
                    .linear(&ratio(&id)?, &reference, Assertion::equal()),
            );
        }
    }
    Ok(SuiteReport::new("rolodex", cfg.seed, budget, cases))
}

/// Split-sampler ratio `rhs/lhs` for five test functions against `f = 1`,
/// and the `f = 1` ratio against `c_{n,k}`.
pub fn suite_bp(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let mut cases = Vec::new();
    for (n, k) in splits(cfg) {
        let u = direction(cfg, &format!("bp/{n}"), n)?;
        let cube = ProjectionOracle::new(&crate::bodies::standard_body("cube", n, &Default::default())?)?;
        let simplex = ProjectionOracle::new(&crate::bodies::standard_body("simplex", n, &Default::default())?)?;
        let e1 = Vector::basis(n, 0);
        let names = ["one", "cube-shadow", "simplex-polar-moment", "axis-projection", "gaussian-bump"];
        let fs: Vec<Box<dyn Fn(&Subspace) -> Result<f64> + Sync>> = vec![
            Box::new(|_| Ok(1.0)),
            Box::new(|f| cube.volume_of(f)),
            Box::new(|f| simplex.volume_of(f).map(|v| v.powi(-(n as i32)))),
            Box::new(|f| Ok(f.project(e1.as_slice()).norm().powi(2))),
            Box::new(|f| {
                let w = f.project(u.as_slice());
                Ok((-4.0 * (1.0 - w.norm().powi(2))).exp())
            }),
        ];
        let stream = RngStream::new(cfg.seed, label_hash("bp")).labeled(&format!("{n}/{k}"));
        let checks = bp_ratio_check(&fs, u.as_slice(), n, k, budget, stream)?;
        let reference = checks[0].ratio();
        cases.push(
            CaseRecord::new(format!("n{n}/k{k}/one-constant"), "one", n)
                .k(k)
                .u(u.as_slice())
                .linear(&reference, &Linear::constant(split_constant(n, k)), Assertion::equal()),
        );
        for (name, c) in names.iter().zip(&checks).skip(1) {
            cases.push(
                CaseRecord::new(format!("n{n}/k{k}/{name}"), *name, n)
                    .k(k)
                    .u(u.as_slice())
                    .linear(&c.ratio(), &reference, Assertion::equal()),
            );
        }
    }
    Ok(SuiteReport::new("bp", cfg.seed, budget, cases))
}

pub const FUBINI_TOL: f64 = 5e-3;
pub const WEDGE_EXACT_TOL: f64 = 1e-9;
pub const WEDGE_RANDOM_TOL: f64 = 1e-7;

const FUBINI_CONFIGS: &[(&str, usize)] =
    &[("cube3", 1), ("simplex3", 1), ("cross3", 1), ("rpoly3a", 1), ("simplex3", 2), ("cube4", 2)];

/// Random `x` in `E^⊥`.
fn complement_vector(e: &Subspace, rng: &mut crate::numerics::rng::StreamRng) -> Vec<f64> {
    loop {
        let r = e.residual(sample_sphere(e.ambient_dim(), rng).as_slice());
        if r.iter().map(|v| v * v).sum::<f64>() > 1e-2 {
            return r;
        }
    }
}

fn polytope(catalog: &BodyCatalog, id: &str) -> Result<VPolytope> {
    let b = catalog.body(id)?;
    b.as_vpoly()
        .cloned()
        .ok_or(crate::error::Error::UnsupportedRepresentation("non-polytope"))
}

/// Slice quadrature of wedge projection volumes, and their transformation
/// rule under linear maps.
pub fn suite_fubini_wedge(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let grid = 64;
    let stream = RngStream::new(cfg.seed, label_hash("fubini-wedge"));
    let mut cases = Vec::new();
    for (i, &(id, d)) in FUBINI_CONFIGS.iter().enumerate() {
        let p = polytope(catalog, id)?;
        let n = p.dim();
        let mut rng = stream.labeled("fubini").substream(i as u64).rng();
        let e = sample_grassmannian(n, d, &mut rng)?;
        let x = complement_vector(&e, &mut rng);
        let c = fubini_check(&p, &e, &x, grid)?;
        cases.push(
            CaseRecord::new(format!("fubini/{i}/{id}/e{d}"), id, n)
                .k(d + 1)
                .values(c.rhs, c.lhs, 0.0, Assertion::Within { tol: FUBINI_TOL * c.lhs.abs() }),
        );
    }

    let wedge_case = |name: String, id: &str, p: &VPolytope, t: &Matrix, xs: &[Vector], tol: f64| -> Result<CaseRecord> {
        let c = wedge_transform_check(p, t, xs)?;
        Ok(CaseRecord::new(name, id, p.dim())
            .k(xs.len())
            .values(c.lhs, c.rhs, 0.0, Assertion::Within { tol: tol * c.rhs.abs().max(1.0) }))
    };
    for id in ["cube3", "simplex3"] {
        let p = polytope(catalog, id)?;
        let n = p.dim();
        let mut rng = stream.labeled("wedge").labeled(id).rng();
        let xs: Vec<Vector> = random_directions(cfg.seed, &format!("wedge/{id}"), n, n);
        let maps = [
            ("identity", Matrix::identity(n)),
            ("orthogonal", sample_rotation(n, &mut rng)?),
            ("diagonal", Matrix::diagonal(&[2.0, 0.5, 3.0][..n])),
        ];
        for (name, t) in &maps {
            for k in 1..=xs.len() {
                cases.push(wedge_case(format!("wedge/{id}/{name}/k{k}"), id, &p, t, &xs[..k], WEDGE_EXACT_TOL)?);
            }
        }
        for j in 0..10u64 {
            let mut r = stream.labeled("wedge-random").labeled(id).substream(j).rng();
            let t = loop {
                let m = Matrix::from_row_major(n, n, (0..n * n).map(|_| r.gaussian()).collect())?;
                let s = m.singular_values();
                if s.iter().copied().fold(f64::INFINITY, f64::min) > 0.1 {
                    break m;
                }
            };
            let k = 1 + (j as usize % n);
            let xs: Vec<Vector> = (0..k).map(|_| sample_sphere(n, &mut r)).collect();
            cases.push(wedge_case(format!("wedge/{id}/random{j}/k{k}"), id, &p, &t, &xs, WEDGE_RANDOM_TOL)?);
        }
    }
    Ok(SuiteReport::new("fubini-wedge", cfg.seed, grid, cases))
}
