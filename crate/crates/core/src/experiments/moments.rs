use crate::error::Result;
use crate::numerics::stats::Linear;
use crate::quermass::{ball_bound, ProjectionOracle, ShadowSample};

use super::inequalities::{bodies, ks, rounding};
use super::{Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const MOMENT_BODIES: &[&str] = &["cube3", "simplex3", "rpoly3a", "ellipsoid3b", "cube4", "simplex4", "ellipsoid4b"];

fn p_grid(cfg: &SuiteConfig, default: Vec<f64>) -> Vec<f64> {
    let mut g = cfg.p_grid.clone().unwrap_or(default);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `p ↦ Q_{k,p}` is non-decreasing on shared samples; below `p = −n` a
/// non-spherical ellipsoid falls under the ball value.
pub fn suite_moments(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let mut cases = Vec::new();
    for (id, b) in bodies(catalog, cfg, MOMENT_BODIES)? {
        let n = b.dim();
        let nf = n as f64;
        let oracle = ProjectionOracle::new(&b)?;
        let grid = p_grid(cfg, vec![-(nf + 2.0), -nf, -2.0, -1.0, 0.0, 1.0, 2.0]);
        for k in ks(cfg, n) {
            let s = ShadowSample::draw(&oracle, k, budget, cfg.seed)?;
            let qs: Vec<Linear> = grid.iter().map(|&p| s.q(p)).collect();
            for (w, pair) in grid.windows(2).zip(qs.windows(2)) {
                cases.push(
                    CaseRecord::new(format!("{id}/k{k}/p{}..{}", w[0], w[1]), &id, n)
                        .k(k)
                        .p(w[1])
                        .linear(&pair[1], &pair[0], Assertion::AtLeast { slack: rounding(pair[0].value) }),
                );
            }
            if b.as_ellipsoid().is_some_and(|e| e.ball_radius().is_none()) {
                let p = -(nf + 2.0);
                cases.push(
                    CaseRecord::new(format!("{id}/k{k}/below-threshold"), &id, n)
                        .k(k)
                        .p(p)
                        .linear(&ball_bound(&oracle, k), &s.q(p), Assertion::strict()),
                );
            }
        }
    }
    Ok(SuiteReport::new("moments", cfg.seed, budget, cases))
}

const AF_BODIES: &[&str] = &["cube3", "simplex3", "rpoly3a", "cube4", "simplex4", "rpoly4a"];

/// `I_{k,p}^{1/k} ≥ I_{m,p}^{1/m}` for `k < m` with `m ≥ −p`. Pairs with
/// `m < −p` are reported unasserted in exploratory mode.
pub fn suite_af_chain(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let mut cases = Vec::new();
    for (id, b) in bodies(catalog, cfg, AF_BODIES)? {
        let n = b.dim();
        let nf = n as f64;
        let oracle = ProjectionOracle::new(&b)?;
        let samples: Vec<ShadowSample> =
            (1..n).map(|k| ShadowSample::draw(&oracle, k, budget, cfg.seed)).collect::<Result<_>>()?;
        for p in p_grid(cfg, vec![-nf, -2.0, -1.0, 0.0]) {
            let root = |k: usize| -> Linear {
                if k == n {
                    return Linear::constant(1.0);
                }
                samples[k - 1].q(p).div(&ball_bound(&oracle, k)).powf(1.0 / k as f64)
            };
            for k in 1..n {
                for m in k + 1..=n {
                    let proven = m as f64 >= -p;
                    if !proven && !cfg.exploratory {
                        continue;
                    }
                    let assertion = if proven { Assertion::at_least() } else { Assertion::Info };
                    cases.push(
                        CaseRecord::new(format!("{id}/p{p}/k{k}-m{m}"), &id, n)
                            .k(k)
                            .p(p)
                            .linear(&root(k), &root(m), assertion),
                    );
                }
            }
        }
    }
    Ok(SuiteReport::new("af-chain", cfg.seed, budget, cases))
}
