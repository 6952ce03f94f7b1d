use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::numerics::linalg::Vector;
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::stats::Linear;
use crate::quermass::{ProjectionOracle, ShadowSample};
use crate::symmetry::{default_extra, ShadowFamily};

use super::inequalities::{bodies, ks, rounding};
use super::{Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

const STEINER_BODIES: &[&str] = &["simplex3", "cube3", "rpoly3a", "box3a"];

/// Profile grid on `[0, 1]`.
pub const T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn t_grid(cfg: &SuiteConfig) -> Result<Vec<f64>> {
    let mut g = cfg.t_grid.clone().unwrap_or_else(|| T_GRID.to_vec());
    if g.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidParameter("profile parameters must lie in [0, 1]".into()));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

fn family_stream(seed: u64, id: &str, j: usize) -> RngStream {
    RngStream::new(seed, label_hash("shadow-system")).labeled(id).substream(j as u64)
}

fn phi(b: &Body, k: usize, budget: usize, seed: u64) -> Result<Linear> {
    Ok(ShadowSample::draw(&ProjectionOracle::new(b)?, k, budget, seed)?.phi())
}

/// `Φ_k` along `t_grid`, all members sharing one Grassmannian sample set.
fn profile(family: &ShadowFamily, grid: &[f64], k: usize, budget: usize, seed: u64) -> Result<Vec<Linear>> {
    grid.iter().map(|&t| phi(&family.at(t)?, k, budget, seed)).collect()
}

/// Cases `Φ_k(K_u(t_{i+1})) ≥ Φ_k(K_u(t_i))`.
fn monotone_cases(prefix: &str, id: &str, n: usize, k: usize, u: &Vector, grid: &[f64], prof: &[Linear]) -> Vec<CaseRecord> {
    grid.windows(2)
        .zip(prof.windows(2))
        .map(|(t, v)| {
            CaseRecord::new(format!("{prefix}/t{}..{}", t[0], t[1]), id, n)
                .k(k)
                .t(t[1])
                .u(u.as_slice())
                .linear(&v[1], &v[0], Assertion::AtLeast { slack: rounding(v[0].value) })
        })
        .collect()
}

/// Paired `Φ_k(K) − Φ_k(S_u K)` over random directions, plus the profile
/// `t ↦ Φ_k(K_u(t))`. An axis that the body is symmetric about is a control
/// case whose margin must vanish.
pub fn suite_steiner_monotone(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let dirs = cfg.dirs.unwrap_or(8);
    let grid = t_grid(cfg)?;
    let mut cases = Vec::new();
    for (id, b) in bodies(catalog, cfg, STEINER_BODIES)? {
        let n = b.dim();
        let mut directions: Vec<(String, Vector, bool)> = cfg
            .directions(&format!("steiner/{id}"), n, dirs)?
            .into_iter()
            .enumerate()
            .map(|(j, u)| (format!("u{j}"), u, false))
            .collect();
        if cfg.u.is_none() && matches!(catalog.entry(&id)?.kind.as_str(), "cube" | "box") {
            directions.push(("axis".into(), Vector::basis(n, 0), true));
        }
        for (j, (tag, u, control)) in directions.iter().enumerate() {
            let family = ShadowFamily::new(&b, u.as_slice(), default_extra(n), family_stream(cfg.seed, &id, j))?;
            for k in ks(cfg, n) {
                let prefix = format!("{id}/{tag}/k{k}");
                let prof = profile(&family, &grid, k, budget, cfg.seed)?;
                let whole = phi(&b, k, budget, cfg.seed)?;
                let sym = &prof[0];
                let assertion = if *control {
                    Assertion::Equal { slack: rounding(sym.value) }
                } else {
                    Assertion::AtLeast { slack: rounding(sym.value) }
                };
                cases.push(
                    CaseRecord::new(format!("{prefix}/symmetral"), &id, n)
                        .k(k)
                        .p(-(n as f64))
                        .u(u.as_slice())
                        .linear(&whole, sym, assertion),
                );
                cases.extend(monotone_cases(&prefix, &id, n, k, u, &grid, &prof));
            }
        }
    }
    Ok(SuiteReport::new("steiner", cfg.seed, budget, cases))
}

const DICHOTOMY_BODIES: &[&str] = &["simplex3", "box3a", "ball3"];

/// Profiles `t ↦ Φ_k(K_u(t))` with paired samples; asserts monotonicity and
/// notes whether each profile is flat up to some `t` and strictly increasing
/// after it.
pub fn suite_dichotomy(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let grid = t_grid(cfg)?;
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    for (id, b) in bodies(catalog, cfg, DICHOTOMY_BODIES)? {
        let n = b.dim();
        let u = match cfg.u {
            Some(_) => cfg.directions("", n, 1)?.remove(0),
            // the box is symmetric about its first axis, so its profile is flat
            None if catalog.entry(&id)?.kind == "box" => Vector::basis(n, 0),
            None => cfg.directions(&format!("dichotomy/{id}"), n, 1)?.remove(0),
        };
        let family = ShadowFamily::new(&b, u.as_slice(), default_extra(n), family_stream(cfg.seed, &id, 0))?;
        for k in ks(cfg, n) {
            let prefix = format!("{id}/k{k}");
            let prof = profile(&family, &grid, k, budget, cfg.seed)?;
            let strict: Vec<bool> = prof
                .windows(2)
                .map(|v| {
                    let d = v[1].sub(&v[0]);
                    d.value > super::SIGMAS * d.stderr() + rounding(v[0].value)
                })
                .collect();
            let first = strict.iter().position(|&s| s);
            let shaped = first.is_none_or(|i| strict[i..].iter().all(|&s| s));
            notes.push((format!("{prefix}/flat-then-strict"), if shaped { 1.0 } else { 0.0 }));
            notes.push((format!("{prefix}/flat-until-t"), first.map_or(1.0, |i| grid[i])));
            cases.extend(monotone_cases(&prefix, &id, n, k, &u, &grid, &prof));
        }
    }
    let mut report = SuiteReport::new("dichotomy", cfg.seed, budget, cases);
    for (key, v) in notes {
        report = report.with_note(&key, v);
    }
    Ok(report)
}
