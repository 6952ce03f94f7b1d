use rayon::prelude::*;

use crate::bodies::{Body, Ellipsoid, VPolytope};
use crate::error::{Error, Result};
use crate::grassmann::{sample_rotation, Subspace};
use crate::hull::hull_volume;
use crate::numerics::linalg::{Matrix, Vector};
use crate::numerics::rng::{label_hash, RngStream};
use crate::numerics::special::{binomial, unit_ball_volume};
use crate::numerics::stats::Linear;
use crate::quermass::{ball_bound, ProjectionOracle, ShadowSample};

use super::{Assertion, BodyCatalog, CaseRecord, SuiteConfig, SuiteReport};

/// Catalog bodies for a suite, restricted to `cfg.n` when set.
pub(crate) fn bodies(catalog: &BodyCatalog, cfg: &SuiteConfig, default: &[&str]) -> Result<Vec<(String, Body)>> {
    let mut out = Vec::new();
    for id in cfg.bodies_or(default) {
        let e = catalog.entry(&id)?;
        if cfg.n.is_some_and(|n| n != e.n) {
            continue;
        }
        out.push((id.clone(), catalog.body(&id)?));
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("no catalog bodies match the requested dimension".into()));
    }
    Ok(out)
}

pub(crate) fn ks(cfg: &SuiteConfig, n: usize) -> Vec<usize> {
    match cfg.k {
        Some(k) => vec![k],
        None => (1..n).collect(),
    }
}

/// Relative slack for comparisons that are exact up to rounding.
pub(crate) fn rounding(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

const LUTWAK_BODIES: &[&str] = &[
    "cube3", "simplex3", "rpoly3a", "rpoly3b", "box3a", "box3b", "ellipsoid3a", "ellipsoid3b", "cube4", "simplex4",
    "rpoly4a", "rpoly4b", "box4a", "box4b", "ellipsoid4a", "ellipsoid4b",
];

/// `Φ_k(K) − Φ_k(B_K)`: strictly positive off ellipsoids, zero on them.
pub fn suite_lutwak(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let mut cases = Vec::new();
    for (id, b) in bodies(catalog, cfg, LUTWAK_BODIES)? {
        let n = b.dim();
        let oracle = ProjectionOracle::new(&b)?;
        let assertion = if b.is_ellipsoid() { Assertion::equal() } else { Assertion::strict() };
        for k in ks(cfg, n) {
            let s = ShadowSample::draw(&oracle, k, budget, cfg.seed)?;
            cases.push(
                CaseRecord::new(format!("{id}/k{k}"), &id, n)
                    .k(k)
                    .p(-(n as f64))
                    .linear(&s.phi(), &ball_bound(&oracle, k), assertion),
            );
        }
    }
    Ok(SuiteReport::new("lutwak", cfg.seed, budget, cases))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn volume_linear(oracle: &ProjectionOracle) -> Linear {
    let v = oracle.volume();
    Linear::independent(label_hash("volume") ^ v.value.to_bits(), v.value, v.stderr)
}

const LW_CLASSICAL: &[&str] = &["cube3", "box3a", "box3b", "simplex3", "cross3", "rpoly3a"];
const LW_AVERAGED: &[&str] = &["cube3", "simplex3", "rpoly3a", "ballpoly3"];

/// Classical and averaged Loomis–Whitney for coordinate `k`-subspaces, and
/// the chain `Q_{2,1} ≥ Q_{2,0} ≥ |B_n|^{(n−2)/n}|K|^{2/n}`.
pub fn suite_loomis_whitney(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let n = cfg.n.unwrap_or(3);
    let k = cfg.k.unwrap_or(n - 1);
    if !(1..n).contains(&k) {
        return Err(Error::BadDims(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    let coord: Vec<Subspace> = subsets(n, k).iter().map(|s| Subspace::coordinate(n, s)).collect::<Result<_>>()?;
    let weight = binomial(n - 1, k - 1);
    let mut cases = Vec::new();

    let classical_ids: Vec<String> = cfg.bodies_or(LW_CLASSICAL);
    for id in &classical_ids {
        let e = catalog.entry(id)?;
        if e.n != n {
            continue;
        }
        let b = catalog.body(id)?;
        let Some(p) = b.as_vpoly() else { continue };
        let oracle = ProjectionOracle::new(&b)?;
        let lhs: f64 = coord.iter().map(|f| oracle.volume_of(f)).product::<Result<f64>>()?;
        let rhs = hull_volume(p.coords(), n)?.powf(weight);
        let assertion = if e.kind == "box" || e.kind == "cube" {
            Assertion::Within { tol: 1e-9 * rhs }
        } else {
            Assertion::AtLeast { slack: rounding(rhs) }
        };
        cases.push(CaseRecord::new(format!("classical/{id}"), id, n).k(k).values(lhs, rhs, 0.0, assertion));
    }

    let rot_stream = RngStream::new(cfg.seed, label_hash("loomis-whitney")).labeled(&format!("{n}/{k}"));
    let ball_top = unit_ball_volume(k).powf(binomial(n, k));
    for id in cfg.bodies_or(LW_AVERAGED) {
        let e = catalog.entry(&id)?;
        if e.n != n {
            continue;
        }
        let b = catalog.body(&id)?;
        let oracle = ProjectionOracle::new(&b)?;
        let logs: Vec<f64> = (0..budget as u64)
            .into_par_iter()
            .map(|i| {
                let u = sample_rotation(n, &mut rot_stream.substream(i).rng())?;
                coord.iter().map(|f| oracle.volume_of(&f.embed(&u)).map(f64::ln)).sum::<Result<f64>>()
            })
            .collect::<Result<_>>()?;
        let lhs = Linear::mean(rot_stream.id(), logs).exp();
        let rhs = volume_linear(&oracle).scale(1.0 / unit_ball_volume(n)).powf(weight).scale(ball_top);
        let assertion = if e.kind == "ball-polytope" {
            // Vertices on the unit sphere: K ⊆ B, so every shadow is at most |B_k|.
            Assertion::Band { lo: 0.0, hi: ball_top - rhs.value }
        } else {
            Assertion::strict()
        };
        cases.push(CaseRecord::new(format!("averaged/{id}"), &id, n).k(k).p(0.0).linear(&lhs, &rhs, assertion));

        if n >= 3 {
            let s = ShadowSample::draw(&oracle, 2, budget, cfg.seed)?;
            let (q1, q0) = (s.q(1.0), s.q(0.0));
            cases.push(CaseRecord::new(format!("w2-chain/{id}/q1-q0"), &id, n).k(2).linear(&q1, &q0, Assertion::at_least()));
            cases.push(
                CaseRecord::new(format!("w2-chain/{id}/q0-ball"), &id, n)
                    .k(2)
                    .p(0.0)
                    .linear(&q0, &ball_bound(&oracle, 2), Assertion::at_least()),
            );
        }
    }
    Ok(SuiteReport::new("loomis-whitney", cfg.seed, budget, cases))
}

/// Radial vertex noise `v ↦ (1 + ε ξ) v` with `ξ` uniform on `[−1, 1]`,
/// rescaled to the original volume.
fn perturb(p: &VPolytope, eps: f64, stream: RngStream) -> Result<VPolytope> {
    let n = p.dim();
    let mut coords = p.coords().to_vec();
    for (i, v) in coords.chunks_exact_mut(n).enumerate() {
        let xi = 2.0 * stream.substream(i as u64).rng().uniform() - 1.0;
        v.iter_mut().for_each(|x| *x *= 1.0 + eps * xi);
    }
    let s = (hull_volume(p.coords(), n)? / hull_volume(&coords, n)?).powf(1.0 / n as f64);
    coords.iter_mut().for_each(|x| *x *= s);
    VPolytope::from_flat(n, coords)?.hull_reduced()
}

/// Perturbation scales at or above which strict growth over the floor is asserted.
pub const LOCAL_MIN_STRICT: f64 = 0.1;

/// `Φ_k(K_ε)/Φ_k(B_{K_ε}) − 1` for random radial perturbations of a
/// ball-polytope, against the floor measured at `ε = 0`; plus an exact
/// ellipsoidal stretch that must stay at zero.
pub fn suite_local_min_probe(catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let budget = cfg.budget_or(200_000)?;
    let n = cfg.n.unwrap_or(3);
    let eps_grid = cfg.t_grid.clone().unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.2]);
    let base_id = match &cfg.bodies {
        Some(b) if b.len() == 1 => b[0].clone(),
        _ => format!("ballpoly{n}"),
    };
    let base = catalog.body(&base_id)?;
    let Some(base) = base.as_vpoly() else {
        return Err(Error::UnsupportedRepresentation("non-polytope"));
    };
    let noise = RngStream::new(cfg.seed, label_hash("local-min")).labeled(&base_id);
    let deviation = |b: &Body, k: usize| -> Result<Linear> {
        let oracle = ProjectionOracle::new(b)?;
        let s = ShadowSample::draw(&oracle, k, budget, cfg.seed)?;
        Ok(s.phi().div(&ball_bound(&oracle, k)).add(&Linear::constant(-1.0)))
    };
    let mut cases = Vec::new();
    for k in ks(cfg, n) {
        let floor = deviation(&Body::VPoly(base.clone()), k)?;
        cases.push(CaseRecord::new(format!("k{k}/floor"), &base_id, n).k(k).t(0.0).linear(&floor, &Linear::constant(0.0), Assertion::Info));
        for &eps in eps_grid.iter().filter(|&&e| e > 0.0) {
            let body = Body::VPoly(perturb(base, eps, noise.labeled(&format!("{eps}")))?);
            let dev = deviation(&body, k)?;
            let id = format!("{base_id}~{eps}");
            cases.push(
                CaseRecord::new(format!("k{k}/eps{eps}/bounded"), &id, n)
                    .k(k)
                    .t(eps)
                    .linear(&dev, &floor.clone().scale(-1.0), Assertion::at_least()),
            );
            if eps >= LOCAL_MIN_STRICT {
                cases.push(
                    CaseRecord::new(format!("k{k}/eps{eps}/above-floor"), &id, n)
                        .k(k)
                        .t(eps)
                        .linear(&dev, &floor, Assertion::strict()),
                );
            }
        }
        let stretch = eps_grid.iter().copied().fold(0.0, f64::max);
        let mut axes = vec![1.0; n];
        axes[0] = 1.0 + stretch;
        axes[n - 1] = 1.0 / (1.0 + stretch);
        let e = Body::Ellipsoid(Ellipsoid::new(Vector::zeros(n), Matrix::diagonal(&axes))?);
        let dev = deviation(&e, k)?;
        cases.push(
            CaseRecord::new(format!("k{k}/ellipsoid{stretch}"), format!("ellipsoid{n}~{stretch}"), n)
                .k(k)
                .t(stretch)
                .linear(&dev, &Linear::constant(0.0), Assertion::equal()),
        );
    }
    Ok(SuiteReport::new("local-min", cfg.seed, budget, cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn perturbation_keeps_volume() {
        let c = BodyCatalog::builtin();
        let b = c.body("ballpoly3").unwrap();
        let p = b.as_vpoly().unwrap();
        let q = perturb(p, 0.2, RngStream::new(1, 1)).unwrap();
        let (v0, v1) = (hull_volume(p.coords(), 3).unwrap(), hull_volume(q.coords(), 3).unwrap());
        assert!((v0 - v1).abs() < 1e-12 * v0);
    }
}
