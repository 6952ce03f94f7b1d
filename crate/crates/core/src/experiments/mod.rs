//! Verification suites. Each suite is a pure function of the catalog and a
//! [`SuiteConfig`]; its report is identical for any worker-pool size.

mod catalog;
mod geometry;
mod inequalities;
mod moments;
mod petty;
mod report;
mod rolodex;
mod slab;
mod steiner;

use serde::{Deserialize, Serialize};

pub use catalog::{BodyCatalog, CatalogEntry};
pub use geometry::{suite_geometry, suite_kubota};
pub use inequalities::{suite_local_min_probe, suite_loomis_whitney, suite_lutwak};
pub use moments::{suite_af_chain, suite_moments};
pub use petty::suite_petty;
pub use report::{u_hash, Assertion, CaseBuilder, CaseRecord, SuiteReport, CSV_HEADER, SIGMAS};
pub use rolodex::{suite_bp, suite_fubini_wedge, suite_mu};
pub use slab::suite_slab_body;
pub use steiner::{suite_dichotomy, suite_steiner_monotone};

use crate::error::{Error, Result};
use crate::grassmann::sample_sphere;
use crate::numerics::linalg::Vector;
use crate::numerics::rng::{label_hash, RngStream};

/// Per-run knobs. Unset fields take each suite's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub budget: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub bodies: Option<Vec<String>>,
    /// Random directions per body.
    pub dirs: Option<usize>,
    pub u: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub p_grid: Option<Vec<f64>>,
    /// Also report cases outside the proven range, never asserted.
    pub exploratory: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig::new(0)
    }
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            budget: None,
            n: None,
            k: None,
            bodies: None,
            dirs: None,
            u: None,
            t_grid: None,
            p_grid: None,
            exploratory: false,
        }
    }

    pub fn budget_or(&self, default: usize) -> Result<usize> {
        match self.budget.unwrap_or(default) {
            0 => Err(Error::InvalidParameter("sample budget must be positive".into())),
            b => Ok(b),
        }
    }

    pub(crate) fn bodies_or(&self, default: &[&str]) -> Vec<String> {
        match &self.bodies {
            Some(b) => b.clone(),
            None => default.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub(crate) fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => default.to_vec(),
        }
    }

    /// The fixed direction if one was given, else `count` seeded random ones.
    pub(crate) fn directions(&self, tag: &str, n: usize, count: usize) -> Result<Vec<Vector>> {
        if let Some(u) = &self.u {
            if u.len() != n {
                return Err(Error::dims(n, u.len()));
            }
            return Ok(vec![Vector::new(u.clone())?.normalized()?]);
        }
        Ok(random_directions(self.seed, tag, n, count))
    }
}

/// Seeded unit vectors, keyed by `tag` so each body gets its own set.
pub fn random_directions(seed: u64, tag: &str, n: usize, count: usize) -> Vec<Vector> {
    let s = RngStream::new(seed, label_hash("directions")).labeled(tag);
    (0..count as u64).map(|j| sample_sphere(n, &mut s.substream(j).rng())).collect()
}

pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo { name: "geometry", description: "exact volumes and cube shadows against closed forms" },
    SuiteInfo { name: "kubota", description: "projection means against the Steiner polynomial of the cube" },
    SuiteInfo { name: "lutwak", description: "affine quermassintegrals against the volume-equivalent ball" },
    SuiteInfo { name: "steiner", description: "monotonicity under Steiner symmetrization and shadow systems" },
    SuiteInfo { name: "dichotomy", description: "shadow-system profiles of affine quermassintegrals" },
    SuiteInfo { name: "moments", description: "monotonicity in p and the ellipsoid threshold below p = -n" },
    SuiteInfo { name: "af-chain", description: "normalized moment quermassintegrals across k" },
    SuiteInfo { name: "loomis-whitney", description: "classical and rotation-averaged Loomis-Whitney" },
    SuiteInfo { name: "petty", description: "polar projection bodies under Steiner symmetrization" },
    SuiteInfo { name: "local-min", description: "perturbations of a ball-polytope" },
    SuiteInfo { name: "slab", description: "intersections of width slabs" },
    SuiteInfo { name: "rolodex", description: "Rolodex measure against the polar projection moment" },
    SuiteInfo { name: "bp", description: "split-sampler constant across test functions" },
    SuiteInfo { name: "fubini-wedge", description: "wedge projection volumes by slicing and linear change" },
];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|s| s.name)
}

/// Runs a suite by name.
pub fn run_suite(name: &str, catalog: &BodyCatalog, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "geometry" => suite_geometry(cfg),
        "kubota" => suite_kubota(catalog, cfg),
        "lutwak" => suite_lutwak(catalog, cfg),
        "steiner" => suite_steiner_monotone(catalog, cfg),
        "dichotomy" => suite_dichotomy(catalog, cfg),
        "moments" => suite_moments(catalog, cfg),
        "af-chain" => suite_af_chain(catalog, cfg),
        "loomis-whitney" => suite_loomis_whitney(catalog, cfg),
        "petty" => suite_petty(catalog, cfg),
        "local-min" => suite_local_min_probe(catalog, cfg),
        "slab" => suite_slab_body(catalog, cfg),
        "rolodex" => suite_mu(catalog, cfg),
        "bp" => suite_bp(cfg),
        "fubini-wedge" => suite_fubini_wedge(catalog, cfg),
        other => Err(Error::UnknownName(other.to_string())),
    }
}
