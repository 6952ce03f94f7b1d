use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every command. A JSON file of the same shape supplies
/// defaults; flags override it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub k: Option<usize>,
    /// A number, or `log` for the geometric mean.
    pub p: Option<String>,
    pub t: Option<f64>,
    pub u: Option<Vec<f64>>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub catalog: Option<PathBuf>,
    pub verbosity: Option<u8>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Field-wise `self` where set, else `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            n: self.n.or(base.n),
            k: self.k.or(base.k),
            p: self.p.or(base.p),
            t: self.t.or(base.t),
            u: self.u.or(base.u),
            budget: self.budget.or(base.budget),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            catalog: self.catalog.or(base.catalog),
            verbosity: self.verbosity.or(base.verbosity),
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("--seed is required for stochastic commands".into()))
    }

    pub fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
        v.clone().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
    }

    pub fn p_value(&self) -> Result<Option<f64>, CliError> {
        match self.p.as_deref() {
            None => Ok(None),
            Some("log") => Ok(Some(0.0)),
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|p| p.is_finite())
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("--p expects a number or `log`, got `{s}`"))),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig { seed: Some(1), budget: Some(10), ..Default::default() };
        let flags = RunConfig { seed: Some(2), ..Default::default() };
        let c = flags.over(file);
        assert_eq!((c.seed, c.budget), (Some(2), Some(10)));
    }

    #[test]
    fn p_parsing() {
        let c = |p: &str| RunConfig { p: Some(p.into()), ..Default::default() }.p_value();
        assert_eq!(c("log").unwrap(), Some(0.0));
        assert_eq!(c("-3").unwrap(), Some(-3.0));
        assert!(c("x").is_err());
        assert!(c("inf").is_err());
    }
}
