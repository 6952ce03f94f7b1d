use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bodies::{standard_body, Body, BodyParams};
use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: BodyParams,
}

/// Named bodies used by the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyCatalog {
    pub version: u32,
    pub bodies: Vec<CatalogEntry>,
}

impl BodyCatalog {
    /// The catalog shipped with the library.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("built-in catalog is valid")
    }

    /// Parses and builds every entry, so invalid bodies fail on load.
    pub fn from_json(s: &str) -> Result<Self> {
        let c: BodyCatalog = serde_json::from_str(s)?;
        for (i, e) in c.bodies.iter().enumerate() {
            if c.bodies[..i].iter().any(|o| o.id == e.id) {
                return Err(Error::InvalidParameter(format!("duplicate catalog id `{}`", e.id)));
            }
            standard_body(&e.kind, e.n, &e.params)?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn entry(&self, id: &str) -> Result<&CatalogEntry> {
        self.bodies.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownName(id.to_string()))
    }

    pub fn body(&self, id: &str) -> Result<Body> {
        let e = self.entry(id)?;
        standard_body(&e.kind, e.n, &e.params)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.bodies.iter().map(|e| e.id.as_str())
    }

    /// Ids of the listed kinds in dimension `n`, in catalog order.
    pub fn select(&self, n: usize, kinds: &[&str]) -> Vec<String> {
        self.bodies
            .iter()
            .filter(|e| e.n == n && kinds.contains(&e.kind.as_str()))
            .map(|e| e.id.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let c = BodyCatalog::builtin();
        assert!(c.ids().count() >= 20);
        assert_eq!(c.body("cube3").unwrap().dim(), 3);
        assert!(matches!(c.body("nope"), Err(Error::UnknownName(_))));
        assert_eq!(c.select(3, &["box"]), vec!["box3a", "box3b"]);
    }

    #[test]
    fn rejects_bad_entries() {
        let dup = r#"{"version":1,"bodies":[{"id":"a","kind":"cube","n":3},{"id":"a","kind":"cube","n":2}]}"#;
        assert!(BodyCatalog::from_json(dup).is_err());
        let bad = r#"{"version":1,"bodies":[{"id":"a","kind":"box","n":3}]}"#;
        assert!(BodyCatalog::from_json(bad).is_err());
    }
}
