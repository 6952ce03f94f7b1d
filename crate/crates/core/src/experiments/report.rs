use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::rng::label_hash;
use crate::numerics::stats::Linear;

/// Number of standard errors used by every statistical assertion.
pub const SIGMAS: f64 = 4.0;

/// How a case's margin is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Assertion {
    /// `margin ≥ −(4σ + slack)`.
    AtLeast { slack: f64 },
    /// `margin > 4σ + slack`.
    Strict { slack: f64 },
    /// `|margin| ≤ 4σ + slack`.
    Equal { slack: f64 },
    /// `lo − 4σ ≤ margin ≤ hi + 4σ`.
    Band { lo: f64, hi: f64 },
    /// `|margin| ≤ tol`, deterministic.
    Within { tol: f64 },
    /// Reported, never asserted.
    Info,
}

impl Assertion {
    pub fn at_least() -> Self {
        Assertion::AtLeast { slack: 0.0 }
    }

    pub fn strict() -> Self {
        Assertion::Strict { slack: 0.0 }
    }

    pub fn equal() -> Self {
        Assertion::Equal { slack: 0.0 }
    }

    pub fn holds(&self, margin: f64, stderr: f64) -> bool {
        let s = SIGMAS * stderr;
        match *self {
            Assertion::AtLeast { slack } => margin >= -(s + slack),
            Assertion::Strict { slack } => margin > s + slack,
            Assertion::Equal { slack } => margin.abs() <= s + slack,
            Assertion::Band { lo, hi } => margin >= lo - s && margin <= hi + s,
            Assertion::Within { tol } => margin.abs() <= tol,
            Assertion::Info => true,
        }
    }

    pub fn is_asserted(&self) -> bool {
        !matches!(self, Assertion::Info)
    }
}

/// One checked quantity: `margin = lhs − rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case: String,
    pub body: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_hash: Option<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub stderr: f64,
    pub assertion: Assertion,
    pub pass: bool,
}

impl CaseRecord {
    pub fn new(case: impl Into<String>, body: impl Into<String>, n: usize) -> CaseBuilder {
        CaseBuilder {
            rec: CaseRecord {
                case: case.into(),
                body: body.into(),
                n,
                k: None,
                p: None,
                t: None,
                u_hash: None,
                lhs: 0.0,
                rhs: 0.0,
                margin: 0.0,
                stderr: 0.0,
                assertion: Assertion::Info,
                pass: true,
            },
        }
    }
}

/// Fills the optional parameters, then judges the case.
#[derive(Debug, Clone)]
pub struct CaseBuilder {
    rec: CaseRecord,
}

impl CaseBuilder {
    pub fn k(mut self, k: usize) -> Self {
        self.rec.k = Some(k);
        self
    }

    pub fn p(mut self, p: f64) -> Self {
        self.rec.p = Some(p);
        self
    }

    pub fn t(mut self, t: f64) -> Self {
        self.rec.t = Some(t);
        self
    }

    pub fn u(mut self, u: &[f64]) -> Self {
        self.rec.u_hash = Some(u_hash(u));
        self
    }

    /// Judges `lhs − rhs` with the joint standard error of the difference.
    pub fn linear(self, lhs: &Linear, rhs: &Linear, assertion: Assertion) -> CaseRecord {
        let d = lhs.sub(rhs);
        self.values(lhs.value, rhs.value, d.stderr(), assertion)
    }

    pub fn values(mut self, lhs: f64, rhs: f64, stderr: f64, assertion: Assertion) -> CaseRecord {
        let margin = lhs - rhs;
        self.rec.lhs = lhs;
        self.rec.rhs = rhs;
        self.rec.margin = margin;
        self.rec.stderr = stderr;
        self.rec.assertion = assertion;
        self.rec.pass = margin.is_finite() && stderr.is_finite() && assertion.holds(margin, stderr);
        self.rec
    }
}

/// Short stable hash of a direction.
pub fn u_hash(u: &[f64]) -> String {
    let bits: String = u.iter().map(|x| format!("{:016x}", x.to_bits())).collect();
    format!("{:016x}", label_hash(&bits))
}

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub budget: usize,
    pub pass: bool,
    pub cases: Vec<CaseRecord>,
    /// Values worth recording that are not pass/fail, e.g. estimated constants.
    #[serde(default)]
    pub notes: std::collections::BTreeMap<String, f64>,
}

pub const CSV_HEADER: &str = "suite,case,body,n,k,p,t,u_hash,lhs,rhs,margin,stderr,pass";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, budget: usize, mut cases: Vec<CaseRecord>) -> Self {
        cases.sort_by(|a, b| a.case.cmp(&b.case));
        let pass = cases.iter().all(|c| c.pass);
        SuiteReport { suite: suite.to_string(), seed, budget, pass, cases, notes: Default::default() }
    }

    pub fn with_note(mut self, key: &str, value: f64) -> Self {
        self.notes.insert(key.to_string(), value);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Pretty JSON with sorted keys and shortest round-trip floats.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&self.suite),
                csv_field(&c.case),
                csv_field(&c.body),
                c.n,
                opt(&c.k),
                opt(&c.p),
                opt(&c.t),
                opt(&c.u_hash),
                c.lhs,
                c.rhs,
                c.margin,
                c.stderr,
                c.pass
            );
        }
        out
    }

    /// One line per case, for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let asserted = self.cases.iter().filter(|c| c.assertion.is_asserted()).count();
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{}: {} ({} cases, {} asserted, {} failed)",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.cases.len(),
            asserted,
            failed
        );
        for c in self.failures() {
            let _ = writeln!(out, "  FAIL {} [{}] margin {:.6e} stderr {:.3e}", c.case, c.body, c.margin, c.stderr);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertions() {
        assert!(Assertion::at_least().holds(-0.3, 0.1));
        assert!(!Assertion::at_least().holds(-0.5, 0.1));
        assert!(Assertion::strict().holds(0.5, 0.1));
        assert!(!Assertion::strict().holds(0.4, 0.1));
        assert!(Assertion::equal().holds(-0.4, 0.1));
        assert!(!Assertion::Equal { slack: 0.05 }.holds(0.46, 0.1));
        assert!(Assertion::Band { lo: 0.0, hi: 1.0 }.holds(1.2, 0.1));
        assert!(!Assertion::Band { lo: 0.0, hi: 1.0 }.holds(-0.5, 0.1));
        assert!(!Assertion::Within { tol: 0.01 }.holds(0.02, 1.0));
        assert!(Assertion::Info.holds(f64::NAN, 0.0));
    }

    #[test]
    fn csv_and_json() {
        let a = CaseRecord::new("b", "cube3", 3).k(2).values(2.0, 1.0, 0.1, Assertion::strict());
        let b = CaseRecord::new("a", "ball3", 3).p(-3.0).values(1.0, 1.0, 0.0, Assertion::equal());
        let r = SuiteReport::new("demo", 1, 10, vec![a, b]);
        assert!(r.pass);
        assert_eq!(r.cases[0].case, "a");
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "demo,a,ball3,3,,-3,,,1,1,0,0,true");
        let back = SuiteReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
