//! Verification report types.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Named tolerances with their defaults; overridable with `--tol name=value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let entries = [
            ("exact", phasekit::tol::EXACT),
            ("matrix", phasekit::tol::MATRIX),
            ("eigen", phasekit::tol::EIGEN),
            ("distinct", phasekit::gadget::DISTINCT_THRESHOLD),
            ("quantized", 0.05),
        ];
        Tolerances(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Applies `name=value` overrides; unknown names are usage errors.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self, CliError> {
        for item in overrides {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("--tol expects name=value, got '{item}'"))
            })?;
            let value: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| CliError::Usage(format!("invalid tolerance value '{value}'")))?;
            match self.0.get_mut(name) {
                Some(slot) => *slot = value,
                None => {
                    let known: Vec<&str> = self.0.keys().map(String::as_str).collect();
                    return Err(CliError::Usage(format!(
                        "unknown tolerance '{name}' (known: {})",
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(self)
    }
}

/// How `measured` is compared against `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub suite: String,
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Case {
    pub fn new(suite: &str, name: &str, relation: Relation, measured: f64, bound: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => measured <= bound,
            Relation::AtLeast => measured >= bound,
            Relation::Above => measured > bound,
            Relation::Equal => measured == bound,
        };
        Case {
            suite: suite.to_string(),
            name: name.to_string(),
            parameters: BTreeMap::new(),
            measured,
            bound,
            relation,
            pass,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub case_count: usize,
    pub failed: Vec<String>,
    pub cases: Vec<Case>,
    pub tolerances: Tolerances,
    pub versions: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, tolerances: Tolerances, cases: Vec<Case>) -> Self {
        let failed: Vec<String> = cases
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}/{}", c.suite, c.name))
            .collect();
        VerificationReport {
            suite: suite.to_string(),
            seed,
            pass: failed.is_empty(),
            case_count: cases.len(),
            failed,
            cases,
            tolerances,
            versions: versions(),
        }
    }
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        (
            "phasekit".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
        (
            "rng".to_string(),
            phasekit::random::RNG_ALGORITHM.to_string(),
        ),
        (
            "fourier_convention".to_string(),
            "F|y> = M^(-1/2) sum_z exp(+2 pi i y z / M) |z>".to_string(),
        ),
    ])
}
