//! Run configuration, read from TOML and overridden by command-line flags.
//!
//! ```toml
//! seed = 7
//! format = "json"
//! out = "report.json"
//!
//! [scenario]
//! name = "einstein_cylinder"
//! params = { n = 2, resolution = 64 }
//!
//! [operation]
//! name = "spectrum"
//! params = { surface = "equator" }
//!
//! [tolerances]
//! lambda1 = 1e-9
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use horizon_core::scenarios::SCENARIO_NAMES;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const OPERATIONS: [&str; 9] = [
    "classify",
    "perturb",
    "curvature",
    "energy-check",
    "constraints",
    "spectrum",
    "deform",
    "linear",
    "verify",
];

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 16] = [
    ("axioms", 1e-9),
    ("classification", 1e-9),
    ("conformal_rel", 1e-6),
    ("curvature_rel", 1e-6),
    ("deformation_rel", 2e-3),
    ("eigenfunction_variation", 1e-6),
    ("energy_density", 1e-9),
    ("flat_curvature", 1e-10),
    ("imaginary", 1e-8),
    ("lambda1", 1e-9),
    ("potential", 1e-9),
    ("symmetry", 1e-9),
    ("trapping_rel", 1e-6),
    ("vacuum", 1e-8),
    ("vacuum_flat", 1e-12),
    ("witness", 1e-12),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// Numbers stay numbers; anything else is kept as text.
    pub fn parse(s: &str) -> Self {
        match s {
            "true" => ParamValue::Flag(true),
            "false" => ParamValue::Flag(false),
            _ => s.parse().map(ParamValue::Number).unwrap_or_else(|_| ParamValue::Text(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub operation: OperationConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            operation: OperationConfig::default(),
            tolerances: BTreeMap::new(),
            seed: DEFAULT_SEED,
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Operation named `name` with the given parameters.
    pub fn operation(name: &str, params: &[(&str, ParamValue)]) -> Self {
        Self {
            operation: OperationConfig {
                name: name.to_string(),
                params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            },
            ..Self::default()
        }
    }

    pub fn with_scenario(mut self, name: &str, params: &[(&str, f64)]) -> Self {
        self.scenario = Some(ScenarioConfig {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !OPERATIONS.contains(&self.operation.name.as_str()) {
            return Err(LabError::Config(format!(
                "unknown operation `{}` (expected one of {})",
                self.operation.name,
                OPERATIONS.join(", ")
            )));
        }
        if let Some(s) = &self.scenario {
            if !SCENARIO_NAMES.contains(&s.name.as_str()) {
                return Err(LabError::Config(format!(
                    "unknown scenario `{}` (expected one of {})",
                    s.name,
                    SCENARIO_NAMES.join(", ")
                )));
            }
        }
        Tolerances::new(&self.tolerances)?;
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        Tolerances::new(&self.tolerances)
    }

    pub fn params(&self) -> OpParams<'_> {
        OpParams(&self.operation.params)
    }
}

/// Splits `NAME=VALUE`.
pub fn split_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| LabError::Config(format!("expected NAME=VALUE, got `{s}`")))?;
    if k.trim().is_empty() {
        return Err(LabError::Config(format!("empty name in `{s}`")));
    }
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut map: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            if !map.contains_key(k) {
                return Err(LabError::Config(format!("unknown tolerance `{k}`")));
            }
            if !(*v > 0.0 && v.is_finite()) {
                return Err(LabError::Config(format!("tolerance `{k}` must be positive, got {v}")));
            }
            map.insert(k.clone(), *v);
        }
        Ok(Self(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::new(&BTreeMap::new()).expect("defaults are valid")
    }
}

/// Typed access to operation parameters.
#[derive(Debug, Clone, Copy)]
pub struct OpParams<'a>(pub &'a BTreeMap<String, ParamValue>);

impl OpParams<'_> {
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ParamValue::Number(x)) => Ok(Some(*x)),
            Some(other) => Err(LabError::Config(format!("parameter `{key}` must be a number, got {other:?}"))),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.number(key)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(Some(x as usize)),
            Some(x) => Err(LabError::Config(format!("parameter `{key}` must be a non-negative integer, got {x}"))),
        }
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.count(key)?.unwrap_or(default))
    }

    pub fn text(&self, key: &str) -> Result<Option<String>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ParamValue::Text(s)) => Ok(Some(s.clone())),
            Some(ParamValue::Number(x)) => Ok(Some(x.to_string())),
            Some(ParamValue::Flag(b)) => Ok(Some(b.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let c = RunConfig::from_toml(
            r#"
seed = 7
format = "csv"
[scenario]
name = "einstein_cylinder"
params = { n = 2, resolution = 64 }
[operation]
name = "spectrum"
params = { surface = "equator", step = 0.05 }
[tolerances]
lambda1 = 1e-9
"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.scenario.as_ref().unwrap().params["resolution"], 64.0);
        assert_eq!(c.params().text("surface").unwrap().as_deref(), Some("equator"));
        assert_eq!(c.params().number("step").unwrap(), Some(0.05));
    }

    #[test]
    fn rejects_bad_tolerances_and_names() {
        let mut c = RunConfig::operation("linear", &[]);
        c.tolerances.insert("lambda1".into(), -1.0);
        assert!(matches!(c.validate(), Err(LabError::Config(_))));
        c.tolerances.clear();
        c.tolerances.insert("nonsense".into(), 1.0);
        assert!(c.validate().is_err());
        let c = RunConfig::operation("linear", &[]).with_scenario("kerr", &[]);
        assert!(c.validate().is_err());
        assert!(RunConfig::operation("plot", &[]).validate().is_err());
        assert!(RunConfig::from_toml("seed = \"x\"").is_err());
    }

    #[test]
    fn assignment_and_values() {
        assert_eq!(split_assignment("a=1e-3").unwrap(), ("a".into(), "1e-3".into()));
        assert!(split_assignment("a").is_err());
        assert_eq!(ParamValue::parse("2"), ParamValue::Number(2.0));
        assert_eq!(ParamValue::parse("timelike"), ParamValue::Text("timelike".into()));
        assert_eq!(ParamValue::parse("true"), ParamValue::Flag(true));
    }
}
