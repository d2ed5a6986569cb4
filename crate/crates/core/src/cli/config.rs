//! Run configuration: a TOML file with sections per command, merged with
//! dotted-path `--set` overrides before deserialization. The sha256 of the
//! merged canonical form goes into every artifact header.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// scenario id from the catalogue
    pub scenario: String,
    /// reserved for randomized validator sampling; part of the config hash
    pub seed: u64,
    /// scenario knob overrides by name
    pub overrides: BTreeMap<String, f64>,
    pub spectrum: SpectrumConfig,
    pub classical: ClassicalConfig,
    pub compare: CompareConfig,
    pub residual: ResidualConfig,
    pub takens: TakensConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "standard".into(),
            seed: 0,
            overrides: BTreeMap::new(),
            spectrum: SpectrumConfig::default(),
            classical: ClassicalConfig::default(),
            compare: CompareConfig::default(),
            residual: ResidualConfig::default(),
            takens: TakensConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// sweep points
    pub count: usize,
    /// levels per base point (level pairs up to this total for 2D channels)
    pub levels: usize,
    /// interior nodes per dimension for the 2D solver
    pub grid_n: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { x_min: -1.0, x_max: 1.0, count: 21, levels: 3, grid_n: 96 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    /// defaults to the scenario horizon
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub dt: f64,
    /// sets the band term in the effective potential
    pub hbar: f64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self { horizon: None, dt: 1e-3, hbar: 0.05 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// strictly decreasing, at least three values
    pub hbars: Vec<f64>,
    pub threshold: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { hbars: vec![0.08, 0.04, 0.02, 0.01], threshold: 0.45 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    pub hbars: Vec<f64>,
    /// evaluation time of the defect
    pub t_eval: f64,
    /// include the order-hbar transverse correction
    pub correction: bool,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self { hbars: vec![0.08, 0.04, 0.02, 0.01], t_eval: 0.3, correction: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TakensConfig {
    /// conserved total theta_+ + theta_- across the fan
    pub theta_sum: f64,
    pub splits: usize,
    pub horizon: f64,
    pub dt: f64,
    /// launch speed and angle of the projected initial velocity
    pub speed: f64,
    pub angle: f64,
}

impl Default for TakensConfig {
    fn default() -> Self {
        Self { theta_sum: 1.0, splits: 7, horizon: 0.5, dt: 1e-4, speed: 0.3, angle: 0.0 }
    }
}

/// Load the TOML file (or defaults), apply `--set key=value` overrides by
/// dotted path, and deserialize. All validation errors are config errors.
pub fn load(path: Option<&Path>, sets: &[String]) -> Result<RunConfig> {
    let mut value: toml::Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse()
                .map_err(|e| Error::Config(format!("cannot parse {}: {e}", p.display())))?
        }
        None => toml::Value::Table(toml::map::Map::new()),
    };
    for s in sets {
        apply_set(&mut value, s)?;
    }
    value
        .try_into()
        .map_err(|e| Error::Config(format!("invalid configuration: {e}")))
}

fn apply_set(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{spec}'")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let parsed: toml::Value = format!("v = {raw}")
        .parse::<toml::Table>()
        .map(|mut t| t.remove("v").expect("just inserted"))
        .unwrap_or_else(|_| toml::Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Config(format!("empty path segment in '{key}'")));
        }
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{key}' descends into a non-table value")))?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    unreachable!("loop returns on the last segment")
}

/// sha256 of the canonical serialized configuration, hex encoded.
pub fn hash(config: &RunConfig) -> String {
    let canonical = toml::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
