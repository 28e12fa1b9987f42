//! Experiment configuration: JSON schema, overrides, and validation into
//! core types. Unknown fields are rejected so typos fail loudly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bis_core::binning::RateSpec;
use bis_core::prob::{BisSystem, ChannelMatrix, DiscreteDistribution};
use bis_core::region::SearchConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub mode: Mode,
    pub seed: u64,
    /// CSV output path; `--out` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_cases: Option<SpecialCasesParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Region,
    Equivalence,
    Simulate,
    SpecialCases,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Region => "region",
            Mode::Equivalence => "equivalence",
            Mode::Simulate => "simulate",
            Mode::SpecialCases => "special-cases",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub source: Vec<f64>,
    pub enrollment: Vec<Vec<f64>>,
    pub identification: Vec<Vec<f64>>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<BisSystem, CliError> {
        let source = DiscreteDistribution::new(self.source.clone()).map_err(CliError::config)?;
        let enrollment = ChannelMatrix::new(self.enrollment.clone()).map_err(CliError::config)?;
        let identification =
            ChannelMatrix::new(self.identification.clone()).map_err(CliError::config)?;
        BisSystem::new(source, enrollment, identification).map_err(CliError::config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionParams {
    pub r_s: f64,
    #[serde(default = "default_dirichlet_samples")]
    pub dirichlet_samples: usize,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_cols: Option<usize>,
}

fn default_dirichlet_samples() -> usize {
    SearchConfig::default().dirichlet_samples
}
fn default_refine_steps() -> usize {
    SearchConfig::default().refine_steps
}
fn default_grid_points() -> usize {
    SearchConfig::default().grid_points
}

impl RegionParams {
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            dirichlet_samples: self.dirichlet_samples,
            refine_steps: self.refine_steps,
            grid_points: self.grid_points,
            u_cols: self.u_cols,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceParams {
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub u_channel: Vec<Vec<f64>>,
    pub v_channel: Vec<Vec<f64>>,
    pub block_lengths: Vec<usize>,
    pub trials: usize,
    /// Typicality slack; omitted means 2 / sqrt(n) per block length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// How far inside the operating corner the designed rates sit.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Explicit designed rates; omitted means derive them from the test
    /// channels and `margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesSpec>,
    #[serde(default = "default_true")]
    pub fresh_codebook: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSpec {
    pub v_rate: f64,
    pub u_rate: f64,
    pub s_rate: f64,
    pub i_rate: f64,
}

impl From<RatesSpec> for RateSpec {
    fn from(r: RatesSpec) -> Self {
        RateSpec { v_rate: r.v_rate, u_rate: r.u_rate, s_rate: r.s_rate, i_rate: r.i_rate }
    }
}

fn default_margin() -> f64 {
    0.2
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialCasesParams {
    pub witnesses: usize,
}

/// Load a config file, apply `key=value` overrides (dotted paths into the
/// JSON tree), then an optional seed override.
pub fn load_config(
    path: &Path,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;

    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("override '{item}' is not key=value")))?;
        let parsed: serde_json::Value =
            serde_json::from_str(raw).unwrap_or(serde_json::Value::String(raw.to_string()));
        set_path(&mut value, key, parsed)?;
    }

    let mut config: ExperimentConfig = serde_json::from_value(value)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn set_path(
    value: &mut serde_json::Value,
    key: &str,
    new: serde_json::Value,
) -> Result<(), CliError> {
    let mut cursor = value;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = cursor
            .as_object_mut()
            .ok_or_else(|| CliError::config(format!("override path '{key}' crosses a non-object")))?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), new);
            return Ok(());
        }
        cursor = map
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Err(CliError::config(format!("empty override path '{key}'")))
}
