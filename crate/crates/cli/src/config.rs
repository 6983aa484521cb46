//! Run configuration: a TOML document with strict key checking, plus
//! `key=value` overrides from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use sdquant_core::{EomForm, Interior, ModeTag, PartitionRule};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Trajectory,
    Classify,
    TransformCheck,
    Spectrum,
    Tunnel,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Trajectory => "trajectory",
            Command::Classify => "classify",
            Command::TransformCheck => "transform-check",
            Command::Spectrum => "spectrum",
            Command::Tunnel => "tunnel",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    Tunnel,
    Energy,
    TransformCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Physical and numerical parameters. Every field is optional; each
/// command fills in its own defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub m: Option<f64>,
    pub eta: Option<f64>,
    pub hbar: Option<f64>,
    pub q0: Option<f64>,
    pub v0: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub step: Option<f64>,
    pub form: Option<EomForm>,
    pub method: Option<Method>,
    pub kinetic_epsilon: Option<f64>,
    pub slack: Option<f64>,
    pub horizon: Option<f64>,
    pub draws: Option<usize>,
    pub input: Option<PathBuf>,
    pub t_a: Option<f64>,
    pub t_b: Option<f64>,
    pub n: Option<usize>,
    pub ns: Option<Vec<usize>>,
    pub rule: Option<PartitionRule>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n_points: Option<usize>,
    pub n_states: Option<usize>,
    pub state: Option<usize>,
    #[serde(alias = "V_B")]
    pub v_b: Option<f64>,
    pub dq: Option<f64>,
    #[serde(alias = "E")]
    pub energy: Option<f64>,
    pub k: Option<f64>,
    pub mode: Option<ModeTag>,
    pub interior: Option<Interior>,
    pub n_steps: Option<usize>,
    pub dq_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Overrides for the natural-unit profile `m = hbar = 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub m: Option<f64>,
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub variable: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub units: Units,
    pub sweep: Option<SweepSpec>,
    /// Keys present under `[params]`, with aliases resolved.
    #[serde(skip)]
    pub param_keys: Vec<String>,
}

const TOP_KEYS: &[&str] = &["command", "seed", "params", "output", "units", "sweep"];
const OUTPUT_KEYS: &[&str] = &["path", "format"];
const UNIT_KEYS: &[&str] = &["m", "hbar"];
const SWEEP_KEYS: &[&str] = &[
    "target", "variable", "values", "start", "stop", "count", "spacing", "parallel",
];

const TRAJECTORY_KEYS: &[&str] = &[
    "m", "eta", "q0", "v0", "t_max", "dt", "step", "form", "method",
];
const CLASSIFY_EXTRA: &[&str] = &["kinetic_epsilon", "slack", "horizon", "draws", "input"];
const TRANSFORM_KEYS: &[&str] = &["m", "eta", "q0", "v0", "t_a", "t_b", "n", "ns", "rule"];
const SPECTRUM_KEYS: &[&str] = &[
    "m", "eta", "hbar", "x_min", "x_max", "n_points", "n_states", "state",
];
const TUNNEL_KEYS: &[&str] = &[
    "m",
    "eta",
    "hbar",
    "v_b",
    "dq",
    "energy",
    "k",
    "mode",
    "interior",
    "n_steps",
    "dq_values",
];
const ENERGY_KEYS: &[&str] = &["m", "eta", "hbar", "n"];

fn canonical_param(key: &str) -> &str {
    match key {
        "V_B" => "v_b",
        "E" => "energy",
        other => other,
    }
}

fn all_param_keys() -> impl Iterator<Item = &'static str> {
    [
        TRAJECTORY_KEYS,
        CLASSIFY_EXTRA,
        TRANSFORM_KEYS,
        SPECTRUM_KEYS,
        TUNNEL_KEYS,
        ENERGY_KEYS,
    ]
    .into_iter()
    .flatten()
    .copied()
}

fn check_keys(table: &Table, section: &str, allowed: &[&str]) -> Result<(), CliError> {
    match table.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::unknown_key(section, k)),
        None => Ok(()),
    }
}

fn subtable<'a>(table: &'a Table, key: &str) -> Result<Option<&'a Table>, CliError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(CliError::config(format!("`{key}` must be a table"))),
    }
}

impl RunConfig {
    pub fn from_table(table: Table) -> Result<Self, CliError> {
        check_keys(&table, "top level", TOP_KEYS)?;
        if let Some(t) = subtable(&table, "output")? {
            check_keys(t, "output", OUTPUT_KEYS)?;
        }
        if let Some(t) = subtable(&table, "units")? {
            check_keys(t, "units", UNIT_KEYS)?;
        }
        if let Some(t) = subtable(&table, "sweep")? {
            check_keys(t, "sweep", SWEEP_KEYS)?;
        }
        let mut param_keys = Vec::new();
        if let Some(t) = subtable(&table, "params")? {
            for key in t.keys() {
                let canon = canonical_param(key);
                if !all_param_keys().any(|k| k == canon) {
                    return Err(CliError::unknown_key("params", key));
                }
                param_keys.push(canon.to_string());
            }
        }
        let mut cfg: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))?;
        cfg.param_keys = param_keys;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::config(e.message().trim().to_string()))?;
        Self::from_table(table)
    }

    /// Read `path` (if any), apply `key=value` overrides and parse.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::io(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<Table>().map_err(|e| {
                    CliError::config(format!("{}: {}", p.display(), e.message().trim()))
                })?
            }
            None => Table::new(),
        };
        for assignment in overrides {
            apply_override(&mut table, assignment)?;
        }
        Self::from_table(table)
    }

    /// Reject parameters that the resolved command does not read.
    pub fn check_params_for(&self, command: Command) -> Result<(), CliError> {
        let allowed: Vec<&str> = match command {
            Command::Trajectory => TRAJECTORY_KEYS.to_vec(),
            Command::Classify => [TRAJECTORY_KEYS, CLASSIFY_EXTRA].concat(),
            Command::TransformCheck => TRANSFORM_KEYS.to_vec(),
            Command::Spectrum => SPECTRUM_KEYS.to_vec(),
            Command::Tunnel => TUNNEL_KEYS.to_vec(),
            Command::Sweep => match self.sweep.as_ref().map(|s| s.target) {
                Some(SweepTarget::Tunnel) => TUNNEL_KEYS.to_vec(),
                Some(SweepTarget::Energy) => ENERGY_KEYS.to_vec(),
                Some(SweepTarget::TransformCheck) => TRANSFORM_KEYS.to_vec(),
                None => return Err(CliError::config("sweep requires a [sweep] table")),
            },
        };
        match self
            .param_keys
            .iter()
            .find(|k| !allowed.contains(&k.as_str()))
        {
            Some(k) => {
                let mut e = CliError::config(format!(
                    "key `{k}` in [params] is not used by `{}`",
                    command.as_str()
                ));
                e.key = Some(k.clone());
                Err(e)
            }
            None => Ok(()),
        }
    }

    pub fn mass(&self) -> f64 {
        self.params.m.or(self.units.m).unwrap_or(1.0)
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar.or(self.units.hbar).unwrap_or(1.0)
    }
}

/// Apply `key=value`, where `key` is either a parameter name or a dotted
/// `section.key` path, and `value` is a TOML literal (bare words are strings).
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));

    let (section, name) = match key.split_once('.') {
        Some((s, n)) => (Some(s), n),
        None if TOP_KEYS.contains(&key) => (None, key),
        None => (Some("params"), key),
    };
    if name.is_empty() || name.contains('.') {
        return Err(CliError::config(format!("bad override key `{key}`")));
    }
    match section {
        None => {
            table.insert(name.to_string(), value);
        }
        Some(s) => {
            let entry = table
                .entry(s.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            match entry {
                Value::Table(t) => {
                    t.insert(name.to_string(), value);
                }
                _ => return Err(CliError::config(format!("`{s}` must be a table"))),
            }
        }
    }
    Ok(())
}
