//! Parameter sweeps over one variable of a target command.

use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use sdquant_core::reparam::checks_to_csv;
use sdquant_core::tunnelling::rows_to_csv;
use sdquant_core::{analytic_energy, QuantumParams};

use crate::commands::{integral_checks, json, transmission_row, Artifact};
use crate::config::{Format, Params, RunConfig, Spacing, SweepSpec, SweepTarget};
use crate::error::CliError;

/// Values listed explicitly or generated from `(start, stop, count)`.
pub fn sweep_values(spec: &SweepSpec) -> Result<Vec<f64>, CliError> {
    let range = [
        spec.start.is_some(),
        spec.stop.is_some(),
        spec.count.is_some(),
    ];
    match (&spec.values, range) {
        (Some(_), r) if r.iter().any(|&x| x) => Err(CliError::validation(
            "give either `values` or `start`/`stop`/`count`, not both",
        )),
        (Some(values), _) => {
            if values.is_empty() {
                return Err(CliError::validation("`values` is empty"));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(CliError::validation(format!(
                    "sweep value {v} is not finite"
                )));
            }
            Ok(values.clone())
        }
        (None, [true, true, true]) => {
            let (start, stop, count) =
                (spec.start.unwrap(), spec.stop.unwrap(), spec.count.unwrap());
            if count < 2 {
                return Err(CliError::validation(format!(
                    "sweep count must be at least 2, got {count}"
                )));
            }
            if !(start.is_finite() && stop.is_finite() && start < stop) {
                return Err(CliError::validation(format!(
                    "sweep needs finite start < stop, got {start} and {stop}"
                )));
            }
            if spec.spacing == Spacing::Log && start <= 0.0 {
                return Err(CliError::validation(
                    "log spacing requires positive endpoints",
                ));
            }
            let last = (count - 1) as f64;
            let mut values: Vec<f64> = (0..count)
                .map(|i| {
                    let s = i as f64 / last;
                    match spec.spacing {
                        Spacing::Linear => start + (stop - start) * s,
                        Spacing::Log => start * (stop / start).powf(s),
                    }
                })
                .collect();
            values[count - 1] = stop;
            Ok(values)
        }
        (None, _) => Err(CliError::validation(
            "sweep needs `values` or all of `start`, `stop` and `count`",
        )),
    }
}

fn integer_value(variable: &str, x: f64) -> Result<usize, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(CliError::validation(format!(
            "`{variable}` must be a non-negative integer, got {x}"
        )))
    }
}

const TUNNEL_VARS: &[&str] = &["m", "eta", "hbar", "v_b", "V_B", "dq", "energy", "E", "k"];
const ENERGY_VARS: &[&str] = &["n", "m", "eta", "hbar"];
const TRANSFORM_VARS: &[&str] = &["n", "m", "eta", "q0", "v0", "t_a", "t_b"];

fn check_variable(target: SweepTarget, variable: &str) -> Result<(), CliError> {
    let allowed = match target {
        SweepTarget::Tunnel => TUNNEL_VARS,
        SweepTarget::Energy => ENERGY_VARS,
        SweepTarget::TransformCheck => TRANSFORM_VARS,
    };
    if allowed.contains(&variable) {
        Ok(())
    } else {
        let mut e = CliError::config(format!(
            "`{variable}` cannot be swept for this target; expected one of {}",
            allowed.join(", ")
        ));
        e.key = Some(variable.to_string());
        Err(e)
    }
}

/// Copy of `base` with `variable` set to `x`.
fn with_value(base: &Params, variable: &str, x: f64) -> Result<Params, CliError> {
    let mut p = base.clone();
    match variable {
        "m" => p.m = Some(x),
        "eta" => p.eta = Some(x),
        "hbar" => p.hbar = Some(x),
        "q0" => p.q0 = Some(x),
        "v0" => p.v0 = Some(x),
        "t_a" => p.t_a = Some(x),
        "t_b" => p.t_b = Some(x),
        "v_b" | "V_B" => p.v_b = Some(x),
        "dq" => p.dq = Some(x),
        "energy" | "E" => {
            p.energy = Some(x);
            p.k = None;
        }
        "k" => {
            p.k = Some(x);
            p.energy = None;
        }
        "n" => p.n = Some(integer_value(variable, x)?),
        other => {
            return Err(CliError::config(format!(
                "unknown sweep variable `{other}`"
            )))
        }
    }
    Ok(p)
}

/// Evaluate `f` at every value, keeping input order. The first failure in
/// value order is reported regardless of scheduling.
fn evaluate<T, F>(values: &[f64], parallel: bool, variable: &str, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    let results: Vec<Result<T, CliError>> = if parallel {
        values.par_iter().map(|&x| f(x)).collect()
    } else {
        values.iter().map(|&x| f(x)).collect()
    };
    results
        .into_iter()
        .zip(values)
        .map(|(r, x)| r.map_err(|e| e.context(format_args!("sweep value {variable} = {x}"))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRow {
    pub n: usize,
    pub m: f64,
    pub eta: f64,
    pub hbar: f64,
    pub energy: f64,
}

pub fn sweep(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep requires a [sweep] table"))?;
    check_variable(spec.target, &spec.variable)?;
    let values = sweep_values(spec)?;
    let var = spec.variable.as_str();
    let base = &cfg.params;

    let (body, rows) = match spec.target {
        SweepTarget::Tunnel => {
            if base.dq_values.is_some() {
                return Err(CliError::config(
                    "`dq_values` cannot be used inside a sweep",
                ));
            }
            let rows = evaluate(&values, spec.parallel, var, |x| {
                transmission_row(cfg, &with_value(base, var, x)?)
            })?;
            let body = match format {
                Format::Csv => rows_to_csv(&rows),
                Format::Json => json(&rows),
            };
            (body, rows.len())
        }
        SweepTarget::Energy => {
            let rows = evaluate(&values, spec.parallel, var, |x| {
                let p = with_value(base, var, x)?;
                let qp = QuantumParams::new(
                    p.m.unwrap_or_else(|| cfg.mass()),
                    p.eta.unwrap_or(1.0),
                    p.hbar.unwrap_or_else(|| cfg.hbar()),
                )?;
                let n = p.n.unwrap_or(0);
                Ok(EnergyRow {
                    n,
                    m: qp.m,
                    eta: qp.eta,
                    hbar: qp.hbar,
                    energy: analytic_energy(n, &qp),
                })
            })?;
            let body = match format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut out = String::from("n,m,eta,hbar,energy\n");
                    for r in &rows {
                        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.m, r.eta, r.hbar, r.energy);
                    }
                    out
                }
            };
            (body, rows.len())
        }
        SweepTarget::TransformCheck => {
            if base.ns.is_some() {
                return Err(CliError::config("`ns` cannot be used inside a sweep"));
            }
            let rows = evaluate(&values, spec.parallel, var, |x| {
                let p = with_value(base, var, x)?;
                let n = p.n.unwrap_or(1000);
                Ok(integral_checks(cfg, &p, &[n])?[0])
            })?;
            let body = match format {
                Format::Csv => checks_to_csv(&rows),
                Format::Json => json(&rows),
            };
            (body, rows.len())
        }
    };
    let target = match spec.target {
        SweepTarget::Tunnel => "tunnel",
        SweepTarget::Energy => "energy",
        SweepTarget::TransformCheck => "transform-check",
    };
    Ok(Artifact {
        body,
        summary: format!(
            "sweep: {rows} rows of {target} over {var} in [{}, {}]",
            values.first().expect("non-empty"),
            values.last().expect("non-empty")
        ),
    })
}
