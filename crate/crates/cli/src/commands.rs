//! One function per subcommand. Each returns the serialized artifact and a
//! one-line summary.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sdquant_core::quantum::SpatialGrid;
use sdquant_core::reparam::{checks_to_csv, observed_orders, theorem1_check_with};
use sdquant_core::tunnelling::{rows_to_csv, transmission};
use sdquant_core::{
    analytic_trajectory, classify_sd, integrate_eom, solve_spectrum_fd, suppression_fit,
    BarrierConfig, ClassifyOptions, EomForm, Interior, ModeTag, PartitionRule, QuantumParams,
    SDParams, SDReport, TimeGrid, Trajectory, TransmissionMode, TransmissionRow,
};

use crate::config::{Format, Method, Params, RunConfig};
use crate::error::{CliError, ErrorKind};

pub struct Artifact {
    pub body: String,
    pub summary: String,
}

pub(crate) fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("artifact serializes");
    s.push('\n');
    s
}

pub(crate) fn sd_params(cfg: &RunConfig, p: &Params) -> Result<SDParams, CliError> {
    let m = p.m.unwrap_or_else(|| cfg.mass());
    Ok(SDParams::new(
        m,
        p.eta.unwrap_or(1.0),
        p.q0.unwrap_or(0.0),
        p.v0.unwrap_or(1.0),
    )?)
}

fn build_trajectory(cfg: &RunConfig, p: &Params) -> Result<Trajectory, CliError> {
    let sd = sd_params(cfg, p)?;
    let grid = TimeGrid::uniform(p.t_max.unwrap_or(10.0), p.dt.unwrap_or(1e-3))?;
    match p.method.unwrap_or_default() {
        Method::Rk4 => Ok(integrate_eom(
            &sd,
            p.form.unwrap_or(EomForm::Original),
            &grid,
            p.step,
        )?),
        Method::Analytic => {
            if p.form == Some(EomForm::Transformed) || p.step.is_some() {
                return Err(CliError::validation(
                    "`form` and `step` apply only to method = \"rk4\"",
                ));
            }
            Ok(analytic_trajectory(&sd, &grid)?)
        }
    }
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    t: &'a [f64],
    q: &'a [f64],
    v: &'a [f64],
}

pub fn trajectory(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let tr = build_trajectory(cfg, &cfg.params)?;
    let body = match format {
        Format::Csv => tr.to_csv(),
        Format::Json => json(&TrajectoryJson {
            t: tr.t(),
            q: tr.q(),
            v: tr.v(),
        }),
    };
    let (t, q, v) = tr.last();
    Ok(Artifact {
        body,
        summary: format!(
            "trajectory: {} samples, final t = {t}, q = {q}, v = {v}",
            tr.len()
        ),
    })
}

const REPORT_HEADER: &str =
    "kinetic_strictly_decreasing,trajectory_monotonic,kinetic_vanishes,work_nondecreasing,first_violation_index";

fn report_fields(r: &SDReport) -> String {
    format!(
        "{},{},{},{},{}",
        r.kinetic_strictly_decreasing,
        r.trajectory_monotonic,
        r.kinetic_vanishes,
        r.work_nondecreasing,
        r.first_violation_index
    )
}

#[derive(Serialize)]
struct DrawRecord {
    m: f64,
    eta: f64,
    q0: f64,
    v0: f64,
    #[serde(flatten)]
    report: SDReport,
}

/// A viscous system drawn from the property-test ranges.
pub(crate) fn random_draw(rng: &mut ChaCha8Rng) -> Result<SDParams, CliError> {
    let m = rng.random_range(0.1..10.0);
    let eta = rng.random_range(0.1..10.0);
    let q0 = rng.random_range(-5.0..5.0);
    let speed: f64 = rng.random_range(0.01..5.0);
    let v0 = if rng.random_bool(0.5) { speed } else { -speed };
    Ok(SDParams::new(m, eta, q0, v0)?)
}

pub fn classify(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let p = &cfg.params;
    let opts = ClassifyOptions {
        kinetic_epsilon: p.kinetic_epsilon.unwrap_or(1e-6),
        slack: p.slack.unwrap_or(0.0),
        horizon: p.horizon,
    };

    if let Some(draws) = p.draws {
        let fixed = ["m", "eta", "q0", "v0", "t_max", "dt", "input", "horizon"];
        if let Some(k) = cfg.param_keys.iter().find(|k| fixed.contains(&k.as_str())) {
            return Err(CliError::config(format!(
                "`{k}` cannot be combined with `draws`"
            )));
        }
        if draws == 0 {
            return Err(CliError::validation("`draws` must be at least 1"));
        }
        let seed = cfg.seed.unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut records = Vec::with_capacity(draws);
        for _ in 0..draws {
            let sd = random_draw(&mut rng)?;
            let tau = sd.m / sd.eta;
            let grid = TimeGrid::uniform(10.0 * tau, 1e-3 * tau)?;
            let tr = match p.method.unwrap_or_default() {
                Method::Rk4 => {
                    integrate_eom(&sd, p.form.unwrap_or(EomForm::Original), &grid, p.step)?
                }
                Method::Analytic => analytic_trajectory(&sd, &grid)?,
            };
            let report = classify_sd(&tr, sd.m, &opts);
            records.push(DrawRecord {
                m: sd.m,
                eta: sd.eta,
                q0: sd.q0,
                v0: sd.v0,
                report,
            });
        }
        let passed = records.iter().filter(|r| r.report.is_sd()).count();
        let body = match format {
            Format::Json => json(&records),
            Format::Csv => {
                let mut out = format!("m,eta,q0,v0,{REPORT_HEADER}\n");
                for r in &records {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.m,
                        r.eta,
                        r.q0,
                        r.v0,
                        report_fields(&r.report)
                    );
                }
                out
            }
        };
        return Ok(Artifact {
            body,
            summary: format!("classify: {passed}/{draws} draws SD (seed {seed})"),
        });
    }

    let (tr, m) = match &p.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            let tr = Trajectory::from_csv(&text)
                .map_err(|e| CliError::from(e).context(path.display()))?;
            (tr, p.m.unwrap_or_else(|| cfg.mass()))
        }
        None => (build_trajectory(cfg, p)?, sd_params(cfg, p)?.m),
    };
    if !(m > 0.0 && m.is_finite()) {
        return Err(CliError::validation(format!(
            "m must be positive and finite, got {m}"
        )));
    }
    let report = classify_sd(&tr, m, &opts);
    let body = match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => format!("{REPORT_HEADER}\n{}\n", report_fields(&report)),
    };
    Ok(Artifact {
        body,
        summary: format!(
            "classify: SD = {} (a = {}, b = {}, c = {}, d = {}, first violation {})",
            report.is_sd(),
            report.kinetic_strictly_decreasing,
            report.trajectory_monotonic,
            report.kinetic_vanishes,
            report.work_nondecreasing,
            report.first_violation_index
        ),
    })
}

pub(crate) fn integral_checks(
    cfg: &RunConfig,
    p: &Params,
    ns: &[usize],
) -> Result<Vec<sdquant_core::IntegralCheck>, CliError> {
    let sd = sd_params(cfg, p)?;
    let (t_a, t_b) = (p.t_a.unwrap_or(0.0), p.t_b.unwrap_or(10.0));
    let rule = p.rule.unwrap_or(PartitionRule::Trapezoid);
    ns.iter()
        .map(|&n| theorem1_check_with(&sd, t_a, t_b, n, rule).map_err(CliError::from))
        .collect()
}

pub fn transform_check(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let p = &cfg.params;
    if p.n.is_some() && p.ns.is_some() {
        return Err(CliError::config("give either `n` or `ns`, not both"));
    }
    let (ns, single) = match &p.ns {
        Some(ns) if ns.is_empty() => return Err(CliError::validation("`ns` is empty")),
        Some(ns) => (ns.clone(), false),
        None => (vec![p.n.unwrap_or(1000)], true),
    };
    let checks = integral_checks(cfg, p, &ns)?;
    let body = match (format, single) {
        (Format::Csv, _) => checks_to_csv(&checks),
        (Format::Json, true) => json(&checks[0]),
        (Format::Json, false) => json(&checks),
    };
    let last = checks.last().expect("at least one check");
    let mut summary = format!(
        "transform-check: n = {}, W_time = {}, W_position = {}, gap = {}",
        last.n, last.w_time, last.w_position, last.gap
    );
    if !single {
        let orders: Vec<String> = observed_orders(&checks)
            .iter()
            .map(|o| format!("{o:.4}"))
            .collect();
        let _ = write!(summary, ", observed orders [{}]", orders.join(", "));
    }
    Ok(Artifact { body, summary })
}

pub fn spectrum(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let p = &cfg.params;
    let qp = QuantumParams::new(cfg.mass(), p.eta.unwrap_or(1.0), cfg.hbar())?;
    let n_points = p.n_points.unwrap_or(4001);
    let grid = match (p.x_min, p.x_max) {
        (Some(a), Some(b)) => SpatialGrid::new(a, b, n_points)?,
        (None, None) => SpatialGrid::default_for(&qp, n_points)?,
        _ => return Err(CliError::config("give both `x_min` and `x_max` or neither")),
    };
    let spec = solve_spectrum_fd(&qp, &grid, p.n_states.unwrap_or(6))?;
    let body = match format {
        Format::Json => {
            let mut s = spec.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let k = p.state.unwrap_or(0);
            spec.state_csv(k).ok_or_else(|| {
                CliError::validation(format!(
                    "state {k} not computed; n_states = {}",
                    spec.energies.len()
                ))
            })?
        }
    };
    let energies: Vec<String> = spec.energies.iter().map(|e| e.to_string()).collect();
    let mut summary = format!(
        "spectrum: {} states, energies [{}]",
        energies.len(),
        energies.join(", ")
    );
    let leaking = spec.leaking_states(sdquant_core::quantum::BOUNDARY_TOL);
    if !leaking.is_empty() {
        let _ = write!(summary, ", boundary leakage in states {leaking:?}");
    }
    Ok(Artifact { body, summary })
}

pub(crate) fn barrier_config(cfg: &RunConfig, p: &Params) -> Result<BarrierConfig, CliError> {
    let m = p.m.unwrap_or_else(|| cfg.mass());
    let hbar = p.hbar.unwrap_or_else(|| cfg.hbar());
    let (eta, v_b, dq) = (
        p.eta.unwrap_or(1.0),
        p.v_b.unwrap_or(0.0),
        p.dq.unwrap_or(1.0),
    );
    match (p.energy, p.k) {
        (Some(_), Some(_)) => Err(CliError::validation("give either `E` or `k`, not both")),
        (Some(e), None) => Ok(BarrierConfig::new(m, eta, hbar, v_b, dq, e)?),
        (None, k) => Ok(BarrierConfig::with_wavenumber(
            m,
            eta,
            hbar,
            v_b,
            dq,
            k.unwrap_or(1.0),
        )?),
    }
}

pub(crate) fn transmission_mode(p: &Params) -> Result<TransmissionMode, CliError> {
    let mode = p.mode.unwrap_or(ModeTag::PaperFormula);
    if mode != ModeTag::Numeric && (p.interior.is_some() || p.n_steps.is_some()) {
        return Err(CliError::config(
            "`interior` and `n_steps` apply only to mode = \"numeric\"",
        ));
    }
    Ok(match mode {
        ModeTag::PaperFormula => TransmissionMode::PaperFormula,
        ModeTag::PaperMatching => TransmissionMode::PaperMatching,
        ModeTag::Baseline => TransmissionMode::Baseline,
        ModeTag::Numeric => TransmissionMode::Numeric {
            interior: p.interior.unwrap_or(Interior::DissipativeOnly),
            n_steps: p.n_steps.unwrap_or(10_000),
        },
    })
}

pub(crate) fn transmission_row(cfg: &RunConfig, p: &Params) -> Result<TransmissionRow, CliError> {
    let barrier = barrier_config(cfg, p)?;
    let result = transmission(&barrier, transmission_mode(p)?)?;
    if !result.transmission.is_finite() {
        return Err(CliError::new(
            ErrorKind::Numerical,
            format!("transmission is not finite ({})", result.transmission),
        ));
    }
    Ok(TransmissionRow::new(&barrier, &result))
}

pub fn tunnel(cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let p = &cfg.params;
    if let Some(widths) = &p.dq_values {
        if p.dq.is_some() {
            return Err(CliError::config(
                "give either `dq` or `dq_values`, not both",
            ));
        }
        let mode = transmission_mode(p)?;
        let fit = suppression_fit(&barrier_config(cfg, p)?, widths, mode)?;
        let body = match format {
            Format::Json => json(&fit),
            Format::Csv => format!(
                "slope,intercept,r2,mode\n{},{},{},{}\n",
                fit.slope,
                fit.intercept,
                fit.r2,
                fit.mode.as_str()
            ),
        };
        return Ok(Artifact {
            body,
            summary: format!(
                "tunnel: mode = {}, suppression slope = {}, intercept = {}, r2 = {}",
                fit.mode.as_str(),
                fit.slope,
                fit.intercept,
                fit.r2
            ),
        });
    }
    let row = transmission_row(cfg, p)?;
    let body = match format {
        Format::Json => json(&row),
        Format::Csv => rows_to_csv(&[row]),
    };
    let mut summary = format!(
        "tunnel: mode = {}, T = {}",
        row.mode.as_str(),
        row.transmission
    );
    if let Some(r) = row.reflection {
        let _ = write!(summary, ", R = {r}");
    }
    if let Some(f) = row.flux_error {
        let _ = write!(summary, ", flux error = {f:e}");
    }
    let _ = write!(summary, ", nonphysical = {}", row.nonphysical);
    Ok(Artifact { body, summary })
}
