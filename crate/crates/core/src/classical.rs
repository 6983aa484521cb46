//! The one-dimensional particle in a viscous medium, `m q'' + eta q' = 0`.
//!
//! Trajectories come either from the closed-form solution or from RK4 on
//! one of two equations of motion: the original damped form, or the
//! position-only form obtained after re-parameterizing the friction force.
//! [`classify_sd`] decides whether a sampled trajectory is strictly
//! dissipative: kinetic energy strictly decreasing, position strictly
//! monotonic, kinetic energy vanishing at the horizon and dissipated work
//! non-decreasing.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::ode::rk4_integrate;
use crate::quadrature::{cumulative_trapezoid, trapezoid_uniform};

const GRID_REL_TOL: f64 = 1e-12;
const BRANCH_REL_TOL: f64 = 1e-9;

/// Mass, damping coefficient and initial state of the viscous system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDParams {
    pub m: f64,
    pub eta: f64,
    pub q0: f64,
    pub v0: f64,
}

impl SDParams {
    pub fn new(m: f64, eta: f64, q0: f64, v0: f64) -> Result<Self> {
        let p = SDParams { m, eta, q0, v0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("m", self.m)?;
        require_positive("eta", self.eta)?;
        require_finite("q0", self.q0)?;
        require_finite("v0", self.v0)
    }

    /// Decay rate `eta / m` of the velocity.
    pub fn rate(&self) -> f64 {
        self.eta / self.m
    }

    /// Position the particle comes to rest at, `q0 + (m / eta) v0`.
    pub fn rest_position(&self) -> f64 {
        self.q0 + self.v0 / self.rate()
    }

    /// Default integration step `1e-4 m / eta`.
    pub fn default_step(&self) -> f64 {
        1e-4 / self.rate()
    }
}

/// Uniform sample times `0, dt, 2 dt, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    len: usize,
}

impl TimeGrid {
    /// Grid covering `[0, t_max]`; `t_max` is rounded to the nearest multiple of `dt`.
    pub fn uniform(t_max: f64, dt: f64) -> Result<Self> {
        require_positive("dt", dt)?;
        require_positive("t_max", t_max)?;
        let intervals = (t_max / dt).round();
        if intervals < 1.0 {
            return Err(Error::param("t_max", "shorter than one step"));
        }
        if intervals > 1e9 {
            return Err(Error::param("dt", "grid would exceed 1e9 samples"));
        }
        Ok(TimeGrid {
            dt,
            len: intervals as usize + 1,
        })
    }

    pub fn with_len(dt: f64, len: usize) -> Result<Self> {
        require_positive("dt", dt)?;
        if len < 2 {
            return Err(Error::TrajectoryTooShort(len));
        }
        Ok(TimeGrid { dt, len })
    }

    /// Validate caller-supplied sample times: start at 0, uniform spacing.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::TrajectoryTooShort(times.len()));
        }
        if times[0] != 0.0 {
            return Err(Error::GridOrigin(times[0]));
        }
        let dt = check_uniform(times)?;
        TimeGrid::with_len(dt, times.len())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }
}

/// Returns the mean step after checking every sample against `t0 + i dt`.
fn check_uniform(times: &[f64]) -> Result<f64> {
    let n = times.len();
    let t0 = times[0];
    let dt = (times[n - 1] - t0) / (n - 1) as f64;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::NonUniformGrid {
            index: 1,
            found: times[1] - t0,
            expected: dt,
        });
    }
    for (i, &t) in times.iter().enumerate().skip(1) {
        let expected = t0 + i as f64 * dt;
        if (t - expected).abs() > GRID_REL_TOL * expected.abs().max(dt) {
            return Err(Error::NonUniformGrid {
                index: i,
                found: t - times[i - 1],
                expected: dt,
            });
        }
    }
    Ok(dt)
}

/// Uniformly sampled `(t, q, v)` path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t: Vec<f64>,
    q: Vec<f64>,
    v: Vec<f64>,
    dt: f64,
}

impl Trajectory {
    pub fn new(t: Vec<f64>, q: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != q.len() || t.len() != v.len() {
            return Err(Error::LengthMismatch {
                t: t.len(),
                q: q.len(),
                v: v.len(),
            });
        }
        if t.len() < 2 {
            return Err(Error::TrajectoryTooShort(t.len()));
        }
        let dt = check_uniform(&t)?;
        Ok(Trajectory { t, q, v, dt })
    }

    /// Sample closed-form position and velocity on a grid.
    pub fn from_fn(grid: &TimeGrid, q: impl Fn(f64) -> f64, v: impl Fn(f64) -> f64) -> Self {
        let t = grid.times();
        Trajectory {
            q: t.iter().map(|&t| q(t)).collect(),
            v: t.iter().map(|&t| v(t)).collect(),
            t,
            dt: grid.dt(),
        }
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Final `(t, q, v)` sample.
    pub fn last(&self) -> (f64, f64, f64) {
        let i = self.len() - 1;
        (self.t[i], self.q[i], self.v[i])
    }

    /// CSV with header `t,q,v`; floats use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("t,q,v\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "{},{},{}", self.t[i], self.q[i], self.v[i]);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("t,q,v") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected CSV header `t,q,v`, found {other:?}"
                )))
            }
        }
        let (mut t, mut q, mut v) = (Vec::new(), Vec::new(), Vec::new());
        for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[a, b, c]) => {
                    t.push(a);
                    q.push(b);
                    v.push(c);
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "malformed CSV row {}: {line:?}",
                        row + 2
                    )))
                }
            }
        }
        Trajectory::new(t, q, v)
    }
}

/// Closed-form solution `q(t) = q_inf + (q0 - q_inf) exp(-(eta/m) t)`.
///
/// Both constants of the general solution are fixed by `(q0, v0)`:
/// the rest position is `q_inf = q0 + (m / eta) v0`.
pub fn analytic_trajectory(params: &SDParams, grid: &TimeGrid) -> Result<Trajectory> {
    params.validate()?;
    let rate = params.rate();
    let q_inf = params.rest_position();
    let amp = params.q0 - q_inf;
    Ok(Trajectory::from_fn(
        grid,
        |t| q_inf + amp * (-rate * t).exp(),
        |t| params.v0 * (-rate * t).exp(),
    ))
}

/// Which second-order equation [`integrate_eom`] advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EomForm {
    /// `m q'' + eta q' = 0`
    Original,
    /// `m q'' - (eta^2 / m) q = 0`, valid only on the decaying branch.
    Transformed,
}

/// RK4 integration of the chosen equation of motion, sampled on `grid`.
///
/// The internal step is the largest divisor of `grid.dt()` not exceeding
/// `step` (default `1e-4 m / eta`), so samples land exactly on the grid.
/// For [`EomForm::Transformed`] the initial state must satisfy
/// `v0 = -(eta/m) q0` to 1e-9 relative; otherwise the growing mode
/// `exp(+eta t / m)` is excited and the run is refused.
pub fn integrate_eom(
    params: &SDParams,
    form: EomForm,
    grid: &TimeGrid,
    step: Option<f64>,
) -> Result<Trajectory> {
    params.validate()?;
    let step = step.unwrap_or_else(|| params.default_step());
    require_positive("step", step)?;
    let rate = params.rate();
    if form == EomForm::Transformed {
        let expected = -rate * params.q0;
        let scale = params.v0.abs().max(expected.abs());
        let violation = if scale == 0.0 {
            0.0
        } else {
            (params.v0 - expected).abs() / scale
        };
        if violation > BRANCH_REL_TOL {
            return Err(Error::BranchConstraint {
                q0: params.q0,
                v0: params.v0,
                violation,
            });
        }
    }

    let substeps = ((grid.dt() / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = grid.dt() / substeps as f64;
    let acceleration = move |y: &[f64; 2]| match form {
        EomForm::Original => -rate * y[1],
        EomForm::Transformed => rate * rate * y[0],
    };

    let n = grid.len();
    let mut q = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    rk4_integrate(
        |_t, y: &[f64; 2]| [y[1], acceleration(y)],
        0.0,
        [params.q0, params.v0],
        h,
        (n - 1) * substeps,
        |i, y| {
            if i % substeps == 0 {
                q.push(y[0]);
                v.push(y[1]);
            }
        },
    );
    Ok(Trajectory {
        t: grid.times(),
        q,
        v,
        dt: grid.dt(),
    })
}

/// `T = m v^2 / 2`. Requires `m > 0`.
pub fn kinetic_energy(m: f64, v: f64) -> f64 {
    0.5 * m * v * v
}

/// Instantaneous dissipated power `eta v^2`, twice the Rayleigh function `eta v^2 / 2`.
pub fn rayleigh_power(eta: f64, v: f64) -> f64 {
    eta * v * v
}

/// Trapezoid quadrature of `eta v^2` over the whole trajectory.
pub fn dissipated_work(trajectory: &Trajectory, eta: f64) -> Result<f64> {
    require_positive("eta", eta)?;
    let power: Vec<f64> = trajectory
        .v
        .iter()
        .map(|&v| rayleigh_power(eta, v))
        .collect();
    Ok(trapezoid_uniform(&power, trajectory.dt))
}

/// Per-sample kinetic energy, cumulative dissipated work and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub kinetic: Vec<f64>,
    pub dissipated: Vec<f64>,
    pub total: Vec<f64>,
}

impl EnergyLedger {
    pub fn new(trajectory: &Trajectory, m: f64, eta: f64) -> Result<Self> {
        require_positive("m", m)?;
        require_positive("eta", eta)?;
        let kinetic: Vec<f64> = trajectory.v.iter().map(|&v| kinetic_energy(m, v)).collect();
        let power: Vec<f64> = trajectory
            .v
            .iter()
            .map(|&v| rayleigh_power(eta, v))
            .collect();
        let dissipated = cumulative_trapezoid(&trajectory.t, &power);
        let total = kinetic
            .iter()
            .zip(&dissipated)
            .map(|(k, w)| k + w)
            .collect();
        Ok(EnergyLedger {
            kinetic,
            dissipated,
            total,
        })
    }

    /// Largest deviation of `T + W` from its initial value.
    pub fn max_balance_error(&self) -> f64 {
        let e0 = self.total[0];
        self.total
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
    }
}

/// Tunables for [`classify_sd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Terminal kinetic energy must fall to at most this fraction of the initial value.
    pub kinetic_epsilon: f64,
    /// Absolute slack allowed in the strict inequalities. Zero means exact.
    pub slack: f64,
    /// Time at which the vanishing check is evaluated; `None` uses the last sample.
    pub horizon: Option<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            kinetic_epsilon: 1e-6,
            slack: 0.0,
            horizon: None,
        }
    }
}

/// First failing sample for each check, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Violations {
    pub kinetic: Option<usize>,
    pub monotonic: Option<usize>,
    pub vanishing: Option<usize>,
    pub work: Option<usize>,
}

/// Outcome of [`classify_sd`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDReport {
    pub kinetic_strictly_decreasing: bool,
    pub trajectory_monotonic: bool,
    pub kinetic_vanishes: bool,
    pub work_nondecreasing: bool,
    /// Smallest failing sample index across all checks, `-1` if none failed.
    pub first_violation_index: i64,
    #[serde(skip)]
    pub violations: Violations,
}

impl SDReport {
    pub fn is_sd(&self) -> bool {
        self.kinetic_strictly_decreasing
            && self.trajectory_monotonic
            && self.kinetic_vanishes
            && self.work_nondecreasing
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Check a sampled trajectory for strict dissipativity.
///
/// Velocity may have either sign; only `|v|` has to decrease and `q` may
/// move in either direction as long as it never turns around. The source
/// energy is bookkept as `W_i = T_0 - T_i`, the energy handed to the bath
/// by a closed system, so the check needs the mass only.
pub fn classify_sd(trajectory: &Trajectory, m: f64, opts: &ClassifyOptions) -> SDReport {
    let slack = opts.slack.max(0.0);
    let kinetic: Vec<f64> = trajectory.v.iter().map(|&v| kinetic_energy(m, v)).collect();

    let kinetic_violation = (1..kinetic.len()).find(|&i| !(kinetic[i] < kinetic[i - 1] + slack));

    let q = &trajectory.q;
    let direction = (q[1] - q[0]).signum();
    let monotonic_violation = (1..q.len()).find(|&i| {
        let step = direction * (q[i] - q[i - 1]);
        !(step > -slack && (step > 0.0 || slack > 0.0))
    });

    let horizon_index = match opts.horizon {
        // last sample at or before the horizon
        Some(h) => trajectory.t.iter().rposition(|&t| t <= h).unwrap_or(0),
        None => kinetic.len() - 1,
    };
    let vanishing_violation = if kinetic[horizon_index] <= opts.kinetic_epsilon * kinetic[0] {
        None
    } else {
        Some(horizon_index)
    };

    let work: Vec<f64> = kinetic.iter().map(|t| kinetic[0] - t).collect();
    let work_violation = (1..work.len()).find(|&i| !(work[i] >= work[i - 1] - slack));

    let violations = Violations {
        kinetic: kinetic_violation,
        monotonic: monotonic_violation,
        vanishing: vanishing_violation,
        work: work_violation,
    };
    let first = [
        kinetic_violation,
        monotonic_violation,
        vanishing_violation,
        work_violation,
    ]
    .into_iter()
    .flatten()
    .min();

    SDReport {
        kinetic_strictly_decreasing: kinetic_violation.is_none(),
        trajectory_monotonic: monotonic_violation.is_none(),
        kinetic_vanishes: vanishing_violation.is_none(),
        work_nondecreasing: work_violation.is_none(),
        first_violation_index: first.map_or(-1, |i| i as i64),
        violations,
    }
}
