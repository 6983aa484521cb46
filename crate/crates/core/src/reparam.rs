//! Velocity re-parameterization `h = gamma' o gamma^{-1}` of the viscous
//! system and the position-only description it induces.
//!
//! Along a monotone trajectory the friction force `-eta q'` can be written
//! as a function of position alone. For the viscous system the field is
//! affine, `h(q) = -(eta/m)(q - q_inf)`, the transformed force is
//! `(eta^2/m) q` and the source function `eta^2 q^2 / 2m` plays the role of
//! a potential.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classical::{EomForm, SDParams, Trajectory};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::PartitionRule;

/// Affine velocity field `h(q) = slope q + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityField {
    pub slope: f64,
    pub offset: f64,
}

impl VelocityField {
    pub fn eval(&self, q: f64) -> f64 {
        self.slope * q + self.offset
    }

    /// Position where the field vanishes.
    pub fn rest_point(&self) -> f64 {
        -self.offset / self.slope
    }
}

/// Velocity as a function of position along the decaying trajectory.
///
/// Rejects the rest trajectory `v0 = 0`, which has no bijective parameterization.
pub fn velocity_field(params: &SDParams) -> Result<VelocityField> {
    params.validate()?;
    if params.v0 == 0.0 {
        return Err(Error::param(
            "v0",
            "zero initial velocity gives the rest trajectory, which is not strictly dissipative",
        ));
    }
    let rate = params.rate();
    Ok(VelocityField {
        slope: -rate,
        offset: rate * params.rest_position(),
    })
}

/// Friction force with the velocity replaced by `h(q) = -(eta/m) q`: `(eta^2/m) q`.
pub fn transformed_force(eta: f64, m: f64, q: f64) -> f64 {
    eta * eta / m * q
}

/// Normalization of the source function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceScale {
    /// `eta^2 q^2 / 2m`, the antiderivative of the transformed force.
    #[default]
    Half,
    /// `eta^2 q^2 / m`. Kept for comparison only; it does not generate the force.
    Unhalved,
}

/// Source function `W(q) = eta^2 q^2 / 2m`.
pub fn source_function(eta: f64, m: f64, q: f64) -> f64 {
    source_function_scaled(eta, m, q, SourceScale::Half)
}

pub fn source_function_scaled(eta: f64, m: f64, q: f64, scale: SourceScale) -> f64 {
    let full = eta * eta * q * q / m;
    match scale {
        SourceScale::Half => 0.5 * full,
        SourceScale::Unhalved => full,
    }
}

/// Time-side and position-side evaluations of the dissipated work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    pub n: usize,
    pub w_time: f64,
    pub w_position: f64,
    pub gap: f64,
}

/// Compare `int eta q'^2 dt` with `int eta h(q) dq` on the closed-form trajectory.
///
/// Both sides use the same `n`-interval partition of `[t_a, t_b]`, the
/// position side through the images `q_j = q(t_j)`. The default rule is
/// the trapezoid; see [`theorem1_check_with`] for left and right tags.
pub fn theorem1_check(params: &SDParams, t_a: f64, t_b: f64, n: usize) -> Result<IntegralCheck> {
    theorem1_check_with(params, t_a, t_b, n, PartitionRule::Trapezoid)
}

pub fn theorem1_check_with(
    params: &SDParams,
    t_a: f64,
    t_b: f64,
    n: usize,
    rule: PartitionRule,
) -> Result<IntegralCheck> {
    let field = velocity_field(params)?;
    if !(t_a.is_finite() && t_b.is_finite()) || t_b < t_a {
        return Err(Error::InvalidInterval {
            start: t_a,
            end: t_b,
        });
    }
    if n < 2 {
        return Err(Error::param(
            "n",
            format!("need at least 2 partitions, got {n}"),
        ));
    }
    if t_a == t_b {
        return Ok(IntegralCheck {
            n,
            w_time: 0.0,
            w_position: 0.0,
            gap: 0.0,
        });
    }

    let eta = params.eta;
    let rate = params.rate();
    let q_inf = params.rest_position();
    let amp = params.q0 - q_inf;
    let dt = (t_b - t_a) / n as f64;
    let sample = |j: usize| {
        let t = if j == n { t_b } else { t_a + j as f64 * dt };
        let decay = (-rate * t).exp();
        (t, q_inf + amp * decay, params.v0 * decay)
    };

    let mut w_time = 0.0;
    let mut w_position = 0.0;
    let (mut t0, mut q0, mut v0) = sample(0);
    let mut direction = 0.0;
    for j in 1..=n {
        let (t1, q1, v1) = sample(j);
        let dq = q1 - q0;
        if j == 1 {
            direction = dq.signum();
        }
        if !(direction * dq > 0.0) {
            return Err(Error::NotMonotonic(j));
        }
        let (p0, p1) = (eta * v0 * v0, eta * v1 * v1);
        let (f0, f1) = (eta * field.eval(q0), eta * field.eval(q1));
        w_time += (t1 - t0) * tag(rule, p0, p1);
        w_position += dq * tag(rule, f0, f1);
        (t0, q0, v0) = (t1, q1, v1);
    }
    Ok(IntegralCheck {
        n,
        w_time,
        w_position,
        gap: (w_time - w_position).abs(),
    })
}

/// The same comparison on a caller-supplied monotone trajectory, with
/// `h(q_j)` read off the sampled velocity.
pub fn integral_equivalence(
    trajectory: &Trajectory,
    eta: f64,
    rule: PartitionRule,
) -> Result<IntegralCheck> {
    require_positive("eta", eta)?;
    let (t, q, v) = (trajectory.t(), trajectory.q(), trajectory.v());
    let direction = (q[1] - q[0]).signum();
    if let Some(j) = (1..q.len()).find(|&j| !(direction * (q[j] - q[j - 1]) > 0.0)) {
        return Err(Error::NotMonotonic(j));
    }
    let mut w_time = 0.0;
    let mut w_position = 0.0;
    for j in 1..t.len() {
        w_time += (t[j] - t[j - 1]) * tag(rule, eta * v[j - 1] * v[j - 1], eta * v[j] * v[j]);
        w_position += (q[j] - q[j - 1]) * tag(rule, eta * v[j - 1], eta * v[j]);
    }
    Ok(IntegralCheck {
        n: t.len() - 1,
        w_time,
        w_position,
        gap: (w_time - w_position).abs(),
    })
}

fn tag(rule: PartitionRule, left: f64, right: f64) -> f64 {
    match rule {
        PartitionRule::Left => left,
        PartitionRule::Right => right,
        PartitionRule::Trapezoid => 0.5 * (left + right),
    }
}

/// Run [`theorem1_check`] for each partition count.
pub fn convergence_sweep(
    params: &SDParams,
    t_a: f64,
    t_b: f64,
    ns: &[usize],
) -> Result<Vec<IntegralCheck>> {
    ns.iter()
        .map(|&n| theorem1_check(params, t_a, t_b, n))
        .collect()
}

/// Observed order `log(gap_i / gap_{i+1}) / log(n_{i+1} / n_i)` between consecutive checks.
pub fn observed_orders(checks: &[IntegralCheck]) -> Vec<f64> {
    checks
        .windows(2)
        .map(|w| (w[0].gap / w[1].gap).ln() / (w[1].n as f64 / w[0].n as f64).ln())
        .collect()
}

/// CSV with header `n,w_time,w_position,gap`.
pub fn checks_to_csv(checks: &[IntegralCheck]) -> String {
    let mut out = String::from("n,w_time,w_position,gap\n");
    for c in checks {
        let _ = writeln!(out, "{},{},{},{}", c.n, c.w_time, c.w_position, c.gap);
    }
    out
}

/// Characteristic exponents of an equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub r1: f64,
    pub r2: f64,
    /// The root compatible with strict dissipation, `-eta/m` in both forms.
    pub admissible: f64,
}

/// Roots of `m r^2 + eta r = 0` (original) or `r^2 = eta^2 / m^2` (transformed).
pub fn characteristic_roots(m: f64, eta: f64, form: EomForm) -> Result<RootPair> {
    require_positive("m", m)?;
    require_positive("eta", eta)?;
    Ok(match form {
        EomForm::Original => {
            // -(b/2a) +- sqrt(b^2 - 4ac)/2a with a = 1, b = eta/m, c = 0
            let b = eta / m;
            let disc = (b * b).sqrt();
            let (r1, r2) = (-0.5 * (b + disc), -0.5 * (b - disc));
            RootPair {
                r1,
                r2,
                admissible: r1,
            }
        }
        EomForm::Transformed => {
            let half = 0.5 * (4.0 * eta * eta / (m * m)).sqrt();
            RootPair {
                r1: half,
                r2: -half,
                admissible: -half,
            }
        }
    })
}

/// Coefficients of `H = p^2/2m + stiffness q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub m: f64,
    pub stiffness: f64,
}

impl HamiltonianSpec {
    pub fn potential(&self, q: f64) -> f64 {
        self.stiffness * q * q
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.m) + self.potential(q)
    }

    /// Angular frequency of the oscillator this Hamiltonian describes, `eta / m`.
    pub fn omega(&self) -> f64 {
        (2.0 * self.stiffness / self.m).sqrt()
    }

    /// `L = m v^2 / 2 - W(q)`, the Legendre partner of [`Self::energy`].
    pub fn lagrangian(&self, q: f64, v: f64) -> f64 {
        0.5 * self.m * v * v - self.potential(q)
    }

    /// `L = m v^2 / 2 + W(q)`: the source enters with the sign of the work
    /// it generates, and the Euler-Lagrange equation is `m q'' - (eta^2/m) q = 0`.
    pub fn source_lagrangian(&self, q: f64, v: f64) -> f64 {
        0.5 * self.m * v * v + self.potential(q)
    }
}

pub fn build_hamiltonian(params: &SDParams) -> Result<HamiltonianSpec> {
    params.validate()?;
    Ok(HamiltonianSpec {
        m: params.m,
        stiffness: source_function(params.eta, params.m, 1.0),
    })
}

/// Largest `|d/dt dL/dv - dL/dq|` over the interior samples of a trajectory,
/// with every derivative taken by central differences.
pub fn euler_lagrange_residual<L>(lagrangian: L, trajectory: &Trajectory) -> f64
where
    L: Fn(f64, f64) -> f64,
{
    let (q, v) = (trajectory.q(), trajectory.v());
    let dt = trajectory.dt();
    let step = |x: f64| 1e-5 * x.abs().max(1.0);
    let momentum = |i: usize| {
        let d = step(v[i]);
        (lagrangian(q[i], v[i] + d) - lagrangian(q[i], v[i] - d)) / (2.0 * d)
    };
    (1..q.len() - 1)
        .map(|i| {
            let d = step(q[i]);
            let force = (lagrangian(q[i] + d, v[i]) - lagrangian(q[i] - d, v[i])) / (2.0 * d);
            let dp_dt = (momentum(i + 1) - momentum(i - 1)) / (2.0 * dt);
            (dp_dt - force).abs()
        })
        .fold(0.0, f64::max)
}
