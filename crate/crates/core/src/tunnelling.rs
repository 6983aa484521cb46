//! Transmission through a rectangular barrier with dissipative coupling
//! inside, `0 < x < dq`.
//!
//! Four routes are provided:
//!
//! * [`paper_transmission`]: the closed-form amplitude
//!   `4 eta^2 / (eta^2 + hbar^2 k^2) * exp(-eta dq^2 / hbar) * exp(2 k dq)`,
//!   reproduced verbatim. It is not unitary (it exceeds 1 near `dq = 0`)
//!   and it keeps an `exp(2 k dq)` factor that a modulus of `exp(i k dq)`
//!   would remove; results above 1 are flagged `nonphysical`, never clamped.
//!   Two later rewritings of the same expression, with `hbar k^2 / eta^2`
//!   and with `2 m hbar (E - V_B) / eta` in the prefactor, disagree with it
//!   and are not implemented.
//! * [`paper_matching`]: the four continuity relations at `x = 0` and
//!   `x = dq` for a Gaussian interior `B exp(-eta x^2 / 2 hbar)`, solved as
//!   written. Four equations in three unknowns are inconsistent for real `k`.
//! * [`baseline_transmission`]: the textbook rectangular barrier.
//! * [`numeric_transmission`]: RK4 transfer matrix across the barrier for
//!   a chosen real interior potential; unitary to rounding.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::ode::rk4_step;

/// Barrier and incident-particle parameters.
///
/// The incident wavenumber is derived, `k = sqrt(2 m E) / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierConfig {
    pub m: f64,
    pub eta: f64,
    pub hbar: f64,
    #[serde(rename = "V_B")]
    pub v_b: f64,
    pub dq: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

impl BarrierConfig {
    pub fn new(m: f64, eta: f64, hbar: f64, v_b: f64, dq: f64, energy: f64) -> Result<Self> {
        let cfg = BarrierConfig {
            m,
            eta,
            hbar,
            v_b,
            dq,
            energy,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build from the incident wavenumber; `E = hbar^2 k^2 / 2m`.
    pub fn with_wavenumber(m: f64, eta: f64, hbar: f64, v_b: f64, dq: f64, k: f64) -> Result<Self> {
        require_positive("k", k)?;
        BarrierConfig::new(m, eta, hbar, v_b, dq, hbar * hbar * k * k / (2.0 * m))
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("m", self.m)?;
        require_positive("hbar", self.hbar)?;
        require_positive("dq", self.dq)?;
        require_positive("E", self.energy)?;
        require_finite("V_B", self.v_b)?;
        require_finite("eta", self.eta)?;
        if self.eta < 0.0 {
            return Err(Error::param("eta", "must be non-negative"));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        (2.0 * self.m * self.energy).sqrt() / self.hbar
    }

    pub fn with_dq(mut self, dq: f64) -> Self {
        self.dq = dq;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

/// Interior potential used by [`numeric_transmission`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interior {
    /// `eta^2 x^2 / 2m`, the quantized source term alone.
    #[default]
    DissipativeOnly,
    /// `V_B + eta^2 x^2 / 2m`.
    #[serde(rename = "dissipative_plus_VB")]
    DissipativePlusBarrier,
    /// `V_B`, the plain rectangular barrier.
    #[serde(rename = "VB_only")]
    BarrierOnly,
}

impl Interior {
    pub fn potential(&self, cfg: &BarrierConfig, x: f64) -> f64 {
        let source = cfg.eta * cfg.eta * x * x / (2.0 * cfg.m);
        match self {
            Interior::DissipativeOnly => source,
            Interior::DissipativePlusBarrier => cfg.v_b + source,
            Interior::BarrierOnly => cfg.v_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeTag {
    PaperFormula,
    PaperMatching,
    Numeric,
    Baseline,
}

impl ModeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeTag::PaperFormula => "paper_formula",
            ModeTag::PaperMatching => "paper_matching",
            ModeTag::Numeric => "numeric",
            ModeTag::Baseline => "baseline",
        }
    }
}

/// Transmission (and, where defined, reflection) from one computation route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionResult {
    pub mode: ModeTag,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: Option<f64>,
    pub flux_error: Option<f64>,
    /// `T > 1`, possible only for the closed-form routes.
    pub nonphysical: bool,
}

impl TransmissionResult {
    fn closed_form(mode: ModeTag, transmission: f64) -> Self {
        TransmissionResult {
            mode,
            transmission,
            reflection: None,
            flux_error: None,
            nonphysical: transmission > 1.0,
        }
    }

    fn unitary(mode: ModeTag, transmission: f64, reflection: f64) -> Self {
        TransmissionResult {
            mode,
            transmission,
            reflection: Some(reflection),
            flux_error: Some((1.0 - reflection - transmission).abs()),
            nonphysical: transmission > 1.0,
        }
    }
}

/// Closed form `4 eta^2 / (eta^2 + hbar^2 k^2) exp(-(eta/hbar) dq^2) exp(2 k dq)`.
///
/// `eta = 0` makes the formula vanish identically and is rejected.
pub fn paper_transmission(cfg: &BarrierConfig) -> Result<TransmissionResult> {
    cfg.validate()?;
    if cfg.eta == 0.0 {
        return Err(Error::param(
            "eta",
            "the closed form is identically zero without dissipation; use baseline_transmission",
        ));
    }
    let (eta, hbar, k, dq) = (cfg.eta, cfg.hbar, cfg.k(), cfg.dq);
    let prefactor = 4.0 * eta * eta / (eta * eta + hbar * hbar * k * k);
    let t = prefactor * (2.0 * k * dq - (eta / hbar) * dq * dq).exp();
    Ok(TransmissionResult::closed_form(ModeTag::PaperFormula, t))
}

/// Amplitudes of the piecewise wave function for a given incident amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedAmplitudes {
    pub a_i: Complex64,
    pub a_r: Complex64,
    pub b: Complex64,
    pub a_t: Complex64,
    /// Largest relative residual of the three relations solved exactly.
    pub kept_residual: f64,
    /// Relative residual `|i k hbar + eta| / |k hbar|` of the derivative
    /// condition at `x = dq`, which cannot hold for real `k`.
    pub consistency_residual: f64,
    /// Least-squares solution of all four relations.
    pub least_squares: LeastSquaresAmplitudes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresAmplitudes {
    pub a_r: Complex64,
    pub b: Complex64,
    pub a_t: Complex64,
    /// `||M x - rhs||_2 / |A_I|`.
    pub residual: f64,
}

impl MatchedAmplitudes {
    pub fn transmission(&self) -> f64 {
        self.a_t.norm_sqr() / self.a_i.norm_sqr()
    }
}

/// The four continuity relations as a 4x3 system in `(A_R, B, A_T)`.
fn matching_system(cfg: &BarrierConfig, a_i: Complex64) -> ([[Complex64; 3]; 4], [Complex64; 4]) {
    let i = Complex64::i();
    let k = cfg.k();
    let slope = cfg.eta / cfg.hbar;
    let gauss = Complex64::from((-0.5 * slope * cfg.dq * cfg.dq).exp());
    let phase = (i * k * cfg.dq).exp();
    let zero = Complex64::from(0.0);
    let one = Complex64::from(1.0);
    (
        [
            // A_I + A_R = B
            [one, -one, zero],
            // A_I ik - A_R ik = -B eta / hbar
            [-i * k, Complex64::from(slope), zero],
            // B g = A_T e^{ik dq}
            [zero, gauss, -phase],
            // -(B eta / hbar) g = A_T ik e^{ik dq}
            [zero, -slope * gauss, -i * k * phase],
        ],
        [-a_i, -i * k * a_i, zero, zero],
    )
}

/// Solve the continuity relations of the Gaussian-interior ansatz.
///
/// The two relations at `x = 0` plus the value relation at `x = dq` fix
/// `A_R`, `B = 2 i k hbar A_I / (i k hbar - eta)` and `A_T` exactly; the
/// derivative relation at `x = dq` is left over and its residual reported.
/// The least-squares solution of all four is returned alongside.
pub fn paper_matching(cfg: &BarrierConfig, a_i: Complex64) -> Result<MatchedAmplitudes> {
    cfg.validate()?;
    if cfg.eta == 0.0 {
        return Err(Error::param("eta", "the Gaussian interior needs eta > 0"));
    }
    if a_i == Complex64::from(0.0) || !a_i.is_finite() {
        return Err(Error::param(
            "A_I",
            "incident amplitude must be non-zero and finite",
        ));
    }
    let i = Complex64::i();
    let (k, hbar, eta) = (cfg.k(), cfg.hbar, cfg.eta);
    let ikh = i * k * hbar;
    let b = 2.0 * ikh * a_i / (ikh - eta);
    let a_r = b - a_i;
    let gauss = (-0.5 * eta / hbar * cfg.dq * cfg.dq).exp();
    let a_t = b * gauss / (i * k * cfg.dq).exp();

    let (rows, rhs) = matching_system(cfg, a_i);
    let x = [a_r, b, a_t];
    let residual = |r: usize| {
        let lhs: Complex64 = (0..3).map(|c| rows[r][c] * x[c]).sum();
        let scale = (0..3)
            .map(|c| (rows[r][c] * x[c]).norm())
            .fold(rhs[r].norm(), f64::max);
        (lhs - rhs[r]).norm() / scale
    };
    let kept_residual = residual(0).max(residual(1)).max(residual(2));
    let consistency_residual = (ikh + eta).norm() / ikh.norm();

    Ok(MatchedAmplitudes {
        a_i,
        a_r,
        b,
        a_t,
        kept_residual,
        consistency_residual,
        least_squares: least_squares(&rows, &rhs, a_i.norm())?,
    })
}

fn least_squares(
    rows: &[[Complex64; 3]; 4],
    rhs: &[Complex64; 4],
    scale: f64,
) -> Result<LeastSquaresAmplitudes> {
    // normal equations (M^H M) x = M^H rhs
    let mut a = [[Complex64::from(0.0); 4]; 3];
    for r in 0..3 {
        for c in 0..3 {
            a[r][c] = (0..4).map(|k| rows[k][r].conj() * rows[k][c]).sum();
        }
        a[r][3] = (0..4).map(|k| rows[k][r].conj() * rhs[k]).sum();
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
            .expect("non-empty");
        if a[pivot][col].norm() == 0.0 {
            return Err(Error::Numerical("singular matching system".into()));
        }
        a.swap(col, pivot);
        let (top, below) = a.split_at_mut(col + 1);
        let lead = &top[col];
        for row in below {
            let f = row[col] / lead[col];
            for (x, &y) in row[col..].iter_mut().zip(&lead[col..]) {
                *x -= f * y;
            }
        }
    }
    let mut x = [Complex64::from(0.0); 3];
    for r in (0..3).rev() {
        let tail: Complex64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][3] - tail) / a[r][r];
    }
    let residual = (0..4)
        .map(|r| {
            let lhs: Complex64 = (0..3).map(|c| rows[r][c] * x[c]).sum();
            (lhs - rhs[r]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
        / scale;
    Ok(LeastSquaresAmplitudes {
        a_r: x[0],
        b: x[1],
        a_t: x[2],
        residual,
    })
}

/// `|A_T|^2 / |A_I|^2` from [`paper_matching`] with unit incidence.
pub fn paper_matching_transmission(cfg: &BarrierConfig) -> Result<TransmissionResult> {
    let amps = paper_matching(cfg, Complex64::from(1.0))?;
    Ok(TransmissionResult::closed_form(
        ModeTag::PaperMatching,
        amps.transmission(),
    ))
}

/// `sinh^2(sqrt z) / z` continued to `sin^2(sqrt(-z)) / (-z)` for `z < 0`.
fn sinhc_sq(z: f64) -> f64 {
    if z.abs() < 1e-6 {
        // 1 + z/3 + 2 z^2 / 45
        1.0 + z / 3.0 + 2.0 * z * z / 45.0
    } else if z > 0.0 {
        let s = z.sqrt().sinh();
        s * s / z
    } else {
        let s = (-z).sqrt().sin();
        s * s / -z
    }
}

/// Textbook rectangular barrier of height `V_B`, any `E > 0`.
///
/// `T = [1 + V_B^2 sinh^2(kappa dq) / (4 E (V_B - E))]^{-1}` below the top,
/// the `sin` form above it, and `[1 + m V_B dq^2 / 2 hbar^2]^{-1}` at `E = V_B`,
/// all evaluated through one expression continuous in `E`.
pub fn baseline_transmission(cfg: &BarrierConfig) -> Result<TransmissionResult> {
    cfg.validate()?;
    let (m, hbar, v_b, e, dq) = (cfg.m, cfg.hbar, cfg.v_b, cfg.energy, cfg.dq);
    let width_sq = 2.0 * m / (hbar * hbar) * dq * dq;
    // signed (kappa dq)^2
    let z = width_sq * (v_b - e);
    let t = 1.0 / (1.0 + v_b * v_b * width_sq * sinhc_sq(z) / (4.0 * e));
    Ok(TransmissionResult::unitary(ModeTag::Baseline, t, 1.0 - t))
}

/// Numeric route with the transfer matrix exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericTransmission {
    pub result: TransmissionResult,
    /// Maps `(phi, phi')` at `x = 0` to `x = dq`, row-major.
    pub transfer: [[f64; 2]; 2],
}

impl NumericTransmission {
    pub fn determinant(&self) -> f64 {
        let m = &self.transfer;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

pub const MIN_STEPS: usize = 1000;

/// Transmission for the interior `V_int` by RK4 integration of
/// `phi'' = (2m / hbar^2)(V_int(x) - E) phi` over `[0, dq]`.
///
/// Both unit initial columns are propagated to form the real transfer
/// matrix `M`; free plane waves `e^{ikx} + r e^{-ikx}` and `t e^{ikx}` are
/// matched at the two edges.
pub fn numeric_transmission(
    cfg: &BarrierConfig,
    interior: Interior,
    n_steps: usize,
) -> Result<NumericTransmission> {
    cfg.validate()?;
    if n_steps < MIN_STEPS {
        return Err(Error::param(
            "n_steps",
            format!("need at least {MIN_STEPS} steps, got {n_steps}"),
        ));
    }
    let coupling = 2.0 * cfg.m / (cfg.hbar * cfg.hbar);
    let rhs = |x: f64, y: &[f64; 4]| {
        let w = coupling * (interior.potential(cfg, x) - cfg.energy);
        [y[1], w * y[0], y[3], w * y[2]]
    };
    let h = cfg.dq / n_steps as f64;
    // columns: (phi, phi') from (1, 0) and from (0, 1)
    let mut y = [1.0, 0.0, 0.0, 1.0];
    for i in 0..n_steps {
        let x = i as f64 * h;
        y = rk4_step(&rhs, x, &y, h);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { x: x + h });
        }
    }
    let m = [[y[0], y[2]], [y[1], y[3]]];

    let k = cfg.k();
    let ik = Complex64::new(0.0, k);
    let a = ik * m[0][0] - m[1][0];
    let b = -k * k * m[0][1] - ik * m[1][1];
    let denom = a - b;
    if denom.norm() == 0.0 || !denom.is_finite() {
        return Err(Error::Numerical("degenerate matching denominator".into()));
    }
    let r = -(a + b) / denom;
    let t_phase = m[0][0] * (1.0 + r) + ik * m[0][1] * (1.0 - r);
    let big_t = t_phase.norm_sqr();
    let big_r = r.norm_sqr();

    Ok(NumericTransmission {
        result: TransmissionResult::unitary(ModeTag::Numeric, big_t, big_r),
        transfer: m,
    })
}

/// Which route [`transmission`] dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransmissionMode {
    PaperFormula,
    PaperMatching,
    Baseline,
    Numeric { interior: Interior, n_steps: usize },
}

impl TransmissionMode {
    pub fn tag(&self) -> ModeTag {
        match self {
            TransmissionMode::PaperFormula => ModeTag::PaperFormula,
            TransmissionMode::PaperMatching => ModeTag::PaperMatching,
            TransmissionMode::Baseline => ModeTag::Baseline,
            TransmissionMode::Numeric { .. } => ModeTag::Numeric,
        }
    }
}

pub fn transmission(cfg: &BarrierConfig, mode: TransmissionMode) -> Result<TransmissionResult> {
    match mode {
        TransmissionMode::PaperFormula => paper_transmission(cfg),
        TransmissionMode::PaperMatching => paper_matching_transmission(cfg),
        TransmissionMode::Baseline => baseline_transmission(cfg),
        TransmissionMode::Numeric { interior, n_steps } => {
            numeric_transmission(cfg, interior, n_steps).map(|n| n.result)
        }
    }
}

/// Least-squares fit of `ln T` against `dq^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuppressionFit {
    /// Coefficient of `dq^2`; `-eta / hbar` for the dissipative closed forms.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub mode: ModeTag,
}

/// Fit the Gaussian suppression exponent over a sweep of barrier widths.
///
/// For [`TransmissionMode::PaperFormula`] the regression is on `(dq, dq^2)`
/// jointly, which absorbs the linear `2 k dq` growth term; every other mode
/// uses a plain straight-line fit against `dq^2`.
pub fn suppression_fit(
    base: &BarrierConfig,
    dq_values: &[f64],
    mode: TransmissionMode,
) -> Result<SuppressionFit> {
    let mut distinct = dq_values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::param(
            "dq_values",
            format!("need at least 4 distinct widths, got {}", distinct.len()),
        ));
    }
    let mut log_t = Vec::with_capacity(dq_values.len());
    for &dq in dq_values {
        let t = transmission(&base.with_dq(dq), mode)?.transmission;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-positive transmission {t} at dq = {dq}"
            )));
        }
        log_t.push(t.ln());
    }

    let quadratic: Vec<f64> = dq_values.iter().map(|d| d * d).collect();
    let (intercept, slope, fitted) = match mode {
        TransmissionMode::PaperFormula => {
            let coef = ols(&[dq_values, &quadratic], &log_t)?;
            let fitted: Vec<f64> = dq_values
                .iter()
                .zip(&quadratic)
                .map(|(d, d2)| coef[0] + coef[1] * d + coef[2] * d2)
                .collect();
            (coef[0], coef[2], fitted)
        }
        _ => {
            let coef = ols(&[&quadratic], &log_t)?;
            let fitted = quadratic.iter().map(|d2| coef[0] + coef[1] * d2).collect();
            (coef[0], coef[1], fitted)
        }
    };
    let mean = log_t.iter().sum::<f64>() / log_t.len() as f64;
    let ss_tot: f64 = log_t.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = log_t
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(SuppressionFit {
        slope,
        intercept,
        r2,
        mode: mode.tag(),
    })
}

/// Ordinary least squares with an intercept; returns `[c0, c1, ...]`.
///
/// Regressors are centered before solving the normal equations.
fn ols(regressors: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len() as f64;
    let p = regressors.len();
    let means: Vec<f64> = regressors
        .iter()
        .map(|x| x.iter().sum::<f64>() / n)
        .collect();
    let y_mean = y.iter().sum::<f64>() / n;
    let centered: Vec<Vec<f64>> = regressors
        .iter()
        .zip(&means)
        .map(|(x, m)| x.iter().map(|v| v - m).collect())
        .collect();
    let mut a = vec![vec![0.0; p + 1]; p];
    for r in 0..p {
        for c in 0..p {
            a[r][c] = centered[r]
                .iter()
                .zip(&centered[c])
                .map(|(u, v)| u * v)
                .sum();
        }
        a[r][p] = centered[r]
            .iter()
            .zip(y)
            .map(|(u, v)| u * (v - y_mean))
            .sum();
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Numerical("collinear regressors".into()));
        }
        a.swap(col, pivot);
        let (top, below) = a.split_at_mut(col + 1);
        let lead = &top[col];
        for row in below {
            let f = row[col] / lead[col];
            for (x, &y) in row[col..].iter_mut().zip(&lead[col..]) {
                *x -= f * y;
            }
        }
    }
    let mut coef = vec![0.0; p];
    for r in (0..p).rev() {
        let tail: f64 = (r + 1..p).map(|c| a[r][c] * coef[c]).sum();
        coef[r] = (a[r][p] - tail) / a[r][r];
    }
    let intercept = y_mean - coef.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    let mut out = vec![intercept];
    out.extend(coef);
    Ok(out)
}

/// One row of a transmission sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRow {
    pub mode: ModeTag,
    pub m: f64,
    pub eta: f64,
    pub hbar: f64,
    #[serde(rename = "V_B")]
    pub v_b: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub k: f64,
    pub dq: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: Option<f64>,
    pub flux_error: Option<f64>,
    pub nonphysical: bool,
}

impl TransmissionRow {
    pub const CSV_HEADER: &'static str = "mode,m,eta,hbar,V_B,E,k,dq,T,R,flux_error,nonphysical";

    pub fn new(cfg: &BarrierConfig, result: &TransmissionResult) -> Self {
        TransmissionRow {
            mode: result.mode,
            m: cfg.m,
            eta: cfg.eta,
            hbar: cfg.hbar,
            v_b: cfg.v_b,
            energy: cfg.energy,
            k: cfg.k(),
            dq: cfg.dq,
            transmission: result.transmission,
            reflection: result.reflection,
            flux_error: result.flux_error,
            nonphysical: result.nonphysical,
        }
    }

    /// Missing reflection and flux error become empty fields.
    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.mode.as_str(),
            self.m,
            self.eta,
            self.hbar,
            self.v_b,
            self.energy,
            self.k,
            self.dq,
            self.transmission,
            opt(self.reflection),
            opt(self.flux_error),
            self.nonphysical
        );
        s
    }
}

pub fn rows_to_csv(rows: &[TransmissionRow]) -> String {
    let mut out = String::from(TransmissionRow::CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}
