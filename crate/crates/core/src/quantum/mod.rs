//! Stationary states of the quantized viscous-medium Hamiltonian
//! `H = p^2/2m + eta^2 x^2 / 2m`.
//!
//! The Hamiltonian is a harmonic oscillator with `omega = eta / m` and
//! `m omega / hbar = eta / hbar`, so the spectrum is `(eta hbar / 2m)(2n + 1)`
//! and the states are Hermite functions in `x sqrt(eta / hbar)`. Only the
//! normalizable branch exists here; the `exp(+x^2)` solution is never built.
//!
//! [`solve_spectrum_fd`] is an independent check: a second-order
//! finite-difference discretization on a Dirichlet box, diagonalized with
//! the tridiagonal solver in [`tridiag`].

pub mod hermite;
pub mod tridiag;

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
pub use hermite::{hermite, hermite_function};
use tridiag::SymTridiagonal;

/// Default tail tolerance for [`Spectrum::leaking_states`].
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Mass, damping coefficient and reduced Planck constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub m: f64,
    pub eta: f64,
    pub hbar: f64,
}

impl Default for QuantumParams {
    fn default() -> Self {
        QuantumParams {
            m: 1.0,
            eta: 1.0,
            hbar: 1.0,
        }
    }
}

impl QuantumParams {
    pub fn new(m: f64, eta: f64, hbar: f64) -> Result<Self> {
        let qp = QuantumParams { m, eta, hbar };
        qp.validate()?;
        Ok(qp)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("m", self.m)?;
        require_positive("eta", self.eta)?;
        require_positive("hbar", self.hbar)
    }

    /// Inverse squared length scale `eta / hbar` of the Gaussian envelope.
    pub fn alpha(&self) -> f64 {
        self.eta / self.hbar
    }

    pub fn omega(&self) -> f64 {
        self.eta / self.m
    }

    pub fn potential(&self, x: f64) -> f64 {
        self.eta * self.eta * x * x / (2.0 * self.m)
    }
}

/// `E_n = (eta hbar / 2m)(2n + 1)`.
pub fn analytic_energy(n: usize, qp: &QuantumParams) -> f64 {
    qp.eta * qp.hbar / (2.0 * qp.m) * (2 * n + 1) as f64
}

/// Normalized eigenstate `N_n exp(-alpha x^2 / 2) H_n(sqrt(alpha) x)` with
/// `N_n = (alpha/pi)^{1/4} / sqrt(2^n n!)`, `alpha = eta / hbar`.
pub fn analytic_state(n: usize, qp: &QuantumParams, x: f64) -> f64 {
    let alpha = qp.alpha();
    alpha.powf(0.25) * hermite_function(n, alpha.sqrt() * x)
}

/// Stationary phase `exp(-i E t / hbar)`.
pub fn time_factor(energy: f64, t: f64, hbar: f64) -> Complex64 {
    Complex64::from_polar(1.0, -energy * t / hbar)
}

/// Full separable solution `phi_n(x) exp(-i E_n t / hbar)`.
pub fn wave_sample(n: usize, qp: &QuantumParams, x: f64, t: f64) -> WaveSample {
    WaveSample {
        x,
        value: analytic_state(n, qp, x) * time_factor(analytic_energy(n, qp), t, qp.hbar),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSample {
    pub x: f64,
    pub value: Complex64,
}

/// Uniform position grid including both Dirichlet endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    #[serde(rename = "n")]
    pub n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let g = SpatialGrid {
            x_min,
            x_max,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric box of half-width `12 sqrt(hbar / eta)`.
    pub fn default_for(qp: &QuantumParams, n_points: usize) -> Result<Self> {
        let half = 12.0 * (qp.hbar / qp.eta).sqrt();
        SpatialGrid::new(-half, half, n_points)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("x_min", self.x_min)?;
        require_finite("x_max", self.x_max)?;
        if self.x_min >= self.x_max {
            return Err(Error::param("x_max", "must exceed x_min"));
        }
        if self.n_points < 100 {
            return Err(Error::param(
                "n_points",
                format!("need at least 100 grid points, got {}", self.n_points),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_points - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }
}

/// Lowest eigenpairs of the discretized Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub grid: SpatialGrid,
    /// One row per state, sampled on every grid point (endpoints are zero).
    pub states: Vec<Vec<f64>>,
    /// Largest `|phi|` on the two points next to the walls, per state.
    #[serde(skip)]
    pub boundary_tail: Vec<f64>,
}

impl Spectrum {
    /// States whose boundary tail exceeds `tol`; a non-empty result means the box is too small.
    pub fn leaking_states(&self, tol: f64) -> Vec<usize> {
        self.boundary_tail
            .iter()
            .enumerate()
            .filter(|(_, &tail)| tail > tol)
            .map(|(k, _)| k)
            .collect()
    }

    /// `sum_i phi_a(x_i) phi_b(x_i) dx`.
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        self.grid.dx()
            * self.states[a]
                .iter()
                .zip(&self.states[b])
                .map(|(x, y)| x * y)
                .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }

    /// CSV with header `x,phi` for one state.
    pub fn state_csv(&self, k: usize) -> Option<String> {
        let state = self.states.get(k)?;
        let mut out = String::from("x,phi\n");
        for (i, phi) in state.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.grid.x(i), phi);
        }
        Some(out)
    }
}

/// Tridiagonal matrix of `-(hbar^2/2m) d^2/dx^2 + eta^2 x^2 / 2m` on the interior points.
pub fn fd_hamiltonian(qp: &QuantumParams, grid: &SpatialGrid) -> SymTridiagonal {
    let dx = grid.dx();
    let kinetic = qp.hbar * qp.hbar / (2.0 * qp.m * dx * dx);
    let interior = grid.n_points - 2;
    let diag = (1..=interior)
        .map(|i| 2.0 * kinetic + qp.potential(grid.x(i)))
        .collect();
    SymTridiagonal::new(diag, vec![-kinetic; interior - 1])
}

/// Apply the discrete Hamiltonian to values sampled on the full grid
/// (endpoints treated as the Dirichlet walls). Returns interior values.
pub fn apply_fd_hamiltonian(qp: &QuantumParams, grid: &SpatialGrid, phi: &[f64]) -> Vec<f64> {
    fd_hamiltonian(qp, grid).mul_vec(&phi[1..phi.len() - 1])
}

/// Lowest `n_states` eigenpairs of the finite-difference Hamiltonian.
///
/// States are normalized to `sum |phi|^2 dx = 1` and signed so that they
/// are positive on their rightmost lobe, matching the Hermite convention.
pub fn solve_spectrum_fd(
    qp: &QuantumParams,
    grid: &SpatialGrid,
    n_states: usize,
) -> Result<Spectrum> {
    qp.validate()?;
    grid.validate()?;
    let interior = grid.n_points - 2;
    if n_states == 0 || n_states > interior {
        return Err(Error::param(
            "n_states",
            format!("must be between 1 and {interior}, got {n_states}"),
        ));
    }
    let h = fd_hamiltonian(qp, grid);
    let (energies, vectors) = h.lowest_eigenpairs(n_states);
    if energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Numerical(
            "eigenvalues are not strictly ascending".into(),
        ));
    }

    let scale = grid.dx().sqrt().recip();
    let mut states = Vec::with_capacity(n_states);
    let mut boundary_tail = Vec::with_capacity(n_states);
    for v in vectors {
        let mut state = Vec::with_capacity(grid.n_points);
        state.push(0.0);
        state.extend(v.iter().map(|c| c * scale));
        state.push(0.0);
        let peak = state.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let lobe = state
            .iter()
            .rposition(|p| p.abs() > 1e-3 * peak)
            .unwrap_or(0);
        if state[lobe] < 0.0 {
            let last = state.len() - 1;
            state[1..last].iter_mut().for_each(|p| *p = -*p);
        }
        boundary_tail.push(state[1].abs().max(state[grid.n_points - 2].abs()));
        states.push(state);
    }
    Ok(Spectrum {
        energies,
        grid: *grid,
        states,
        boundary_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid_uniform;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn energies() {
        let unit = QuantumParams::default();
        assert_eq!(analytic_energy(0, &unit), 0.5);
        assert_eq!(analytic_energy(1, &unit), 1.5);
        assert_eq!(
            analytic_energy(0, &QuantumParams::new(2.0, 1.0, 1.0).unwrap()),
            0.25
        );
    }

    #[test]
    fn state_values() {
        let unit = QuantumParams::default();
        assert_eq!(analytic_state(1, &unit, 0.0), 0.0);
        assert_abs_diff_eq!(
            analytic_state(0, &unit, 0.0),
            PI.powf(-0.25),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            analytic_state(0, &unit, 0.0),
            0.7511255444649425,
            epsilon = 1e-15
        );
    }

    #[test]
    fn states_are_normalized_by_quadrature() {
        let grid = SpatialGrid::new(-12.0, 12.0, 4001).unwrap();
        for qp in [
            QuantumParams::default(),
            QuantumParams::new(1.0, 2.5, 0.7).unwrap(),
        ] {
            for n in 0..6 {
                let dens: Vec<f64> = grid
                    .points()
                    .iter()
                    .map(|&x| analytic_state(n, &qp, x).powi(2))
                    .collect();
                assert_abs_diff_eq!(trapezoid_uniform(&dens, grid.dx()), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn phase_factor() {
        assert_eq!(time_factor(3.0, 0.0, 1.0), Complex64::new(1.0, 0.0));
        let z = time_factor(PI, 1.0, 1.0);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_abs_diff_eq!(time_factor(-7.3, 12.1, 0.3).norm(), 1.0, epsilon = 1e-15);
        let w = wave_sample(2, &QuantumParams::default(), 0.4, 1.0);
        assert_abs_diff_eq!(
            w.value.norm(),
            analytic_state(2, &QuantumParams::default(), 0.4).abs(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn fd_low_states_unit_params() {
        let grid = SpatialGrid::new(-10.0, 10.0, 2001).unwrap();
        let s = solve_spectrum_fd(&QuantumParams::default(), &grid, 4).unwrap();
        for (n, e) in s.energies.iter().enumerate() {
            assert_abs_diff_eq!(*e, n as f64 + 0.5, epsilon = 1e-4);
        }
        assert!(s.leaking_states(BOUNDARY_TOL).is_empty());
        for k in 0..4 {
            assert_abs_diff_eq!(s.overlap(k, k), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn doubling_eta_doubles_spectrum() {
        let grid = SpatialGrid::new(-10.0, 10.0, 2001).unwrap();
        let a = solve_spectrum_fd(&QuantumParams::default(), &grid, 4).unwrap();
        let b = solve_spectrum_fd(&QuantumParams::new(1.0, 2.0, 1.0).unwrap(), &grid, 4).unwrap();
        for (ea, eb) in a.energies.iter().zip(&b.energies) {
            assert!((eb / ea - 2.0).abs() < 1e-4 * 2.0);
        }
    }

    #[test]
    fn fd_states_have_n_nodes() {
        let grid = SpatialGrid::new(-10.0, 10.0, 1001).unwrap();
        let s = solve_spectrum_fd(&QuantumParams::default(), &grid, 6).unwrap();
        for (n, state) in s.states.iter().enumerate() {
            let peak = state.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let significant: Vec<f64> = state
                .iter()
                .copied()
                .filter(|p| p.abs() > 1e-6 * peak)
                .collect();
            let changes = significant.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(changes, n);
        }
    }

    #[test]
    fn small_box_reports_leak() {
        let grid = SpatialGrid::new(-2.0, 2.0, 401).unwrap();
        let s = solve_spectrum_fd(&QuantumParams::default(), &grid, 3).unwrap();
        assert_eq!(s.leaking_states(BOUNDARY_TOL), vec![0, 1, 2]);
    }

    #[test]
    fn spectrum_argument_errors() {
        let qp = QuantumParams::default();
        assert!(SpatialGrid::new(1.0, -1.0, 500).is_err());
        assert!(SpatialGrid::new(-1.0, 1.0, 50).is_err());
        let grid = SpatialGrid::new(-5.0, 5.0, 100).unwrap();
        assert!(solve_spectrum_fd(&qp, &grid, 0).is_err());
        assert!(solve_spectrum_fd(&qp, &grid, 99).is_err());
        assert!(QuantumParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn json_and_csv_layout() {
        let grid = SpatialGrid::new(-6.0, 6.0, 121).unwrap();
        let s = solve_spectrum_fd(&QuantumParams::default(), &grid, 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["grid"]["n"], 121);
        assert_eq!(v["grid"]["x_min"], -6.0);
        assert_eq!(v["states"].as_array().unwrap().len(), 2);
        assert_eq!(v.as_object().unwrap().len(), 3);
        let csv = s.state_csv(1).unwrap();
        assert!(csv.starts_with("x,phi\n-6,0\n"));
        assert_eq!(csv.lines().count(), 122);
        assert!(s.state_csv(2).is_none());
    }
}
