//! Property tests for the invariants of each module.

use proptest::prelude::*;

use sdquant_core::classical::{
    analytic_trajectory, classify_sd, integrate_eom, kinetic_energy, ClassifyOptions, EnergyLedger,
    EomForm, SDParams, TimeGrid, Trajectory,
};
use sdquant_core::quantum::{
    analytic_energy, analytic_state, apply_fd_hamiltonian, solve_spectrum_fd, time_factor,
    QuantumParams, SpatialGrid,
};
use sdquant_core::reparam::{
    characteristic_roots, convergence_sweep, observed_orders, source_function, transformed_force,
    velocity_field,
};
use sdquant_core::tunnelling::{
    baseline_transmission, numeric_transmission, paper_matching, paper_transmission, BarrierConfig,
    Interior,
};

fn nonzero_velocity() -> impl Strategy<Value = f64> {
    prop_oneof![-5.0..-0.01f64, 0.01..5.0f64]
}

fn sd_params() -> impl Strategy<Value = SDParams> {
    (0.1..10.0f64, 0.1..10.0f64, -5.0..5.0f64, nonzero_velocity())
        .prop_map(|(m, eta, q0, v0)| SDParams::new(m, eta, q0, v0).unwrap())
}

/// SD parameters on the decaying branch with rest position at the origin.
fn homogeneous_params() -> impl Strategy<Value = SDParams> {
    (
        0.1..10.0f64,
        0.1..10.0f64,
        prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
    )
        .prop_map(|(m, eta, q0)| SDParams::new(m, eta, q0, -eta / m * q0).unwrap())
}

fn max_position_error(p: &SDParams, dt: f64, horizon: f64) -> f64 {
    let grid = TimeGrid::uniform(horizon, dt).unwrap();
    let rk = integrate_eom(p, EomForm::Original, &grid, Some(dt)).unwrap();
    let exact = analytic_trajectory(p, &grid).unwrap();
    rk.q()
        .iter()
        .zip(exact.q())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rk4_converges_with_fourth_order(p in sd_params()) {
        let tau = 1.0 / p.rate();
        let coarse = max_position_error(&p, 0.1 * tau, 5.0 * tau);
        let fine = max_position_error(&p, 0.05 * tau, 5.0 * tau);
        let order = (coarse / fine).log2();
        prop_assert!(order >= 3.8, "order {order} (errors {coarse:e}, {fine:e})");
        // C dt^4 with C bounded by the solution scale
        prop_assert!(coarse <= p.v0.abs() * tau * 1e-4 * 10.0);
    }

    #[test]
    fn energy_balance_holds_pointwise(p in sd_params()) {
        let tau = 1.0 / p.rate();
        let grid = TimeGrid::uniform(8.0 * tau, 1e-3 * tau).unwrap();
        let tr = analytic_trajectory(&p, &grid).unwrap();
        let ledger = EnergyLedger::new(&tr, p.m, p.eta).unwrap();
        let t0 = kinetic_energy(p.m, p.v0);
        // trapezoid error bound: dt^2/12 * max|P'| * span
        prop_assert!(ledger.max_balance_error() <= 1e-6 * t0, "{}", ledger.max_balance_error());
    }

    #[test]
    fn viscous_motion_is_monotone(p in sd_params(), dt_frac in 1e-3..2e-2f64) {
        let tau = 1.0 / p.rate();
        let grid = TimeGrid::uniform(10.0 * tau, dt_frac * tau).unwrap();
        let report = classify_sd(&analytic_trajectory(&p, &grid).unwrap(), p.m, &ClassifyOptions::default());
        prop_assert!(report.kinetic_strictly_decreasing, "{report:?}");
        prop_assert!(report.trajectory_monotonic, "{report:?}");
        prop_assert!(report.work_nondecreasing, "{report:?}");
    }

    #[test]
    fn kinetic_energy_decays_exponentially(p in sd_params()) {
        let tau = 1.0 / p.rate();
        let grid = TimeGrid::uniform(6.0 * tau, 0.25 * tau).unwrap();
        let tr = analytic_trajectory(&p, &grid).unwrap();
        let t0 = kinetic_energy(p.m, p.v0);
        for (t, v) in tr.t().iter().zip(tr.v()) {
            let ratio = kinetic_energy(p.m, *v) / t0;
            let expected = (-2.0 * p.eta * t / p.m).exp();
            prop_assert!((ratio - expected).abs() <= 1e-10, "{ratio} vs {expected}");
        }
    }

    #[test]
    fn integral_equivalence_is_second_order(p in sd_params()) {
        let tau = 1.0 / p.rate();
        let checks = convergence_sweep(&p, 0.0, 8.0 * tau, &[64, 128, 256, 512]).unwrap();
        for order in observed_orders(&checks) {
            prop_assert!(order >= 1.9, "order {order}");
        }
    }

    #[test]
    fn force_matches_field_and_source_gradient(m in 0.1..10.0f64, eta in 0.1..10.0f64, q in -5.0..5.0f64) {
        let p = SDParams::new(m, eta, 1.0, -eta / m).unwrap();
        let h = velocity_field(&p).unwrap();
        let force = transformed_force(eta, m, q);
        prop_assert!((-eta * h.eval(q) - force).abs() <= 1e-12 * force.abs().max(1.0));
        let d = 1e-4;
        let grad = (source_function(eta, m, q + d) - source_function(eta, m, q - d)) / (2.0 * d);
        prop_assert!((grad - force).abs() <= 1e-8 * force.abs().max(1.0), "{grad} vs {force}");
    }

    #[test]
    fn roots_share_admissible_exponent(m in 0.1..10.0f64, eta in 0.1..10.0f64) {
        let original = characteristic_roots(m, eta, EomForm::Original).unwrap();
        let transformed = characteristic_roots(m, eta, EomForm::Transformed).unwrap();
        prop_assert_eq!(original.admissible, -eta / m);
        prop_assert!((transformed.admissible - original.admissible).abs() <= 4.0 * f64::EPSILON * eta / m);
        prop_assert_eq!(original.r2, 0.0);
        prop_assert_eq!(transformed.r1, -transformed.r2);
    }

    #[test]
    fn original_and_transformed_trajectories_coincide(p in homogeneous_params()) {
        let tau = 1.0 / p.rate();
        let grid = TimeGrid::uniform(5.0 * tau, 1e-3 * tau).unwrap();
        let a = integrate_eom(&p, EomForm::Original, &grid, None).unwrap();
        let b = integrate_eom(&p, EomForm::Transformed, &grid, None).unwrap();
        let scale = p.q0.abs();
        for (x, y) in a.q().iter().zip(b.q()) {
            prop_assert!((x - y).abs() <= 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn phase_has_unit_modulus(e in -100.0..100.0f64, t in -100.0..100.0f64, hbar in 0.1..10.0f64) {
        prop_assert!((time_factor(e, t, hbar).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn numeric_transfer_is_unitary(
        m in 0.2..3.0f64, eta in 0.0..3.0f64, hbar in 0.5..2.0f64,
        v_b in -1.0..3.0f64, dq in 0.1..2.0f64, e in 0.05..3.0f64,
        interior in prop_oneof![
            Just(Interior::DissipativeOnly),
            Just(Interior::DissipativePlusBarrier),
            Just(Interior::BarrierOnly)
        ],
    ) {
        let cfg = BarrierConfig::new(m, eta, hbar, v_b, dq, e).unwrap();
        let n = numeric_transmission(&cfg, interior, 2000).unwrap();
        prop_assert!(n.result.transmission >= 0.0 && n.result.reflection.unwrap() >= 0.0);
        prop_assert!(n.result.flux_error.unwrap() <= 1e-10, "{:?}", n.result);
        let scale = n.transfer.iter().flatten().map(|x| x * x).sum::<f64>().max(1.0);
        prop_assert!((n.determinant() - 1.0).abs() <= 1e-10 * scale);
    }

    #[test]
    fn matching_consistency_never_closes(eta in 0.01..10.0f64, hbar in 0.1..10.0f64, k in 0.01..10.0f64, dq in 0.1..3.0f64) {
        let cfg = BarrierConfig::with_wavenumber(1.0, eta, hbar, 0.0, dq, k).unwrap();
        let amps = paper_matching(&cfg, 1.0.into()).unwrap();
        prop_assert!(amps.consistency_residual > 1.0);
        prop_assert!(amps.kept_residual <= 1e-12);
    }

    #[test]
    fn closed_form_decreases_beyond_turnover(eta in 0.1..5.0f64, hbar in 0.2..5.0f64, k in 0.05..3.0f64) {
        let base = BarrierConfig::with_wavenumber(1.0, eta, hbar, 0.0, 1.0, k).unwrap();
        let turnover = hbar * k / eta;
        let t = |dq: f64| paper_transmission(&base.with_dq(dq)).unwrap().transmission;
        let mut prev = t(turnover * 1.01);
        for i in 1..20 {
            let next = t(turnover * (1.01 + 0.1 * i as f64));
            prop_assert!(next < prev || (prev == 0.0 && next == 0.0), "{next} vs {prev}");
            prev = next;
        }
    }
}

#[test]
fn thin_barrier_limits() {
    let cfg = BarrierConfig::new(1.0, 0.0, 1.0, 1.0, 1e-6, 0.5).unwrap();
    let b = baseline_transmission(&cfg).unwrap().transmission;
    let n = numeric_transmission(&cfg, Interior::BarrierOnly, 1000)
        .unwrap()
        .result
        .transmission;
    assert!((1.0 - b) < 1e-11 && (1.0 - n) < 1e-11, "{b} {n}");
}

#[test]
fn numeric_dissipative_transmission_falls_with_eta() {
    let ts: Vec<f64> = (1..=12)
        .map(|i| {
            let cfg = BarrierConfig::new(1.0, 0.25 * i as f64, 1.0, 0.0, 1.5, 0.5).unwrap();
            numeric_transmission(&cfg, Interior::DissipativeOnly, 20_000)
                .unwrap()
                .result
                .transmission
        })
        .collect();
    assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
}

#[test]
fn fd_spectrum_invariants() {
    let qp = QuantumParams::default();
    let grid = SpatialGrid::new(-12.0, 12.0, 4001).unwrap();
    let s = solve_spectrum_fd(&qp, &grid, 6).unwrap();
    let xs = grid.points();

    for n in 0..6 {
        let exact = analytic_energy(n, &qp);
        assert!(((s.energies[n] - exact) / exact).abs() <= 1e-4);
        assert!((s.overlap(n, n) - 1.0).abs() <= 1e-10);

        // parity on the symmetric grid
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let state = &s.states[n];
        for i in 0..state.len() {
            let mirror = state[state.len() - 1 - i];
            assert!((state[i] - parity * mirror).abs() <= 1e-10, "n={n} i={i}");
        }

        // discrete residual of the exact eigenfunction
        let phi: Vec<f64> = xs.iter().map(|&x| analytic_state(n, &qp, x)).collect();
        let h_phi = apply_fd_hamiltonian(&qp, &grid, &phi);
        let inner = &phi[1..phi.len() - 1];
        let res: f64 = h_phi
            .iter()
            .zip(inner)
            .map(|(a, b)| (a - exact * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = inner.iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(res / norm <= 1e-3, "n={n}: {}", res / norm);
    }
    for a in 0..5 {
        for b in 0..5 {
            if a != b {
                assert!(s.overlap(a, b).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn ground_state_log_density_slope() {
    // least-squares slope of ln|phi_0|^2 against x^2 on [0, 3]
    for qp in [
        QuantumParams::default(),
        QuantumParams::new(1.0, 2.0, 0.5).unwrap(),
    ] {
        let xs: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
        let u: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let y: Vec<f64> = xs
            .iter()
            .map(|&x| analytic_state(0, &qp, x).powi(2).ln())
            .collect();
        let (mu, my) = (mean(&u), mean(&y));
        let slope = u
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - mu) * (b - my))
            .sum::<f64>()
            / u.iter().map(|a| (a - mu).powi(2)).sum::<f64>();
        assert!((slope + qp.eta / qp.hbar).abs() <= 1e-6, "{slope}");
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn trajectory_csv_round_trip_is_bit_exact() {
    let p = SDParams::new(1.3, 0.7, -0.2, 2.9).unwrap();
    let tr = integrate_eom(
        &p,
        EomForm::Original,
        &TimeGrid::uniform(3.0, 0.01).unwrap(),
        None,
    )
    .unwrap();
    let back = Trajectory::from_csv(&tr.to_csv()).unwrap();
    assert_eq!(back.q(), tr.q());
    assert_eq!(back.v(), tr.v());
    assert_eq!(back.t(), tr.t());
}

#[test]
fn value_types_are_thread_safe() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Trajectory>();
    assert_send_sync::<sdquant_core::Spectrum>();
    assert_send_sync::<BarrierConfig>();
    assert_send_sync::<sdquant_core::SDReport>();
}
