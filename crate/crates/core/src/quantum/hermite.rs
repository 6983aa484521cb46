//! Physicists' Hermite polynomials and the normalized Hermite functions.

use std::f64::consts::PI;

/// `H_n(x)` by the three-term recurrence `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Hermite function `pi^{-1/4} (2^n n!)^{-1/2} exp(-xi^2/2) H_n(xi)`, unit-normalized in `xi`.
///
/// Evaluated through the normalized recurrence so that neither `2^n n!`
/// nor `H_n` is ever formed; returns 0 once the Gaussian underflows.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let gauss = (-0.5 * xi * xi).exp();
    if gauss == 0.0 {
        return 0.0;
    }
    let mut prev = PI.powf(-0.25) * gauss;
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * xi * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn low_order_values() {
        assert_eq!(hermite(0, 3.7), 1.0);
        assert_eq!(hermite(1, 0.5), 1.0);
        assert_eq!(hermite(2, 1.0), 2.0);
        // H_3 = 8x^3 - 12x, H_4 = 16x^4 - 48x^2 + 12
        assert_eq!(hermite(3, 2.0), 40.0);
        assert_eq!(hermite(4, 1.0), -20.0);
    }

    #[test]
    fn normalized_recurrence_matches_explicit_form() {
        for n in 0..12 {
            for &xi in &[-2.5f64, -0.3, 0.0, 0.8, 3.1] {
                let explicit = PI.powf(-0.25) / (2f64.powi(n as i32) * factorial(n)).sqrt()
                    * (-0.5 * xi * xi).exp()
                    * hermite(n, xi);
                let got = hermite_function(n, xi);
                assert!(
                    (got - explicit).abs() < 1e-13,
                    "n={n} xi={xi}: {got} vs {explicit}"
                );
            }
        }
    }

    #[test]
    fn underflow_returns_zero_and_large_n_stays_finite() {
        assert_eq!(hermite_function(3, 60.0), 0.0);
        let v = hermite_function(400, 10.0);
        assert!(v.is_finite() && v.abs() < 1.0);
    }
}
