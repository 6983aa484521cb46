//! Composite quadrature over sampled data.

/// How a partition sum picks its tag point inside each sub-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionRule {
    Left,
    Right,
    /// Average of the two endpoint values.
    #[default]
    Trapezoid,
}

/// Partition sum of sampled `y` over nodes `x` (need not be uniform or increasing).
pub fn partition_sum(x: &[f64], y: &[f64], rule: PartitionRule) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| {
            let width = xs[1] - xs[0];
            let height = match rule {
                PartitionRule::Left => ys[0],
                PartitionRule::Right => ys[1],
                PartitionRule::Trapezoid => 0.5 * (ys[0] + ys[1]),
            };
            width * height
        })
        .sum()
}

/// Composite trapezoid over a uniform grid with spacing `dx`.
pub fn trapezoid_uniform(y: &[f64], dx: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => dx * (0.5 * (y[0] + y[n - 1]) + y[1..n - 1].iter().sum::<f64>()),
    }
}

/// Running trapezoid integral; element `i` is the integral from `x[0]` to `x[i]`.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    if !y.is_empty() {
        out.push(0.0);
    }
    for (xs, ys) in x.windows(2).zip(y.windows(2)) {
        acc += 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|x| 2.0 * x - 1.0).collect();
        let exact = 3.0f64 * 3.0 - 3.0;
        assert!((partition_sum(&x, &y, PartitionRule::Trapezoid) - exact).abs() < 1e-13);
        assert!((trapezoid_uniform(&y, 0.3) - exact).abs() < 1e-13);
    }

    #[test]
    fn left_and_right_bracket_monotone_integrand() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let y: Vec<f64> = x.iter().map(|x| x * x).collect();
        let l = partition_sum(&x, &y, PartitionRule::Left);
        let r = partition_sum(&x, &y, PartitionRule::Right);
        assert!(l < 1.0 / 3.0 && r > 1.0 / 3.0);
    }

    #[test]
    fn reversed_nodes_flip_sign() {
        let x = [1.0, 0.5, 0.0];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(partition_sum(&x, &y, PartitionRule::Trapezoid), -1.0);
    }

    #[test]
    fn cumulative_ends_at_total() {
        let x: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
        let y: Vec<f64> = x.iter().map(|x| x.exp()).collect();
        let c = cumulative_trapezoid(&x, &y);
        assert_eq!(c.len(), x.len());
        assert_eq!(c[0], 0.0);
        assert!((c[50] - trapezoid_uniform(&y, 0.02)).abs() < 1e-13);
    }
}
