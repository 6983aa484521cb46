//! Classical fourth-order Runge-Kutta for small fixed-size systems.
//!
//! Local truncation error is O(h^5) per step, global error O(h^4).

/// One RK4 step of `y' = f(t, y)` from `t` to `t + h`.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate `steps` uniform RK4 steps of size `h` starting at `(t0, y0)`,
/// calling `observe` on every state including the initial one.
pub fn rk4_integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    h: f64,
    steps: usize,
    mut observe: O,
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(usize, &[f64; N]),
{
    let mut y = y0;
    observe(0, &y);
    for i in 0..steps {
        // t from the index avoids drift from repeated addition
        let t = t0 + i as f64 * h;
        y = rk4_step(&f, t, &y, h);
        observe(i + 1, &y);
    }
    y
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}
