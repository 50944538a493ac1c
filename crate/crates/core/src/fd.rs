//! Centered finite differences on the (uniform) integration grid.
//!
//! Residual functionals differentiate sampled quantities; a fourth-order
//! stencil keeps the differentiation error far below the integrator error
//! so that residual thresholds reflect geometry, not discretization.

use crate::Vector;

fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let h = times[1] - times[0];
    let ok = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() < 1e-9 * h.abs().max(1e-9));
    ok.then_some(h)
}

/// First derivative of scalar samples at index `i`: fourth-order centered
/// where the stencil fits on a uniform grid, second-order centered
/// otherwise. `i` must be interior (`1 <= i <= n-2`).
pub fn scalar_rate(times: &[f64], values: &[f64], i: usize) -> f64 {
    let n = values.len();
    if i >= 2 && i + 2 < n {
        if let Some(h) = uniform_step(times) {
            return (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1]
                + values[i - 2])
                / (12.0 * h);
        }
    }
    (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1])
}

/// Vector counterpart of [`scalar_rate`].
pub fn vector_rate(times: &[f64], values: &[Vector], i: usize) -> Vector {
    let n = values.len();
    if i >= 2 && i + 2 < n {
        if let Some(h) = uniform_step(times) {
            return (-&values[i + 2] + &values[i + 1] * 8.0 - &values[i - 1] * 8.0
                + &values[i - 2])
                / (12.0 * h);
        }
    }
    (&values[i + 1] - &values[i - 1]) / (times[i + 1] - times[i - 1])
}

/// Index range over which [`scalar_rate`] attains full order; used as the
/// sup-norm window so boundary stencils do not pollute residuals.
pub fn interior_range(n: usize) -> std::ops::Range<usize> {
    if n >= 7 {
        2..n - 2
    } else if n >= 3 {
        1..n - 1
    } else {
        0..0
    }
}
