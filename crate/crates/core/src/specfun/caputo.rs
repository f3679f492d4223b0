//! Grünwald–Letnikov approximation of the Caputo derivative from uniform samples.

use crate::error::{domain, Result};

/// Caputo derivative of order `beta ∈ (0, 1]` at `t_eval`, from samples `(t, f(t))`
/// spaced `step` apart starting at `t = 0`.
///
/// For `beta < 1` the Grünwald–Letnikov sum is applied to `f − f(0)`, which is first
/// order in `step`. For `beta = 1` a central difference is used, or a one-sided second
/// order difference when `t_eval` is the last sample.
pub fn caputo_derivative_numeric(samples: &[(f64, f64)], beta: f64, t_eval: f64, step: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain("caputo_derivative_numeric needs beta in (0, 1]");
    }
    if !(step > 0.0) || !(t_eval >= 0.0) {
        return domain("caputo_derivative_numeric needs step > 0 and t_eval ≥ 0");
    }
    if samples.len() < 3 {
        return domain("caputo_derivative_numeric needs at least three samples");
    }
    if (samples[0].0).abs() > 1e-9 * step.max(1.0) {
        return domain("samples must start at t = 0");
    }
    for (k, &(t, _)) in samples.iter().enumerate() {
        if (t - k as f64 * step).abs() > 1e-6 * step {
            return domain("samples must be uniformly spaced by step");
        }
    }
    let pos = t_eval / step;
    let n = pos.round();
    if (pos - n).abs() > 1e-6 || n as usize >= samples.len() {
        return domain("t_eval must be a sample point covered by the samples");
    }
    let n = n as usize;
    if beta == 1.0 {
        if n >= 1 && n + 1 < samples.len() {
            return Ok((samples[n + 1].1 - samples[n - 1].1) / (2.0 * step));
        }
        if n >= 2 {
            return Ok((3.0 * samples[n].1 - 4.0 * samples[n - 1].1 + samples[n - 2].1) / (2.0 * step));
        }
        return Ok((-3.0 * samples[0].1 + 4.0 * samples[1].1 - samples[2].1) / (2.0 * step));
    }
    let f0 = samples[0].1;
    let mut w = 1.0;
    let mut acc = 0.0;
    for k in 0..=n {
        if k > 0 {
            w *= 1.0 - (beta + 1.0) / k as f64;
        }
        acc += w * (samples[n - k].1 - f0);
    }
    Ok(acc / step.powf(beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64, step: f64, len: usize) -> Vec<(f64, f64)> {
        (0..len).map(|k| (k as f64 * step, f(k as f64 * step))).collect()
    }

    #[test]
    fn first_derivative_of_identity() {
        let s = grid(|t| t, 1e-3, 1001);
        assert!((caputo_derivative_numeric(&s, 1.0, 1.0, 1e-3).unwrap() - 1.0).abs() < 1e-10);
        assert!((caputo_derivative_numeric(&s, 1.0, 0.5, 1e-3).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let s = grid(|_| 3.0, 0.01, 101);
        assert_eq!(caputo_derivative_numeric(&s, 0.5, 1.0, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn half_derivative_of_identity() {
        // D^{1/2} t = t^{1/2}/Γ(3/2)
        let s = grid(|t| t, 1e-3, 1001);
        let exact = 1.0 / crate::specfun::gamma(1.5);
        assert!((caputo_derivative_numeric(&s, 0.5, 1.0, 1e-3).unwrap() - exact).abs() < 1e-2);
    }

    #[test]
    fn rejects_short_or_misaligned_input() {
        let s = grid(|t| t, 0.1, 2);
        assert!(caputo_derivative_numeric(&s, 0.5, 0.1, 0.1).is_err());
        let s = grid(|t| t, 0.1, 11);
        assert!(caputo_derivative_numeric(&s, 0.5, 2.0, 0.1).is_err());
    }
}
