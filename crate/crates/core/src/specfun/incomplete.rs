//! Incomplete beta, generalized incomplete gamma and generalized sine integrals,
//! all by adaptive quadrature.

use crate::error::{domain, Result};
use crate::quadrature::{gauss_kronrod, Tolerance};

const TOL: Tolerance = Tolerance::new(1e-15, 1e-13);

/// B(x; p, q) = ∫₀ˣ t^{p−1}(1−t)^{q−1} dt for 0 < x < 1, p > 0, q ≥ 0.
pub fn incomplete_beta(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain("incomplete_beta needs 0 < x < 1");
    }
    if !(p > 0.0 && q >= 0.0) {
        return domain("incomplete_beta needs p > 0 and q ≥ 0");
    }
    let r = if p < 1.0 {
        // t = u^{1/p} absorbs the t^{p−1} singularity at the origin.
        let inv = 1.0 / p;
        gauss_kronrod(|u| inv * (1.0 - u.powf(inv)).powf(q - 1.0), 0.0, x.powf(p), TOL)?
    } else {
        gauss_kronrod(|t| t.powf(p - 1.0) * (1.0 - t).powf(q - 1.0), 0.0, x, TOL)?
    };
    Ok(r.value)
}

/// γ(x; p, q) = ∫_p^q e^{−t} t^{x−1} dt for x > 0, 0 ≤ p < q ≤ 1.
pub fn generalized_incomplete_gamma(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("generalized_incomplete_gamma needs x > 0");
    }
    if !(0.0 <= p && p < q && q <= 1.0) {
        return domain("generalized_incomplete_gamma needs 0 ≤ p < q ≤ 1");
    }
    let r = if x < 1.0 && p == 0.0 {
        let inv = 1.0 / x;
        gauss_kronrod(|u| inv * (-u.powf(inv)).exp(), 0.0, q.powf(x), TOL)?
    } else {
        gauss_kronrod(|t| (-t).exp() * t.powf(x - 1.0), p, q, TOL)?
    };
    Ok(r.value)
}

/// Si(x; p, q) = ∫_p^q t^{x−1} sin t dt for x ≥ 1, 0 ≤ p < q ≤ 1.
pub fn generalized_sine_integral(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return domain("generalized_sine_integral needs x ≥ 1");
    }
    if !(0.0 <= p && p < q && q <= 1.0) {
        return domain("generalized_sine_integral needs 0 ≤ p < q ≤ 1");
    }
    Ok(gauss_kronrod(|t| t.powf(x - 1.0) * t.sin(), p, q, TOL)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_trivial_cases() {
        assert!((incomplete_beta(0.3, 1.0, 1.0).unwrap() - 0.3).abs() < 1e-14);
        assert!((incomplete_beta(0.5, 2.0, 1.0).unwrap() - 0.125).abs() < 1e-14);
        assert!(incomplete_beta(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn beta_with_zero_second_parameter() {
        // ∫₀^x dt/(1−t) = −ln(1−x)
        let v = incomplete_beta(0.5, 1.0, 0.0).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn beta_small_first_parameter() {
        // ∫₀^x t^{−1/2} dt = 2√x
        let v = incomplete_beta(0.49, 0.5, 1.0).unwrap();
        assert!((v - 1.4).abs() < 1e-13);
    }

    #[test]
    fn gamma_trivial_cases() {
        let e1 = (-1f64).exp();
        assert!((generalized_incomplete_gamma(1.0, 0.0, 1.0).unwrap() - (1.0 - e1)).abs() < 1e-14);
        assert!((generalized_incomplete_gamma(2.0, 0.0, 1.0).unwrap() - (1.0 - 2.0 * e1)).abs() < 1e-14);
        assert!(generalized_incomplete_gamma(2.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn sine_trivial_cases() {
        let one = 1f64;
        assert!((generalized_sine_integral(1.0, 0.0, 1.0).unwrap() - (1.0 - one.cos())).abs() < 1e-14);
        assert!((generalized_sine_integral(2.0, 0.0, 1.0).unwrap() - (one.sin() - one.cos())).abs() < 1e-14);
    }
}
