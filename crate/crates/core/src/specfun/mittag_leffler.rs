//! Three-parameter Mittag-Leffler function
//! E^γ_{α,β}(z) = Σ_{r≥0} (γ)_r z^r / (r! Γ(αr+β)), with (γ)_r the rising factorial.

use super::dd::{self, Dd};
use super::gamma::reciprocal_gamma;
use super::series::{NeumaierSum, SeriesConfig, SeriesMonitor};
use super::Evaluated;
use crate::error::{domain, Result};
use num_complex::Complex64;

fn check(alpha: f64, beta: f64, gamma: f64, cfg: &SeriesConfig) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0 && gamma > 0.0) {
        return domain("Mittag-Leffler parameters must be positive");
    }
    cfg.validate()
}

/// |(γ)_r z^r / (r! Γ(αr+β))| from the running log of |(γ)_r z^r / r!|.
fn term_magnitude(log_coef: f64, arg: f64) -> f64 {
    if log_coef < 700.0 && arg < 170.0 {
        log_coef.exp() * reciprocal_gamma(arg)
    } else {
        (log_coef - libm::lgamma(arg)).exp()
    }
}

/// E^γ_{α,β}(x) for real x.
pub fn mittag_leffler(alpha: f64, beta: f64, gamma: f64, x: f64, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    check(alpha, beta, gamma, cfg)?;
    if !x.is_finite() {
        return domain("Mittag-Leffler argument must be finite");
    }
    if x == 0.0 {
        return Ok(Evaluated::exact(reciprocal_gamma(beta)));
    }
    let ln_x = x.abs().ln();
    let negative = x < 0.0;
    let mut monitor = SeriesMonitor::new(*cfg);
    let mut sum = NeumaierSum::default();
    let mut log_coef = 0.0;
    for r in 0..cfg.max_terms {
        if r > 0 {
            let rf = r as f64;
            log_coef += ((gamma + rf - 1.0) / rf).ln() + ln_x;
        }
        let mag = term_magnitude(log_coef, alpha * r as f64 + beta);
        let term = if negative && r % 2 == 1 { -mag } else { mag };
        sum.add(term);
        if monitor.push(mag, sum.value().abs()) {
            break;
        }
    }
    let v = sum.value();
    if monitor.finish(v, v.abs()).max_term > dd::RESUM_RATIO * v.abs() {
        return Ok(resum_extended(alpha, beta, gamma, x, cfg));
    }
    Ok(monitor.finish(v, v.abs()))
}

/// The series in double-double, with ln|(γ)_r x^r / r!| accumulated by recurrence.
fn resum_extended(alpha: f64, beta: f64, gamma: f64, x: f64, cfg: &SeriesConfig) -> Evaluated<f64> {
    let ln_x = Dd::new(x.abs()).ln();
    let mut log_coef = Dd::default();
    dd::resum(cfg, |r| {
        if r > 0 {
            log_coef = log_coef + ((Dd::new(gamma) + Dd::new(r as f64 - 1.0)) / Dd::new(r as f64)).ln() + ln_x;
        }
        let (lg, _) = dd::ln_gamma_signed(dd::affine(beta, alpha, r));
        let mag = (log_coef - lg).exp();
        if x < 0.0 && r % 2 == 1 { -mag } else { mag }
    })
}

/// E^γ_{α,β}(z) for complex z, used by the codifference formulas.
pub fn mittag_leffler_complex(
    alpha: f64,
    beta: f64,
    gamma: f64,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<Evaluated<Complex64>> {
    check(alpha, beta, gamma, cfg)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("Mittag-Leffler argument must be finite");
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Evaluated::exact(Complex64::new(reciprocal_gamma(beta), 0.0)));
    }
    let ln_z = z.norm().ln();
    let theta = z.arg();
    let mut monitor = SeriesMonitor::new(*cfg);
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    let mut log_coef = 0.0;
    for r in 0..cfg.max_terms {
        if r > 0 {
            let rf = r as f64;
            log_coef += ((gamma + rf - 1.0) / rf).ln() + ln_z;
        }
        let mag = term_magnitude(log_coef, alpha * r as f64 + beta);
        let phase = theta * r as f64;
        re.add(mag * phase.cos());
        im.add(mag * phase.sin());
        let partial = Complex64::new(re.value(), im.value()).norm();
        if monitor.push(mag, partial) {
            break;
        }
    }
    let v = Complex64::new(re.value(), im.value());
    Ok(monitor.finish(v, v.norm()))
}
