//! Generalized Wright function ₁Ψ₁[(a, α_a); (b, β_b); x] = Σ_r Γ(a+α_a r)/Γ(b+β_b r) · x^r/r!.

use super::dd::{self, Dd};
use super::gamma::{gamma, ln_factorial, ln_gamma_signed, reciprocal_gamma};
use super::series::{NeumaierSum, SeriesConfig, SeriesMonitor};
use super::Evaluated;
use crate::error::{domain, Result};

/// ₁Ψ₁ by direct summation; denominators at poles of Γ contribute exactly zero.
pub fn wright_1_1(
    a: f64,
    alpha_a: f64,
    b: f64,
    beta_b: f64,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<Evaluated<f64>> {
    cfg.validate()?;
    if !x.is_finite() || !(alpha_a > 0.0) || !(beta_b > 0.0) {
        return domain("Wright function needs finite x and positive scale parameters");
    }
    let ln_x = if x == 0.0 { f64::NEG_INFINITY } else { x.abs().ln() };
    let mut monitor = SeriesMonitor::new(*cfg);
    let mut sum = NeumaierSum::default();
    for r in 0..cfg.max_terms {
        let rf = r as f64;
        let num_arg = a + alpha_a * rf;
        let den_arg = b + beta_b * rf;
        let (ln_num, s_num) = ln_gamma_signed(num_arg);
        if s_num == 0.0 {
            return domain(format!("Γ({num_arg}) in the Wright numerator is a pole"));
        }
        let rg = reciprocal_gamma(den_arg);
        let term = if r == 0 {
            gamma(num_arg) * rg
        } else if rg == 0.0 {
            0.0
        } else if num_arg < 170.0 && den_arg.abs() < 170.0 && r < 170 {
            let power = (rf * ln_x - ln_factorial(r as u64)).exp();
            gamma(num_arg) * rg * power * if x < 0.0 && r % 2 == 1 { -1.0 } else { 1.0 }
        } else {
            let (ln_den, s_den) = ln_gamma_signed(den_arg);
            let mag = (ln_num - ln_den + rf * ln_x - ln_factorial(r as u64)).exp();
            mag * s_num * s_den * if x < 0.0 && r % 2 == 1 { -1.0 } else { 1.0 }
        };
        sum.add(term);
        if x == 0.0 {
            monitor.push(term.abs(), sum.value().abs());
            let v = sum.value();
            let mut e = monitor.finish(v, v.abs());
            e.quality.truncated = false;
            return Ok(e);
        }
        if monitor.push(term.abs(), sum.value().abs()) {
            break;
        }
    }
    let v = sum.value();
    if monitor.finish(v, v.abs()).max_term > dd::RESUM_RATIO * v.abs() {
        return Ok(resum_extended(a, alpha_a, b, beta_b, x, cfg));
    }
    Ok(monitor.finish(v, v.abs()))
}

/// The series in double-double, each term from log-gamma ratios.
fn resum_extended(a: f64, alpha_a: f64, b: f64, beta_b: f64, x: f64, cfg: &SeriesConfig) -> Evaluated<f64> {
    let ln_x = Dd::new(x.abs()).ln();
    dd::resum(cfg, |r| {
        let (ln_den, s_den) = dd::ln_gamma_signed(dd::affine(b, beta_b, r));
        if s_den == 0.0 {
            return Dd::default();
        }
        let (ln_num, s_num) = dd::ln_gamma_signed(dd::affine(a, alpha_a, r));
        let (ln_fact, _) = dd::ln_gamma_signed(Dd::new(r as f64 + 1.0));
        let mag = (ln_num - ln_den + Dd::new(r as f64) * ln_x - ln_fact).exp();
        let sign = s_num * s_den * if x < 0.0 && r % 2 == 1 { -1.0 } else { 1.0 };
        if sign < 0.0 { -mag } else { mag }
    })
}
