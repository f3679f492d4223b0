//! MGCP under a general subordinator clock, described by its Lévy measure. Everything here
//! is computed by quadrature against the measure, so it doubles as an independent check of
//! the per-variant closed forms.

use crate::error::{domain, Result};
use crate::gcp::RateMatrix;
use crate::quadrature::{gauss_kronrod, tanh_sinh, Tolerance};
use crate::specfun::{mittag_leffler, Evaluated, SeriesConfig};
use crate::subordinators::{levy_density, SubordinatorSpec};
use crate::variants::grouped_weights;
use std::fmt;
use std::sync::Arc;

const TOL: Tolerance = Tolerance::new(1e-300, 1e-12);

/// Density callback of a custom Lévy measure. Must be safe to call from several threads.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Lévy measure on `(0, ∞)`.
#[derive(Clone)]
pub enum LevyMeasureSpec {
    /// The measure of one of the four Lévy clocks.
    Named(SubordinatorSpec),
    /// A user density. `singularity_exponent` is `s` in `μ(r) ~ r^s` as `r → 0`; without it
    /// the origin is handled by tanh-sinh quadrature.
    Custom { density: DensityFn, singularity_exponent: Option<f64> },
}

impl fmt::Debug for LevyMeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Named(s) => f.debug_tuple("Named").field(s).finish(),
            Self::Custom { singularity_exponent, .. } => {
                f.debug_struct("Custom").field("singularity_exponent", singularity_exponent).finish()
            }
        }
    }
}

impl LevyMeasureSpec {
    pub fn named(spec: SubordinatorSpec) -> Result<Self> {
        spec.validate()?;
        if !spec.is_levy() {
            return domain("inverse-stable clocks have no Lévy measure");
        }
        Ok(Self::Named(spec))
    }

    /// Builds a custom measure after checking `∫ (1 ∧ r) μ(dr) < ∞` numerically.
    pub fn custom(density: DensityFn, singularity_exponent: Option<f64>) -> Result<Self> {
        if let Some(s) = singularity_exponent {
            if !(s > -2.0) {
                return domain(format!("singularity exponent {s} makes ∫(1∧r)μ(dr) diverge"));
            }
        }
        let m = Self::Custom { density, singularity_exponent };
        let near = m.integrate_origin(|r| r, 1.0)?;
        let far = m.integrate_tail(|_| 1.0)?;
        if !(near.is_finite() && far.is_finite()) {
            return domain("∫(1∧r)μ(dr) is not finite");
        }
        Ok(m)
    }

    pub fn density(&self, r: f64) -> f64 {
        match self {
            Self::Named(s) => levy_density(s, r).unwrap_or(f64::NAN),
            Self::Custom { density, .. } => density(r),
        }
    }

    fn exponent(&self) -> Option<f64> {
        match self {
            Self::Named(SubordinatorSpec::Stable { alpha }) => Some(-1.0 - alpha),
            Self::Named(SubordinatorSpec::TemperedStable { alpha, .. }) => Some(-1.0 - alpha),
            Self::Named(SubordinatorSpec::Gamma { .. }) => Some(-1.0),
            Self::Named(SubordinatorSpec::InverseGaussian { .. }) => Some(-1.5),
            Self::Named(_) => None,
            Self::Custom { singularity_exponent, .. } => *singularity_exponent,
        }
    }

    /// `∫₀¹ h(r) μ(r) dr` where `h(r) ~ r^{extra}` at the origin.
    fn integrate_origin(&self, h: impl Fn(f64) -> f64, extra: f64) -> Result<f64> {
        match self.exponent() {
            Some(s) => {
                // r = u^{1/p} turns r^{p−1} into a constant
                let p = extra + s + 1.0;
                if !(p > 0.0) {
                    return domain("integral diverges at the origin");
                }
                let inv = 1.0 / p;
                let f = |u: f64| {
                    if u <= 0.0 {
                        return 0.0;
                    }
                    let r = u.powf(inv);
                    let v = h(r) * self.density(r) * r / (p * u);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                };
                Ok(gauss_kronrod(f, 0.0, 1.0, TOL)?.value)
            }
            None => Ok(tanh_sinh(|r, _, _| h(r) * self.density(r), 0.0, 1.0, TOL)?.value),
        }
    }

    /// `∫₁^∞ h(r) μ(r) dr` through `r = 1/w`.
    fn integrate_tail(&self, h: impl Fn(f64) -> f64) -> Result<f64> {
        let f = |w: f64, _: f64, _: f64| {
            let r = 1.0 / w;
            h(r) * self.density(r) * r * r
        };
        Ok(tanh_sinh(f, 0.0, 1.0, TOL)?.value)
    }
}

/// Bernstein function `f(s) = ∫ (1 − e^{−sr}) μ(dr)`, by quadrature.
pub fn bernstein_f(m: &LevyMeasureSpec, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return domain("bernstein_f needs s ≥ 0");
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let h = |r: f64| -(-s * r).exp_m1();
    Ok(m.integrate_origin(h, 1.0)? + m.integrate_tail(h)?)
}

/// `∫ e^{−λr} r^k μ(dr)` for `k ≥ 1`, split at 1 with the upper part cut where the
/// integrand falls below `1e−16` of its running peak.
pub fn exponential_moment(m: &LevyMeasureSpec, lambda: f64, k: usize) -> Result<f64> {
    if !(lambda > 0.0) || k == 0 {
        return domain("exponential_moment needs λ > 0 and k ≥ 1");
    }
    let h = |r: f64| (-lambda * r + k as f64 * r.ln()).exp();
    let near = m.integrate_origin(h, k as f64)?;
    let g = |r: f64| h(r) * m.density(r);
    let mut peak = g(1.0).abs();
    let mut r_star = 1.0;
    loop {
        let next = r_star * 1.25 + 1.0;
        let v = g(next).abs();
        peak = peak.max(v);
        r_star = next;
        if (v <= 1e-16 * peak && next > k as f64 / lambda) || r_star > 1e6 {
            break;
        }
    }
    let far = gauss_kronrod(g, 1.0, r_star, TOL)?.value;
    Ok(near + far)
}

/// Rate of the jump `l̄ ≻ 0̄`:
/// `Σ_{Ω(k_i,l_i)} Π λ_ij^{x_ij}/x_ij! · ∫ e^{−λr} r^{Σx} μ(dr)`.
pub fn tcgcp_transition_rate(rates: &RateMatrix, m: &LevyMeasureSpec, l: &[usize]) -> Result<f64> {
    rates.check_state(l)?;
    if l.iter().all(|&x| x == 0) {
        return domain("jump state must be nonzero");
    }
    let lam = rates.total();
    let w = grouped_weights(rates, l, 1.0);
    let mut total = 0.0;
    for (x, &wx) in w.iter().enumerate().skip(1) {
        if wx != 0.0 {
            total += wx * exponential_moment(m, lam, x)?;
        }
    }
    Ok(total)
}

/// `g(λ; ū) = ∫ (1 − e^{−r Σ_ij λ_ij(1−u_i^j)}) μ(dr)`.
pub fn g_lambda_u(rates: &RateMatrix, m: &LevyMeasureSpec, u: &[f64]) -> Result<f64> {
    bernstein_f(m, rates.pgf_exponent(u)?)
}

/// `exp(−t·g(λ; ū))`.
pub fn tcgcp_pgf(rates: &RateMatrix, m: &LevyMeasureSpec, u: &[f64], t: f64) -> Result<f64> {
    Ok((-t * g_lambda_u(rates, m, u)?).exp())
}

/// `E_{β,1}(−t^β g(λ; ū))`, the pgf under the clock composed with an inverse β-stable time.
pub fn tcgcp_pgf_fractional(
    rates: &RateMatrix,
    m: &LevyMeasureSpec,
    beta: f64,
    u: &[f64],
    t: f64,
    cfg: &SeriesConfig,
) -> Result<Evaluated<f64>> {
    if !(beta > 0.0 && beta <= 1.0) {
        return domain("beta must lie in (0, 1]");
    }
    let g = g_lambda_u(rates, m, u)?;
    mittag_leffler(beta, 1.0, 1.0, -t.powf(beta) * g, cfg)
}
