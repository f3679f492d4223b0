//! Random clocks: stable, inverse stable, tempered stable, gamma, inverse Gaussian and
//! the stable-of-inverse-stable composition. Transforms, Lévy densities and exact
//! single-time samplers.

use crate::error::{domain, Result};
use crate::specfun::{gamma, ln_gamma_signed, ln_factorial, mittag_leffler, SeriesConfig};
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, InverseGaussian};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Clock selection and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubordinatorSpec {
    /// `E e^{−sD(t)} = e^{−t s^α}`.
    Stable { alpha: f64 },
    /// First passage `inf{s : D_β(s) > t}` of a β-stable clock.
    InverseStable { beta: f64 },
    /// Laplace exponent `(s+θ)^α − θ^α`.
    TemperedStable { alpha: f64, theta: f64 },
    /// Laplace exponent `b log(1 + s/a)`.
    Gamma { a: f64, b: f64 },
    /// Laplace exponent `δ(√(2s+γ²) − γ)`.
    InverseGaussian { delta: f64, gamma: f64 },
    /// `D_α(Y_β(t))` with independent clocks.
    StableTimeInverseStable { alpha: f64, beta: f64 },
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("{name} must lie in (0, 1), got {x}"));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("{name} must be positive, got {x}"));
    }
    Ok(())
}

impl SubordinatorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Stable { alpha } => open_unit("alpha", alpha),
            Self::InverseStable { beta } => open_unit("beta", beta),
            Self::TemperedStable { alpha, theta } => {
                open_unit("alpha", alpha)?;
                positive("theta", theta)
            }
            Self::Gamma { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            Self::InverseGaussian { delta, gamma } => {
                positive("delta", delta)?;
                positive("gamma", gamma)
            }
            Self::StableTimeInverseStable { alpha, beta } => {
                open_unit("alpha", alpha)?;
                open_unit("beta", beta)
            }
        }
    }

    /// True for the four Lévy clocks that have a Laplace exponent and Lévy measure.
    pub fn is_levy(&self) -> bool {
        !matches!(self, Self::InverseStable { .. } | Self::StableTimeInverseStable { .. })
    }
}

/// Seed and stream index of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// ChaCha8 generator keyed by `seed` on stream `stream`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

/// Laplace exponent `f(s)` with `E e^{−sD(t)} = e^{−t f(s)}`.
pub fn laplace_exponent(spec: &SubordinatorSpec, s: f64) -> Result<f64> {
    spec.validate()?;
    if !(s >= 0.0) {
        return domain("laplace_exponent needs s ≥ 0");
    }
    Ok(match *spec {
        SubordinatorSpec::Stable { alpha } => s.powf(alpha),
        SubordinatorSpec::TemperedStable { alpha, theta } => (s + theta).powf(alpha) - theta.powf(alpha),
        SubordinatorSpec::Gamma { a, b } => b * (s / a).ln_1p(),
        SubordinatorSpec::InverseGaussian { delta, gamma } => {
            // √(2s+γ²) − γ = 2s/(√(2s+γ²) + γ)
            delta * 2.0 * s / ((2.0 * s + gamma * gamma).sqrt() + gamma)
        }
        _ => return domain("inverse-stable clocks have no Laplace exponent"),
    })
}

/// `E e^{−sD(t)}` for every clock; the inverse-stable ones go through Mittag-Leffler.
pub fn laplace_transform(spec: &SubordinatorSpec, s: f64, t: f64, cfg: &SeriesConfig) -> Result<f64> {
    spec.validate()?;
    if !(s >= 0.0 && t >= 0.0) {
        return domain("laplace_transform needs s ≥ 0 and t ≥ 0");
    }
    match *spec {
        SubordinatorSpec::InverseStable { beta } => {
            Ok(mittag_leffler(beta, 1.0, 1.0, -s * t.powf(beta), cfg)?.value)
        }
        SubordinatorSpec::StableTimeInverseStable { alpha, beta } => {
            Ok(mittag_leffler(beta, 1.0, 1.0, -s.powf(alpha) * t.powf(beta), cfg)?.value)
        }
        _ => Ok((-t * laplace_exponent(spec, s)?).exp()),
    }
}

/// Density of the Lévy measure `μ(ds)/ds`.
pub fn levy_density(spec: &SubordinatorSpec, s: f64) -> Result<f64> {
    spec.validate()?;
    if !(s > 0.0) {
        return domain("levy_density needs s > 0");
    }
    Ok(match *spec {
        SubordinatorSpec::Stable { alpha } => alpha * s.powf(-alpha - 1.0) / gamma(1.0 - alpha),
        SubordinatorSpec::TemperedStable { alpha, theta } => {
            alpha * s.powf(-alpha - 1.0) * (-theta * s).exp() / gamma(1.0 - alpha)
        }
        SubordinatorSpec::Gamma { a, b } => b * (-a * s).exp() / s,
        SubordinatorSpec::InverseGaussian { delta, gamma } => {
            delta * (-gamma * gamma * s / 2.0).exp() / (2.0 * PI * s * s * s).sqrt()
        }
        _ => return domain("inverse-stable clocks have no Lévy measure"),
    })
}

/// Density `a^{bt} x^{bt−1} e^{−ax}/Γ(bt)` of the gamma clock at time `t`.
pub fn gamma_density(a: f64, b: f64, x: f64, t: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let shape = b * t;
    (shape * a.ln() + (shape - 1.0) * x.ln() - a * x - ln_gamma_signed(shape).0).exp()
}

/// Density `δt/√(2πx³) · exp(δγt − (δ²t²/x + γ²x)/2)` of the inverse-Gaussian clock.
pub fn ig_density(delta: f64, gamma: f64, x: f64, t: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let dt = delta * t;
    let expo = dt * gamma - 0.5 * (dt * dt / x + gamma * gamma * x);
    dt / (2.0 * PI * x * x * x).sqrt() * expo.exp()
}

/// `E Y_β(t)^n = n! t^{nβ} / Γ(nβ + 1)`.
pub fn inverse_stable_moment(beta: f64, n: u32, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nb = n as f64 * beta;
    (ln_factorial(n as u64) + nb * t.ln() - ln_gamma_signed(nb + 1.0).0).exp()
}

/// Unit-time positive α-stable draw (Kanter's representation).
pub fn sample_stable_unit<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).sin() / e).powf((1.0 - alpha) / alpha);
    a * b
}

/// Number of slices used by the tempered-stable sampler; keeps per-slice acceptance ≥ 0.1.
pub fn tempered_slices(alpha: f64, theta: f64, t: f64) -> usize {
    ((t * theta.powf(alpha)) / std::f64::consts::LN_10).ceil().max(1.0) as usize
}

fn sample_tempered<R: Rng + ?Sized>(alpha: f64, theta: f64, t: f64, rng: &mut R) -> f64 {
    let n = tempered_slices(alpha, theta, t);
    let scale = (t / n as f64).powf(1.0 / alpha);
    let mut total = 0.0;
    for _ in 0..n {
        loop {
            let x = scale * sample_stable_unit(alpha, rng);
            let u: f64 = rng.random();
            if u <= (-theta * x).exp() {
                total += x;
                break;
            }
        }
    }
    total
}

/// One exact draw of `D(t)`.
pub fn sample<R: Rng + ?Sized>(spec: &SubordinatorSpec, t: f64, rng: &mut R) -> Result<f64> {
    spec.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return domain("sample needs finite t ≥ 0");
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(match *spec {
        SubordinatorSpec::Stable { alpha } => t.powf(1.0 / alpha) * sample_stable_unit(alpha, rng),
        SubordinatorSpec::InverseStable { beta } => (t / sample_stable_unit(beta, rng)).powf(beta),
        SubordinatorSpec::TemperedStable { alpha, theta } => sample_tempered(alpha, theta, t, rng),
        SubordinatorSpec::Gamma { a, b } => Gamma::new(b * t, 1.0 / a)
            .map_err(|e| crate::Error::Domain(e.to_string()))?
            .sample(rng),
        SubordinatorSpec::InverseGaussian { delta, gamma } => {
            InverseGaussian::new(delta * t / gamma, (delta * t) * (delta * t))
                .map_err(|e| crate::Error::Domain(e.to_string()))?
                .sample(rng)
        }
        SubordinatorSpec::StableTimeInverseStable { alpha, beta } => {
            let y = (t / sample_stable_unit(beta, rng)).powf(beta);
            y.powf(1.0 / alpha) * sample_stable_unit(alpha, rng)
        }
    })
}
