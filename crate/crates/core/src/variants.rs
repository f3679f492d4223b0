//! Closed forms for the MGCP under each random time change: pmf, pgf, transition rates,
//! Lévy measures, covariance and codifference.
//!
//! Every pmf series is grouped by the total number of underlying MGCP jumps
//! `X = Σ_ij x_ij`. Writing `W_X(n̄; ρ) = Σ Π_ij ρ_ij^{x_ij}/x_ij!` over joint compositions of
//! `n̄` with `X` parts, each pmf is `Σ_X f(X)·W_X` and the series in `r` (when present) is
//! summed innermost for fixed `X`.

use crate::compositions::enumerate_compositions;
use crate::error::{domain, Result};
use crate::gcp::{mgcp_pmf, moment_sum, RateMatrix, StateVector};
use crate::specfun::series::combine_outer;
use crate::specfun::{
    gamma, ln_factorial, ln_gamma_signed, mittag_leffler, mittag_leffler_complex, wright_1_1, Evaluated,
    NeumaierSum, Quality, SeriesConfig, SeriesMonitor,
};
use crate::subordinators::SubordinatorSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A process family: the MGCP and its time-changed variants.
///
/// `alpha = 1` and `beta = 1` are accepted and reduce to the non-fractional process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum VariantSpec {
    Mgcp,
    /// Stable clock `D_α(t)`.
    Mgsfcp { alpha: f64 },
    /// Inverse-stable clock `Y_β(t)`.
    Mgfcp { beta: f64 },
    /// `D_α(Y_β(t))`.
    Mgstfcp { alpha: f64, beta: f64 },
    /// Tempered stable clock.
    Tempered { alpha: f64, theta: f64 },
    /// Gamma clock `G_{a,b}(t)`.
    Gamma { a: f64, b: f64 },
    /// Inverse-Gaussian clock `I_{δ,γ}(t)`.
    Ig { delta: f64, gamma: f64 },
}

/// Complex value of a codifference.
pub type ComplexValue = Complex64;

fn unit_closed(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return domain(format!("{name} must lie in (0, 1], got {x}"));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("{name} must be positive, got {x}"));
    }
    Ok(())
}

impl VariantSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Mgcp => Ok(()),
            Self::Mgsfcp { alpha } => unit_closed("alpha", alpha),
            Self::Mgfcp { beta } => unit_closed("beta", beta),
            Self::Mgstfcp { alpha, beta } => {
                unit_closed("alpha", alpha)?;
                unit_closed("beta", beta)
            }
            Self::Tempered { alpha, theta } => {
                unit_closed("alpha", alpha)?;
                positive("theta", theta)
            }
            Self::Gamma { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            Self::Ig { delta, gamma } => {
                positive("delta", delta)?;
                positive("gamma", gamma)
            }
        }
    }

    /// Same process with boundary parameters (`α = 1`, `β = 1`) folded away.
    pub fn reduced(&self) -> VariantSpec {
        match *self {
            Self::Mgsfcp { alpha } if alpha == 1.0 => Self::Mgcp,
            Self::Mgfcp { beta } if beta == 1.0 => Self::Mgcp,
            Self::Mgstfcp { alpha, beta } if alpha == 1.0 => Self::Mgfcp { beta }.reduced(),
            Self::Mgstfcp { alpha, beta } if beta == 1.0 => Self::Mgsfcp { alpha },
            Self::Tempered { alpha, .. } if alpha == 1.0 => Self::Mgcp,
            other => other,
        }
    }

    /// The random clock, or `None` for the deterministic clock `t`.
    pub fn clock(&self) -> Option<SubordinatorSpec> {
        match self.reduced() {
            Self::Mgcp => None,
            Self::Mgsfcp { alpha } => Some(SubordinatorSpec::Stable { alpha }),
            Self::Mgfcp { beta } => Some(SubordinatorSpec::InverseStable { beta }),
            Self::Mgstfcp { alpha, beta } => Some(SubordinatorSpec::StableTimeInverseStable { alpha, beta }),
            Self::Tempered { alpha, theta } => Some(SubordinatorSpec::TemperedStable { alpha, theta }),
            Self::Gamma { a, b } => Some(SubordinatorSpec::Gamma { a, b }),
            Self::Ig { delta, gamma } => Some(SubordinatorSpec::InverseGaussian { delta, gamma }),
        }
    }

    /// True when the process is Lévy (constant transition rates exist).
    pub fn is_levy(&self) -> bool {
        !matches!(self.reduced(), Self::Mgfcp { .. } | Self::Mgstfcp { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mgcp => "mgcp",
            Self::Mgsfcp { .. } => "mgsfcp",
            Self::Mgfcp { .. } => "mgfcp",
            Self::Mgstfcp { .. } => "mgstfcp",
            Self::Tempered { .. } => "tempered",
            Self::Gamma { .. } => "gamma",
            Self::Ig { .. } => "ig",
        }
    }
}

/// `W_X(n̄; ρ)` for `X = 0..=Σn_i`, with `ρ_ij = λ_ij / denom`.
pub fn grouped_weights(rates: &RateMatrix, n: &[usize], denom: f64) -> Vec<f64> {
    let mut acc = vec![1.0];
    for (i, &ni) in n.iter().enumerate() {
        let poly = component_weights(rates.row(i), ni, denom);
        acc = convolve(&acc, &poly);
    }
    acc
}

fn component_weights(row: &[f64], n: usize, denom: f64) -> Vec<f64> {
    let ln_ratio: Vec<f64> = row.iter().map(|&l| (l / denom).ln()).collect();
    let mut poly = vec![0.0; n + 1];
    'outer: for c in enumerate_compositions(row.len(), n) {
        let mut ln_term = 0.0;
        for (j, &x) in c.counts.iter().enumerate() {
            if x == 0 {
                continue;
            }
            if row[j] == 0.0 {
                continue 'outer;
            }
            ln_term += x as f64 * ln_ratio[j] - ln_factorial(x as u64);
        }
        poly[c.parts()] += ln_term.exp();
    }
    poly
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `ln |(x)_k|` and the sign of the falling factorial; `(−∞, 0)` when it vanishes.
fn ln_falling(x: f64, k: usize) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for m in 0..k {
        let f = x - m as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln += f.abs().ln();
    }
    (ln, sign)
}

/// How the inner `r`-series of the stable-type variants is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Falling-factorial series `Σ_r (−c)^r (αr)_X / r!`.
    Series,
    /// The same sum as the Wright function `₁Ψ₁[(1,α);(1−X,α);−c]`.
    Wright,
}

#[derive(Debug, Clone, Copy)]
enum Inner {
    /// `Σ_r (−c)^r (αr)_X / d(r)` with `d(r) = r!` or `Γ(βr+1)`, weighted by `(−1)^X`.
    Fractional { alpha: f64, c: f64, beta: Option<f64> },
    /// `X!·z^X·E^{X+1}_{β,βX+1}(−z)`.
    TimeFractional { beta: f64, z: f64 },
    /// `Γ(X+s)/Γ(s)`.
    Rising { shape: f64 },
}

#[derive(Debug, Clone, Copy)]
enum Form {
    Degenerate,
    Plain { t: f64 },
    Series { ln_prefactor: f64, denom: f64, inner: Inner },
}

/// Evaluates many cells of one variant pmf at a fixed `t`, reusing the inner series
/// (which depend only on `X`) and the per-component weights.
pub struct PmfEvaluator<'a> {
    rates: &'a RateMatrix,
    cfg: SeriesConfig,
    route: Route,
    form: Form,
    inner_cache: Vec<Option<Evaluated<f64>>>,
    weight_cache: HashMap<(usize, usize), Vec<f64>>,
}

impl<'a> PmfEvaluator<'a> {
    pub fn new(v: &VariantSpec, rates: &'a RateMatrix, t: f64, cfg: &SeriesConfig) -> Result<Self> {
        Self::with_route(v, rates, t, cfg, Route::Series)
    }

    pub fn with_route(
        v: &VariantSpec,
        rates: &'a RateMatrix,
        t: f64,
        cfg: &SeriesConfig,
        route: Route,
    ) -> Result<Self> {
        v.validate()?;
        cfg.validate()?;
        if !(t >= 0.0 && t.is_finite()) {
            return domain("t must be finite and ≥ 0");
        }
        let reduced = v.reduced();
        if route == Route::Wright
            && !matches!(reduced, VariantSpec::Mgsfcp { .. } | VariantSpec::Tempered { .. } | VariantSpec::Ig { .. })
        {
            return domain(format!("the Wright representation is not available for {}", v.name()));
        }
        let lam = rates.total();
        let form = if t == 0.0 {
            Form::Degenerate
        } else {
            match reduced {
                VariantSpec::Mgcp => Form::Plain { t },
                VariantSpec::Mgsfcp { alpha } => Form::Series {
                    ln_prefactor: 0.0,
                    denom: lam,
                    inner: Inner::Fractional { alpha, c: lam.powf(alpha) * t, beta: None },
                },
                VariantSpec::Mgstfcp { alpha, beta } => Form::Series {
                    ln_prefactor: 0.0,
                    denom: lam,
                    inner: Inner::Fractional { alpha, c: lam.powf(alpha) * t.powf(beta), beta: Some(beta) },
                },
                VariantSpec::Tempered { alpha, theta } => Form::Series {
                    ln_prefactor: t * theta.powf(alpha),
                    denom: lam + theta,
                    inner: Inner::Fractional { alpha, c: t * (lam + theta).powf(alpha), beta: None },
                },
                VariantSpec::Ig { delta, gamma } => Form::Series {
                    ln_prefactor: delta * gamma * t,
                    denom: lam + 0.5 * gamma * gamma,
                    inner: Inner::Fractional {
                        alpha: 0.5,
                        c: delta * t * (2.0 * lam + gamma * gamma).sqrt(),
                        beta: None,
                    },
                },
                VariantSpec::Mgfcp { beta } => Form::Series {
                    ln_prefactor: 0.0,
                    denom: lam,
                    inner: Inner::TimeFractional { beta, z: lam * t.powf(beta) },
                },
                VariantSpec::Gamma { a, b } => Form::Series {
                    ln_prefactor: b * t * (a / (lam + a)).ln(),
                    denom: lam + a,
                    inner: Inner::Rising { shape: b * t },
                },
            }
        };
        Ok(Self { rates, cfg: *cfg, route, form, inner_cache: Vec::new(), weight_cache: HashMap::new() })
    }

    fn weights(&mut self, n: &[usize], denom: f64) -> Vec<f64> {
        let mut acc = vec![1.0];
        for (i, &ni) in n.iter().enumerate() {
            let row = self.rates.row(i);
            let poly = self.weight_cache.entry((i, ni)).or_insert_with(|| component_weights(row, ni, denom));
            acc = convolve(&acc, poly);
        }
        acc
    }

    fn inner(&mut self, x: usize) -> Result<Evaluated<f64>> {
        if self.inner_cache.len() <= x {
            self.inner_cache.resize(x + 1, None);
        }
        if let Some(v) = self.inner_cache[x] {
            return Ok(v);
        }
        let Form::Series { inner, .. } = self.form else {
            unreachable!("inner series only exist for series forms")
        };
        let v = match inner {
            Inner::Fractional { alpha, c, beta } => match self.route {
                Route::Series => fractional_series(alpha, c, beta, x, &self.cfg),
                Route::Wright => wright_1_1(1.0, alpha, 1.0 - x as f64, alpha, -c, &self.cfg),
            }?,
            Inner::TimeFractional { beta, z } => {
                let ml = mittag_leffler(beta, beta * x as f64 + 1.0, x as f64 + 1.0, -z, &self.cfg)?;
                let scale = (ln_factorial(x as u64) + x as f64 * z.ln()).exp();
                Evaluated { value: scale * ml.value, max_term: scale * ml.max_term, ..ml }
            }
            Inner::Rising { shape } => {
                let ln = ln_gamma_signed(x as f64 + shape).0 - ln_gamma_signed(shape).0;
                Evaluated::exact(ln.exp())
            }
        };
        self.inner_cache[x] = Some(v);
        Ok(v)
    }

    /// The pmf at `n̄`.
    pub fn pmf(&mut self, n: &[usize]) -> Result<Evaluated<f64>> {
        self.rates.check_state(n)?;
        match self.form {
            Form::Degenerate => Ok(Evaluated::exact(if n.iter().all(|&x| x == 0) { 1.0 } else { 0.0 })),
            Form::Plain { t } => Ok(Evaluated::exact(mgcp_pmf(self.rates, n, t)?)),
            Form::Series { ln_prefactor, denom, inner } => {
                let w = self.weights(n, denom);
                let alternating = matches!(inner, Inner::Fractional { .. });
                let pref = ln_prefactor.exp();
                let mut sum = NeumaierSum::default();
                let mut max_contribution: f64 = 0.0;
                let mut truncated = false;
                let mut terms = 0;
                for (x, &wx) in w.iter().enumerate() {
                    if wx == 0.0 {
                        continue;
                    }
                    let s = self.inner(x)?;
                    truncated |= s.quality.truncated;
                    terms += s.terms;
                    let sign = if alternating && x % 2 == 1 { -1.0 } else { 1.0 };
                    if let Inner::Rising { .. } = inner {
                        // all terms positive; stay in the log domain
                        sum.add((ln_prefactor + wx.ln() + s.value.ln()).exp());
                        continue;
                    }
                    sum.add(sign * pref * wx * s.value);
                    max_contribution = max_contribution.max(pref * wx * s.max_term.max(s.value.abs()));
                }
                let value = sum.value();
                Ok(combine_outer(value, max_contribution, terms, truncated, &self.cfg))
            }
        }
    }
}

fn fractional_series(alpha: f64, c: f64, beta: Option<f64>, x: usize, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    let ln_c = c.ln();
    let mut mon = SeriesMonitor::new(*cfg);
    let mut sum = NeumaierSum::default();
    for r in 0..cfg.max_terms {
        let (lf, sf) = ln_falling(alpha * r as f64, x);
        let term_abs = if sf == 0.0 {
            0.0
        } else {
            let ln_den = match beta {
                None => ln_factorial(r as u64),
                Some(b) => ln_gamma_signed(b * r as f64 + 1.0).0,
            };
            (r as f64 * ln_c - ln_den + lf).exp()
        };
        let sign = if r % 2 == 1 { -sf } else { sf };
        sum.add(sign * term_abs);
        if mon.push(term_abs, sum.value().abs()) {
            break;
        }
    }
    let v = sum.value();
    Ok(mon.finish(v, v.abs()))
}

/// Pmf `p(n̄, t)` of the variant. At `t = 0` this is the indicator of `n̄ = 0̄`.
pub fn variant_pmf(v: &VariantSpec, rates: &RateMatrix, n: &[usize], t: f64, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    PmfEvaluator::new(v, rates, t, cfg)?.pmf(n)
}

/// Pmf through the Wright-function representation; stable, tempered and inverse-Gaussian
/// clocks only.
pub fn variant_pmf_wright(
    v: &VariantSpec,
    rates: &RateMatrix,
    n: &[usize],
    t: f64,
    cfg: &SeriesConfig,
) -> Result<Evaluated<f64>> {
    PmfEvaluator::with_route(v, rates, t, cfg, Route::Wright)?.pmf(n)
}

/// Pmf over the box `0 ≤ n_i ≤ box_i`, cells in row-major order (last component fastest).
pub fn variant_pmf_box(
    v: &VariantSpec,
    rates: &RateMatrix,
    upper: &[usize],
    t: f64,
    cfg: &SeriesConfig,
) -> Result<Vec<(StateVector, Evaluated<f64>)>> {
    rates.check_state(upper)?;
    let mut ev = PmfEvaluator::new(v, rates, t, cfg)?;
    let mut out = Vec::new();
    for n in box_cells(upper) {
        let p = ev.pmf(&n)?;
        out.push((n, p));
    }
    Ok(out)
}

/// All states `0 ≤ n_i ≤ upper_i`, last component fastest.
pub fn box_cells(upper: &[usize]) -> impl Iterator<Item = StateVector> + '_ {
    let mut cur: Option<StateVector> = Some(vec![0; upper.len()]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                cur = None;
                break;
            }
            pos -= 1;
            if next[pos] < upper[pos] {
                next[pos] += 1;
                cur = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    })
}

/// `s = Σ_i Σ_j λ_ij(1 − u_i^j)` mapped through the clock: the pgf `E Π u_i^{N_i(t)}`.
pub fn variant_pgf(v: &VariantSpec, rates: &RateMatrix, u: &[f64], t: f64, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    v.validate()?;
    if !(t >= 0.0) {
        return domain("t must be ≥ 0");
    }
    let s = rates.pgf_exponent(u)?;
    let exact = |x: f64| Ok(Evaluated::exact(x));
    match v.reduced() {
        VariantSpec::Mgcp => exact((-t * s).exp()),
        VariantSpec::Mgsfcp { alpha } => exact((-t * s.powf(alpha)).exp()),
        VariantSpec::Mgfcp { beta } => mittag_leffler(beta, 1.0, 1.0, -t.powf(beta) * s, cfg),
        VariantSpec::Mgstfcp { alpha, beta } => mittag_leffler(beta, 1.0, 1.0, -t.powf(beta) * s.powf(alpha), cfg),
        VariantSpec::Tempered { alpha, theta } => exact((-t * ((s + theta).powf(alpha) - theta.powf(alpha))).exp()),
        VariantSpec::Gamma { a, b } => exact((-b * t * (s / a).ln_1p()).exp()),
        VariantSpec::Ig { delta, gamma } => {
            exact((-delta * t * 2.0 * s / ((2.0 * s + gamma * gamma).sqrt() + gamma)).exp())
        }
    }
}

fn check_jump(rates: &RateMatrix, m: &[usize]) -> Result<()> {
    rates.check_state(m)?;
    if m.iter().all(|&x| x == 0) {
        return domain("jump state must be nonzero");
    }
    Ok(())
}

fn mgcp_jump_rate(rates: &RateMatrix, m: &[usize]) -> f64 {
    let nonzero: Vec<usize> = (0..m.len()).filter(|&i| m[i] > 0).collect();
    if nonzero.len() != 1 {
        return 0.0;
    }
    let i = nonzero[0];
    rates.row(i).get(m[i] - 1).copied().unwrap_or(0.0)
}

/// Infinitesimal rate of the jump `m̄ ≻ 0̄` read off the transition probabilities.
pub fn variant_transition_rate(v: &VariantSpec, rates: &RateMatrix, m: &[usize]) -> Result<f64> {
    v.validate()?;
    check_jump(rates, m)?;
    let lam = rates.total();
    // −scale · Σ_X (a)_X (−1)^X W_X
    let binomial_form = |scale: f64, a: f64, denom: f64| {
        let w = grouped_weights(rates, m, denom);
        let mut s = NeumaierSum::default();
        for (x, &wx) in w.iter().enumerate().skip(1) {
            if wx == 0.0 {
                continue;
            }
            let (lf, sf) = ln_falling(a, x);
            let sign = if x % 2 == 1 { -sf } else { sf };
            s.add(sign * lf.exp() * wx);
        }
        -scale * s.value()
    };
    Ok(match v.reduced() {
        VariantSpec::Mgcp => mgcp_jump_rate(rates, m),
        VariantSpec::Mgsfcp { alpha } => binomial_form(lam.powf(alpha), alpha, lam),
        VariantSpec::Tempered { alpha, theta } => binomial_form((lam + theta).powf(alpha), alpha, lam + theta),
        VariantSpec::Ig { delta, gamma } => {
            let g2 = gamma * gamma;
            binomial_form(delta * (2.0 * lam + g2).sqrt(), 0.5, lam + 0.5 * g2)
        }
        VariantSpec::Gamma { a, b } => {
            let w = grouped_weights(rates, m, lam + a);
            let terms = w.iter().enumerate().skip(1).filter(|(_, &wx)| wx > 0.0);
            b * terms.map(|(x, &wx)| (ln_factorial(x as u64 - 1) + wx.ln()).exp()).sum::<f64>()
        }
        VariantSpec::Mgfcp { .. } | VariantSpec::Mgstfcp { .. } => {
            return domain(format!("{} is not a Lévy process and has no constant transition rates", v.name()))
        }
    })
}

/// Total escape rate from any state.
pub fn holding_rate(v: &VariantSpec, rates: &RateMatrix) -> Result<f64> {
    v.validate()?;
    let lam = rates.total();
    Ok(match v.reduced() {
        VariantSpec::Mgcp => lam,
        VariantSpec::Mgsfcp { alpha } => lam.powf(alpha),
        VariantSpec::Tempered { alpha, theta } => (lam + theta).powf(alpha) - theta.powf(alpha),
        VariantSpec::Gamma { a, b } => b * (lam / a).ln_1p(),
        VariantSpec::Ig { delta, gamma } => delta * 2.0 * lam / ((2.0 * lam + gamma * gamma).sqrt() + gamma),
        VariantSpec::Mgfcp { .. } | VariantSpec::Mgstfcp { .. } => {
            return domain(format!("{} is not a Lévy process and has no holding rate", v.name()))
        }
    })
}

/// Mass of the Lévy measure at `n̄ ≻ 0̄`, from `Σ_X W_X ∫ e^{−λr} r^X μ(dr)`.
pub fn variant_levy_measure(v: &VariantSpec, rates: &RateMatrix, n: &[usize]) -> Result<f64> {
    v.validate()?;
    check_jump(rates, n)?;
    let lam = rates.total();
    // scale · Σ_X Γ(X − shift) W_X
    let gamma_form = |scale: f64, shift: f64, denom: f64| {
        let w = grouped_weights(rates, n, denom);
        let s: f64 = w
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &wx)| wx > 0.0)
            .map(|(x, &wx)| (ln_gamma_signed(x as f64 - shift).0 + wx.ln()).exp())
            .sum();
        scale * s
    };
    Ok(match v.reduced() {
        VariantSpec::Mgcp => mgcp_jump_rate(rates, n),
        VariantSpec::Mgsfcp { alpha } => gamma_form(alpha * lam.powf(alpha) / gamma(1.0 - alpha), alpha, lam),
        VariantSpec::Tempered { alpha, theta } => {
            gamma_form(alpha * (lam + theta).powf(alpha) / gamma(1.0 - alpha), alpha, lam + theta)
        }
        VariantSpec::Gamma { a, b } => gamma_form(b, 0.0, lam + a),
        VariantSpec::Ig { delta, gamma } => {
            let g2 = gamma * gamma;
            gamma_form(delta * (2.0 * lam + g2).sqrt() / (2.0 * std::f64::consts::PI.sqrt()), 0.5, lam + 0.5 * g2)
        }
        VariantSpec::Mgfcp { .. } | VariantSpec::Mgstfcp { .. } => {
            return domain(format!("{} is not a Lévy process and has no Lévy measure", v.name()))
        }
    })
}

/// Mean of component `i`; available for the MGCP and the inverse-stable clock.
pub fn variant_mean(v: &VariantSpec, rates: &RateMatrix, i: usize, t: f64) -> Result<f64> {
    v.validate()?;
    rates.check_component(i)?;
    let m = moment_sum(rates.row(i), 1);
    match v.reduced() {
        VariantSpec::Mgcp => Ok(m * t),
        VariantSpec::Mgfcp { beta } => Ok(m * t.powf(beta) / gamma(beta + 1.0)),
        _ => domain(format!("no closed-form mean for {}; use Monte-Carlo estimation", v.name())),
    }
}

/// `Cov(N_i(t), N_l(t))` for the MGCP, the inverse-stable and the tempered-stable clocks.
///
/// For the tempered clock this is `1{i=l} Σ_j j²λ_ij E D + m_i m_l Var D` with
/// `E D = αtθ^{α−1}` and `Var D = α(1−α)tθ^{α−2}`.
pub fn covariance(v: &VariantSpec, rates: &RateMatrix, i: usize, l: usize, t: f64) -> Result<f64> {
    v.validate()?;
    rates.check_component(i)?;
    rates.check_component(l)?;
    let same = if i == l { moment_sum(rates.row(i), 2) } else { 0.0 };
    let mi = moment_sum(rates.row(i), 1);
    let ml = moment_sum(rates.row(l), 1);
    match v.reduced() {
        VariantSpec::Mgcp => Ok(same * t),
        VariantSpec::Mgfcp { beta } => {
            let g1 = gamma(beta + 1.0);
            let tb = t.powf(beta);
            Ok(same * tb / g1 + mi * ml * tb * tb * (2.0 / gamma(2.0 * beta + 1.0) - 1.0 / (g1 * g1)))
        }
        VariantSpec::Tempered { alpha, theta } => {
            let mean_d = alpha * t * theta.powf(alpha - 1.0);
            let var_d = alpha * (1.0 - alpha) * t * theta.powf(alpha - 2.0);
            Ok(same * mean_d + mi * ml * var_d)
        }
        _ => domain(format!("no closed-form covariance for {}; use Monte-Carlo estimation", v.name())),
    }
}

/// Codifference `ln E e^{ι(N_i−N_l)} − ln E e^{ιN_i} − ln E e^{−ιN_l}` (principal logarithm).
pub fn codifference(
    v: &VariantSpec,
    rates: &RateMatrix,
    i: usize,
    l: usize,
    t: f64,
    cfg: &SeriesConfig,
) -> Result<Evaluated<ComplexValue>> {
    v.validate()?;
    rates.check_component(i)?;
    rates.check_component(l)?;
    let a = rates.char_exponent(i, 1.0);
    let b = rates.char_exponent(l, -1.0);
    // ln E exp(−s D(t)) for complex s
    let log_transform = |s: Complex64| -> Result<Evaluated<Complex64>> {
        match v.reduced() {
            VariantSpec::Mgcp => Ok(Evaluated::exact(-t * s)),
            VariantSpec::Mgsfcp { alpha } => Ok(Evaluated::exact(-t * s.powf(alpha))),
            VariantSpec::Tempered { alpha, theta } => {
                Ok(Evaluated::exact(-t * ((s + theta).powf(alpha) - theta.powf(alpha))))
            }
            VariantSpec::Mgfcp { beta } => {
                Ok(mittag_leffler_complex(beta, 1.0, 1.0, -t.powf(beta) * s, cfg)?.map(|z| z.ln()))
            }
            VariantSpec::Mgstfcp { alpha, beta } => {
                Ok(mittag_leffler_complex(beta, 1.0, 1.0, -t.powf(beta) * s.powf(alpha), cfg)?.map(|z| z.ln()))
            }
            _ => domain(format!("no closed-form codifference for {}; use Monte-Carlo estimation", v.name())),
        }
    };
    let la = log_transform(a)?;
    let lb = log_transform(b)?;
    let mut quality = la.quality.merge(lb.quality);
    let mut value = -la.value - lb.value;
    if i != l {
        let lab = log_transform(a + b)?;
        quality = quality.merge(lab.quality);
        value += lab.value;
    }
    Ok(Evaluated { value, max_term: 0.0, terms: 1, quality })
}

/// Codifference along a time grid, flagging steps where the imaginary part jumps by
/// more than `π` (a branch change of the principal logarithm).
pub fn codifference_curve(
    v: &VariantSpec,
    rates: &RateMatrix,
    i: usize,
    l: usize,
    t_grid: &[f64],
    cfg: &SeriesConfig,
) -> Result<Vec<(f64, ComplexValue, bool)>> {
    let mut out: Vec<(f64, ComplexValue, bool)> = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let z = codifference(v, rates, i, l, t, cfg)?.value;
        let jump = out.last().is_some_and(|(_, prev, _)| (z.im - prev.im).abs() > std::f64::consts::PI);
        out.push((t, z, jump));
    }
    Ok(out)
}

/// Combined health of a set of evaluations.
pub fn merged_quality<'b>(items: impl IntoIterator<Item = &'b Evaluated<f64>>) -> Quality {
    items.into_iter().fold(Quality::default(), |q, e| q.merge(e.quality))
}
