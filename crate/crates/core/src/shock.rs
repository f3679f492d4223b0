//! Shock model driven by the space-fractional MGCP: `q` shock types, total count
//! `Q(t) = Σ_i M_i^α(t)`, failure when `Q(t)` reaches a random threshold `N`.
//!
//! `Q` is compound Poisson with rate `λ^α`. Each batch holds a Sibuya(α) number of
//! underlying MGCP events, `P(X > J) = Γ(J+1−α)/(Γ(1−α) J!)`, each of type `(i, j)` with
//! probability `λ_ij/λ`. Events inside a batch are taken in sequence, and the failure type
//! `σ` is the type of the event that carries `Q` across `N`.
//!
//! Besides this model the module keeps the single-event forms, which count only batches
//! made of one event (probability `α`); they coincide with the model at `α = 1`.

use crate::error::{domain, Result};
use crate::gcp::RateMatrix;
use crate::quadrature::{gauss_kronrod, Tolerance};
use crate::specfun::{
    falling_factorial, generalized_incomplete_gamma, generalized_sine_integral, incomplete_beta, ln_factorial,
    wright_1_1, Evaluated, NeumaierSum, Quality, SeriesConfig,
};
use crate::variants::{grouped_weights, variant_pmf, variant_transition_rate, VariantSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Tails below this are treated as zero.
const TAIL_FLOOR: f64 = 1e-17;
const MAX_THRESHOLD: usize = 200_000;

/// Law of the threshold `N ∈ {1, 2, …}`, given by its tail `q_n = P(N > n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdDist {
    /// `q_n = (1−p)^n`.
    Geometric { p: f64 },
    /// `q_n = −B(p; n+1, 0)/ln(1−p)`.
    Logarithmic { p: f64 },
    /// `q_n = γ(n+1; a, p)/(e^{−a} − e^{−p})`.
    IncGamma { a: f64, p: f64 },
    /// `q_n = Si(n+1; a, p)/(cos a − cos p)`.
    SineIntegral { a: f64, p: f64 },
    /// Explicit tails `q_0 = 1, q_1, …`; zero past the end.
    Custom { q: Vec<f64> },
}

impl ThresholdDist {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Geometric { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return domain(format!("geometric p must lie in (0, 1], got {p}"));
                }
            }
            Self::Logarithmic { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return domain(format!("logarithmic p must lie in (0, 1), got {p}"));
                }
            }
            Self::IncGamma { a, p } | Self::SineIntegral { a, p } => {
                if !(0.0 <= *a && a < p && *p <= 1.0) {
                    return domain(format!("need 0 ≤ a < p ≤ 1, got a = {a}, p = {p}"));
                }
            }
            Self::Custom { q } => {
                if q.first() != Some(&1.0) {
                    return domain("custom tails must start with q_0 = 1");
                }
                if q.windows(2).any(|w| !(w[1] <= w[0] && w[1] >= 0.0)) {
                    return domain("custom tails must be non-increasing and non-negative");
                }
            }
        }
        Ok(())
    }

    /// Family name as used on the command line.
    pub fn family(&self) -> &'static str {
        match self {
            Self::Geometric { .. } => "geometric",
            Self::Logarithmic { .. } => "logarithmic",
            Self::IncGamma { .. } => "incgamma",
            Self::SineIntegral { .. } => "sine",
            Self::Custom { .. } => "custom",
        }
    }
}

impl fmt::Display for ThresholdDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Geometric { p } | Self::Logarithmic { p } => write!(f, "{}:{p}", self.family()),
            Self::IncGamma { a, p } | Self::SineIntegral { a, p } => write!(f, "{}:{a}:{p}", self.family()),
            Self::Custom { q } => {
                let v: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                write!(f, "custom:{}", v.join(","))
            }
        }
    }
}

impl FromStr for ThresholdDist {
    type Err = crate::Error;

    /// `geometric:P`, `logarithmic:P`, `incgamma:A:P`, `sine:A:P` or `custom:Q0,Q1,…`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').ok_or_else(|| crate::Error::Domain(format!("threshold '{s}': expected family:params")))?;
        let num = |x: &str| -> Result<f64> {
            x.trim().parse::<f64>().map_err(|_| crate::Error::Domain(format!("threshold '{s}': bad number '{x}'")))
        };
        let pair = || -> Result<(f64, f64)> {
            let (a, p) = rest.split_once(':').ok_or_else(|| crate::Error::Domain(format!("threshold '{s}': expected A:P")))?;
            Ok((num(a)?, num(p)?))
        };
        let d = match family {
            "geometric" => Self::Geometric { p: num(rest)? },
            "logarithmic" => Self::Logarithmic { p: num(rest)? },
            "incgamma" => {
                let (a, p) = pair()?;
                Self::IncGamma { a, p }
            }
            "sine" => {
                let (a, p) = pair()?;
                Self::SineIntegral { a, p }
            }
            "custom" => Self::Custom { q: rest.split(',').map(num).collect::<Result<_>>()? },
            other => return domain(format!("unknown threshold family '{other}'")),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Tail `q_n = P(N > n)`.
pub fn threshold_tail(d: &ThresholdDist, n: usize) -> Result<f64> {
    d.validate()?;
    if n == 0 {
        return Ok(1.0);
    }
    let x = n as f64 + 1.0;
    Ok(match d {
        ThresholdDist::Geometric { p } => (1.0 - p).powi(n as i32),
        ThresholdDist::Logarithmic { p } => -incomplete_beta(*p, x, 0.0)? / (-p).ln_1p(),
        ThresholdDist::IncGamma { a, p } => generalized_incomplete_gamma(x, *a, *p)? / ((-a).exp() - (-p).exp()),
        ThresholdDist::SineIntegral { a, p } => generalized_sine_integral(x, *a, *p)? / (a.cos() - p.cos()),
        ThresholdDist::Custom { q } => q.get(n).copied().unwrap_or(0.0),
    })
}

/// Tails `q_0..=q_N`, stopping at the first `q_N` below `1e−17`.
pub fn threshold_tails(d: &ThresholdDist) -> Result<Vec<f64>> {
    d.validate()?;
    let mut out = vec![1.0];
    loop {
        let n = out.len();
        let q = threshold_tail(d, n)?;
        out.push(q);
        if q < TAIL_FLOOR {
            break;
        }
        if n >= MAX_THRESHOLD {
            return Err(crate::Error::Numerical(format!("threshold tail still {q} at n = {n}")));
        }
    }
    Ok(out)
}

/// System description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockModel {
    pub rates: RateMatrix,
    pub alpha: f64,
    pub threshold: ThresholdDist,
}

impl ShockModel {
    pub fn new(rates: RateMatrix, alpha: f64, threshold: ThresholdDist) -> Result<Self> {
        let m = Self { rates, alpha, threshold };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return domain(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        self.threshold.validate()
    }
}

/// `P(X > J)` for `J = 0..=n` of the Sibuya(α) law.
pub fn sibuya_tails(alpha: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    for j in 1..=n {
        let prev = out[j - 1];
        out.push(prev * (j as f64 - alpha) / j as f64);
    }
    out
}

/// Precomputed tables of the pooled count `Q` for a fixed model.
#[derive(Debug, Clone)]
pub struct PooledCount {
    alpha: f64,
    /// `λ^α`
    rate: f64,
    /// `g(s)`, `s = 0..=N` (with `g(0) = 0`): law of the increment of `Q` per batch.
    batch: Vec<f64>,
    /// `b(s)`: expected number of in-batch positions reached with partial sum `s`.
    reach: Vec<f64>,
    /// `u_m`: probability that the pooled event walk visits `m`.
    renewal: Vec<f64>,
}

impl PooledCount {
    /// Tables up to level `n_max` for the pooled step law `π_j = Λ_j/λ`.
    pub fn new(rates: &RateMatrix, alpha: f64, n_max: usize) -> Self {
        let lam = rates.total();
        let step: Vec<f64> = rates.pooled_row().iter().map(|l| l / lam).collect();
        let tails = sibuya_tails(alpha, n_max + 1);
        let mut batch = vec![0.0; n_max + 1];
        let mut reach = vec![0.0; n_max + 1];
        let mut renewal = vec![0.0; n_max + 1];
        // a_J, the J-fold convolution of the step law
        let mut a = vec![0.0; n_max + 1];
        a[0] = 1.0;
        for j in 0..=n_max {
            for s in 0..=n_max {
                reach[s] += tails[j] * a[s];
                renewal[s] += a[s];
                if j >= 1 {
                    batch[s] += (tails[j - 1] - tails[j]) * a[s];
                }
            }
            let mut next = vec![0.0; n_max + 1];
            for s in 0..=n_max {
                if a[s] == 0.0 {
                    continue;
                }
                for (k, &pk) in step.iter().enumerate() {
                    let to = s + k + 1;
                    if to > n_max {
                        break;
                    }
                    next[to] += a[s] * pk;
                }
            }
            a = next;
            if a.iter().all(|&x| x == 0.0) {
                break;
            }
        }
        Self { alpha, rate: lam.powf(alpha), batch, reach, renewal }
    }

    pub fn n_max(&self) -> usize {
        self.batch.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `g(s)`, the batch-increment law; `λ^α g(s)` is the Lévy mass of `Q` at `s`.
    pub fn batch_law(&self) -> &[f64] {
        &self.batch
    }

    /// `u_m`.
    pub fn renewal(&self) -> &[f64] {
        &self.renewal
    }

    /// `P(Q(t) = m)` for `m = 0..=N`, by `m P(m) = λ^α t Σ_s s g(s) P(m−s)`.
    pub fn pmf(&self, t: f64) -> Vec<f64> {
        let n = self.n_max();
        let mut p = vec![0.0; n + 1];
        p[0] = (-self.rate * t).exp();
        let c = self.rate * t;
        for m in 1..=n {
            let mut s = NeumaierSum::default();
            for k in 1..=m {
                if self.batch[k] != 0.0 {
                    s.add(k as f64 * self.batch[k] * p[m - k]);
                }
            }
            p[m] = c * s.value() / m as f64;
        }
        p
    }

    /// `v_m`, the probability that the batch walk of `Q` visits `m`.
    pub fn batch_visits(&self) -> Vec<f64> {
        let n = self.n_max();
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        for m in 1..=n {
            v[m] = (1..=m).map(|s| self.batch[s] * v[m - s]).sum();
        }
        v
    }

    /// `κ_i(d)`: rate, from a state `d` below the threshold, of a batch whose crossing
    /// event has type `i`.
    pub fn crossing_rate(&self, rates: &RateMatrix, i: usize, d: usize) -> f64 {
        let lam = rates.total();
        let row = rates.row(i);
        let k = row.len();
        let lo = d.saturating_sub(k);
        let mut s_sum = 0.0;
        for s in lo..d {
            let need = d - s;
            let w: f64 = row[need - 1..].iter().sum::<f64>() / lam;
            s_sum += self.reach[s] * w;
        }
        self.rate * s_sum
    }
}

/// Threshold-dependent tables shared by the shock functions.
struct Prepared<'a> {
    model: &'a ShockModel,
    tails: Vec<f64>,
    pooled: PooledCount,
}

impl<'a> Prepared<'a> {
    fn new(model: &'a ShockModel) -> Result<Self> {
        model.validate()?;
        let tails = threshold_tails(&model.threshold)?;
        let n = tails.len() - 1;
        Ok(Self { model, pooled: PooledCount::new(&model.rates, model.alpha, n), tails })
    }

    fn n_max(&self) -> usize {
        self.tails.len() - 1
    }

    /// `p_n = q_{n−1} − q_n`
    fn threshold_pmf(&self, n: usize) -> f64 {
        self.tails[n - 1] - self.tails[n]
    }

    /// `Σ_{l=d}^{k_i} λ_il`
    fn upper_rate(&self, i: usize, d: usize) -> f64 {
        let row = self.model.rates.row(i);
        if d > row.len() {
            0.0
        } else {
            row[d - 1..].iter().sum()
        }
    }
}

/// Survival function `L_T(t) = Σ_n q_n P(Q(t) = n)`.
pub fn reliability(m: &ShockModel, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain("t must be ≥ 0");
    }
    let prep = Prepared::new(m)?;
    let p = prep.pooled.pmf(t);
    let mut s = NeumaierSum::default();
    for (q, pn) in prep.tails.iter().zip(&p) {
        s.add(q * pn);
    }
    Ok(s.value())
}

/// `L_T` on a grid, sharing the threshold tables.
pub fn reliability_grid(m: &ShockModel, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let prep = Prepared::new(m)?;
    t_grid
        .iter()
        .map(|&t| {
            if !(t >= 0.0) {
                return domain("t must be ≥ 0");
            }
            let p = prep.pooled.pmf(t);
            let mut s = NeumaierSum::default();
            for (q, pn) in prep.tails.iter().zip(&p) {
                s.add(q * pn);
            }
            Ok((t, s.value()))
        })
        .collect()
}

/// `L_T(t)` through the Wright-function pmf: `Σ_n q_n Σ_{|n̄|=n} p^α(n̄, t)`.
///
/// Each state costs a full series evaluation, so this route is meant for small `t` and
/// thresholds concentrated on small `n`.
pub fn reliability_wright(m: &ShockModel, t: f64, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    let prep = Prepared::new(m)?;
    let rates = &m.rates;
    let lam = rates.total();
    let c = lam.powf(m.alpha) * t;
    let mut psi: Vec<Option<Evaluated<f64>>> = Vec::new();
    let mut total = NeumaierSum::default();
    let mut quality = Quality::default();
    for (n, &q) in prep.tails.iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        for state in simplex_states(rates.q(), n) {
            let w = grouped_weights(rates, &state, lam);
            for (x, &wx) in w.iter().enumerate() {
                if wx == 0.0 {
                    continue;
                }
                if psi.len() <= x {
                    psi.resize(x + 1, None);
                }
                if psi[x].is_none() {
                    psi[x] = Some(wright_1_1(1.0, m.alpha, 1.0 - x as f64, m.alpha, -c, cfg)?);
                }
                let s = psi[x].expect("filled above");
                quality = quality.merge(s.quality);
                let sign = if x % 2 == 1 { -1.0 } else { 1.0 };
                total.add(q * sign * wx * s.value);
            }
        }
    }
    Ok(Evaluated { value: total.value(), max_term: 0.0, terms: psi.len(), quality })
}

/// `L_T(t) = ∫ E[z^{Q(t)}] ρ(dz)` where `q_n = ∫ z^n ρ(dz)` for the four named laws.
pub fn reliability_mixture(m: &ShockModel, t: f64) -> Result<f64> {
    m.validate()?;
    let lam = m.rates.total();
    let pooled = m.rates.pooled_row();
    let alpha = m.alpha;
    let pgf = |z: f64| {
        let mut s = lam;
        let mut zj = 1.0;
        for l in &pooled {
            zj *= z;
            s -= l * zj;
        }
        (-t * s.max(0.0).powf(alpha)).exp()
    };
    let tol = Tolerance::new(1e-15, 1e-13);
    Ok(match m.threshold {
        ThresholdDist::Geometric { p } => pgf(1.0 - p),
        ThresholdDist::Logarithmic { p } => {
            gauss_kronrod(|z| pgf(z) / (1.0 - z), 0.0, p, tol)?.value / -(-p).ln_1p()
        }
        ThresholdDist::IncGamma { a, p } => {
            gauss_kronrod(|z| pgf(z) * (-z).exp(), a, p, tol)?.value / ((-a).exp() - (-p).exp())
        }
        ThresholdDist::SineIntegral { a, p } => {
            gauss_kronrod(|z| pgf(z) * z.sin(), a, p, tol)?.value / (a.cos() - p.cos())
        }
        ThresholdDist::Custom { .. } => return domain("custom thresholds have no mixture form"),
    })
}

/// Curve families: the four named threshold laws on the two-component model with
/// `k = (1, 2)`, or any model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveCase {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    General,
}

impl FromStr for CurveCase {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1" => Self::Fig1,
            "fig2" => Self::Fig2,
            "fig3" => Self::Fig3,
            "fig4" => Self::Fig4,
            "general" => Self::General,
            other => return domain(format!("unknown case '{other}'")),
        })
    }
}

/// Sampled `(t, L_T(t))`. Named cases require `q = 2`, `k = (1, 2)` and the matching law.
pub fn reliability_curve(m: &ShockModel, t_grid: &[f64], case: CurveCase) -> Result<Vec<(f64, f64)>> {
    let family = match case {
        CurveCase::Fig1 => Some("geometric"),
        CurveCase::Fig2 => Some("logarithmic"),
        CurveCase::Fig3 => Some("incgamma"),
        CurveCase::Fig4 => Some("sine"),
        CurveCase::General => None,
    };
    if let Some(f) = family {
        if m.rates.ks() != [1, 2] {
            return domain(format!("case needs ks = [1, 2], got {:?}", m.rates.ks()));
        }
        if m.threshold.family() != f {
            return domain(format!("case needs a {f} threshold, got {}", m.threshold.family()));
        }
    }
    reliability_grid(m, t_grid)
}

/// Failure density `h_i(t) = Σ_m P(Q(t)=m) Σ_{n>m} p_n κ_i(n−m)`.
pub fn failure_density(m: &ShockModel, i: usize, t: f64) -> Result<f64> {
    m.rates.check_component(i)?;
    if !(t >= 0.0) {
        return domain("t must be ≥ 0");
    }
    let prep = Prepared::new(m)?;
    let kappa: Vec<f64> = (0..=prep.n_max()).map(|d| if d == 0 { 0.0 } else { prep.pooled.crossing_rate(&m.rates, i, d) }).collect();
    Ok(density_with(&prep, &kappa, t))
}

fn density_with(prep: &Prepared<'_>, kappa: &[f64], t: f64) -> f64 {
    let n = prep.n_max();
    let p = prep.pooled.pmf(t);
    let mut s = NeumaierSum::default();
    for (mq, &pm) in p.iter().enumerate().take(n) {
        if pm == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for th in mq + 1..=n {
            inner += prep.threshold_pmf(th) * kappa[th - mq];
        }
        s.add(pm * inner);
    }
    s.value()
}

/// `∫₀^∞ h_i(t) dt` by quadrature over the failure density.
pub fn failure_density_integral(m: &ShockModel, i: usize) -> Result<f64> {
    m.rates.check_component(i)?;
    let prep = Prepared::new(m)?;
    let kappa: Vec<f64> = (0..=prep.n_max()).map(|d| if d == 0 { 0.0 } else { prep.pooled.crossing_rate(&m.rates, i, d) }).collect();
    let f = |t: f64| density_with(&prep, &kappa, t);
    Ok(crate::quadrature::semi_infinite(f, 0.0, Tolerance::new(1e-14, 1e-12))?.value)
}

/// `P(σ = i) = Σ_n p_n Σ_{m=n−k_i}^{n−1} u_m Σ_{l=n−m}^{k_i} λ_il/λ`, where `u_m` is the
/// visit probability of the pooled event walk. Batching does not change which event
/// crosses the threshold, so this does not depend on `α`.
pub fn prob_failure_type(m: &ShockModel, i: usize) -> Result<f64> {
    m.rates.check_component(i)?;
    let prep = Prepared::new(m)?;
    let lam = m.rates.total();
    let u = prep.pooled.renewal();
    let k = m.rates.k(i);
    let mut s = NeumaierSum::default();
    for n in 1..=prep.n_max() {
        let pn = prep.threshold_pmf(n);
        for mq in n.saturating_sub(k)..n {
            s.add(pn * u[mq] * prep.upper_rate(i, n - mq) / lam);
        }
    }
    Ok(s.value())
}

/// `P(σ = i)` summed over batches: `Σ_m (v_m/λ^α) Σ_{n>m} p_n κ_i(n−m)`.
pub fn prob_failure_type_batches(m: &ShockModel, i: usize) -> Result<f64> {
    m.rates.check_component(i)?;
    let prep = Prepared::new(m)?;
    let v = prep.pooled.batch_visits();
    let n = prep.n_max();
    let rate = m.rates.total().powf(m.alpha);
    let mut s = NeumaierSum::default();
    for mq in 0..n {
        for th in mq + 1..=n {
            s.add(v[mq] / rate * prep.threshold_pmf(th) * prep.pooled.crossing_rate(&m.rates, i, th - mq));
        }
    }
    Ok(s.value())
}

/// Failure density counting only single-event batches:
/// `αλ^{α−1} Σ_n p_n Σ_{m=n−k_i}^{n−1} P(Q(t)=m) Σ_{l=n−m}^{k_i} λ_il`.
pub fn single_jump_failure_density(m: &ShockModel, i: usize, t: f64) -> Result<f64> {
    m.rates.check_component(i)?;
    let prep = Prepared::new(m)?;
    let p = prep.pooled.pmf(t);
    let lam = m.rates.total();
    let k = m.rates.k(i);
    let mut s = NeumaierSum::default();
    for n in 1..=prep.n_max() {
        let pn = prep.threshold_pmf(n);
        for mq in n.saturating_sub(k)..n {
            s.add(pn * p[mq] * prep.upper_rate(i, n - mq));
        }
    }
    Ok(m.alpha * lam.powf(m.alpha - 1.0) * s.value())
}

/// Time integral of [`single_jump_failure_density`]:
/// `(α/λ) Σ_n p_n Σ_{m=n−k_i}^{n−1} v_m Σ_{l=n−m}^{k_i} λ_il`.
pub fn single_jump_prob_failure_type(m: &ShockModel, i: usize) -> Result<f64> {
    m.rates.check_component(i)?;
    let prep = Prepared::new(m)?;
    let v = prep.pooled.batch_visits();
    let lam = m.rates.total();
    let k = m.rates.k(i);
    let mut s = NeumaierSum::default();
    for n in 1..=prep.n_max() {
        let pn = prep.threshold_pmf(n);
        for mq in n.saturating_sub(k)..n {
            s.add(pn * v[mq] * prep.upper_rate(i, n - mq));
        }
    }
    Ok(m.alpha / lam * s.value())
}

/// `e^{−λ^α t} Σ_{Ω} Π (−λ_rj/λ)^{n_rj}/n_rj! Σ_{x≤z} (λ^α t)^x/x! Σ_{y≤x} (−1)^y C(x,y) (αy)_z`,
/// the finite form of the state probability used by the hazard rate. It equals
/// `p^α(n̄, t)` but loses digits to cancellation once `z` grows.
pub fn finite_state_probability(rates: &RateMatrix, alpha: f64, n: &[usize], t: f64) -> Result<Evaluated<f64>> {
    rates.check_state(n)?;
    let lam = rates.total();
    let c = lam.powf(alpha) * t;
    let w = grouped_weights(rates, n, lam);
    let mut total = NeumaierSum::default();
    let mut max_term: f64 = 0.0;
    for (z, &wz) in w.iter().enumerate() {
        if wz == 0.0 {
            continue;
        }
        let mut fz = NeumaierSum::default();
        for x in 0..=z {
            let mut diff = NeumaierSum::default();
            for y in 0..=x {
                let binom = (ln_factorial(x as u64) - ln_factorial(y as u64) - ln_factorial((x - y) as u64)).exp();
                let sign = if y % 2 == 1 { -1.0 } else { 1.0 };
                let term = sign * binom * falling_factorial(alpha * y as f64, z);
                max_term = max_term.max(term.abs() * wz);
                diff.add(term);
            }
            fz.add((x as f64 * c.ln() - ln_factorial(x as u64)).exp() * diff.value());
        }
        let sign = if z % 2 == 1 { -1.0 } else { 1.0 };
        total.add(sign * wz * fz.value());
    }
    let e = (-c).exp();
    let value = e * total.value();
    let cfg = SeriesConfig::default();
    Ok(crate::specfun::series::combine_outer(value, e * max_term * c.exp().max(1.0), 1, false, &cfg))
}

/// Hazard rate `R_{il}(n̄; t) = C(α, t)/p^α(n̄, t)` for a shock of type `i` and size `l`.
///
/// `C` is the full numerator: the jump-rate factor over `Ω(k_i, l)` times the finite state
/// probability. The result equals the transition rate of `l ε_i`.
pub fn hazard_rate(m: &ShockModel, i: usize, l: usize, n: &[usize], t: f64, cfg: &SeriesConfig) -> Result<Evaluated<f64>> {
    m.validate()?;
    m.rates.check_component(i)?;
    if l == 0 || l > m.rates.k(i) {
        return domain(format!("jump size {l} outside 1..={}", m.rates.k(i)));
    }
    if !(t > 0.0) {
        return domain("hazard rate needs t > 0");
    }
    let mut jump = vec![0; m.rates.q()];
    jump[i] = l;
    let v = VariantSpec::Mgsfcp { alpha: m.alpha };
    let factor = variant_transition_rate(&v, &m.rates, &jump)?;
    let state = finite_state_probability(&m.rates, m.alpha, n, t)?;
    let p = variant_pmf(&v, &m.rates, n, t, cfg)?;
    if !(p.value > 0.0) {
        return domain("state probability vanishes; hazard rate undefined");
    }
    Ok(Evaluated {
        value: factor * state.value / p.value,
        max_term: state.max_term,
        terms: state.terms + p.terms,
        quality: state.quality.merge(p.quality),
    })
}

/// All `n̄ ∈ ℕ₀^q` with `|n̄| = n`, last component fastest.
pub fn simplex_states(q: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(q: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if q == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            rec(q - 1, n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, n, &mut Vec::with_capacity(q), &mut out);
    out
}
