//! Exact simulation of every variant and estimators that check the analytic layers.
//!
//! Sample `k` of a run with seed `s` draws from ChaCha8 stream `(s, k)`. Workers take
//! contiguous index ranges whose sizes differ by at most one, and every estimator
//! aggregates integer counts, so the output does not depend on the worker count.

use crate::error::{domain, Result};
use crate::gcp::{RateMatrix, StateVector};
use crate::shock::{threshold_tails, ShockModel};
use crate::specfun::{Quality, SeriesConfig};
use crate::subordinators::{sample, RngSeed, SubordinatorSpec};
use crate::variants::{codifference, covariance, PmfEvaluator, VariantSpec};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Cells whose analytic mass is below this are pooled into the tail bucket.
pub const TAIL_CELL_MASS: f64 = 1e-6;
/// Poisson means above this are drawn from the normal approximation.
const POISSON_EXACT_LIMIT: f64 = 1e15;
/// Empirical characteristic functions below this modulus make the logarithm unstable.
const ECF_FLOOR: f64 = 1e-3;

/// One estimated quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub empirical: f64,
    pub se: f64,
    pub analytic: Option<f64>,
    /// `(empirical − analytic)/se`.
    pub z: Option<f64>,
}

/// Result of a Monte-Carlo comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub kind: String,
    pub variant: Option<VariantSpec>,
    pub t: Vec<f64>,
    pub seed: u64,
    pub n_samples: usize,
    pub estimates: Vec<Estimate>,
    /// Largest `|z|` over estimates with an analytic value.
    pub max_abs_z: f64,
    pub sigma_level: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl EstimateReport {
    fn finish(
        kind: &str,
        variant: Option<VariantSpec>,
        t: Vec<f64>,
        seed: u64,
        n_samples: usize,
        estimates: Vec<Estimate>,
        sigma_level: f64,
        warnings: Vec<String>,
    ) -> Self {
        let max_abs_z = estimates.iter().filter_map(|e| e.z).fold(0.0, |m: f64, z| m.max(z.abs()));
        Self {
            kind: kind.to_string(),
            variant,
            t,
            seed,
            n_samples,
            pass: max_abs_z <= sigma_level,
            estimates,
            max_abs_z,
            sigma_level,
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn z_score(empirical: f64, analytic: f64, se: f64) -> f64 {
    let d = empirical - analytic;
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(d)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    if mean <= POISSON_EXACT_LIMIT {
        let p = Poisson::new(mean).expect("mean is positive and below the Poisson limit");
        return p.sample(rng) as usize;
    }
    let z: f64 = StandardNormal.sample(rng);
    (mean + mean.sqrt() * z).max(0.0) as usize
}

/// One draw of `M̄(t)`. Each size-`j` jump count of component `i` is Poisson(`λ_ij t`),
/// the split form of the compound-Poisson representation.
pub fn sample_mgcp<R: Rng + ?Sized>(rates: &RateMatrix, t: f64, rng: &mut R) -> StateVector {
    rates
        .rows()
        .iter()
        .map(|row| {
            row.iter().enumerate().fold(0usize, |acc, (j, &l)| {
                acc.saturating_add(poisson_count(l * t, rng).saturating_mul(j + 1))
            })
        })
        .collect()
}

/// One draw of the variant at time `t`: clock value first, then the MGCP at that time.
pub fn sample_variant<R: Rng + ?Sized>(v: &VariantSpec, rates: &RateMatrix, t: f64, rng: &mut R) -> Result<StateVector> {
    v.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return domain("t must be finite and ≥ 0");
    }
    let s = match v.clock() {
        None => t,
        Some(c) => sample(&c, t, rng)?,
    };
    Ok(sample_mgcp(rates, s, rng))
}

/// Runs `step` on sample indices `0..n` split over `workers` threads and merges the
/// per-thread accumulators in index order.
fn parallel_fold<A, I, S, M>(n: usize, seed: u64, workers: usize, init: I, step: S, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &mut rand_chacha::ChaCha8Rng) -> Result<()> + Sync,
    M: Fn(A, A) -> A,
{
    let workers = workers.clamp(1, n.max(1));
    let base = n / workers;
    let extra = n % workers;
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0;
    for w in 0..workers {
        let len = base + usize::from(w < extra);
        ranges.push(start..start + len);
        start += len;
    }
    let run = |range: std::ops::Range<usize>| -> Result<A> {
        let mut acc = init();
        for k in range {
            let mut rng = RngSeed::new(seed, k as u64).rng();
            step(&mut acc, &mut rng)?;
        }
        Ok(acc)
    };
    let parts: Vec<Result<A>> = if workers == 1 {
        ranges.into_iter().map(run).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges.into_iter().map(|r| scope.spawn(|| run(r))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut it = parts.into_iter();
    let mut acc = it.next().expect("at least one worker")?;
    for p in it {
        acc = merge(acc, p?);
    }
    Ok(acc)
}

fn merge_counts<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, c) in b {
        *a.entry(k).or_insert(0) += c;
    }
    a
}

/// Empirical histogram of `n_samples` draws.
pub fn sample_histogram(
    v: &VariantSpec,
    rates: &RateMatrix,
    t: f64,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<BTreeMap<StateVector, u64>> {
    v.validate()?;
    parallel_fold(
        n_samples,
        seed,
        workers,
        BTreeMap::new,
        |acc, rng| {
            *acc.entry(sample_variant(v, rates, t, rng)?).or_insert(0) += 1;
            Ok(())
        },
        merge_counts,
    )
}

fn format_state(n: &[usize]) -> String {
    let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Empirical cell frequencies over the box `0̄..=upper` against the analytic pmf.
/// Cells with analytic mass below `1e−6`, and everything outside the box, form the
/// `tail` bucket. Standard errors are binomial at the analytic mass.
pub fn estimate_pmf(
    v: &VariantSpec,
    rates: &RateMatrix,
    t: f64,
    upper: &[usize],
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport> {
    if n_samples < 1000 {
        return domain("estimate_pmf needs at least 1000 samples");
    }
    rates.check_state(upper)?;
    let cfg = SeriesConfig::default();
    let mut eval = PmfEvaluator::new(v, rates, t, &cfg)?;
    let hist = sample_histogram(v, rates, t, n_samples, seed, workers)?;
    let n = n_samples as f64;
    let mut quality = Quality::default();
    let mut estimates = Vec::new();
    let mut cell_mass = 0.0;
    let mut cell_count = 0u64;
    for cell in crate::variants::box_cells(upper) {
        let p = eval.pmf(&cell)?;
        quality = quality.merge(p.quality);
        if p.value < TAIL_CELL_MASS {
            continue;
        }
        let c = hist.get(&cell).copied().unwrap_or(0);
        cell_mass += p.value;
        cell_count += c;
        let se = (p.value * (1.0 - p.value) / n).sqrt();
        let emp = c as f64 / n;
        estimates.push(Estimate {
            label: format_state(&cell),
            empirical: emp,
            se,
            analytic: Some(p.value),
            z: Some(z_score(emp, p.value, se)),
        });
    }
    let tail_p = (1.0 - cell_mass).max(0.0);
    let tail_emp = (n_samples as u64 - cell_count) as f64 / n;
    let se = (tail_p * (1.0 - tail_p) / n).sqrt();
    estimates.push(Estimate {
        label: "tail".into(),
        empirical: tail_emp,
        se,
        analytic: Some(tail_p),
        z: Some(z_score(tail_emp, tail_p, se)),
    });
    Ok(EstimateReport::finish("pmf", Some(*v), vec![t], seed, n_samples, estimates, 4.0, quality.warnings()))
}

fn pair_histogram(
    v: &VariantSpec,
    rates: &RateMatrix,
    i: usize,
    l: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<BTreeMap<(usize, usize), u64>> {
    rates.check_component(i)?;
    rates.check_component(l)?;
    v.validate()?;
    parallel_fold(
        n_samples,
        seed,
        workers,
        BTreeMap::new,
        |acc, rng| {
            let s = sample_variant(v, rates, t, rng)?;
            *acc.entry((s[i], s[l])).or_insert(0) += 1;
            Ok(())
        },
        merge_counts,
    )
}

/// Sample covariance of `N_i(t)` and `N_l(t)`, with its influence-function standard error.
#[allow(clippy::too_many_arguments)]
pub fn estimate_covariance(
    v: &VariantSpec,
    rates: &RateMatrix,
    i: usize,
    l: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport> {
    if n_samples < 10_000 {
        return domain("estimate_covariance needs at least 10000 samples");
    }
    let hist = pair_histogram(v, rates, i, l, t, n_samples, seed, workers)?;
    let n = n_samples as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for (&(x, y), &c) in &hist {
        mx += c as f64 * x as f64;
        my += c as f64 * y as f64;
    }
    mx /= n;
    my /= n;
    let mut cov = 0.0;
    for (&(x, y), &c) in &hist {
        cov += c as f64 * (x as f64 - mx) * (y as f64 - my);
    }
    cov /= n;
    let mut var_if = 0.0;
    for (&(x, y), &c) in &hist {
        let d = (x as f64 - mx) * (y as f64 - my) - cov;
        var_if += c as f64 * d * d;
    }
    let se = (var_if / (n - 1.0) / n).sqrt();
    let mut warnings = Vec::new();
    let analytic = match covariance(v, rates, i, l, t) {
        Ok(a) => Some(a),
        Err(e) => {
            warnings.push(format!("no analytic value: {e}"));
            None
        }
    };
    let est = Estimate {
        label: format!("cov(N_{i},N_{l})"),
        empirical: cov,
        se,
        analytic,
        z: analytic.map(|a| z_score(cov, a, se)),
    };
    Ok(EstimateReport::finish("covariance", Some(*v), vec![t], seed, n_samples, vec![est], 3.0, warnings))
}

/// Plug-in codifference `ln φ̂(1,−1) − ln φ̂_i(1) − ln φ̂_l(−1)` from empirical
/// characteristic functions; the cross term is dropped when `i = l`. Real and imaginary
/// parts carry delta-method standard errors.
#[allow(clippy::too_many_arguments)]
pub fn estimate_codifference(
    v: &VariantSpec,
    rates: &RateMatrix,
    i: usize,
    l: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport> {
    if n_samples < 10_000 {
        return domain("estimate_codifference needs at least 10000 samples");
    }
    let hist = pair_histogram(v, rates, i, l, t, n_samples, seed, workers)?;
    let n = n_samples as f64;
    let cross = i != l;
    let unit = |x: f64| Complex64::from_polar(1.0, x);
    // Reduce counts mod 2π before converting so huge values keep their phase.
    let phase = |x: usize| (x as f64).rem_euclid(std::f64::consts::TAU);
    let mut phi = [Complex64::new(0.0, 0.0); 3];
    for (&(x, y), &c) in &hist {
        let (px, py) = (phase(x), phase(y));
        let w = c as f64;
        phi[0] += w * unit(px - py);
        phi[1] += w * unit(px);
        phi[2] += w * unit(-py);
    }
    for p in &mut phi {
        *p /= n;
    }
    let used: &[usize] = if cross { &[0, 1, 2] } else { &[1, 2] };
    for &k in used {
        if phi[k].norm() < ECF_FLOOR {
            return Err(crate::Error::Numerical(format!(
                "unstable log: |empirical characteristic function| = {:.3e} < {ECF_FLOOR}",
                phi[k].norm()
            )));
        }
    }
    let tau = if cross { phi[0].ln() } else { Complex64::new(0.0, 0.0) } - phi[1].ln() - phi[2].ln();
    // influence of one sample on τ
    let influence = |x: usize, y: usize| {
        let (px, py) = (phase(x), phase(y));
        let mut f = -(unit(px) - phi[1]) / phi[1] - (unit(-py) - phi[2]) / phi[2];
        if cross {
            f += (unit(px - py) - phi[0]) / phi[0];
        }
        f
    };
    let (mut vr, mut vi) = (0.0, 0.0);
    for (&(x, y), &c) in &hist {
        let f = influence(x, y);
        vr += c as f64 * f.re * f.re;
        vi += c as f64 * f.im * f.im;
    }
    let se_re = (vr / (n - 1.0) / n).sqrt();
    let se_im = (vi / (n - 1.0) / n).sqrt();
    let mut warnings = Vec::new();
    let analytic = match codifference(v, rates, i, l, t, &SeriesConfig::default()) {
        Ok(a) => {
            warnings.extend(a.quality.warnings());
            Some(a.value)
        }
        Err(e) => {
            warnings.push(format!("no analytic value: {e}"));
            None
        }
    };
    let estimates = vec![
        Estimate {
            label: "re".into(),
            empirical: tau.re,
            se: se_re,
            analytic: analytic.map(|a| a.re),
            z: analytic.map(|a| z_score(tau.re, a.re, se_re)),
        },
        Estimate {
            label: "im".into(),
            empirical: tau.im,
            se: se_im,
            analytic: analytic.map(|a| a.im),
            z: analytic.map(|a| z_score(tau.im, a.im, se_im)),
        },
    ];
    Ok(EstimateReport::finish("codifference", Some(*v), vec![t], seed, n_samples, estimates, 3.0, warnings))
}

/// `P(T > t)` on a grid of increasing times: each sample draws a threshold `N` with
/// `P(N > n) = q_n` and one path of the pooled count through independent stable-clock
/// increments. Compared against [`crate::shock::reliability`].
pub fn estimate_reliability(
    m: &ShockModel,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport> {
    m.validate()?;
    if n_samples < 1000 {
        return domain("estimate_reliability needs at least 1000 samples");
    }
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("t grid must be non-empty, non-negative and non-decreasing");
    }
    let tails = threshold_tails(&m.threshold)?;
    let clock = SubordinatorSpec::Stable { alpha: m.alpha };
    let survivors = parallel_fold(
        n_samples,
        seed,
        workers,
        || vec![0u64; t_grid.len()],
        |acc, rng| {
            let u: f64 = rng.random();
            let threshold = tails.iter().position(|&q| q <= u).unwrap_or(tails.len());
            let mut total = 0usize;
            let mut prev = 0.0;
            for (k, &t) in t_grid.iter().enumerate() {
                let dt = t - prev;
                prev = t;
                if dt > 0.0 && total < threshold {
                    let s = if m.alpha == 1.0 { dt } else { sample(&clock, dt, rng)? };
                    let inc = sample_mgcp(&m.rates, s, rng);
                    total = inc.iter().fold(total, |a, &x| a.saturating_add(x));
                }
                if total < threshold {
                    acc[k] += 1;
                } else {
                    break;
                }
            }
            Ok(())
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?;
    let n = n_samples as f64;
    let analytic = crate::shock::reliability_grid(m, t_grid)?;
    let estimates = t_grid
        .iter()
        .zip(&survivors)
        .zip(&analytic)
        .map(|((&t, &c), &(_, a))| {
            let emp = c as f64 / n;
            let se = (a * (1.0 - a) / n).sqrt();
            Estimate { label: format!("L_T({t})"), empirical: emp, se, analytic: Some(a), z: Some(z_score(emp, a, se)) }
        })
        .collect();
    Ok(EstimateReport::finish("reliability", None, t_grid.to_vec(), seed, n_samples, estimates, 3.0, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> RateMatrix {
        RateMatrix::new(vec![vec![0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn zero_time_is_origin() {
        let mut rng = RngSeed::new(1, 0).rng();
        assert_eq!(sample_mgcp(&fig1(), 0.0, &mut rng), vec![0, 0]);
        let v = VariantSpec::Mgsfcp { alpha: 0.5 };
        assert_eq!(sample_variant(&v, &fig1(), 0.0, &mut rng).unwrap(), vec![0, 0]);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let v = VariantSpec::Gamma { a: 1.0, b: 2.0 };
        let a = estimate_pmf(&v, &fig1(), 1.0, &[3, 3], 4000, 9, 1).unwrap();
        let b = estimate_pmf(&v, &fig1(), 1.0, &[3, 3], 4000, 9, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn sample_sizes_enforced() {
        assert!(estimate_pmf(&VariantSpec::Mgcp, &fig1(), 1.0, &[2, 2], 10, 1, 1).is_err());
        assert!(estimate_covariance(&VariantSpec::Mgcp, &fig1(), 0, 1, 1.0, 100, 1, 1).is_err());
    }

    #[test]
    fn huge_poisson_mean() {
        let mut rng = RngSeed::new(3, 0).rng();
        let x = poisson_count(1e18, &mut rng) as f64;
        assert!((x / 1e18 - 1.0).abs() < 1e-6);
    }
}
