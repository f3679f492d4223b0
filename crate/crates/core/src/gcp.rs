//! The base layer: univariate GCP and the multivariate MGCP built from `q` independent
//! components, with component `i` jumping by `j ∈ 1..=k_i` at rate `λ_ij`.
//!
//! Components and jump sizes are zero-based in the API (`rates.row(0)[0]` is `λ₁₁`).

use crate::compositions::enumerate_compositions;
use crate::error::{domain, Error, Result};
use crate::specfun::{ln_factorial, NeumaierSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A process state or pmf argument `(n₁,…,n_q)`.
pub type StateVector = Vec<usize>;

/// Jump-rate family `λ_ij`, one row per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateMatrixJson", into = "RateMatrixJson")]
pub struct RateMatrix {
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RateMatrixJson {
    ks: Vec<usize>,
    rates: Vec<Vec<f64>>,
}

impl TryFrom<RateMatrixJson> for RateMatrix {
    type Error = Error;

    fn try_from(j: RateMatrixJson) -> Result<Self> {
        if j.ks.len() != j.rates.len() {
            return domain(format!("ks has {} entries but rates has {} rows", j.ks.len(), j.rates.len()));
        }
        for (i, (k, row)) in j.ks.iter().zip(&j.rates).enumerate() {
            if *k != row.len() {
                return domain(format!("rates[{i}] has {} entries but ks[{i}] = {k}", row.len()));
            }
        }
        RateMatrix::new(j.rates)
    }
}

impl From<RateMatrix> for RateMatrixJson {
    fn from(r: RateMatrix) -> Self {
        RateMatrixJson { ks: r.ks(), rates: r.rows }
    }
}

impl RateMatrix {
    /// Builds from rows `λ_i1..λ_ik_i`. Entries must be finite and non-negative, and every
    /// component must have a positive total rate.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return domain("rates: need at least one component");
        }
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return domain(format!("rates[{i}]: need at least one jump size"));
            }
            for (j, &l) in row.iter().enumerate() {
                if !(l.is_finite() && l >= 0.0) {
                    return domain(format!("rates[{i}][{j}]: must be finite and ≥ 0, got {l}"));
                }
            }
            if !(row.iter().sum::<f64>() > 0.0) {
                return domain(format!("rates[{i}]: component total rate must be positive"));
            }
        }
        Ok(Self { rows })
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn ks(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn k(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `Λ_i = Σ_j λ_ij`.
    pub fn component_total(&self, i: usize) -> f64 {
        self.rows[i].iter().sum()
    }

    /// `λ = Σ_i Σ_j λ_ij`.
    pub fn total(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    /// Largest jump size over all components.
    pub fn max_k(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Λ_j = Σ_i λ_ij` for `j = 1..=max k`, the rates of the pooled count `Σ_i M_i`.
    pub fn pooled_row(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_k()];
        for row in &self.rows {
            for (j, &l) in row.iter().enumerate() {
                out[j] += l;
            }
        }
        out
    }

    /// `Σ_i Σ_j λ_ij (1 − u_i^j)`.
    pub fn pgf_exponent(&self, u: &[f64]) -> Result<f64> {
        self.check_u(u)?;
        let mut s = NeumaierSum::default();
        for (row, &ui) in self.rows.iter().zip(u) {
            let mut p = 1.0;
            for &l in row {
                p *= ui;
                s.add(l * (1.0 - p));
            }
        }
        Ok(s.value())
    }

    /// `Σ_j λ_ij (1 − e^{sign·ι·j})` for component `i`, with `ι = √−1`.
    pub fn char_exponent(&self, i: usize, sign: f64) -> Complex64 {
        self.rows[i]
            .iter()
            .enumerate()
            .map(|(j, &l)| l * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, sign * (j + 1) as f64)))
            .sum()
    }

    pub(crate) fn check_u(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.q() {
            return domain(format!("u has {} entries, expected {}", u.len(), self.q()));
        }
        if let Some(x) = u.iter().find(|x| !(x.abs() <= 1.0)) {
            return domain(format!("pgf argument {x} outside [-1, 1]"));
        }
        Ok(())
    }

    pub fn check_state(&self, n: &[usize]) -> Result<()> {
        if n.len() != self.q() {
            return domain(format!("state has {} entries, expected {}", n.len(), self.q()));
        }
        Ok(())
    }

    pub fn check_component(&self, i: usize) -> Result<()> {
        if i >= self.q() {
            return domain(format!("component {i} out of range for q = {}", self.q()));
        }
        Ok(())
    }
}

/// Jump `ε_i^j`: component `i` moves by `size`. Both zero-based in the sense that
/// `size` is the actual jump length (`1..=k_i`) and `component` indexes rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JumpVector {
    pub component: usize,
    pub size: usize,
}

/// `p(n, t) = Σ_{Ω(k,n)} Π_j (λ_j t)^{x_j} e^{−λ_j t}/x_j!`.
pub fn gcp_pmf(row: &[f64], n: usize, t: f64) -> f64 {
    if t == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let total: f64 = row.iter().sum();
    let mut s = NeumaierSum::default();
    'outer: for c in enumerate_compositions(row.len(), n) {
        let mut log_term = 0.0;
        for (&x, &l) in c.counts.iter().zip(row) {
            if x == 0 {
                continue;
            }
            if l == 0.0 {
                continue 'outer;
            }
            log_term += x as f64 * (l * t).ln() - ln_factorial(x as u64);
        }
        s.add(log_term.exp());
    }
    s.value() * (-total * t).exp()
}

/// `p(0..=n_max, t)` by the recursion `n·p(n) = t Σ_j j λ_j p(n − j)`.
pub fn gcp_pmf_table(row: &[f64], n_max: usize, t: f64) -> Vec<f64> {
    let mut p = vec![0.0; n_max + 1];
    let total: f64 = row.iter().sum();
    p[0] = (-total * t).exp();
    for n in 1..=n_max {
        let mut s = 0.0;
        for (j, &l) in row.iter().enumerate() {
            let size = j + 1;
            if size > n {
                break;
            }
            s += size as f64 * l * p[n - size];
        }
        p[n] = t * s / n as f64;
    }
    p
}

/// Joint pmf `Π_i p_i(n_i, t)` of the independent components.
pub fn mgcp_pmf(rates: &RateMatrix, n: &[usize], t: f64) -> Result<f64> {
    rates.check_state(n)?;
    if !(t >= 0.0) {
        return domain("t must be ≥ 0");
    }
    Ok(rates.rows().iter().zip(n).map(|(row, &ni)| gcp_pmf(row, ni, t)).product())
}

/// Joint pmf through `p(n̄) = t^q Π_i n_i^{-1} Σ_{j̄} Π_i j_i λ_ij_i · p(n̄ − j̄)`, expanding
/// over every multi-index `(j₁,…,j_q)`. States with a zero entry use [`mgcp_pmf`].
pub fn mgcp_pmf_recurrence(rates: &RateMatrix, n: &[usize], t: f64) -> Result<f64> {
    rates.check_state(n)?;
    if n.iter().any(|&x| x == 0) {
        return domain("recurrence needs every n_i ≥ 1");
    }
    if !(t > 0.0) {
        return domain("recurrence needs t > 0");
    }
    let mut memo = HashMap::new();
    Ok(recurrence_step(rates, n, t, &mut memo))
}

fn recurrence_step(rates: &RateMatrix, n: &[usize], t: f64, memo: &mut HashMap<Vec<usize>, f64>) -> f64 {
    if n.iter().any(|&x| x == 0) {
        return rates.rows().iter().zip(n).map(|(row, &ni)| gcp_pmf(row, ni, t)).product();
    }
    if let Some(&v) = memo.get(n) {
        return v;
    }
    let q = rates.q();
    let limits: Vec<usize> = (0..q).map(|i| rates.k(i).min(n[i])).collect();
    let mut j = vec![1usize; q];
    let mut prev = n.to_vec();
    let mut sum = 0.0;
    loop {
        let mut coef = 1.0;
        for i in 0..q {
            coef *= j[i] as f64 * rates.row(i)[j[i] - 1];
            prev[i] = n[i] - j[i];
        }
        if coef != 0.0 {
            sum += coef * recurrence_step(rates, &prev, t, memo);
        }
        if !advance_multi_index(&mut j, &limits) {
            break;
        }
    }
    let scale: f64 = n.iter().map(|&x| t / x as f64).product();
    let v = scale * sum;
    memo.insert(n.to_vec(), v);
    v
}

/// Steps `j` (entries in `1..=limits[i]`) to the next multi-index, last entry fastest.
fn advance_multi_index(j: &mut [usize], limits: &[usize]) -> bool {
    for pos in (0..j.len()).rev() {
        j[pos] += 1;
        if j[pos] <= limits[pos] {
            return true;
        }
        j[pos] = 1;
    }
    false
}

/// `G(ū, t) = exp(−t Σ_i Σ_j λ_ij (1 − u_i^j))`.
pub fn mgcp_pgf(rates: &RateMatrix, u: &[f64], t: f64) -> Result<f64> {
    Ok((-t * rates.pgf_exponent(u)?).exp())
}

/// `E M_i(t) = t Σ_j j λ_ij`.
pub fn mgcp_mean(rates: &RateMatrix, i: usize, t: f64) -> Result<f64> {
    rates.check_component(i)?;
    Ok(t * moment_sum(rates.row(i), 1))
}

/// `Var M_i(t) = t Σ_j j² λ_ij`.
pub fn mgcp_component_variance(rates: &RateMatrix, i: usize, t: f64) -> Result<f64> {
    rates.check_component(i)?;
    Ok(t * moment_sum(rates.row(i), 2))
}

/// `Σ_j j^p λ_j`.
pub(crate) fn moment_sum(row: &[f64], p: i32) -> f64 {
    row.iter().enumerate().map(|(j, &l)| ((j + 1) as f64).powi(p) * l).sum()
}

/// Atoms `λ_ij` at `ε_i^j`; zero rates are omitted.
pub fn mgcp_levy_measure(rates: &RateMatrix) -> BTreeMap<JumpVector, f64> {
    let mut out = BTreeMap::new();
    for (i, row) in rates.rows().iter().enumerate() {
        for (j, &l) in row.iter().enumerate() {
            if l > 0.0 {
                out.insert(JumpVector { component: i, size: j + 1 }, l);
            }
        }
    }
    out
}

/// Rate families built from one base rate per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresetKind {
    /// `λ_ij = λ_i`.
    OrderK,
    /// `λ_ij = λ_i (1−ν) ν^{j−1} / (1 − ν^{k_i})`.
    PolyaAeppli { nu: f64 },
}

/// Builds a [`RateMatrix`] from per-component base rates.
pub fn preset_rates(kind: PresetKind, ks: &[usize], base: &[f64]) -> Result<RateMatrix> {
    if ks.len() != base.len() {
        return domain("ks and base rates must have equal length");
    }
    let rows = ks
        .iter()
        .zip(base)
        .map(|(&k, &l)| match kind {
            PresetKind::OrderK => Ok(vec![l; k]),
            PresetKind::PolyaAeppli { nu } => {
                if !(0.0..1.0).contains(&nu) {
                    return domain(format!("nu must lie in [0, 1), got {nu}"));
                }
                let norm = 1.0 - nu.powi(k as i32);
                Ok((0..k).map(|j| l * (1.0 - nu) * nu.powi(j as i32) / norm).collect())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    RateMatrix::new(rows)
}

/// Per-component truncation box: at least `⌈mean + 12·sd⌉`, grown until each component
/// leaves less than `1e−7` of its mass outside.
pub fn pmf_box(rates: &RateMatrix, t: f64) -> StateVector {
    (0..rates.q())
        .map(|i| {
            let row = rates.row(i);
            let m = t * moment_sum(row, 1);
            let v = t * moment_sum(row, 2);
            let mut n = (m + 12.0 * v.sqrt()).ceil() as usize;
            while 1.0 - gcp_pmf_table(row, n, t).iter().sum::<f64>() > 1e-7 {
                n += 1 + n / 8;
            }
            n
        })
        .collect()
}
