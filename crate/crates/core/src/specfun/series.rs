use serde::{Deserialize, Serialize};

/// Truncation and health-check settings for infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Stop once three consecutive terms fall below `rel_tol·|partial sum|`.
    pub rel_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// Flag the result when `max |term| / |result|` exceeds this ratio.
    pub cancellation_warn_ratio: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-16, max_terms: 2000, cancellation_warn_ratio: 1e8 }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms < 1 || !(self.cancellation_warn_ratio >= 1.0) {
            return crate::error::domain("series config needs rel_tol > 0, max_terms ≥ 1, ratio ≥ 1");
        }
        Ok(())
    }
}

/// Numerical-health flags attached to an evaluated quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quality {
    /// The series hit `max_terms` before meeting its stopping rule.
    pub truncated: bool,
    /// The largest term dwarfed the result by more than the configured ratio.
    pub cancellation: bool,
}

impl Quality {
    pub fn merge(self, other: Quality) -> Quality {
        Quality {
            truncated: self.truncated || other.truncated,
            cancellation: self.cancellation || other.cancellation,
        }
    }

    pub fn is_clean(&self) -> bool {
        !self.truncated && !self.cancellation
    }

    /// Human-readable warnings, empty when clean.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.truncated {
            w.push("series truncated at max_terms before convergence".to_string());
        }
        if self.cancellation {
            w.push("cancellation ratio exceeded; result has reduced precision".to_string());
        }
        w
    }
}

/// A value together with the magnitude of its largest summand and health flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluated<T> {
    pub value: T,
    pub max_term: f64,
    pub terms: usize,
    pub quality: Quality,
}

impl<T> Evaluated<T> {
    pub fn exact(value: T) -> Self {
        Self { value, max_term: 0.0, terms: 1, quality: Quality::default() }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Evaluated<U> {
        Evaluated { value: f(self.value), max_term: self.max_term, terms: self.terms, quality: self.quality }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Tracks the stopping rule and the cancellation ratio while a series is summed.
#[derive(Debug, Clone)]
pub struct SeriesMonitor {
    cfg: SeriesConfig,
    small_run: usize,
    max_term: f64,
    last_nonzero: f64,
    terms: usize,
    done: bool,
}

impl SeriesMonitor {
    pub fn new(cfg: SeriesConfig) -> Self {
        Self { cfg, small_run: 0, max_term: 0.0, last_nonzero: f64::INFINITY, terms: 0, done: false }
    }

    /// Records a term of magnitude `term_abs` against the current partial-sum magnitude.
    /// Returns `true` once the series may stop.
    pub fn push(&mut self, term_abs: f64, partial_abs: f64) -> bool {
        self.terms += 1;
        if term_abs > self.max_term {
            self.max_term = term_abs;
        }
        // Terms count as negligible only past the peak of the envelope.
        let decaying = term_abs <= self.last_nonzero;
        if term_abs != 0.0 {
            self.last_nonzero = term_abs;
        }
        if term_abs <= self.cfg.rel_tol * partial_abs && decaying && partial_abs > 0.0 {
            self.small_run += 1;
        } else if term_abs != 0.0 {
            self.small_run = 0;
        }
        if self.small_run >= 3 {
            self.done = true;
        }
        self.done
    }

    pub fn exhausted(&self) -> bool {
        self.terms >= self.cfg.max_terms
    }

    pub fn finish<T>(&self, value: T, value_abs: f64) -> Evaluated<T> {
        let cancellation = if value_abs > 0.0 {
            self.max_term / value_abs > self.cfg.cancellation_warn_ratio
        } else {
            self.max_term > 0.0
        };
        Evaluated {
            value,
            max_term: self.max_term,
            terms: self.terms,
            quality: Quality { truncated: !self.done, cancellation },
        }
    }
}

/// Health of an outer sum, judged against its largest individual contribution.
pub(crate) fn combine_outer(
    value: f64,
    max_contribution: f64,
    terms: usize,
    truncated: bool,
    cfg: &SeriesConfig,
) -> Evaluated<f64> {
    let cancellation = if value.abs() > 0.0 {
        max_contribution / value.abs() > cfg.cancellation_warn_ratio
    } else {
        max_contribution > 0.0
    };
    Evaluated {
        value,
        max_term: max_contribution,
        terms,
        quality: Quality { truncated, cancellation },
    }
}
