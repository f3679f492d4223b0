//! Special functions behind every closed form: Mittag-Leffler, Wright, reciprocal gamma,
//! incomplete beta/gamma/sine integrals, falling factorials and a Caputo derivative.
//!
//! Infinite series are truncated according to [`SeriesConfig`] and report their numerical
//! health through [`Quality`], so callers can surface cancellation rather than hide it.

mod caputo;
mod dd;
mod gamma;
mod incomplete;
mod mittag_leffler;
pub(crate) mod series;
mod wright;

pub use caputo::caputo_derivative_numeric;
pub use gamma::{falling_factorial, gamma, ln_factorial, ln_gamma_signed, reciprocal_gamma};
pub use incomplete::{generalized_incomplete_gamma, generalized_sine_integral, incomplete_beta};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_complex};
pub use series::{Evaluated, NeumaierSum, Quality, SeriesConfig, SeriesMonitor};
pub use wright::wright_1_1;
