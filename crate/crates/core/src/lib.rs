//! Multivariate generalized counting processes (MGCP) and their random time changes.
//!
//! The crate is layered bottom-up:
//!
//! - [`specfun`]: Mittag-Leffler, Wright and incomplete integrals, plus quadrature.
//! - [`compositions`]: the weighted composition sets `Ω(k, n)` indexing every pmf series.
//! - [`gcp`]: the base process, its pmf, pgf, moments and Lévy measure.
//! - [`subordinators`]: random clocks, their transforms and exact samplers.
//! - [`variants`]: closed forms for every time-changed process.
//! - [`bernstein`]: the general Bernstein-clock layer, evaluated by quadrature.
//! - [`shock`]: the shock-model reliability application.
//! - [`montecarlo`]: exact simulation and estimators that check the analytic layers.

pub mod bernstein;
pub mod compositions;
pub mod error;
pub mod gcp;
pub mod montecarlo;
pub mod quadrature;
pub mod shock;
pub mod specfun;
pub mod subordinators;
pub mod variants;

pub use error::{Error, Result};
pub use gcp::{RateMatrix, StateVector};
pub use specfun::{Evaluated, Quality, SeriesConfig};
pub use subordinators::{RngSeed, SubordinatorSpec};
pub use variants::VariantSpec;
