//! Polynomial-tree discriminators for separating iron-deficiency anemia (IDA)
//! from β-thalassemia trait (β-TT) on complete-blood-count indices.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithmic piece:
//!
//! - [`data`]: CBC sample model, normal ranges, cohorts, seeded splitting,
//!   the built-in reference fixture and a synthetic cohort generator.
//! - [`poly_tree`]: Kolmogorov–Gabor bivariate basis and the 15 fixed
//!   four-input tree schemes.
//! - [`hs`]: harmony search with optional dynamic HMCR/PAR adaptation, and a
//!   genetic-algorithm baseline over the same encoding.
//! - [`pbis`]: pattern-based index selection by abnormality similarity.
//! - [`discriminator`]: class-statistics fitness, training, calibration and
//!   prediction.
//! - [`baselines`]: the classical single-formula discriminators.
//! - [`metrics`]: confusion matrices and the six diagnostic metrics.
//!
//! File formats, CSV ingestion and the command line live in the `hemadisc`
//! companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod data;
pub mod discriminator;
pub mod hs;
pub mod metrics;
pub mod pbis;
pub mod poly_tree;

pub use data::{CbcIndex, CbcSample, ClassTag, Cohort, Diagnosis, Label, NormalRange, NormalRanges};
pub use discriminator::TrainedModel;
pub use metrics::{ConfusionMatrix, MetricReport};
