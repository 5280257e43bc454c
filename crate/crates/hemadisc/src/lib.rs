//! File formats, run configuration and command implementations for the
//! `hemadisc` CLI, on top of `hemadisc-core`.

pub mod atomic;
pub mod cohort_csv;
pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;
pub mod report;
pub mod trace_csv;

pub use error::{Error, ExitKind, Result};
