//! Log preprocessing and parsing toolkit.
//!
//! The pipeline has four stages, each in its own module:
//!
//! * [`corpus`] loads Loghub-style datasets (structured CSV with ground-truth
//!   templates, or raw logs split by a header format) and extracts variable
//!   occurrences by aligning messages with their templates.
//! * [`masker`] holds the ordered masking-rule catalog, applies it to message
//!   content, filters rules by their applicability on a dataset prefix and
//!   measures how well the rules line up with ground-truth variables.
//! * [`parsers`] runs the statistic-based parsers (Drain and LFA) on masked
//!   content.
//! * [`metrics`] scores a parse with GA, PA, FGA and FTA, overall and per
//!   frequency / complexity subgroup.
//!
//! [`cli`] wires the stages together behind the `logprep` binary.

pub mod benchmark;
pub mod cli;
pub mod config;
pub mod corpus;
mod error;
pub mod masker;
pub mod metrics;
pub mod parsers;

pub use error::{Error, Result};

/// The placeholder token that stands for one variable in a template.
pub const PLACEHOLDER: &str = "<*>";
