//! Monte Carlo experiments, output files and the verification battery for
//! the `star-ris` optimizer.

// NaN must fail comparisons, so `!(a <= b)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod output;
pub mod seed;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, RateProfile, Scheme, SchemeKind};
pub use experiment::{run_experiment, CellSummary, ExperimentOutput, ResultRow};
pub use verify::{run_verify, Report, VerifyOptions};
