//! Throughput and node-count harness.
//!
//! A [`WorkloadSpec`] fixes the algorithm, thread count, key set and
//! operation mix. [`run_benchmark`] rebuilds the tree for every run,
//! prefills part of the key set, lets the workers loop for the configured
//! duration and reports per-run and median throughput. [`emit_csv`] turns
//! results into the harness's CSV format.

mod csv;
mod keys;
mod runner;
mod workload;

pub use self::csv::{emit_csv, CSV_HEADER};
pub use keys::{generate_keys, KeyType, FLOAT_KEY_SCALE};
pub use runner::{run_benchmark, BenchResult, RunResult};
pub use workload::{Mix, WorkloadSpec};

use crate::variants::Variant;
use crate::TreeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("invalid mix `{0}`: expected four percentages I:R:C:M summing to 100")]
    InvalidMix(String),
    #[error("{0} does not support move; use a mix with 0% move")]
    MoveUnsupported(Variant),
    #[error("cannot draw {count} distinct keys from {capacity} candidates")]
    TooManyKeys { count: usize, capacity: f64 },
    #[error("invalid workload: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}
