//! Deterministic, nonadaptive approximation of the metric 1-median.
//!
//! Given `n` points and a depth `h >= 2`, [`approx_median`] issues a fixed set
//! of at most `(n - sigma)(t + 1)` distance queries, where `t` is a prime close
//! to `n^(1/h)`, and returns a point whose total distance to all others is
//! within a factor `2h` of optimal. The query set depends only on `(n, h)`,
//! never on the distances themselves.
//!
//! The crate also carries the ground-truth oracles used to check those claims
//! ([`oracles`]) and the pieces behind the `median` command-line tool
//! ([`harness`]).

pub mod error;
pub mod generate;
pub mod harness;
pub mod ledger;
pub mod metric;
pub mod oracles;
pub mod params;
pub mod select;

pub use error::{Error, Result};
pub use generate::{generate, InstanceKind, InstanceSpec};
pub use ledger::{QueryLedger, TranscriptHasher};
pub use metric::{validate_metric, MetricSpace, Violation};
pub use oracles::{exact_median, tilde_median_naive, OracleReport, TildeReport};
pub use params::{choose_params, tary_digits, Params, TaryDigits};
pub use select::{approx_median, DpTables, MedianRun, SelectionResult};

/// Relative slack used wherever a floating-point inequality from exact
/// arithmetic is checked.
pub const REL_TOL: f64 = 1e-9;
