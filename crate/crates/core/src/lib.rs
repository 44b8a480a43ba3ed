//! Finite-scale computation of covering, quantization and entropy numbers for
//! shift systems over metric alphabets, with exact solvers and property suites.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod covering;
pub mod entropy;
pub mod error;
pub mod estimators;
pub mod measures;
pub mod metric;
pub mod quantization;
pub mod solvers;
pub mod suites;
pub mod systems;
pub mod transport;

pub use budget::Budget;
pub use covering::{count, CountKind, CountMethod, CountResult};
pub use error::{Error, Result};
pub use estimators::{DimensionReport, GrowthEstimate};
pub use measures::{BallKind, ComponentDecomposition, FiniteMeasure, MeasureRule};
pub use metric::{FiniteMetricSpace, MetricAlphabet, Word};
pub use quantization::{QuantKind, QuantMethod};
pub use suites::{run_suite, Counterexample, SuiteName, SuiteReport, SuiteStatus};
pub use systems::{LetterDist, SymbolicSystem};
