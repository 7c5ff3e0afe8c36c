//! Construction and certification of ROCN (row-orthogonal,
//! column-normalized) correlation Bell inequalities.
//!
//! * [`rocn`]: the matrix type, validation, classical and quantum bounds.
//! * [`symspan`]: symmetric two-fold tensors, spanning tests and the
//!   Gram–Schmidt vector families.
//! * [`selftest`]: the moment-matrix rank criterion and the symmetric
//!   spanning criterion.
//! * [`construct`]: self-testing block constructions and presets.
//! * [`strategy`]: the canonical quantum strategy and its correlations.
//! * [`report`]: CLI reports and exit codes.

pub mod construct;
pub mod error;
mod linalg;
pub mod report;
pub mod rocn;
pub mod selftest;
pub mod strategy;
pub mod symspan;

pub use construct::{build_self_testing_matrix, preset, Preset};
pub use error::{Error, Result};
pub use rocn::{bell_value, classical_bound, quantum_bound, validate_rocn, RocnMatrix};
pub use selftest::{rank_criterion, spanning_criterion};
pub use strategy::{canonical_strategy, correlations, verify_quantum_bound};
