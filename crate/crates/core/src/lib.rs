//! Drazin inverses of dense complex matrices.
//!
//! The crate provides:
//! - a dense complex-matrix foundation ([`matrix`]),
//! - a Drazin engine with two independent algorithms ([`engine`]),
//! - closed-form additive formulas for pseudo-block sums ([`additive`]),
//! - closed-form 2x2 block-matrix formulas ([`block2x2`]),
//! - declarative hypothesis sets with numerical checking ([`hypotheses`]),
//! - seeded constructive instance generators ([`generators`]).
//!
//! All operations are pure functions of immutable inputs and are safe to run
//! concurrently; determinism is guaranteed per instance given identical
//! inputs and tolerances.

pub mod additive;
pub mod block2x2;
pub mod engine;
pub mod error;
pub mod generators;
pub mod hypotheses;
pub mod matrix;

pub use error::{Error, Result};
pub use matrix::{CMatrix, Tolerance};
