//! Separability probabilities for octonionic 2x2 ⊗ 2x2 density matrices.
//!
//! The crate samples octonionic Wishart matrices, applies a partial
//! transpose and a determinant-sign PPT test, and evaluates the closed-form
//! probabilities those estimates are compared against.

// negated float comparisons deliberately reject NaN; index loops mirror
// the matrix notation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod error;
pub mod formulas;
pub mod matrix;
pub mod montecarlo;
pub mod octonion;
pub mod sampling;

pub use error::{Error, Result};
pub use matrix::{MatrixError, MinorRule, OctoMatrix};
pub use montecarlo::{estimate_separability, EstimateResult};
pub use octonion::Octonion;
pub use sampling::{GammaVariant, SimulationConfig};
