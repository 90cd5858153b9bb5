//! Dense matrix primitives, the Adam optimizer, and the finite-difference
//! gradient checker.

mod adam;
mod dense;
mod gradcheck;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use dense::{Dense, DenseError};
pub use gradcheck::{finite_diff_check, GradCheckEntry, GradCheckError, GradCheckReport};
