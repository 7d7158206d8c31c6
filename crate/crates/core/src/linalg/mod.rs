//! Dense complex linear algebra for interferometer models.

mod fock;
mod haar;
pub mod io;
mod matrix;
mod occupation;
mod svd;

pub use fock::transition_submatrix;
pub use haar::{haar_random_unitary, qr_decompose};
pub use matrix::{check_unitary, ComplexMatrix};
pub use occupation::{all_patterns, binomial, collision_free_patterns, ModeOccupation};
pub use svd::{schmidt_purity_by_trace, svd_singular_values};

/// Default tolerance for unitarity checks.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Relative tolerance on `sum s^2 == ||A||_F^2`.
pub const SVD_TOL: f64 = 1e-9;
