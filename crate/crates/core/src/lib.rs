//! Simulation and statistical validation for multi-photon experiments built
//! from heralded photon-pair sources.
//!
//! - [`permanent`]: factorial oracle, Gray-code Ryser kernel and a segmented
//!   parallel variant.
//! - [`linalg`]: complex matrices, Haar unitaries, Fock transition
//!   sub-matrices, singular values.
//! - [`sources`]: pair-source statistics, joint spectral purity, two-photon
//!   interference dips.
//! - [`ghz`]: noisy GHZ model, simulated parity measurements, fidelity witness.
//! - [`sampling`]: exact boson-sampling distributions, samplers and the
//!   scattershot protocol.
//! - [`validation`]: similarity, distance and likelihood-ratio discrimination.
//!
//! Numerical kernels are generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix the double-precision instantiation used by the simulators.

pub mod error;
pub mod ghz;
pub mod linalg;
pub mod permanent;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod sources;
pub mod validation;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ModeOccupation};
pub use scalar::Real;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type Matrix64 = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type Distribution64 = sampling::OutcomeDistribution<f64>;
pub type Jsa64 = sources::JointSpectrum<f64>;
pub type GhzModel64 = ghz::GhzModel<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
