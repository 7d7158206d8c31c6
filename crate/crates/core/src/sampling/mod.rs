//! Boson-sampling engines.
//!
//! Exact output distributions come from permanents of transition
//! sub-matrices; samplers draw from them by inverse CDF. The scattershot
//! driver fires a bank of heralded sources pulse by pulse, routes the heralded
//! photons through the interferometer and keeps the events whose detected
//! photon number matches the number of heralds.

mod distribution;
pub mod log;
mod rates;
mod scattershot;

pub use distribution::{
    distinguishable_distribution, exact_distribution, sample_outputs, OutcomeDistribution, OutcomeSampler,
    ENUMERATION_MAX_OUTCOMES, ENUMERATION_MAX_PHOTONS, NORMALIZATION_TOL,
};
pub use rates::{expected_rate, model_retained_rate, no_collision_inputs};
pub use scattershot::{scattershot_run, standard_run, RateReport, SampleRecord, ScattershotOptions, ScattershotRun};
