//! Forward simulation of the hidden state and the measurement records, and
//! rejection estimates of conditional probabilities.
//!
//! Every random draw comes from a [`SeededStream`], so a run is reproduced
//! exactly by its seed whatever the number of threads.

mod estimate;
mod sample;
mod stream;

pub use estimate::{
    estimate_conditional, estimate_ratio, EmpiricalEstimate, LaserOutcome, Scenario, MIN_REPLICAS,
    SHARD_SIZE,
};
pub use sample::{
    sample_binomial, sample_bloch, sample_phase, sample_poisson, simulate_detections, simulate_spin_record, BlochSampler,
};
pub use stream::SeededStream;
