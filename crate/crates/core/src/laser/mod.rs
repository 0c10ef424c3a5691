//! Phase-difference inference and photon-count prediction for two coherent
//! beams mixed on a 50/50 splitter.
//!
//! Beams `a` and `b` carry amplitudes `a`, `b` and an unknown phase
//! difference `φ` with a uniform prior. After the splitter, detector `c`
//! sees the intensity `I_c = (a²+b²)/2 + ab·cos(φ − Δω t)` and detector `d`
//! sees `I_d = (a²+b²)/2 − ab·cos(φ − Δω t)`; photon counts in one detection
//! window are Poisson with means `η·I_c` and `η·I_d`.
//!
//! Each [`DetectionEvent`] is one such window. The posterior over `φ` after
//! a [`DetectionHistory`] is
//!
//! ```text
//! P(φ | history) ∝ Π_i I_c(φ, t_i)^{m_c(i)} · I_d(φ, t_i)^{m_d(i)}
//! ```
//!
//! and predictions integrate Poisson probabilities against it.

mod history;
mod params;
mod posterior;
mod predict;

pub use history::{DetectionEvent, DetectionHistory};
pub use params::{Beam, BeamParams, Detector};
pub use posterior::{phase_posterior, phase_posterior_on_grid, PhasePosterior};
pub use predict::{
    apriori_counts, asymptotic_phase, direct_count_distribution, locked_phase_counts,
    log_apriori_counts, low_intensity_pair, predict_counts, predict_joint, CountDistribution,
    PhasePredictor,
};
