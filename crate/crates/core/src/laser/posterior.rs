use serde::Serialize;

use super::history::{DetectionEvent, DetectionHistory};
use super::params::{BeamParams, Detector};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_log_integrate, log_sum_exp, PeriodicGrid};

/// `Σ_i m_c ln I_c(φ, t_i) + m_d ln I_d(φ, t_i)`; zero counts contribute
/// nothing even where the intensity vanishes.
pub(crate) fn event_log_likelihood(event: &DetectionEvent, params: &BeamParams, phi: f64) -> f64 {
    let mut acc = 0.0;
    for (detector, m) in [(Detector::C, event.m_c), (Detector::D, event.m_d)] {
        if m == 0 {
            continue;
        }
        let i = params.intensity(detector, phi, event.time);
        if i == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += m as f64 * i.ln();
    }
    acc
}

pub(crate) fn history_log_likelihood(history: &DetectionHistory, params: &BeamParams, phi: f64) -> f64 {
    let mut acc = 0.0;
    for event in history.events() {
        let l = event_log_likelihood(event, params, phi);
        if l == f64::NEG_INFINITY {
            return l;
        }
        acc += l;
    }
    acc
}

fn impossible(err: Error) -> Error {
    match err {
        Error::ZeroIntegrand => {
            Error::ImpossibleConditioning("detection history has zero likelihood at every phase".into())
        }
        other => other,
    }
}

/// Normalized density of the phase difference on a periodic grid.
///
/// `density[k]` is the value at `grid.node(k)`; the trapezoid sum of the
/// density is 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePosterior {
    #[serde(rename = "node_count")]
    grid: PeriodicGrid,
    phi: Vec<f64>,
    density: Vec<f64>,
}

impl PhasePosterior {
    /// The uniform prior `1/(2π)`.
    pub fn uniform(grid: PeriodicGrid) -> Self {
        let n = grid.node_count();
        Self {
            grid,
            phi: grid.nodes().collect(),
            density: vec![1.0 / std::f64::consts::TAU; n],
        }
    }

    /// Normalizes `exp(log_values)` on `grid`.
    fn from_log_values(grid: PeriodicGrid, log_values: Vec<f64>) -> Result<Self> {
        if log_values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidParameter("posterior log-density is not finite".into()));
        }
        let log_norm = log_sum_exp(&log_values) + grid.spacing().ln();
        if log_norm == f64::NEG_INFINITY {
            return Err(impossible(Error::ZeroIntegrand));
        }
        let density = log_values.iter().map(|v| (v - log_norm).exp()).collect();
        Ok(Self { grid, phi: grid.nodes().collect(), density })
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Angle of node `k` in `[0, 2π)`.
    pub fn angle(&self, k: usize) -> f64 {
        self.phi[k]
    }

    /// `(φ_k, density_k)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.phi.iter().copied().zip(self.density.iter().copied())
    }

    /// Trapezoid integral of `density · f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.spacing();
        (0..self.density.len())
            .map(|k| self.density[k] * f(self.grid.signed_node(k)))
            .sum::<f64>()
            * h
    }

    /// Posterior after one more event, on the same grid.
    pub fn update(&self, event: &DetectionEvent, params: &BeamParams) -> Result<Self> {
        let log_values = (0..self.density.len())
            .map(|k| self.density[k].ln() + event_log_likelihood(event, params, self.grid.signed_node(k)))
            .collect();
        Self::from_log_values(self.grid, log_values)
    }

    /// Posterior mass within `half_width` (circular distance) of `center`.
    pub fn mass_near(&self, center: f64, half_width: f64) -> f64 {
        let h = self.grid.spacing();
        self.iter()
            .filter(|(phi, _)| {
                let d = (phi - center).rem_euclid(std::f64::consts::TAU);
                d.min(std::f64::consts::TAU - d) <= half_width
            })
            .map(|(_, d)| d * h)
            .sum()
    }

    /// `max_k |p(φ_k) − p(−φ_k)|` divided by the peak density.
    pub fn max_asymmetry(&self) -> f64 {
        let peak = self.density.iter().copied().fold(0.0, f64::max);
        let worst = (0..self.density.len())
            .map(|k| (self.density[k] - self.density[self.grid.mirror_index(k)]).abs())
            .fold(0.0, f64::max);
        worst / peak
    }

    /// Posterior mean of `cos φ`.
    pub fn mean_cos(&self) -> f64 {
        self.integrate(f64::cos)
    }
}

/// Posterior over the phase difference after `history`, starting from a
/// uniform prior.
///
/// The grid starts at 2048 nodes and doubles until the normalization
/// integral changes by at most 1e-10 relative; all products are formed in
/// log space.
pub fn phase_posterior(history: &DetectionHistory, params: &BeamParams) -> Result<PhasePosterior> {
    if history.is_empty() {
        return Err(Error::Precondition("phase posterior needs at least one detection event".into()));
    }
    let log_f = |phi: f64| history_log_likelihood(history, params, phi);
    let converged = adaptive_log_integrate(&log_f, PeriodicGrid::default()).map_err(impossible)?;
    phase_posterior_on_grid(history, params, converged.grid)
}

/// As [`phase_posterior`] on a fixed grid, without refinement. An empty
/// history gives the uniform density.
pub fn phase_posterior_on_grid(
    history: &DetectionHistory,
    params: &BeamParams,
    grid: PeriodicGrid,
) -> Result<PhasePosterior> {
    if history.is_empty() {
        return Ok(PhasePosterior::uniform(grid));
    }
    let log_values = (0..grid.node_count())
        .map(|k| history_log_likelihood(history, params, grid.signed_node(k)))
        .collect();
    PhasePosterior::from_log_values(grid, log_values)
}
