use serde::Serialize;

use super::history::DetectionHistory;
use super::params::{Beam, BeamParams, Detector};
use super::posterior::{phase_posterior, phase_posterior_on_grid, PhasePosterior};
use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_log_integrate, log_factorial, CompensatedSum, poisson_tail, PeriodicGrid, CONVERGENCE_TOLERANCE, MAX_NODE_COUNT,
};

/// Probabilities of counts `0..=n_max` and a bound on the mass beyond.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    pub probabilities: Vec<f64>,
    pub tail_bound: f64,
}

impl CountDistribution {
    fn poisson(mean: f64, n_max: usize) -> Self {
        let probabilities = pmf_row(mean, n_max);
        Self { probabilities, tail_bound: poisson_tail(mean, n_max as u64) }
    }

    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// Sum of the tabulated probabilities.
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Mean of the tabulated part.
    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// `Poisson(N; mean)` for `N = 0..=n_max`.
///
/// Below the `exp` underflow threshold the row comes from the product
/// recurrence, which keeps the relative error near `N ε`; the log-space sum
/// is only used for very large means.
fn pmf_row(mean: f64, n_max: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n_max + 1);
    if mean == 0.0 {
        row.push(1.0);
        row.resize(n_max + 1, 0.0);
        return row;
    }
    if mean < 700.0 {
        let mut p = (-mean).exp();
        row.push(p);
        for n in 1..=n_max {
            p *= mean / n as f64;
            row.push(p);
        }
    } else {
        let ln_mean = mean.ln();
        let mut lp = -mean;
        row.push(lp.exp());
        for n in 1..=n_max {
            lp += ln_mean - (n as f64).ln();
            row.push(lp.exp());
        }
    }
    row
}

/// Posterior-predictive count statistics for a fixed history.
///
/// Predictions are trapezoid sums of `posterior · Poisson` on a grid that
/// starts at the posterior's grid and doubles until the count distributions
/// of both detectors change by at most 1e-10 relative.
#[derive(Debug, Clone)]
pub struct PhasePredictor {
    history: DetectionHistory,
    params: BeamParams,
    posterior: PhasePosterior,
}

impl PhasePredictor {
    /// An empty history uses the uniform prior.
    pub fn new(history: DetectionHistory, params: BeamParams) -> Result<Self> {
        let posterior = if history.is_empty() {
            PhasePosterior::uniform(PeriodicGrid::default())
        } else {
            phase_posterior(&history, &params)?
        };
        Ok(Self { history, params, posterior })
    }

    pub fn posterior(&self) -> &PhasePosterior {
        &self.posterior
    }

    pub fn params(&self) -> &BeamParams {
        &self.params
    }

    pub fn default_n_max(&self) -> usize {
        BeamParams::default_n_max(self.params.max_rate())
    }

    fn posterior_on(&self, grid: PeriodicGrid) -> Result<PhasePosterior> {
        if grid == self.posterior.grid() {
            return Ok(self.posterior.clone());
        }
        phase_posterior_on_grid(&self.history, &self.params, grid)
    }

    fn counts_on(&self, post: &PhasePosterior, detector: Detector, t: f64, n_max: usize) -> Vec<f64> {
        let grid = post.grid();
        let h = grid.spacing();
        let mut acc = vec![CompensatedSum::default(); n_max + 1];
        for (k, &d) in post.density().iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let row = pmf_row(self.params.rate(detector, grid.signed_node(k), t), n_max);
            for (a, p) in acc.iter_mut().zip(row) {
                a.add(d * p);
            }
        }
        acc.iter().map(|a| a.value() * h).collect()
    }

    /// Coarsest grid on which the predictions at time `t` are converged.
    fn prediction_grid(&self, t: f64) -> Result<PeriodicGrid> {
        let n_max = self.default_n_max();
        let mut grid = self.posterior.grid();
        let mut coarse = self.posterior_on(grid)?;
        let mut last_change = f64::INFINITY;
        while 2 * grid.node_count() <= MAX_NODE_COUNT {
            let fine_grid = grid.refined()?;
            let fine = self.posterior_on(fine_grid)?;
            let mut change: f64 = 0.0;
            let mut converged = true;
            for detector in [Detector::C, Detector::D] {
                let x = self.counts_on(&coarse, detector, t, n_max);
                let y = self.counts_on(&fine, detector, t, n_max);
                for (x, y) in x.iter().zip(&y) {
                    let diff = (x - y).abs();
                    // entries below 1e-15 are only held to an absolute standard
                    converged &= diff <= CONVERGENCE_TOLERANCE * y.abs() + 1e-15;
                    if *y > 0.0 {
                        change = change.max(diff / y);
                    }
                }
            }
            if converged {
                return Ok(grid);
            }
            last_change = change;
            grid = fine_grid;
            coarse = fine;
        }
        Err(Error::NotConverged { max_nodes: MAX_NODE_COUNT, relative_change: last_change })
    }

    /// `P(N | history)` at `detector` and time `t` for `N = 0..=n_max`,
    /// with `n_max` defaulting to `⌈μ + 10√μ + 20⌉` at the largest rate `μ`.
    ///
    /// The tail bound is the Poisson tail at the largest possible rate, which
    /// dominates the tail at every phase.
    pub fn counts(&self, detector: Detector, t: f64, n_max: Option<usize>) -> Result<CountDistribution> {
        let n_max = n_max.unwrap_or_else(|| self.default_n_max());
        let post = self.posterior_on(self.prediction_grid(t)?)?;
        Ok(CountDistribution {
            probabilities: self.counts_on(&post, detector, t, n_max),
            tail_bound: poisson_tail(self.params.max_rate(), n_max as u64),
        })
    }

    /// `P(N_c = n_c, N_d = n_d | history)` at time `t`.
    pub fn joint(&self, n_c: u64, n_d: u64, t: f64) -> Result<f64> {
        let post = self.posterior_on(self.prediction_grid(t)?)?;
        let grid = post.grid();
        let p = &self.params;
        let sum: f64 = post
            .density()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let phi = grid.signed_node(k);
                let pc = pmf_row(p.rate(Detector::C, phi, t), n_c as usize)[n_c as usize];
                let pd = pmf_row(p.rate(Detector::D, phi, t), n_d as usize)[n_d as usize];
                d * pc * pd
            })
            .sum::<CompensatedSum>()
            .value();
        Ok(sum * grid.spacing())
    }
}

/// `n ln x`, with `0^0 = 1`.
fn log_power(x: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * x.ln()
    }
}

/// Posterior-predictive count distribution at one detector.
pub fn predict_counts(
    detector: Detector,
    at_time: f64,
    history: &DetectionHistory,
    params: &BeamParams,
    n_max: Option<usize>,
) -> Result<CountDistribution> {
    PhasePredictor::new(history.clone(), *params)?.counts(detector, at_time, n_max)
}

/// Posterior-predictive joint probability of `(n_c, n_d)`.
pub fn predict_joint(
    n_c: u64,
    n_d: u64,
    at_time: f64,
    history: &DetectionHistory,
    params: &BeamParams,
) -> Result<f64> {
    PhasePredictor::new(history.clone(), *params)?.joint(n_c, n_d, at_time)
}

/// First-order probabilities `(p_cc, p_dc)` of a single count at `c` or at
/// `d` right after a single count at `c`.
///
/// Valid when `η(a²+b²)/2 ≪ 1`; the formulas are returned regardless.
pub fn low_intensity_pair(params: &BeamParams) -> (f64, f64) {
    let (a2, b2) = (params.a().powi(2), params.b().powi(2));
    let s = params.mean_intensity();
    let cross = a2 * b2 / (a2 + b2);
    (params.eta() * (s + cross), params.eta() * (s - cross))
}

/// `cos φ0 = ((a²+b²)/(2ab))·(m_c − m_d)/(m_c + m_d)`, the phase a long
/// record locks onto, up to the sign of `φ0`.
///
/// Records whose count asymmetry exceeds the fringe visibility give
/// `|cos φ0| > 1` and are rejected.
pub fn asymptotic_phase(m_c: u64, m_d: u64, params: &BeamParams) -> Result<f64> {
    if m_c + m_d == 0 {
        return Err(Error::Precondition("asymptotic phase needs at least one count".into()));
    }
    let (a, b) = (params.a(), params.b());
    // numerator and denominator are formed separately so that records on the
    // visibility boundary give exactly ±1 when a and b are exact
    let num = (a * a + b * b) * (m_c as f64 - m_d as f64);
    let den = 2.0 * a * b * (m_c + m_d) as f64;
    let cos_phi0 = num / den;
    if cos_phi0.abs() > 1.0 {
        return Err(Error::FringeVisibility { cos_phi0 });
    }
    Ok(cos_phi0)
}

/// `ln P(m_c, m_d)` for a single detection window before any data.
pub fn log_apriori_counts(m_c: u64, m_d: u64, params: &BeamParams) -> Result<f64> {
    let eta = params.eta();
    let prefactor = (m_c + m_d) as f64 * eta.ln() - log_factorial(m_c) - log_factorial(m_d)
        - 2.0 * eta * params.mean_intensity();
    if m_c + m_d == 0 {
        return Ok(prefactor);
    }
    let log_f = |phi: f64| {
        log_power(params.intensity(Detector::C, phi, 0.0), m_c)
            + log_power(params.intensity(Detector::D, phi, 0.0), m_d)
    };
    let integral = adaptive_log_integrate(&log_f, PeriodicGrid::default())?;
    Ok(prefactor + integral.log_value - std::f64::consts::TAU.ln())
}

/// A-priori probability of `(m_c, m_d)` in one detection window.
pub fn apriori_counts(m_c: u64, m_d: u64, params: &BeamParams) -> Result<f64> {
    log_apriori_counts(m_c, m_d, params).map(f64::exp)
}

/// Counts when detecting one beam directly: Poisson with mean `η a²` or `η b²`.
pub fn direct_count_distribution(beam: Beam, params: &BeamParams, n_max: Option<usize>) -> CountDistribution {
    let mean = params.direct_rate(beam);
    CountDistribution::poisson(mean, n_max.unwrap_or_else(|| BeamParams::default_n_max(mean)))
}

/// Poisson counts at the rate fixed by `cos φ0`, the large-record limit of
/// [`predict_counts`].
pub fn locked_phase_counts(
    detector: Detector,
    cos_phi0: f64,
    params: &BeamParams,
    n_max: Option<usize>,
) -> CountDistribution {
    let swing = params.a() * params.b() * cos_phi0;
    let intensity = match detector {
        Detector::C => params.mean_intensity() + swing,
        Detector::D => params.mean_intensity() - swing,
    };
    let mean = params.eta() * intensity.max(0.0);
    CountDistribution::poisson(mean, n_max.unwrap_or_else(|| BeamParams::default_n_max(params.max_rate())))
}
