use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{log_likelihood, BlochPrior, SphericalGrid, SpinRecord};
use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::numerics::log_sum_exp;

/// Tabulation grid for posterior densities over the built-in priors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosteriorResolution {
    pub n_cos: usize,
    pub n_azimuth: usize,
    /// Radial cells, used only for the uniform-ball prior.
    pub n_radius: usize,
}

impl Default for PosteriorResolution {
    fn default() -> Self {
        Self { n_cos: 128, n_azimuth: 128, n_radius: 128 }
    }
}

/// One cell of a tabulated posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCell {
    pub point: BlochVector,
    /// Posterior probability of the cell.
    pub mass: f64,
    /// `mass / measure`: per unit area on the sphere, per unit volume in the
    /// ball, per point for point-mass priors.
    pub density: f64,
}

/// Posterior over Bloch vectors, normalized to unit total mass on its cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochDensity {
    pub cells: Vec<BlochCell>,
}

impl BlochDensity {
    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|c| c.mass).sum()
    }

    /// Posterior probability of the region selected by `inside`.
    pub fn mass_where(&self, inside: impl Fn(&BlochVector) -> bool) -> f64 {
        self.cells.iter().filter(|c| inside(&c.point)).map(|c| c.mass).sum()
    }

    /// Posterior mean Bloch vector.
    pub fn mean(&self) -> BlochVector {
        self.cells.iter().fold(BlochVector::default(), |acc, c| {
            BlochVector::new(acc.x + c.mass * c.point.x, acc.y + c.mass * c.point.y, acc.z + c.mass * c.point.z)
        })
    }
}

/// Posterior density `∝ Π(r)·L_past(r)` tabulated at cell centres.
///
/// Built-in priors are tabulated on a cell-centred `(cos θ, azimuth)` grid
/// (plus radius for the ball) of the given resolution; tabulated priors use
/// their own points. Midpoint tabulation resolves posteriors whose width is
/// several cells; sharper posteriors need a finer resolution.
pub fn posterior_bloch_density(
    past: &SpinRecord,
    prior: &BlochPrior,
    resolution: PosteriorResolution,
) -> Result<BlochDensity> {
    // (point, log prior mass, measure)
    let support: Vec<(BlochVector, f64, f64)> = match prior {
        BlochPrior::Tabulated(t) => t.iter().map(|(p, m, v)| (p, m.ln(), v)).collect(),
        BlochPrior::UniformSphere | BlochPrior::UniformBall => {
            let grid = match prior {
                BlochPrior::UniformSphere => SphericalGrid::surface(resolution.n_cos, resolution.n_azimuth),
                _ => SphericalGrid::ball(resolution.n_cos, resolution.n_azimuth, resolution.n_radius),
            };
            let density = prior.uniform_density().expect("built-in prior");
            grid.cells()?
                .into_iter()
                .map(|c| (c.point, (density * c.measure).ln(), c.measure))
                .collect()
        }
    };
    let log_weights: Vec<f64> = support
        .par_iter()
        .map(|(p, log_mass, _)| {
            if *log_mass == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                log_mass + log_likelihood(past, p)
            }
        })
        .collect();
    let log_norm = log_sum_exp(&log_weights);
    if log_norm == f64::NEG_INFINITY {
        return Err(Error::ImpossibleConditioning(format!(
            "past record {past:?} has zero prior probability"
        )));
    }
    let cells = support
        .iter()
        .zip(&log_weights)
        .map(|((point, _, measure), lw)| {
            let mass = (lw - log_norm).exp();
            BlochCell { point: *point, mass, density: mass / measure }
        })
        .collect();
    Ok(BlochDensity { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::Axis;
    use crate::spin::TabulatedPrior;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn small() -> PosteriorResolution {
        PosteriorResolution { n_cos: 32, n_azimuth: 64, n_radius: 16 }
    }

    #[test]
    fn empty_past_gives_uniform_density() {
        let post = posterior_bloch_density(&SpinRecord::new(), &BlochPrior::UniformSphere, small()).unwrap();
        assert_relative_eq!(post.total_mass(), 1.0, max_relative = 1e-12);
        for c in &post.cells {
            assert_relative_eq!(c.density, 1.0 / (4.0 * PI), max_relative = 1e-12);
        }
    }

    #[test]
    fn concentrates_after_many_plus_outcomes() {
        // exact mass of {x > 0.9} is 1 − 0.95^101 ≈ 0.99438
        let past = SpinRecord::single_axis(Axis::X, 100, 0);
        let res = PosteriorResolution { n_cos: 256, n_azimuth: 512, n_radius: 1 };
        let post = posterior_bloch_density(&past, &BlochPrior::UniformSphere, res).unwrap();
        let mass = post.mass_where(|v| v.x > 0.9);
        assert!(mass > 0.99, "mass {mass}");
        assert!((mass - 0.994375497).abs() < 2e-3, "mass {mass}");
    }

    #[test]
    fn balanced_record_is_mirror_symmetric() {
        let past = SpinRecord::single_axis(Axis::X, 7, 7);
        let post = posterior_bloch_density(&past, &BlochPrior::UniformBall, small()).unwrap();
        assert!(post.mean().x.abs() < 1e-12);
        let plus = post.mass_where(|v| v.x > 0.0);
        let minus = post.mass_where(|v| v.x < 0.0);
        assert_relative_eq!(plus, minus, max_relative = 1e-10);
    }

    #[test]
    fn impossible_past_is_an_error() {
        let prior = BlochPrior::Tabulated(
            TabulatedPrior::from_points(vec![(BlochVector::new(0.0, 0.0, 1.0), 1.0)]).unwrap(),
        );
        let past = SpinRecord::single_axis(Axis::Z, 0, 1);
        assert!(matches!(
            posterior_bloch_density(&past, &prior, small()),
            Err(Error::ImpossibleConditioning(_))
        ));
    }
}
