use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;

/// Largest node set a prior quadrature may build.
pub const MAX_QUADRATURE_NODES: usize = 1 << 24;

const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// A-priori distribution of the common Bloch vector of identically prepared
/// qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum BlochPrior {
    /// Uniform on the unit sphere (pure states).
    UniformSphere,
    /// Uniform in the unit ball.
    UniformBall,
    Tabulated(TabulatedPrior),
}

/// Support of a gridded density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// Unit sphere; density is per unit area.
    Surface,
    /// Unit ball; density is per unit volume.
    Ball,
}

/// Cell-centred `(cos θ, azimuth, radius)` product grid.
///
/// `cos θ` spans `[-1, 1]`, azimuth `[0, 2π)` and radius `[0, 1]`; for
/// [`Support::Surface`] the radius is fixed at 1 and `n_radius` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericalGrid {
    pub support: Support,
    pub n_cos: usize,
    pub n_azimuth: usize,
    #[serde(default = "one")]
    pub n_radius: usize,
}

fn one() -> usize {
    1
}

/// A grid cell: its centre and its area (surface) or volume (ball).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub cos_theta: f64,
    pub azimuth: f64,
    pub radius: f64,
    pub point: BlochVector,
    pub measure: f64,
}

impl SphericalGrid {
    pub fn surface(n_cos: usize, n_azimuth: usize) -> Self {
        Self { support: Support::Surface, n_cos, n_azimuth, n_radius: 1 }
    }

    pub fn ball(n_cos: usize, n_azimuth: usize, n_radius: usize) -> Self {
        Self { support: Support::Ball, n_cos, n_azimuth, n_radius }
    }

    fn radial_count(&self) -> usize {
        match self.support {
            Support::Surface => 1,
            Support::Ball => self.n_radius,
        }
    }

    pub fn len(&self) -> usize {
        self.n_cos * self.n_azimuth * self.radial_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.n_cos == 0 || self.n_azimuth == 0 || self.radial_count() == 0 {
            return Err(Error::InvalidParameter(format!("empty spherical grid {self:?}")));
        }
        if self.len() > MAX_QUADRATURE_NODES {
            return Err(Error::Resource(format!(
                "spherical grid with {} cells exceeds {MAX_QUADRATURE_NODES}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Cells in `(cos θ, azimuth, radius)` row-major order.
    pub fn cells(&self) -> Result<Vec<GridCell>> {
        self.validate()?;
        let d_cos = 2.0 / self.n_cos as f64;
        let d_az = TAU / self.n_azimuth as f64;
        let n_r = self.radial_count();
        let d_r = 1.0 / n_r as f64;
        let mut cells = Vec::with_capacity(self.len());
        for i in 0..self.n_cos {
            let cos_theta = -1.0 + (i as f64 + 0.5) * d_cos;
            for j in 0..self.n_azimuth {
                let azimuth = (j as f64 + 0.5) * d_az;
                for k in 0..n_r {
                    let (radius, measure) = match self.support {
                        Support::Surface => (1.0, d_cos * d_az),
                        Support::Ball => {
                            let lo = k as f64 * d_r;
                            let hi = lo + d_r;
                            // exact shell volume of the cell
                            (lo + 0.5 * d_r, d_cos * d_az * (hi.powi(3) - lo.powi(3)) / 3.0)
                        }
                    };
                    cells.push(GridCell {
                        cos_theta,
                        azimuth,
                        radius,
                        point: BlochVector::from_spherical(radius, cos_theta, azimuth),
                        measure,
                    });
                }
            }
        }
        Ok(cells)
    }
}

/// Discrete prior: probability masses at Bloch vectors.
///
/// Each point also carries the measure of the cell it represents, so that
/// densities can be recovered (`mass / measure`); point masses built with
/// [`TabulatedPrior::from_points`] have unit measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPrior {
    points: Vec<BlochVector>,
    masses: Vec<f64>,
    measures: Vec<f64>,
}

impl TabulatedPrior {
    /// Point masses; the masses must be non-negative and sum to 1 within 1e-8.
    pub fn from_points(points: Vec<(BlochVector, f64)>) -> Result<Self> {
        let measures = vec![1.0; points.len()];
        let (points, masses) = points.into_iter().unzip();
        Self::build(points, masses, measures)
    }

    /// Density values on the cells of `grid` (row-major, see
    /// [`SphericalGrid::cells`]); the midpoint-rule integral must be 1
    /// within 1e-8.
    pub fn from_grid_values(grid: SphericalGrid, density: &[f64]) -> Result<Self> {
        let cells = grid.cells()?;
        if cells.len() != density.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} cells but {} density values were given",
                cells.len(),
                density.len()
            )));
        }
        let masses = cells.iter().zip(density).map(|(c, d)| c.measure * d).collect();
        Self::build(
            cells.iter().map(|c| c.point).collect(),
            masses,
            cells.iter().map(|c| c.measure).collect(),
        )
    }

    /// Tabulates `density` at the cell centres of `grid` and rescales the
    /// result to unit mass.
    pub fn from_density_fn(grid: SphericalGrid, density: impl Fn(BlochVector) -> f64) -> Result<Self> {
        let cells = grid.cells()?;
        let mut masses: Vec<f64> = cells.iter().map(|c| c.measure * density(c.point)).collect();
        let total: f64 = masses.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidParameter(format!("density has total mass {total}")));
        }
        masses.iter_mut().for_each(|m| *m /= total);
        Self::build(
            cells.iter().map(|c| c.point).collect(),
            masses,
            cells.iter().map(|c| c.measure).collect(),
        )
    }

    fn build(points: Vec<BlochVector>, masses: Vec<f64>, measures: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("tabulated prior has no points".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_physical()) {
            return Err(Error::InvalidParameter(format!("Bloch vector {p:?} lies outside the unit ball")));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::InvalidParameter(format!("prior mass {m} is not a finite non-negative number")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidParameter(format!("prior integrates to {total}, expected 1")));
        }
        Ok(Self { points, masses, measures })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(point, mass, measure)` triples.
    pub fn iter(&self) -> impl Iterator<Item = (BlochVector, f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.masses)
            .zip(&self.measures)
            .map(|((p, m), v)| (*p, *m, *v))
    }
}

fn gl_order_for_degree(degree: usize) -> usize {
    (degree + 2).div_ceil(2).max(2)
}

impl BlochPrior {
    /// Weighted nodes `(v, w)` with `Σ w·f(v) = ∫ Π(v) f(v) d³v` exactly for
    /// every polynomial `f` of total degree ≤ `degree` in the components.
    ///
    /// Sphere: Gauss-Legendre in `cos θ` times a trapezoid in azimuth with
    /// `degree + 1` nodes (exact for trigonometric polynomials of lower
    /// degree; odd powers of `sin θ` cancel in azimuth). Ball: additionally
    /// Gauss-Legendre in the radius with weight `3r²`. Tabulated priors
    /// return their own points.
    pub fn quadrature(&self, degree: usize) -> Result<Vec<(BlochVector, f64)>> {
        let n_az = degree + 1;
        let cos_rule = GaussLegendre::cached(gl_order_for_degree(degree))?;
        match self {
            BlochPrior::Tabulated(t) => Ok(t.iter().map(|(p, m, _)| (p, m)).collect()),
            BlochPrior::UniformSphere => {
                check_node_count(cos_rule.order() * n_az)?;
                let mut nodes = Vec::with_capacity(cos_rule.order() * n_az);
                for (z, wz) in cos_rule.iter() {
                    for j in 0..n_az {
                        let az = TAU * j as f64 / n_az as f64;
                        nodes.push((BlochVector::from_spherical(1.0, z, az), 0.5 * wz / n_az as f64));
                    }
                }
                Ok(nodes)
            }
            BlochPrior::UniformBall => {
                let radial_rule = GaussLegendre::cached(gl_order_for_degree(degree + 2))?;
                check_node_count(cos_rule.order() * n_az * radial_rule.order())?;
                let mut nodes = Vec::new();
                for (t, wt) in radial_rule.iter() {
                    let r = 0.5 * (1.0 + t);
                    let wr = 0.5 * wt * 3.0 * r * r;
                    for (z, wz) in cos_rule.iter() {
                        for j in 0..n_az {
                            let az = TAU * j as f64 / n_az as f64;
                            nodes.push((
                                BlochVector::from_spherical(r, z, az),
                                wr * 0.5 * wz / n_az as f64,
                            ));
                        }
                    }
                }
                Ok(nodes)
            }
        }
    }

    /// Nodes for the marginal distribution of one Bloch component, exact for
    /// polynomials of degree ≤ `degree` in that component.
    ///
    /// Both built-in priors are rotation invariant, so the marginal is the
    /// same for every axis: uniform `1/2` on the sphere and `3(1 − u²)/4` in
    /// the ball. Tabulated priors have no closed-form marginal.
    pub fn component_marginal_quadrature(&self, degree: usize) -> Result<Option<Vec<(f64, f64)>>> {
        match self {
            BlochPrior::UniformSphere => {
                let rule = GaussLegendre::cached(gl_order_for_degree(degree))?;
                Ok(Some(rule.iter().map(|(u, w)| (u, 0.5 * w)).collect()))
            }
            BlochPrior::UniformBall => {
                let rule = GaussLegendre::cached(gl_order_for_degree(degree + 2))?;
                Ok(Some(rule.iter().map(|(u, w)| (u, 0.75 * w * (1.0 - u * u))).collect()))
            }
            BlochPrior::Tabulated(_) => Ok(None),
        }
    }

    /// Prior density at a cell with the given measure, or `None` for
    /// tabulated priors (whose densities are stored per point).
    pub(crate) fn uniform_density(&self) -> Option<f64> {
        match self {
            BlochPrior::UniformSphere => Some(1.0 / (4.0 * PI)),
            BlochPrior::UniformBall => Some(3.0 / (4.0 * PI)),
            BlochPrior::Tabulated(_) => None,
        }
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n > MAX_QUADRATURE_NODES {
        return Err(Error::Resource(format!(
            "prior quadrature needs {n} nodes, limit is {MAX_QUADRATURE_NODES}"
        )));
    }
    Ok(())
}

/// Serializable description of a [`BlochPrior`].
///
/// ```json
/// {"kind": "uniform-sphere"}
/// {"kind": "tabulated", "grid": {"support": "ball", "n_cos": 8, "n_azimuth": 8, "n_radius": 4}, "density": [...]}
/// {"kind": "points", "points": [{"x": 1.0, "y": 0.0, "z": 0.0, "mass": 1.0}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorSpec {
    UniformSphere {},
    UniformBall {},
    Tabulated { grid: SphericalGrid, density: Vec<f64> },
    Points { points: Vec<PointMass> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMass {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub mass: f64,
}

impl TryFrom<PriorSpec> for BlochPrior {
    type Error = Error;

    fn try_from(spec: PriorSpec) -> Result<Self> {
        Ok(match spec {
            PriorSpec::UniformSphere {} => BlochPrior::UniformSphere,
            PriorSpec::UniformBall {} => BlochPrior::UniformBall,
            PriorSpec::Tabulated { grid, density } => {
                BlochPrior::Tabulated(TabulatedPrior::from_grid_values(grid, &density)?)
            }
            PriorSpec::Points { points } => BlochPrior::Tabulated(TabulatedPrior::from_points(
                points.into_iter().map(|p| (BlochVector::new(p.x, p.y, p.z), p.mass)).collect(),
            )?),
        })
    }
}
