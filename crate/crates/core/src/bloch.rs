//! Pauli axes, measurement signs and Bloch vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::Input(format!("unknown axis {other:?}"))),
        }
    }
}

/// Outcome of a Pauli measurement, `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Bloch vector of a qubit state `(1 + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point on the sphere of radius `radius` at polar cosine `cos_theta`
    /// and azimuth `azimuth` (polar axis along z).
    pub fn from_spherical(radius: f64, cos_theta: f64, azimuth: f64) -> Self {
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        Self {
            x: radius * sin_theta * azimuth.cos(),
            y: radius * sin_theta * azimuth.sin(),
            z: radius * cos_theta,
        }
    }

    pub fn component(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `|r| ≤ 1` up to rounding.
    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + 1e-12
    }

    /// Born probability `(1 ± r_axis)/2` of the outcome `sign` along `axis`.
    pub fn outcome_probability(&self, axis: Axis, sign: Sign) -> f64 {
        0.5 * (1.0 + sign.value() * self.component(axis))
    }

    /// `ln((1 ± r_axis)/2)`, accurate near both poles.
    pub fn log_outcome_probability(&self, axis: Axis, sign: Sign) -> f64 {
        (sign.value() * self.component(axis)).ln_1p() - std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_points_are_on_the_sphere() {
        let v = BlochVector::from_spherical(1.0, 0.3, 2.0);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(v.z, 0.3);
    }

    #[test]
    fn born_probabilities() {
        let v = BlochVector::new(1.0, 0.0, 0.0);
        assert_eq!(v.outcome_probability(Axis::X, Sign::Plus), 1.0);
        assert_eq!(v.outcome_probability(Axis::X, Sign::Minus), 0.0);
        assert_eq!(v.log_outcome_probability(Axis::X, Sign::Minus), f64::NEG_INFINITY);
        assert_eq!(v.outcome_probability(Axis::Z, Sign::Minus), 0.5);
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("Y".parse::<Axis>().unwrap(), Axis::Y);
        assert!("w".parse::<Axis>().is_err());
    }
}
