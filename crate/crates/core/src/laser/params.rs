use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output port of the splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    C,
    D,
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c" => Ok(Detector::C),
            "d" => Ok(Detector::D),
            other => Err(Error::Input(format!("unknown detector {other:?} (expected c or d)"))),
        }
    }
}

/// Input beam, for direct detection without the splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Beam {
    A,
    B,
}

impl FromStr for Beam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Beam::A),
            "b" => Ok(Beam::B),
            other => Err(Error::Input(format!("unknown beam {other:?} (expected a or b)"))),
        }
    }
}

/// Beam amplitudes, detector constant and frequency difference.
///
/// `eta` is the same at both detectors and absorbs the length of the
/// detection window. `delta_omega` is in radians per unit of event time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct BeamParams {
    a: f64,
    b: f64,
    eta: f64,
    delta_omega: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    a: f64,
    b: f64,
    eta: f64,
    #[serde(default)]
    delta_omega: f64,
}

impl TryFrom<RawParams> for BeamParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.a, r.b, r.eta, r.delta_omega)
    }
}

impl BeamParams {
    pub fn new(a: f64, b: f64, eta: f64, delta_omega: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter(format!("amplitudes must be positive, got a = {a}, b = {b}")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
        }
        if !delta_omega.is_finite() {
            return Err(Error::InvalidParameter(format!("delta_omega must be finite, got {delta_omega}")));
        }
        Ok(Self { a, b, eta, delta_omega })
    }

    /// Equal-frequency beams.
    pub fn equal_frequency(a: f64, b: f64, eta: f64) -> Result<Self> {
        Self::new(a, b, eta, 0.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn with_delta_omega(self, delta_omega: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.eta, delta_omega)
    }

    /// `(a² + b²)/2`.
    pub fn mean_intensity(&self) -> f64 {
        0.5 * (self.a * self.a + self.b * self.b)
    }

    /// `2ab/(a² + b²)`, the largest attainable `|M_c − M_d|/(M_c + M_d)`.
    pub fn visibility(&self) -> f64 {
        2.0 * self.a * self.b / (self.a * self.a + self.b * self.b)
    }

    /// Intensity at `detector` for phase difference `phi` at time `t`.
    ///
    /// Written as `(a−b)²/2 + 2ab·cos²(ψ/2)` (port c) and
    /// `(a−b)²/2 + 2ab·sin²(ψ/2)` (port d) with `ψ = φ − Δω t`, which avoids
    /// cancellation near the dark fringe.
    pub fn intensity(&self, detector: Detector, phi: f64, t: f64) -> f64 {
        let half = 0.5 * (phi - self.delta_omega * t);
        let floor = 0.5 * (self.a - self.b).powi(2);
        let fringe = match detector {
            Detector::C => half.cos().powi(2),
            Detector::D => half.sin().powi(2),
        };
        floor + 2.0 * self.a * self.b * fringe
    }

    /// Mean photon count `η·I` in one detection window.
    pub fn rate(&self, detector: Detector, phi: f64, t: f64) -> f64 {
        self.eta * self.intensity(detector, phi, t)
    }

    /// Largest possible mean count at either detector, `η((a²+b²)/2 + ab)`.
    pub fn max_rate(&self) -> f64 {
        self.eta * (self.mean_intensity() + self.a * self.b)
    }

    /// Mean count when detecting a beam directly: `η a²` or `η b²`.
    pub fn direct_rate(&self, beam: Beam) -> f64 {
        match beam {
            Beam::A => self.eta * self.a * self.a,
            Beam::B => self.eta * self.b * self.b,
        }
    }

    /// Default truncation `⌈μ + 10√μ + 20⌉` for count distributions with
    /// dominating rate `μ`.
    pub fn default_n_max(mean: f64) -> usize {
        (mean + 10.0 * mean.sqrt() + 20.0).ceil() as usize
    }
}
