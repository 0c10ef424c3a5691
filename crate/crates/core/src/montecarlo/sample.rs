use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::bloch::{Axis, BlochVector};
use crate::error::Result;
use crate::laser::{BeamParams, DetectionEvent, DetectionHistory, Detector};
use crate::numerics::log_factorial;
use crate::spin::{BlochPrior, SpinRecord};

/// Uniform on `[0, 1)` with 53 random bits.
fn uniform(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>()
}

/// Draws Bloch vectors from a prior; tabulated priors are sampled by
/// inverting their cumulative mass.
#[derive(Debug, Clone)]
pub struct BlochSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Sphere,
    Ball,
    Table { points: Vec<BlochVector>, cumulative: Vec<f64> },
}

impl BlochSampler {
    pub fn new(prior: &BlochPrior) -> Self {
        let kind = match prior {
            BlochPrior::UniformSphere => SamplerKind::Sphere,
            BlochPrior::UniformBall => SamplerKind::Ball,
            BlochPrior::Tabulated(t) => {
                let mut acc = 0.0;
                let (points, cumulative) = t
                    .iter()
                    .map(|(p, m, _)| {
                        acc += m;
                        (p, acc)
                    })
                    .unzip();
                SamplerKind::Table { points, cumulative }
            }
        };
        Self { kind }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> BlochVector {
        match &self.kind {
            SamplerKind::Sphere => {
                let z = 2.0 * uniform(rng) - 1.0;
                BlochVector::from_spherical(1.0, z, TAU * uniform(rng))
            }
            SamplerKind::Ball => loop {
                let v = BlochVector::new(
                    2.0 * uniform(rng) - 1.0,
                    2.0 * uniform(rng) - 1.0,
                    2.0 * uniform(rng) - 1.0,
                );
                if v.norm() <= 1.0 {
                    return v;
                }
            },
            SamplerKind::Table { points, cumulative } => {
                let u = uniform(rng) * cumulative[cumulative.len() - 1];
                let k = cumulative.partition_point(|&c| c <= u).min(points.len() - 1);
                points[k]
            }
        }
    }
}

/// One draw from `prior`. Builds a [`BlochSampler`] each call; reuse one for
/// tabulated priors.
pub fn sample_bloch(prior: &BlochPrior, rng: &mut impl Rng) -> BlochVector {
    BlochSampler::new(prior).sample(rng)
}

const PTRS_MIN_MEAN: f64 = 10.0;

/// Poisson variate: sequential inversion below mean 10, Hörmann's PTRS
/// transformed rejection above.
pub fn sample_poisson(mean: f64, rng: &mut impl Rng) -> u64 {
    assert!(mean >= 0.0 && mean.is_finite(), "Poisson mean must be finite and non-negative, got {mean}");
    if mean == 0.0 {
        return 0;
    }
    if mean < PTRS_MIN_MEAN {
        let mut u = uniform(rng);
        let mut k = 0u64;
        let mut p = (-mean).exp();
        while u > p {
            u -= p;
            k += 1;
            p *= mean / k as f64;
            if p == 0.0 {
                // rounding left u above the total mass; redraw
                u = uniform(rng);
                k = 0;
                p = (-mean).exp();
            }
        }
        return k;
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - log_factorial(k as u64) {
            return k as u64;
        }
    }
}

/// Largest expected number of successes per inversion chunk.
const BINOMIAL_CHUNK_MEAN: f64 = 30.0;

/// Binomial variate by inversion.
///
/// Uses `p ≤ 1/2` by symmetry and splits `n` into chunks with mean at most
/// 30 so that `(1 − p)^n` never underflows.
pub fn sample_binomial(n: u64, p: f64, rng: &mut impl Rng) -> u64 {
    assert!((0.0..=1.0).contains(&p), "success probability must lie in [0, 1], got {p}");
    if p > 0.5 {
        return n - sample_binomial(n, 1.0 - p, rng);
    }
    if p == 0.0 || n == 0 {
        return 0;
    }
    let chunk = ((BINOMIAL_CHUNK_MEAN / p).floor() as u64).max(1);
    let mut remaining = n;
    let mut total = 0;
    while remaining > 0 {
        let m = remaining.min(chunk);
        total += binomial_inversion(m, p, rng);
        remaining -= m;
    }
    total
}

fn binomial_inversion(n: u64, p: f64, rng: &mut impl Rng) -> u64 {
    let q = 1.0 - p;
    let s = p / q;
    let a = (n + 1) as f64 * s;
    let r0 = q.powf(n as f64);
    'draw: loop {
        let mut u = uniform(rng);
        let mut r = r0;
        let mut x = 0u64;
        while u > r {
            u -= r;
            x += 1;
            if x > n {
                continue 'draw;
            }
            r *= a / x as f64 - s;
        }
        return x;
    }
}

/// Outcome counts for `plan[axis]` measurements along each axis on qubits
/// with Bloch vector `v`.
pub fn simulate_spin_record(v: &BlochVector, plan: [u64; 3], rng: &mut impl Rng) -> SpinRecord {
    let mut record = SpinRecord::new();
    for axis in Axis::ALL {
        let n = plan[axis.index()];
        let p_plus = (0.5 * (1.0 + v.component(axis))).clamp(0.0, 1.0);
        let plus = sample_binomial(n, p_plus, rng);
        record = record
            .with(axis, crate::bloch::Sign::Plus, plus)
            .with(axis, crate::bloch::Sign::Minus, n - plus);
    }
    record
}

/// Poisson counts at both detectors at each time for phase difference `phi`.
pub fn simulate_detections(
    phi: f64,
    params: &BeamParams,
    times: &[f64],
    rng: &mut impl Rng,
) -> Result<DetectionHistory> {
    let events = times
        .iter()
        .map(|&t| {
            let m_c = sample_poisson(params.rate(Detector::C, phi, t), rng);
            let m_d = sample_poisson(params.rate(Detector::D, phi, t), rng);
            DetectionEvent::new(t, m_c, m_d)
        })
        .collect();
    DetectionHistory::new(events)
}

/// Uniform phase in `[0, 2π)`.
pub fn sample_phase(rng: &mut impl Rng) -> f64 {
    2.0 * PI * uniform(rng)
}
