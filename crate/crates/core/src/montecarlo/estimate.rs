use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::{sample_phase, sample_poisson, simulate_detections, simulate_spin_record, BlochSampler};
use super::stream::SeededStream;
use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::laser::{Beam, BeamParams, DetectionHistory, Detector};
use crate::spin::{BlochPrior, SpinRecord};

/// Fewest replicas an estimate may use.
pub const MIN_REPLICAS: u64 = 10_000;

/// Replicas per shard. Shard `i` draws from `stream.substream(i)`, so the
/// result does not depend on how shards are spread over threads.
pub const SHARD_SIZE: u64 = 1 << 15;

/// A future outcome in a laser scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaserOutcome {
    /// `N` counts at one detector at `time`.
    Counts { detector: Detector, time: f64, n: u64 },
    /// `(N_c, N_d)` at `time`.
    Joint { time: f64, n_c: u64, n_d: u64 },
    /// `N` counts when detecting one beam directly.
    Direct { beam: Beam, n: u64 },
}

/// A prior over hidden states, a past record to condition on, and the
/// future outcomes of interest.
///
/// Every future outcome is drawn independently given the hidden state of an
/// accepted replica.
#[derive(Debug, Clone)]
pub enum Scenario {
    Spin { prior: BlochPrior, past: SpinRecord, futures: Vec<SpinRecord> },
    Laser { params: BeamParams, past: DetectionHistory, futures: Vec<LaserOutcome> },
}

impl Scenario {
    fn future_count(&self) -> usize {
        match self {
            Scenario::Spin { futures, .. } => futures.len(),
            Scenario::Laser { futures, .. } => futures.len(),
        }
    }
}

/// Rejection estimate of a conditional probability or of a ratio of two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Replicas whose simulated past matched.
    pub accepted: u64,
    pub replicas: u64,
}

/// Per-shard tallies. `hits[j]` counts accepted replicas in which future `j`
/// occurred; `both` counts those in which futures 0 and 1 both occurred.
#[derive(Debug, Clone, Default)]
struct Tally {
    accepted: u64,
    hits: Vec<u64>,
    both: u64,
}

impl Tally {
    fn merge(mut self, other: &Tally) -> Tally {
        self.accepted += other.accepted;
        if self.hits.is_empty() {
            self.hits = vec![0; other.hits.len()];
        }
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
        self.both += other.both;
        self
    }
}

enum Model {
    Spin(BlochSampler),
    Laser,
}

fn run_shard(scenario: &Scenario, model: &Model, replicas: u64, stream: SeededStream) -> Result<Tally> {
    let mut rng = stream.rng();
    let mut tally = Tally { accepted: 0, hits: vec![0; scenario.future_count()], both: 0 };
    let mut hit = vec![false; scenario.future_count()];
    for _ in 0..replicas {
        let accepted = match (scenario, model) {
            (Scenario::Spin { past, futures, .. }, Model::Spin(sampler)) => {
                let v = sampler.sample(&mut rng);
                spin_replica(&v, past, futures, &mut hit, &mut rng)
            }
            (Scenario::Laser { params, past, futures }, Model::Laser) => {
                let phi = sample_phase(&mut rng);
                laser_replica(phi, params, past, futures, &mut hit, &mut rng)?
            }
            _ => unreachable!("model is built from the scenario"),
        };
        if !accepted {
            continue;
        }
        tally.accepted += 1;
        for (t, h) in tally.hits.iter_mut().zip(&hit) {
            *t += *h as u64;
        }
        if hit.len() >= 2 && hit[0] && hit[1] {
            tally.both += 1;
        }
    }
    Ok(tally)
}

fn spin_replica(
    v: &BlochVector,
    past: &SpinRecord,
    futures: &[SpinRecord],
    hit: &mut [bool],
    rng: &mut impl Rng,
) -> bool {
    if !past.is_empty() && simulate_spin_record(v, past.plan(), rng) != *past {
        return false;
    }
    for (h, future) in hit.iter_mut().zip(futures) {
        *h = simulate_spin_record(v, future.plan(), rng) == *future;
    }
    true
}

fn laser_replica(
    phi: f64,
    params: &BeamParams,
    past: &DetectionHistory,
    futures: &[LaserOutcome],
    hit: &mut [bool],
    rng: &mut impl Rng,
) -> Result<bool> {
    for event in past.events() {
        // bail out at the first mismatch; later windows are independent
        if sample_poisson(params.rate(Detector::C, phi, event.time), rng) != event.m_c
            || sample_poisson(params.rate(Detector::D, phi, event.time), rng) != event.m_d
        {
            return Ok(false);
        }
    }
    for (h, future) in hit.iter_mut().zip(futures) {
        *h = match *future {
            LaserOutcome::Counts { detector, time, n } => sample_poisson(params.rate(detector, phi, time), rng) == n,
            LaserOutcome::Joint { time, n_c, n_d } => {
                let e = simulate_detections(phi, params, &[time], rng)?.events()[0];
                e.m_c == n_c && e.m_d == n_d
            }
            LaserOutcome::Direct { beam, n } => sample_poisson(params.direct_rate(beam), rng) == n,
        };
    }
    Ok(true)
}

fn tally(scenario: &Scenario, replicas: u64, stream: SeededStream) -> Result<Tally> {
    if replicas < MIN_REPLICAS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_REPLICAS} replicas, got {replicas}")));
    }
    let model = match scenario {
        Scenario::Spin { prior, .. } => Model::Spin(BlochSampler::new(prior)),
        Scenario::Laser { .. } => Model::Laser,
    };
    let shards = replicas.div_ceil(SHARD_SIZE);
    let tallies = (0..shards)
        .into_par_iter()
        .map(|i| {
            let n = SHARD_SIZE.min(replicas - i * SHARD_SIZE);
            run_shard(scenario, &model, n, stream.substream(i))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = tallies.iter().fold(Tally::default(), Tally::merge);
    if total.accepted == 0 {
        return Err(Error::NeverSampled { replicas });
    }
    Ok(total)
}

/// Fraction of accepted replicas in which the first future occurred, with
/// the binomial standard error `√(p̂(1 − p̂)/n)`.
pub fn estimate_conditional(scenario: &Scenario, replicas: u64, stream: SeededStream) -> Result<EmpiricalEstimate> {
    if scenario.future_count() == 0 {
        return Err(Error::InvalidParameter("scenario has no future outcome".into()));
    }
    let t = tally(scenario, replicas, stream)?;
    let n = t.accepted as f64;
    let p = t.hits[0] as f64 / n;
    Ok(EmpiricalEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        accepted: t.accepted,
        replicas,
    })
}

/// Ratio of the conditional frequencies of the first two futures, with a
/// delta-method standard error that accounts for their correlation.
pub fn estimate_ratio(scenario: &Scenario, replicas: u64, stream: SeededStream) -> Result<EmpiricalEstimate> {
    if scenario.future_count() < 2 {
        return Err(Error::InvalidParameter("ratio needs two future outcomes".into()));
    }
    let t = tally(scenario, replicas, stream)?;
    if t.hits[1] == 0 {
        return Err(Error::NeverSampled { replicas });
    }
    let n = t.accepted as f64;
    let (p1, p2, p12) = (t.hits[0] as f64 / n, t.hits[1] as f64 / n, t.both as f64 / n);
    let r = p1 / p2;
    let (v1, v2, c12) = (p1 * (1.0 - p1) / n, p2 * (1.0 - p2) / n, (p12 - p1 * p2) / n);
    let var = r * r * (v1 / (p1 * p1) + v2 / (p2 * p2) - 2.0 * c12 / (p1 * p2));
    Ok(EmpiricalEstimate { estimate: r, stderr: var.max(0.0).sqrt(), accepted: t.accepted, replicas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::Axis;

    fn repeat_scenario() -> Scenario {
        Scenario::Spin {
            prior: BlochPrior::UniformSphere,
            past: SpinRecord::single_axis(Axis::X, 1, 0),
            futures: vec![SpinRecord::single_axis(Axis::X, 1, 0)],
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let s = SeededStream::new(11, 3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_conditional(&repeat_scenario(), 100_000, s)).unwrap();
        let b = four.install(|| estimate_conditional(&repeat_scenario(), 100_000, s)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn repeat_probability_two_thirds() {
        let e = estimate_conditional(&repeat_scenario(), 200_000, SeededStream::new(12, 0)).unwrap();
        assert!((e.estimate - 2.0 / 3.0).abs() < 4.0 * e.stderr, "{e:?}");
        assert!(e.accepted > 90_000 && e.accepted < 110_000);
    }

    #[test]
    fn errors() {
        assert!(estimate_conditional(&repeat_scenario(), 10, SeededStream::new(0, 0)).is_err());
        let never = Scenario::Spin {
            prior: BlochPrior::Tabulated(
                crate::spin::TabulatedPrior::from_points(vec![(BlochVector::new(1.0, 0.0, 0.0), 1.0)]).unwrap(),
            ),
            past: SpinRecord::single_axis(Axis::X, 0, 1),
            futures: vec![SpinRecord::single_axis(Axis::X, 1, 0)],
        };
        assert!(matches!(
            estimate_conditional(&never, MIN_REPLICAS, SeededStream::new(0, 0)),
            Err(Error::NeverSampled { .. })
        ));
    }
}
