//! Verification suites: Monte Carlo agreement with the analytic predictions
//! and agreement of the operator oracle with the closed-form spin
//! predictions.
//!
//! Each suite yields one [`VerificationReport`] per case. Monte Carlo rows
//! pass when `|empirical − analytic| ≤ 3·stderr`. Oracle rows carry the
//! oracle value in `empirical`, a zero `stderr`, and pass on agreement to
//! 1e-10 relative.

use std::collections::hash_map::{Entry, HashMap};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloch::{Axis, Sign};
use crate::error::{Error, Result};
use crate::laser::{
    apriori_counts, direct_count_distribution, predict_counts, predict_joint, Beam, BeamParams,
    DetectionEvent, DetectionHistory, Detector,
};
use crate::montecarlo::{estimate_conditional, estimate_ratio, LaserOutcome, Scenario, SeededStream};
use crate::numerics::log_binomial;
use crate::oracle::{PriorOperator, QubitMeasurement};
use crate::spin::{conditional_record, record_probability, BlochPrior, SpinRecord};

/// Standard errors allowed between a Monte Carlo estimate and its target.
pub const SIGMA_LIMIT: f64 = 3.0;

/// Relative tolerance of the oracle comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Largest record the oracle suite covers.
pub const ORACLE_MAX_MEASUREMENTS: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spin,
    Laser,
    Oracle,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(Suite::Spin),
            "laser" => Ok(Suite::Laser),
            "oracle" => Ok(Suite::Oracle),
            "all" => Ok(Suite::All),
            other => Err(Error::Input(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: String,
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// What a Monte Carlo case estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimand {
    /// Conditional probability of the first future.
    Probability,
    /// Ratio of the conditional probabilities of the first two futures.
    Ratio,
}

/// A published Monte Carlo case and its analytic target.
#[derive(Debug, Clone)]
pub struct VerificationCase {
    pub name: String,
    pub suite: Suite,
    pub scenario: Scenario,
    pub estimand: Estimand,
    pub analytic: f64,
}

fn x(plus: u64, minus: u64) -> SpinRecord {
    SpinRecord::single_axis(Axis::X, plus, minus)
}

fn spin_case(name: &str, prior: BlochPrior, past: SpinRecord, future: SpinRecord) -> Result<VerificationCase> {
    let analytic = if past.is_empty() {
        record_probability(&future, &prior)?
    } else {
        conditional_record(&future, &past, &prior)?
    };
    Ok(VerificationCase {
        name: name.into(),
        suite: Suite::Spin,
        scenario: Scenario::Spin { prior, past, futures: vec![future] },
        estimand: Estimand::Probability,
        analytic,
    })
}

fn laser_case(
    name: &str,
    params: BeamParams,
    past: DetectionHistory,
    futures: Vec<LaserOutcome>,
    estimand: Estimand,
    analytic: f64,
) -> VerificationCase {
    VerificationCase {
        name: name.into(),
        suite: Suite::Laser,
        scenario: Scenario::Laser { params, past, futures },
        estimand,
        analytic,
    }
}

/// The fixed Monte Carlo case list: seven spin and seven laser cases, each
/// with target probability ≥ 1e-3 and past acceptance ≥ 1e-3.
pub fn verification_cases() -> Result<Vec<VerificationCase>> {
    let sphere = BlochPrior::UniformSphere;
    let mut cases = vec![
        spin_case("spin: x+ after one x+", sphere.clone(), x(1, 0), x(1, 0))?,
        spin_case("spin: x- after x(2+,1-)", sphere.clone(), x(2, 1), x(0, 1))?,
        spin_case("spin: two x+ with no data", sphere.clone(), SpinRecord::new(), x(2, 0))?,
        spin_case(
            "spin: x+ and y+ with no data",
            sphere.clone(),
            SpinRecord::new(),
            x(1, 0).with(Axis::Y, Sign::Plus, 1),
        )?,
        spin_case(
            "spin: x+ after x(2+) and z(1+,1-)",
            sphere.clone(),
            x(2, 0).with(Axis::Z, Sign::Plus, 1).with(Axis::Z, Sign::Minus, 1),
            x(1, 0),
        )?,
        spin_case(
            "spin: z(2+) after z(2+), ball prior",
            BlochPrior::UniformBall,
            SpinRecord::single_axis(Axis::Z, 2, 0),
            SpinRecord::single_axis(Axis::Z, 2, 0),
        )?,
        spin_case("spin: three x+ after three x+", sphere, x(3, 0), x(3, 0))?,
    ];

    let equal = |eta| BeamParams::equal_frequency(1.0, 1.0, eta);
    let click = DetectionHistory::single(1, 0);

    let p = equal(0.1)?;
    let empty = DetectionHistory::empty();
    let target = predict_counts(Detector::C, 0.0, &empty, &p, None)?.probability(0);
    cases.push(laser_case(
        "laser: no count at c with no data",
        p,
        empty.clone(),
        vec![LaserOutcome::Counts { detector: Detector::C, time: 0.0, n: 0 }],
        Estimand::Probability,
        target,
    ));

    let p = equal(0.5)?;
    let target = predict_counts(Detector::C, 0.0, &click, &p, None)?.probability(1);
    cases.push(laser_case(
        "laser: one count at c after (1,0)",
        p,
        click.clone(),
        vec![LaserOutcome::Counts { detector: Detector::C, time: 0.0, n: 1 }],
        Estimand::Probability,
        target,
    ));

    let p = equal(0.3)?;
    cases.push(laser_case(
        "laser: joint (1,0) after (1,0)",
        p,
        click.clone(),
        vec![LaserOutcome::Joint { time: 0.0, n_c: 1, n_d: 0 }],
        Estimand::Probability,
        predict_joint(1, 0, 0.0, &click, &p)?,
    ));

    let p = equal(0.05)?;
    let ratio = predict_joint(1, 0, 0.0, &click, &p)? / predict_joint(0, 1, 0.0, &click, &p)?;
    cases.push(laser_case(
        "laser: ratio (1,0)/(0,1) after (1,0)",
        p,
        click,
        vec![
            LaserOutcome::Joint { time: 0.0, n_c: 1, n_d: 0 },
            LaserOutcome::Joint { time: 0.0, n_c: 0, n_d: 1 },
        ],
        Estimand::Ratio,
        ratio,
    ));

    let p = BeamParams::new(1.0, 0.8, 0.4, std::f64::consts::FRAC_PI_2)?;
    let two_times = DetectionHistory::new(vec![DetectionEvent::new(0.0, 1, 0), DetectionEvent::new(1.0, 0, 1)])?;
    let target = predict_counts(Detector::C, 2.0, &two_times, &p, None)?.probability(1);
    cases.push(laser_case(
        "laser: one count at c at t=2 after two windows",
        p,
        two_times,
        vec![LaserOutcome::Counts { detector: Detector::C, time: 2.0, n: 1 }],
        Estimand::Probability,
        target,
    ));

    let p = BeamParams::equal_frequency(1.0, 2.0, 0.2)?;
    cases.push(laser_case(
        "laser: a-priori (1,1)",
        p,
        DetectionHistory::empty(),
        vec![LaserOutcome::Joint { time: 0.0, n_c: 1, n_d: 1 }],
        Estimand::Probability,
        apriori_counts(1, 1, &p)?,
    ));

    let p = equal(1.0)?;
    cases.push(laser_case(
        "laser: direct count 1 at mean 1",
        p,
        DetectionHistory::empty(),
        vec![LaserOutcome::Direct { beam: Beam::A, n: 1 }],
        Estimand::Probability,
        direct_count_distribution(Beam::A, &p, None).probability(1),
    ));
    Ok(cases)
}

/// Runs one case on `stream`.
pub fn run_case(case: &VerificationCase, replicas: u64, stream: SeededStream) -> Result<VerificationReport> {
    let est = match case.estimand {
        Estimand::Probability => estimate_conditional(&case.scenario, replicas, stream)?,
        Estimand::Ratio => estimate_ratio(&case.scenario, replicas, stream)?,
    };
    let pass = (est.estimate - case.analytic).abs() <= SIGMA_LIMIT * est.stderr;
    Ok(VerificationReport {
        case: case.name.clone(),
        analytic: case.analytic,
        empirical: est.estimate,
        stderr: est.stderr,
        pass,
    })
}

/// Monte Carlo rows for `suite` (`Spin`, `Laser` or `All`); case `i` of the
/// full list uses stream `i` of `seed`.
pub fn run_monte_carlo_suite(suite: Suite, replicas: u64, seed: u64) -> Result<Vec<VerificationReport>> {
    verification_cases()?
        .iter()
        .enumerate()
        .filter(|(_, c)| suite == Suite::All || c.suite == suite)
        .map(|(i, c)| run_case(c, replicas, SeededStream::new(seed, i as u64)))
        .collect()
}

fn events(axis: Axis, plus: u64, minus: u64, first_qubit: usize) -> Vec<QubitMeasurement> {
    let signs = std::iter::repeat_n(Sign::Plus, plus as usize).chain(std::iter::repeat_n(Sign::Minus, minus as usize));
    signs.enumerate().map(|(i, s)| QubitMeasurement::new(first_qubit + i, axis, s)).collect()
}

/// Oracle rows: every single-axis past `(m⁺, m⁻)` and nonempty future
/// `(n⁺, n⁻)` with at most six measurements in total, on each axis, under
/// the uniform-sphere and uniform-ball priors.
///
/// The closed form counts unordered outcomes, so it is compared with
/// `C(n, n⁺)` times the oracle probability of one ordered sequence.
pub fn run_oracle_suite() -> Result<Vec<VerificationReport>> {
    let mut rows = Vec::new();
    for (prior_name, prior) in [("sphere", BlochPrior::UniformSphere), ("ball", BlochPrior::UniformBall)] {
        let mut operators: HashMap<usize, PriorOperator> = HashMap::new();
        for axis in Axis::ALL {
            for total in 1..=ORACLE_MAX_MEASUREMENTS {
                for m in 0..total {
                    let n = total - m;
                    for m_plus in 0..=m {
                        for n_plus in 0..=n {
                            let copies = total as usize;
                            let op = match operators.entry(copies) {
                                Entry::Occupied(e) => e.into_mut(),
                                Entry::Vacant(e) => e.insert(PriorOperator::new(&prior, copies)?),
                            };
                            let past = events(axis, m_plus, m - m_plus, 0);
                            let future = events(axis, n_plus, n - n_plus, m as usize);
                            let oracle = op.conditional(&past, &future)? * log_binomial(n, n_plus).exp();
                            let closed = conditional_record(
                                &SpinRecord::single_axis(axis, n_plus, n - n_plus),
                                &SpinRecord::single_axis(axis, m_plus, m - m_plus),
                                &prior,
                            )?;
                            rows.push(VerificationReport {
                                case: format!(
                                    "oracle {prior_name} {axis}: ({n_plus}+,{}-) after ({m_plus}+,{}-)",
                                    n - n_plus,
                                    m - m_plus
                                ),
                                analytic: closed,
                                empirical: oracle,
                                stderr: 0.0,
                                pass: (oracle - closed).abs() <= ORACLE_TOLERANCE * closed.abs(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// All rows selected by `suite`.
pub fn run_suite(suite: Suite, replicas: u64, seed: u64) -> Result<Vec<VerificationReport>> {
    match suite {
        Suite::Oracle => run_oracle_suite(),
        Suite::Spin | Suite::Laser => run_monte_carlo_suite(suite, replicas, seed),
        Suite::All => {
            let mut rows = run_oracle_suite()?;
            rows.extend(run_monte_carlo_suite(Suite::All, replicas, seed)?);
            Ok(rows)
        }
    }
}
