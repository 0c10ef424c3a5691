//! Checking an analytic prediction by brute force: draw the hidden state
//! from the prior, simulate the past, keep replicas whose past matches and
//! count how often the future occurs.

use qbayes::bloch::Axis;
use qbayes::laser::{predict_joint, BeamParams, DetectionHistory};
use qbayes::montecarlo::{estimate_conditional, estimate_ratio, LaserOutcome, Scenario, SeededStream};
use qbayes::spin::{conditional_record, BlochPrior, SpinRecord};

fn main() -> qbayes::Result<()> {
    let past = SpinRecord::single_axis(Axis::Z, 3, 1);
    let future = SpinRecord::single_axis(Axis::Z, 2, 0);
    let prior = BlochPrior::UniformBall;
    let analytic = conditional_record(&future, &past, &prior)?;
    let scenario = Scenario::Spin { prior, past, futures: vec![future] };
    let est = estimate_conditional(&scenario, 1_000_000, SeededStream::new(42, 0))?;
    println!(
        "spin:  analytic {analytic:.5}  simulated {:.5} ± {:.5}  ({} of {} pasts matched)",
        est.estimate, est.stderr, est.accepted, est.replicas
    );

    let params = BeamParams::equal_frequency(1.0, 1.0, 0.05)?;
    let click = DetectionHistory::single(1, 0);
    let analytic = predict_joint(1, 0, 0.0, &click, &params)? / predict_joint(0, 1, 0.0, &click, &params)?;
    let scenario = Scenario::Laser {
        params,
        past: click,
        futures: vec![
            LaserOutcome::Joint { time: 0.0, n_c: 1, n_d: 0 },
            LaserOutcome::Joint { time: 0.0, n_c: 0, n_d: 1 },
        ],
    };
    let est = estimate_ratio(&scenario, 1_000_000, SeededStream::new(42, 1))?;
    println!("laser: analytic ratio {analytic:.4}  simulated {:.4} ± {:.4}", est.estimate, est.stderr);
    Ok(())
}
