//! A long detection record locks the phase difference of two coherent
//! beams up to its sign, and the predicted counts become Poissonian.

use std::f64::consts::PI;

use qbayes::laser::{
    asymptotic_phase, locked_phase_counts, phase_posterior, predict_counts, BeamParams, DetectionHistory, Detector,
};

fn main() -> qbayes::Result<()> {
    let params = BeamParams::equal_frequency(1.0, 1.0, 0.1)?;
    let history = DetectionHistory::single(7500, 2500);

    let cos_phi0 = asymptotic_phase(7500, 2500, &params)?;
    let phi0 = cos_phi0.acos();
    let post = phase_posterior(&history, &params)?;
    println!("cos φ0 = {cos_phi0:.4}, φ0 = ±{:.4} rad", phi0);
    println!(
        "posterior on {} nodes; mass within 0.05 rad of ±φ0 = {:.6}",
        post.grid().node_count(),
        post.mass_near(phi0, 0.05) + post.mass_near(2.0 * PI - phi0, 0.05)
    );

    for detector in [Detector::C, Detector::D] {
        let predicted = predict_counts(detector, 0.0, &history, &params, None)?;
        let locked = locked_phase_counts(detector, cos_phi0, &params, None);
        println!("detector {detector:?}:   N   predictive      locked Poisson");
        for n in 0..5 {
            println!("             {n}   {:.6e}   {:.6e}", predicted.probability(n), locked.probability(n));
        }
    }
    Ok(())
}
