//! Beams at different frequencies: detections at two times resolve the sign
//! of the phase difference that a single time leaves open.

use std::f64::consts::PI;

use qbayes::laser::{phase_posterior, BeamParams, DetectionEvent, DetectionHistory};

fn main() -> qbayes::Result<()> {
    let params = BeamParams::new(1.0, 1.0, 0.1, PI / 2.0)?;

    let once = DetectionHistory::single(60, 20);
    let twice = DetectionHistory::new(vec![DetectionEvent::new(0.0, 60, 20), DetectionEvent::new(1.0, 15, 65)])?;

    for (name, h) in [("one time", once), ("two times", twice)] {
        let post = phase_posterior(&h, &params)?;
        let plus = post.mass_near(PI / 3.0, 0.3);
        let minus = post.mass_near(-PI / 3.0, 0.3);
        println!(
            "{name:>9}: mass near +π/3 = {plus:.4}, near −π/3 = {minus:.4}, max asymmetry = {:.3e}",
            post.max_asymmetry()
        );
    }
    Ok(())
}
