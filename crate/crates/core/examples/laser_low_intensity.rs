//! At low intensity a first count at detector c makes a second count at c
//! three times as likely as one at d when the beams have equal amplitude.

use qbayes::laser::{low_intensity_pair, predict_joint, BeamParams, DetectionHistory};

fn main() -> qbayes::Result<()> {
    let click = DetectionHistory::single(1, 0);
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.1)] {
        let params = BeamParams::equal_frequency(a, b, 1e-4)?;
        let (p_cc, p_dc) = low_intensity_pair(&params);
        let cc = predict_joint(1, 0, 0.0, &click, &params)?;
        let dc = predict_joint(0, 1, 0.0, &click, &params)?;
        println!(
            "a = {a}, b = {b}: p_cc = {p_cc:.4e}, p_dc = {p_dc:.4e}, ratio {:.4} (full predictive {:.4})",
            p_cc / p_dc,
            cc / dc
        );
    }
    Ok(())
}
