//! Posterior over the Bloch vector after a batch of measurements, on the
//! sphere of pure states and in the ball of mixed states.

use qbayes::bloch::{Axis, Sign};
use qbayes::spin::{posterior_bloch_density, BlochPrior, PosteriorResolution, SpinRecord};

fn main() -> qbayes::Result<()> {
    let past = SpinRecord::single_axis(Axis::X, 40, 10).with(Axis::Z, Sign::Plus, 20).with(Axis::Z, Sign::Minus, 30);
    let resolution = PosteriorResolution { n_cos: 96, n_azimuth: 192, n_radius: 48 };

    for (name, prior) in [("sphere", BlochPrior::UniformSphere), ("ball", BlochPrior::UniformBall)] {
        let post = posterior_bloch_density(&past, &prior, resolution)?;
        let mean = post.mean();
        println!(
            "{name:>6}: mean = ({:+.3}, {:+.3}, {:+.3}), P(x > 0.5) = {:.4}, cells = {}",
            mean.x,
            mean.y,
            mean.z,
            post.mass_where(|v| v.x > 0.5),
            post.cells.len()
        );
    }
    Ok(())
}
