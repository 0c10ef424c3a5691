//! Predicting repeated Pauli measurements on identically prepared qubits.
//!
//! With a uniform prior over pure states, `m` results of `+1` along x make
//! the next `n` results all `+1` with probability `(m+1)/(m+n+1)`.

use qbayes::bloch::Axis;
use qbayes::spin::{
    conditional_record, exact_single_axis, rational, record_probability, repeat_probability, BlochPrior, SpinRecord,
};

fn main() -> qbayes::Result<()> {
    let sphere = BlochPrior::UniformSphere;

    for m in [1, 10, 100, 1000] {
        println!("P(next x+ | {m:>4} x+) = {:.6}", repeat_probability(1, m));
    }
    // as many future results as past ones: the probability settles near 1/2
    let half = rational::repeat_probability(1000, 1000);
    println!("P(1000 more x+ | 1000 x+) = {half} ≈ {:.6}", repeat_probability(1000, 1000));

    // every split of M results along one axis is equally likely a priori
    for plus in 0..=4 {
        let p = record_probability(&SpinRecord::single_axis(Axis::X, plus, 4 - plus), &sphere)?;
        println!("P(x: {plus}+ {}-) = {p:.6}", 4 - plus);
    }

    // a mixed past: two x+ and one y-
    let past = SpinRecord::single_axis(Axis::X, 2, 0).with(Axis::Y, qbayes::bloch::Sign::Minus, 1);
    let future = SpinRecord::single_axis(Axis::X, 1, 0);
    println!("P(x+ | x: 2+, y: 1-) = {:.6}", conditional_record(&future, &past, &sphere)?);
    println!("closed form for (1+ | 2+ 0-) = {:.6}", exact_single_axis(1, 0, 2, 0));
    Ok(())
}
