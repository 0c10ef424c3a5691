//! Conditional probabilities from density matrices on a few qubits, next to
//! the closed form that integrates over the prior directly.

use qbayes::bloch::{Axis, Sign};
use qbayes::oracle::{PriorOperator, QubitMeasurement};
use qbayes::spin::{conditional_record, BlochPrior, SpinRecord};

fn main() -> qbayes::Result<()> {
    let prior = BlochPrior::UniformSphere;
    let op = PriorOperator::new(&prior, 4)?;
    println!("prior operator on 4 qubits: {0}x{0}", op.density().dimension());

    // qubits 0 and 1 gave x+; what about qubit 2, or qubits 2 and 3?
    let past = [QubitMeasurement::new(0, Axis::X, Sign::Plus), QubitMeasurement::new(1, Axis::X, Sign::Plus)];
    let one = [QubitMeasurement::new(2, Axis::X, Sign::Plus)];
    let two = [QubitMeasurement::new(2, Axis::X, Sign::Plus), QubitMeasurement::new(3, Axis::X, Sign::Plus)];
    let cross = [QubitMeasurement::new(2, Axis::Y, Sign::Plus)];

    let record = SpinRecord::single_axis(Axis::X, 2, 0);
    let rows = [
        ("x+", op.conditional(&past, &one)?, SpinRecord::single_axis(Axis::X, 1, 0)),
        ("x+ x+", op.conditional(&past, &two)?, SpinRecord::single_axis(Axis::X, 2, 0)),
        ("y+", op.conditional(&past, &cross)?, SpinRecord::single_axis(Axis::Y, 1, 0)),
    ];
    for (name, oracle, future) in rows {
        let closed = conditional_record(&future, &record, &prior)?;
        println!("P({name:<5} | x+ x+): oracle {oracle:.12}  closed form {closed:.12}");
    }
    Ok(())
}
