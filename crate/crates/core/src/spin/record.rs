use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::bloch::{Axis, Sign};
use crate::numerics::log_binomial;

/// Unordered outcome counts of Pauli measurements, one pair per axis.
///
/// Serialized as `{"x": [plus, minus], "y": [plus, minus], "z": [plus, minus]}`
/// with absent axes meaning zero counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "RecordRepr", into = "RecordRepr")]
pub struct SpinRecord {
    counts: [[u64; 2]; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRepr {
    #[serde(default)]
    x: [u64; 2],
    #[serde(default)]
    y: [u64; 2],
    #[serde(default)]
    z: [u64; 2],
}

impl From<RecordRepr> for SpinRecord {
    fn from(r: RecordRepr) -> Self {
        Self { counts: [r.x, r.y, r.z] }
    }
}

impl From<SpinRecord> for RecordRepr {
    fn from(r: SpinRecord) -> Self {
        Self { x: r.counts[0], y: r.counts[1], z: r.counts[2] }
    }
}

impl SpinRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record with `plus` outcomes `+1` and `minus` outcomes `−1` along one axis.
    pub fn single_axis(axis: Axis, plus: u64, minus: u64) -> Self {
        Self::new().with(axis, Sign::Plus, plus).with(axis, Sign::Minus, minus)
    }

    pub fn with(mut self, axis: Axis, sign: Sign, count: u64) -> Self {
        self.counts[axis.index()][sign.index()] = count;
        self
    }

    pub fn count(&self, axis: Axis, sign: Sign) -> u64 {
        self.counts[axis.index()][sign.index()]
    }

    pub fn axis_total(&self, axis: Axis) -> u64 {
        let [p, m] = self.counts[axis.index()];
        p + m
    }

    pub fn total(&self) -> u64 {
        Axis::ALL.iter().map(|&a| self.axis_total(a)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Axes with at least one measurement.
    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|&a| self.axis_total(a) > 0)
    }

    /// Number of measurements per axis, ignoring outcomes.
    pub fn plan(&self) -> [u64; 3] {
        Axis::ALL.map(|a| self.axis_total(a))
    }

    /// `ln Π_axis (n⁺ + n⁻)! / (n⁺! n⁻!)`: the number of orderings that share
    /// these counts.
    pub fn log_multinomial(&self) -> f64 {
        Axis::ALL
            .iter()
            .map(|&a| log_binomial(self.axis_total(a), self.count(a, Sign::Plus)))
            .sum()
    }
}

impl Add for SpinRecord {
    type Output = SpinRecord;

    fn add(self, rhs: SpinRecord) -> SpinRecord {
        let mut out = self;
        for a in 0..3 {
            for s in 0..2 {
                out.counts[a][s] += rhs.counts[a][s];
            }
        }
        out
    }
}
