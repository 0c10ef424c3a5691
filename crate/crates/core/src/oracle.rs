//! Exact finite-dimensional quantum Bayes rule on a few qubits.
//!
//! For commuting measurements, the probability of the future outcomes given
//! the past ones is
//!
//! ```text
//! P(A₁…Aₙ | B₁…Bₘ) = Tr(Π̂ E_B₁…E_Bₘ E_A₁…E_Aₙ) / Tr(Π̂ E_B₁…E_Bₘ)
//! ```
//!
//! with `Π̂ = ∫ Π(r) ((1 + r·σ)/2)^{⊗n} d³r` assembled as a dense matrix.
//! Everything here is built explicitly from Pauli matrices and Kronecker
//! products, so it serves as an independent check on the scalar integrals
//! of [`crate::spin`]. Dimensions are capped at 2^10.

use nalgebra::{Complex, DMatrix};

use crate::bloch::{Axis, BlochVector, Sign};
use crate::error::{Error, Result};
use crate::spin::BlochPrior;

pub type C64 = Complex<f64>;

/// Largest number of qubits the oracle will represent.
pub const MAX_COPIES: usize = 10;

/// Tracial denominators below this are treated as impossible events.
pub const MIN_DENOMINATOR: f64 = 1e-300;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-10;
const TRACE_TOLERANCE: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli(axis: Axis) -> DMatrix<C64> {
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

fn max_hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    // symmetric_eigenvalues works on the Hermitian part
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_square(m: &DMatrix<C64>) -> Result<()> {
    if !m.is_square() || !m.nrows().is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "operator must be square with a power-of-two dimension, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let op = Self { matrix };
        op.validate()?;
        Ok(op)
    }

    /// Checks Hermiticity (1e-12), positivity (min eigenvalue ≥ −1e-10) and
    /// unit trace (1e-12).
    pub fn validate(&self) -> Result<()> {
        check_square(&self.matrix)?;
        let defect = max_hermitian_defect(&self.matrix);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidParameter(format!("density operator is not Hermitian ({defect:e})")));
        }
        let trace = self.matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidParameter(format!("density operator has trace {trace}")));
        }
        let min = min_eigenvalue(&self.matrix);
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidParameter(format!("density operator has eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `Re Tr(ρ E)`.
    pub fn expectation(&self, element: &PovmElement) -> Result<f64> {
        if element.dimension() != self.dimension() {
            return Err(Error::InvalidParameter(format!(
                "dimension mismatch: state {} vs POVM element {}",
                self.dimension(),
                element.dimension()
            )));
        }
        Ok(trace_of_product(&self.matrix, &element.matrix))
    }
}

/// `Re Tr(A B) = Re Σ_ij A_ij B_ji`.
fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.component_mul(&b.transpose()).sum().re
}

/// Positive operator bounded by the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    matrix: DMatrix<C64>,
}

impl PovmElement {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        check_square(&matrix)?;
        let defect = max_hermitian_defect(&matrix);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidParameter(format!("POVM element is not Hermitian ({defect:e})")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidParameter(format!("POVM element has eigenvalue {min:e}")));
        }
        let identity = DMatrix::<C64>::identity(matrix.nrows(), matrix.ncols());
        let min_complement = min_eigenvalue(&(identity - &matrix));
        if min_complement < -PSD_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "POVM element exceeds the identity (1 − E has eigenvalue {min_complement:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dimension: usize) -> Self {
        Self { matrix: DMatrix::identity(dimension, dimension) }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `self ⊗ other`, which is again a POVM element.
    pub fn tensor(&self, other: &PovmElement) -> PovmElement {
        PovmElement { matrix: self.matrix.kronecker(&other.matrix) }
    }
}

/// Rank-one projector `(1 ± σ_axis)/2` on one qubit.
pub fn single_qubit_projector(axis: Axis, sign: Sign) -> PovmElement {
    let identity = DMatrix::<C64>::identity(2, 2);
    let matrix = (identity + pauli(axis) * c(sign.value(), 0.0)) * c(0.5, 0.0);
    PovmElement { matrix }
}

/// `copies` qubits all in the state with Bloch vector `bloch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitProductState {
    bloch: BlochVector,
    copies: usize,
}

impl QubitProductState {
    pub fn new(bloch: BlochVector, copies: usize) -> Result<Self> {
        if !bloch.is_physical() {
            return Err(Error::InvalidParameter(format!("Bloch vector {bloch:?} lies outside the unit ball")));
        }
        if copies == 0 {
            return Err(Error::InvalidParameter("a product state needs at least one qubit".into()));
        }
        Ok(Self { bloch, copies })
    }

    pub fn bloch(&self) -> BlochVector {
        self.bloch
    }

    pub fn copies(&self) -> usize {
        self.copies
    }
}

fn check_copies(copies: usize) -> Result<()> {
    if copies > MAX_COPIES {
        return Err(Error::Resource(format!(
            "{copies} qubits exceed the oracle limit of {MAX_COPIES} (dimension {})",
            1usize << MAX_COPIES
        )));
    }
    Ok(())
}

fn single_qubit_density(bloch: &BlochVector) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(2, 2);
    for axis in Axis::ALL {
        m += pauli(axis) * c(bloch.component(axis), 0.0);
    }
    m * c(0.5, 0.0)
}

fn tensor_power(m: &DMatrix<C64>, copies: usize) -> DMatrix<C64> {
    (1..copies).fold(m.clone(), |acc, _| acc.kronecker(m))
}

/// `((1 + r·σ)/2)^{⊗copies}`.
pub fn product_density(state: &QubitProductState) -> Result<DensityOperator> {
    check_copies(state.copies)?;
    Ok(DensityOperator { matrix: tensor_power(&single_qubit_density(&state.bloch), state.copies) })
}

/// One Pauli measurement outcome on a given qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitMeasurement {
    pub qubit: usize,
    pub axis: Axis,
    pub sign: Sign,
}

impl QubitMeasurement {
    pub fn new(qubit: usize, axis: Axis, sign: Sign) -> Self {
        Self { qubit, axis, sign }
    }
}

/// Tensor product of the projectors for `events`, identity on the other
/// qubits. Qubit 0 is the leftmost tensor factor.
pub fn measurement_operator(copies: usize, events: &[QubitMeasurement]) -> Result<PovmElement> {
    check_copies(copies)?;
    let mut factors: Vec<Option<PovmElement>> = vec![None; copies];
    for e in events {
        if e.qubit >= copies {
            return Err(Error::Precondition(format!("qubit {} out of range for {copies} copies", e.qubit)));
        }
        if factors[e.qubit].is_some() {
            return Err(Error::Precondition(format!("qubit {} is measured twice", e.qubit)));
        }
        factors[e.qubit] = Some(single_qubit_projector(e.axis, e.sign));
    }
    let mut iter = factors.into_iter().map(|f| f.unwrap_or_else(|| PovmElement::identity(2)));
    let first = iter.next().unwrap_or_else(|| PovmElement::identity(1));
    Ok(iter.fold(first, |acc, f| acc.tensor(&f)))
}

/// The prior density operator `Π̂` on a fixed number of qubits, reusable
/// across queries.
#[derive(Debug, Clone)]
pub struct PriorOperator {
    copies: usize,
    density: DensityOperator,
}

impl PriorOperator {
    /// Assembles `Π̂ = Σ_k w_k ρ(r_k)^{⊗copies}` from the prior's quadrature.
    ///
    /// The integrand is a polynomial of degree `copies` in the Bloch
    /// components; the quadrature is asked for degree `2·copies + 2`, which
    /// gives a Gauss-Legendre order of `copies + 2` in `cos θ`.
    pub fn new(prior: &BlochPrior, copies: usize) -> Result<Self> {
        check_copies(copies)?;
        if copies == 0 {
            return Err(Error::InvalidParameter("the oracle needs at least one qubit".into()));
        }
        let dim = 1usize << copies;
        let mut matrix = DMatrix::<C64>::zeros(dim, dim);
        for (v, w) in prior.quadrature(2 * copies + 2)? {
            if w == 0.0 {
                continue;
            }
            matrix += tensor_power(&single_qubit_density(&v), copies) * c(w, 0.0);
        }
        Ok(Self { copies, density: DensityOperator { matrix } })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn density(&self) -> &DensityOperator {
        &self.density
    }

    /// `Tr(Π̂ E_past E_future) / Tr(Π̂ E_past)`.
    pub fn conditional(&self, past: &[QubitMeasurement], future: &[QubitMeasurement]) -> Result<f64> {
        let mut seen = vec![false; self.copies];
        for e in past.iter().chain(future) {
            if e.qubit >= self.copies {
                return Err(Error::Precondition(format!(
                    "qubit {} out of range for {} copies",
                    e.qubit, self.copies
                )));
            }
            if std::mem::replace(&mut seen[e.qubit], true) {
                return Err(Error::Precondition(format!(
                    "qubit {} appears more than once; past and future must act on distinct qubits",
                    e.qubit
                )));
            }
        }
        let e_past = measurement_operator(self.copies, past)?;
        let e_future = measurement_operator(self.copies, future)?;
        let den = trace_of_product(&self.density.matrix, &e_past.matrix);
        if den < MIN_DENOMINATOR {
            return Err(Error::ImpossibleConditioning(format!(
                "Tr(prior · past) = {den:e} is below {MIN_DENOMINATOR:e}"
            )));
        }
        let joint = &e_past.matrix * &e_future.matrix;
        Ok(trace_of_product(&self.density.matrix, &joint) / den)
    }
}

/// Conditional probability of `future` given `past` on `copies` qubits
/// sharing a Bloch vector drawn from `prior`.
pub fn bayes_conditional(
    prior: &BlochPrior,
    copies: usize,
    past: &[QubitMeasurement],
    future: &[QubitMeasurement],
) -> Result<f64> {
    if copies < past.len() + future.len() {
        return Err(Error::Precondition(format!(
            "{copies} copies cannot host {} measurements",
            past.len() + future.len()
        )));
    }
    PriorOperator::new(prior, copies)?.conditional(past, future)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn assert_matrix_eq(m: &DMatrix<C64>, expected: &[C64]) {
        for (got, want) in m.transpose().iter().zip(expected) {
            assert!((got - want).norm() < 1e-15, "{m} vs {expected:?}");
        }
    }

    #[test]
    fn projector_examples() {
        let z = single_qubit_projector(Axis::Z, Sign::Plus);
        assert_matrix_eq(z.matrix(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let x = single_qubit_projector(Axis::X, Sign::Plus);
        assert_matrix_eq(x.matrix(), &[c(0.5, 0.); 4]);
        let y = single_qubit_projector(Axis::Y, Sign::Minus);
        assert_matrix_eq(y.matrix(), &[c(0.5, 0.), c(0., 0.5), c(0., -0.5), c(0.5, 0.)]);
        // projectors are valid POVM elements
        assert!(PovmElement::new(y.matrix().clone()).is_ok());
    }

    #[test]
    fn product_density_examples() {
        let up = product_density(&QubitProductState::new(BlochVector::new(0., 0., 1.), 1).unwrap()).unwrap();
        assert_matrix_eq(up.matrix(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);

        let mixed = product_density(&QubitProductState::new(BlochVector::default(), 2).unwrap()).unwrap();
        let quarter = DMatrix::<C64>::identity(4, 4) * c(0.25, 0.);
        assert!((mixed.matrix() - quarter).norm() < 1e-15);

        let plus = product_density(&QubitProductState::new(BlochVector::new(1., 0., 0.), 2).unwrap()).unwrap();
        // |++⟩⟨++| has every entry equal to 1/4
        assert!(plus.matrix().iter().all(|z| (z - c(0.25, 0.)).norm() < 1e-15));
        assert!(plus.validate().is_ok());
    }

    #[test]
    fn copies_are_capped() {
        let state = QubitProductState::new(BlochVector::default(), 11).unwrap();
        assert!(matches!(product_density(&state), Err(Error::Resource(_))));
    }

    #[test]
    fn invalid_operators_are_rejected() {
        let not_psd = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)]);
        assert!(DensityOperator::new(not_psd).is_err());
        let too_big = DMatrix::<C64>::identity(2, 2) * c(1.5, 0.);
        assert!(PovmElement::new(too_big).is_err());
        let not_hermitian = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0., 0.), c(0.5, 0.)]);
        assert!(PovmElement::new(not_hermitian).is_err());
    }

    #[test]
    fn conditional_examples() {
        let sphere = BlochPrior::UniformSphere;
        let p = bayes_conditional(&sphere, 1, &[], &[QubitMeasurement::new(0, Axis::X, Sign::Plus)]).unwrap();
        assert_relative_eq!(p, 0.5, max_relative = 1e-13);

        let past = [QubitMeasurement::new(0, Axis::X, Sign::Plus)];
        let p = bayes_conditional(&sphere, 2, &past, &[QubitMeasurement::new(1, Axis::X, Sign::Plus)]).unwrap();
        assert_relative_eq!(p, 2.0 / 3.0, max_relative = 1e-13);
        let p = bayes_conditional(&sphere, 2, &past, &[QubitMeasurement::new(1, Axis::X, Sign::Minus)]).unwrap();
        assert_relative_eq!(p, 1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn repeated_qubit_is_a_precondition_error() {
        let e = QubitMeasurement::new(0, Axis::X, Sign::Plus);
        assert!(matches!(
            bayes_conditional(&BlochPrior::UniformSphere, 2, &[e], &[e]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            bayes_conditional(&BlochPrior::UniformSphere, 1, &[e], &[QubitMeasurement::new(1, Axis::Z, Sign::Plus)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn prior_operator_is_a_density_operator() {
        for prior in [BlochPrior::UniformSphere, BlochPrior::UniformBall] {
            let op = PriorOperator::new(&prior, 4).unwrap();
            op.density().validate().unwrap();
        }
    }

    #[test]
    fn impossible_past_under_point_prior() {
        use crate::spin::TabulatedPrior;
        let prior = BlochPrior::Tabulated(
            TabulatedPrior::from_points(vec![(BlochVector::new(0., 0., 1.), 1.0)]).unwrap(),
        );
        let past = [QubitMeasurement::new(0, Axis::Z, Sign::Minus)];
        assert!(matches!(
            bayes_conditional(&prior, 2, &past, &[QubitMeasurement::new(1, Axis::Z, Sign::Plus)]),
            Err(Error::ImpossibleConditioning(_))
        ));
    }
}
