//! Closed forms for single-axis records under the uniform-sphere prior.

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, log_factorial};

/// Probability of `n_plus`/`n_minus` future outcomes (unordered) along one
/// axis after `m_plus`/`m_minus` past outcomes on the same axis, uniform
/// sphere prior:
///
/// ```text
/// C(n⁺+n⁻, n⁺) · (m⁺+m⁻+1)! (m⁺+n⁺)! (m⁻+n⁻)! / ((m⁺+m⁻+n⁺+n⁻+1)! m⁺! m⁻!)
/// ```
///
/// Evaluated in log space, so arbitrarily large counts are fine.
pub fn exact_single_axis(n_plus: u64, n_minus: u64, m_plus: u64, m_minus: u64) -> f64 {
    let m = m_plus + m_minus;
    let n = n_plus + n_minus;
    let log_p = log_binomial(n, n_plus) + log_factorial(m + 1) + log_factorial(m_plus + n_plus)
        + log_factorial(m_minus + n_minus)
        - log_factorial(m + n + 1)
        - log_factorial(m_plus)
        - log_factorial(m_minus);
    log_p.exp()
}

/// Large-record limit of [`exact_single_axis`]: a binomial with success
/// probability `m⁺/(m⁺+m⁻)`. Only meaningful when the past record is much
/// longer than the future one.
pub fn asymptotic_single_axis(n_plus: u64, n_minus: u64, m_plus: u64, m_minus: u64) -> Result<f64> {
    let m = m_plus + m_minus;
    if m == 0 {
        return Err(Error::Precondition("asymptotic form needs a non-empty past record".into()));
    }
    let p = m_plus as f64 / m as f64;
    let log_term = |k: u64, q: f64| if k == 0 { 0.0 } else { k as f64 * q.ln() };
    Ok((log_binomial(n_plus + n_minus, n_plus) + log_term(n_plus, p) + log_term(n_minus, 1.0 - p)).exp())
}

/// Probability of `n_plus` further `+1` outcomes after `m_plus` observed
/// `+1` outcomes on the same axis: `(m⁺ + 1)/(m⁺ + n⁺ + 1)`.
pub fn repeat_probability(n_plus: u64, m_plus: u64) -> f64 {
    (m_plus as f64 + 1.0) / ((m_plus + n_plus) as f64 + 1.0)
}

/// Exact rational versions of the single-axis results, for fixtures and
/// bit-checkable tests on moderate counts.
pub mod rational {
    use num_bigint::{BigInt, BigUint};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, k| acc * k)
    }

    fn binomial(n: u64, k: u64) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        BigInt::from(factorial(n) / (factorial(k) * factorial(n - k)))
    }

    fn ratio(num: BigUint, den: BigUint) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Factorial closed form of [`super::exact_single_axis`].
    pub fn exact_single_axis(n_plus: u64, n_minus: u64, m_plus: u64, m_minus: u64) -> BigRational {
        let m = m_plus + m_minus;
        let n = n_plus + n_minus;
        let num = factorial(m + 1) * factorial(m_plus + n_plus) * factorial(m_minus + n_minus);
        let den = factorial(m + n + 1) * factorial(m_plus) * factorial(m_minus);
        BigRational::from_integer(binomial(n, n_plus)) * ratio(num, den)
    }

    /// `∫_{-1}^{1} (dx/2) ((1+x)/2)^p ((1−x)/2)^q`, by expanding both factors
    /// binomially and integrating monomials term by term.
    pub fn single_axis_integral(p: u64, q: u64) -> BigRational {
        let mut sum = BigRational::zero();
        for i in 0..=p {
            for j in 0..=q {
                if (i + j) % 2 == 1 {
                    continue;
                }
                // ∫_{-1}^{1} x^k dx = 2/(k+1) for even k
                let coeff = binomial(p, i) * binomial(q, j) * BigInt::from(2u32);
                let term = BigRational::new(coeff, BigInt::from(i + j + 1));
                if j % 2 == 1 {
                    sum -= term;
                } else {
                    sum += term;
                }
            }
        }
        // (dx/2) and the 2^{-(p+q)} from the halves
        sum / BigRational::from_integer(BigInt::from(2u32).pow((p + q + 1) as u32))
    }

    /// Unordered probability of a single-axis record under the uniform
    /// sphere prior, from the term-by-term integral.
    pub fn record_probability(plus: u64, minus: u64) -> BigRational {
        BigRational::from_integer(binomial(plus + minus, plus)) * single_axis_integral(plus, minus)
    }

    /// Same quantity as [`exact_single_axis`] computed as a ratio of
    /// term-by-term integrals.
    pub fn conditional_from_integrals(n_plus: u64, n_minus: u64, m_plus: u64, m_minus: u64) -> BigRational {
        BigRational::from_integer(binomial(n_plus + n_minus, n_plus))
            * single_axis_integral(m_plus + n_plus, m_minus + n_minus)
            / single_axis_integral(m_plus, m_minus)
    }

    pub fn repeat_probability(n_plus: u64, m_plus: u64) -> BigRational {
        BigRational::new(BigInt::from(m_plus + 1), BigInt::from(m_plus + n_plus + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_examples() {
        assert_relative_eq!(exact_single_axis(0, 0, 7, 3), 1.0, max_relative = 1e-14);
        assert_relative_eq!(exact_single_axis(1, 0, 1, 0), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(exact_single_axis(5, 0, 5, 0), 6.0 / 11.0, max_relative = 1e-14);
        assert_relative_eq!(exact_single_axis(1, 1, 2, 1), 0.4, max_relative = 1e-14);
    }

    #[test]
    fn rational_examples() {
        assert_eq!(rational::exact_single_axis(1, 0, 1, 0), q(2, 3));
        assert_eq!(rational::exact_single_axis(1, 1, 2, 1), q(2, 5));
        assert_eq!(rational::conditional_from_integrals(1, 1, 2, 1), q(2, 5));
        assert_eq!(rational::record_probability(2, 1), q(1, 4));
        assert_eq!(rational::single_axis_integral(2, 1), q(1, 12));
        assert_eq!(rational::exact_single_axis(0, 0, 4, 4), BigRational::one());
    }

    #[test]
    fn asymptotic_examples() {
        assert_relative_eq!(asymptotic_single_axis(1, 0, 1, 1).unwrap(), 0.5);
        assert_relative_eq!(asymptotic_single_axis(2, 0, 3, 1).unwrap(), 9.0 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(asymptotic_single_axis(0, 0, 5, 5).unwrap(), 1.0);
        assert_relative_eq!(asymptotic_single_axis(3, 0, 4, 0).unwrap(), 1.0);
        assert!(asymptotic_single_axis(1, 0, 0, 0).is_err());
        // the exact form approaches the limit as the past grows
        let limit = asymptotic_single_axis(2, 0, 3000, 1000).unwrap();
        assert_relative_eq!(exact_single_axis(2, 0, 3000, 1000), limit, max_relative = 1e-3);
    }

    #[test]
    fn repeat_examples() {
        assert_eq!(repeat_probability(0, 0), 1.0);
        assert_relative_eq!(repeat_probability(1, 1), 2.0 / 3.0);
        assert_relative_eq!(repeat_probability(1000, 1000), 1001.0 / 2001.0);
        assert_eq!(rational::repeat_probability(1000, 1000), q(1001, 2001));
        let half = rational::repeat_probability(1000, 1000).to_f64().unwrap();
        assert!((0.5..=0.501).contains(&half));
    }
}
