//! Integration and special-function kernels shared by the inference modules.
//!
//! Two quadrature families are provided:
//!
//! * uniform trapezoid sums on [`PeriodicGrid`]s for 2π-periodic integrands
//!   (spectrally accurate for smooth integrands), with a log-space variant
//!   for count-weighted products that would overflow a direct evaluation;
//! * Gauss-Legendre rules on `[-1, 1]`, exact for polynomials of degree
//!   `2·order − 1`.
//!
//! Node evaluations may run in parallel, but every reduction is a sequential
//! sum in node order, so results do not depend on the thread count.

mod gauss_legendre;
mod periodic;
mod special;

pub use gauss_legendre::{gauss_legendre_integrate, GaussLegendre};
pub use periodic::{
    adaptive_log_integrate, integrate_weighted, log_integrate, log_sum_exp, periodic_integrate,
    AdaptiveLogIntegral, LogWeightedIntegrand, PeriodicEstimate, PeriodicGrid,
    CONVERGENCE_TOLERANCE, DEFAULT_NODE_COUNT, DIRECT_PATH_MAX_EXPONENT, MAX_NODE_COUNT,
};
pub use special::{log_binomial, log_factorial, log_poisson_pmf, poisson_tail, CompensatedSum};
