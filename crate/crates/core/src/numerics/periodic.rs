use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default node count for phase integrals.
pub const DEFAULT_NODE_COUNT: usize = 2048;
/// Upper bound for automatic grid doubling.
pub const MAX_NODE_COUNT: usize = 1 << 20;
/// Relative doubling change `|I(n) − I(2n)| / |I(2n)|` accepted as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;
/// Count-weighted integrands with every exponent at or below this value are
/// summed directly; larger exponents switch to the max-shifted log path.
pub const DIRECT_PATH_MAX_EXPONENT: f64 = 30.0;

const MIN_NODE_COUNT: usize = 8;
const PARALLEL_MIN_NODES: usize = 8192;

/// Uniform grid `k·2π/n`, `k = 0..n`, on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct PeriodicGrid {
    node_count: usize,
}

impl PeriodicGrid {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < MIN_NODE_COUNT || !node_count.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "periodic grid needs a power-of-two node count >= {MIN_NODE_COUNT}, got {node_count}"
            )));
        }
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.node_count as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        TAU * k as f64 / self.node_count as f64
    }

    /// Node `k` as an angle in `(−π, π]`; `signed_node(n − k)` is exactly
    /// `−signed_node(k)`.
    pub fn signed_node(&self, k: usize) -> f64 {
        let n = self.node_count as isize;
        let k = k as isize;
        let k = if k > n / 2 { k - n } else { k };
        TAU * k as f64 / n as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.node_count).map(move |k| self.node(k))
    }

    /// Index of the node at `2π − φ_k`.
    pub fn mirror_index(&self, k: usize) -> usize {
        (self.node_count - k) % self.node_count
    }

    /// The grid with twice as many nodes; its even nodes coincide with `self`.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.node_count * 2)
    }
}

impl Default for PeriodicGrid {
    fn default() -> Self {
        Self { node_count: DEFAULT_NODE_COUNT }
    }
}

impl TryFrom<usize> for PeriodicGrid {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PeriodicGrid> for usize {
    fn from(grid: PeriodicGrid) -> usize {
        grid.node_count
    }
}

/// Evaluates `f` at `angle(k)` for `k in 0..count`, preserving order.
///
/// Callers pass signed angles in `(−π, π]` so that an even integrand yields
/// bitwise identical values at mirrored nodes.
fn evaluate<F>(count: usize, angle: impl Fn(usize) -> f64 + Sync, f: &F) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    if count >= PARALLEL_MIN_NODES {
        (0..count).into_par_iter().map(|k| f(angle(k))).collect()
    } else {
        (0..count).map(|k| f(angle(k))).collect()
    }
}

fn check_finite(values: &[f64], angle: impl Fn(usize) -> f64) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index, angle: angle(index), value: values[index] }),
        None => Ok(()),
    }
}

/// Log-space values may be −∞ (a zero factor) but never NaN or +∞.
fn check_log_values(values: &[f64], angle: impl Fn(usize) -> f64) -> Result<()> {
    match values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        Some(index) => Err(Error::NonFinite { index, angle: angle(index), value: values[index] }),
        None => Ok(()),
    }
}

/// Trapezoid estimate together with the doubling error `|I(2n) − I(n)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicEstimate {
    pub value: f64,
    pub doubling_error: f64,
}

/// `(2π/n)·Σ f(φ_k)` over the grid nodes.
///
/// The doubling error is obtained by additionally evaluating `f` at the
/// midpoints, i.e. the odd nodes of the refined grid.
pub fn periodic_integrate<F>(f: &F, grid: PeriodicGrid) -> Result<PeriodicEstimate>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    let n = grid.node_count();
    let h = grid.spacing();
    let values = evaluate(n, |k| grid.signed_node(k), f);
    check_finite(&values, |k| grid.signed_node(k))?;
    let value = h * values.iter().sum::<f64>();

    let fine = PeriodicGrid { node_count: 2 * n };
    let mid_values = evaluate(n, |k| fine.signed_node(2 * k + 1), f);
    check_finite(&mid_values, |k| fine.signed_node(2 * k + 1))?;
    let refined = 0.5 * (value + h * mid_values.iter().sum::<f64>());

    Ok(PeriodicEstimate { value, doubling_error: (refined - value).abs() })
}

/// `ln Σ exp(x_k)`, with −∞ entries contributing nothing.
///
/// Returns −∞ for an empty slice or one made only of −∞.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

type AngleFn<'a> = Box<dyn Fn(f64) -> f64 + Sync + 'a>;

struct LogTerm<'a> {
    exponent: f64,
    log_base: AngleFn<'a>,
}

/// `exp(extra(φ)) · Π_k base_k(φ)^{e_k}`, described by the logs of its
/// factors.
///
/// A base whose log is −∞ makes the whole integrand zero at that angle when
/// its exponent is positive; with exponent zero the factor is 1.
pub struct LogWeightedIntegrand<'a> {
    terms: Vec<LogTerm<'a>>,
    extra_log_factor: Option<AngleFn<'a>>,
}

impl<'a> LogWeightedIntegrand<'a> {
    pub fn new() -> Self {
        Self { terms: Vec::new(), extra_log_factor: None }
    }

    /// Adds the factor `exp(log_base(φ))^exponent`.
    ///
    /// Panics if `exponent` is negative or not finite.
    pub fn with_term(mut self, exponent: f64, log_base: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        assert!(
            exponent.is_finite() && exponent >= 0.0,
            "exponent must be finite and non-negative, got {exponent}"
        );
        self.terms.push(LogTerm { exponent, log_base: Box::new(log_base) });
        self
    }

    pub fn with_extra_log_factor(mut self, extra: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        self.extra_log_factor = Some(Box::new(extra));
        self
    }

    pub fn max_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.exponent).fold(0.0, f64::max)
    }

    pub fn log_value(&self, angle: f64) -> f64 {
        let mut acc = self.extra_log_factor.as_ref().map_or(0.0, |f| f(angle));
        for term in &self.terms {
            if term.exponent == 0.0 {
                continue;
            }
            let log_base = (term.log_base)(angle);
            if log_base == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            acc += term.exponent * log_base;
        }
        acc
    }
}

impl Default for LogWeightedIntegrand<'_> {
    fn default() -> Self {
        Self::new()
    }
}

/// Log of the trapezoid sum of `exp(log_f)` on the grid.
fn log_trapezoid<F>(log_f: &F, grid: PeriodicGrid) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    let values = evaluate(grid.node_count(), |k| grid.signed_node(k), log_f);
    check_log_values(&values, |k| grid.signed_node(k))?;
    let lse = log_sum_exp(&values);
    if lse == f64::NEG_INFINITY {
        return Err(Error::ZeroIntegrand);
    }
    Ok((lse + grid.spacing().ln(), values))
}

/// Log of the trapezoid sum of the integrand, computed with a max shift so
/// that products with very large exponents neither overflow nor underflow.
pub fn log_integrate(integrand: &LogWeightedIntegrand<'_>, grid: PeriodicGrid) -> Result<f64> {
    log_trapezoid(&|phi| integrand.log_value(phi), grid).map(|(v, _)| v)
}

/// Log of the integral, choosing the direct path when all exponents are at
/// most [`DIRECT_PATH_MAX_EXPONENT`] and the log path otherwise.
pub fn integrate_weighted(integrand: &LogWeightedIntegrand<'_>, grid: PeriodicGrid) -> Result<f64> {
    if integrand.max_exponent() > DIRECT_PATH_MAX_EXPONENT {
        return log_integrate(integrand, grid);
    }
    let values = evaluate(grid.node_count(), |k| grid.signed_node(k), &|phi| integrand.log_value(phi));
    check_log_values(&values, |k| grid.signed_node(k))?;
    let sum: f64 = values.iter().map(|v| v.exp()).sum();
    if sum == 0.0 {
        return Err(Error::ZeroIntegrand);
    }
    let value = grid.spacing() * sum;
    if !value.is_finite() {
        // direct path overflowed; the log path cannot
        return log_integrate(integrand, grid);
    }
    Ok(value.ln())
}

/// Result of [`adaptive_log_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveLogIntegral {
    /// Log of the trapezoid sum on `grid`.
    pub log_value: f64,
    /// Coarsest grid whose sum agrees with the doubled grid.
    pub grid: PeriodicGrid,
    /// `|I(n) − I(2n)| / |I(2n)|` observed for `grid`.
    pub relative_change: f64,
}

/// Log-space trapezoid integration of `exp(log_f)` that doubles the grid,
/// starting from `start`, until `|I(n) − I(2n)|/|I(2n)| ≤ CONVERGENCE_TOLERANCE`.
///
/// Fails with [`Error::NotConverged`] once the doubled grid would exceed
/// [`MAX_NODE_COUNT`].
pub fn adaptive_log_integrate<F>(log_f: &F, start: PeriodicGrid) -> Result<AdaptiveLogIntegral>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    let mut grid = start;
    let (mut log_value, mut values) = log_trapezoid(log_f, grid)?;
    let mut last_change = f64::INFINITY;
    loop {
        let n = grid.node_count();
        if 2 * n > MAX_NODE_COUNT {
            return Err(Error::NotConverged {
                max_nodes: MAX_NODE_COUNT,
                relative_change: last_change,
            });
        }
        let fine = grid.refined()?;
        let mids = evaluate(n, |k| fine.signed_node(2 * k + 1), log_f);
        check_log_values(&mids, |k| fine.signed_node(2 * k + 1))?;
        let mut fine_values = Vec::with_capacity(2 * n);
        for (v, m) in values.iter().zip(&mids) {
            fine_values.push(*v);
            fine_values.push(*m);
        }
        let fine_log_value = log_sum_exp(&fine_values) + fine.spacing().ln();
        let relative_change = (log_value - fine_log_value).exp_m1().abs();
        if relative_change <= CONVERGENCE_TOLERANCE {
            return Ok(AdaptiveLogIntegral { log_value, grid, relative_change });
        }
        last_change = relative_change;
        grid = fine;
        log_value = fine_log_value;
        values = fine_values;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `ln ∫ ((1+cos φ)/2)^m dφ = ln(2π·C(2m, m)/4^m)`, from the asymptotic
    /// series of the central binomial coefficient (accurate for m ≥ 10³).
    fn log_cardioid_power_integral(m: f64) -> f64 {
        let series = 1.0 - 1.0 / (8.0 * m) + 1.0 / (128.0 * m * m) + 5.0 / (1024.0 * m.powi(3))
            - 21.0 / (32768.0 * m.powi(4));
        TAU.ln() - 0.5 * (std::f64::consts::PI * m).ln() + series.ln()
    }

    #[test]
    fn grid_rejects_bad_counts() {
        assert!(PeriodicGrid::new(4).is_err());
        assert!(PeriodicGrid::new(100).is_err());
        assert!(PeriodicGrid::new(8).is_ok());
    }

    #[test]
    fn grid_nodes_are_uniform() {
        let grid = PeriodicGrid::new(16).unwrap();
        let nodes: Vec<f64> = grid.nodes().collect();
        assert_eq!(nodes[0], 0.0);
        assert_relative_eq!(nodes[4], std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        assert!(nodes.iter().all(|&x| (0.0..TAU).contains(&x)));
        assert_eq!(grid.mirror_index(0), 0);
        assert_eq!(grid.mirror_index(3), 13);
        assert_eq!(grid.signed_node(13), -grid.signed_node(3));
        assert_eq!(grid.signed_node(8), std::f64::consts::PI);
    }

    #[test]
    fn constant_integrates_to_two_pi() {
        for n in [8, 64, 2048] {
            let est = periodic_integrate(&|_| 1.0, PeriodicGrid::new(n).unwrap()).unwrap();
            assert_relative_eq!(est.value, TAU, max_relative = 1e-15);
            assert!(est.doubling_error < 1e-14);
        }
    }

    #[test]
    fn cosine_integrates_to_zero() {
        let est = periodic_integrate(&f64::cos, PeriodicGrid::new(64).unwrap()).unwrap();
        assert!(est.value.abs() < 1e-14);
    }

    #[test]
    fn normalized_cardioid_integrates_to_one() {
        let f = |phi: f64| (1.0 + phi.cos()) / TAU;
        let est = periodic_integrate(&f, PeriodicGrid::new(256).unwrap()).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn non_finite_node_is_reported() {
        let f = |phi: f64| if phi == 0.0 { f64::NAN } else { 1.0 };
        match periodic_integrate(&f, PeriodicGrid::new(8).unwrap()) {
            Err(Error::NonFinite { index: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_integrate_of_unit_is_log_two_pi() {
        let integrand = LogWeightedIntegrand::new()
            .with_term(0.0, |phi: f64| phi.cos().ln())
            .with_extra_log_factor(|_| 0.0);
        let v = log_integrate(&integrand, PeriodicGrid::new(64).unwrap()).unwrap();
        assert_relative_eq!(v, TAU.ln(), max_relative = 1e-15);
    }

    #[test]
    fn zero_base_node_is_skipped() {
        // (1 − cos φ)/2 vanishes at φ = 0
        let integrand =
            LogWeightedIntegrand::new().with_term(1.0, |phi: f64| ((1.0 - phi.cos()) / 2.0).ln());
        assert_eq!(integrand.log_value(0.0), f64::NEG_INFINITY);
        let v = log_integrate(&integrand, PeriodicGrid::new(64).unwrap()).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.ln(), max_relative = 1e-14);
    }

    #[test]
    fn all_zero_integrand_is_an_error() {
        let integrand = LogWeightedIntegrand::new().with_term(2.0, |_| f64::NEG_INFINITY);
        assert!(matches!(
            log_integrate(&integrand, PeriodicGrid::new(8).unwrap()),
            Err(Error::ZeroIntegrand)
        ));
    }

    #[test]
    fn large_exponent_stays_finite_and_scales() {
        let half_log = |phi: f64| ((1.0 + phi.cos()) / 2.0).ln();
        let grid = PeriodicGrid::new(4096).unwrap();
        let big = log_integrate(&LogWeightedIntegrand::new().with_term(1e4, half_log), grid).unwrap();
        assert!(big.is_finite());
        assert_relative_eq!(big, log_cardioid_power_integral(10_000.0), max_relative = 1e-12);

        let small = LogWeightedIntegrand::new().with_term(10.0, half_log);
        let log_path = log_integrate(&small, grid).unwrap();
        let direct = periodic_integrate(&|phi| (10.0 * half_log(phi)).exp(), grid)
            .unwrap()
            .value
            .ln();
        assert_relative_eq!(log_path, direct, max_relative = 1e-12);
        let exact_small = TAU.ln() + crate::numerics::log_binomial(20, 10) - 10.0 * 4f64.ln();
        assert_relative_eq!(log_path, exact_small, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_integration_refines_sharp_peaks() {
        let log_f = |phi: f64| 2e5 * ((1.0 + phi.cos()) / 2.0).ln();
        let res = adaptive_log_integrate(&log_f, PeriodicGrid::new(64).unwrap()).unwrap();
        assert!(res.grid.node_count() > 64);
        assert!(res.relative_change <= CONVERGENCE_TOLERANCE);
        assert_relative_eq!(res.log_value, log_cardioid_power_integral(2e5), max_relative = 1e-12);
    }
}
