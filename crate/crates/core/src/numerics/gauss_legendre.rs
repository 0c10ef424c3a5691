use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
///
/// An `order`-point rule integrates polynomials of degree `2·order − 1`
/// exactly. Nodes are the roots of the Legendre polynomial `P_order`,
/// located by Newton iteration on the three-term recurrence; weights are
/// `2 / ((1 − x²) P'_order(x)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `(P_n(x), P'_n(x))` via the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Legendre order must be at least 2, got {order}"
            )));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess for the i-th largest root
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Shared rule from a process-wide cache.
    pub fn cached(order: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(order)?);
        cache.lock().expect("rule cache poisoned").insert(order, Arc::clone(&rule));
        Ok(rule)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// `∫_{-1}^{1} f(x) dx` with an `order`-point rule.
pub fn gauss_legendre_integrate(f: impl Fn(f64) -> f64, order: usize) -> Result<f64> {
    let rule = GaussLegendre::cached(order)?;
    let mut sum = 0.0;
    for (index, (x, w)) in rule.iter().enumerate() {
        let value = f(x);
        if !value.is_finite() {
            return Err(Error::NonFinite { index, angle: x, value });
        }
        sum += w * value;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_order_below_two() {
        assert!(GaussLegendre::new(1).is_err());
        assert!(gauss_legendre_integrate(|_| 1.0, 0).is_err());
    }

    #[test]
    fn constant_and_odd_integrands() {
        assert_relative_eq!(gauss_legendre_integrate(|_| 1.0, 2).unwrap(), 2.0, max_relative = 1e-15);
        assert!(gauss_legendre_integrate(|x| x.powi(7), 4).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cubic_beta_integrand() {
        // ∫ ((1+x)/2)² (1−x)/2 dx = 2 ∫₀¹ u²(1−u) du = 1/6
        let f = |x: f64| ((1.0 + x) / 2.0).powi(2) * (1.0 - x) / 2.0;
        assert_relative_eq!(gauss_legendre_integrate(f, 4).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn exact_up_to_degree_two_n_minus_one() {
        for order in [2usize, 3, 7, 16, 65] {
            let rule = GaussLegendre::new(order).unwrap();
            for degree in 0..2 * order {
                let exact = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
                let got = rule.integrate(|x| x.powi(degree as i32));
                assert!((got - exact).abs() < 1e-13, "order {order} degree {degree}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn high_order_rules_are_sane() {
        let rule = GaussLegendre::new(1000).unwrap();
        assert_relative_eq!(rule.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-13);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights().iter().all(|&w| w > 0.0));
    }
}
