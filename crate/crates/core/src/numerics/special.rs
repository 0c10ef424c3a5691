use statrs::function::gamma::ln_gamma;

const FACTORIALS: [u64; 21] = {
    let mut table = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

/// `ln n!`. Exact integer factorials up to 20, log-gamma beyond.
pub fn log_factorial(n: u64) -> f64 {
    match FACTORIALS.get(n as usize) {
        Some(&f) => (f as f64).ln(),
        None => ln_gamma(n as f64 + 1.0),
    }
}

/// `ln C(n, k)`; −∞ when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// `ln(mean^k e^{−mean} / k!)`, with the `mean = 0` limit handled.
pub fn log_poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * mean.ln() - mean - log_factorial(k)
}

/// `P(N > n)` for `N ~ Poisson(mean)`, summed upward from `n + 1`.
pub fn poisson_tail(mean: f64, n: u64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut k = n + 1;
    let mut log_term = log_poisson_pmf(k, mean);
    let mut sum = 0.0;
    loop {
        let term = log_term.exp();
        sum += term;
        // terms decrease geometrically with ratio mean/(k+1) once past the mode
        if (k as f64 + 1.0) > mean && term <= sum * 1e-18 {
            break;
        }
        k += 1;
        log_term += mean.ln() - (k as f64).ln();
        if k > n + 100_000_000 {
            break;
        }
    }
    sum.min(1.0)
}


/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

impl std::iter::Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        iter.for_each(|x| acc.add(x));
        acc
    }
}

#[cfg(test)]
mod compensated_tests {
    use super::CompensatedSum;

    #[test]
    fn recovers_cancelled_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().sum();
        assert_eq!(s.value(), 2.0);
        let tenths: CompensatedSum = std::iter::repeat_n(0.1, 10).sum();
        assert_eq!(tenths.value(), 1.0);
    }
}
