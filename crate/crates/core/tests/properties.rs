use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qbayes::bloch::{Axis, Sign};
use qbayes::laser::{
    phase_posterior, phase_posterior_on_grid, predict_counts, BeamParams, DetectionEvent, DetectionHistory, Detector,
    PhasePosterior, PhasePredictor,
};
use qbayes::numerics::{
    gauss_legendre_integrate, log_factorial, log_integrate, periodic_integrate, LogWeightedIntegrand, PeriodicGrid,
};
use qbayes::oracle::{bayes_conditional, QubitMeasurement};
use qbayes::spin::{asymptotic_single_axis, conditional_record, exact_single_axis, rational, BlochPrior, SpinRecord};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// numerics

#[test]
fn gauss_legendre_reproduces_the_beta_identity() {
    for p in 0..=12u64 {
        for q in 0..=12u64 {
            let order = ((p + q) / 2 + 1).max(2) as usize;
            let value = gauss_legendre_integrate(
                |x| 0.5 * ((1.0 + x) / 2.0).powi(p as i32) * ((1.0 - x) / 2.0).powi(q as i32),
                order,
            )
            .unwrap();
            let exact = (log_factorial(p) + log_factorial(q) - log_factorial(p + q + 1)).exp();
            assert!(rel(value, exact) <= 1e-12, "p={p} q={q}: {value} vs {exact}");
        }
    }
}

proptest! {
    #[test]
    fn log_path_agrees_with_direct_path(
        exponents in prop::collection::vec(0u32..25, 1..4),
        depths in prop::collection::vec(0.05f64..0.95, 3),
        offsets in prop::collection::vec(-PI..PI, 3),
    ) {
        let mut integrand = LogWeightedIntegrand::new();
        for (i, &e) in exponents.iter().enumerate() {
            let (c, o) = (depths[i], offsets[i]);
            integrand = integrand.with_term(e as f64, move |phi: f64| (1.0 + c * (phi - o).cos()).ln());
        }
        let grid = PeriodicGrid::new(512).unwrap();
        let via_logs = log_integrate(&integrand, grid).unwrap().exp();
        let direct = periodic_integrate(&|phi: f64| integrand.log_value(phi).exp(), grid).unwrap().value;
        prop_assert!(rel(via_logs, direct) <= 1e-12, "{via_logs} vs {direct}");
    }
}

// operator oracle

fn sign_of(bit: bool) -> Sign {
    if bit { Sign::Plus } else { Sign::Minus }
}

fn axis_of(i: u8) -> Axis {
    [Axis::X, Axis::Y, Axis::Z][i as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_future_outcomes_sum_to_one(
        past in prop::collection::vec((0u8..3, any::<bool>()), 0..3),
        future_axes in prop::collection::vec(0u8..3, 1..3),
        ball in any::<bool>(),
    ) {
        let prior = if ball { BlochPrior::UniformBall } else { BlochPrior::UniformSphere };
        let copies = past.len() + future_axes.len();
        let past: Vec<_> = past.iter().enumerate()
            .map(|(q, &(a, s))| QubitMeasurement::new(q, axis_of(a), sign_of(s)))
            .collect();
        let mut total = 0.0;
        for pattern in 0..(1u32 << future_axes.len()) {
            let future: Vec<_> = future_axes.iter().enumerate()
                .map(|(i, &a)| QubitMeasurement::new(past.len() + i, axis_of(a), sign_of(pattern >> i & 1 == 1)))
                .collect();
            total += bayes_conditional(&prior, copies, &past, &future).unwrap();
        }
        prop_assert!((total - 1.0).abs() <= 1e-10, "{total}");
    }

    #[test]
    fn oracle_ignores_event_order(
        events in prop::collection::vec((0u8..3, any::<bool>()), 2..5),
        split in 1usize..4,
        rotation in 0usize..4,
    ) {
        let split = split.min(events.len() - 1);
        let copies = events.len();
        let all: Vec<_> = events.iter().enumerate()
            .map(|(q, &(a, s))| QubitMeasurement::new(q, axis_of(a), sign_of(s)))
            .collect();
        let (past, future) = all.split_at(split);
        let reference = bayes_conditional(&BlochPrior::UniformSphere, copies, past, future).unwrap();
        let mut shuffled_past = past.to_vec();
        shuffled_past.rotate_left(rotation % past.len());
        let mut shuffled_future = future.to_vec();
        shuffled_future.reverse();
        let permuted = bayes_conditional(&BlochPrior::UniformSphere, copies, &shuffled_past, &shuffled_future).unwrap();
        prop_assert!(rel(permuted, reference) <= 1e-10);
    }
}

// spin predictions

#[test]
fn completeness_of_the_closed_form() {
    for m_plus in 0..=20u64 {
        for m_minus in 0..=(20 - m_plus) {
            for n in 0..=20u64 {
                let total: f64 = (0..=n).map(|n_plus| exact_single_axis(n_plus, n - n_plus, m_plus, m_minus)).sum();
                assert!((total - 1.0).abs() <= 1e-12, "N={n} M=({m_plus},{m_minus}): {total}");
            }
        }
    }
}

fn binomial(n: u64, k: u64) -> BigRational {
    let mut c = BigInt::from(1);
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(c)
}

proptest! {
    #[test]
    fn chain_rule_holds_exactly(
        m in (0u64..=4, 0u64..=4),
        first in (0u64..=3, 0u64..=3),
        second in (0u64..=3, 0u64..=3),
    ) {
        let ((mp, mm), (ap, am), (bp, bm)) = (m, first, second);
        let integral = rational::single_axis_integral;
        let both = binomial(ap + am, ap) * binomial(bp + bm, bp) * integral(mp + ap + bp, mm + am + bm)
            / integral(mp, mm);
        let chained = rational::exact_single_axis(ap, am, mp, mm) * rational::exact_single_axis(bp, bm, mp + ap, mm + am);
        prop_assert_eq!(both, chained);
    }
}

#[test]
fn asymptotic_error_falls_like_one_over_m() {
    for (n_plus, n_minus, fraction) in [(2u64, 1u64, 0.7), (3, 0, 0.9), (1, 1, 0.5)] {
        let error = |m: u64| {
            let m_plus = (fraction * m as f64).round() as u64;
            let exact = exact_single_axis(n_plus, n_minus, m_plus, m - m_plus);
            (exact - asymptotic_single_axis(n_plus, n_minus, m_plus, m - m_plus).unwrap()).abs()
        };
        let (e2, e3, e4) = (error(100), error(1000), error(10_000));
        let slope = (e4.ln() - e2.ln()) / (10_000f64.ln() - 100f64.ln());
        assert!((-1.1..=-0.9).contains(&slope), "N=({n_plus},{n_minus}): slope {slope}");
        let n2 = ((n_plus + n_minus) as f64).powi(2);
        for (m, e) in [(100.0, e2), (1000.0, e3), (10_000.0, e4)] {
            assert!(e <= n2 / m, "N=({n_plus},{n_minus}) M={m}: {e}");
        }
    }
}

#[test]
fn record_probability_matches_the_rational_law_through_quadrature() {
    for m in 0..=40u64 {
        for plus in 0..=m {
            let record = SpinRecord::single_axis(Axis::Z, plus, m - plus);
            let p = qbayes::spin::record_probability(&record, &BlochPrior::UniformSphere).unwrap();
            assert!(rel(p, 1.0 / (m + 1) as f64) <= 1e-12, "M={m} plus={plus}: {p}");
        }
    }
}

#[test]
fn conditional_record_exactness_spot_check() {
    let past = SpinRecord::single_axis(Axis::Y, 7, 2);
    let future = SpinRecord::single_axis(Axis::Y, 3, 1);
    let quad = conditional_record(&future, &past, &BlochPrior::UniformSphere).unwrap();
    assert!(rel(quad, exact_single_axis(3, 1, 7, 2)) <= 1e-12);
}

// laser predictions

fn history_strategy() -> impl Strategy<Value = DetectionHistory> {
    prop::collection::vec((0.05f64..1.5, 0u64..6, 0u64..6), 1..4).prop_map(|steps| {
        let mut t = 0.0;
        let events = steps
            .into_iter()
            .map(|(dt, m_c, m_d)| {
                t += dt;
                DetectionEvent::new(t, m_c, m_d)
            })
            .collect();
        DetectionHistory::new(events).unwrap()
    })
}

fn params_strategy() -> impl Strategy<Value = BeamParams> {
    (0.3f64..2.0, 0.3f64..2.0, 0.05f64..1.0, -2.0f64..2.0)
        .prop_map(|(a, b, eta, dw)| BeamParams::new(a, b, eta, dw).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn posterior_is_normalized(history in history_strategy(), params in params_strategy()) {
        let post = phase_posterior(&history, &params).unwrap();
        prop_assert!(post.density().iter().all(|&d| d >= 0.0));
        prop_assert!((post.integrate(|_| 1.0) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sequential_updates_equal_the_batch_posterior(history in history_strategy(), params in params_strategy()) {
        let grid = PeriodicGrid::new(2048).unwrap();
        let batch = phase_posterior_on_grid(&history, &params, grid).unwrap();
        let mut seq = PhasePosterior::uniform(grid);
        for event in history.events() {
            seq = seq.update(event, &params).unwrap();
        }
        let peak = batch.density().iter().cloned().fold(0.0, f64::max);
        for (x, y) in seq.density().iter().zip(batch.density()) {
            prop_assert!((x - y).abs() <= 1e-10 * peak, "{x} vs {y}");
        }
    }

    #[test]
    fn predictions_are_covariant_under_time_shifts(
        history in history_strategy(),
        params in params_strategy(),
        shift in -5.0f64..5.0,
        lead in 0.0f64..2.0,
    ) {
        let t = history.events().last().unwrap().time + lead;
        let moved = history.shifted(shift).unwrap();
        for detector in [Detector::C, Detector::D] {
            let before = predict_counts(detector, t, &history, &params, None).unwrap();
            let after = predict_counts(detector, t + shift, &moved, &params, None).unwrap();
            for n in 0..=before.n_max().min(12) {
                let (p, q) = (before.probability(n), after.probability(n));
                prop_assert!((p - q).abs() <= 1e-10 * p.max(1e-300) + 1e-15, "n={n}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn counts_are_normalized_and_marginalize(
        history in history_strategy(),
        params in params_strategy(),
        lead in 0.0f64..2.0,
    ) {
        let t = history.events().last().unwrap().time + lead;
        let predictor = PhasePredictor::new(history, params).unwrap();
        let c = predictor.counts(Detector::C, t, None).unwrap();
        let d = predictor.counts(Detector::D, t, None).unwrap();
        for dist in [&c, &d] {
            prop_assert!(dist.probabilities.iter().all(|&p| p >= 0.0));
            prop_assert!((dist.total() + dist.tail_bound - 1.0).abs() <= 1e-9);
        }
        for n_c in 0..=2u64 {
            let summed: f64 = (0..=d.n_max() as u64).map(|n_d| predictor.joint(n_c, n_d, t).unwrap()).sum();
            let marginal = c.probability(n_c as usize);
            prop_assert!((summed - marginal).abs() <= c.tail_bound + 4.0 * f64::EPSILON * marginal);
        }
    }
}
