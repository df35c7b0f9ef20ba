use ailfem_core::adaptivity::{aitken_extrapolate, rate_fit, trailing_rate};
use ailfem_core::theory::{energy_bracket, lambda_opt, practical_delta, q_energy, q_norm, theta_prime};
use proptest::prelude::*;

#[test]
fn golden_values() {
    let q = q_norm(0.25, 1.0, 2.0).unwrap();
    assert!((q * q - 0.75).abs() <= 1e-12);
    let (kappa, big_k) = energy_bracket(0.5, 1.0, 2.0).unwrap();
    assert!((kappa - 1.0).abs() <= 1e-12);
    assert!((big_k - 1.5).abs() <= 1e-12);
    for (alpha, l) in [(1.0, 1.0), (1.0, 1.2), (0.8, 1.0), (2.0, 3.5)] {
        let q = q_energy(1.0 / l, alpha, l, l).unwrap();
        assert!((q * q - (1.0 - alpha * alpha / (l * l))).abs() <= 1e-12, "alpha {alpha}, L {l}");
    }
}

#[test]
fn out_of_range_arguments_are_rejected() {
    assert!(q_norm(0.0, 1.0, 2.0).is_err());
    assert!(q_norm(0.5, 1.0, 2.0).is_err());
    assert!(q_norm(0.1, 3.0, 2.0).is_err());
    assert!(q_energy(1.0, 1.0, 2.0, 1.0).is_err());
    assert!(energy_bracket(1.0, 1.0, 2.0).is_err());
    assert!(lambda_opt(1.0, 1.0, 1.0).is_err());
    assert!(theta_prime(0.5, 1.0, 1.0).is_err());
    assert!(q_norm(f64::NAN, 1.0, 2.0).is_err());
}

proptest! {
    #[test]
    fn norm_contraction_matches_expanded_form(alpha in 0.1..2.0f64, ratio in 1.0..4.0f64, s in 0.01..0.99f64) {
        let l = alpha * ratio;
        let delta = s * 2.0 * alpha / (l * l);
        let q = q_norm(delta, alpha, l).unwrap();
        let expanded = 1.0 - 2.0 * delta * alpha + delta * delta * l * l;
        prop_assert!((q * q - expanded).abs() <= 1e-12);
        prop_assert!((0.0..1.0).contains(&q));
    }

    #[test]
    fn energy_contraction_below_one(alpha in 0.1..2.0f64, r3 in 1.0..3.0f64, r6 in 1.0..2.0f64, s in 0.01..0.99f64) {
        let l3 = alpha * r3;
        let l6 = l3 * r6;
        let delta = s * 2.0 * alpha / (l6 * l6);
        let q = q_energy(delta, alpha, l3, l6).unwrap();
        prop_assert!((0.0..1.0).contains(&q));
        // a larger L[6M] never contracts better
        let q_worse = q_energy(delta * 0.99, alpha, l3, l6 * 1.01);
        if let Ok(qw) = q_worse {
            prop_assert!(qw >= q - 1e-12);
        }
    }

    #[test]
    fn bracket_is_ordered(alpha in 0.1..2.0f64, ratio in 1.0..4.0f64, s in 0.01..0.99f64) {
        let l = alpha * ratio;
        let delta = s * 2.0 / l;
        let (kappa, big_k) = energy_bracket(delta, alpha, l).unwrap();
        prop_assert!(kappa > 0.0 && kappa <= big_k);
    }

    #[test]
    fn practical_step_is_reciprocal(l in 1.0..100.0f64) {
        let (d, q2) = practical_delta(l);
        prop_assert!((d * l - 1.0).abs() <= 1e-15);
        prop_assert!((q2 - (1.0 - 1.0 / (l * l))).abs() <= 1e-15);
    }

    #[test]
    fn theta_prime_grows_with_lambda(theta in 0.05..0.95f64, a in 0.0..0.45f64, b in 0.5..0.95f64) {
        prop_assert!(theta_prime(theta, a, 1.0).unwrap() < theta_prime(theta, b, 1.0).unwrap());
        prop_assert_eq!(theta_prime(theta, 0.0, 1.0).unwrap(), theta);
    }

    #[test]
    fn rate_fit_recovers_power_laws(slope in -3.0..0.0f64, c in 0.01..100.0f64, x0 in 1.0..1e3f64) {
        let pts: Vec<(f64, f64)> = (0..30).map(|i| {
            let x = x0 * 1.3f64.powi(i);
            (x, c * x.powf(slope))
        }).collect();
        prop_assert!((rate_fit(&pts).unwrap() - slope).abs() <= 1e-9);
        prop_assert!((trailing_rate(&pts).unwrap() - slope).abs() <= 1e-9);
    }

    #[test]
    fn aitken_is_exact_on_geometric_sequences(limit in -10.0..10.0f64, a in 0.1..5.0f64, r in 0.05..0.9f64) {
        let seq: Vec<f64> = (0..5).map(|n| limit + a * r.powi(n)).collect();
        let (v, ok) = aitken_extrapolate(&seq).unwrap();
        prop_assert!(ok);
        prop_assert!((v - limit).abs() <= 1e-9 * (1.0 + limit.abs()));
    }
}
