use ailfem_core::adaptivity::doerfler_mark;
use ailfem_core::goal::combined_marking;
use proptest::prelude::*;

/// Smallest cardinality of a subset whose sum reaches θ·total, by enumeration.
fn brute_force_min(ind: &[f64], theta: f64) -> usize {
    let total: f64 = ind.iter().sum();
    let n = ind.len();
    let mut best = n;
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k >= best {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ind[i]).sum();
        if s >= theta * total {
            best = k;
        }
    }
    best
}

fn indicator_field() -> impl Strategy<Value = Vec<f64>> {
    // quantised values produce ties, zeros included
    prop::collection::vec(prop_oneof![0.0..10.0f64, (0u8..4).prop_map(f64::from)], 1..=12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn doerfler_is_minimal(ind in indicator_field(), theta in 0.05..=1.0f64) {
        let total: f64 = ind.iter().sum();
        prop_assume!(total > 0.0);
        let m = doerfler_mark(&ind, theta);
        prop_assert!(!m.exact);
        let captured: f64 = m.elements.iter().map(|&t| ind[t]).sum();
        prop_assert!(captured >= theta * total * (1.0 - 1e-14));
        prop_assert_eq!(m.elements.len(), brute_force_min(&ind, theta));
        prop_assert!(m.elements.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn combined_marking_is_the_smaller_admissible_set(
        eta in prop::collection::vec(0.01..5.0f64, 1..=12),
        zeta_scale in 0.1..10.0f64,
        theta in 0.1..=1.0f64,
    ) {
        let zeta: Vec<f64> = eta.iter().rev().map(|v| v * zeta_scale).collect();
        let m = combined_marking(&eta, &zeta, theta);
        let mp = doerfler_mark(&eta, theta);
        let md = doerfler_mark(&zeta, theta);
        prop_assert_eq!(m.elements.len(), mp.elements.len().min(md.elements.len()));
    }
}

#[test]
fn vanishing_field_marks_nothing() {
    let m = doerfler_mark(&[0.0; 7], 0.5);
    assert!(m.exact);
    assert!(m.elements.is_empty());
}

#[test]
fn full_bulk_marks_every_positive_indicator() {
    let ind = [3.0, 0.0, 1.0, 2.0, 0.0];
    assert_eq!(doerfler_mark(&ind, 1.0).elements, vec![0, 2, 3]);
}
