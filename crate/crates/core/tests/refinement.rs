use std::sync::Arc;

use ailfem_core::mesh::{Domain, Triangulation};
use ailfem_core::space::{error_norm, prolongate, DiscreteFunction, FeSpace, NormVariant};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_marks(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let count = rng.gen_range(1..=3.min(n));
    (0..count).map(|_| rng.gen_range(0..n)).collect()
}

fn check_children(coarse: &Triangulation, fine: &Triangulation) {
    assert_eq!(fine.parents().len(), fine.num_elements());
    for t in 0..fine.num_elements() {
        let p = fine.parents()[t];
        let lam = coarse.barycentric(p, fine.centroid(t));
        assert!(lam.iter().all(|&l| l > -1e-12), "child {t} outside parent {p}");
    }
}

#[test]
fn nvb_stays_conforming_over_random_rounds() {
    for domain in [Domain::UnitSquare, Domain::UnitSquareDiagonal, Domain::GoalAligned] {
        let mut rng = StdRng::seed_from_u64(7);
        let mut mesh = Triangulation::initial(domain);
        let area = mesh.total_area();
        let angle0 = mesh.refine_all().unwrap().refine_all().unwrap().min_angle();
        for round in 0..200 {
            let marks = random_marks(&mut rng, mesh.num_elements());
            let fine = mesh.refine_nvb(&marks).unwrap();
            assert!(fine.is_conforming(), "{} round {round}", domain.name());
            assert!((fine.total_area() - area).abs() < 1e-12);
            // every marked element is bisected
            for &t in &marks {
                assert!(fine.parents().iter().filter(|&&p| p == t).count() >= 2);
            }
            check_children(&mesh, &fine);
            mesh = fine;
        }
        // NVB produces finitely many similarity classes
        assert!(mesh.min_angle() >= angle0 * (1.0 - 1e-9), "{}", domain.name());
    }
}

#[test]
fn bisec3_stays_conforming_over_random_rounds() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut mesh = Triangulation::initial(Domain::UnitSquare);
    for round in 0..120 {
        let marks = random_marks(&mut rng, mesh.num_elements());
        let fine = mesh.refine_bisec3(&marks).unwrap();
        assert!(fine.is_conforming(), "round {round}");
        assert!((fine.total_area() - 1.0).abs() < 1e-12);
        for &t in &marks {
            assert!(fine.parents().iter().filter(|&&p| p == t).count() >= 4);
        }
        check_children(&mesh, &fine);
        mesh = fine;
    }
}

fn random_function(space: &Arc<FeSpace>, rng: &mut StdRng) -> DiscreteFunction {
    let c = (0..space.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DiscreteFunction::new(space.clone(), c).unwrap()
}

#[test]
fn prolongation_is_exact() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut coarse_mesh = Triangulation::initial(Domain::UnitSquare).refine_all().unwrap();
    for trial in 0..100 {
        let degree = 1 + trial % 4;
        let marks = random_marks(&mut rng, coarse_mesh.num_elements());
        let fine_mesh = if trial % 2 == 0 {
            coarse_mesh.refine_nvb(&marks).unwrap()
        } else {
            coarse_mesh.refine_bisec3(&marks).unwrap()
        };
        let coarse = Arc::new(FeSpace::new(Arc::new(coarse_mesh.clone()), degree).unwrap());
        let fine = Arc::new(FeSpace::new(Arc::new(fine_mesh.clone()), degree).unwrap());
        let u = random_function(&coarse, &mut rng);
        let v = prolongate(&u, &fine).unwrap();
        let err = error_norm(&v, |x| u.evaluate(&[x]).unwrap()[0], NormVariant::EpsWeightedH1 { epsilon: 1.0 });
        assert!(err <= 1e-12, "trial {trial}, degree {degree}: {err:e}");
        if trial % 10 == 9 {
            coarse_mesh = fine_mesh;
        }
    }
}

#[test]
fn prolongation_rejects_unrelated_meshes() {
    let a = Arc::new(FeSpace::new(Arc::new(Triangulation::initial(Domain::UnitSquare)), 1).unwrap());
    let b = Arc::new(FeSpace::new(Arc::new(Triangulation::initial(Domain::GoalAligned)), 1).unwrap());
    let c = Arc::new(FeSpace::new(Arc::new(Triangulation::initial(Domain::UnitSquare).uniform_refine()), 2).unwrap());
    let u = DiscreteFunction::zero(a);
    assert!(prolongate(&u, &b).is_err());
    assert!(prolongate(&u, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn refinement_is_nested(seed in any::<u64>(), rounds in 1usize..15) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut mesh = Triangulation::initial(Domain::UnitSquare);
        for _ in 0..rounds {
            let marks = random_marks(&mut rng, mesh.num_elements());
            let fine = mesh.refine_nvb(&marks).unwrap();
            prop_assert!(fine.num_elements() > mesh.num_elements());
            prop_assert!(fine.is_conforming());
            let before: std::collections::HashSet<[u64; 2]> =
                mesh.vertices().iter().map(|p| [p[0].to_bits(), p[1].to_bits()]).collect();
            let after: std::collections::HashSet<[u64; 2]> =
                fine.vertices().iter().map(|p| [p[0].to_bits(), p[1].to_bits()]).collect();
            prop_assert!(before.is_subset(&after));
            mesh = fine;
        }
    }
}
