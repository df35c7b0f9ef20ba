use std::sync::Arc;

use ailfem_core::cholesky::SparseCholesky;
use ailfem_core::mesh::{Domain, Triangulation};
use ailfem_core::problem::{builtin_problem, DiscreteProblem};
use ailfem_core::solver::{solve_to_stagnation, zarantonello_step};
use ailfem_core::space::{error_norm, DiscreteFunction, FeSpace};
use ailfem_core::sparse::CsrMatrix;
use proptest::prelude::*;

fn local_stiffness(space: &FeSpace, t: usize) -> Vec<Vec<f64>> {
    let tab = space.tabulation();
    let n = space.nodes_per_element();
    let mut k = vec![vec![0.0; n]; n];
    for (q, &w) in tab.rule.weights.iter().enumerate() {
        let shapes = tab.at(q);
        for i in 0..n {
            let gi = space.shape_gradient(t, &shapes[i]);
            for j in 0..n {
                let gj = space.shape_gradient(t, &shapes[j]);
                k[i][j] += w * space.area(t) * (gi[0] * gj[0] + gi[1] * gj[1]);
            }
        }
    }
    k
}

#[test]
fn p1_reference_stiffness() {
    let mesh = Triangulation::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
    // the stored vertex order puts the longest edge first
    let order = mesh.elements()[0];
    let space = FeSpace::new(Arc::new(mesh), 1).unwrap();
    let k = local_stiffness(&space, 0);
    let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    for i in 0..3 {
        for j in 0..3 {
            let e = expected[order[i]][order[j]];
            assert!((k[i][j] - e).abs() <= 1e-14, "({i},{j}) = {}", k[i][j]);
        }
    }
}

#[test]
fn local_stiffness_annihilates_constants() {
    let mesh = Triangulation::initial(Domain::GoalAligned).uniform_refine();
    for degree in 1..=4 {
        let space = FeSpace::new(Arc::new(mesh.clone()), degree).unwrap();
        for t in 0..mesh.num_elements() {
            let k = local_stiffness(&space, t);
            for row in &k {
                assert!(row.iter().sum::<f64>().abs() < 1e-11, "degree {degree}");
            }
        }
    }
}

fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn spd_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..25).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(0.0), 1 => -1.0..1.0f64], n * n).prop_map(move |v| {
            // diagonally dominant symmetric matrix with a random pattern
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..i {
                    a[i][j] = v[i * n + j];
                    a[j][i] = v[i * n + j];
                }
            }
            for i in 0..n {
                a[i][i] = 1.0 + a[i].iter().map(|x| x.abs()).sum::<f64>();
            }
            a
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cholesky_matches_dense_elimination(a in spd_matrix(), seed in 0u32..1000) {
        let n = a.len();
        let b: Vec<f64> = (0..n).map(|i| ((i as u32 * 7919 + seed) % 17) as f64 - 8.0).collect();
        let chol = SparseCholesky::factor(&CsrMatrix::from_dense(&a)).unwrap();
        let x = chol.solve(&b);
        let y = dense_solve(a, b);
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-10 * (1.0 + q.abs()));
        }
    }
}

fn sine_gordon_on(levels: usize, degree: usize) -> DiscreteProblem {
    let p = builtin_problem("sine_gordon").unwrap();
    let mut mesh = p.initial_mesh();
    for _ in 0..levels {
        mesh = mesh.uniform_refine();
    }
    DiscreteProblem::new(&p, Arc::new(FeSpace::new(Arc::new(mesh), degree).unwrap())).unwrap()
}

#[test]
fn residual_is_the_negative_energy_gradient() {
    let disc = sine_gordon_on(2, 2);
    let n = disc.dimension();
    let u = DiscreteFunction::new(disc.space.clone(), (0..n).map(|i| 0.3 * ((i as f64) * 0.7).sin()).collect())
        .unwrap();
    let st = disc.state(u.clone()).unwrap();
    for i in [0, n / 3, n - 1] {
        let h = 1e-5;
        let mut plus = u.coefficients.clone();
        let mut minus = u.coefficients.clone();
        plus[i] += h;
        minus[i] -= h;
        let ep = disc.state(DiscreteFunction::new(disc.space.clone(), plus).unwrap()).unwrap().energy;
        let em = disc.state(DiscreteFunction::new(disc.space.clone(), minus).unwrap()).unwrap().energy;
        let fd = (ep - em) / (2.0 * h);
        assert!((fd + st.residual[i]).abs() < 1e-8, "unknown {i}: {fd} vs {}", -st.residual[i]);
    }
}

#[test]
fn zarantonello_iteration_decreases_energy_to_the_galerkin_solution() {
    let disc = sine_gordon_on(3, 1);
    let mut cur = disc.zero_state().unwrap();
    let mut last = cur.energy;
    for _ in 0..8 {
        let next = zarantonello_step(&disc, &cur, 1.0).unwrap();
        assert!(next.state.energy <= last + 1e-15);
        last = next.state.energy;
        cur = next.state;
    }
    let (star, _) = solve_to_stagnation(&disc, cur, 1.0, 1e-15, 200).unwrap();
    let rmax = star.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    assert!(rmax < 1e-10, "residual {rmax:e}");
    assert!(zarantonello_step(&disc, &star, 1.0).unwrap().step_norm < 1e-10);
}

#[test]
fn galerkin_error_decays_at_order_m() {
    let p = builtin_problem("sine_gordon").unwrap();
    let exact = p.exact_solution.unwrap();
    for degree in [1usize, 2] {
        let errs: Vec<f64> = (2..5)
            .map(|levels| {
                let disc = sine_gordon_on(levels, degree);
                let start = disc.zero_state().unwrap();
                let (st, _) = solve_to_stagnation(&disc, start, 1.0, 1e-15, 200).unwrap();
                error_norm(&st.u, exact, p.norm)
            })
            .collect();
        for w in errs.windows(2) {
            // one uniform step halves h
            let order = (w[0] / w[1]).log2();
            assert!((order - degree as f64).abs() < 0.2, "degree {degree}: order {order}");
        }
    }
}
