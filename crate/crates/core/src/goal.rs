//! Goal-oriented driver: linearized dual problem, goal functional and
//! product estimator.

use alloc::vec;
use alloc::vec::Vec;

use crate::adaptivity::{doerfler_mark, run_driver, AdaptiveConfig, LevelHook, Marking, RunLog, StepRecord, StepSize};
use crate::error::{Error, Result};
use crate::estimator::{dual_indicators, IndicatorField};
use crate::problem::{builtin_problem, in_omega_g, DiscreteProblem, ModelProblem};
use crate::solver::{LinearSolveReport, SpdSolver, LINEAR_TOL};
use crate::space::{assemble_inner_product, assemble_load, assemble_weighted_mass, DiscreteFunction, FeSpace, NormVariant};

/// Reference value G(u⋆) of the built-in goal problem.
pub const GOAL_REFERENCE: f64 = -0.0015849518088245;

#[derive(Debug, Clone, Copy)]
pub struct GoalSetup {
    pub primal: ModelProblem,
    /// g = χ_{Ω_g}(−1, 0)
    pub g: fn([f64; 2]) -> [f64; 2],
    pub in_goal_region: fn([f64; 2]) -> bool,
    pub reference: Option<f64>,
}

pub fn goal_field(x: [f64; 2]) -> [f64; 2] {
    if in_omega_g(x) {
        [-1.0, 0.0]
    } else {
        [0.0, 0.0]
    }
}

impl GoalSetup {
    pub fn builtin() -> Self {
        GoalSetup {
            primal: builtin_problem("goal").expect("built-in"),
            g: goal_field,
            in_goal_region: in_omega_g,
            reference: Some(GOAL_REFERENCE),
        }
    }
}

/// Solves (∇z, ∇v) + (b′(w) z, v) = (g, ∇v) for all v.
pub fn solve_dual(
    w: &DiscreteFunction,
    b_prime: fn(f64) -> f64,
    g: fn([f64; 2]) -> [f64; 2],
) -> Result<(DiscreteFunction, LinearSolveReport)> {
    let space = w.space();
    let mut matrix = assemble_inner_product(space, NormVariant::Energy { epsilon: 1.0 });
    matrix.add_scaled(1.0, &assemble_weighted_mass(space, w, b_prime));
    let rhs = assemble_load(space, |_| 0.0, g);
    let (z, rep) = SpdSolver::with_coordinates(matrix, &space.unknown_coordinates())?.solve(&rhs, LINEAR_TOL)?;
    Ok((DiscreteFunction::new(space.clone(), z)?, rep))
}

/// Every element must lie on one side of x₁ + x₂ = `level`.
fn check_alignment(u: &DiscreteFunction, level: f64) -> Result<()> {
    let mesh = u.space().mesh();
    for t in 0..mesh.num_elements() {
        let s: Vec<f64> = mesh.element_vertices(t).iter().map(|p| p[0] + p[1] - level).collect();
        let above = s.iter().all(|&v| v >= -1e-12);
        let below = s.iter().all(|&v| v <= 1e-12);
        if !(above || below) {
            return Err(Error::Misaligned(t));
        }
    }
    Ok(())
}

/// G(u) = −∫_{Ω_g} ∂₁u, integrated exactly over the elements inside Ω_g.
pub fn goal_value(u: &DiscreteFunction, in_region: fn([f64; 2]) -> bool) -> Result<f64> {
    check_alignment(u, 1.5)?;
    let sp = u.space();
    Ok(goal_from_local(sp, in_region, |t, c| sp.gather(t, &u.coefficients, c)))
}

fn goal_from_local(sp: &FeSpace, in_region: fn([f64; 2]) -> bool, mut local: impl FnMut(usize, &mut [f64])) -> f64 {
    let tab = sp.tabulation();
    let mut c = vec![0.0; sp.nodes_per_element()];
    let mut g = 0.0;
    for t in 0..sp.mesh().num_elements() {
        if !in_region(sp.mesh().centroid(t)) {
            continue;
        }
        local(t, &mut c);
        let area = sp.area(t);
        for (q, &w) in tab.rule.weights.iter().enumerate() {
            let d1: f64 = tab.at(q).iter().zip(&c).map(|(s, ci)| ci * sp.shape_gradient(t, s)[0]).sum();
            g -= w * area * d1;
        }
    }
    g
}

/// Smaller of the two Dörfler sets, ties to the primal one.
pub fn combined_marking(eta: &[f64], zeta: &[f64], theta: f64) -> Marking {
    let mu = doerfler_mark(eta, theta);
    let mz = doerfler_mark(zeta, theta);
    if mu.exact {
        return mu;
    }
    if !mz.exact && mz.elements.len() < mu.elements.len() {
        mz
    } else {
        mu
    }
}

/// Per-level dual data exposed for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLevel {
    pub zeta: f64,
    pub iterations: usize,
    pub marked_primal: bool,
}

struct GoalHook {
    setup: GoalSetup,
    duals: Vec<DualLevel>,
    failure: Option<Error>,
}

impl LevelHook for GoalHook {
    fn goal_value(&mut self, u: &DiscreteFunction) -> Option<f64> {
        match goal_value(u, self.setup.in_goal_region) {
            Ok(v) => Some(v),
            Err(e) => {
                self.failure.get_or_insert(e);
                Some(f64::NAN)
            }
        }
    }

    fn goal_reference(&self) -> Option<f64> {
        self.setup.reference
    }

    fn finish_level(
        &mut self,
        _disc: &DiscreteProblem,
        u: &DiscreteFunction,
        eta: &IndicatorField,
        theta: f64,
    ) -> Result<Option<(f64, Marking)>> {
        if let Some(e) = self.failure.take() {
            return Err(e);
        }
        let b_prime = self.setup.primal.nonlinearity.b_prime;
        let (z, rep) = solve_dual(u, b_prime, self.setup.g)?;
        let zeta_field = dual_indicators(b_prime, self.setup.g, u, &z);
        let zeta = zeta_field.total();
        let marking = combined_marking(&eta.values, &zeta_field.values, theta);
        let mu = doerfler_mark(&eta.values, theta);
        self.duals.push(DualLevel {
            zeta,
            iterations: rep.iterations,
            marked_primal: marking == mu,
        });
        Ok(Some((zeta, marking)))
    }
}

/// Goal-oriented run with the practical primal solver.
pub fn run_gailfem(
    setup: &GoalSetup,
    config: &AdaptiveConfig,
    sink: &mut dyn FnMut(&StepRecord),
) -> Result<(RunLog, Vec<DualLevel>)> {
    if !matches!(config.step, StepSize::Adaptive { .. }) {
        return Err(Error::InvalidConfig("the goal-oriented driver needs an adaptive step size"));
    }
    let mut hook = GoalHook {
        setup: *setup,
        duals: Vec::new(),
        failure: None,
    };
    let log = run_driver(&setup.primal, config, &mut hook, sink)?;
    Ok((log, hook.duals))
}

/// Both data interfaces x₁ + x₂ = 1/2 and 3/2 are resolved by the mesh.
pub fn check_data_alignment(u: &DiscreteFunction) -> Result<()> {
    check_alignment(u, 0.5).and_then(|_| check_alignment(u, 1.5))
}
