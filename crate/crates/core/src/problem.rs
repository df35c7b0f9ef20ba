//! Built-in semilinear model problems and their discrete energy.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, PI};
use crate::mesh::{Domain, Triangulation};
use crate::solver::SpdSolver;
use crate::space::{
    assemble_inner_product, assemble_load, assemble_semilinear_with_antiderivative, DiscreteFunction, FeSpace,
    NormVariant,
};
use crate::sparse::CsrMatrix;

/// Monotone reaction b with derivative and antiderivative B (B(0) = 0).
#[derive(Debug, Clone, Copy)]
pub struct Nonlinearity {
    pub formula: &'static str,
    pub b: fn(f64) -> f64,
    pub b_prime: fn(f64) -> f64,
    pub antiderivative: fn(f64) -> f64,
    /// Polynomial growth degree.
    pub growth: u32,
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Nonlinearity {
            formula: "0",
            b: |_| 0.0,
            b_prime: |_| 0.0,
            antiderivative: |_| 0.0,
            growth: 0,
        }
    }

    pub fn cubic() -> Self {
        Nonlinearity {
            formula: "v^3",
            b: |v| v * v * v,
            b_prime: |v| 3.0 * v * v,
            antiderivative: |v| 0.25 * v * v * v * v,
            growth: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorVariant {
    /// Weights h_T² and h_T.
    Residual,
    /// Weights ℏ_T² and ℏ_T with ℏ_T = min(ε^{-1/2} h_T, 1).
    EpsRobust,
}

/// Exact solution value and gradient.
pub type ExactSolution = fn([f64; 2]) -> (f64, [f64; 2]);

/// −div(ε∇u) + μu + b(u) = f − div **f** in Ω, u = 0 on ∂Ω, with μ the mass
/// weight of the chosen norm.
#[derive(Debug, Clone, Copy)]
pub struct ModelProblem {
    pub name: &'static str,
    pub description: &'static str,
    pub domain: Domain,
    pub nonlinearity: Nonlinearity,
    pub f: fn([f64; 2]) -> f64,
    pub vecf: fn([f64; 2]) -> [f64; 2],
    pub norm: NormVariant,
    pub exact_solution: Option<ExactSolution>,
    pub alpha: f64,
    pub estimator: EstimatorVariant,
}

pub const BUILTIN_PROBLEMS: [&str; 3] = ["sine_gordon", "singular_perturbation", "goal"];

fn sine_gordon_exact(x: [f64; 2]) -> (f64, [f64; 2]) {
    let (sx, sy) = (math::sin(PI * x[0]), math::sin(PI * x[1]));
    let (cx, cy) = (math::cos(PI * x[0]), math::cos(PI * x[1]));
    (sx * sy, [PI * cx * sy, PI * sx * cy])
}

fn sine_gordon_load(x: [f64; 2]) -> f64 {
    let u = sine_gordon_exact(x).0;
    2.0 * PI * PI * u + u * u * u + math::sin(u)
}

/// Ω_f = {x₁ + x₂ ≤ 1/2}
pub fn in_omega_f(x: [f64; 2]) -> bool {
    x[0] + x[1] <= 0.5
}

/// Ω_g = {x₁ + x₂ ≥ 3/2}
pub fn in_omega_g(x: [f64; 2]) -> bool {
    x[0] + x[1] >= 1.5
}

fn zero_field(_: [f64; 2]) -> [f64; 2] {
    [0.0, 0.0]
}

pub fn builtin_problem(name: &str) -> Result<ModelProblem> {
    match name {
        "sine_gordon" => Ok(ModelProblem {
            name: "sine_gordon",
            description: "-Δu + u^3 + sin(u) = f, u = sin(πx)sin(πy)",
            domain: Domain::UnitSquare,
            nonlinearity: Nonlinearity {
                formula: "v^3 + sin(v)",
                b: |v| v * v * v + math::sin(v),
                b_prime: |v| 3.0 * v * v + math::cos(v),
                antiderivative: |v| 0.25 * v * v * v * v + 1.0 - math::cos(v),
                growth: 2,
            },
            f: sine_gordon_load,
            vecf: zero_field,
            norm: NormVariant::Energy { epsilon: 1.0 },
            exact_solution: Some(sine_gordon_exact),
            alpha: 1.0,
            estimator: EstimatorVariant::Residual,
        }),
        "singular_perturbation" => Ok(ModelProblem {
            name: "singular_perturbation",
            description: "-εΔu + 2u + sin(u) = 1, ε = 1e-5, norm ε|∇·|² + |·|²",
            domain: Domain::UnitSquare,
            // the remaining copy of v sits in the inner product
            nonlinearity: Nonlinearity {
                formula: "v + sin(v)",
                b: |v| v + math::sin(v),
                b_prime: |v| 1.0 + math::cos(v),
                antiderivative: |v| 0.5 * v * v + 1.0 - math::cos(v),
                growth: 0,
            },
            f: |_| 1.0,
            vecf: zero_field,
            norm: NormVariant::EpsWeightedH1 { epsilon: 1e-5 },
            exact_solution: None,
            alpha: 1.0,
            estimator: EstimatorVariant::EpsRobust,
        }),
        "goal" => Ok(ModelProblem {
            name: "goal",
            description: "-Δu + u^3 = -div f, f = χ(x1+x2<=1/2)(-1,0), G(u) = -∫ ∂1 u over x1+x2>=3/2",
            domain: Domain::GoalAligned,
            nonlinearity: Nonlinearity::cubic(),
            f: |_| 0.0,
            vecf: |x| if in_omega_f(x) { [-1.0, 0.0] } else { [0.0, 0.0] },
            norm: NormVariant::Energy { epsilon: 1.0 },
            exact_solution: None,
            alpha: 1.0,
            estimator: EstimatorVariant::Residual,
        }),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

impl ModelProblem {
    pub fn epsilon(&self) -> f64 {
        self.norm.epsilon()
    }

    /// Mass weight μ carried by the inner product.
    pub fn mass(&self) -> f64 {
        self.norm.mass()
    }

    pub fn initial_mesh(&self) -> Triangulation {
        Triangulation::initial(self.domain)
    }

    /// Full reaction μv + b(v) of the strong form.
    pub fn reaction(&self, v: f64) -> f64 {
        self.mass() * v + (self.nonlinearity.b)(v)
    }
}

/// Per-mesh data reused by every linearization step: inner-product matrix,
/// its preconditioned solver and the load vector.
#[derive(Debug)]
pub struct DiscreteProblem {
    pub problem: ModelProblem,
    pub space: Arc<FeSpace>,
    pub solver: SpdSolver,
    pub load: Vec<f64>,
}

/// An iterate with the quantities computed alongside it.
#[derive(Debug, Clone)]
pub struct IterateState {
    pub u: DiscreteFunction,
    pub energy: f64,
    /// Entries ⟨F − A u, φ_i⟩.
    pub residual: Vec<f64>,
    /// ‖u‖ in the problem's inner product.
    pub norm: f64,
}

impl DiscreteProblem {
    pub fn new(problem: &ModelProblem, space: Arc<FeSpace>) -> Result<Self> {
        let matrix = assemble_inner_product(&space, problem.norm);
        let load = assemble_load(&space, problem.f, problem.vecf);
        let solver = SpdSolver::with_coordinates(matrix, &space.unknown_coordinates())?;
        Ok(DiscreteProblem {
            problem: *problem,
            space,
            solver,
            load,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        self.solver.matrix()
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    /// Energy, residual and norm of `u` from one assembly pass.
    pub fn state(&self, u: DiscreteFunction) -> Result<IterateState> {
        let nl = &self.problem.nonlinearity;
        let (bvec, integral_b) = assemble_semilinear_with_antiderivative(&self.space, nl.b, nl.antiderivative, &u)?;
        let ku = self.matrix().mul_vec(&u.coefficients);
        let quad = math::dot(&u.coefficients, &ku);
        let energy = 0.5 * quad + integral_b - math::dot(&self.load, &u.coefficients);
        let residual: Vec<f64> = self
            .load
            .iter()
            .zip(&ku)
            .zip(&bvec)
            .map(|((l, k), b)| l - k - b)
            .collect();
        Ok(IterateState {
            u,
            energy,
            residual,
            norm: math::sqrt(quad.max(0.0)),
        })
    }

    pub fn zero_state(&self) -> Result<IterateState> {
        self.state(DiscreteFunction::zero(self.space.clone()))
    }

    /// ‖v − w‖ in the inner product.
    pub fn distance(&self, v: &DiscreteFunction, w: &DiscreteFunction) -> f64 {
        let d: Vec<f64> = v.coefficients.iter().zip(&w.coefficients).map(|(a, b)| a - b).collect();
        math::sqrt(self.matrix().quadratic_form(&d).max(0.0))
    }
}

pub fn energy(disc: &DiscreteProblem, u: &DiscreteFunction) -> Result<f64> {
    disc.state(u.clone()).map(|s| s.energy)
}

pub fn residual_functional(disc: &DiscreteProblem, w: &DiscreteFunction) -> Result<Vec<f64>> {
    disc.state(w.clone()).map(|s| s.residual)
}

/// Safety factor applied to the discrete dual norm of the load.
pub const M_SAFETY: f64 = 2.0;

/// Discrete ‖F‖ / α (b(0) = 0, so A0 = 0), times [`M_SAFETY`].
pub fn estimate_m(disc: &DiscreteProblem) -> Result<f64> {
    let (r, _) = disc.solver.solve(&disc.load, 1e-12)?;
    let dual = math::sqrt(math::dot(&r, &disc.load).max(0.0));
    Ok(M_SAFETY * dual / disc.problem.alpha)
}
