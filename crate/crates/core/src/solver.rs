//! Preconditioned conjugate gradients and the Zarantonello step.

use alloc::vec;
use alloc::vec::Vec;

use crate::cholesky::{geometric_dissection, SparseCholesky};
use crate::error::{Error, Result};
use crate::math;
use crate::problem::{DiscreteProblem, IterateState};
use crate::space::DiscreteFunction;
use crate::sparse::CsrMatrix;

/// Default relative residual tolerance of every linear solve.
pub const LINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// The preconditioner was built before this solve.
    pub reused_preconditioner: bool,
}

/// An SPD matrix with its sparse Cholesky factor, reused for every solve.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: CsrMatrix,
    factor: SparseCholesky,
}

/// Refinement sweeps allowed on top of the direct solve.
const MAX_REFINEMENT: usize = 3;

impl SpdSolver {
    pub fn new(matrix: CsrMatrix) -> Result<Self> {
        let factor = SparseCholesky::factor(&matrix)?;
        Ok(SpdSolver { matrix, factor })
    }

    /// Orders the factorization by the positions of the unknowns.
    pub fn with_coordinates(matrix: CsrMatrix, coords: &[[f64; 2]]) -> Result<Self> {
        let factor = SparseCholesky::factor_ordered(&matrix, geometric_dissection(&matrix, coords))?;
        Ok(SpdSolver { matrix, factor })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Solves A x = rhs with ‖A x − rhs‖ ≤ tol ‖rhs‖, or with backward error
    /// at most `tol` once the residual reaches rounding level. Iterative
    /// refinement recovers accuracy lost in the factor.
    pub fn solve(&self, rhs: &[f64], tol: f64) -> Result<(Vec<f64>, LinearSolveReport)> {
        let bnorm = math::sqrt(math::dot(rhs, rhs));
        if bnorm == 0.0 {
            return Ok((vec![0.0; rhs.len()], report(0, 0.0, true)));
        }
        let mut x = self.factor.solve(rhs);
        let mut ax = vec![0.0; rhs.len()];
        for sweep in 1..=MAX_REFINEMENT + 1 {
            self.matrix.mul_vec_into(&x, &mut ax);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rel = math::sqrt(math::dot(&r, &r)) / bnorm;
            if rel <= tol || self.backward_error(&r, &x, rhs) <= tol {
                return Ok((x, report(sweep, rel, true)));
            }
            if sweep > MAX_REFINEMENT {
                return Err(Error::SolverDiverged {
                    iterations: sweep,
                    residual: rel,
                });
            }
            let d = self.factor.solve(&r);
            x.iter_mut().zip(&d).for_each(|(xi, di)| *xi += di);
        }
        unreachable!()
    }
}

impl SpdSolver {
    /// Normwise backward error ‖r‖_∞ / (‖A‖_∞ ‖x‖_∞ + ‖b‖_∞).
    fn backward_error(&self, r: &[f64], x: &[f64], b: &[f64]) -> f64 {
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let a_inf = (0..self.matrix.dim())
            .map(|i| self.matrix.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        inf(r) / (a_inf * inf(x) + inf(b))
    }
}

fn report(iterations: usize, relative_residual: f64, reused_preconditioner: bool) -> LinearSolveReport {
    LinearSolveReport {
        iterations,
        relative_residual,
        reused_preconditioner,
    }
}

/// Jacobi-preconditioned conjugate gradients for A x = rhs, stopping once
/// the true relative residual is at most `tol` ∈ (0, 1e-6].
pub fn solve_spd(matrix: &CsrMatrix, rhs: &[f64], tol: f64) -> Result<(Vec<f64>, LinearSolveReport)> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, 1e-6]",
        });
    }
    let n = matrix.dim();
    let inv_diag: Vec<f64> = matrix
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let bnorm = math::sqrt(math::dot(rhs, rhs));
    if bnorm == 0.0 {
        return Ok((x, report(0, 0.0, false)));
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = math::dot(&r, &z);
    let cap = 10 * n.max(10);
    let target = tol * bnorm;
    for it in 1..=cap {
        matrix.mul_vec_into(&p, &mut ap);
        let pap = math::dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SolverDiverged {
                iterations: it,
                residual: math::sqrt(math::dot(&r, &r)) / bnorm,
            });
        }
        let alpha = rz / pap;
        let mut rr = 0.0;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rr += r[i] * r[i];
        }
        if math::sqrt(rr) <= target {
            // confirm with the true residual
            matrix.mul_vec_into(&x, &mut ap);
            let true_rr: f64 = ap.iter().zip(rhs).map(|(a, b)| (b - a) * (b - a)).sum();
            let rel = math::sqrt(true_rr) / bnorm;
            if rel <= tol {
                return Ok((x, report(it, rel, false)));
            }
            for i in 0..n {
                r[i] = rhs[i] - ap[i];
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = math::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        iterations: cap,
        residual: math::sqrt(math::dot(&r, &r)) / bnorm,
    })
}

#[derive(Debug, Clone)]
pub struct ZarantonelloStep {
    pub state: IterateState,
    /// ‖Φ(w) − w‖
    pub step_norm: f64,
    pub report: LinearSolveReport,
}

/// Φ(δ; w) = w + δ K⁻¹ r(w), where r(w) = F − A w.
pub fn zarantonello_step(disc: &DiscreteProblem, prev: &IterateState, delta: f64) -> Result<ZarantonelloStep> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    let (d, report) = disc.solver.solve(&prev.residual, LINEAR_TOL)?;
    let step: Vec<f64> = d.iter().map(|v| delta * v).collect();
    let step_norm = math::sqrt(disc.matrix().quadratic_form(&step).max(0.0));
    let coeffs: Vec<f64> = prev.u.coefficients.iter().zip(&step).map(|(a, b)| a + b).collect();
    let u = DiscreteFunction::new(disc.space.clone(), coeffs)?;
    let state = disc.state(u)?;
    Ok(ZarantonelloStep {
        state,
        step_norm,
        report,
    })
}

/// Iterates with fixed δ until the energy stagnates; returns the final state
/// and the number of steps.
pub fn solve_to_stagnation(
    disc: &DiscreteProblem,
    start: IterateState,
    delta: f64,
    energy_tol: f64,
    max_steps: usize,
) -> Result<(IterateState, usize)> {
    let mut cur = start;
    for k in 1..=max_steps {
        let next = zarantonello_step(disc, &cur, delta)?.state;
        let diff = (cur.energy - next.energy).abs();
        cur = next;
        if diff <= energy_tol {
            return Ok((cur, k));
        }
    }
    Ok((cur, max_steps))
}
