//! Marking, stopping criteria and the adaptive iteratively linearized
//! drivers (fixed step size and the practical variant with energy guard).

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::{primal_indicators, IndicatorField};
use crate::math;
use crate::mesh::Triangulation;
use crate::problem::{estimate_m, DiscreteProblem, IterateState, ModelProblem};
use crate::solver::zarantonello_step;
use crate::space::{build_space, error_norm, prolongate, DiscreteFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingVariant {
    /// |ΔE| ≤ λ²η² and ‖u‖ ≤ 2M
    Ib,
    /// |ΔE| ≤ λ²η²
    IbPrime,
    /// ‖u^k − u^{k−1}‖ ≤ λη and ‖u‖ ≤ 2M
    IbDoublePrime,
}

impl StoppingVariant {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ib" => Some(StoppingVariant::Ib),
            "ib_prime" => Some(StoppingVariant::IbPrime),
            "ib_double_prime" => Some(StoppingVariant::IbDoublePrime),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StoppingVariant::Ib => "ib",
            StoppingVariant::IbPrime => "ib_prime",
            StoppingVariant::IbDoublePrime => "ib_double_prime",
        }
    }
}

/// How marked elements are refined before the conforming closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// One bisection per marked element.
    Nvb,
    /// All three edges of a marked element are bisected.
    Bisec3,
}

impl Refinement {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "nvb" => Some(Refinement::Nvb),
            "bisec3" => Some(Refinement::Bisec3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Refinement::Nvb => "nvb",
            Refinement::Bisec3 => "bisec3",
        }
    }

    pub fn apply(self, mesh: &Triangulation, marked: &[usize]) -> Result<Triangulation> {
        match self {
            Refinement::Nvb => mesh.refine_nvb(marked),
            Refinement::Bisec3 => mesh.refine_bisec3(marked),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Fixed(f64),
    /// δ = 1/L, enlarged by β after every energy-guard failure.
    Adaptive { l0: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub theta: f64,
    pub lambda: f64,
    pub c_mark: f64,
    pub step: StepSize,
    pub stopping: StoppingVariant,
    pub refinement: Refinement,
    pub degree: usize,
    /// Stop once cumulative work reaches this many element-steps.
    pub max_work: u64,
    /// Stop once η falls to or below this value.
    pub eta_tol: f64,
    pub max_levels: usize,
    pub max_inner: usize,
    pub max_discards: usize,
    pub m_override: Option<f64>,
    pub initial_refinements: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            theta: 0.5,
            lambda: 0.1,
            c_mark: 1.0,
            step: StepSize::Adaptive {
                l0: 1.0,
                beta: core::f64::consts::SQRT_2,
            },
            stopping: StoppingVariant::Ib,
            refinement: Refinement::Bisec3,
            degree: 1,
            max_work: 5_000_000,
            eta_tol: 0.0,
            max_levels: 1000,
            max_inner: 500,
            max_discards: 200,
            m_override: None,
            initial_refinements: 0,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        let range = |name, value: f64, ok: bool, range| {
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange { name, value, range })
            }
        };
        range("theta", self.theta, self.theta > 0.0 && self.theta <= 1.0, "(0, 1]")?;
        range("lambda", self.lambda, self.lambda > 0.0, "(0, inf)")?;
        range("c_mark", self.c_mark, self.c_mark >= 1.0, "[1, inf)")?;
        range("eta_tol", self.eta_tol, self.eta_tol >= 0.0, "[0, inf)")?;
        match self.step {
            StepSize::Fixed(d) => range("delta", d, d > 0.0, "(0, inf)")?,
            StepSize::Adaptive { l0, beta } => {
                range("L0", l0, l0 > 0.0, "(0, inf)")?;
                range("beta", beta, beta > 1.0, "(1, inf)")?;
            }
        }
        if !(1..=4).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        if let Some(m) = self.m_override {
            range("M", m, m > 0.0, "(0, inf)")?;
        }
        if self.max_inner == 0 || self.max_levels == 0 {
            return Err(Error::InvalidConfig("max_inner and max_levels must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Accepted,
    StoppedInner,
    DiscardedIiC,
    Refined,
}

impl Event {
    pub fn name(self) -> &'static str {
        match self {
            Event::Accepted => "accepted",
            Event::StoppedInner => "stopped_inner",
            Event::DiscardedIiC => "discarded_ii_c",
            Event::Refined => "refined",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "accepted" => Some(Event::Accepted),
            "stopped_inner" => Some(Event::StoppedInner),
            "discarded_ii_c" => Some(Event::DiscardedIiC),
            "refined" => Some(Event::Refined),
            _ => None,
        }
    }

    /// Whether the row is a counted solver step (k ≥ 1, kept).
    pub fn is_step(self) -> bool {
        matches!(self, Event::Accepted | Event::StoppedInner)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalColumns {
    pub zeta: f64,
    pub product_estimator: f64,
    pub goal_value: f64,
    pub goal_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub ell: usize,
    pub k: usize,
    pub total_step: usize,
    pub nelem: usize,
    pub ndof: usize,
    pub work: u64,
    pub eta: f64,
    pub energy: f64,
    /// |E(u^{k−1}) − E(u^k)|, NaN at k = 0.
    pub energy_diff: f64,
    pub u_norm: f64,
    pub delta: f64,
    /// NaN for the fixed step size driver.
    pub l: f64,
    pub event: Event,
    pub goal: Option<GoalColumns>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub ell: usize,
    pub nelem: usize,
    pub ndof: usize,
    /// Number of kept solver steps k̲(ℓ).
    pub k_bar: usize,
    pub discards: usize,
    pub marked: usize,
    pub eta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    WorkBudget,
    Tolerance,
    /// η vanished, the iterate is the exact solution.
    ExactSolution,
    LevelCap,
    Failed(Error),
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::WorkBudget => "work_budget",
            RunStatus::Tolerance => "tolerance",
            RunStatus::ExactSolution => "exact_solution",
            RunStatus::LevelCap => "level_cap",
            RunStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub config: AdaptiveConfig,
    pub problem: &'static str,
    pub m_bound: f64,
    pub records: Vec<StepRecord>,
    pub levels: Vec<LevelSummary>,
    pub status: RunStatus,
    /// Final accepted iterate.
    pub solution: Option<DiscreteFunction>,
}

impl RunLog {
    pub fn k_bar_trace(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.k_bar).collect()
    }

    pub fn delta_trace(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.delta).collect()
    }

    /// Counted solver steps (k ≥ 1, not discarded).
    pub fn steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.event.is_step())
    }
}

/// Result of Dörfler marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub elements: Vec<usize>,
    /// All indicators vanish.
    pub exact: bool,
}

/// Minimal set M with θ Σ_T η_T² ≤ Σ_{T∈M} η_T²: indicators sorted
/// descending (ties by index), greedy prefix.
pub fn doerfler_mark(indicators: &[f64], theta: f64) -> Marking {
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&t| indicators[t]).sum();
    if !(total > 0.0) {
        return Marking {
            elements: Vec::new(),
            exact: true,
        };
    }
    let goal = theta * total;
    let mut acc = 0.0;
    let mut n = 0;
    for &t in &order {
        if acc >= goal {
            break;
        }
        acc += indicators[t];
        n += 1;
    }
    let mut elements = order[..n].to_vec();
    elements.sort_unstable();
    Marking { elements, exact: false }
}

/// The inner-loop termination test of the chosen variant.
#[allow(clippy::too_many_arguments)]
pub fn stopping_met(
    variant: StoppingVariant,
    e_prev: f64,
    e_curr: f64,
    eta: f64,
    step_norm: f64,
    u_norm: f64,
    lambda: f64,
    m_bound: f64,
) -> bool {
    let energy_ok = (e_prev - e_curr).abs() <= lambda * lambda * eta * eta;
    let bounded = u_norm <= 2.0 * m_bound;
    match variant {
        StoppingVariant::Ib => energy_ok && bounded,
        StoppingVariant::IbPrime => energy_ok,
        StoppingVariant::IbDoublePrime => step_norm <= lambda * eta && bounded,
    }
}

/// Problem-specific additions to the generic driver.
pub trait LevelHook {
    /// Extra per-iterate quantity (the goal value).
    fn goal_value(&mut self, _u: &DiscreteFunction) -> Option<f64> {
        None
    }

    fn goal_reference(&self) -> Option<f64> {
        None
    }

    /// Called once the inner loop stopped; returns ζ and the marked set to
    /// replace the default marking.
    fn finish_level(
        &mut self,
        _disc: &DiscreteProblem,
        _u: &DiscreteFunction,
        _eta: &IndicatorField,
        _theta: f64,
    ) -> Result<Option<(f64, Marking)>> {
        Ok(None)
    }
}

struct NoHook;
impl LevelHook for NoHook {}

/// M from the initial mesh refined twice uniformly.
pub fn default_m_bound(problem: &ModelProblem, config: &AdaptiveConfig) -> Result<f64> {
    if let Some(m) = config.m_override {
        return Ok(m);
    }
    let mesh = base_mesh(problem, config).uniform_refine().uniform_refine();
    let space = build_space(Arc::new(mesh), config.degree)?;
    estimate_m(&DiscreteProblem::new(problem, space)?)
}

fn base_mesh(problem: &ModelProblem, config: &AdaptiveConfig) -> Triangulation {
    let mut mesh = problem.initial_mesh();
    for _ in 0..config.initial_refinements {
        mesh = mesh.uniform_refine();
    }
    mesh
}

pub fn run_ailfem_idealized(
    problem: &ModelProblem,
    config: &AdaptiveConfig,
    sink: &mut dyn FnMut(&StepRecord),
) -> Result<RunLog> {
    if !matches!(config.step, StepSize::Fixed(_)) {
        return Err(Error::InvalidConfig("the idealized driver needs a fixed step size"));
    }
    run_driver(problem, config, &mut NoHook, sink)
}

pub fn run_ailfem_practical(
    problem: &ModelProblem,
    config: &AdaptiveConfig,
    sink: &mut dyn FnMut(&StepRecord),
) -> Result<RunLog> {
    if !matches!(config.step, StepSize::Adaptive { .. }) {
        return Err(Error::InvalidConfig("the practical driver needs an adaptive step size"));
    }
    run_driver(problem, config, &mut NoHook, sink)
}

struct StepControl {
    delta: f64,
    l: f64,
    q2: f64,
    beta: Option<f64>,
}

impl StepControl {
    fn new(step: StepSize) -> Self {
        match step {
            StepSize::Fixed(d) => StepControl {
                delta: d,
                l: f64::NAN,
                q2: f64::NAN,
                beta: None,
            },
            StepSize::Adaptive { l0, beta } => StepControl {
                delta: 1.0 / l0,
                l: l0,
                q2: 1.0 - 1.0 / (l0 * l0),
                beta: Some(beta),
            },
        }
    }

    fn enlarge(&mut self) {
        if let Some(beta) = self.beta {
            self.l *= beta;
            self.delta = 1.0 / self.l;
            self.q2 = 1.0 - self.delta * self.delta;
        }
    }
}

/// Shared state machine of all drivers.
pub fn run_driver(
    problem: &ModelProblem,
    config: &AdaptiveConfig,
    hook: &mut dyn LevelHook,
    sink: &mut dyn FnMut(&StepRecord),
) -> Result<RunLog> {
    config.validate()?;
    let m_bound = default_m_bound(problem, config)?;
    if !(m_bound > 0.0) {
        return Err(Error::TrivialData);
    }
    let mut log = RunLog {
        config: *config,
        problem: problem.name,
        m_bound,
        records: Vec::new(),
        levels: Vec::new(),
        status: RunStatus::LevelCap,
        solution: None,
    };
    let mut driver = Driver {
        problem,
        config,
        hook,
        m_bound,
        control: StepControl::new(config.step),
        work: 0,
        total_step: 0,
        pending: Vec::new(),
    };
    let outcome = driver.run(&mut log, sink);
    // flush whatever the failing level produced
    for r in driver.pending.drain(..) {
        sink(&r);
        log.records.push(r);
    }
    match outcome {
        Ok(status) => log.status = status,
        Err(e) => log.status = RunStatus::Failed(e),
    }
    Ok(log)
}

struct Driver<'a> {
    problem: &'a ModelProblem,
    config: &'a AdaptiveConfig,
    hook: &'a mut dyn LevelHook,
    m_bound: f64,
    control: StepControl,
    work: u64,
    total_step: usize,
    pending: Vec<StepRecord>,
}

impl Driver<'_> {
    #[allow(clippy::too_many_arguments)]
    fn record(
        &mut self,
        ell: usize,
        k: usize,
        disc: &DiscreteProblem,
        state: &IterateState,
        eta: f64,
        energy_diff: f64,
        event: Event,
    ) {
        let goal = self.hook.goal_value(&state.u).map(|g| GoalColumns {
            zeta: f64::NAN,
            product_estimator: f64::NAN,
            goal_value: g,
            goal_error: self.hook.goal_reference().map_or(f64::NAN, |r| (g - r).abs()),
        });
        self.pending.push(StepRecord {
            ell,
            k,
            total_step: self.total_step,
            nelem: disc.space.mesh().num_elements(),
            ndof: disc.dimension(),
            work: self.work,
            eta,
            energy: state.energy,
            energy_diff,
            u_norm: state.norm,
            delta: self.control.delta,
            l: self.control.l,
            event,
            goal,
        });
    }

    fn run(&mut self, log: &mut RunLog, sink: &mut dyn FnMut(&StepRecord)) -> Result<RunStatus> {
        let cfg = self.config;
        let mut mesh = Arc::new(base_mesh(self.problem, cfg));
        let mut disc = DiscreteProblem::new(self.problem, build_space(mesh.clone(), cfg.degree)?)?;
        let mut state = disc.zero_state()?;
        for ell in 0..cfg.max_levels {
            let nelem = mesh.num_elements() as u64;
            if ell > 0 {
                let eta0 = primal_indicators(self.problem, &state.u).total();
                self.record(ell, 0, &disc, &state, eta0, f64::NAN, Event::Refined);
            }
            let mut k = 0;
            let mut discards = 0;
            let mut consecutive = 0;
            let (final_state, eta_field) = loop {
                if k >= cfg.max_inner {
                    return Err(Error::InnerLoopCap(cfg.max_inner, ell));
                }
                let step = zarantonello_step(&disc, &state, self.control.delta)?;
                let field = primal_indicators(self.problem, &step.state.u);
                let eta = field.total();
                let diff = (state.energy - step.state.energy).abs();
                let stop = stopping_met(
                    cfg.stopping,
                    state.energy,
                    step.state.energy,
                    eta,
                    step.step_norm,
                    step.state.norm,
                    cfg.lambda,
                    self.m_bound,
                );
                let guard = self.control.beta.is_some() && step.state.energy > self.control.q2 * state.energy;
                if !stop && guard {
                    self.record(ell, k + 1, &disc, &step.state, eta, diff, Event::DiscardedIiC);
                    discards += 1;
                    consecutive += 1;
                    if consecutive > cfg.max_discards {
                        return Err(Error::TooManyDiscards(cfg.max_discards, ell));
                    }
                    self.control.enlarge();
                    continue;
                }
                consecutive = 0;
                k += 1;
                self.work += nelem;
                self.total_step += 1;
                let event = if stop { Event::StoppedInner } else { Event::Accepted };
                self.record(ell, k, &disc, &step.state, eta, diff, event);
                state = step.state;
                if stop {
                    break (state.clone(), field);
                }
            };
            let eta = eta_field.total();
            let custom = self.hook.finish_level(&disc, &final_state.u, &eta_field, cfg.theta)?;
            let marking = match &custom {
                Some((zeta, marking)) => {
                    for r in self.pending.iter_mut() {
                        if let Some(g) = r.goal.as_mut() {
                            g.zeta = *zeta;
                            g.product_estimator = product_estimator(r.eta, *zeta);
                        }
                    }
                    marking.clone()
                }
                None => doerfler_mark(&eta_field.values, cfg.theta),
            };
            for r in self.pending.drain(..) {
                sink(&r);
                log.records.push(r);
            }
            log.levels.push(LevelSummary {
                ell,
                nelem: mesh.num_elements(),
                ndof: disc.dimension(),
                k_bar: k,
                discards,
                marked: marking.elements.len(),
                eta,
                delta: self.control.delta,
            });
            log.solution = Some(final_state.u.clone());

            if marking.exact || eta == 0.0 {
                return Ok(RunStatus::ExactSolution);
            }
            if eta <= cfg.eta_tol {
                return Ok(RunStatus::Tolerance);
            }
            if self.work >= cfg.max_work {
                return Ok(RunStatus::WorkBudget);
            }
            if ell + 1 == cfg.max_levels {
                break;
            }
            mesh = Arc::new(cfg.refinement.apply(&mesh, &marking.elements)?);
            let space = build_space(mesh.clone(), cfg.degree)?;
            let u0 = prolongate(&final_state.u, &space)?;
            disc = DiscreteProblem::new(self.problem, space)?;
            state = disc.state(u0)?;
        }
        Ok(RunStatus::LevelCap)
    }
}

/// η (η² + ζ²)^{1/2}
pub fn product_estimator(eta: f64, zeta: f64) -> f64 {
    eta * math::sqrt(eta * eta + zeta * zeta)
}

/// ‖u⋆ − u‖ + η when an exact solution is known; otherwise η alone and the
/// flag is `false`.
pub fn quasi_error(problem: &ModelProblem, u: &DiscreteFunction, eta: f64) -> (f64, bool) {
    match problem.exact_solution {
        Some(exact) => (error_norm(u, exact, problem.norm) + eta, true),
        None => (eta, false),
    }
}

/// Aitken Δ² on the last three values; the flag is `false` when the
/// denominator vanishes and the last value is returned unchanged.
pub fn aitken_extrapolate(values: &[f64]) -> Result<(f64, bool)> {
    if values.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: values.len(),
        });
    }
    let n = values.len();
    let (a0, a1, a2) = (values[n - 3], values[n - 2], values[n - 1]);
    let denom = (a2 - a1) - (a1 - a0);
    if denom == 0.0 || !denom.is_finite() {
        return Ok((a2, false));
    }
    Ok((a2 - (a2 - a1) * (a2 - a1) / denom, true))
}

/// Least-squares slope of log y against log x.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (math::ln(x), math::ln(y)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    Ok(sxy / sxx)
}

/// Points whose x lies within the last decade, x ≥ max x / 10.
pub fn trailing_decade(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let xmax = points.iter().map(|p| p.0).fold(0.0, f64::max);
    points.iter().copied().filter(|p| p.0 >= xmax / 10.0).collect()
}

/// Slope over the trailing decade, requiring at least five points.
pub fn trailing_rate(points: &[(f64, f64)]) -> Result<f64> {
    let tail = trailing_decade(points);
    if tail.len() < 5 {
        return Err(Error::InsufficientData {
            needed: 5,
            got: tail.len(),
        });
    }
    rate_fit(&tail)
}

/// sup over steps of (#T − #T₀ + 1)^s · y.
pub fn rate_constant(records: &[StepRecord], s: f64, y: impl Fn(&StepRecord) -> f64) -> f64 {
    let n0 = records.first().map_or(0, |r| r.nelem) as f64;
    records
        .iter()
        .filter(|r| r.event.is_step())
        .map(|r| libm::pow(r.nelem as f64 - n0 + 1.0, s) * y(r))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn doerfler_examples() {
        assert_eq!(doerfler_mark(&[4.0, 1.0, 1.0, 1.0, 1.0], 0.5).elements, vec![0]);
        let m = doerfler_mark(&[0.0, 2.0, 0.0, 1.0], 1.0);
        assert_eq!(m.elements, vec![1, 3]);
        assert_eq!(doerfler_mark(&[1.0; 10], 0.3).elements.len(), 3);
        let z = doerfler_mark(&[0.0; 4], 0.5);
        assert!(z.exact && z.elements.is_empty());
        // ties resolve to the lower index
        assert_eq!(doerfler_mark(&[1.0, 2.0, 2.0], 0.4).elements, vec![1]);
    }

    #[test]
    fn stopping_examples() {
        use StoppingVariant::*;
        for v in [Ib, IbPrime, IbDoublePrime] {
            assert!(stopping_met(v, 1.0, 1.0, 0.0, 0.0, 0.0, 0.1, 1.0));
        }
        assert!(!stopping_met(Ib, 1.0, 1.0, 1.0, 0.0, 2.01, 0.1, 1.0));
        assert!(!stopping_met(Ib, 1.011, 1.0, 1.0, 0.0, 0.0, 0.1, 1.0));
        assert!(stopping_met(Ib, 1.011, 1.0, 1.0, 0.0, 0.0, 0.2, 1.0));
    }

    #[test]
    fn aitken_and_rates() {
        let (v, ok) = aitken_extrapolate(&[4.0, 3.5, 3.25]).unwrap();
        assert!(ok && (v - 3.0).abs() < 1e-15);
        assert_eq!(aitken_extrapolate(&[2.0, 2.0, 2.0]).unwrap(), (2.0, false));
        assert!(aitken_extrapolate(&[1.0, 2.0]).is_err());
        let pts: Vec<(f64, f64)> = (1..20).map(|i| {
            let w = 10.0 * i as f64 * i as f64;
            (w, 1.0 / libm::sqrt(w))
        }).collect();
        assert!((rate_fit(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert!((trailing_rate(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert!(trailing_rate(&pts[..3]).is_err());
    }

    #[test]
    fn product_estimator_values() {
        assert_eq!(product_estimator(3.0, 4.0), 15.0);
        assert_eq!(product_estimator(2.0, 0.0), 4.0);
    }

    #[test]
    fn config_validation() {
        let mut c = AdaptiveConfig::default();
        assert!(c.validate().is_ok());
        c.theta = 0.0;
        assert!(c.validate().is_err());
        c = AdaptiveConfig::default();
        c.step = StepSize::Adaptive { l0: 1.0, beta: 1.0 };
        assert!(c.validate().is_err());
        c = AdaptiveConfig::default();
        c.degree = 7;
        assert!(matches!(c.validate(), Err(Error::UnsupportedDegree(7))));
    }
}
