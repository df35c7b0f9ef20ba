//! JSON run summary: fitted rates, traces and the final state.

use ailfem_core::adaptivity::{trailing_rate, Event, RunLog, RunStatus, StepRecord};
use ailfem_core::goal::GoalSetup;
use serde::Serialize;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rates {
    /// Slope of log η against log work over the trailing decade, fitted
    /// through every counted step.
    pub eta_vs_work: Option<f64>,
    pub eta_vs_ndof: Option<f64>,
    pub product_vs_work: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalState {
    pub work: u64,
    pub nelem: usize,
    pub ndof: usize,
    pub eta: f64,
    pub energy: f64,
    pub u_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalSummary {
    pub reference: Option<f64>,
    pub final_value: f64,
    pub final_error: f64,
    /// Goal error at the last step of every level.
    pub error_trace: Vec<f64>,
    pub zeta_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub driver: String,
    pub degree: usize,
    pub theta: f64,
    pub lambda: f64,
    pub stopping: String,
    pub refinement: String,
    pub threads: usize,
    pub seed: u64,
    pub status: String,
    pub error: Option<String>,
    pub m_bound: f64,
    pub levels: usize,
    pub steps: usize,
    pub discards: usize,
    #[serde(rename = "final")]
    pub final_state: Option<FinalState>,
    pub rates: Rates,
    pub k_bar_trace: Vec<usize>,
    pub delta_trace: Vec<f64>,
    pub eta_trace: Vec<f64>,
    pub goal: Option<GoalSummary>,
}

/// Last counted step of every completed level.
pub fn level_ends(records: &[StepRecord]) -> Vec<&StepRecord> {
    records.iter().filter(|r| r.event == Event::StoppedInner).collect()
}

fn rate(points: Vec<(f64, f64)>) -> Option<f64> {
    trailing_rate(&points).ok()
}

pub fn summarize(cfg: &ExperimentConfig, log: &RunLog) -> Summary {
    let ends = level_ends(&log.records);
    let last = log.steps().last();
    let goal = log.records.first().and_then(|r| r.goal).map(|_| {
        let g = last.and_then(|r| r.goal);
        GoalSummary {
            reference: GoalSetup::builtin().reference,
            final_value: g.map_or(f64::NAN, |g| g.goal_value),
            final_error: g.map_or(f64::NAN, |g| g.goal_error),
            error_trace: ends.iter().filter_map(|r| r.goal.map(|g| g.goal_error)).collect(),
            zeta_trace: ends.iter().filter_map(|r| r.goal.map(|g| g.zeta)).collect(),
        }
    });
    let steps: Vec<&StepRecord> = log.steps().collect();
    let product = steps
        .iter()
        .filter_map(|r| r.goal.map(|g| (r.work as f64, g.product_estimator)))
        .collect::<Vec<_>>();
    Summary {
        problem: log.problem.to_string(),
        driver: cfg.driver.name().to_string(),
        degree: cfg.degree,
        theta: cfg.theta,
        lambda: cfg.lambda,
        stopping: cfg.stopping.name().to_string(),
        refinement: cfg.refinement.name().to_string(),
        threads: cfg.threads(),
        seed: cfg.seed,
        status: log.status.name().to_string(),
        error: match &log.status {
            RunStatus::Failed(e) => Some(e.to_string()),
            _ => None,
        },
        m_bound: log.m_bound,
        levels: log.levels.len(),
        steps: log.steps().count(),
        discards: log.records.iter().filter(|r| r.event == Event::DiscardedIiC).count(),
        final_state: last.map(|r| FinalState {
            work: r.work,
            nelem: r.nelem,
            ndof: r.ndof,
            eta: r.eta,
            energy: r.energy,
            u_norm: r.u_norm,
        }),
        rates: Rates {
            eta_vs_work: rate(steps.iter().map(|r| (r.work as f64, r.eta)).collect()),
            eta_vs_ndof: rate(ends.iter().map(|r| (r.ndof as f64, r.eta)).collect()),
            product_vs_work: if product.is_empty() { None } else { rate(product) },
        },
        k_bar_trace: log.k_bar_trace(),
        delta_trace: log.delta_trace(),
        eta_trace: log.levels.iter().map(|l| l.eta).collect(),
        goal,
    }
}
