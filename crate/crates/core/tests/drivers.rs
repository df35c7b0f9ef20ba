use ailfem_core::adaptivity::{
    quasi_error, run_ailfem_idealized, run_ailfem_practical, AdaptiveConfig, Event, Refinement, RunLog, RunStatus,
    StepRecord, StepSize, StoppingVariant,
};
use ailfem_core::goal::{run_gailfem, GoalSetup};
use ailfem_core::problem::builtin_problem;

fn collect(run: impl FnOnce(&mut dyn FnMut(&StepRecord)) -> RunLog) -> (RunLog, Vec<StepRecord>) {
    let mut streamed = Vec::new();
    let log = run(&mut |r| streamed.push(*r));
    (log, streamed)
}

fn check_bookkeeping(log: &RunLog, streamed: &[StepRecord]) {
    // NaN entries defeat PartialEq
    assert_eq!(format!("{:?}", log.records), format!("{streamed:?}"));
    let mut work = 0;
    let mut total = 0;
    for r in &log.records {
        match r.event {
            Event::Refined => {
                assert_eq!(r.k, 0);
                assert!(r.energy_diff.is_nan());
                assert_eq!(r.work, work);
            }
            Event::Accepted | Event::StoppedInner => {
                assert!(r.k >= 1);
                total += 1;
                assert_eq!(r.total_step, total);
                assert_eq!(r.work, work + r.nelem as u64);
                work = r.work;
            }
            Event::DiscardedIiC => assert_eq!(r.work, work),
        }
    }
    let stops = log.records.iter().filter(|r| r.event == Event::StoppedInner).count();
    assert_eq!(stops, log.levels.len());
    for (level, kb) in log.levels.iter().zip(log.k_bar_trace()) {
        let kept = log.steps().filter(|r| r.ell == level.ell).count();
        assert_eq!(kept, kb);
    }
}

#[test]
fn practical_run_on_a_small_budget() {
    let p = builtin_problem("sine_gordon").unwrap();
    let cfg = AdaptiveConfig {
        max_work: 40_000,
        ..AdaptiveConfig::default()
    };
    let (log, streamed) = collect(|s| run_ailfem_practical(&p, &cfg, s).unwrap());
    assert_eq!(log.status, RunStatus::WorkBudget);
    check_bookkeeping(&log, &streamed);
    let etas: Vec<f64> = log.levels.iter().map(|l| l.eta).collect();
    assert!(etas.last().unwrap() < &(0.5 * etas[0]));
    // quasi-error tracks the estimator for the smooth exact solution
    let u = log.solution.as_ref().unwrap();
    let (q, exact) = quasi_error(&p, u, *etas.last().unwrap());
    assert!(exact && q > *etas.last().unwrap());
}

#[test]
fn idealized_run_keeps_the_fixed_step() {
    let p = builtin_problem("sine_gordon").unwrap();
    let cfg = AdaptiveConfig {
        max_work: 20_000,
        step: StepSize::Fixed(0.5),
        stopping: StoppingVariant::IbDoublePrime,
        refinement: Refinement::Nvb,
        ..AdaptiveConfig::default()
    };
    let (log, streamed) = collect(|s| run_ailfem_idealized(&p, &cfg, s).unwrap());
    check_bookkeeping(&log, &streamed);
    assert!(log.records.iter().all(|r| r.delta == 0.5 && r.l.is_nan()));
    assert!(log.records.iter().all(|r| r.event != Event::DiscardedIiC));
}

#[test]
fn drivers_reject_mismatched_step_rules() {
    let p = builtin_problem("sine_gordon").unwrap();
    let fixed = AdaptiveConfig {
        step: StepSize::Fixed(0.5),
        ..AdaptiveConfig::default()
    };
    assert!(run_ailfem_practical(&p, &fixed, &mut |_| {}).is_err());
    assert!(run_ailfem_idealized(&p, &AdaptiveConfig::default(), &mut |_| {}).is_err());
}

#[test]
fn eta_tolerance_stops_the_run() {
    let p = builtin_problem("sine_gordon").unwrap();
    let cfg = AdaptiveConfig {
        eta_tol: 0.5,
        ..AdaptiveConfig::default()
    };
    let log = run_ailfem_practical(&p, &cfg, &mut |_| {}).unwrap();
    assert_eq!(log.status, RunStatus::Tolerance);
    assert!(log.levels.last().unwrap().eta <= 0.5);
}

#[test]
fn level_cap_is_honoured() {
    let p = builtin_problem("singular_perturbation").unwrap();
    let cfg = AdaptiveConfig {
        max_levels: 3,
        ..AdaptiveConfig::default()
    };
    let log = run_ailfem_practical(&p, &cfg, &mut |_| {}).unwrap();
    assert_eq!(log.status, RunStatus::LevelCap);
    assert_eq!(log.levels.len(), 3);
}

#[test]
fn goal_run_records_goal_columns() {
    let cfg = AdaptiveConfig {
        max_work: 30_000,
        ..AdaptiveConfig::default()
    };
    let mut streamed = Vec::new();
    let (log, duals) = run_gailfem(&GoalSetup::builtin(), &cfg, &mut |r| streamed.push(*r)).unwrap();
    check_bookkeeping(&log, &streamed);
    assert_eq!(duals.len(), log.levels.len());
    for r in log.steps() {
        let g = r.goal.unwrap();
        assert!((g.product_estimator - r.eta * (r.eta * r.eta + g.zeta * g.zeta).sqrt()).abs() <= 1e-14);
        assert!((g.goal_error - (g.goal_value - GoalSetup::builtin().reference.unwrap()).abs()).abs() <= 1e-15);
    }
}
