use std::time::Instant;

use thiserror::Error;

use crate::analyze::{
    applicable_theorems, check_additive_drift, check_at_or_above_target, check_drift_upper, check_h_monotone,
    check_multiplicative_drift, check_nonnegativity, check_state_bound, check_step_bound, check_variable_drift,
    estimate_drift, exact_hitting_time_markov, unchecked, AnalyzeError, Binning, CheckKind, CheckReport,
    DriftProfile, ExactHittingTimes,
};
use crate::bounds::{
    additive_lower, additive_upper_with, multiplicative_upper_below, multiplicative_upper_hitting,
    variable_upper_below, variable_upper_hitting, AdditiveUpperProfile, BoundError, Condition, DriftHypothesis,
    HittingTimeBound, HypothesisKind, StepBoundMode, TheoremId, DEFAULT_TOL,
};
use crate::process::{StopMode, StoppingRule};
use crate::simulate::{simulate_batch, summarize, SimulationConfig, SimulationError, TrajectoryBatch};

use super::config::{ConfigError, ExperimentConfig};
use super::report::{Metadata, Report, ReportedBound};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

/// Every bound the hypothesis yields for a start `x0` under `rule`.
///
/// Additive hypotheses describe the time to reach 0, so they require the
/// rule `(0, at_or_below)`. Multiplicative and variable hypotheses pick the
/// below-target or hitting-target theorem from the rule's mode.
pub fn compute_bounds(
    hypothesis: &DriftHypothesis,
    x0: f64,
    rule: &StoppingRule,
) -> Result<Vec<HittingTimeBound>, BoundError> {
    let additive_rule = || {
        if *rule == StoppingRule::ZERO {
            Ok(())
        } else {
            Err(BoundError::InvalidParameter {
                field: "x_min",
                reason: "additive hypotheses need the rule x_min = 0, mode = at_or_below".into(),
            })
        }
    };
    match &hypothesis.kind {
        HypothesisKind::AdditiveUpper { delta } => {
            additive_rule()?;
            AdditiveUpperProfile::ALL
                .iter()
                .map(|&p| additive_upper_with(p, x0, *delta))
                .collect()
        }
        HypothesisKind::AdditiveLower { delta, .. } => {
            additive_rule()?;
            Ok(vec![additive_lower(x0, *delta)?])
        }
        HypothesisKind::Multiplicative { delta } => Ok(vec![match rule.mode {
            StopMode::Below => multiplicative_upper_below(x0, rule.x_min, *delta)?,
            StopMode::AtOrBelow => multiplicative_upper_hitting(x0, rule.x_min, *delta)?,
        }]),
        HypothesisKind::Variable { h } => Ok(vec![match rule.mode {
            StopMode::Below => variable_upper_below(x0, rule.x_min, h, DEFAULT_TOL)?,
            StopMode::AtOrBelow => variable_upper_hitting(x0, rule.x_min, h, DEFAULT_TOL)?,
        }]),
    }
}

fn vacuous(condition: Condition, kind: CheckKind) -> CheckReport {
    let mut report = CheckReport::new(condition, kind);
    report.vacuous = true;
    report
}

fn or_vacuous(
    result: Result<CheckReport, AnalyzeError>,
    condition: Condition,
) -> Result<CheckReport, AnalyzeError> {
    match result {
        Err(AnalyzeError::NoTransitions) => Ok(vacuous(condition, CheckKind::Statistical)),
        other => other,
    }
}

/// Runs one check per condition, in the order given.
fn run_checks(
    conditions: &[Condition],
    hypothesis: &DriftHypothesis,
    batch: &TrajectoryBatch,
    rule: &StoppingRule,
    binning: Binning,
) -> Result<Vec<CheckReport>, AnalyzeError> {
    let mut cached: Option<Result<DriftProfile, AnalyzeError>> = None;
    let mut profile = || {
        cached
            .get_or_insert_with(|| estimate_drift(batch, binning.bin_count, binning.min_samples))
            .clone()
    };
    let delta = match &hypothesis.kind {
        HypothesisKind::AdditiveUpper { delta }
        | HypothesisKind::AdditiveLower { delta, .. }
        | HypothesisKind::Multiplicative { delta } => Some(*delta),
        HypothesisKind::Variable { .. } => None,
    };
    let need_delta = |c: Condition| {
        delta.ok_or(AnalyzeError::InvalidParameter {
            field: "delta",
            reason: format!("condition `{c}` needs a delta"),
        })
    };
    let mut reports = Vec::new();
    for &condition in conditions {
        let report = match condition {
            Condition::Nonnegativity => check_nonnegativity(batch)?,
            Condition::AtOrAboveTarget => check_at_or_above_target(batch, rule.x_min)?,
            Condition::AdditiveDrift => {
                let delta = need_delta(condition)?;
                or_vacuous(profile().map(|p| check_additive_drift(&p, delta)), condition)?
            }
            Condition::AdditiveDriftUpper => {
                let delta = need_delta(condition)?;
                or_vacuous(profile().map(|p| check_drift_upper(&p, delta)), condition)?
            }
            Condition::StateBoundC => match hypothesis.state_bound_c {
                Some(c) => check_state_bound(batch, c)?,
                None => unchecked(condition, "hypothesis.state_bound_c not given"),
            },
            Condition::StepBoundCDeterministic => match hypothesis.step_bound_c {
                Some(c) => check_step_bound(batch, c, StepBoundMode::Deterministic, binning)?,
                None => unchecked(condition, "hypothesis.step_bound_c not given"),
            },
            Condition::StepBoundCExpected => {
                let c = match &hypothesis.kind {
                    HypothesisKind::AdditiveLower { step_bound_c, .. } => Some(*step_bound_c),
                    _ => hypothesis.step_bound_c,
                };
                match c {
                    Some(c) => check_step_bound(batch, c, StepBoundMode::Expected, binning)?,
                    None => unchecked(condition, "hypothesis.step_bound_c not given"),
                }
            }
            Condition::HMonotone | Condition::VariableDrift => {
                let HypothesisKind::Variable { h } = &hypothesis.kind else {
                    reports.push(unchecked(condition, "no h in this hypothesis"));
                    continue;
                };
                if condition == Condition::HMonotone {
                    check_h_monotone(h, rule.x_min)
                } else {
                    or_vacuous(check_variable_drift(batch, h, binning), condition)?
                }
            }
            Condition::MultiplicativeDrift => {
                let delta = need_delta(condition)?;
                or_vacuous(check_multiplicative_drift(batch, delta, binning), condition)?
            }
            Condition::Supermartingale | Condition::OptionalStopping | Condition::AzumaTail => {
                unchecked(condition, "not a bound precondition")
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

fn metadata(command: &'static str, simulation: &SimulationConfig, started: Instant) -> Metadata {
    Metadata {
        command,
        master_seed: simulation.master_seed,
        trials: simulation.trials,
        max_steps: simulation.max_steps,
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds: started.elapsed().as_secs_f64(),
    }
}

fn empty_report(config: &ExperimentConfig, command: &'static str, started: Instant) -> Report {
    Report {
        process: config.process.family().clone(),
        x0: config.process.x0(),
        rule: config.rule,
        bounds: Vec::new(),
        estimate: None,
        checks: Vec::new(),
        applicability: Vec::new(),
        oracle: None,
        metadata: metadata(command, &config.simulation, started),
    }
}

fn oracle(config: &ExperimentConfig) -> Result<Option<ExactHittingTimes>, AnalyzeError> {
    config
        .process
        .finite_chain()
        .map(|chain| exact_hitting_time_markov(&chain, &config.rule))
        .transpose()
}

fn simulate(config: &ExperimentConfig, record_paths: bool) -> Result<TrajectoryBatch, SimulationError> {
    simulate_batch(
        &config.process,
        &config.rule,
        &SimulationConfig {
            record_paths,
            ..config.simulation
        },
    )
}

/// Full pipeline: bounds, simulation, precondition checks, applicability and
/// the exact oracle when the process is a finite chain.
///
/// A bound whose preconditions fail stays in the report, marked not
/// applicable with the failing conditions listed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, RunError> {
    run_experiment_with_batch(config).map(|(report, _)| report)
}

pub(crate) fn run_experiment_with_batch(config: &ExperimentConfig) -> Result<(Report, TrajectoryBatch), RunError> {
    let started = Instant::now();
    let batch = simulate(config, true)?;
    let estimate = summarize(&batch)?;
    let mut report = empty_report(config, "verify", started);
    report.estimate = Some(estimate);

    if let Some(hypothesis) = &config.hypothesis {
        let bounds = compute_bounds(hypothesis, config.process.x0(), &config.rule)?;
        let theorems: Vec<TheoremId> = bounds.iter().map(|b| b.theorem).collect();
        let mut conditions: Vec<Condition> = Vec::new();
        for b in &bounds {
            for &c in &b.assumed_preconditions {
                if !conditions.contains(&c) {
                    conditions.push(c);
                }
            }
        }
        let mut checks = run_checks(&conditions, hypothesis, &batch, &config.rule, config.binning)?;
        if let (HypothesisKind::AdditiveLower { step_bound_c, .. }, Some(StepBoundMode::Deterministic)) =
            (&hypothesis.kind, hypothesis.step_bound_mode)
        {
            checks.push(check_step_bound(
                &batch,
                *step_bound_c,
                StepBoundMode::Deterministic,
                config.binning,
            )?);
        }
        let applicability = applicable_theorems(&checks, &theorems)?;
        report.bounds = bounds
            .into_iter()
            .zip(&applicability)
            .map(|(bound, a)| ReportedBound {
                title: bound.theorem.title(),
                applicable: Some(a.applicable),
                missing: a.missing.clone(),
                bound,
            })
            .collect();
        report.checks = checks;
        report.applicability = applicability;
    }
    report.oracle = oracle(config)?;
    report.metadata = metadata("verify", &config.simulation, started);
    Ok((report, batch))
}

/// Bounds only; nothing is simulated, so applicability is left open.
pub fn run_bounds(config: &ExperimentConfig) -> Result<Report, RunError> {
    let started = Instant::now();
    let hypothesis = config
        .hypothesis
        .as_ref()
        .ok_or_else(|| ConfigError::validation("hypothesis", "the bound command needs a [hypothesis] section"))?;
    let mut report = empty_report(config, "bound", started);
    report.bounds = compute_bounds(hypothesis, config.process.x0(), &config.rule)?
        .into_iter()
        .map(|bound| ReportedBound {
            title: bound.theorem.title(),
            applicable: None,
            missing: Vec::new(),
            bound,
        })
        .collect();
    report.metadata = metadata("bound", &config.simulation, started);
    Ok(report)
}

/// Monte Carlo estimate only.
pub fn run_simulation(config: &ExperimentConfig) -> Result<Report, RunError> {
    run_simulation_with_batch(config, false).map(|(report, _)| report)
}

pub(crate) fn run_simulation_with_batch(
    config: &ExperimentConfig,
    record_paths: bool,
) -> Result<(Report, TrajectoryBatch), RunError> {
    let started = Instant::now();
    let batch = simulate(config, record_paths)?;
    let mut report = empty_report(config, "simulate", started);
    report.estimate = Some(summarize(&batch)?);
    report.metadata = metadata("simulate", &config.simulation, started);
    Ok((report, batch))
}

/// Exact solve of the finite-chain encoding.
pub fn run_oracle(config: &ExperimentConfig) -> Result<Report, RunError> {
    let started = Instant::now();
    let exact = oracle(config)?.ok_or_else(|| {
        ConfigError::validation("process.family", "the oracle needs a process with a finite-chain encoding")
    })?;
    let mut report = empty_report(config, "oracle", started);
    report.oracle = Some(exact);
    report.metadata = metadata("oracle", &config.simulation, started);
    Ok(report)
}
