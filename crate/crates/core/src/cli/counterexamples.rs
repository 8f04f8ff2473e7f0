use serde::Serialize;

use crate::analyze::{Binning, ExpectedTime};
use crate::bounds::{Condition, DriftHypothesis, HypothesisKind, TheoremId};
use crate::process::{Family, ProcessSpec, StoppingRule};
use crate::simulate::SimulationConfig;

use super::config::{ExperimentConfig, OutputFormat, Outputs};
use super::experiment::{run_experiment, RunError};
use super::report::Report;

/// Example 1 size.
pub const EXAMPLE1_N: u64 = 10;
/// Example 2 drift.
pub const EXAMPLE2_DELTA: f64 = 0.5;
/// Step bound claimed in the Example 2 lower-bound hypothesis.
pub const EXAMPLE2_STEP_C: f64 = 1.0;
/// Example 3 `(δ, x0, x_min)`.
pub const EXAMPLE3: (f64, f64, f64) = (0.1, 1000.0, 1.0);

/// One line of the counterexample summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub example: &'static str,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

fn experiment(family: Family, rule: StoppingRule, hypothesis: DriftHypothesis, trials: u64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        process: ProcessSpec::new(family).expect("built-in parameters are valid"),
        rule,
        hypothesis: Some(hypothesis),
        simulation: SimulationConfig {
            trials,
            master_seed: seed,
            ..SimulationConfig::default()
        },
        binning: Binning::default(),
        outputs: Outputs {
            report_path: None,
            format: OutputFormat::Json,
            dump_paths: false,
            paths_path: "paths.csv".into(),
        },
    }
}

fn within(report: &Report, target: f64) -> (f64, f64, bool) {
    let e = report.estimate.expect("verify reports carry an estimate");
    (e.mean, e.stderr, (e.mean - target).abs() <= 3.0 * e.stderr)
}

fn all_refused(report: &Report, missing: &[Condition]) -> bool {
    !report.bounds.is_empty()
        && report
            .bounds
            .iter()
            .all(|b| b.applicable == Some(false) && b.missing == missing)
}

fn example1(trials: u64, seed: u64) -> Result<CounterexampleRow, RunError> {
    let n = EXAMPLE1_N;
    let hypothesis = DriftHypothesis {
        state_bound_c: Some(1.0),
        step_bound_c: Some(n as f64),
        ..DriftHypothesis::new(HypothesisKind::AdditiveUpper { delta: 1.0 })
    };
    let report = run_experiment(&experiment(
        Family::Example1 { n },
        StoppingRule::ZERO,
        hypothesis,
        trials,
        seed,
    ))?;
    let exact = report.oracle.as_ref().map(|o| o.start_time);
    let (mean, stderr, close) = within(&report, n as f64);
    let refused = all_refused(&report, &[Condition::Nonnegativity]);
    Ok(CounterexampleRow {
        example: "example1",
        expected: format!("E[T] = {n}; additive upper bound 1 refused (missing nonnegativity)"),
        observed: format!(
            "oracle {}, simulated {mean:.4} ± {stderr:.4}, bounds {}",
            match exact {
                Some(ExpectedTime::Finite(v)) => v.to_string(),
                _ => "unavailable".into(),
            },
            if refused { "refused" } else { "NOT refused" }
        ),
        passed: exact == Some(ExpectedTime::Finite(n as f64)) && close && refused,
    })
}

fn example2(trials: u64, seed: u64) -> Result<CounterexampleRow, RunError> {
    let delta = EXAMPLE2_DELTA;
    let hypothesis = DriftHypothesis::new(HypothesisKind::AdditiveLower {
        delta,
        step_bound_c: EXAMPLE2_STEP_C,
    });
    let report = run_experiment(&experiment(
        Family::Example2 { delta },
        StoppingRule::ZERO,
        hypothesis,
        trials,
        seed,
    ))?;
    let (mean, stderr, close) = within(&report, 2.0);
    let refused = all_refused(&report, &[Condition::StepBoundCExpected]);
    Ok(CounterexampleRow {
        example: "example2",
        expected: format!(
            "E[T] = 2; additive lower bound {} refused (missing step-bound-c-expected)",
            2.0 / delta
        ),
        observed: format!(
            "simulated {mean:.4} ± {stderr:.4}, bound {}",
            if refused { "refused" } else { "NOT refused" }
        ),
        passed: close && refused,
    })
}

fn example3(seed: u64) -> Result<CounterexampleRow, RunError> {
    let (delta, x0, x_min) = EXAMPLE3;
    let mut t = 0u64;
    let mut x = x0;
    while x >= x_min {
        x *= 1.0 - delta;
        t += 1;
    }
    let report = run_experiment(&experiment(
        Family::Example3 { delta, x0 },
        StoppingRule::below(x_min),
        DriftHypothesis::new(HypothesisKind::Multiplicative { delta }),
        1,
        seed,
    ))?;
    let simulated = report.estimate.map(|e| e.mean).unwrap_or(f64::NAN);
    let bound = report
        .bounds
        .iter()
        .find(|b| b.bound.theorem == TheoremId::MultiplicativeUpperBelowTarget);
    let (value, applicable) = bound.map_or((f64::NAN, false), |b| (b.bound.value, b.applicable == Some(true)));
    let ratio = value / simulated;
    Ok(CounterexampleRow {
        example: "example3",
        expected: format!("T = {t} <= bound (1 + ln {x0})/{delta}, ratio in [1, 3]"),
        observed: format!(
            "T = {simulated}, bound {value:.6} ({}), ratio {ratio:.4}",
            if applicable { "applicable" } else { "NOT applicable" }
        ),
        passed: simulated == t as f64 && applicable && value > simulated && (1.0..=3.0).contains(&ratio),
    })
}

/// Runs the three worked examples and reports each against its documented
/// outcome.
pub fn run_counterexamples(trials: u64, seed: u64) -> Result<Vec<CounterexampleRow>, RunError> {
    Ok(vec![example1(trials, seed)?, example2(trials, seed)?, example3(seed)?])
}

/// Fixed-width text table of the summary.
pub fn format_table(rows: &[CounterexampleRow]) -> String {
    let width = |f: fn(&CounterexampleRow) -> &str, header: &str| {
        rows.iter().map(|r| f(r).chars().count()).max().unwrap_or(0).max(header.len())
    };
    let w0 = width(|r| r.example, "example");
    let w1 = width(|r| &r.expected, "expected");
    let w2 = width(|r| &r.observed, "observed");
    let mut out = format!("{:<w0$}  {:<w1$}  {:<w2$}  status\n", "example", "expected", "observed");
    for r in rows {
        out.push_str(&format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {}\n",
            r.example,
            r.expected,
            r.observed,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}
