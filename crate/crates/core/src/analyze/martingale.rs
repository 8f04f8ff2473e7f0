use serde::{Deserialize, Serialize};

use super::checks::{check_step_bound, check_supermartingale};
use super::profile::{estimate_drift, path_of};
use super::{AnalyzeError, Binning, CheckKind, CheckReport, FLOAT_SLACK, STAT_SLACK_SIGMAS};
use crate::bounds::{azuma_tail, Condition, StepBoundMode};
use crate::simulate::{mean_and_stderr, HittingTime, TrajectoryBatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MartingaleDirection {
    /// `E[X_T] <= E[X_0]`.
    Super,
    /// `E[X_T] >= E[X_0]`.
    Sub,
}

/// Compares the sample means of `X_T` and `X_0`.
///
/// Super holds iff `mean(X_T - X_0) <= 3·stderr`; Sub mirrors it. The margin
/// is signed so that positive means the inequality holds with room to spare.
pub fn empirical_optional_stopping(
    batch: &TrajectoryBatch,
    direction: MartingaleDirection,
) -> Result<CheckReport, AnalyzeError> {
    let censored = batch.censored_count();
    if censored > 0 {
        return Err(AnalyzeError::CensoredBatch(censored));
    }
    let mut report = CheckReport::new(Condition::OptionalStopping, CheckKind::Statistical);
    if batch.trajectories.is_empty() {
        report.vacuous = true;
        return Ok(report);
    }
    let diffs: Vec<f64> = batch
        .trajectories
        .iter()
        .map(|t| t.final_value - t.initial_value)
        .collect();
    let scale = batch
        .trajectories
        .iter()
        .map(|t| t.initial_value.abs())
        .fold(1.0, f64::max);
    let (mean, stderr) = mean_and_stderr(&diffs);
    let slack = STAT_SLACK_SIGMAS * stderr + FLOAT_SLACK * scale;
    report.margin = match direction {
        MartingaleDirection::Super => -mean,
        MartingaleDirection::Sub => mean,
    };
    report.tolerance = Some(slack);
    report.holds = report.margin >= -slack;
    report.note = Some(format!("mean(X_T - X_0) = {mean}, stderr {stderr}"));
    Ok(report)
}

/// `Y_t = X_t + δ·t`, the process whose supermartingale property is
/// equivalent to additive drift at least δ.
pub fn add_drift_clock(batch: &TrajectoryBatch, delta: f64) -> TrajectoryBatch {
    batch.map_values(|t, x| x + delta * t as f64)
}

/// Value of the stopped process `X_{min(t, T)}`.
fn stopped_value(batch: &TrajectoryBatch, i: usize, t: u64) -> Result<f64, AnalyzeError> {
    let path = path_of(batch, i)?;
    if let Some(&x) = path.get(t as usize) {
        return Ok(x);
    }
    match batch.trajectories[i].hitting_time {
        HittingTime::Hit(_) => Ok(*path.last().expect("recorded paths hold X_0")),
        HittingTime::Censored => Err(AnalyzeError::PathTooShort { trajectory: i, t }),
    }
}

/// Compares the observed frequency of `X_t - X_0 >= r` on the stopped
/// process against `exp(-r²/(2tc²))`.
///
/// Differences bounded by `c` and supermartingale drift are checked first;
/// if either fails the result is [`AnalyzeError::PreconditionFailed`].
pub fn empirical_azuma(
    batch: &TrajectoryBatch,
    c: f64,
    t: u64,
    r: f64,
    binning: Binning,
) -> Result<CheckReport, AnalyzeError> {
    let bound = azuma_tail(t, c, r).map_err(|e| AnalyzeError::InvalidParameter {
        field: "azuma",
        reason: e.to_string(),
    })?;
    let steps = check_step_bound(batch, c, StepBoundMode::Deterministic, binning)?;
    if !steps.holds {
        return Err(AnalyzeError::PreconditionFailed(Box::new(steps)));
    }
    match estimate_drift(batch, binning.bin_count, binning.min_samples) {
        Ok(profile) => {
            let drift = check_supermartingale(&profile);
            if !drift.holds {
                return Err(AnalyzeError::PreconditionFailed(Box::new(drift)));
            }
        }
        Err(AnalyzeError::NoTransitions) => {}
        Err(e) => return Err(e),
    }

    let mut report = CheckReport::new(Condition::AzumaTail, CheckKind::Statistical);
    report.parameter = Some(bound);
    let n = batch.trajectories.len();
    if n == 0 {
        report.vacuous = true;
        return Ok(report);
    }
    let mut exceed = 0u64;
    for i in 0..n {
        let x0 = path_of(batch, i)?[0];
        if stopped_value(batch, i, t)? - x0 >= r {
            exceed += 1;
        }
    }
    let freq = exceed as f64 / n as f64;
    let slack = STAT_SLACK_SIGMAS * (bound * (1.0 - bound) / n as f64).sqrt();
    report.margin = bound - freq;
    report.tolerance = Some(slack);
    report.holds = report.margin >= -slack;
    report.note = Some(format!("{exceed} of {n} trajectories rose by at least {r} within {t} steps"));
    Ok(report)
}
