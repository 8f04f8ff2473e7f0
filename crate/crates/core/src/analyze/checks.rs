use super::profile::{binned_means, estimate_scaled_drift, for_each_transition, for_each_value};
use super::{AnalyzeError, Binning, CheckKind, CheckReport, DriftProfile, Witness, FLOAT_SLACK, STAT_SLACK_SIGMAS};
use crate::bounds::{Condition, HFunction, StepBoundMode};
use crate::simulate::TrajectoryBatch;

fn bin_witness(bin: &super::DriftBin) -> Witness {
    Witness {
        trajectory_index: bin.first_seen.0,
        t: bin.first_seen.1,
        value: bin.first_value,
    }
}

/// Every qualifying bin mean must be at least `threshold` up to slack.
fn mean_at_least(condition: Condition, profile: &DriftProfile, threshold: f64) -> CheckReport {
    let mut report = CheckReport::new(condition, CheckKind::Statistical);
    report.parameter = Some(threshold);
    let Some(min) = profile.global_min_decrease else {
        report.holds = false;
        report.note = Some(format!("no bin reached the sample floor of {}", profile.min_samples));
        return report;
    };
    report.margin = min - threshold;
    let fp = FLOAT_SLACK * threshold.abs().max(1.0);
    for bin in profile.qualifying() {
        let slack = STAT_SLACK_SIGMAS * bin.stderr + fp;
        if bin.mean_decrease == min {
            report.tolerance.get_or_insert(slack);
        }
        if bin.mean_decrease < threshold - slack {
            report.holds = false;
            report.push_witness(bin_witness(bin));
        }
    }
    report
}

/// Every qualifying bin mean must be at most `threshold` up to slack.
fn mean_at_most(
    condition: Condition,
    bins: &[super::DriftBin],
    min_samples: u64,
    threshold: f64,
) -> CheckReport {
    let mut report = CheckReport::new(condition, CheckKind::Statistical);
    report.parameter = Some(threshold);
    let qualifying: Vec<_> = bins.iter().filter(|b| b.sample_count >= min_samples).collect();
    let Some(max) = qualifying.iter().map(|b| b.mean_decrease).reduce(f64::max) else {
        report.holds = false;
        report.note = Some(format!("no bin reached the sample floor of {min_samples}"));
        return report;
    };
    report.margin = threshold - max;
    let fp = FLOAT_SLACK * threshold.abs().max(1.0);
    for bin in qualifying {
        let slack = STAT_SLACK_SIGMAS * bin.stderr + fp;
        if bin.mean_decrease == max {
            report.tolerance.get_or_insert(slack);
        }
        if bin.mean_decrease > threshold + slack {
            report.holds = false;
            report.push_witness(bin_witness(bin));
        }
    }
    report
}

/// Drift at least `delta` in every bin.
pub fn check_additive_drift(profile: &DriftProfile, delta: f64) -> CheckReport {
    mean_at_least(Condition::AdditiveDrift, profile, delta)
}

/// Drift at most `delta` in every bin.
pub fn check_drift_upper(profile: &DriftProfile, delta: f64) -> CheckReport {
    mean_at_most(
        Condition::AdditiveDriftUpper,
        &profile.bins,
        profile.min_samples,
        delta,
    )
}

/// Drift nonnegative in every bin.
pub fn check_supermartingale(profile: &DriftProfile) -> CheckReport {
    mean_at_least(Condition::Supermartingale, profile, 0.0)
}

/// Drift at least `h(X_t)`: the normalized decrease `(X_t - X_{t+1}) / h(X_t)`
/// must average at least 1 in every bin.
pub fn check_variable_drift(batch: &TrajectoryBatch, h: &HFunction, binning: Binning) -> Result<CheckReport, AnalyzeError> {
    let profile = estimate_scaled_drift(batch, binning, |x| h.eval(x))?;
    let mut report = mean_at_least(Condition::VariableDrift, &profile, 1.0);
    report.parameter = None;
    Ok(report)
}

/// Drift at least `delta·X_t`, checked on the normalized decrease.
pub fn check_multiplicative_drift(
    batch: &TrajectoryBatch,
    delta: f64,
    binning: Binning,
) -> Result<CheckReport, AnalyzeError> {
    let profile = estimate_scaled_drift(batch, binning, |x| delta * x)?;
    let mut report = mean_at_least(Condition::MultiplicativeDrift, &profile, 1.0);
    report.parameter = Some(delta);
    Ok(report)
}

/// Every value up to the threshold comparison `value >= floor`, for `t <= T`.
fn floor_check(condition: Condition, batch: &TrajectoryBatch, floor: f64) -> Result<CheckReport, AnalyzeError> {
    let mut report = CheckReport::new(condition, CheckKind::Deterministic);
    report.parameter = Some(floor);
    let mut min = f64::INFINITY;
    for_each_value(batch, true, |i, t, x| {
        min = min.min(x);
        if x < floor {
            report.push_witness(Witness {
                trajectory_index: i,
                t,
                value: x,
            });
        }
    })?;
    if min.is_infinite() {
        report.vacuous = true;
        return Ok(report);
    }
    report.margin = min - floor;
    report.holds = report.margin >= 0.0;
    Ok(report)
}

/// `X_t >= 0` for all `t <= T`.
pub fn check_nonnegativity(batch: &TrajectoryBatch) -> Result<CheckReport, AnalyzeError> {
    floor_check(Condition::Nonnegativity, batch, 0.0)
}

/// `X_t >= x_min` for all `t <= T`.
pub fn check_at_or_above_target(batch: &TrajectoryBatch, x_min: f64) -> Result<CheckReport, AnalyzeError> {
    floor_check(Condition::AtOrAboveTarget, batch, x_min)
}

/// `X_t <= c` for all `t < T`.
pub fn check_state_bound(batch: &TrajectoryBatch, c: f64) -> Result<CheckReport, AnalyzeError> {
    let mut report = CheckReport::new(Condition::StateBoundC, CheckKind::Deterministic);
    report.parameter = Some(c);
    let mut max = f64::NEG_INFINITY;
    for_each_value(batch, false, |i, t, x| {
        max = max.max(x);
        if x > c {
            report.push_witness(Witness {
                trajectory_index: i,
                t,
                value: x,
            });
        }
    })?;
    if max.is_infinite() {
        report.vacuous = true;
        return Ok(report);
    }
    report.margin = c - max;
    report.holds = report.margin >= 0.0;
    Ok(report)
}

/// Step bound `c` on transitions out of pre-stopping states, either on every
/// step or on binned conditional means of `|X_{t+1} - X_t|`.
pub fn check_step_bound(
    batch: &TrajectoryBatch,
    c: f64,
    mode: StepBoundMode,
    binning: Binning,
) -> Result<CheckReport, AnalyzeError> {
    match mode {
        StepBoundMode::Deterministic => {
            let mut report = CheckReport::new(Condition::StepBoundCDeterministic, CheckKind::Deterministic);
            report.parameter = Some(c);
            let mut max: Option<f64> = None;
            for_each_transition(batch, |i, t, x, y| {
                let step = (y - x).abs();
                max = Some(max.map_or(step, |m: f64| m.max(step)));
                if step > c {
                    report.push_witness(Witness {
                        trajectory_index: i,
                        t,
                        value: x,
                    });
                }
            })?;
            match max {
                Some(max) => {
                    report.margin = c - max;
                    report.holds = report.margin >= 0.0;
                }
                None => report.vacuous = true,
            }
            Ok(report)
        }
        StepBoundMode::Expected => {
            let bins = match binned_means(batch, binning, |x, y| Some((y - x).abs())) {
                Ok(bins) => bins,
                Err(AnalyzeError::NoTransitions) => {
                    let mut report = CheckReport::new(Condition::StepBoundCExpected, CheckKind::Statistical);
                    report.parameter = Some(c);
                    report.vacuous = true;
                    return Ok(report);
                }
                Err(e) => return Err(e),
            };
            Ok(mean_at_most(Condition::StepBoundCExpected, &bins, binning.min_samples, c))
        }
    }
}

/// Machine check of `h`: monotone, and positive from `x_min` on.
pub fn check_h_monotone(h: &HFunction, x_min: f64) -> CheckReport {
    let mut report = CheckReport::new(Condition::HMonotone, CheckKind::Deterministic);
    report.parameter = Some(x_min);
    if let Err(e) = h.validate_for(x_min) {
        report.holds = false;
        report.margin = -1.0;
        report.note = Some(e.to_string());
    }
    report
}

/// A placeholder for a condition that could not be evaluated.
pub fn unchecked(condition: Condition, reason: impl Into<String>) -> CheckReport {
    let mut report = CheckReport::new(condition, CheckKind::Unchecked);
    report.holds = false;
    report.note = Some(reason.into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::estimate_drift;
    use crate::process::{Family, ProcessSpec, StoppingRule};
    use crate::simulate::{simulate_batch, SimulationConfig};

    fn batch(family: Family, trials: u64) -> TrajectoryBatch {
        let spec = ProcessSpec::new(family).unwrap();
        simulate_batch(
            &spec,
            &StoppingRule::ZERO,
            &SimulationConfig {
                trials,
                max_steps: 100_000,
                master_seed: 5,
                record_paths: true,
            },
        )
        .unwrap()
    }

    fn unit() -> TrajectoryBatch {
        batch(Family::DeterministicDecrease { delta: 1.0, x0: 10.0 }, 100)
    }

    #[test]
    fn additive_drift_on_unit_decrease() {
        let p = estimate_drift(&unit(), 20, 30).unwrap();
        let r = check_additive_drift(&p, 1.0);
        assert!(r.holds);
        assert_eq!(r.margin, 0.0);
        let r = check_additive_drift(&p, 2.0);
        assert!(!r.holds);
        assert_eq!(r.margin, -1.0);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn additive_drift_on_biased_walk() {
        let b = batch(
            Family::BiasedWalk {
                n_states: 6,
                p_down: 0.6,
                start: 3,
            },
            20_000,
        );
        let p = estimate_drift(&b, 20, 30).unwrap();
        let r = check_additive_drift(&p, 0.2);
        assert!(r.holds, "{r:?}");
        assert!(!check_additive_drift(&p, 0.4).holds);
    }

    #[test]
    fn sample_floor_blocks_verdict() {
        let b = batch(Family::DeterministicDecrease { delta: 1.0, x0: 10.0 }, 5);
        let p = estimate_drift(&b, 20, 30).unwrap();
        let r = check_additive_drift(&p, 1.0);
        assert!(!r.holds);
        assert!(r.note.unwrap().contains("sample floor"));
    }

    #[test]
    fn nonnegativity_examples() {
        let b = batch(Family::Example3 { delta: 0.3, x0: 5.0 }, 3);
        assert!(check_nonnegativity(&b).unwrap().holds);

        let b = batch(Family::Example1 { n: 10 }, 10_000);
        let r = check_nonnegativity(&b).unwrap();
        assert!(!r.holds);
        assert_eq!(r.margin, -9.0);
        assert!(r.witnesses.iter().all(|w| w.value == -9.0));
        assert_eq!(r.witnesses.len(), crate::analyze::MAX_WITNESSES);

        let empty = TrajectoryBatch {
            rule: StoppingRule::ZERO,
            trajectories: vec![],
        };
        let r = check_nonnegativity(&empty).unwrap();
        assert!(r.holds && r.vacuous);
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn step_bound_examples() {
        let binning = Binning::default();
        assert!(check_step_bound(&unit(), 1.0, StepBoundMode::Deterministic, binning).unwrap().holds);

        let b = batch(Family::Example2 { delta: 0.5 }, 20_000);
        let r = check_step_bound(&b, 10.0, StepBoundMode::Deterministic, binning).unwrap();
        assert!(!r.holds);
        // the jump to 0 has size X
        assert!(r.witnesses.iter().all(|w| w.value > 10.0));

        let b = batch(Family::Example1 { n: 10 }, 5_000);
        let r = check_step_bound(&b, 10.0, StepBoundMode::Deterministic, binning).unwrap();
        assert!(r.holds);
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn state_bound_examples() {
        let b = batch(
            Family::BiasedWalk {
                n_states: 6,
                p_down: 0.6,
                start: 3,
            },
            2_000,
        );
        assert!(check_state_bound(&b, 5.0).unwrap().holds);
        assert!(check_state_bound(&unit(), 10.0).unwrap().holds);
        let b = batch(Family::Example2 { delta: 0.5 }, 20_000);
        let r = check_state_bound(&b, 100.0).unwrap();
        assert!(!r.holds);
        assert!(r.witnesses.iter().all(|w| w.value > 100.0));
    }

    #[test]
    fn h_monotone_and_unchecked() {
        assert!(check_h_monotone(&HFunction::linear(0.5), 1.0).holds);
        let r = check_h_monotone(&HFunction::piecewise(vec![(0.0, 2.0), (1.0, 1.0)]), 0.0);
        assert!(!r.holds);
        let r = unchecked(Condition::StateBoundC, "no c");
        assert!(!r.holds);
        assert_eq!(r.kind, CheckKind::Unchecked);
    }
}
