use serde::Serialize;

use super::{AnalyzeError, Binning};
use crate::simulate::{HittingTime, TrajectoryBatch};

/// Conditional mean of the one-step decrease over a band of states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftBin {
    pub state_low: f64,
    pub state_high: f64,
    pub mean_decrease: f64,
    pub stderr: f64,
    pub sample_count: u64,
    /// First transition (trajectory index, t) that landed in the bin.
    #[serde(skip)]
    pub(crate) first_seen: (u64, u64),
    #[serde(skip)]
    pub(crate) first_value: f64,
}

/// Binned estimate of `X_t - E[X_{t+1} | X_t]` over pre-stopping states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftProfile {
    /// Nonempty bins in increasing state order.
    pub bins: Vec<DriftBin>,
    /// Minimum bin mean over bins with at least `min_samples` transitions.
    pub global_min_decrease: Option<f64>,
    pub global_max_decrease: Option<f64>,
    pub min_samples: u64,
    pub total_transitions: u64,
}

impl DriftProfile {
    /// Bins meeting the sample floor.
    pub fn qualifying(&self) -> impl Iterator<Item = &DriftBin> {
        self.bins.iter().filter(move |b| b.sample_count >= self.min_samples)
    }
}

/// Recorded path of trajectory `i`, or an error.
pub(crate) fn path_of(batch: &TrajectoryBatch, i: usize) -> Result<&[f64], AnalyzeError> {
    batch.trajectories[i]
        .path
        .as_deref()
        .ok_or(AnalyzeError::PathsNotRecorded(i))
}

/// Calls `f(trajectory, t, X_t, X_{t+1})` for every transition out of a
/// pre-stopping state, in trajectory then time order.
pub(crate) fn for_each_transition(
    batch: &TrajectoryBatch,
    mut f: impl FnMut(u64, u64, f64, f64),
) -> Result<(), AnalyzeError> {
    for i in 0..batch.trajectories.len() {
        let path = path_of(batch, i)?;
        for (t, pair) in path.windows(2).enumerate() {
            f(i as u64, t as u64, pair[0], pair[1]);
        }
    }
    Ok(())
}

/// Calls `f(trajectory, t, X_t)` for `t < T` (`include_stop = false`) or
/// `t <= T` (`include_stop = true`).
pub(crate) fn for_each_value(
    batch: &TrajectoryBatch,
    include_stop: bool,
    mut f: impl FnMut(u64, u64, f64),
) -> Result<(), AnalyzeError> {
    for (i, traj) in batch.trajectories.iter().enumerate() {
        let path = path_of(batch, i)?;
        let end = match traj.hitting_time {
            HittingTime::Hit(_) if !include_stop => path.len() - 1,
            _ => path.len(),
        };
        for (t, &x) in path[..end].iter().enumerate() {
            f(i as u64, t as u64, x);
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
    first_seen: (u64, u64),
    first_value: f64,
}

/// Equal-width binning of per-transition quantities keyed by `X_t`.
/// `quantity` returns `None` to skip a transition.
pub(crate) fn binned_means(
    batch: &TrajectoryBatch,
    binning: Binning,
    quantity: impl Fn(f64, f64) -> Option<f64>,
) -> Result<Vec<DriftBin>, AnalyzeError> {
    if binning.bin_count == 0 {
        return Err(AnalyzeError::InvalidParameter {
            field: "bin_count",
            reason: "must be >= 1".into(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for_each_transition(batch, |_, _, x, y| {
        if quantity(x, y).is_some() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    })?;
    if lo > hi {
        return Err(AnalyzeError::NoTransitions);
    }
    let width = (hi - lo) / binning.bin_count as f64;
    let index = |x: f64| -> usize {
        if width > 0.0 {
            (((x - lo) / width) as usize).min(binning.bin_count - 1)
        } else {
            0
        }
    };
    let mut acc: Vec<Option<Accumulator>> = vec![None; binning.bin_count];
    for_each_transition(batch, |i, t, x, y| {
        let Some(q) = quantity(x, y) else { return };
        let slot = &mut acc[index(x)];
        let a = slot.get_or_insert(Accumulator {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            first_seen: (i, t),
            first_value: x,
        });
        a.count += 1;
        let d = q - a.mean;
        a.mean += d / a.count as f64;
        a.m2 += d * (q - a.mean);
    })?;
    Ok(acc
        .into_iter()
        .enumerate()
        .filter_map(|(k, a)| {
            let a = a?;
            let stderr = if a.count > 1 {
                (a.m2 / (a.count - 1) as f64 / a.count as f64).sqrt()
            } else {
                0.0
            };
            let (state_low, state_high) = if width > 0.0 {
                (lo + width * k as f64, if k + 1 == binning.bin_count { hi } else { lo + width * (k + 1) as f64 })
            } else {
                (lo, hi)
            };
            Some(DriftBin {
                state_low,
                state_high,
                mean_decrease: a.mean,
                stderr,
                sample_count: a.count,
                first_seen: a.first_seen,
                first_value: a.first_value,
            })
        })
        .collect())
}

fn profile_from_bins(bins: Vec<DriftBin>, min_samples: u64) -> DriftProfile {
    let total_transitions = bins.iter().map(|b| b.sample_count).sum();
    let qualifying = || bins.iter().filter(|b| b.sample_count >= min_samples);
    let global_min_decrease = qualifying().map(|b| b.mean_decrease).reduce(f64::min);
    let global_max_decrease = qualifying().map(|b| b.mean_decrease).reduce(f64::max);
    DriftProfile {
        bins,
        global_min_decrease,
        global_max_decrease,
        min_samples,
        total_transitions,
    }
}

/// Binned one-step decrease `X_t - X_{t+1}`.
pub fn estimate_drift(batch: &TrajectoryBatch, bin_count: usize, min_samples: u64) -> Result<DriftProfile, AnalyzeError> {
    let binning = Binning {
        bin_count,
        min_samples,
    };
    let bins = binned_means(batch, binning, |x, y| Some(x - y))?;
    Ok(profile_from_bins(bins, min_samples))
}

/// Binned normalized decrease `(X_t - X_{t+1}) / scale(X_t)`.
///
/// Drift at least `h(X_t)` in every state is equivalent to every conditional
/// mean of the normalized decrease being at least 1, which survives averaging
/// over a bin. Transitions where `scale` is not positive are skipped.
pub fn estimate_scaled_drift(
    batch: &TrajectoryBatch,
    binning: Binning,
    scale: impl Fn(f64) -> f64,
) -> Result<DriftProfile, AnalyzeError> {
    let bins = binned_means(batch, binning, |x, y| {
        let s = scale(x);
        (s > 0.0).then(|| (x - y) / s)
    })?;
    Ok(profile_from_bins(bins, binning.min_samples))
}
