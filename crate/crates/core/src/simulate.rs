//! Monte Carlo engine for first-hitting times.
//!
//! Every trajectory draws from its own [`RngStream`], seeded by
//! [`derive_seed`] from the master seed and the trajectory index. Work is
//! spread over the current rayon pool, results are collected in index order
//! and every sum is accumulated sequentially in that order, so outputs are
//! bit-identical for any worker count.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::process::{ProcessSpec, RngStream, StoppingRule};

/// Increment of the SplitMix64 sequence (the odd integer closest to 2^64/φ).
pub const SEED_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("all {trials} trajectories were censored; the hitting-time estimate is undefined")]
    AllCensored { trials: u64 },
    #[error("invalid simulation setting `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub trials: u64,
    /// Censoring horizon: the number of steps a trajectory may take.
    pub max_steps: u64,
    pub master_seed: u64,
    pub record_paths: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            trials: 100_000,
            max_steps: 1_000_000,
            master_seed: 42,
            record_paths: false,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.trials == 0 {
            return Err(SimulationError::InvalidConfig {
                field: "trials",
                reason: "must be >= 1".into(),
            });
        }
        if self.max_steps == 0 {
            return Err(SimulationError::InvalidConfig {
                field: "max_steps",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// The first index at which the stopping rule held, or censoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HittingTime {
    Hit(u64),
    Censored,
}

impl HittingTime {
    pub fn steps(self) -> Option<u64> {
        match self {
            HittingTime::Hit(t) => Some(t),
            HittingTime::Censored => None,
        }
    }
}

impl Serialize for HittingTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            HittingTime::Hit(t) => serializer.serialize_u64(*t),
            HittingTime::Censored => serializer.serialize_str("censored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryOutcome {
    pub hitting_time: HittingTime,
    /// `X_0`.
    pub initial_value: f64,
    /// `X_T`, or the value at the horizon when censored.
    pub final_value: f64,
    /// `T`, or the horizon when censored.
    pub steps_taken: u64,
    /// `X_0 ..= X_T` (or up to the horizon) when recording was requested.
    pub path: Option<Vec<f64>>,
}

impl TrajectoryOutcome {
    pub fn is_censored(&self) -> bool {
        self.hitting_time == HittingTime::Censored
    }
}

/// Outcomes of one simulation run, in trajectory-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBatch {
    pub rule: StoppingRule,
    pub trajectories: Vec<TrajectoryOutcome>,
}

impl TrajectoryBatch {
    pub fn censored_count(&self) -> u64 {
        self.trajectories.iter().filter(|t| t.is_censored()).count() as u64
    }

    /// The batch with every path value replaced by `f(t, X_t)`.
    pub fn map_values(&self, f: impl Fn(u64, f64) -> f64) -> TrajectoryBatch {
        let trajectories = self
            .trajectories
            .iter()
            .map(|traj| {
                let path = traj
                    .path
                    .as_ref()
                    .map(|p| p.iter().enumerate().map(|(t, &x)| f(t as u64, x)).collect::<Vec<_>>());
                TrajectoryOutcome {
                    hitting_time: traj.hitting_time,
                    initial_value: f(0, traj.initial_value),
                    final_value: f(traj.steps_taken, traj.final_value),
                    steps_taken: traj.steps_taken,
                    path,
                }
            })
            .collect();
        TrajectoryBatch {
            rule: self.rule,
            trajectories,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingTimeEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Normal-approximation interval `mean ± 1.96·stderr`.
    pub ci95: (f64, f64),
    pub trials: u64,
    pub censored_count: u64,
}

/// Mixes `(master, index)` into the seed of trajectory `index`.
///
/// The input `master + SEED_GAMMA·(index + 1)` (wrapping) goes through the
/// SplitMix64 finalizer
///
/// ```text
/// z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
/// z = (z ^ (z >> 27)) * 0x94d049bb133111eb
/// z ^ (z >> 31)
/// ```
///
/// Both steps are bijections, so distinct indices under one master never
/// collide.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(SEED_GAMMA.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs one trajectory until the stopping rule holds or `max_steps` steps
/// have been taken.
pub fn run_trajectory(
    spec: &ProcessSpec,
    rule: &StoppingRule,
    rng: &mut RngStream,
    max_steps: u64,
    record: bool,
) -> TrajectoryOutcome {
    let mut state = spec.initial_state();
    let mut value = spec.value(state);
    let initial_value = value;
    let mut path = record.then(|| vec![value]);
    if rule.is_stopped(value) {
        return TrajectoryOutcome {
            hitting_time: HittingTime::Hit(0),
            initial_value,
            final_value: value,
            steps_taken: 0,
            path,
        };
    }
    for t in 1..=max_steps {
        state = spec.step(state, rng);
        value = spec.value(state);
        if let Some(p) = path.as_mut() {
            p.push(value);
        }
        if rule.is_stopped(value) {
            return TrajectoryOutcome {
                hitting_time: HittingTime::Hit(t),
                initial_value,
                final_value: value,
                steps_taken: t,
                path,
            };
        }
    }
    TrajectoryOutcome {
        hitting_time: HittingTime::Censored,
        initial_value,
        final_value: value,
        steps_taken: max_steps,
        path,
    }
}

/// Runs `config.trials` independent trajectories.
pub fn simulate_batch(
    spec: &ProcessSpec,
    rule: &StoppingRule,
    config: &SimulationConfig,
) -> Result<TrajectoryBatch, SimulationError> {
    config.validate()?;
    let trajectories = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(config.master_seed, i);
            run_trajectory(spec, rule, &mut rng, config.max_steps, config.record_paths)
        })
        .collect();
    Ok(TrajectoryBatch {
        rule: *rule,
        trajectories,
    })
}

/// Mean, standard error and normal 95% interval of the uncensored hitting times.
pub fn summarize(batch: &TrajectoryBatch) -> Result<HittingTimeEstimate, SimulationError> {
    let times: Vec<f64> = batch
        .trajectories
        .iter()
        .filter_map(|t| t.hitting_time.steps())
        .map(|t| t as f64)
        .collect();
    let trials = batch.trajectories.len() as u64;
    if times.is_empty() {
        return Err(SimulationError::AllCensored { trials });
    }
    let (mean, stderr) = mean_and_stderr(&times);
    Ok(HittingTimeEstimate {
        mean,
        stderr,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
        trials,
        censored_count: trials - times.len() as u64,
    })
}

/// Estimates `E[T | X_0]` by simulation.
pub fn estimate_hitting_time(
    spec: &ProcessSpec,
    rule: &StoppingRule,
    config: &SimulationConfig,
) -> Result<HittingTimeEstimate, SimulationError> {
    let config = SimulationConfig {
        record_paths: false,
        ..*config
    };
    summarize(&simulate_batch(spec, rule, &config)?)
}

/// Sample mean and standard error, summed in slice order.
pub(crate) fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Writes recorded paths as `trajectory_index,t,value` rows.
pub fn write_paths_csv(batch: &TrajectoryBatch, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "trajectory_index,t,value")?;
    for (i, traj) in batch.trajectories.iter().enumerate() {
        if let Some(path) = &traj.path {
            for (t, x) in path.iter().enumerate() {
                writeln!(out, "{i},{t},{x}")?;
            }
        }
    }
    Ok(())
}
