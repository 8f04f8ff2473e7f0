//! Empirical drift estimation, precondition checks, martingale-law checks and
//! the exact hitting-time oracle for finite chains.
//!
//! All trajectory-based checks look only at the pre-stopping part of each
//! path: transitions out of `X_t` for `t < T`, and values `X_t` for `t <= T`
//! where the theorem constrains `X_T` too. Nothing after `T` is sampled.

mod applicability;
mod checks;
mod martingale;
mod oracle;
mod profile;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{Condition, TheoremId};
use crate::process::ProcessError;

pub use applicability::{applicable_theorems, Applicability};
pub use checks::{
    check_additive_drift, check_at_or_above_target, check_drift_upper, check_h_monotone,
    check_multiplicative_drift, check_nonnegativity, check_state_bound, check_step_bound,
    check_supermartingale, check_variable_drift, unchecked,
};
pub use martingale::{add_drift_clock, empirical_azuma, empirical_optional_stopping, MartingaleDirection};
pub use oracle::{exact_drift_markov, exact_hitting_time_markov, ExactHittingTimes, ExpectedTime};
pub use profile::{estimate_drift, estimate_scaled_drift, DriftBin, DriftProfile};

/// Statistical checks allow this many standard errors of slack.
pub const STAT_SLACK_SIGMAS: f64 = 3.0;

/// Relative allowance for binary64 rounding in drift comparisons.
pub const FLOAT_SLACK: f64 = 1e-9;

/// Cap on witnesses kept per report.
pub const MAX_WITNESSES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyzeError {
    #[error("no pre-stopping transitions observed")]
    NoTransitions,
    #[error("trajectory {0} has no recorded path")]
    PathsNotRecorded(usize),
    #[error("{0} trajectories are censored; X_T is unobserved")]
    CensoredBatch(u64),
    #[error("trajectory {trajectory} ends before time {t}")]
    PathTooShort { trajectory: usize, t: u64 },
    #[error("precondition `{}` failed (margin {})", .0.condition, .0.margin)]
    PreconditionFailed(Box<CheckReport>),
    #[error("theorem `{}` needs condition `{condition}` but no check report covers it", .theorem.title())]
    MissingCheck { theorem: TheoremId, condition: Condition },
    #[error("invalid chain: {0}")]
    InvalidChain(ProcessError),
    #[error("hitting-time system is numerically singular at state {0}")]
    SingularSystem(usize),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

/// Binning used for conditional means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Binning {
    pub bin_count: usize,
    pub min_samples: u64,
}

impl Default for Binning {
    fn default() -> Self {
        Binning {
            bin_count: 20,
            min_samples: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Exact comparison on every observation.
    Deterministic,
    /// Comparison of conditional means with standard-error slack.
    Statistical,
    /// Not evaluated; never counts as holding.
    Unchecked,
}

/// An observation that violates a condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub trajectory_index: u64,
    pub t: u64,
    pub value: f64,
}

/// Outcome of one condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub condition: Condition,
    pub holds: bool,
    /// Worst-case slack; negative when the observed worst case is on the
    /// wrong side of the threshold.
    pub margin: f64,
    pub kind: CheckKind,
    /// The constant the condition was checked against (δ, c, x_min, ...).
    pub parameter: Option<f64>,
    /// Slack allowed beyond `margin >= 0` for statistical checks.
    pub tolerance: Option<f64>,
    /// True when there was nothing to check.
    pub vacuous: bool,
    pub witnesses: Vec<Witness>,
    pub note: Option<String>,
}

impl CheckReport {
    pub(crate) fn new(condition: Condition, kind: CheckKind) -> Self {
        CheckReport {
            condition,
            holds: true,
            margin: 0.0,
            kind,
            parameter: None,
            tolerance: None,
            vacuous: false,
            witnesses: Vec::new(),
            note: None,
        }
    }

    pub(crate) fn push_witness(&mut self, witness: Witness) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }
}
