//! Process data model: built-in families, finite Markov chains, stopping rules
//! and single-step dynamics.
//!
//! Every process is Markovian in its current state. Families that live on a
//! finite state graph ([`Family::BiasedWalk`], [`Family::MarkovChain`]) carry a
//! node index as their state; the remaining families carry the real value
//! directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::simulate::derive_seed;

/// Allowed deviation of a transition row sum from 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("transition row {row} sums to {sum}, expected 1 within {ROW_SUM_TOLERANCE:e}")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("unknown process family `{0}`")]
    UnknownFamily(String),
    #[error("{}", join_errors(.0))]
    Multiple(Vec<ProcessError>),
}

fn join_errors(errors: &[ProcessError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl ProcessError {
    fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ProcessError::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    fn from_list(mut errors: Vec<ProcessError>) -> Self {
        if errors.len() == 1 {
            errors.pop().unwrap()
        } else {
            ProcessError::Multiple(errors)
        }
    }
}

/// A finite Markov chain whose states carry real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainSpec {
    pub state_values: Vec<f64>,
    pub transition_rows: Vec<Vec<f64>>,
    pub start_state: usize,
}

impl MarkovChainSpec {
    pub fn len(&self) -> usize {
        self.state_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_values.is_empty()
    }

    pub fn value(&self, state: usize) -> f64 {
        self.state_values[state]
    }
}

/// The closed set of process families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `X_{t+1} = X_t - delta`.
    DeterministicDecrease { delta: f64, x0: f64 },
    /// Starts at 1; stays with probability `1 - 1/n`, otherwise jumps to `1 - n`.
    Example1 { n: u64 },
    /// Starts at 2; jumps to 0 with probability 1/2, otherwise `2 X_t - 2 delta`.
    Example2 { delta: f64 },
    /// `X_{t+1} = (1 - delta) X_t`.
    Example3 { delta: f64, x0: f64 },
    /// Walk on `{0, .., n_states - 1}` moving down with probability `p_down`.
    /// Up-moves at the top state are blocked; state 0 is absorbing.
    BiasedWalk {
        n_states: u64,
        p_down: f64,
        start: u64,
    },
    MarkovChain(MarkovChainSpec),
}

/// Current position of a process: a real value, or a node of a finite chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    Value(f64),
    Node(usize),
}

/// A validated process together with its initial value `X_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    family: Family,
    x0: f64,
}

impl ProcessSpec {
    pub fn new(family: Family) -> Result<Self, ProcessError> {
        validate_spec(&family).map_err(ProcessError::from_list)?;
        let x0 = match &family {
            Family::DeterministicDecrease { x0, .. } | Family::Example3 { x0, .. } => *x0,
            Family::Example1 { .. } => 1.0,
            Family::Example2 { .. } => 2.0,
            Family::BiasedWalk { start, .. } => *start as f64,
            Family::MarkovChain(chain) => chain.value(chain.start_state),
        };
        Ok(ProcessSpec { family, x0 })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn initial_state(&self) -> State {
        match &self.family {
            Family::BiasedWalk { start, .. } => State::Node(*start as usize),
            Family::MarkovChain(chain) => State::Node(chain.start_state),
            _ => State::Value(self.x0),
        }
    }

    /// The real value `X_t` associated with a state.
    pub fn value(&self, state: State) -> f64 {
        match (state, &self.family) {
            (State::Value(x), _) => x,
            (State::Node(i), Family::MarkovChain(chain)) => chain.value(i),
            (State::Node(i), _) => i as f64,
        }
    }

    /// Samples one successor of `current`.
    pub fn step(&self, current: State, rng: &mut RngStream) -> State {
        match (&self.family, current) {
            (Family::DeterministicDecrease { delta, .. }, State::Value(x)) => State::Value(x - delta),
            (Family::Example1 { n }, State::Value(x)) => {
                let n = *n as f64;
                if rng.uniform() < 1.0 / n {
                    State::Value(1.0 - n)
                } else {
                    State::Value(x)
                }
            }
            (Family::Example2 { delta }, State::Value(x)) => {
                if rng.uniform() < 0.5 {
                    State::Value(0.0)
                } else {
                    State::Value(2.0 * x - 2.0 * delta)
                }
            }
            (Family::Example3 { delta, .. }, State::Value(x)) => State::Value((1.0 - delta) * x),
            (
                Family::BiasedWalk {
                    n_states, p_down, ..
                },
                State::Node(i),
            ) => {
                if i == 0 {
                    return State::Node(0);
                }
                if rng.uniform() < *p_down {
                    State::Node(i - 1)
                } else {
                    State::Node((i + 1).min(*n_states as usize - 1))
                }
            }
            (Family::MarkovChain(chain), State::Node(i)) => {
                State::Node(sample_row(&chain.transition_rows[i], rng.uniform()))
            }
            (family, state) => panic!("state {state:?} does not belong to {family:?}"),
        }
    }

    /// The finite-chain encoding of this process, when it has one.
    ///
    /// Example 1 becomes the two-state chain `{1, 1 - n}` with the negative
    /// state absorbing.
    pub fn finite_chain(&self) -> Option<MarkovChainSpec> {
        match &self.family {
            Family::MarkovChain(chain) => Some(chain.clone()),
            Family::BiasedWalk {
                n_states,
                p_down,
                start,
            } => {
                let n = *n_states as usize;
                let mut rows = vec![vec![0.0; n]; n];
                rows[0][0] = 1.0;
                for (i, row) in rows.iter_mut().enumerate().skip(1) {
                    row[i - 1] += p_down;
                    row[(i + 1).min(n - 1)] += 1.0 - p_down;
                }
                Some(MarkovChainSpec {
                    state_values: (0..n).map(|i| i as f64).collect(),
                    transition_rows: rows,
                    start_state: *start as usize,
                })
            }
            Family::Example1 { n } => {
                let jump = 1.0 / *n as f64;
                Some(MarkovChainSpec {
                    state_values: vec![1.0, 1.0 - *n as f64],
                    transition_rows: vec![vec![1.0 - jump, jump], vec![0.0, 1.0]],
                    start_state: 0,
                })
            }
            _ => None,
        }
    }
}

fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, &p) in row.iter().enumerate() {
        if p > 0.0 {
            last_positive = j;
            acc += p;
            if u < acc {
                return j;
            }
        }
    }
    // rounding slack in the row sum
    last_positive
}

/// Checks every parameter constraint of `family`, collecting all violations.
pub fn validate_spec(family: &Family) -> Result<(), Vec<ProcessError>> {
    let mut errors = Vec::new();
    fn open_unit(errors: &mut Vec<ProcessError>, field: &str, v: f64) {
        if !(v > 0.0 && v < 1.0) {
            errors.push(ProcessError::invalid(
                field,
                format!("must lie in the open interval (0, 1), got {v}"),
            ));
        }
    }
    match family {
        Family::DeterministicDecrease { delta, x0 } => {
            if !(delta.is_finite() && *delta > 0.0) {
                errors.push(ProcessError::invalid("delta", format!("must be > 0, got {delta}")));
            }
            if !(x0.is_finite() && *x0 >= 0.0) {
                errors.push(ProcessError::invalid("x0", format!("must be >= 0, got {x0}")));
            }
        }
        Family::Example1 { n } => {
            if *n <= 1 {
                errors.push(ProcessError::invalid("n", format!("must be > 1, got {n}")));
            }
        }
        Family::Example2 { delta } => open_unit(&mut errors, "delta", *delta),
        Family::Example3 { delta, x0 } => {
            open_unit(&mut errors, "delta", *delta);
            if !(x0.is_finite() && *x0 > 1.0) {
                errors.push(ProcessError::invalid("x0", format!("must be > 1, got {x0}")));
            }
        }
        Family::BiasedWalk {
            n_states,
            p_down,
            start,
        } => {
            open_unit(&mut errors, "p_down", *p_down);
            if *n_states < 2 {
                errors.push(ProcessError::invalid(
                    "n_states",
                    format!("must be >= 2, got {n_states}"),
                ));
            }
            if start >= n_states {
                errors.push(ProcessError::invalid(
                    "start",
                    format!("must be below n_states = {n_states}, got {start}"),
                ));
            }
        }
        Family::MarkovChain(chain) => validate_chain(chain, &mut errors),
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn validate_chain(chain: &MarkovChainSpec, errors: &mut Vec<ProcessError>) {
    let n = chain.state_values.len();
    if n == 0 {
        errors.push(ProcessError::invalid("state_values", "must not be empty"));
        return;
    }
    if let Some(v) = chain.state_values.iter().find(|v| !v.is_finite()) {
        errors.push(ProcessError::invalid("state_values", format!("must be finite, got {v}")));
    }
    if chain.start_state >= n {
        errors.push(ProcessError::invalid(
            "start",
            format!("must index one of the {n} states, got {}", chain.start_state),
        ));
    }
    if chain.transition_rows.len() != n {
        errors.push(ProcessError::invalid(
            "transition_rows",
            format!("expected {n} rows, got {}", chain.transition_rows.len()),
        ));
    }
    for (i, row) in chain.transition_rows.iter().enumerate() {
        if row.len() != n {
            errors.push(ProcessError::invalid(
                "transition_rows",
                format!("row {i} has {} entries, expected {n}", row.len()),
            ));
            continue;
        }
        if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            errors.push(ProcessError::invalid(
                "transition_rows",
                format!("row {i} has entry {p} outside [0, 1]"),
            ));
            continue;
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            errors.push(ProcessError::NonStochasticRow { row: i, sum });
        }
    }
}

/// Stopping mode of a [`StoppingRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    /// Stop when `X_t < x_min`.
    Below,
    /// Stop when `X_t <= x_min`.
    AtOrBelow,
}

/// Target value and comparison defining the first-hitting time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub x_min: f64,
    pub mode: StopMode,
}

impl StoppingRule {
    /// `T = inf{t | X_t <= 0}`, the rule of the additive theorems.
    pub const ZERO: StoppingRule = StoppingRule {
        x_min: 0.0,
        mode: StopMode::AtOrBelow,
    };

    pub fn below(x_min: f64) -> Self {
        StoppingRule {
            x_min,
            mode: StopMode::Below,
        }
    }

    pub fn at_or_below(x_min: f64) -> Self {
        StoppingRule {
            x_min,
            mode: StopMode::AtOrBelow,
        }
    }

    pub fn is_stopped(&self, value: f64) -> bool {
        is_stopped(self, value)
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule::ZERO
    }
}

pub fn is_stopped(rule: &StoppingRule, value: f64) -> bool {
    match rule.mode {
        StopMode::Below => value < rule.x_min,
        StopMode::AtOrBelow => value <= rule.x_min,
    }
}

/// Per-trajectory random stream.
///
/// The generator is ChaCha8 seeded through `seed_from_u64` with
/// `derive_seed(master_seed, trajectory_index)`; uniforms are the standard
/// 53-bit `[0, 1)` draws of `rand`.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    trajectory_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, trajectory_index: u64) -> Self {
        RngStream {
            master_seed,
            trajectory_index,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(master_seed, trajectory_index)),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trajectory_index(&self) -> u64 {
        self.trajectory_index
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Named parameters for [`builtin_example`]; field names match the config keys.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessParams {
    pub n: Option<u64>,
    pub delta: Option<f64>,
    pub x0: Option<f64>,
    pub p_down: Option<f64>,
    pub n_states: Option<u64>,
    pub start: Option<u64>,
    pub state_values: Option<Vec<f64>>,
    pub transition_rows: Option<Vec<Vec<f64>>>,
}

impl ProcessParams {
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        if self.n.is_some() {
            keys.push("n");
        }
        if self.delta.is_some() {
            keys.push("delta");
        }
        if self.x0.is_some() {
            keys.push("x0");
        }
        if self.p_down.is_some() {
            keys.push("p_down");
        }
        if self.n_states.is_some() {
            keys.push("n_states");
        }
        if self.start.is_some() {
            keys.push("start");
        }
        if self.state_values.is_some() {
            keys.push("state_values");
        }
        if self.transition_rows.is_some() {
            keys.push("transition_rows");
        }
        keys
    }
}

/// Builds a validated process from a family name and its parameters.
///
/// Names: `example1`, `example2`, `example3`, `deterministic`, `biased_walk`,
/// `markov`. Parameters that a family fixes or does not use are rejected.
pub fn builtin_example(name: &str, params: &ProcessParams) -> Result<ProcessSpec, ProcessError> {
    let allowed: &[&str] = match name {
        "example1" => &["n"],
        "example2" => &["delta"],
        "example3" => &["delta", "x0"],
        "deterministic" => &["delta", "x0"],
        "biased_walk" => &["n_states", "p_down", "start"],
        "markov" => &["state_values", "transition_rows", "start"],
        _ => return Err(ProcessError::UnknownFamily(name.to_string())),
    };
    let mut errors: Vec<ProcessError> = params
        .present()
        .into_iter()
        .filter(|key| !allowed.contains(key))
        .map(|key| {
            let reason = match (name, key) {
                ("example1", "x0") => "fixed at 1 for example1".to_string(),
                ("example2", "x0") => "fixed at 2 for example2".to_string(),
                _ => format!("not a parameter of `{name}`"),
            };
            ProcessError::invalid(key, reason)
        })
        .collect();

    macro_rules! required {
        ($field:ident) => {
            match params.$field.clone() {
                Some(v) => Some(v),
                None => {
                    errors.push(ProcessError::invalid(stringify!($field), "required"));
                    None
                }
            }
        };
    }

    let family = match name {
        "example1" => required!(n).map(|n| Family::Example1 { n }),
        "example2" => required!(delta).map(|delta| Family::Example2 { delta }),
        "example3" => match (required!(delta), required!(x0)) {
            (Some(delta), Some(x0)) => Some(Family::Example3 { delta, x0 }),
            _ => None,
        },
        "deterministic" => match (required!(delta), required!(x0)) {
            (Some(delta), Some(x0)) => Some(Family::DeterministicDecrease { delta, x0 }),
            _ => None,
        },
        "biased_walk" => match (required!(n_states), required!(p_down), required!(start)) {
            (Some(n_states), Some(p_down), Some(start)) => Some(Family::BiasedWalk {
                n_states,
                p_down,
                start,
            }),
            _ => None,
        },
        "markov" => match (
            required!(state_values),
            required!(transition_rows),
            required!(start),
        ) {
            (Some(state_values), Some(transition_rows), Some(start)) => {
                Some(Family::MarkovChain(MarkovChainSpec {
                    state_values,
                    transition_rows,
                    start_state: start as usize,
                }))
            }
            _ => None,
        },
        _ => unreachable!(),
    };

    if let Some(family) = &family {
        if let Err(mut found) = validate_spec(family) {
            errors.append(&mut found);
        }
    }
    if !errors.is_empty() {
        return Err(ProcessError::from_list(errors));
    }
    ProcessSpec::new(family.expect("all required parameters present"))
}
