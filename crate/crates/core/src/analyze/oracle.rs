use std::collections::VecDeque;

use serde::{Serialize, Serializer};

use super::AnalyzeError;
use crate::process::{validate_spec, Family, MarkovChainSpec, ProcessError, StoppingRule};

/// `E[T]` from one state; `Infinite` when the target is missed with positive
/// probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedTime {
    Finite(f64),
    Infinite,
}

impl ExpectedTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExpectedTime::Finite(v) => Some(v),
            ExpectedTime::Infinite => None,
        }
    }
}

impl Serialize for ExpectedTime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExpectedTime::Finite(v) => s.serialize_f64(*v),
            ExpectedTime::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactHittingTimes {
    /// Indexed by chain state; stopped states have time 0.
    pub per_state: Vec<ExpectedTime>,
    pub start_state: usize,
    pub start_value: f64,
    pub start_time: ExpectedTime,
}

fn validate(chain: &MarkovChainSpec) -> Result<(), AnalyzeError> {
    validate_spec(&Family::MarkovChain(chain.clone())).map_err(|mut errors| {
        AnalyzeError::InvalidChain(if errors.len() == 1 {
            errors.remove(0)
        } else {
            ProcessError::Multiple(errors)
        })
    })
}

/// States from which `targets` can be reached along positive-probability
/// edges whose tails lie in `through`.
fn backward_reach(rows: &[Vec<f64>], targets: &[bool], through: &[bool]) -> Vec<bool> {
    let n = rows.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 && i != j {
                preds[j].push(i);
            }
        }
    }
    let mut seen = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| targets[i]).collect();
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            if !seen[i] && through[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
    }
    seen
}

/// Exact `E[T_s]` for every state by solving
/// `E[T_s] = 1 + Σ_j p_sj E[T_j]` over the non-stopped states with finite
/// expectation.
///
/// A state has infinite expected time when it can reach, without stopping, a
/// state from which the target is unreachable. Those states are removed
/// before the solve.
pub fn exact_hitting_time_markov(
    chain: &MarkovChainSpec,
    rule: &StoppingRule,
) -> Result<ExactHittingTimes, AnalyzeError> {
    validate(chain)?;
    let n = chain.len();
    let rows = &chain.transition_rows;
    let stopped: Vec<bool> = (0..n).map(|s| rule.is_stopped(chain.value(s))).collect();
    let live: Vec<bool> = stopped.iter().map(|s| !s).collect();
    let reaches = backward_reach(rows, &stopped, &live);
    let bad: Vec<bool> = reaches.iter().map(|r| !r).collect();
    let infinite = backward_reach(rows, &bad, &live);

    let unknowns: Vec<usize> = (0..n).filter(|&s| live[s] && !infinite[s]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &s) in unknowns.iter().enumerate() {
        slot[s] = k;
    }
    let m = unknowns.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (k, &s) in unknowns.iter().enumerate() {
        // the diagonal is the exit probability summed directly, so a
        // self-loop of 1 - 1/n leaves exactly 1/n
        let mut exit = 0.0;
        for (j, &p) in rows[s].iter().enumerate() {
            if j == s || p == 0.0 {
                continue;
            }
            exit += p;
            if slot[j] != usize::MAX {
                a[k][slot[j]] -= p;
            }
        }
        a[k][k] = exit;
        a[k][m] = 1.0;
    }
    let solution = solve(a).map_err(|k| AnalyzeError::SingularSystem(unknowns[k]))?;

    let per_state: Vec<ExpectedTime> = (0..n)
        .map(|s| {
            if stopped[s] {
                ExpectedTime::Finite(0.0)
            } else if infinite[s] {
                ExpectedTime::Infinite
            } else {
                ExpectedTime::Finite(solution[slot[s]])
            }
        })
        .collect();
    Ok(ExactHittingTimes {
        start_state: chain.start_state,
        start_value: chain.value(chain.start_state),
        start_time: per_state[chain.start_state],
        per_state,
    })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
/// Returns the pivot row index on numerical singularity.
fn solve(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>, usize> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        let scale = a[pivot][..m].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if a[pivot][col].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) || a[pivot][col] == 0.0 {
            return Err(col);
        }
        a.swap(col, pivot);
        for i in col + 1..m {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for k in col..=m {
                    a[i][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let tail: f64 = (i + 1..m).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][m] - tail) / a[i][i];
    }
    Ok(x)
}

/// Exact drift `Σ_j p_sj (value(s) - value(j))` per state; `None` at stopped
/// states.
pub fn exact_drift_markov(chain: &MarkovChainSpec, rule: &StoppingRule) -> Result<Vec<Option<f64>>, AnalyzeError> {
    validate(chain)?;
    Ok((0..chain.len())
        .map(|s| {
            let v = chain.value(s);
            (!rule.is_stopped(v)).then(|| {
                chain.transition_rows[s]
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| p * (v - chain.value(j)))
                    .sum()
            })
        })
        .collect())
}
