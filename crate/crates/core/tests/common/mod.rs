#![allow(dead_code)]

use driftkit::bounds::HFunction;
use driftkit::process::MarkovChainSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random probability vector of length `n`.
pub fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn drift(values: &[f64], row: &[f64], s: usize) -> f64 {
    row.iter().zip(values).map(|(p, v)| p * (values[s] - v)).sum()
}

/// Mixes `row` toward the point mass on `target` until the drift at `s` is
/// at least `need`. The mix weight is drawn above the minimum, so the drift
/// is usually strictly larger.
fn mix_toward(rng: &mut ChaCha8Rng, values: &[f64], row: &mut [f64], s: usize, target: usize, need: f64) {
    let d_rand = drift(values, row, s);
    let d_target = values[s] - values[target];
    let lambda_min = if d_rand >= need {
        0.0
    } else {
        (need - d_rand) / (d_target - d_rand)
    };
    let lambda = lambda_min + (1.0 - lambda_min) * rng.gen_range(0.05..1.0);
    for (j, p) in row.iter_mut().enumerate() {
        *p *= 1.0 - lambda;
        if j == target {
            *p += lambda;
        }
    }
}

/// Chain on sorted values starting at `base` in state 0, where every other
/// state has drift at least `floor(value)` and moves to state 0 with positive
/// probability. `None` when some `floor(v)` exceeds `v - base`, since then no
/// row can reach it.
pub fn chain_with_drift(
    rng: &mut ChaCha8Rng,
    n: usize,
    base: f64,
    floor: impl Fn(f64) -> f64,
) -> Option<MarkovChainSpec> {
    let mut values = vec![base];
    let mut v = base;
    for _ in 1..n {
        v += rng.gen_range(0.1..3.0);
        values.push(v);
    }
    if values[1..].iter().any(|&v| floor(v) >= v - base) {
        return None;
    }
    let mut rows = vec![vec![0.0; n]; n];
    rows[0][0] = 1.0;
    for s in 1..n {
        let mut row = random_row(rng, n);
        mix_toward(rng, &values, &mut row, s, 0, floor(values[s]));
        rows[s] = row;
    }
    renormalize(&mut rows);
    Some(MarkovChainSpec {
        state_values: values,
        transition_rows: rows,
        start_state: rng.gen_range(1..n),
    })
}

/// Birth-death chain on values `0..n` with self-loops: every jump has size
/// at most 1, and state 0 is absorbing.
pub fn unit_jump_chain(rng: &mut ChaCha8Rng, n: usize) -> MarkovChainSpec {
    let mut rows = vec![vec![0.0; n]; n];
    rows[0][0] = 1.0;
    for s in 1..n {
        let down = rng.gen_range(0.05..1.0);
        let up = if s + 1 < n { rng.gen_range(0.0..1.0) } else { 0.0 };
        let stay = rng.gen_range(0.0..1.0);
        let total = down + up + stay;
        rows[s][s - 1] = down / total;
        if s + 1 < n {
            rows[s][s + 1] = up / total;
        }
        rows[s][s] += stay / total;
    }
    renormalize(&mut rows);
    MarkovChainSpec {
        state_values: (0..n).map(|i| i as f64).collect(),
        transition_rows: rows,
        start_state: rng.gen_range(1..n),
    }
}

/// Pushes the rounding residue of each row into its largest entry.
fn renormalize(rows: &mut [Vec<f64>]) {
    for row in rows.iter_mut() {
        let sum: f64 = row.iter().sum();
        let k = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        row[k] += 1.0 - sum;
    }
}

/// `(min, max)` exact drift over non-stopped states.
pub fn drift_range(drifts: &[Option<f64>]) -> (f64, f64) {
    drifts
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)))
}

/// Small monotone h, so that `h(v) < v - base` is usually satisfiable.
pub fn random_h(rng: &mut ChaCha8Rng) -> HFunction {
    match rng.gen_range(0..4) {
        0 => HFunction::constant(rng.gen_range(0.01..0.1)),
        1 => HFunction::linear(rng.gen_range(0.01..0.9)),
        2 => HFunction::power(rng.gen_range(0.01..0.3), rng.gen_range(0.0..1.0)),
        _ => {
            let a = rng.gen_range(0.01..0.05);
            let b = rng.gen_range(0.05..0.3);
            HFunction::piecewise(vec![(0.0, a), (5.0, b), (40.0, b)])
        }
    }
}
