//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use driftkit::analyze::{
    add_drift_clock, empirical_azuma, empirical_optional_stopping, exact_drift_markov, exact_hitting_time_markov,
    Binning, ExpectedTime, MartingaleDirection,
};
use driftkit::bounds::{
    additive_lower, additive_upper, integrate_reciprocal, multiplicative_upper_below, potential_transform,
    variable_upper_below, HFunction, PotentialMode, TheoremId, DEFAULT_TOL,
};
use driftkit::cli::{parse_config, run_experiment, Report};
use driftkit::process::{Family, ProcessSpec, StoppingRule};
use driftkit::simulate::{simulate_batch, SimulationConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn verify(toml: &str) -> Report {
    run_experiment(&parse_config(toml).unwrap()).unwrap()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn example1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [5u64, 10, 50] {
        let report = verify(&format!(
            "[process]\nfamily = \"example1\"\nn = {n}\n\n\
             [hypothesis]\nkind = \"additive_upper\"\ndelta = 1\nstate_bound_c = 1\nstep_bound_c = {n}\n\n\
             [simulation]\ntrials = 100000\nmax_steps = 1000000\nmaster_seed = {n}\n"
        ));
        let oracle = report.oracle.as_ref().map(|o| o.start_time);
        let est = report.estimate.unwrap();
        let close = (est.mean - n as f64).abs() <= 3.0 * est.stderr;
        let additive: Vec<_> = report
            .bounds
            .iter()
            .filter(|b| {
                matches!(
                    b.bound.theorem,
                    TheoremId::AdditiveUpperBounded
                        | TheoremId::AdditiveUpperBoundedStepSize
                        | TheoremId::AdditiveUpperUnbounded
                )
            })
            .collect();
        let refused = additive.len() == 3
            && additive
                .iter()
                .all(|b| b.applicable == Some(false) && b.missing == [driftkit::bounds::Condition::Nonnegativity]);
        ok &= oracle == Some(ExpectedTime::Finite(n as f64)) && close && refused;
        notes.push(format!(
            "n={n}: oracle {oracle:?}, mc {:.4}±{:.4}, refused {refused}",
            est.mean, est.stderr
        ));
    }
    outcome(ok, notes.join("; "))
}

fn example2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for delta in [0.1, 0.5, 0.9] {
        let report = verify(&format!(
            "[process]\nfamily = \"example2\"\ndelta = {delta}\n\n\
             [hypothesis]\nkind = \"additive_lower\"\ndelta = {delta}\nstep_bound_c = 1\n\n\
             [simulation]\ntrials = 100000\nmax_steps = 1000000\nmaster_seed = 7\n"
        ));
        let est = report.estimate.unwrap();
        let close = (est.mean - 2.0).abs() <= 3.0 * est.stderr;
        let lower = report
            .bounds
            .iter()
            .find(|b| b.bound.theorem == TheoremId::AdditiveLowerExpectedStepSize);
        let refused = lower.is_some_and(|b| {
            rel_diff(b.bound.value, 2.0 / delta) < 1e-12
                && b.applicable == Some(false)
                && b.missing == [driftkit::bounds::Condition::StepBoundCExpected]
        });
        ok &= close && refused;
        notes.push(format!(
            "δ={delta}: mc {:.4}±{:.4}, refused {refused}",
            est.mean, est.stderr
        ));
    }
    outcome(ok, notes.join("; "))
}

fn example3() -> Outcome {
    let (delta, x0, x_min) = (0.1f64, 1000.0f64, 1.0f64);
    let closed = ((x0 / x_min).ln() / -(1.0 - delta).ln()).ceil() as u64;
    let mut iterated = 0u64;
    let mut x = x0;
    while x >= x_min {
        x *= 1.0 - delta;
        iterated += 1;
    }
    let spec = ProcessSpec::new(Family::Example3 { delta, x0 }).unwrap();
    let config = SimulationConfig {
        trials: 1,
        max_steps: 10_000,
        master_seed: 0,
        record_paths: false,
    };
    let batch = simulate_batch(&spec, &StoppingRule::below(x_min), &config).unwrap();
    let simulated = batch.trajectories[0].hitting_time.steps();
    let bound = multiplicative_upper_below(x0, x_min, delta).unwrap().value;
    let ratio = bound / iterated as f64;
    let ok = closed == iterated
        && simulated == Some(iterated)
        && rel_diff(bound, (1.0 + 1000f64.ln()) / 0.1) < 1e-12
        && bound > iterated as f64
        && (1.0..=3.0).contains(&ratio);
    outcome(
        ok,
        format!("T iterated {iterated}, closed form {closed}, simulated {simulated:?}, bound {bound:.6}, ratio {ratio:.4}"),
    )
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rule = StoppingRule::ZERO;
    let (mut upper_cases, mut upper_bad) = (0, 0);
    while upper_cases < 1000 {
        let n = rng.gen_range(2..=12);
        let floor = rng.gen_range(0.0..0.5);
        let Some(chain) = common::chain_with_drift(&mut rng, n, 0.0, |_| floor) else {
            continue;
        };
        let (lo, _) = common::drift_range(&exact_drift_markov(&chain, &rule).unwrap());
        if lo <= 0.0 {
            continue;
        }
        let exact = exact_hitting_time_markov(&chain, &rule).unwrap().start_time.finite();
        let bound = additive_upper(chain.value(chain.start_state), lo).unwrap().value;
        if !exact.is_some_and(|e| e <= bound * (1.0 + 1e-9)) {
            upper_bad += 1;
        }
        upper_cases += 1;
    }
    let (mut lower_cases, mut lower_bad) = (0, 0);
    while lower_cases < 1000 {
        let n = rng.gen_range(2..=12);
        let chain = common::unit_jump_chain(&mut rng, n);
        let (_, hi) = common::drift_range(&exact_drift_markov(&chain, &rule).unwrap());
        if hi <= 0.0 {
            continue;
        }
        let bound = additive_lower(chain.value(chain.start_state), hi).unwrap().value;
        let holds = match exact_hitting_time_markov(&chain, &rule).unwrap().start_time {
            ExpectedTime::Finite(e) => e >= bound * (1.0 - 1e-9),
            ExpectedTime::Infinite => true,
        };
        if !holds {
            lower_bad += 1;
        }
        lower_cases += 1;
    }
    outcome(
        upper_bad == 0 && lower_bad == 0,
        format!("upper {upper_bad}/{upper_cases} violations, lower {lower_bad}/{lower_cases} violations"),
    )
}

fn corollary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_mult = 0.0f64;
    for _ in 0..1000 {
        let x_min = 10f64.powf(rng.gen_range(-3.0..3.0));
        let x0 = x_min * 10f64.powf(rng.gen_range(0.0..6.0));
        let delta = rng.gen_range(1e-3..1.0);
        let m = multiplicative_upper_below(x0, x_min, delta).unwrap().value;
        let v = variable_upper_below(x0, x_min, &HFunction::linear(delta), DEFAULT_TOL)
            .unwrap()
            .value;
        worst_mult = worst_mult.max(rel_diff(m, v));
    }
    let mut worst_ln = 0.0f64;
    for _ in 0..1000 {
        let a = 10f64.powf(rng.gen_range(-3.0..2.0));
        let b = a * 10f64.powf(rng.gen_range(0.01..4.0));
        let mut knots: Vec<f64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(a..b)).collect();
        knots.extend([a, b]);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let h = HFunction::piecewise(knots.iter().map(|&z| (z, z)).collect());
        let integral = integrate_reciprocal(&h, a, b, DEFAULT_TOL).unwrap();
        worst_ln = worst_ln.max(rel_diff(integral, (b / a).ln()));
    }
    outcome(
        worst_mult <= 1e-10 && worst_ln <= 1e-8,
        format!("worst multiplicative/variable {worst_mult:.2e}, worst piecewise vs ln {worst_ln:.2e}"),
    )
}

fn arbitrary_h(rng: &mut ChaCha8Rng) -> HFunction {
    match rng.gen_range(0..4) {
        0 => HFunction::constant(rng.gen_range(0.01..10.0)),
        1 => HFunction::linear(rng.gen_range(0.01..2.0)),
        2 => HFunction::power(rng.gen_range(0.1..5.0), rng.gen_range(0.0..2.5)),
        _ => {
            let mut z = 0.0;
            let mut v = rng.gen_range(0.05..2.0);
            let mut knots = vec![(z, v)];
            for _ in 0..rng.gen_range(1..6) {
                z += rng.gen_range(0.1..20.0);
                v += rng.gen_range(0.0..3.0);
                knots.push((z, v));
            }
            HFunction::piecewise(knots)
        }
    }
}

fn potential() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    for i in 0..10_000 {
        let h = arbitrary_h(&mut rng);
        let x_min = rng.gen_range(0.05..5.0);
        let y = x_min + rng.gen_range(0.0..50.0);
        let x = y + rng.gen_range(0.0..50.0);
        let mode = if i % 2 == 0 { PotentialMode::Below } else { PotentialMode::Hitting };
        let g = potential_transform(&h, x_min, mode).unwrap();
        worst = worst.min(g.eval(x) - g.eval(y) - (x - y) / h.eval(x));
    }
    outcome(worst >= -1e-9, format!("worst g(x) - g(y) - (x - y)/h(x) = {worst:.3e}"))
}

fn martingales() -> Outcome {
    let delta = 0.5;
    let spec = ProcessSpec::new(Family::DeterministicDecrease { delta, x0: 10.0 }).unwrap();
    let config = SimulationConfig {
        trials: 1000,
        max_steps: 1000,
        master_seed: 1,
        record_paths: false,
    };
    let batch = simulate_batch(&spec, &StoppingRule::ZERO, &config).unwrap();
    let clocked = add_drift_clock(&batch, delta);
    let exact_equal = clocked.trajectories.iter().all(|t| t.final_value == t.initial_value);
    let stopping = empirical_optional_stopping(&clocked, MartingaleDirection::Super).unwrap();
    let optional_ok = exact_equal && stopping.holds && stopping.margin == 0.0;

    let spec = ProcessSpec::new(Family::BiasedWalk {
        n_states: 64,
        p_down: 0.6,
        start: 32,
    })
    .unwrap();
    let config = SimulationConfig {
        trials: 100_000,
        max_steps: 100,
        master_seed: 2,
        record_paths: true,
    };
    let batch = simulate_batch(&spec, &StoppingRule::ZERO, &config).unwrap();
    let azuma = empirical_azuma(&batch, 1.0, 100, 20.0, Binning::default()).unwrap();
    let bound = (-2.0f64).exp();
    let freq = bound - azuma.margin;
    let stderr = (bound * (1.0 - bound) / 100_000.0).sqrt();
    let azuma_ok = azuma.holds && freq <= bound + 3.0 * stderr;
    outcome(
        optional_ok && azuma_ok,
        format!(
            "optional stopping margin {} (exact {exact_equal}); azuma frequency {freq:.5} vs e^-2 = {bound:.5}",
            stopping.margin
        ),
    )
}

const REPRO_CONFIG: &str = r#"
[process]
family = "biased_walk"
n_states = 16
p_down = 0.65
start = 8

[hypothesis]
kind = "additive_upper"
delta = 0.3
state_bound_c = 15
step_bound_c = 1

[simulation]
trials = 20000
max_steps = 100000
master_seed = 314
"#;

fn reproducibility() -> Outcome {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("exp.toml"), REPRO_CONFIG).unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "4", "8"] {
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_driftkit"))
                .current_dir(dir.path())
                .args(["verify", "--config", "exp.toml"])
                .env("DRIFTKIT_THREADS", threads)
                .output()
                .unwrap();
            if out.status.code() != Some(0) {
                return outcome(false, format!("exit {:?} with {threads} threads", out.status.code()));
            }
            let text = String::from_utf8(out.stdout).unwrap();
            let stripped: Vec<&str> = text.lines().filter(|l| !l.contains("\"wall_time_seconds\"")).collect();
            reports.push(stripped.join("\n"));
        }
    }
    let identical = reports.windows(2).all(|w| w[0] == w[1]);
    outcome(
        identical,
        format!("{} runs over 1, 4 and 8 threads, {} bytes each", reports.len(), reports[0].len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 example1 counterexample", example1, Some(Duration::from_secs(10))),
        ("2 example2 counterexample", example2, Some(Duration::from_secs(10))),
        ("3 example3 tightness", example3, Some(Duration::from_secs(1))),
        ("4 theorem soundness sweep", soundness, Some(Duration::from_secs(60))),
        ("5 corollary consistency", corollary, Some(Duration::from_secs(5))),
        ("6 potential transform", potential, Some(Duration::from_secs(5))),
        ("7 martingale checks", martingales, Some(Duration::from_secs(30))),
        ("8 reproducibility", reproducibility, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = result.passed && in_time;
        if !passed {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2}s{}]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            match limit {
                Some(l) if !in_time => format!(", over the {}s limit", l.as_secs_f64()),
                _ => String::new(),
            }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
