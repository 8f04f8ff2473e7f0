use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::analyze::Binning;
use crate::bounds::{BoundError, DriftHypothesis, HFunction, HKind, HypothesisKind, StepBoundMode};
use crate::process::{builtin_example, ProcessError, ProcessParams, ProcessSpec, StopMode, StoppingRule};
use crate::simulate::SimulationConfig;

use super::experiment::compute_bounds;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    /// `None` writes the report to stdout.
    pub report_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub dump_paths: bool,
    pub paths_path: PathBuf,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub rule: StoppingRule,
    pub hypothesis: Option<DriftHypothesis>,
    pub simulation: SimulationConfig,
    pub binning: Binning,
    pub outputs: Outputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    process: RawProcess,
    #[serde(default)]
    rule: RawRule,
    hypothesis: Option<RawHypothesis>,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcess {
    family: String,
    n: Option<u64>,
    delta: Option<f64>,
    x0: Option<f64>,
    p_down: Option<f64>,
    n_states: Option<u64>,
    start: Option<u64>,
    state_values: Option<Vec<f64>>,
    transition_rows: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    #[serde(default)]
    x_min: f64,
    #[serde(default = "default_mode")]
    mode: StopMode,
}

fn default_mode() -> StopMode {
    StopMode::AtOrBelow
}

impl Default for RawRule {
    fn default() -> Self {
        RawRule {
            x_min: 0.0,
            mode: default_mode(),
        }
    }
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum RawKind {
    AdditiveUpper,
    AdditiveLower,
    Multiplicative,
    Variable,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypothesis {
    kind: RawKind,
    delta: Option<f64>,
    step_bound_c: Option<f64>,
    state_bound_c: Option<f64>,
    step_bound_mode: Option<StepBoundMode>,
    h: Option<HKind>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    trials: Option<u64>,
    max_steps: Option<u64>,
    master_seed: Option<u64>,
    drift_bins: Option<usize>,
    min_bin_samples: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    report_path: Option<PathBuf>,
    #[serde(default)]
    format: OutputFormat,
    #[serde(default)]
    dump_paths: bool,
    paths_path: Option<PathBuf>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

fn process_field(error: &ProcessError) -> String {
    match error {
        ProcessError::InvalidParameter { field, .. } => format!("process.{field}"),
        ProcessError::NonStochasticRow { .. } => "process.transition_rows".into(),
        ProcessError::UnknownFamily(_) => "process.family".into(),
        ProcessError::Multiple(errors) => errors.first().map_or_else(|| "process".into(), process_field),
    }
}

fn bound_field(error: &BoundError) -> &'static str {
    match error {
        BoundError::NonpositiveDelta(_) => "hypothesis.delta",
        BoundError::NegativeStart(_) | BoundError::StartBelowTarget { .. } => "process.x0",
        BoundError::TargetNotPositive(_) | BoundError::InvalidParameter { field: "x_min", .. } => "rule.x_min",
        BoundError::NonmonotoneH(_) | BoundError::NonpositiveH { .. } => "hypothesis.h",
        BoundError::EmptyOrInvertedInterval { .. } | BoundError::InvalidParameter { .. } => "hypothesis",
    }
}

fn build_hypothesis(raw: RawHypothesis) -> Result<DriftHypothesis, ConfigError> {
    let need_delta = || raw.delta.ok_or_else(|| ConfigError::validation("hypothesis.delta", "required"));
    let reject = |field: &str, present: bool| {
        if present {
            Err(ConfigError::validation(
                format!("hypothesis.{field}"),
                "not used by this hypothesis kind",
            ))
        } else {
            Ok(())
        }
    };
    let kind = match raw.kind {
        RawKind::AdditiveUpper => {
            reject("h", raw.h.is_some())?;
            HypothesisKind::AdditiveUpper { delta: need_delta()? }
        }
        RawKind::Multiplicative => {
            reject("h", raw.h.is_some())?;
            HypothesisKind::Multiplicative { delta: need_delta()? }
        }
        RawKind::AdditiveLower => {
            reject("h", raw.h.is_some())?;
            HypothesisKind::AdditiveLower {
                delta: need_delta()?,
                step_bound_c: raw
                    .step_bound_c
                    .ok_or_else(|| ConfigError::validation("hypothesis.step_bound_c", "required"))?,
            }
        }
        RawKind::Variable => {
            reject("delta", raw.delta.is_some())?;
            let h = raw
                .h
                .clone()
                .ok_or_else(|| ConfigError::validation("hypothesis.h", "required"))?;
            HypothesisKind::Variable { h: h_function(h) }
        }
    };
    let hypothesis = DriftHypothesis {
        kind,
        state_bound_c: raw.state_bound_c,
        step_bound_c: raw.step_bound_c,
        step_bound_mode: raw.step_bound_mode,
    };
    hypothesis
        .validate()
        .map_err(|(field, reason)| ConfigError::validation(format!("hypothesis.{field}"), reason))?;
    Ok(hypothesis)
}

fn h_function(kind: HKind) -> HFunction {
    match kind {
        HKind::Constant { delta } => HFunction::constant(delta),
        HKind::Linear { delta } => HFunction::linear(delta),
        HKind::Power { c, alpha } => HFunction::power(c, alpha),
        HKind::PiecewiseLinearMonotone { knots } => HFunction::piecewise(knots),
    }
}

/// Parses and validates a config document.
///
/// Syntax errors and unknown keys are [`ConfigError::Parse`]; values out of
/// range are [`ConfigError::Validation`] naming the `section.key`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |span| line_column(text, span.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let p = raw.process;
    let params = ProcessParams {
        n: p.n,
        delta: p.delta,
        x0: p.x0,
        p_down: p.p_down,
        n_states: p.n_states,
        start: p.start,
        state_values: p.state_values,
        transition_rows: p.transition_rows,
    };
    let process = builtin_example(&p.family, &params)
        .map_err(|e| ConfigError::validation(process_field(&e), e.to_string()))?;

    if !raw.rule.x_min.is_finite() {
        return Err(ConfigError::validation("rule.x_min", "must be finite"));
    }
    let rule = StoppingRule {
        x_min: raw.rule.x_min,
        mode: raw.rule.mode,
    };

    let hypothesis = raw.hypothesis.map(build_hypothesis).transpose()?;
    if let Some(h) = &hypothesis {
        compute_bounds(h, process.x0(), &rule).map_err(|e| ConfigError::validation(bound_field(&e), e.to_string()))?;
    }

    let defaults = SimulationConfig::default();
    let simulation = SimulationConfig {
        trials: raw.simulation.trials.unwrap_or(defaults.trials),
        max_steps: raw.simulation.max_steps.unwrap_or(defaults.max_steps),
        master_seed: raw.simulation.master_seed.unwrap_or(defaults.master_seed),
        record_paths: false,
    };
    check_simulation(&simulation)?;
    let binning = Binning {
        bin_count: raw.simulation.drift_bins.unwrap_or(Binning::default().bin_count),
        min_samples: raw.simulation.min_bin_samples.unwrap_or(Binning::default().min_samples),
    };
    if binning.bin_count == 0 {
        return Err(ConfigError::validation("simulation.drift_bins", "must be >= 1"));
    }

    let outputs = Outputs {
        report_path: raw.outputs.report_path,
        format: raw.outputs.format,
        dump_paths: raw.outputs.dump_paths,
        paths_path: raw.outputs.paths_path.unwrap_or_else(|| PathBuf::from("paths.csv")),
    };
    if let Some(path) = &outputs.report_path {
        check_writable("outputs.report_path", path)?;
    }
    if outputs.dump_paths {
        check_writable("outputs.paths_path", &outputs.paths_path)?;
    }

    Ok(ExperimentConfig {
        process,
        rule,
        hypothesis,
        simulation,
        binning,
        outputs,
    })
}

pub(crate) fn check_simulation(simulation: &SimulationConfig) -> Result<(), ConfigError> {
    simulation.validate().map_err(|e| match e {
        crate::simulate::SimulationError::InvalidConfig { field, reason } => {
            ConfigError::validation(format!("simulation.{field}"), reason)
        }
        other => ConfigError::validation("simulation", other.to_string()),
    })
}

pub(crate) fn check_writable(field: &str, path: &std::path::Path) -> Result<(), ConfigError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => std::path::Path::new("."),
    };
    if !parent.is_dir() {
        return Err(ConfigError::validation(
            field,
            format!("directory {} does not exist", parent.display()),
        ));
    }
    if path.is_dir() {
        return Err(ConfigError::validation(field, format!("{} is a directory", path.display())));
    }
    Ok(())
}
