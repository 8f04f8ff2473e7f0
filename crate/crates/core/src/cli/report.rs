use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::analyze::{Applicability, CheckReport, ExactHittingTimes};
use crate::bounds::{Condition, HittingTimeBound};
use crate::process::{Family, StoppingRule};
use crate::simulate::HittingTimeEstimate;

use super::config::OutputFormat;

/// Significant digits kept for floating-point values in reports.
pub const REPORT_DIGITS: usize = 12;

/// A bound together with its applicability verdict. `applicable` is `None`
/// when no checks were run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportedBound {
    #[serde(flatten)]
    pub bound: HittingTimeBound,
    pub title: &'static str,
    pub applicable: Option<bool>,
    pub missing: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub command: &'static str,
    pub master_seed: u64,
    pub trials: u64,
    pub max_steps: u64,
    pub tool_version: &'static str,
    /// The only field allowed to differ between reruns.
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub process: Family,
    pub x0: f64,
    pub rule: StoppingRule,
    pub bounds: Vec<ReportedBound>,
    pub estimate: Option<HittingTimeEstimate>,
    pub checks: Vec<CheckReport>,
    pub applicability: Vec<Applicability>,
    pub oracle: Option<ExactHittingTimes>,
    pub metadata: Metadata,
}

/// `v` rounded to [`REPORT_DIGITS`] significant digits.
pub fn round_significant(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, v).parse().unwrap_or(v)
}

fn round_value(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|v| Number::from_f64(round_significant(v)))
            .map_or(Value::Number(n), Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// The report as a JSON tree with floats rounded for output.
pub fn report_value(report: &impl Serialize) -> Value {
    round_value(serde_json::to_value(report).expect("reports serialize"))
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders in the requested format. CSV is a two-column `field,value` table
/// of the same rounded tree the JSON shows, keyed by dotted paths.
pub fn render(report: &impl Serialize, format: OutputFormat) -> String {
    let value = report_value(report);
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
            out.push('\n');
            out
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            let mut out = String::from("field,value\n");
            for (k, v) in rows {
                out.push_str(&csv_field(&k));
                out.push(',');
                out.push_str(&csv_field(&v));
                out.push('\n');
            }
            out
        }
    }
}
