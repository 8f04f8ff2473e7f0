//! Hitting-time bound formulas.
//!
//! | theorem                         | bound                                   | direction |
//! |---------------------------------|-----------------------------------------|-----------|
//! | additive upper (three profiles) | `x0 / δ`                                | upper     |
//! | additive lower                  | `x0 / δ`                                | lower     |
//! | variable, below target          | `x_min / h(x_min) + ∫_{x_min}^{x0} 1/h` | upper     |
//! | variable, hitting target        | `∫_{x_min}^{x0} 1/h`                    | upper     |
//! | multiplicative, below target    | `(1 + ln(x0 / x_min)) / δ`              | upper     |
//! | multiplicative, hitting target  | `ln(x0 / x_min) / δ`                    | upper     |
//!
//! Each [`HittingTimeBound`] names the theorem it came from and the
//! [`Condition`]s that theorem assumes; [`crate::analyze`] checks those.

mod potential;
pub mod quadrature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use potential::{potential_transform, Potential, PotentialMode};

/// Default relative tolerance of [`integrate_reciprocal`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Power exponents closer than this to 1 use the logarithmic antiderivative.
pub const POWER_LOG_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("delta must be positive and finite, got {0}")]
    NonpositiveDelta(f64),
    #[error("start value must be nonnegative, got {0}")]
    NegativeStart(f64),
    #[error("target x_min must be positive, got {0}")]
    TargetNotPositive(f64),
    #[error("start value {x0} lies below the target {x_min}")]
    StartBelowTarget { x0: f64, x_min: f64 },
    #[error("h is not monotonically increasing: {0}")]
    NonmonotoneH(String),
    #[error("h is not positive on the integration range: h({at}) = {value}")]
    NonpositiveH { at: f64, value: f64 },
    #[error("integration interval [{a}, {b}] is inverted")]
    EmptyOrInvertedInterval { a: f64, b: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

/// Labeled theorem conditions. Each id is shared by the bound formulas, the
/// precondition checks and the applicability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `X_t >= 0` for all `t <= T`.
    Nonnegativity,
    /// Drift at least `δ` before `T`.
    AdditiveDrift,
    /// Drift at most `δ` before `T`.
    AdditiveDriftUpper,
    /// `X_t <= c` before `T`.
    StateBoundC,
    /// `|X_{t+1} - X_t| <= c` before `T`.
    StepBoundCDeterministic,
    /// `E[|X_{t+1} - X_t| | history] <= c` before `T`.
    StepBoundCExpected,
    /// `h` monotonically increasing and positive from the target on.
    HMonotone,
    /// Drift at least `h(X_t)` before `T`.
    VariableDrift,
    /// Drift at least `δ·X_t` before `T`.
    MultiplicativeDrift,
    /// `X_t >= x_min` for all `t <= T`.
    AtOrAboveTarget,
    /// Drift nonnegative before `T` (supermartingale).
    Supermartingale,
    OptionalStopping,
    AzumaTail,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Nonnegativity => "nonnegativity",
            Condition::AdditiveDrift => "additive-drift",
            Condition::AdditiveDriftUpper => "additive-drift-upper",
            Condition::StateBoundC => "state-bound-c",
            Condition::StepBoundCDeterministic => "step-bound-c-deterministic",
            Condition::StepBoundCExpected => "step-bound-c-expected",
            Condition::HMonotone => "h-monotone",
            Condition::VariableDrift => "variable-drift",
            Condition::MultiplicativeDrift => "multiplicative-drift",
            Condition::AtOrAboveTarget => "at-or-above-target",
            Condition::Supermartingale => "supermartingale",
            Condition::OptionalStopping => "optional-stopping",
            Condition::AzumaTail => "azuma-tail",
        }
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// The drift theorems this crate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    AdditiveUpperBounded,
    AdditiveUpperBoundedStepSize,
    AdditiveUpperUnbounded,
    AdditiveLowerExpectedStepSize,
    VariableUpperBelowTarget,
    VariableUpperHittingTarget,
    MultiplicativeUpperBelowTarget,
    MultiplicativeUpperHittingTarget,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::AdditiveUpperBounded,
        TheoremId::AdditiveUpperBoundedStepSize,
        TheoremId::AdditiveUpperUnbounded,
        TheoremId::AdditiveLowerExpectedStepSize,
        TheoremId::VariableUpperBelowTarget,
        TheoremId::VariableUpperHittingTarget,
        TheoremId::MultiplicativeUpperBelowTarget,
        TheoremId::MultiplicativeUpperHittingTarget,
    ];

    pub fn title(self) -> &'static str {
        match self {
            TheoremId::AdditiveUpperBounded => "Upper Additive Drift, Bounded",
            TheoremId::AdditiveUpperBoundedStepSize => "Upper Additive Drift, Bounded Step Size",
            TheoremId::AdditiveUpperUnbounded => "Upper Additive Drift, Unbounded",
            TheoremId::AdditiveLowerExpectedStepSize => {
                "Lower Additive Drift, Expected Bounded Step Size"
            }
            TheoremId::VariableUpperBelowTarget => "Upper Variable Drift, Unbounded, Below Target",
            TheoremId::VariableUpperHittingTarget => {
                "Upper Variable Drift, Unbounded, Hitting Target"
            }
            TheoremId::MultiplicativeUpperBelowTarget => {
                "Upper Multiplicative Drift, Unbounded, Below Target"
            }
            TheoremId::MultiplicativeUpperHittingTarget => {
                "Upper Multiplicative Drift, Unbounded, Hitting Target"
            }
        }
    }

    /// Labeled conditions the theorem assumes.
    pub fn conditions(self) -> &'static [Condition] {
        use Condition::*;
        match self {
            TheoremId::AdditiveUpperBounded => &[Nonnegativity, AdditiveDrift, StateBoundC],
            TheoremId::AdditiveUpperBoundedStepSize => {
                &[Nonnegativity, AdditiveDrift, StepBoundCDeterministic]
            }
            TheoremId::AdditiveUpperUnbounded => &[Nonnegativity, AdditiveDrift],
            TheoremId::AdditiveLowerExpectedStepSize => &[AdditiveDriftUpper, StepBoundCExpected],
            TheoremId::VariableUpperBelowTarget => &[Nonnegativity, HMonotone, VariableDrift],
            TheoremId::VariableUpperHittingTarget => &[AtOrAboveTarget, HMonotone, VariableDrift],
            TheoremId::MultiplicativeUpperBelowTarget => &[Nonnegativity, MultiplicativeDrift],
            TheoremId::MultiplicativeUpperHittingTarget => &[AtOrAboveTarget, MultiplicativeDrift],
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            TheoremId::AdditiveLowerExpectedStepSize => Direction::Lower,
            _ => Direction::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

/// A bound on `E[T | X_0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingTimeBound {
    pub value: f64,
    pub direction: Direction,
    pub theorem: TheoremId,
    pub assumed_preconditions: Vec<Condition>,
}

impl HittingTimeBound {
    fn new(theorem: TheoremId, value: f64) -> Self {
        HittingTimeBound {
            value,
            direction: theorem.direction(),
            theorem,
            assumed_preconditions: theorem.conditions().to_vec(),
        }
    }
}

/// The three precondition profiles sharing the additive upper formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditiveUpperProfile {
    /// Bounded state space, `X_t <= c`.
    BoundedState,
    /// Bounded step size, `|X_{t+1} - X_t| <= c`.
    BoundedStep,
    Unbounded,
}

impl AdditiveUpperProfile {
    pub const ALL: [AdditiveUpperProfile; 3] = [
        AdditiveUpperProfile::BoundedState,
        AdditiveUpperProfile::BoundedStep,
        AdditiveUpperProfile::Unbounded,
    ];

    pub fn theorem(self) -> TheoremId {
        match self {
            AdditiveUpperProfile::BoundedState => TheoremId::AdditiveUpperBounded,
            AdditiveUpperProfile::BoundedStep => TheoremId::AdditiveUpperBoundedStepSize,
            AdditiveUpperProfile::Unbounded => TheoremId::AdditiveUpperUnbounded,
        }
    }
}

/// Shape of a drift lower-bound function `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HKind {
    /// `h(z) = delta`.
    Constant { delta: f64 },
    /// `h(z) = delta·z`.
    Linear { delta: f64 },
    /// `h(z) = c·z^alpha`.
    Power { c: f64, alpha: f64 },
    /// Linear interpolation between `(z, h(z))` knots, held constant past the
    /// last knot.
    PiecewiseLinearMonotone { knots: Vec<(f64, f64)> },
}

/// A monotonically increasing drift bound `h` on `[domain_low, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunction {
    pub kind: HKind,
    pub domain_low: f64,
}

impl HFunction {
    pub fn constant(delta: f64) -> Self {
        HFunction {
            kind: HKind::Constant { delta },
            domain_low: 0.0,
        }
    }

    pub fn linear(delta: f64) -> Self {
        HFunction {
            kind: HKind::Linear { delta },
            domain_low: 0.0,
        }
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        HFunction {
            kind: HKind::Power { c, alpha },
            domain_low: 0.0,
        }
    }

    /// Knot list starting at the left end of the domain.
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Self {
        let domain_low = knots.first().map_or(0.0, |k| k.0);
        HFunction {
            kind: HKind::PiecewiseLinearMonotone { knots },
            domain_low,
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match &self.kind {
            HKind::Constant { delta } => *delta,
            HKind::Linear { delta } => delta * z,
            HKind::Power { c, alpha } => {
                if *alpha == 0.0 {
                    *c
                } else {
                    c * z.powf(*alpha)
                }
            }
            HKind::PiecewiseLinearMonotone { knots } => interpolate(knots, z),
        }
    }

    /// Checks parameter ranges and monotonicity.
    pub fn check_monotone(&self) -> Result<(), BoundError> {
        let finite_positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(BoundError::InvalidParameter {
                    field,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        if !self.domain_low.is_finite() {
            return Err(BoundError::InvalidParameter {
                field: "domain_low",
                reason: format!("must be finite, got {}", self.domain_low),
            });
        }
        match &self.kind {
            HKind::Constant { delta } | HKind::Linear { delta } => finite_positive("delta", *delta),
            HKind::Power { c, alpha } => {
                finite_positive("c", *c)?;
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return Err(BoundError::NonmonotoneH(format!(
                        "power exponent must be >= 0, got {alpha}"
                    )));
                }
                Ok(())
            }
            HKind::PiecewiseLinearMonotone { knots } => {
                if knots.is_empty() {
                    return Err(BoundError::InvalidParameter {
                        field: "knots",
                        reason: "needs at least one knot".into(),
                    });
                }
                if knots.iter().any(|(z, h)| !z.is_finite() || !h.is_finite()) {
                    return Err(BoundError::InvalidParameter {
                        field: "knots",
                        reason: "knots must be finite".into(),
                    });
                }
                if self.domain_low < knots[0].0 {
                    return Err(BoundError::InvalidParameter {
                        field: "domain_low",
                        reason: format!(
                            "domain starts at {} before the first knot {}",
                            self.domain_low, knots[0].0
                        ),
                    });
                }
                for pair in knots.windows(2) {
                    let ((z0, h0), (z1, h1)) = (pair[0], pair[1]);
                    if z1 <= z0 {
                        return Err(BoundError::NonmonotoneH(format!(
                            "knot positions must be strictly increasing ({z0} then {z1})"
                        )));
                    }
                    if h1 < h0 {
                        return Err(BoundError::NonmonotoneH(format!(
                            "h decreases from {h0} at {z0} to {h1} at {z1}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Full validity for use with target `x_min`: monotone, `x_min` inside the
    /// domain and `h(x_min) > 0` (hence positive on `[x_min, ∞)`).
    pub fn validate_for(&self, x_min: f64) -> Result<(), BoundError> {
        self.check_monotone()?;
        if x_min < self.domain_low {
            return Err(BoundError::InvalidParameter {
                field: "x_min",
                reason: format!("{x_min} lies left of the domain start {}", self.domain_low),
            });
        }
        let at = self.eval(x_min);
        if !(at > 0.0) {
            return Err(BoundError::NonpositiveH { at: x_min, value: at });
        }
        Ok(())
    }

    /// Knot positions strictly inside `(a, b)`.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match &self.kind {
            HKind::PiecewiseLinearMonotone { knots } => knots
                .iter()
                .map(|k| k.0)
                .filter(|&z| z > a && z < b)
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn interpolate(knots: &[(f64, f64)], z: f64) -> f64 {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if z <= first.0 {
        return first.1;
    }
    if z >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= z);
    let (z0, h0) = knots[i - 1];
    let (z1, h1) = knots[i];
    h0 + (h1 - h0) * (z - z0) / (z1 - z0)
}

/// `∫_a^b 1/h(z) dz`.
///
/// Closed forms for the constant, linear and power families; adaptive Simpson
/// quadrature (relative tolerance `tol`) on each linear piece of a
/// piecewise-linear `h`.
pub fn integrate_reciprocal(h: &HFunction, a: f64, b: f64, tol: f64) -> Result<f64, BoundError> {
    if !(tol > 0.0) {
        return Err(BoundError::InvalidParameter {
            field: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    if a > b || a.is_nan() || b.is_nan() {
        return Err(BoundError::EmptyOrInvertedInterval { a, b });
    }
    h.check_monotone()?;
    let at = h.eval(a);
    if !(at > 0.0) {
        return Err(BoundError::NonpositiveH { at: a, value: at });
    }
    if a == b {
        return Ok(0.0);
    }
    Ok(reciprocal_integral(h, a, b, tol))
}

/// [`integrate_reciprocal`] without argument checks; `h` must be valid and
/// positive on `[a, b]`, `a <= b`.
pub(crate) fn reciprocal_integral(h: &HFunction, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    match &h.kind {
        HKind::Constant { delta } => (b - a) / delta,
        HKind::Linear { delta } => (b / a).ln() / delta,
        HKind::Power { c, alpha } => power_reciprocal(*c, *alpha, a, b),
        HKind::PiecewiseLinearMonotone { .. } => {
            let f = |z: f64| 1.0 / h.eval(z);
            let mut edges = vec![a];
            edges.extend(h.breakpoints(a, b));
            edges.push(b);
            let coarse: f64 = edges
                .windows(2)
                .map(|w| quadrature::composite_simpson(&f, w[0], w[1], 8))
                .sum();
            let eps_total = tol * coarse.abs();
            edges
                .windows(2)
                .map(|w| {
                    let share = (w[1] - w[0]) / (b - a);
                    quadrature::adaptive_simpson(&f, w[0], w[1], eps_total * share, quadrature::MAX_DEPTH)
                })
                .sum()
        }
    }
}

/// `∫_a^b dz / (c z^α)`, written as `a^β·expm1(β ln(b/a)) / (cβ)` with
/// `β = 1 - α` so that exponents near 1 keep full precision.
fn power_reciprocal(c: f64, alpha: f64, a: f64, b: f64) -> f64 {
    let beta = 1.0 - alpha;
    if beta.abs() < POWER_LOG_BRANCH {
        return (b / a).ln() / c;
    }
    if a == 0.0 {
        // only reachable for alpha < 1, where the integral converges
        return b.powf(beta) / (c * beta);
    }
    a.powf(beta) * (beta * (b / a).ln()).exp_m1() / (c * beta)
}

fn check_delta(delta: f64) -> Result<(), BoundError> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(BoundError::NonpositiveDelta(delta))
    }
}

fn check_target(x0: f64, x_min: f64, positive: bool) -> Result<(), BoundError> {
    if positive && !(x_min > 0.0) {
        return Err(BoundError::TargetNotPositive(x_min));
    }
    if !positive && !(x_min >= 0.0) {
        return Err(BoundError::InvalidParameter {
            field: "x_min",
            reason: format!("must be >= 0, got {x_min}"),
        });
    }
    if !(x0 >= x_min) || !x0.is_finite() {
        return Err(BoundError::StartBelowTarget { x0, x_min });
    }
    Ok(())
}

/// `E[T | X_0] <= x0 / δ` under the unbounded profile.
pub fn additive_upper(x0: f64, delta: f64) -> Result<HittingTimeBound, BoundError> {
    additive_upper_with(AdditiveUpperProfile::Unbounded, x0, delta)
}

/// `x0 / δ` labeled with the given precondition profile.
pub fn additive_upper_with(
    profile: AdditiveUpperProfile,
    x0: f64,
    delta: f64,
) -> Result<HittingTimeBound, BoundError> {
    check_delta(delta)?;
    if !(x0 >= 0.0) || !x0.is_finite() {
        return Err(BoundError::NegativeStart(x0));
    }
    Ok(HittingTimeBound::new(profile.theorem(), x0 / delta))
}

/// `E[T | X_0] >= x0 / δ`; nonpositive starts give the trivial bound 0.
pub fn additive_lower(x0: f64, delta: f64) -> Result<HittingTimeBound, BoundError> {
    check_delta(delta)?;
    if !x0.is_finite() {
        return Err(BoundError::InvalidParameter {
            field: "x0",
            reason: format!("must be finite, got {x0}"),
        });
    }
    Ok(HittingTimeBound::new(
        TheoremId::AdditiveLowerExpectedStepSize,
        (x0 / delta).max(0.0),
    ))
}

/// `x_min / h(x_min) + ∫_{x_min}^{x0} 1/h(z) dz`.
pub fn variable_upper_below(
    x0: f64,
    x_min: f64,
    h: &HFunction,
    tol: f64,
) -> Result<HittingTimeBound, BoundError> {
    check_target(x0, x_min, true)?;
    h.validate_for(x_min)?;
    let integral = integrate_reciprocal(h, x_min, x0, tol)?;
    Ok(HittingTimeBound::new(
        TheoremId::VariableUpperBelowTarget,
        x_min / h.eval(x_min) + integral,
    ))
}

/// `∫_{x_min}^{x0} 1/h(z) dz`.
pub fn variable_upper_hitting(
    x0: f64,
    x_min: f64,
    h: &HFunction,
    tol: f64,
) -> Result<HittingTimeBound, BoundError> {
    check_target(x0, x_min, false)?;
    h.validate_for(x_min)?;
    let integral = integrate_reciprocal(h, x_min, x0, tol)?;
    Ok(HittingTimeBound::new(TheoremId::VariableUpperHittingTarget, integral))
}

/// `(1 + ln(x0 / x_min)) / δ`.
pub fn multiplicative_upper_below(x0: f64, x_min: f64, delta: f64) -> Result<HittingTimeBound, BoundError> {
    check_delta(delta)?;
    check_target(x0, x_min, true)?;
    Ok(HittingTimeBound::new(
        TheoremId::MultiplicativeUpperBelowTarget,
        (1.0 + (x0 / x_min).ln()) / delta,
    ))
}

/// `ln(x0 / x_min) / δ`.
pub fn multiplicative_upper_hitting(x0: f64, x_min: f64, delta: f64) -> Result<HittingTimeBound, BoundError> {
    check_delta(delta)?;
    check_target(x0, x_min, true)?;
    Ok(HittingTimeBound::new(
        TheoremId::MultiplicativeUpperHittingTarget,
        (x0 / x_min).ln() / delta,
    ))
}

/// Azuma-Hoeffding tail `min(1, exp(-r² / (2 t c²)))`, floored at the
/// smallest normal `f64`.
pub fn azuma_tail(t: u64, c: f64, r: f64) -> Result<f64, BoundError> {
    if t == 0 {
        return Err(BoundError::InvalidParameter {
            field: "t",
            reason: "must be >= 1".into(),
        });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(BoundError::InvalidParameter {
            field: "c",
            reason: format!("must be positive, got {c}"),
        });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(BoundError::InvalidParameter {
            field: "r",
            reason: format!("must be positive, got {r}"),
        });
    }
    // an underflowed 0 would claim impossibility; the smallest normal is
    // still a valid upper bound
    Ok((-(r * r) / (2.0 * t as f64 * c * c)).exp().clamp(f64::MIN_POSITIVE, 1.0))
}

/// Whether a step-size condition is meant surely or in expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepBoundMode {
    Deterministic,
    Expected,
}

/// The drift condition claimed for a process.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisKind {
    AdditiveUpper { delta: f64 },
    AdditiveLower { delta: f64, step_bound_c: f64 },
    Multiplicative { delta: f64 },
    Variable { h: HFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftHypothesis {
    #[serde(flatten)]
    pub kind: HypothesisKind,
    /// Bound `c` on states, used by the bounded-state additive profile.
    pub state_bound_c: Option<f64>,
    /// Bound `c` on steps, used by the bounded-step additive profile.
    pub step_bound_c: Option<f64>,
    pub step_bound_mode: Option<StepBoundMode>,
}

impl DriftHypothesis {
    pub fn new(kind: HypothesisKind) -> Self {
        DriftHypothesis {
            kind,
            state_bound_c: None,
            step_bound_c: None,
            step_bound_mode: None,
        }
    }

    /// Checks parameter ranges; the error names the offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err((field, format!("must be > 0, got {v}")))
            }
        };
        let nonnegative = |field: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err((field, format!("must be >= 0, got {v}")))
            }
        };
        match &self.kind {
            HypothesisKind::AdditiveUpper { delta } | HypothesisKind::Multiplicative { delta } => {
                positive("delta", *delta)?
            }
            HypothesisKind::AdditiveLower {
                delta,
                step_bound_c,
            } => {
                positive("delta", *delta)?;
                nonnegative("step_bound_c", *step_bound_c)?;
            }
            HypothesisKind::Variable { h } => h.check_monotone().map_err(|e| ("h", e.to_string()))?,
        }
        if let Some(c) = self.state_bound_c {
            nonnegative("state_bound_c", c)?;
        }
        if let Some(c) = self.step_bound_c {
            nonnegative("step_bound_c", c)?;
        }
        Ok(())
    }
}
