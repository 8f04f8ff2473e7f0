use serde::{Deserialize, Serialize};

use super::{reciprocal_integral, BoundError, HFunction, DEFAULT_TOL};

/// Which first-hitting time the potential is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMode {
    /// `T = inf{t | X_t < x_min}`.
    Below,
    /// `T = inf{t | X_t <= x_min}`.
    Hitting,
}

/// The potential `g` that turns drift `>= h(X_t)` into drift `>= 1`:
///
/// ```text
/// Below:   g(x) = 0                              for x < x_min
///          g(x) = x_min/h(x_min) + ∫_{x_min}^x 1/h   otherwise
/// Hitting: g(x) = 0                              for x <= x_min
///          g(x) = ∫_{x_min}^x 1/h                otherwise
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    h: HFunction,
    x_min: f64,
    mode: PotentialMode,
    tol: f64,
}

pub fn potential_transform(h: &HFunction, x_min: f64, mode: PotentialMode) -> Result<Potential, BoundError> {
    h.validate_for(x_min)?;
    Ok(Potential {
        h: h.clone(),
        x_min,
        mode,
        tol: DEFAULT_TOL,
    })
}

impl Potential {
    /// Relative quadrature tolerance for piecewise-linear `h`.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn mode(&self) -> PotentialMode {
        self.mode
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.mode {
            PotentialMode::Below if x < self.x_min => 0.0,
            PotentialMode::Hitting if x <= self.x_min => 0.0,
            PotentialMode::Below => {
                self.x_min / self.h.eval(self.x_min) + reciprocal_integral(&self.h, self.x_min, x, self.tol)
            }
            PotentialMode::Hitting => reciprocal_integral(&self.h, self.x_min, x, self.tol),
        }
    }
}
