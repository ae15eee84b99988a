//! Increasing piecewise-linear utility functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An increasing, continuous utility given by knots `(consequence, utility)`.
///
/// Between knots the function interpolates linearly; outside the knot range
/// it extends the end segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtility", into = "RawUtility")]
pub struct UtilityFunction {
    knots: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawUtility {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<RawUtility> for UtilityFunction {
    type Error = Error;
    fn try_from(raw: RawUtility) -> Result<Self> {
        UtilityFunction::new(raw.knots)
    }
}

impl From<UtilityFunction> for RawUtility {
    fn from(u: UtilityFunction) -> Self {
        RawUtility { knots: u.knots }
    }
}

impl UtilityFunction {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Utility(format!("need at least 2 knots, got {}", knots.len())));
        }
        for (k, &(x, u)) in knots.iter().enumerate() {
            if !x.is_finite() || !u.is_finite() {
                return Err(Error::Utility(format!("knot {k} = ({x}, {u}) is not finite")));
            }
        }
        for (k, w) in knots.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::Utility(format!("consequences not strictly increasing at knot {}", k + 1)));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::Utility(format!("utilities not strictly increasing at knot {}", k + 1)));
            }
        }
        Ok(UtilityFunction { knots })
    }

    /// `u(x) = x`.
    pub fn identity() -> Self {
        UtilityFunction { knots: vec![(0.0, 0.0), (1.0, 1.0)] }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Smallest and largest knot consequence.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.knots.partition_point(|&(kx, _)| kx < x);
        if let Some(&(kx, ku)) = self.knots.get(k) {
            if kx == x {
                return ku;
            }
        }
        let hi = k.clamp(1, self.knots.len() - 1);
        let (x0, u0) = self.knots[hi - 1];
        let (x1, u1) = self.knots[hi];
        u0 + (u1 - u0) * ((x - x0) / (x1 - x0))
    }

    /// `a·u + b` for `a > 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Utility(format!("affine map needs a > 0 and finite b, got a={a}, b={b}")));
        }
        Self::new(self.knots.iter().map(|&(x, u)| (x, a * u + b)).collect())
    }
}
