//! Smooth compactly supported cutoffs and the bump profile.
//!
//! The cutoff is a tensor product of a `C^∞` ramp built from the standard
//! quotient `h(1 - y) / (h(y) + h(1 - y))` with `h(y) = exp(-1/y)`. It is
//! identically one on `[-aL, aL]^d` and identically zero outside `(-L, L)^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Below this argument exp(-1/y) is reported as an exact zero.
const H_FLOOR: f64 = 1e-300;

#[inline]
fn h(y: f64) -> f64 {
    if y > H_FLOOR {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// `exp(-1/(1 - r^2))` for `|r| < 1`, zero otherwise.
pub fn bump(r: f64) -> f64 {
    bump_sq(r * r)
}

/// The bump as a function of the squared radius, used for `b(x, y)`.
pub fn bump_sq(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Decreasing `C^∞` ramp: 1 for `y <= 0`, 0 for `y >= 1`.
pub fn transition(y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    if y >= 1.0 {
        return 0.0;
    }
    let right = h(1.0 - y);
    right / (h(y) + right)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    plateau: f64,
    half_width: f64,
}

impl CutoffSpec {
    /// Cutoff with plateau `[-aL, aL]^d` and support inside `(-L, L)^d`.
    pub fn new(plateau: f64, half_width: f64) -> Result<Self> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::param(
                "plateau fraction",
                format!("must lie in (0, 1), got {plateau}"),
            ));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("L", format!("must be positive, got {half_width}")));
        }
        Ok(CutoffSpec {
            plateau,
            half_width,
        })
    }

    /// The cutoff used by the scheme, `a = 1/2`.
    pub fn half(half_width: f64) -> Result<Self> {
        Self::new(0.5, half_width)
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let a = self.plateau;
        x.iter()
            .map(|&xi| transition((xi.abs() / self.half_width - a) / (1.0 - a)))
            .product()
    }
}
