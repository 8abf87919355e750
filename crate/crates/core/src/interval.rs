use alloc::format;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real interval with possibly infinite endpoints.
///
/// Infinite endpoints are always treated as open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lower: f64,
    upper: f64,
    lower_open: bool,
    upper_open: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, lower_open: bool, upper_open: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval(format!("[{lower}, {upper}] is empty")));
        }
        if !(lower < upper) {
            return Err(Error::InvalidInterval(format!(
                "lower bound {lower} must be below upper bound {upper}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            lower_open: lower_open || lower.is_infinite(),
            upper_open: upper_open || upper.is_infinite(),
        })
    }

    /// The open half-line `(0, +inf)`, domain of the power means.
    pub fn positive_reals() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
            lower_open: true,
            upper_open: true,
        }
    }

    pub fn closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, false, false)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower_open(&self) -> bool {
        self.lower_open
    }

    pub fn upper_open(&self) -> bool {
        self.upper_open
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        if t.is_nan() {
            return false;
        }
        let above = if self.lower_open { t > self.lower } else { t >= self.lower };
        let below = if self.upper_open { t < self.upper } else { t <= self.upper };
        above && below
    }

    /// Whether `other` is contained in `self`.
    pub fn includes(&self, other: &Interval) -> bool {
        let low_ok = other.lower > self.lower
            || (other.lower == self.lower && (!self.lower_open || other.lower_open));
        let high_ok = other.upper < self.upper
            || (other.upper == self.upper && (!self.upper_open || other.upper_open));
        low_ok && high_ok
    }

    /// Closed box used for random sampling: `[1, 2]` intersected with the
    /// interval when that is nondegenerate, otherwise a unit-width box well
    /// inside the interval.
    pub fn sample_box(&self) -> (f64, f64) {
        let lo = self.lower.max(1.0);
        let hi = self.upper.min(2.0);
        if hi - lo > 1e-3 && self.contains(lo) && self.contains(hi) {
            return (lo, hi);
        }
        match (self.lower.is_finite(), self.upper.is_finite()) {
            (true, true) => {
                let w = self.upper - self.lower;
                (self.lower + w / 4.0, self.upper - w / 4.0)
            }
            (true, false) => (self.lower + 1.0, self.lower + 2.0),
            (false, true) => (self.upper - 2.0, self.upper - 1.0),
            (false, false) => (1.0, 2.0),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_open { '(' } else { '[' };
        let r = if self.upper_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lower, self.upper)
    }
}
