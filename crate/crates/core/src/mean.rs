//! Means on an interval and the power-mean family.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::min_max;

/// Structural properties a mean is declared to have.
///
/// These are asserted by whoever builds the mean and only checked by
/// sampling (see [`check_mean_property`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MeanFlags {
    pub strict: bool,
    pub monotone: bool,
    pub homogeneous: bool,
    pub symmetric: bool,
}

impl MeanFlags {
    pub const ALL: MeanFlags = MeanFlags {
        strict: true,
        monotone: true,
        homogeneous: true,
        symmetric: true,
    };
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An `arity`-variable mean on an interval.
#[derive(Clone)]
pub struct Mean {
    arity: usize,
    interval: Interval,
    flags: MeanFlags,
    label: String,
    power: Option<PowerMeanSpec>,
    evaluator: Evaluator,
}

impl Mean {
    /// Wraps an arbitrary evaluator. The evaluator is only ever called with
    /// `arity` arguments that all lie in `interval`.
    pub fn new<F>(
        arity: usize,
        interval: Interval,
        flags: MeanFlags,
        label: impl Into<String>,
        evaluator: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if arity == 0 {
            return Err(Error::InvalidParameter("mean arity must be positive".into()));
        }
        Ok(Self {
            arity,
            interval,
            flags,
            label: label.into(),
            power: None,
            evaluator: Arc::new(evaluator),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn flags(&self) -> MeanFlags {
        self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The power-mean parameters, when this mean was built by [`make_power_mean`].
    pub fn power_spec(&self) -> Option<PowerMeanSpec> {
        self.power
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity {
            return Err(Error::Shape {
                expected: self.arity,
                found: x.len(),
            });
        }
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !self.interval.contains(**v))
        {
            return Err(Error::Domain {
                index,
                value,
                domain: format!("{}", self.interval),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// The same mean on a subinterval of its domain.
    pub fn restricted(mut self, interval: Interval) -> Result<Self> {
        if !self.interval.includes(&interval) {
            return Err(Error::InvalidInterval(format!(
                "{interval} is not contained in the domain {} of `{}`",
                self.interval, self.label
            )));
        }
        self.interval = interval;
        Ok(self)
    }

    /// Runs [`check_mean_property`] and turns any violation into an error.
    pub fn validated<R: Rng + ?Sized>(self, rng: &mut R, n_samples: usize) -> Result<Self> {
        let report = check_mean_property(&self, rng, n_samples);
        match report.violations.first() {
            None => Ok(self),
            Some(v) => Err(Error::InvalidParameter(format!(
                "mean `{}` falsified: {:?} violation at {:?} (value {})",
                self.label, v.kind, v.point, v.value
            ))),
        }
    }
}

impl fmt::Debug for Mean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mean")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .field("interval", &self.interval)
            .field("flags", &self.flags)
            .finish_non_exhaustive()
    }
}

/// Parameters of the `arity`-variable power mean of order `order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMeanSpec {
    pub order: f64,
    pub arity: usize,
}

impl PowerMeanSpec {
    pub fn new(order: f64, arity: usize) -> Result<Self> {
        let spec = Self { order, arity };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.order.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power mean order must be finite, got {}",
                self.order
            )));
        }
        if self.arity == 0 {
            return Err(Error::InvalidParameter("power mean arity must be positive".into()));
        }
        Ok(())
    }
}

/// Evaluates the power mean of order `spec.order` on strictly positive
/// arguments.
pub fn power_mean_eval(spec: PowerMeanSpec, x: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != spec.arity {
        return Err(Error::Shape {
            expected: spec.arity,
            found: x.len(),
        });
    }
    if let Some((index, &value)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::Domain {
            index,
            value,
            domain: format!("{}", Interval::positive_reals()),
        });
    }
    Ok(power_mean_raw(spec.order, x))
}

/// Power mean without argument checks.
///
/// Constant inputs return that constant exactly and the result is clamped
/// to `[min x, max x]`, so the mean property holds bit-for-bit.
pub(crate) fn power_mean_raw(order: f64, x: &[f64]) -> f64 {
    let Some((lo, hi)) = min_max(x) else {
        return f64::NAN;
    };
    if lo == hi {
        return lo;
    }
    let n = x.len() as f64;
    let value = if order == 0.0 {
        libm::exp(x.iter().map(|&v| libm::log(v)).sum::<f64>() / n)
    } else if order == 1.0 {
        x.iter().sum::<f64>() / n
    } else {
        // scale by the dominant end so x^s neither overflows nor underflows
        let scale = if order > 0.0 { hi } else { lo };
        let avg = x.iter().map(|&v| libm::pow(v / scale, order)).sum::<f64>() / n;
        scale * libm::pow(avg, 1.0 / order)
    };
    value.clamp(lo, hi)
}

/// Builds the power mean on `(0, +inf)` with every structural flag set.
pub fn make_power_mean(spec: PowerMeanSpec) -> Result<Mean> {
    spec.validate()?;
    let order = spec.order;
    let mut mean = Mean::new(
        spec.arity,
        Interval::positive_reals(),
        MeanFlags::ALL,
        power_label(order),
        move |x: &[f64]| power_mean_raw(order, x),
    )?;
    mean.power = Some(spec);
    Ok(mean)
}

fn power_label(order: f64) -> String {
    match order {
        o if o == -1.0 => "harmonic".into(),
        o if o == 0.0 => "geometric".into(),
        o if o == 1.0 => "arithmetic".into(),
        o if o == 2.0 => "quadratic".into(),
        o => format!("power({o})"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `eval(x)` fell outside `[min x, max x]`.
    Bounds,
    /// Strict flag set but `eval(x)` touched `min x` or `max x` on a
    /// nonconstant `x`.
    Strictness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanViolation {
    pub kind: ViolationKind,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanPropertyReport {
    pub samples: usize,
    pub violations: Vec<MeanViolation>,
}

impl MeanPropertyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Boundary-adjacent samples sit this far inside a bounded interval.
const BOUNDARY_OFFSET: f64 = 1e-6;

/// Samples the mean property `min x <= M(x) <= max x`, and strictness when
/// the mean declares it. Violations are returned as data.
pub fn check_mean_property<R: Rng + ?Sized>(
    mean: &Mean,
    rng: &mut R,
    n_samples: usize,
) -> MeanPropertyReport {
    let n = mean.arity;
    let (lo, hi) = mean.interval.sample_box();
    let mut points: Vec<Vec<f64>> = (0..n_samples.max(1))
        .map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();

    let iv = mean.interval;
    if iv.is_bounded() && iv.upper() - iv.lower() > 4.0 * BOUNDARY_OFFSET {
        let a = iv.lower() + BOUNDARY_OFFSET;
        let b = iv.upper() - BOUNDARY_OFFSET;
        points.push(alloc::vec![a; n]);
        points.push(alloc::vec![b; n]);
        for k in 0..n {
            let mut p = alloc::vec![a; n];
            p[k] = b;
            points.push(p);
            let mut q = alloc::vec![b; n];
            q[k] = a;
            points.push(q);
        }
        for _ in 0..n_samples.min(64) {
            points.push((0..n).map(|_| if rng.gen_bool(0.5) { a } else { b }).collect());
        }
    }

    let mut report = MeanPropertyReport::default();
    for x in points {
        let Some((xmin, xmax)) = min_max(&x) else { continue };
        let value = mean.eval_unchecked(&x);
        report.samples += 1;
        // NaN fails both comparisons, so it is reported as a bounds violation
        if !(value >= xmin && value <= xmax) {
            report.violations.push(MeanViolation {
                kind: ViolationKind::Bounds,
                point: x,
                value,
            });
        } else if mean.flags.strict && xmin < xmax && !(value > xmin && value < xmax) {
            report.violations.push(MeanViolation {
                kind: ViolationKind::Strictness,
                point: x,
                value,
            });
        }
    }
    report
}
