//! The invariant mean as the limit of the iterates, verification of its
//! properties, subsequence limits for non-ergodic mappings, and the
//! invariant functional equation.
//!
//! The minimum of `M^n(x)` never decreases and the maximum never increases,
//! so `[min M^n(x), max M^n(x)]` encloses the limit at every step. Reported
//! values are bracket midpoints with radius half the bracket width.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::averaging::{certify_uniform_weak_contractivity, CertificateClass, ComposedMapping};
use crate::error::{Error, Result};
use crate::sample::{mixed_points, uniform_points};
use crate::min_max;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    /// Tolerance relative to `max(1, |max(x0)|)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

impl ConvergenceOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Absolute tolerance for a run started at `x0`.
    pub fn absolute_tol(&self, x0: &[f64]) -> f64 {
        let top = min_max(x0).map_or(0.0, |(_, hi)| libm::fabs(hi));
        self.tol * libm::fmax(1.0, top)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub value: Option<f64>,
    pub error_radius: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub final_iterate: Vec<f64>,
}

/// Iterates until the oscillation drops below `2 * tol` (absolute, see
/// [`ConvergenceOptions::absolute_tol`]) or `max_iter` steps were taken.
///
/// Non-convergence is reported with `converged = false` and no value.
pub fn invariant_mean_eval(
    m: &ComposedMapping,
    x: &[f64],
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    opts.validate()?;
    m.check_domain(x)?;
    Ok(bracket_limit(m, x, opts))
}

fn bracket_limit(m: &ComposedMapping, x: &[f64], opts: &ConvergenceOptions) -> ConvergenceReport {
    let tol = opts.absolute_tol(x);
    let mut cur = x.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut scratch = Vec::new();
    let mut n = 0;
    loop {
        let (lo, hi) = min_max(&cur).expect("p >= 1");
        let osc = hi - lo;
        let converged = osc < 2.0 * tol;
        if converged || n == opts.max_iter {
            return ConvergenceReport {
                value: converged.then(|| lo + 0.5 * osc),
                error_radius: 0.5 * osc,
                iterations_used: n,
                converged,
                final_iterate: cur,
            };
        }
        m.apply_into(&cur, &mut next, &mut scratch);
        core::mem::swap(&mut cur, &mut next);
        n += 1;
    }
}

/// `(K(x), ..., K(x))`, or [`Error::NotConverged`].
pub fn limit_mapping_eval(
    m: &ComposedMapping,
    x: &[f64],
    opts: &ConvergenceOptions,
) -> Result<Vec<f64>> {
    let report = invariant_mean_eval(m, x, opts)?;
    match report.value {
        Some(k) => Ok(vec![k; m.p()]),
        None => Err(Error::NotConverged {
            iterations: report.iterations_used,
            oscillation: 2.0 * report.error_radius,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueLimit {
    pub residue: usize,
    pub point: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceLimits {
    pub modulus: usize,
    /// `limits[r]` approximates the limit of `M^(k*modulus + r)(x)`.
    pub limits: Vec<ResidueLimit>,
    pub iterations_used: usize,
    /// Largest coordinate gap between `M(limits[r])` and `limits[r+1 mod m]`.
    pub cyclic_residual: f64,
    pub cyclic_consistent: bool,
}

impl SubsequenceLimits {
    pub fn all_converged(&self) -> bool {
        self.limits.iter().all(|l| l.converged)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| libm::fabs(u - v)).fold(0.0, f64::max)
}

/// Limits of the `modulus` interleaved subsequences of iterates.
///
/// A residue class counts as converged once its last two same-residue
/// steps both moved every coordinate by at most the absolute tolerance.
/// The full-vector oscillation is not used: the limits of different
/// residues need not coincide.
pub fn subsequence_limits(
    m: &ComposedMapping,
    x: &[f64],
    modulus: usize,
    opts: &ConvergenceOptions,
) -> Result<SubsequenceLimits> {
    opts.validate()?;
    if modulus == 0 {
        return Err(Error::InvalidParameter("modulus must be at least 1".into()));
    }
    m.check_domain(x)?;
    let tol = opts.absolute_tol(x);
    let window = 3 * modulus;
    // history[k] is iterate number n + 1 - history.len() + k
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(window + 1);
    history.push_back(x.to_vec());
    let mut scratch = Vec::new();
    let mut n = 0;

    let residue_settled = |h: &VecDeque<Vec<f64>>, back: usize| -> bool {
        // iterate at position len-1-back against the two same-residue predecessors
        let len = h.len();
        if len < back + 1 + 2 * modulus {
            return false;
        }
        let a = &h[len - 1 - back];
        let b = &h[len - 1 - back - modulus];
        let c = &h[len - 1 - back - 2 * modulus];
        max_abs_diff(a, b) <= tol && max_abs_diff(b, c) <= tol
    };

    while n < opts.max_iter {
        if (0..modulus).all(|back| residue_settled(&history, back)) {
            break;
        }
        let mut next = vec![0.0; x.len()];
        m.apply_into(history.back().expect("nonempty"), &mut next, &mut scratch);
        history.push_back(next);
        if history.len() > window {
            history.pop_front();
        }
        n += 1;
    }

    let mut limits: Vec<ResidueLimit> = (0..modulus.min(n + 1))
        .map(|back| {
            let index = n - back;
            ResidueLimit {
                residue: index % modulus,
                point: history[history.len() - 1 - back].clone(),
                converged: residue_settled(&history, back),
            }
        })
        .collect();
    // residues never reached (modulus beyond the iterations taken) keep the start
    for r in 0..modulus {
        if !limits.iter().any(|l| l.residue == r) {
            limits.push(ResidueLimit {
                residue: r,
                point: x.to_vec(),
                converged: false,
            });
        }
    }
    limits.sort_by_key(|l| l.residue);

    let mut cyclic_residual: f64 = 0.0;
    for r in 0..modulus {
        let mut image = vec![0.0; x.len()];
        m.apply_into(&limits[r].point, &mut image, &mut scratch);
        cyclic_residual = cyclic_residual.max(max_abs_diff(&image, &limits[(r + 1) % modulus].point));
    }
    let cyclic_consistent = cyclic_residual <= 2.0 * tol;

    Ok(SubsequenceLimits {
        modulus,
        limits,
        iterations_used: n,
        cyclic_residual,
        cyclic_consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceWitness {
    pub point: Vec<f64>,
    pub k_x: f64,
    pub k_mx: f64,
    pub residual: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct InvarianceReport {
    pub samples: usize,
    pub skipped_nonconvergent: usize,
    pub max_residual: f64,
    pub violations: Vec<InvarianceWitness>,
}

impl InvarianceReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `K(M(x))` with `K(x)` on sampled points. Both brackets contain
/// the same limit, so a gap above twice the summed radii (plus the absolute
/// tolerance) is a violation.
pub fn verify_invariance<R: Rng + ?Sized>(
    m: &ComposedMapping,
    opts: &ConvergenceOptions,
    rng: &mut R,
    n_samples: usize,
) -> Result<InvarianceReport> {
    opts.validate()?;
    let mut report = InvarianceReport::default();
    for x in mixed_points(rng, m.p(), m.sample_box(), n_samples) {
        let mx = m.power_unchecked(&x, 1);
        let (a, b) = (bracket_limit(m, &x, opts), bracket_limit(m, &mx, opts));
        let (Some(k_x), Some(k_mx)) = (a.value, b.value) else {
            report.skipped_nonconvergent += 1;
            continue;
        };
        report.samples += 1;
        let residual = libm::fabs(k_mx - k_x);
        let allowed = 2.0 * (a.error_radius + b.error_radius) + opts.absolute_tol(&x);
        report.max_residual = report.max_residual.max(residual);
        if residual > allowed {
            report.violations.push(InvarianceWitness {
                point: x,
                k_x,
                k_mx,
                residual,
                allowed,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanProperty {
    Strict,
    Monotone,
    Homogeneous,
}

/// Scalings tried by the homogeneity check.
pub const HOMOGENEITY_FACTORS: [f64; 3] = [0.5, 2.0, 10.0];
/// Coordinate increment used by the monotonicity check.
pub const MONOTONE_STEP: f64 = 0.1;
/// Relative slack allowed by the homogeneity check.
pub const HOMOGENEITY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyWitness {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<Vec<f64>>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: MeanProperty,
    /// Why the check did not run, when it did not.
    pub skipped: Option<String>,
    pub samples: usize,
    pub skipped_nonconvergent: usize,
    pub max_residual: f64,
    pub violations: Vec<PropertyWitness>,
}

impl PropertyCheck {
    fn new(property: MeanProperty) -> Self {
        Self {
            property,
            skipped: None,
            samples: 0,
            skipped_nonconvergent: 0,
            max_residual: 0.0,
            violations: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sampled falsification of strictness, monotonicity or homogeneity of the
/// invariant mean. The check is skipped unless every component mean
/// declares the matching flag (homogeneity also needs the domain to be
/// `(0, +inf)`).
///
/// Strictness counts as violated when the enclosure of `K(x)` touches
/// `min x` or `max x`, so a mean ignoring one variable is caught on the
/// one-coordinate bump samples.
pub fn verify_mean_properties<R: Rng + ?Sized>(
    m: &ComposedMapping,
    which: MeanProperty,
    opts: &ConvergenceOptions,
    rng: &mut R,
    n_samples: usize,
) -> Result<PropertyCheck> {
    opts.validate()?;
    let mut check = PropertyCheck::new(which);
    let flag_ok = m.means().iter().all(|mean| {
        let f = mean.flags();
        match which {
            MeanProperty::Strict => f.strict,
            MeanProperty::Monotone => f.monotone,
            MeanProperty::Homogeneous => f.homogeneous,
        }
    });
    if !flag_ok {
        check.skipped = Some(format!("not every component mean is declared {which:?}").to_lowercase());
        return Ok(check);
    }
    if which == MeanProperty::Homogeneous && *m.interval() != crate::Interval::positive_reals() {
        check.skipped = Some("homogeneity needs the domain (0, +inf)".into());
        return Ok(check);
    }

    let points = match which {
        MeanProperty::Strict => mixed_points(rng, m.p(), m.sample_box(), n_samples),
        _ => uniform_points(rng, m.p(), m.sample_box(), n_samples),
    };
    for x in points {
        let base = bracket_limit(m, &x, opts);
        let Some(k) = base.value else {
            check.skipped_nonconvergent += 1;
            continue;
        };
        let r = base.error_radius;
        match which {
            MeanProperty::Strict => {
                let (lo, hi) = min_max(&x).expect("p >= 1");
                if lo == hi {
                    continue;
                }
                check.samples += 1;
                if k - r <= lo || k + r >= hi {
                    check.violations.push(PropertyWitness {
                        point: x,
                        other: None,
                        detail: format!("K = {k} (+-{r}) is not strictly inside [{lo}, {hi}]"),
                    });
                }
            }
            MeanProperty::Monotone => {
                for k_idx in 0..m.p() {
                    let mut y = x.clone();
                    y[k_idx] += MONOTONE_STEP;
                    if m.check_domain(&y).is_err() {
                        continue;
                    }
                    let bumped = bracket_limit(m, &y, opts);
                    let Some(ky) = bumped.value else {
                        check.skipped_nonconvergent += 1;
                        continue;
                    };
                    check.samples += 1;
                    let drop = (k - r) - (ky + bumped.error_radius);
                    check.max_residual = check.max_residual.max(k - ky);
                    if drop > 0.0 {
                        check.violations.push(PropertyWitness {
                            point: x.clone(),
                            other: Some(y),
                            detail: format!("K decreased from {k} to {ky} when coordinate {} grew", k_idx + 1),
                        });
                    }
                }
            }
            MeanProperty::Homogeneous => {
                for c in HOMOGENEITY_FACTORS {
                    let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
                    let scaled = bracket_limit(m, &cx, opts);
                    let Some(kc) = scaled.value else {
                        check.skipped_nonconvergent += 1;
                        continue;
                    };
                    check.samples += 1;
                    let target = c * k;
                    let diff = libm::fabs(kc - target);
                    let rel = diff / libm::fabs(target);
                    check.max_residual = check.max_residual.max(rel);
                    let allowed = HOMOGENEITY_REL_TOL * libm::fabs(target) + scaled.error_radius + c * r;
                    if diff > allowed {
                        check.violations.push(PropertyWitness {
                            point: x.clone(),
                            other: Some(cx),
                            detail: format!("K(c x) = {kc} but c K(x) = {target} for c = {c}"),
                        });
                    }
                }
            }
        }
    }
    Ok(check)
}

/// `t -> f(t, ..., t)`: the restriction of `f` to the diagonal.
#[derive(Clone)]
pub struct DiagonalRestriction<F> {
    f: F,
    p: usize,
}

impl<F: Fn(&[f64]) -> f64> DiagonalRestriction<F> {
    pub fn new(f: F, p: usize) -> Self {
        Self { f, p }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(&vec![t; self.p])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationWitness {
    pub point: Vec<f64>,
    pub f_x: f64,
    pub phi_k_x: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationReport {
    pub samples: usize,
    pub skipped_nonconvergent: usize,
    /// Largest `|f(x) - phi(K(x))| / max(1, |f(x)|)` seen.
    pub max_residual: f64,
    pub invariant: bool,
    pub witness: Option<EquationWitness>,
}

/// For a mapping certified uniformly weak contractive, every invariant
/// function factors as `f = phi o K` with `phi(t) = f(t, ..., t)`. Returns
/// that `phi` and a sampled test of the factorization at relative
/// tolerance `tol`; a failure means `f` is not invariant.
pub fn solve_invariant_equation<F, R>(
    f: F,
    m: &ComposedMapping,
    opts: &ConvergenceOptions,
    tol: f64,
    rng: &mut R,
    n_samples: usize,
) -> Result<(DiagonalRestriction<F>, EquationReport)>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    opts.validate()?;
    let cert = certify_uniform_weak_contractivity(m);
    if cert.class != CertificateClass::UniformlyWeakCertified {
        return Err(Error::NotCertified(cert.evidence));
    }
    let phi = DiagonalRestriction::new(f, m.p());
    let mut report = EquationReport {
        samples: 0,
        skipped_nonconvergent: 0,
        max_residual: 0.0,
        invariant: true,
        witness: None,
    };
    let mut worst = 0.0;
    for x in mixed_points(rng, m.p(), m.sample_box(), n_samples) {
        let Some(k) = bracket_limit(m, &x, opts).value else {
            report.skipped_nonconvergent += 1;
            continue;
        };
        report.samples += 1;
        let f_x = (phi.f)(&x);
        let phi_k_x = phi.eval(k);
        let residual = libm::fabs(f_x - phi_k_x) / libm::fmax(1.0, libm::fabs(f_x));
        report.max_residual = report.max_residual.max(residual);
        if !(residual <= tol) && !(residual <= worst) {
            worst = residual;
            report.invariant = false;
            report.witness = Some(EquationWitness {
                point: x,
                f_x,
                phi_k_x,
                residual,
            });
        }
    }
    Ok((phi, report))
}

/// `K(x)` or `None`; convenience for building test functions on top of
/// the invariant mean.
pub fn invariant_value(m: &ComposedMapping, x: &[f64], opts: &ConvergenceOptions) -> Option<f64> {
    bracket_limit(m, x, opts).value
}
