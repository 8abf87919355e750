//! The property suite behind `meanmap verify`.

use meanmap_core::averaging::{
    certify_uniform_weak_contractivity, check_contraction_dichotomy, falsify_contractivity,
    CertificateClass, ComposedMapping, ContractivityCertificate,
};
use meanmap_core::digraph::default_tg_cap;
use meanmap_core::invariant::{verify_invariance, verify_mean_properties, ConvergenceOptions, MeanProperty};
use meanmap_core::mean::check_mean_property;
use meanmap_core::sample::mixed_points;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

/// Slack for the min/max monotonicity of iterates.
pub const MONOTONE_SLACK: f64 = 1e-15;
/// Length of the traces checked for min/max monotonicity.
pub const TRACE_LENGTH: usize = 50;
const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Value>,
}

impl CheckOutcome {
    fn new(name: &'static str, status: CheckStatus, detail: impl Into<String>) -> Self {
        Self {
            name,
            status,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    fn with_witnesses<T: Serialize>(mut self, ws: impl IntoIterator<Item = T>) -> Self {
        self.witnesses = ws
            .into_iter()
            .take(MAX_WITNESSES)
            .map(|w| serde_json::to_value(w).expect("witnesses serialize"))
            .collect();
        self
    }

    fn pass_or_fail(name: &'static str, failures: usize, ok: String, bad: String) -> Self {
        if failures == 0 {
            Self::new(name, CheckStatus::Pass, ok)
        } else {
            Self::new(name, CheckStatus::Fail, bad)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub certificate: ContractivityCertificate,
    pub checks: Vec<CheckOutcome>,
    pub falsified: bool,
}

pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub convergence: ConvergenceOptions,
}

pub fn run_suite(m: &ComposedMapping, opts: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.samples;
    let certificate = certify_uniform_weak_contractivity(m);
    let certified = certificate.class == CertificateClass::UniformlyWeakCertified;
    let mut checks = Vec::new();

    // component means
    let mut bad = Vec::new();
    for (i, mean) in m.means().iter().enumerate() {
        let r = check_mean_property(mean, &mut rng, n);
        bad.extend(r.violations.into_iter().map(|v| json!({"mean": i + 1, "violation": v})));
    }
    checks.push(
        CheckOutcome::pass_or_fail(
            "mean_property",
            bad.len(),
            format!("{} component means respect min <= M <= max", m.p()),
            format!("{} violations", bad.len()),
        )
        .with_witnesses(bad),
    );

    let points = mixed_points(&mut rng, m.p(), m.sample_box(), n);

    // one application is a mean-type mapping
    let mut bad = Vec::new();
    for x in &points {
        let y = m.apply(x).expect("sample points lie in the domain");
        let (lo, hi) = bounds(x);
        if y.iter().any(|&v| !(lo <= v && v <= hi)) {
            bad.push(json!({"x": x, "m_x": y}));
        }
    }
    checks.push(
        CheckOutcome::pass_or_fail(
            "mean_type_mapping",
            bad.len(),
            format!("every coordinate of M(x) within [min x, max x] on {} points", points.len()),
            format!("{} points left the bracket", bad.len()),
        )
        .with_witnesses(bad),
    );

    // min nondecreasing and max nonincreasing along traces
    let mut bad = Vec::new();
    for x in &points {
        let trace = m.iterate(x, TRACE_LENGTH).expect("sample points lie in the domain");
        if let Some(step) = first_monotonicity_break(&trace) {
            bad.push(json!({"x": x, "step": step}));
        }
    }
    checks.push(
        CheckOutcome::pass_or_fail(
            "oscillation_monotonicity",
            bad.len(),
            format!("min/max monotone over {TRACE_LENGTH} steps on {} points", points.len()),
            format!("{} traces broke monotonicity", bad.len()),
        )
        .with_witnesses(bad),
    );

    // contractivity
    if certified {
        let d = check_contraction_dichotomy(m, &mut rng, n);
        checks.push(
            CheckOutcome::pass_or_fail(
                "contraction_dichotomy",
                d.violations.len(),
                format!(
                    "after {} steps each of {} points is constant ({}) or strictly inside its bracket",
                    d.n0, d.samples, d.collapsed_to_constant
                ),
                format!("{} points kept an extreme after {} steps", d.violations.len(), d.n0),
            )
            .with_witnesses(d.violations),
        );
    } else {
        let n0 = default_tg_cap(m.p());
        let c = falsify_contractivity(m, n0, &mut rng, n).expect("n0 >= 1");
        let outcome = match &c.witness {
            Some(w) => CheckOutcome::new(
                "contractivity",
                CheckStatus::Info,
                format!("not weakly contractive at n0 = {n0}: {}", c.evidence),
            )
            .with_witnesses([w.clone()]),
            None => CheckOutcome::new("contractivity", CheckStatus::Info, c.evidence.clone()),
        };
        checks.push(outcome);
    }

    // invariance
    if certified {
        let r = verify_invariance(m, &opts.convergence, &mut rng, n).expect("options validated");
        checks.push(
            CheckOutcome::pass_or_fail(
                "invariance",
                r.violations.len(),
                format!("max |K(M(x)) - K(x)| = {:e} over {} points", r.max_residual, r.samples),
                format!("{} points break K o M = K", r.violations.len()),
            )
            .with_witnesses(r.violations),
        );
    } else {
        checks.push(CheckOutcome::new(
            "invariance",
            CheckStatus::Skipped,
            format!("not certified: {}", certificate.evidence),
        ));
    }

    for (name, which) in [
        ("strict", MeanProperty::Strict),
        ("monotone", MeanProperty::Monotone),
        ("homogeneous", MeanProperty::Homogeneous),
    ] {
        let c = verify_mean_properties(m, which, &opts.convergence, &mut rng, n).expect("options validated");
        let outcome = if let Some(reason) = &c.skipped {
            CheckOutcome::new(name, CheckStatus::Skipped, reason.clone())
        } else if c.skipped_nonconvergent > 0 {
            CheckOutcome::new(
                name,
                CheckStatus::Skipped,
                format!(
                    "invariant mean did not converge on {} of the sampled points",
                    c.skipped_nonconvergent
                ),
            )
        } else {
            CheckOutcome::pass_or_fail(
                name,
                c.violations.len(),
                format!("unfalsified on {} comparisons", c.samples),
                format!("{} counterexamples", c.violations.len()),
            )
            .with_witnesses(c.violations)
        };
        checks.push(outcome);
    }

    let falsified = checks.iter().any(|c| c.status == CheckStatus::Fail);
    VerifyReport {
        seed: opts.seed,
        samples: n,
        certificate,
        checks,
        falsified,
    }
}

fn bounds(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// First step `k` at which `min` dropped or `max` grew by more than the slack.
pub fn first_monotonicity_break(trace: &[Vec<f64>]) -> Option<usize> {
    trace.windows(2).position(|w| {
        let (a, b) = (bounds(&w[0]), bounds(&w[1]));
        b.0 < a.0 - MONOTONE_SLACK || b.1 > a.1 + MONOTONE_SLACK
    }).map(|k| k + 1)
}
