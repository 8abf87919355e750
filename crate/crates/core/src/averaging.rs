//! Composition of a tuple of means with an index vector, iteration of the
//! resulting mean-type mapping, and contractivity certificates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{default_tg_cap, Digraph};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mean::Mean;
use crate::sample::mixed_points;
use crate::{is_constant_vector, min_max, oscillation};

/// Row `i` lists which arguments feed coordinate `i`. Stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexVector {
    p: usize,
    rows: Vec<Vec<usize>>,
}

impl IndexVector {
    /// Validates 0-based rows for a mapping of dimension `p`.
    pub fn new(rows: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let one_based: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as i64 + 1).collect())
            .collect();
        Self::from_one_based(&one_based, p)
    }

    /// Converts the 1-based rows of a spec file, reporting the offending
    /// row and position (both 1-based) on failure.
    pub fn from_one_based(rows: &[Vec<i64>], p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("dimension p must be positive".into()));
        }
        if rows.len() != p {
            return Err(Error::Shape {
                expected: p,
                found: rows.len(),
            });
        }
        let mut out = Vec::with_capacity(p);
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidParameter(format!("alpha row {} is empty", i + 1)));
            }
            let mut converted = Vec::with_capacity(row.len());
            for (j, &value) in row.iter().enumerate() {
                if value < 1 || value > p as i64 {
                    return Err(Error::IndexOutOfRange {
                        row: i + 1,
                        position: j + 1,
                        value,
                        p,
                    });
                }
                converted.push((value - 1) as usize);
            }
            out.push(converted);
        }
        Ok(Self { p, rows: out })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v + 1).collect())
            .collect()
    }

    /// Incidence graph: an edge from argument `rows[i][j]` to coordinate `i`.
    pub fn incidence_graph(&self) -> Digraph {
        let mut g = Digraph::new(self.p).expect("p >= 1 checked at construction");
        for (i, row) in self.rows.iter().enumerate() {
            for &src in row {
                g.add_edge(src, i).expect("indices validated at construction");
            }
        }
        g
    }
}

/// Incidence graph of a 1-based index vector.
pub fn build_incidence_graph(alpha: &[Vec<i64>], p: usize) -> Result<Digraph> {
    Ok(IndexVector::from_one_based(alpha, p)?.incidence_graph())
}

/// A tuple of means sharing one interval.
#[derive(Debug, Clone)]
pub struct AveragingMapping {
    means: Vec<Mean>,
    interval: Interval,
}

impl AveragingMapping {
    pub fn new(means: Vec<Mean>) -> Result<Self> {
        let first = means
            .first()
            .ok_or_else(|| Error::InvalidParameter("at least one mean is required".into()))?;
        let interval = *first.interval();
        if let Some((index, m)) = means.iter().enumerate().find(|(_, m)| *m.interval() != interval) {
            return Err(Error::MismatchedDomains {
                index,
                found: format!("{}", m.interval()),
            });
        }
        Ok(Self { means, interval })
    }

    pub fn means(&self) -> &[Mean] {
        &self.means
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// The mean-type mapping whose `i`-th coordinate is `means[i]` evaluated
/// at the arguments selected by `alpha` row `i`.
#[derive(Debug, Clone)]
pub struct ComposedMapping {
    base: AveragingMapping,
    alpha: IndexVector,
    graph: Digraph,
}

pub fn compose(base: AveragingMapping, alpha: IndexVector) -> Result<ComposedMapping> {
    if base.len() != alpha.p() {
        return Err(Error::Shape {
            expected: alpha.p(),
            found: base.len(),
        });
    }
    for (i, (m, row)) in base.means.iter().zip(alpha.rows()).enumerate() {
        if m.arity() != row.len() {
            return Err(Error::RowArity {
                row: i + 1,
                expected: m.arity(),
                found: row.len(),
            });
        }
    }
    let graph = alpha.incidence_graph();
    Ok(ComposedMapping { base, alpha, graph })
}

impl ComposedMapping {
    pub fn p(&self) -> usize {
        self.alpha.p()
    }

    pub fn base(&self) -> &AveragingMapping {
        &self.base
    }

    pub fn means(&self) -> &[Mean] {
        &self.base.means
    }

    pub fn alpha(&self) -> &IndexVector {
        &self.alpha
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn interval(&self) -> &Interval {
        &self.base.interval
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::Shape {
                expected: self.p(),
                found: x.len(),
            });
        }
        let iv = self.interval();
        match x.iter().enumerate().find(|(_, v)| !iv.contains(**v)) {
            Some((index, &value)) => Err(Error::Domain {
                index,
                value,
                domain: format!("{iv}"),
            }),
            None => Ok(()),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out, &mut Vec::new());
        Ok(out)
    }

    /// `out = M(x)` for `x` already known to lie in the domain.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        for ((slot, mean), row) in out.iter_mut().zip(&self.base.means).zip(self.alpha.rows()) {
            scratch.clear();
            scratch.extend(row.iter().map(|&k| x[k]));
            *slot = mean.eval_unchecked(scratch);
        }
    }

    /// `[x, M(x), ..., M^n(x)]`.
    pub fn iterate(&self, x: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
        self.check_domain(x)?;
        let mut trace = Vec::with_capacity(n + 1);
        trace.push(x.to_vec());
        let mut scratch = Vec::new();
        for k in 0..n {
            let mut next = vec![0.0; x.len()];
            self.apply_into(&trace[k], &mut next, &mut scratch);
            trace.push(next);
        }
        Ok(trace)
    }

    /// `M^n(x)` without keeping the trace.
    pub fn power(&self, x: &[f64], n: u64) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        Ok(self.power_unchecked(x, n))
    }

    pub(crate) fn power_unchecked(&self, x: &[f64], n: u64) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut next = vec![0.0; x.len()];
        let mut scratch = Vec::new();
        for _ in 0..n {
            self.apply_into(&cur, &mut next, &mut scratch);
            core::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Sample box for falsification sweeps.
    pub fn sample_box(&self) -> (f64, f64) {
        self.interval().sample_box()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateClass {
    /// No witness found by sampling. Evidence, not proof.
    ContractiveSampled,
    /// Every mean is declared strict and the incidence graph is ergodic.
    UniformlyWeakCertified,
    Falsified,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractivityCertificate {
    pub class: CertificateClass,
    pub n0: Option<u64>,
    pub evidence: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<f64>>,
}

/// Certifies uniform weak contractivity with `n0 = 3^p` when all means are
/// declared strict and the incidence graph is ergodic; otherwise the class
/// is `Unknown` and the evidence names every failed hypothesis.
///
/// There is no special case for `p = 2`: such mappings go through the same
/// test as any other.
pub fn certify_uniform_weak_contractivity(m: &ComposedMapping) -> ContractivityCertificate {
    let mut failures: Vec<String> = Vec::new();
    let non_strict: Vec<String> = m
        .means()
        .iter()
        .enumerate()
        .filter(|(_, mean)| !mean.flags().strict)
        .map(|(i, mean)| format!("{} ({})", i + 1, mean.label()))
        .collect();
    if !non_strict.is_empty() {
        failures.push(format!("strictness not asserted for mean {}", non_strict.join(", ")));
    }
    let class = m.graph().classify();
    if !class.irreducible {
        failures.push("graph not irreducible".into());
    }
    match class.period {
        Some(1) => {}
        Some(k) => failures.push(format!("graph not aperiodic (period {k})")),
        None => failures.push("graph has no cycle".into()),
    }
    let n0 = u32::try_from(m.p()).ok().and_then(|p| 3u64.checked_pow(p));
    if n0.is_none() {
        failures.push("3^p does not fit in 64 bits".into());
    }
    if failures.is_empty() {
        ContractivityCertificate {
            class: CertificateClass::UniformlyWeakCertified,
            n0,
            evidence: format!(
                "all means strict and incidence graph ergodic; oscillation shrinks after {} steps",
                n0.unwrap_or_default()
            ),
            witness: None,
        }
    } else {
        ContractivityCertificate {
            class: CertificateClass::Unknown,
            n0: None,
            evidence: failures.join("; "),
            witness: None,
        }
    }
}

/// Searches for a nonconstant `x` with `osc(M^n0(x)) >= osc(x)`.
///
/// Two-level patterns, near-constant vectors and one-coordinate bumps are
/// always tried before `n_samples` uniform points.
pub fn falsify_contractivity<R: Rng + ?Sized>(
    m: &ComposedMapping,
    n0: u64,
    rng: &mut R,
    n_samples: usize,
) -> Result<ContractivityCertificate> {
    if n0 == 0 {
        return Err(Error::InvalidParameter("n0 must be at least 1".into()));
    }
    let points = mixed_points(rng, m.p(), m.sample_box(), n_samples);
    let mut tried = 0usize;
    for x in points.iter().filter(|x| oscillation(x) > 0.0) {
        tried += 1;
        let y = m.power_unchecked(x, n0);
        let (before, after) = (oscillation(x), oscillation(&y));
        if !(after < before) {
            return Ok(ContractivityCertificate {
                class: CertificateClass::Falsified,
                n0: Some(n0),
                evidence: format!(
                    "oscillation {after} after {n0} step(s) is not below the initial {before}"
                ),
                witness: Some(x.clone()),
            });
        }
    }
    Ok(ContractivityCertificate {
        class: CertificateClass::ContractiveSampled,
        n0: Some(n0),
        evidence: format!(
            "no witness among {tried} nonconstant samples (sampling evidence, not a proof)"
        ),
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DichotomyReport {
    pub n0: u64,
    pub samples: usize,
    pub collapsed_to_constant: usize,
    pub violations: Vec<Vec<f64>>,
}

/// For sampled nonconstant `x`, checks that `y = M^(3^p)(x)` is either a
/// constant vector or satisfies `min x < min y <= max y < max x`.
pub fn check_contraction_dichotomy<R: Rng + ?Sized>(
    m: &ComposedMapping,
    rng: &mut R,
    n_samples: usize,
) -> DichotomyReport {
    let n0 = default_tg_cap(m.p());
    let mut report = DichotomyReport {
        n0,
        ..Default::default()
    };
    for x in mixed_points(rng, m.p(), m.sample_box(), n_samples) {
        let Some((xmin, xmax)) = min_max(&x) else { continue };
        if xmin == xmax {
            continue;
        }
        report.samples += 1;
        let y = m.power_unchecked(&x, n0);
        let (ymin, ymax) = min_max(&y).expect("same length as x");
        if is_constant_vector(&y) {
            report.collapsed_to_constant += 1;
        } else if !(xmin < ymin && ymax < xmax) {
            report.violations.push(x);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::{make_power_mean, MeanFlags, PowerMeanSpec};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn power_mapping(orders: &[f64], alpha: &[&[i64]]) -> ComposedMapping {
        let p = orders.len();
        let means = orders
            .iter()
            .zip(alpha)
            .map(|(&s, row)| make_power_mean(PowerMeanSpec::new(s, row.len()).unwrap()).unwrap())
            .collect();
        let rows: Vec<Vec<i64>> = alpha.iter().map(|r| r.to_vec()).collect();
        compose(
            AveragingMapping::new(means).unwrap(),
            IndexVector::from_one_based(&rows, p).unwrap(),
        )
        .unwrap()
    }

    fn cyclic() -> ComposedMapping {
        power_mapping(&[-1.0, 0.0, 1.0, 2.0], &[&[1, 2], &[2, 3], &[3, 4], &[4, 1]])
    }

    fn split() -> ComposedMapping {
        power_mapping(&[-1.0, 1.0, -1.0, 1.0], &[&[1, 2], &[1, 2], &[3, 4], &[3, 4]])
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn incidence_graph_of_cyclic_index_vector() {
        let g = build_incidence_graph(&[vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1]], 4).unwrap();
        let mut expected = vec![
            [1, 1], [2, 1], [2, 2], [3, 2], [3, 3], [4, 3], [4, 4], [1, 4],
        ];
        expected.sort();
        assert_eq!(g.edges_one_based(), expected);
    }

    #[test]
    fn incidence_graph_of_split_index_vector() {
        let g = split().graph().clone();
        let mut comps = g.strongly_connected_components();
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
        assert!((0..4).all(|v| g.has_edge(v, v)));
    }

    #[test]
    fn identity_composition() {
        let g = build_incidence_graph(&[vec![1]], 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 0)]);
        let id = power_mapping(&[1.0], &[&[1]]);
        assert_eq!(id.apply(&[3.5]).unwrap(), vec![3.5]);
    }

    #[test]
    fn index_errors_are_located() {
        let err = IndexVector::from_one_based(&[vec![1, 2], vec![2, 5]], 2).unwrap_err();
        assert_eq!(
            err,
            Error::IndexOutOfRange {
                row: 2,
                position: 2,
                value: 5,
                p: 2
            }
        );
        assert!(matches!(
            IndexVector::from_one_based(&[vec![0]], 1),
            Err(Error::IndexOutOfRange { value: 0, .. })
        ));
        assert!(matches!(
            IndexVector::from_one_based(&[vec![1]], 2),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let means = vec![make_power_mean(PowerMeanSpec::new(1.0, 3).unwrap()).unwrap()];
        let alpha = IndexVector::from_one_based(&[vec![1, 1]], 1).unwrap();
        assert!(matches!(
            compose(AveragingMapping::new(means).unwrap(), alpha),
            Err(Error::RowArity { row: 1, expected: 3, found: 2 })
        ));
    }

    #[test]
    fn cyclic_mapping_at_one_two_three_four() {
        let y = cyclic().apply(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        // closed forms 2xy/(x+y), sqrt(yz), (z+t)/2, sqrt((t^2+x^2)/2)
        let expected = [4.0 / 3.0, 6.0_f64.sqrt(), 3.5, 8.5_f64.sqrt()];
        for (a, b) in y.iter().zip(expected) {
            assert!(rel_close(*a, b, 1e-15), "{a} vs {b}");
        }
    }

    #[test]
    fn constant_vectors_are_fixed() {
        for c in [0.25, 1.0, 17.0] {
            assert_eq!(cyclic().apply(&[c; 4]).unwrap(), vec![c; 4]);
        }
        let trace = split().iterate(&[1.0, 1.0, 2.0, 2.0], 25).unwrap();
        assert!(trace.iter().all(|p| p == &vec![1.0, 1.0, 2.0, 2.0]));
    }

    #[test]
    fn iterate_zero_steps() {
        assert_eq!(cyclic().iterate(&[1.0, 2.0, 3.0, 4.0], 0).unwrap(), vec![vec![1.0, 2.0, 3.0, 4.0]]);
    }

    #[test]
    fn split_mapping_reaches_geometric_means() {
        let last = split().power(&[1.0, 4.0, 1.0, 4.0], 60).unwrap();
        for v in last {
            assert!((v - 2.0).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn oscillation_along_cyclic_trace_shrinks() {
        let trace = cyclic().iterate(&[1.0, 2.0, 3.0, 4.0], 200).unwrap();
        let osc: Vec<f64> = trace.iter().map(|p| oscillation(p)).collect();
        assert!(osc.windows(2).all(|w| w[1] <= w[0]));
        assert!(osc[200] < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(cyclic().apply(&[1.0, -2.0, 3.0, 4.0]), Err(Error::Domain { index: 1, .. })));
        assert!(matches!(cyclic().apply(&[1.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn certificates() {
        let c = certify_uniform_weak_contractivity(&cyclic());
        assert_eq!(c.class, CertificateClass::UniformlyWeakCertified);
        assert_eq!(c.n0, Some(81));

        let s = certify_uniform_weak_contractivity(&split());
        assert_eq!(s.class, CertificateClass::Unknown);
        assert!(s.evidence.contains("graph not irreducible"), "{}", s.evidence);

        let max = Mean::new(2, Interval::positive_reals(), MeanFlags::default(), "max", |x| {
            x[0].max(x[1])
        })
        .unwrap();
        let mut means: Vec<Mean> = cyclic().means().to_vec();
        means[3] = max;
        let m = compose(AveragingMapping::new(means).unwrap(), cyclic().alpha().clone()).unwrap();
        let c = certify_uniform_weak_contractivity(&m);
        assert_eq!(c.class, CertificateClass::Unknown);
        assert!(c.evidence.contains("strictness not asserted"), "{}", c.evidence);
    }

    #[test]
    fn one_step_is_not_contractive_two_steps_are() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let one = falsify_contractivity(&cyclic(), 1, &mut rng, 100).unwrap();
        assert_eq!(one.class, CertificateClass::Falsified);
        let w = one.witness.unwrap();
        // witnesses are two-level: (a, a, b, b) keeps both extremes
        assert!(oscillation(&cyclic().apply(&w).unwrap()) >= oscillation(&w));

        let y = cyclic().apply(&[1.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(y[0], 1.0);
        assert_eq!(y[2], 2.0);
        assert!(rel_close(y[1], 2f64.sqrt(), 1e-15));
        assert!(rel_close(y[3], 2.5f64.sqrt(), 1e-15));

        let two = falsify_contractivity(&cyclic(), 2, &mut rng, 500).unwrap();
        assert_eq!(two.class, CertificateClass::ContractiveSampled);
        assert!(two.evidence.contains("not a proof"));
    }

    #[test]
    fn split_mapping_is_never_contractive() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n0 in [1, 5, 81] {
            let c = falsify_contractivity(&split(), n0, &mut rng, 10).unwrap();
            assert_eq!(c.class, CertificateClass::Falsified);
        }
        assert!(falsify_contractivity(&split(), 0, &mut rng, 10).is_err());
    }

    #[test]
    fn dichotomy_on_certified_mapping() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = check_contraction_dichotomy(&cyclic(), &mut rng, 200);
        assert_eq!(r.n0, 81);
        assert!(r.violations.is_empty());
        assert!(r.samples > 200);
    }

    /// Relabels coordinates by `perm`: coordinate `perm[i]` of the new
    /// mapping is coordinate `i` of the old one, reading permuted arguments.
    fn relabel(m: &ComposedMapping, perm: &[usize]) -> ComposedMapping {
        let p = m.p();
        let mut means: Vec<Option<Mean>> = vec![None; p];
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); p];
        for i in 0..p {
            means[perm[i]] = Some(m.means()[i].clone());
            rows[perm[i]] = m.alpha().rows()[i].iter().map(|&k| perm[k]).collect();
        }
        compose(
            AveragingMapping::new(means.into_iter().map(Option::unwrap).collect()).unwrap(),
            IndexVector::new(rows, p).unwrap(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn mean_type_property(x in prop::collection::vec(0.01f64..100.0, 4)) {
            let (lo, hi) = min_max(&x).unwrap();
            for m in [cyclic(), split()] {
                for v in m.apply(&x).unwrap() {
                    prop_assert!(lo <= v && v <= hi);
                }
            }
        }

        #[test]
        fn min_and_max_are_monotone_along_trace(x in prop::collection::vec(0.01f64..100.0, 4)) {
            let trace = cyclic().iterate(&x, 50).unwrap();
            for w in trace.windows(2) {
                let (a, b) = (min_max(&w[0]).unwrap(), min_max(&w[1]).unwrap());
                prop_assert!(a.0 <= b.0 && b.1 <= a.1);
            }
        }

        #[test]
        fn permutation_equivariance(
            x in prop::collection::vec(0.01f64..100.0, 4),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let m = cyclic();
            let q = relabel(&m, &perm);
            let mut px = vec![0.0; 4];
            for i in 0..4 {
                px[perm[i]] = x[i];
            }
            let y = m.apply(&x).unwrap();
            let qy = q.apply(&px).unwrap();
            for i in 0..4 {
                prop_assert!(rel_close(qy[perm[i]], y[i], 1e-15));
            }
        }

        #[test]
        fn homogeneous_mapping(x in prop::collection::vec(0.01f64..100.0, 4), c in 0.01f64..100.0) {
            let m = cyclic();
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            let a = m.apply(&cx).unwrap();
            let b = m.apply(&x).unwrap();
            for (u, v) in a.iter().zip(b) {
                prop_assert!(rel_close(*u, c * v, 1e-12));
            }
        }
    }
}
