//! Mean-type mappings built from component means and an index vector,
//! classification of their incidence digraphs, and computation of the
//! invariant mean by monotone bracketing of the iterates.
//!
//! The crate is `no_std` and only needs `alloc`. Everything touching files,
//! JSON or the command line lives in the `meanmap` companion crate.
//!
//! Indices are 0-based throughout this crate. Conversion from the 1-based
//! convention used in spec files happens in [`IndexVector::from_one_based`].

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod averaging;
pub mod digraph;
mod error;
pub mod interval;
pub mod invariant;
pub mod mean;
pub mod sample;

pub use averaging::{
    AveragingMapping, CertificateClass, ComposedMapping, ContractivityCertificate, IndexVector,
};
pub use digraph::{Digraph, GraphClassification, Tri, TriStateColoring};
pub use error::{Error, Result};
pub use interval::Interval;
pub use invariant::{ConvergenceOptions, ConvergenceReport, SubsequenceLimits};
pub use mean::{Mean, MeanFlags, PowerMeanSpec};

/// Oscillation `max(x) - min(x)` of a vector; zero for an empty slice.
pub fn oscillation(x: &[f64]) -> f64 {
    match min_max(x) {
        Some((lo, hi)) => hi - lo,
        None => 0.0,
    }
}

pub(crate) fn min_max(x: &[f64]) -> Option<(f64, f64)> {
    let mut it = x.iter().copied();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
}

/// A vector is treated as constant when its oscillation is at most
/// `1e-13 * max(1, |max(x)|)`.
pub fn is_constant_vector(x: &[f64]) -> bool {
    match min_max(x) {
        Some((lo, hi)) => hi - lo <= CONSTANT_VECTOR_REL * libm::fmax(1.0, libm::fabs(hi)),
        None => true,
    }
}

pub(crate) const CONSTANT_VECTOR_REL: f64 = 1e-13;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillation_examples() {
        assert_eq!(oscillation(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(oscillation(&[1.0, 2.0, 3.0, 4.0]), 3.0);
        assert_eq!(oscillation(&[2.0, 1.0]), 1.0);
        assert_eq!(oscillation(&[]), 0.0);
    }

    #[test]
    fn constant_vector_threshold_scales() {
        assert!(is_constant_vector(&[1e6, 1e6 + 1e-8]));
        assert!(!is_constant_vector(&[1.0, 1.0 + 1e-12]));
    }
}
