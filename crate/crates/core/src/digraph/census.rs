use alloc::vec::Vec;

use serde::Serialize;

use super::{brute, Digraph, GraphClassification};
use crate::error::{Error, Result};

pub const CENSUS_MAX_VERTICES: usize = 4;

/// Every digraph on `n` vertices (loops allowed), in bit order.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let count: u64 = if n == 0 || n > 8 { 0 } else { 1u64 << (n * n) };
    (0..count).map(move |bits| Digraph::from_bits(n, bits).expect("n checked above"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusMismatch {
    pub edges: Vec<[usize; 2]>,
    pub production: GraphClassification,
    pub oracle_irreducible: bool,
    pub oracle_period: Option<usize>,
    pub oracle_uniform_walk_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Census {
    pub n: usize,
    pub graphs: usize,
    pub irreducible: usize,
    pub ergodic: usize,
    pub mismatches: Vec<CensusMismatch>,
}

/// Classifies every digraph on `n <= 4` vertices twice, once with the
/// production algorithms and once with the brute-force oracle, and lists
/// every disagreement. The uniform walk length is compared as well.
pub fn classify_all_small_graphs(n: usize) -> Result<Census> {
    if n > CENSUS_MAX_VERTICES {
        return Err(Error::TooManyVertices {
            n,
            max: CENSUS_MAX_VERTICES,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("census needs n >= 1".into()));
    }
    let horizon = 2 * ((n - 1) * (n - 1) + 1) + n;
    let mut census = Census {
        n,
        graphs: 0,
        irreducible: 0,
        ergodic: 0,
        mismatches: Vec::new(),
    };
    for g in all_digraphs(n) {
        census.graphs += 1;
        let prod = g.classify();
        let oracle = brute::classify(&g);
        let oracle_q0 = if oracle.ergodic {
            brute::min_uniform_walk_length(&g, horizon)
        } else {
            None
        };
        census.irreducible += usize::from(prod.irreducible);
        census.ergodic += usize::from(prod.ergodic);
        let agree = prod.irreducible == oracle.irreducible
            && prod.period == oracle.period
            && prod.aperiodic == oracle.aperiodic
            && prod.ergodic == oracle.ergodic
            && prod.uniform_walk_length == oracle_q0;
        if !agree {
            census.mismatches.push(CensusMismatch {
                edges: g.edges_one_based(),
                production: prod,
                oracle_irreducible: oracle.irreducible,
                oracle_period: oracle.period,
                oracle_uniform_walk_length: oracle_q0,
            });
        }
    }
    Ok(census)
}
