//! Tri-state dynamics on a digraph: a vertex turns `+1` (`-1`) when all of
//! its in-neighbors are `+1` (`-1`) and `0` otherwise. Along the iterates of
//! a mean-type mapping this tracks which coordinates still equal the
//! maximum or the minimum of the starting vector.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::Digraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Tri {
    Neg,
    Zero,
    Pos,
}

impl From<Tri> for i8 {
    fn from(t: Tri) -> i8 {
        match t {
            Tri::Neg => -1,
            Tri::Zero => 0,
            Tri::Pos => 1,
        }
    }
}

impl TryFrom<i8> for Tri {
    type Error = Error;

    fn try_from(v: i8) -> Result<Tri> {
        match v {
            -1 => Ok(Tri::Neg),
            0 => Ok(Tri::Zero),
            1 => Ok(Tri::Pos),
            other => Err(Error::InvalidParameter(alloc::format!(
                "tri-state value must be -1, 0 or 1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

/// A `{-1, 0, 1}` value per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriStateColoring(pub Vec<Tri>);

impl TriStateColoring {
    pub fn constant(n: usize, t: Tri) -> Self {
        Self(alloc::vec![t; n])
    }

    pub fn from_values(values: &[i8]) -> Result<Self> {
        values.iter().map(|&v| Tri::try_from(v)).collect::<Result<_>>().map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The common value if every vertex carries the same one.
    pub fn constant_value(&self) -> Option<Tri> {
        let first = *self.0.first()?;
        self.0.iter().all(|&t| t == first).then_some(first)
    }

    /// Coordinatewise order.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// One application of the tri-state operator.
pub fn tg_step(g: &Digraph, c: &TriStateColoring) -> Result<TriStateColoring> {
    let n = g.n_vertices();
    if c.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: c.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        let mut seen = false;
        let (mut all_pos, mut all_neg) = (true, true);
        for w in (0..n).filter(|&w| g.has_edge(w, v)) {
            seen = true;
            all_pos &= c.0[w] == Tri::Pos;
            all_neg &= c.0[w] == Tri::Neg;
        }
        if !seen {
            return Err(Error::NoInNeighbors { vertex: v });
        }
        out.push(match (all_pos, all_neg) {
            (true, _) => Tri::Pos,
            (_, true) => Tri::Neg,
            _ => Tri::Zero,
        });
    }
    Ok(TriStateColoring(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TgOutcome {
    #[serde(rename = "final")]
    pub final_coloring: TriStateColoring,
    /// First step index at which the coloring was constant.
    pub steps_to_constant: Option<u64>,
    pub constant_value: Option<Tri>,
    pub steps_taken: u64,
}

/// `3^n`, saturating.
pub fn default_tg_cap(n: usize) -> u64 {
    u32::try_from(n)
        .ok()
        .and_then(|e| 3u64.checked_pow(e))
        .unwrap_or(u64::MAX)
}

/// Iterates [`tg_step`] from `c0` until the coloring is constant or
/// `max_steps` steps were taken (default `3^n`).
pub fn tg_stabilize(
    g: &Digraph,
    c0: &TriStateColoring,
    max_steps: Option<u64>,
) -> Result<TgOutcome> {
    let cap = max_steps.unwrap_or_else(|| default_tg_cap(g.n_vertices()));
    if cap == 0 {
        return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
    }
    if c0.len() != g.n_vertices() {
        return Err(Error::Shape {
            expected: g.n_vertices(),
            found: c0.len(),
        });
    }
    let mut current = c0.clone();
    let mut step = 0;
    loop {
        if let Some(t) = current.constant_value() {
            return Ok(TgOutcome {
                final_coloring: current,
                steps_to_constant: Some(step),
                constant_value: Some(t),
                steps_taken: step,
            });
        }
        if step == cap {
            return Ok(TgOutcome {
                final_coloring: current,
                steps_to_constant: None,
                constant_value: None,
                steps_taken: step,
            });
        }
        current = tg_step(g, &current)?;
        step += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::tests::cyclic_four;

    fn col(v: &[i8]) -> TriStateColoring {
        TriStateColoring::from_values(v).unwrap()
    }

    #[test]
    fn constants_are_fixed() {
        let g = cyclic_four();
        for t in [Tri::Neg, Tri::Zero, Tri::Pos] {
            let c = TriStateColoring::constant(4, t);
            assert_eq!(tg_step(&g, &c).unwrap(), c);
        }
    }

    #[test]
    fn single_peak_collapses_to_zero() {
        let g = cyclic_four();
        assert_eq!(tg_step(&g, &col(&[1, 0, 0, 0])).unwrap(), col(&[0, 0, 0, 0]));
    }

    #[test]
    fn empty_in_neighborhood_is_an_error() {
        let g = Digraph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(
            tg_step(&g, &col(&[1, 1])),
            Err(Error::NoInNeighbors { vertex: 0 })
        );
    }

    #[test]
    fn stabilize_constant_start() {
        let out = tg_stabilize(&cyclic_four(), &col(&[1, 1, 1, 1]), None).unwrap();
        assert_eq!(out.steps_to_constant, Some(0));
        assert_eq!(out.constant_value, Some(Tri::Pos));
    }

    #[test]
    fn stabilize_mixed_signs_goes_to_zero() {
        let out = tg_stabilize(&cyclic_four(), &col(&[1, -1, 1, 0]), None).unwrap();
        assert_eq!(out.constant_value, Some(Tri::Zero));
        assert!(out.steps_to_constant.unwrap() <= 81);
    }

    #[test]
    fn bipartite_graph_flips_forever() {
        let mut g = Digraph::new(4).unwrap();
        for (row, srcs) in [[2, 3], [2, 3], [0, 1], [0, 1]].iter().enumerate() {
            for &s in srcs {
                g.add_edge(s, row).unwrap();
            }
        }
        let c0 = col(&[1, 1, -1, -1]);
        let c1 = tg_step(&g, &c0).unwrap();
        assert_eq!(c1, col(&[-1, -1, 1, 1]));
        assert_eq!(tg_step(&g, &c1).unwrap(), c0);
        let out = tg_stabilize(&g, &c0, None).unwrap();
        assert_eq!(out.steps_to_constant, None);
        assert_eq!(out.steps_taken, 81);
        // 81 is odd, so the final coloring is the flipped one
        assert_eq!(out.final_coloring, c1);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(TriStateColoring::from_values(&[2]).is_err());
        assert!(tg_stabilize(&cyclic_four(), &col(&[1]), None).is_err());
        assert!(tg_stabilize(&cyclic_four(), &col(&[1, 0, 0, 0]), Some(0)).is_err());
    }
}
