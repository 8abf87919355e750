//! Exhaustive reference computations for small graphs.
//!
//! Nothing here shares code with the production algorithms: reachability
//! comes from enumerating walks, the period from enumerating simple cycles,
//! and the uniform walk length from propagating endpoint sets. Costs are
//! exponential, so keep `n` small.

use alloc::vec;
use alloc::vec::Vec;

use super::{gcd, Digraph};

/// `reach[v][w]`: some walk of length `1..=n` leads from `v` to `w`.
pub fn walk_reachability(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n_vertices();
    let mut reach = vec![vec![false; n]; n];
    for (start, row) in reach.iter_mut().enumerate() {
        // stack of (current vertex, walk length so far)
        let mut stack = vec![(start, 0usize)];
        while let Some((v, len)) = stack.pop() {
            if len == n {
                continue;
            }
            for w in 0..n {
                if g.has_edge(v, w) {
                    row[w] = true;
                    stack.push((w, len + 1));
                }
            }
        }
    }
    reach
}

/// Lengths of all simple cycles, loops included. Each cycle is found once,
/// from its smallest vertex.
pub fn simple_cycle_lengths(g: &Digraph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut lengths = Vec::new();
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        extend_cycles(g, start, &mut path, &mut on_path, &mut lengths);
    }
    lengths
}

fn extend_cycles(
    g: &Digraph,
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    lengths: &mut Vec<usize>,
) {
    let v = *path.last().unwrap();
    for w in start..g.n_vertices() {
        if !g.has_edge(v, w) {
            continue;
        }
        if w == start {
            lengths.push(path.len());
        } else if !on_path[w] {
            on_path[w] = true;
            path.push(w);
            extend_cycles(g, start, path, on_path, lengths);
            path.pop();
            on_path[w] = false;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteClassification {
    pub irreducible: bool,
    pub period: Option<usize>,
    pub aperiodic: bool,
    pub ergodic: bool,
}

pub fn classify(g: &Digraph) -> BruteClassification {
    let irreducible = walk_reachability(g).iter().all(|row| row.iter().all(|&b| b));
    let period = simple_cycle_lengths(g).into_iter().reduce(gcd);
    let aperiodic = period == Some(1);
    BruteClassification {
        irreducible,
        period,
        aperiodic,
        ergodic: irreducible && aperiodic,
    }
}

/// Least `q0` such that every length `q` in `q0..=horizon` joins every
/// ordered pair, or `None` when length `horizon` itself fails.
pub fn min_uniform_walk_length(g: &Digraph, horizon: usize) -> Option<usize> {
    let n = g.n_vertices();
    // full[q - 1]: all pairs joined by a walk of length exactly q
    let mut full = vec![true; horizon];
    for start in 0..n {
        let mut frontier = vec![false; n];
        frontier[start] = true;
        for ok in full.iter_mut() {
            let mut next = vec![false; n];
            for v in (0..n).filter(|&v| frontier[v]) {
                for w in 0..n {
                    if g.has_edge(v, w) {
                        next[w] = true;
                    }
                }
            }
            *ok &= next.iter().all(|&b| b);
            frontier = next;
        }
    }
    if !*full.last()? {
        return None;
    }
    let tail = full.iter().rev().take_while(|&&b| b).count();
    Some(horizon - tail + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_of_small_graphs() {
        let tri = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(simple_cycle_lengths(&tri), vec![3]);
        let two = Digraph::from_edges(2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        let mut l = simple_cycle_lengths(&two);
        l.sort();
        assert_eq!(l, vec![1, 2]);
    }

    #[test]
    fn walk_length_of_triangle_with_loop() {
        // cycle lengths 1 and 3; the pair 1 -> 2 has walks of lengths 1, 4, 5, ...
    // but not 2 or 3, so 4
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        assert_eq!(min_uniform_walk_length(&g, 20), Some(4));
    }
}
