//! Directed graphs on `{0, .., n-1}`: strong connectivity, period, the
//! uniform walk length of an ergodic graph, and the tri-state dynamics.

use alloc::vec;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub mod brute;
mod census;
mod tristate;

pub use census::{all_digraphs, classify_all_small_graphs, Census, CensusMismatch, CENSUS_MAX_VERTICES};
pub use tristate::{default_tg_cap, tg_stabilize, tg_step, TgOutcome, Tri, TriStateColoring};

/// A digraph stored as a dense adjacency matrix. Loops are allowed and
/// parallel edges collapse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("a digraph needs at least one vertex".into()));
        }
        Ok(Self {
            n,
            adj: vec![false; n * n],
        })
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n)?;
        for (from, to) in edges {
            g.add_edge(from, to)?;
        }
        Ok(g)
    }

    /// Graph whose edge `(i, j)` is present iff bit `i * n + j` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n * n > 64 {
            return Err(Error::InvalidParameter("from_bits needs 1 <= n <= 8".into()));
        }
        Ok(Self {
            n,
            adj: (0..n * n).map(|k| bits >> k & 1 == 1).collect(),
        })
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        if from >= self.n || to >= self.n {
            return Err(Error::InvalidParameter(alloc::format!(
                "edge ({from}, {to}) leaves the vertex set 0..{}",
                self.n
            )));
        }
        self.adj[from * self.n + to] = true;
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from * self.n + to]
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (0..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn edges_one_based(&self) -> Vec<[usize; 2]> {
        self.edges().into_iter().map(|(u, v)| [u + 1, v + 1]).collect()
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.has_edge(w, v)).collect()
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.has_edge(v, w)).collect()
    }

    /// Strongly connected components (Tarjan), each sorted, in reverse
    /// topological order of the condensation.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        const UNSEEN: usize = usize::MAX;
        let n = self.n;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0;
        // explicit call stack of (vertex, next candidate successor)
        let mut calls: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            calls.push((root, 0));

            while let Some(&(v, pos)) = calls.last() {
                let mut descend = None;
                let mut w = pos;
                while w < n {
                    if self.has_edge(v, w) {
                        if index[w] == UNSEEN {
                            descend = Some(w);
                            break;
                        } else if on_stack[w] {
                            low[v] = low[v].min(index[w]);
                        }
                    }
                    w += 1;
                }
                if let Some(w) = descend {
                    calls.last_mut().unwrap().1 = w + 1;
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
        comps
    }

    /// Every ordered pair `(v, w)`, including `v == w`, is joined by a walk
    /// of length at least one. A single loopless vertex is not irreducible.
    pub fn is_irreducible(&self) -> bool {
        let comps = self.strongly_connected_components();
        comps.len() == 1 && (self.n > 1 || self.has_edge(0, 0))
    }

    /// Gcd of the lengths of all cycles, `None` for an acyclic graph.
    pub fn period(&self) -> Option<usize> {
        self.strongly_connected_components()
            .iter()
            .map(|comp| self.component_period(comp))
            .filter(|&g| g > 0)
            .reduce(gcd)
    }

    /// Gcd of `level(u) + 1 - level(v)` over the edges inside one strongly
    /// connected component, levels taken from a BFS within it. Zero when
    /// the component carries no edge.
    fn component_period(&self, comp: &[usize]) -> usize {
        let mut member = vec![false; self.n];
        for &v in comp {
            member[v] = true;
        }
        let mut level = vec![usize::MAX; self.n];
        let mut queue = alloc::collections::VecDeque::new();
        level[comp[0]] = 0;
        queue.push_back(comp[0]);
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                if member[v] && self.has_edge(u, v) && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0;
        for &u in comp {
            for &v in comp {
                if self.has_edge(u, v) {
                    g = gcd(g, (level[u] + 1).abs_diff(level[v]));
                }
            }
        }
        g
    }

    /// Irreducibility, period and, for ergodic graphs, the uniform walk length.
    pub fn classify(&self) -> GraphClassification {
        let irreducible = self.is_irreducible();
        let period = self.period();
        let aperiodic = period == Some(1);
        let ergodic = irreducible && aperiodic;
        let uniform_walk_length = if ergodic {
            self.uniform_walk_length().ok()
        } else {
            None
        };
        GraphClassification {
            irreducible,
            period,
            aperiodic,
            ergodic,
            uniform_walk_length,
        }
    }

    pub fn is_ergodic(&self) -> bool {
        self.is_irreducible() && self.period() == Some(1)
    }

    /// Bound `(n-1)^2 + 1` on the exponent of a primitive matrix.
    pub fn wielandt_bound(&self) -> usize {
        (self.n - 1) * (self.n - 1) + 1
    }

    /// The least `q0` such that every ordered pair is joined by a walk of
    /// every length `q >= q0`.
    ///
    /// Boolean powers of the adjacency matrix are taken until one is all
    /// ones; every column of an irreducible matrix is nonzero, so all later
    /// powers stay all ones.
    pub fn uniform_walk_length(&self) -> Result<usize> {
        if !self.is_ergodic() {
            return Err(Error::NotErgodic);
        }
        let n = self.n;
        let cap = self.wielandt_bound();
        let mut power = self.adj.clone();
        for q in 1..=cap {
            if power.iter().all(|&b| b) {
                return Ok(q);
            }
            power = bool_mat_mul(&power, &self.adj, n);
        }
        Err(Error::WalkLengthCap { cap })
    }
}

fn bool_mat_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Serialize for Digraph {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Digraph", 2)?;
        st.serialize_field("n_vertices", &self.n)?;
        st.serialize_field("edges", &self.edges_one_based())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphClassification {
    pub irreducible: bool,
    pub period: Option<usize>,
    pub aperiodic: bool,
    pub ergodic: bool,
    pub uniform_walk_length: Option<usize>,
}
