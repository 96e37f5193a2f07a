//! Conflict graphs and the combinatorial structures the relaxations need.

mod cliques;
mod cover;
mod holes;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use cliques::{maximal_cliques, maximal_cliques_limited, CliqueList, DEFAULT_CLIQUE_LIMIT};
pub use cover::{approx_min_vertex_cover, feasible_cover_partition, CoverPartition};
pub use holes::{is_chordless_cycle, odd_antiholes, odd_holes, DEFAULT_MAX_HOLE_LEN};

/// A simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<Vec<usize>>,
    num_edges: usize,
}

impl ConflictGraph {
    /// Builds a graph from an edge list. Repeated edges are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidModel(format!("edge ({i}, {j}) out of range for {n} nodes")));
            }
            if i == j {
                return Err(Error::InvalidModel(format!("loop edge at node {i}")));
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut num_edges = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            num_edges += list.len();
        }
        Ok(ConflictGraph { adj, num_edges: num_edges / 2 })
    }

    pub fn empty(n: usize) -> Self {
        ConflictGraph { adj: vec![Vec::new(); n], num_edges: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
        ConflictGraph { adj, num_edges: n * n.saturating_sub(1) / 2 }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle edges are in range")
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (i, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Nodes with at least one neighbor.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&i| !self.adj[i].is_empty()).collect()
    }

    /// Sorted union of the neighborhoods of `nodes`.
    pub fn neighborhood_of(&self, nodes: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = nodes.iter().flat_map(|&i| self.adj[i].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_vertex_cover(&self, nodes: &[usize]) -> bool {
        self.uncovered_edge(nodes).is_none()
    }

    pub(crate) fn uncovered_edge(&self, nodes: &[usize]) -> Option<(usize, usize)> {
        let mut inside = vec![false; self.num_nodes()];
        for &i in nodes {
            if i < inside.len() {
                inside[i] = true;
            }
        }
        self.edges().into_iter().find(|&(i, j)| !inside[i] && !inside[j])
    }

    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(k, &i)| nodes[k + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    pub fn is_stable(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(k, &i)| nodes[k + 1..].iter().all(|&j| !self.has_edge(i, j)))
    }

    pub fn complement(&self) -> ConflictGraph {
        let n = self.num_nodes();
        let mut adj = Vec::with_capacity(n);
        let mut num_edges = 0;
        for i in 0..n {
            let list: Vec<usize> = (0..n).filter(|&j| j != i && !self.has_edge(i, j)).collect();
            num_edges += list.len();
            adj.push(list);
        }
        ConflictGraph { adj, num_edges: num_edges / 2 }
    }

    /// Induced subgraph on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> ConflictGraph {
        let mut edges = Vec::new();
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate().skip(a + 1) {
                if self.has_edge(i, j) {
                    edges.push((a, b));
                }
            }
        }
        ConflictGraph::new(nodes.len(), &edges).expect("induced edges are in range")
    }

    /// Graphviz rendering with 1-based node labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph conflict {\n");
        for i in 0..self.num_nodes() {
            let _ = writeln!(s, "  {};", i + 1);
        }
        for (i, j) in self.edges() {
            let _ = writeln!(s, "  {} -- {};", i + 1, j + 1);
        }
        s.push_str("}\n");
        s
    }
}

/// Samples pairs `i < j` in lexicographic order, keeping each with probability `rho`.
pub fn erdos_renyi_edges<R: Rng>(n: usize, rho: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < rho {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// G(n, rho) drawn from a ChaCha8 stream seeded with `seed`.
pub fn erdos_renyi(n: usize, rho: f64, seed: u64) -> ConflictGraph {
    assert!((0.0..=1.0).contains(&rho), "edge probability must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = erdos_renyi_edges(n, rho, &mut rng);
    ConflictGraph::new(n, &edges).expect("sampled edges are in range")
}
