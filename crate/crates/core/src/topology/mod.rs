//! Fullerene coupling graphs, their coupler-preserving automorphisms, and
//! the orbit partition those automorphisms induce on spin configurations.

mod automorphism;
mod builtin;
mod orbits;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spin::SpinConfig;

pub use automorphism::{automorphisms, AutomorphismGroup, Permutation};
pub use builtin::{build_graph, BuiltinGraph};
pub use orbits::{orbit_partition, OrbitPartition};

/// Dimensionless Ising coupling `J_ij`, restricted to `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coupling(i8);

impl Coupling {
    /// `J = +1`.
    pub const ANTIFERRO: Coupling = Coupling(1);
    /// `J = -1`.
    pub const FERRO: Coupling = Coupling(-1);

    pub fn new(value: i64) -> Result<Self> {
        match value {
            1 => Ok(Self::ANTIFERRO),
            -1 => Ok(Self::FERRO),
            _ => Err(Error::InvalidGraph(String::from("coupling must be ±1"))),
        }
    }

    #[inline]
    pub const fn value(self) -> i32 {
        self.0 as i32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub coupling: Coupling,
    pub class: String,
}

impl Edge {
    /// Builds an edge with endpoints stored as `u < v`.
    pub fn new(a: usize, b: usize, coupling: Coupling, class: impl Into<String>) -> Self {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, coupling, class: class.into() }
    }

    #[inline]
    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// One slot of a vertex's incidence list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Incident {
    pub neighbor: usize,
    pub edge: usize,
    pub coupling: Coupling,
}

/// Connected cubic graph with a `±1` coupling and a class label per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullereneGraph {
    n: usize,
    edges: Vec<Edge>,
    incidence: Vec<[Incident; 3]>,
}

impl FullereneGraph {
    /// Validates the edge list: endpoints in range, no loops or duplicate
    /// edges, every vertex of degree exactly three, connected.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph(String::from("graph has no vertices")));
        }
        let mut lists: Vec<Vec<Incident>> = vec![Vec::new(); n];
        let mut seen = alloc::collections::BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a vertex outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.u)));
            }
            if e.u > e.v {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) is not stored with u < v",
                    e.u, e.v
                )));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            lists[e.u].push(Incident { neighbor: e.v, edge: k, coupling: e.coupling });
            lists[e.v].push(Incident { neighbor: e.u, edge: k, coupling: e.coupling });
        }
        let mut incidence = Vec::with_capacity(n);
        for (v, list) in lists.into_iter().enumerate() {
            let degree = list.len();
            let slots: [Incident; 3] = list.try_into().map_err(|_| {
                Error::InvalidGraph(format!("vertex {v} has degree {degree}"))
            })?;
            incidence.push(slots);
        }
        let graph = FullereneGraph { n, edges, incidence };
        if !graph.is_connected() {
            return Err(Error::InvalidGraph(String::from("graph is not connected")));
        }
        Ok(graph)
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn incident(&self, v: usize) -> &[Incident; 3] {
        &self.incidence[v]
    }

    pub fn neighbors(&self, v: usize) -> [usize; 3] {
        self.incidence[v].map(|i| i.neighbor)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.incidence
            .get(a)?
            .iter()
            .find(|i| i.neighbor == b)
            .map(|i| i.edge)
    }

    /// Distinct class names in first-appearance order, and the class index
    /// of every edge.
    pub fn class_ids(&self) -> (Vec<String>, Vec<usize>) {
        let mut names: Vec<String> = Vec::new();
        let ids = self
            .edges
            .iter()
            .map(|e| match names.iter().position(|c| *c == e.class) {
                Some(i) => i,
                None => {
                    names.push(e.class.clone());
                    names.len() - 1
                }
            })
            .collect();
        (names, ids)
    }

    pub fn check_config(&self, c: SpinConfig) -> Result<()> {
        if self.n <= 64 && c.fits(self.n) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch { config: c.bits(), n: self.n })
        }
    }

    /// SHA-256 over a canonical rendering of vertex count, edges, signs and
    /// classes.
    pub fn digest(&self) -> [u8; 32] {
        let mut text = String::new();
        let _ = writeln!(text, "fullersim-graph v1\nn {}", self.n);
        for e in &self.edges {
            let _ = writeln!(text, "{} {} {:+} {}", e.u, e.v, e.coupling.value(), e.class);
        }
        Sha256::digest(text.as_bytes()).into()
    }

    /// Renders the graph in the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {:+} {}", e.u, e.v, e.coupling.value(), e.class);
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for inc in &self.incidence[v] {
                if !seen[inc.neighbor] {
                    seen[inc.neighbor] = true;
                    count += 1;
                    queue.push_back(inc.neighbor);
                }
            }
        }
        count == self.n
    }

    /// Vertices in breadth-first order from vertex 0, neighbours visited in
    /// ascending index order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next = self.neighbors(v);
            next.sort_unstable();
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    pub(crate) fn labelled_adjacency(&self) -> automorphism::LabelledGraph {
        let (_, class) = self.class_ids();
        let adjacency = (0..self.n)
            .map(|v| {
                self.incidence[v]
                    .iter()
                    .map(|inc| (inc.neighbor, (inc.coupling.value(), class[inc.edge])))
                    .collect()
            })
            .collect();
        automorphism::LabelledGraph { adjacency }
    }
}

impl core::fmt::Display for FullereneGraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} vertices, {} edges", self.n, self.edges.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(a: usize, b: usize) -> Edge {
        Edge::new(a, b, Coupling::ANTIFERRO, "edge")
    }

    #[test]
    fn rejects_degree_two_vertex() {
        // K4 minus one edge: vertices 0 and 1 keep degree 2.
        let edges = vec![edge(0, 2), edge(0, 3), edge(1, 2), edge(1, 3), edge(2, 3)];
        let err = FullereneGraph::new(4, edges).unwrap_err();
        assert_eq!(err, Error::InvalidGraph("vertex 0 has degree 2".into()));
    }

    #[test]
    fn rejects_duplicates_and_dangling_indices() {
        let dup = vec![edge(0, 1), edge(0, 1)];
        assert!(matches!(FullereneGraph::new(4, dup), Err(Error::InvalidGraph(m)) if m.contains("duplicate")));
        let dangling = vec![edge(0, 7)];
        assert!(matches!(FullereneGraph::new(4, dangling), Err(Error::InvalidGraph(m)) if m.contains("outside")));
    }

    #[test]
    fn accepts_k4_and_rejects_disconnected() {
        let k4 = vec![edge(0, 1), edge(0, 2), edge(0, 3), edge(1, 2), edge(1, 3), edge(2, 3)];
        let g = FullereneGraph::new(4, k4.clone()).unwrap();
        assert_eq!(g.n_edges(), 6);
        let mut two = k4.clone();
        two.extend(k4.iter().map(|e| edge(e.u + 4, e.v + 4)));
        assert!(matches!(FullereneGraph::new(8, two), Err(Error::InvalidGraph(m)) if m.contains("connected")));
    }

    #[test]
    fn coupling_domain() {
        assert!(Coupling::new(0).is_err());
        assert_eq!(Coupling::new(-1).unwrap(), Coupling::FERRO);
    }

    #[test]
    fn digest_sees_signs_and_classes() {
        let g = build_graph("c60_afm").unwrap();
        let h = build_graph("c60_mixed").unwrap();
        assert_ne!(g.digest(), h.digest());
        assert_eq!(g.digest(), build_graph("c60_afm").unwrap().digest());
    }
}
