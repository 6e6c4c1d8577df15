//! Undirected simple graphs and the assortativity coefficient.
//!
//! All degree sums are accumulated as integers; the only floating point
//! step is the final division that produces `r`.

use std::collections::HashMap;
use std::fmt;

use crate::error::GraphError;

/// Dense node identifier, `0..node_count`.
pub type NodeId = u32;

/// An undirected edge stored with its lower endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(pub NodeId, pub NodeId);

impl Edge {
    /// Canonical form of the unordered pair `{u, v}`.
    #[inline]
    pub fn new(u: NodeId, v: NodeId) -> Self {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    #[inline]
    pub fn contains(&self, node: NodeId) -> bool {
        self.0 == node || self.1 == node
    }

    #[inline]
    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        self.contains(other.0) || self.contains(other.1)
    }

    #[inline]
    fn key(&self) -> u64 {
        ((self.0 as u64) << 32) | self.1 as u64
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Undirected simple graph over dense node ids.
///
/// `edges` keeps insertion order (removal swaps the last edge into the
/// hole), `adjacency` keeps each neighbor list sorted.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    position: HashMap<u64, usize>,
    adjacency: Vec<Vec<NodeId>>,
    degree: Vec<u32>,
}

/// The three edge sums that make up the assortativity coefficient.
///
/// The half-sums are stored doubled so every field is an exact integer:
/// `sum_plus = Σ (j + k)` and `sum_sq = Σ (j² + k²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssortativitySums {
    pub sum_jk: i128,
    pub sum_plus: i128,
    pub sum_sq: i128,
    pub edge_count: u64,
}

impl AssortativitySums {
    /// `Σ ½(j + k)`.
    pub fn sum_half_plus(&self) -> f64 {
        self.sum_plus as f64 / 2.0
    }

    /// `Σ ½(j² + k²)`.
    pub fn sum_half_sq(&self) -> f64 {
        self.sum_sq as f64 / 2.0
    }

    /// Assortativity with `sum_jk` replaced by `sum_jk + delta`.
    ///
    /// Multiplying numerator and denominator by `4M²` keeps everything in
    /// integers: `num = 4M·p' − S₁²`, `den = 2M·S₂ − S₁²` where `S₁` and
    /// `S₂` are the doubled sums.
    pub fn r_with_delta(&self, delta: i64) -> Result<f64, GraphError> {
        if self.edge_count == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let m = self.edge_count as i128;
        let p = self.sum_jk + delta as i128;
        let plus_sq = self.sum_plus * self.sum_plus;
        let den = 2 * m * self.sum_sq - plus_sq;
        if den == 0 {
            return Err(GraphError::DegenerateDegrees);
        }
        let num = 4 * m * p - plus_sq;
        Ok(num as f64 / den as f64)
    }

    pub fn assortativity(&self) -> Result<f64, GraphError> {
        self.r_with_delta(0)
    }
}

impl Graph {
    /// A graph with `node_count` isolated nodes.
    pub fn with_nodes(node_count: usize) -> Self {
        Graph {
            node_count,
            edges: Vec::new(),
            position: HashMap::new(),
            adjacency: vec![Vec::new(); node_count],
            degree: vec![0; node_count],
        }
    }

    /// Builds a graph from node-id pairs. The node count is one past the
    /// largest id seen.
    pub fn from_edges<I>(edge_list: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let pairs: Vec<(NodeId, NodeId)> = edge_list.into_iter().collect();
        let n = pairs
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::from_edges_with_nodes(n, pairs)
    }

    /// Like [`Graph::from_edges`] but with an explicit node count, which
    /// allows trailing isolated nodes.
    pub fn from_edges_with_nodes<I>(node_count: usize, edge_list: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Graph::with_nodes(node_count);
        for (u, v) in edge_list {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(GraphError::NodeOutOfRange(u.max(v)));
            }
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges in lexicographic order.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> u32 {
        self.degree[u as usize]
    }

    #[inline]
    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    /// Sorted neighbor list of `u`.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u as usize]
    }

    /// Degree sequence sorted ascending.
    pub fn degree_sequence(&self) -> Vec<u32> {
        let mut seq = self.degree.clone();
        seq.sort_unstable();
        seq
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.node_count as f64
        }
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree[u as usize] <= self.degree[v as usize] {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    #[inline]
    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.0, e.1)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u as usize >= self.node_count || v as usize >= self.node_count {
            return Err(GraphError::NodeOutOfRange(u.max(v)));
        }
        let e = Edge::new(u, v);
        if self.position.contains_key(&e.key()) {
            return Err(GraphError::DuplicateEdge(e.0, e.1));
        }
        self.position.insert(e.key(), self.edges.len());
        self.edges.push(e);
        for (a, b) in [(e.0, e.1), (e.1, e.0)] {
            let list = &mut self.adjacency[a as usize];
            let at = list.binary_search(&b).unwrap_err();
            list.insert(at, b);
            self.degree[a as usize] += 1;
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        let e = Edge::new(u, v);
        let idx = self
            .position
            .remove(&e.key())
            .ok_or(GraphError::MissingEdge(e.0, e.1))?;
        self.edges.swap_remove(idx);
        if let Some(moved) = self.edges.get(idx) {
            self.position.insert(moved.key(), idx);
        }
        for (a, b) in [(e.0, e.1), (e.1, e.0)] {
            let list = &mut self.adjacency[a as usize];
            let at = list
                .binary_search(&b)
                .expect("adjacency out of sync with edge set");
            list.remove(at);
            self.degree[a as usize] -= 1;
        }
        Ok(())
    }

    /// `p = Σ j·k` over all edges.
    pub fn degree_product_sum(&self) -> i64 {
        self.edges
            .iter()
            .map(|e| self.degree(e.0) as i64 * self.degree(e.1) as i64)
            .sum()
    }

    pub fn assortativity_sums(&self) -> Result<AssortativitySums, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut sums = AssortativitySums {
            sum_jk: 0,
            sum_plus: 0,
            sum_sq: 0,
            edge_count: self.edges.len() as u64,
        };
        for e in &self.edges {
            let j = self.degree(e.0) as i128;
            let k = self.degree(e.1) as i128;
            sums.sum_jk += j * k;
            sums.sum_plus += j + k;
            sums.sum_sq += j * j + k * k;
        }
        Ok(sums)
    }

    /// The assortativity coefficient `r`, or `DegenerateDegrees` when every
    /// edge joins nodes of identical degree and `r` is undefined.
    pub fn assortativity(&self) -> Result<f64, GraphError> {
        self.assortativity_sums()?.assortativity()
    }
}

/// Graphs compare equal when they have the same node count and edge set,
/// regardless of internal edge order.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.edges.len() == other.edges.len()
            && self.edges.iter().all(|&e| other.contains(e))
    }
}

impl Eq for Graph {}

#[cfg(test)]
mod tests {
    use super::*;

    fn star3() -> Graph {
        Graph::from_edges([(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn path4() -> Graph {
        Graph::from_edges([(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn path_of_three() {
        let g = Graph::from_edges([(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn rejects_reversed_duplicate() {
        let err = Graph::from_edges([(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge(0, 1));
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            Graph::from_edges([(0, 1), (2, 2)]).unwrap_err(),
            GraphError::SelfLoop(2)
        );
    }

    #[test]
    fn star_sums_and_r() {
        let s = star3().assortativity_sums().unwrap();
        assert_eq!(s.sum_jk, 9);
        assert_eq!(s.sum_half_plus(), 6.0);
        assert_eq!(s.sum_half_sq(), 15.0);
        assert_eq!(star3().assortativity().unwrap(), -1.0);
    }

    #[test]
    fn path_sums_and_r() {
        let s = path4().assortativity_sums().unwrap();
        assert_eq!(s.sum_jk, 8);
        assert_eq!(s.sum_half_plus(), 5.0);
        assert_eq!(s.sum_half_sq(), 9.0);
        // (8/3 - 25/9) / (3 - 25/9) = (-1/9) / (2/9)
        assert!((path4().assortativity().unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_is_degenerate() {
        let g = Graph::from_edges([(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = g.assortativity_sums().unwrap();
        assert_eq!(
            (s.sum_jk, s.sum_half_plus(), s.sum_half_sq()),
            (12, 6.0, 12.0)
        );
        assert_eq!(g.assortativity(), Err(GraphError::DegenerateDegrees));
    }

    #[test]
    fn empty_graph() {
        let g = Graph::with_nodes(4);
        assert_eq!(g.degree_product_sum(), 0);
        assert_eq!(g.assortativity_sums(), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn degree_product_sum_small() {
        assert_eq!(path4().degree_product_sum(), 8);
        assert_eq!(star3().degree_product_sum(), 9);
    }

    #[test]
    fn add_remove_inverse() {
        let start = path4();
        let mut g = start.clone();
        g.add_edge(3, 0).unwrap();
        assert!(g.has_edge(0, 3) && g.has_edge(3, 0));
        g.remove_edge(0, 3).unwrap();
        assert_eq!(g, start);
        assert_eq!(g.degrees(), start.degrees());
        assert_eq!(g.remove_edge(0, 3), Err(GraphError::MissingEdge(0, 3)));
    }

    #[test]
    fn remove_keeps_index_consistent() {
        let mut g = Graph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        g.remove_edge(0, 1).unwrap();
        for &e in g.clone().edges() {
            g.remove_edge(e.1, e.0).unwrap();
        }
        assert_eq!(g.edge_count(), 0);
        assert!(g.degrees().iter().all(|&d| d == 0));
    }

    #[test]
    fn isolated_nodes_count_but_do_not_contribute() {
        let g = Graph::from_edges_with_nodes(6, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.assortativity().unwrap(), path4().assortativity().unwrap());
    }
}
