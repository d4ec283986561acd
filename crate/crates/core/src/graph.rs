//! Extended weighted graph: internal nodes, typed edges and terminal labels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Attractive,
    Repulsive,
    /// Link from an internal node to the terminal of the given label.
    Semantic(u32),
}

impl EdgeKind {
    pub fn is_internal(self) -> bool {
        !matches!(self, EdgeKind::Semantic(_))
    }
}

/// A single edge. For semantic edges `u` is the internal endpoint and `v`
/// mirrors `u`; the terminal is carried by the kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub kind: EdgeKind,
    pub weight: f64,
}

impl Edge {
    pub fn attractive(u: u32, v: u32, weight: f64) -> Self {
        Edge { u, v, kind: EdgeKind::Attractive, weight }
    }

    pub fn repulsive(u: u32, v: u32, weight: f64) -> Self {
        Edge { u, v, kind: EdgeKind::Repulsive, weight }
    }

    pub fn semantic(u: u32, label: u32, weight: f64) -> Self {
        Edge { u, v: u, kind: EdgeKind::Semantic(label), weight }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge}: endpoint {node} out of range (graph has {num_nodes} nodes)")]
    OutOfRangeEndpoint { edge: usize, node: u32, num_nodes: usize },
    #[error("edge {edge}: weight {weight} is negative or not finite")]
    NegativeOrNonFiniteWeight { edge: usize, weight: f64 },
    #[error("edge {edge}: label {label} out of range (graph has {num_labels} labels)")]
    LabelOutOfRange { edge: usize, label: u32, num_labels: usize },
    #[error("edge {edge}: internal edge joins node {node} to itself")]
    SelfLoop { edge: usize, node: u32 },
    #[error("graph too large: {0} nodes or edges exceed the 32-bit index space")]
    TooLarge(usize),
}

/// Internal nodes `0..num_nodes`, terminals `0..num_labels`, and edges whose
/// ids are their positions in [`ExtendedGraph::edges`]. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedGraph {
    num_nodes: usize,
    num_labels: usize,
    edges: Vec<Edge>,
}

impl ExtendedGraph {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Copy of the graph with all semantic edges removed. Edge ids are
    /// renumbered; the returned map gives the original id of each kept edge.
    pub fn without_semantic(&self) -> (ExtendedGraph, Vec<usize>) {
        let mut kept = Vec::new();
        let mut edges = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if e.kind.is_internal() {
                kept.push(id);
                edges.push(*e);
            }
        }
        let g = ExtendedGraph { num_nodes: self.num_nodes, num_labels: self.num_labels, edges };
        (g, kept)
    }
}

/// Validates the edge list and assigns ids in input order.
pub fn build_graph(
    num_nodes: usize,
    num_labels: usize,
    edges: impl IntoIterator<Item = Edge>,
) -> Result<ExtendedGraph, GraphError> {
    if num_nodes > u32::MAX as usize || num_labels > u32::MAX as usize {
        return Err(GraphError::TooLarge(num_nodes.max(num_labels)));
    }
    let mut out: Vec<Edge> = Vec::new();
    for (id, mut e) in edges.into_iter().enumerate() {
        if !e.weight.is_finite() || e.weight < 0.0 {
            return Err(GraphError::NegativeOrNonFiniteWeight { edge: id, weight: e.weight });
        }
        // -0.0 would otherwise sort apart from 0.0
        e.weight += 0.0;
        if e.u as usize >= num_nodes {
            return Err(GraphError::OutOfRangeEndpoint { edge: id, node: e.u, num_nodes });
        }
        match e.kind {
            EdgeKind::Semantic(label) => {
                if label as usize >= num_labels {
                    return Err(GraphError::LabelOutOfRange { edge: id, label, num_labels });
                }
                e.v = e.u;
            }
            EdgeKind::Attractive | EdgeKind::Repulsive => {
                if e.v as usize >= num_nodes {
                    return Err(GraphError::OutOfRangeEndpoint { edge: id, node: e.v, num_nodes });
                }
                if e.u == e.v {
                    return Err(GraphError::SelfLoop { edge: id, node: e.u });
                }
            }
        }
        out.push(e);
    }
    if out.len() > u32::MAX as usize {
        return Err(GraphError::TooLarge(out.len()));
    }
    Ok(ExtendedGraph { num_nodes, num_labels, edges: out })
}

/// Edge ids sorted by weight, strongest first; equal weights keep ascending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrder(Vec<u32>);

impl EdgeOrder {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&id| id as usize)
    }

    /// Rank of every edge counted from the weakest (0) to the strongest.
    pub fn ranks(&self) -> Vec<u32> {
        let m = self.0.len();
        let mut ranks = vec![0u32; m];
        for (pos, &id) in self.0.iter().enumerate() {
            ranks[id as usize] = (m - 1 - pos) as u32;
        }
        ranks
    }
}

pub fn sort_edges(g: &ExtendedGraph) -> EdgeOrder {
    // Sorting runs on 8-byte words: a single-precision weight key above the
    // edge id. Non-negative floats order like their bit patterns, so the
    // complemented bits put the strongest first and the id settles ties.
    // Rounding to single precision is monotone, so the result is already
    // exact unless two different doubles share a key; those runs are
    // re-sorted on the full weight.
    let mut exact = true;
    let mut keys: Vec<u64> = g
        .edges
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let single = e.weight as f32;
            exact &= single as f64 == e.weight;
            (u64::from(!single.to_bits()) << 32) | id as u64
        })
        .collect();
    keys.sort_unstable();
    let mut ids: Vec<u32> = keys.iter().map(|&k| k as u32).collect();
    if !exact {
        let mut start = 0;
        while start < keys.len() {
            let mut end = start + 1;
            while end < keys.len() && keys[end] >> 32 == keys[start] >> 32 {
                end += 1;
            }
            if end - start > 1 {
                ids[start..end].sort_unstable_by_key(|&id| (!g.edges[id as usize].weight.to_bits(), id));
            }
            start = end;
        }
    }
    EdgeOrder(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weighted(ws: &[f64]) -> ExtendedGraph {
        let edges = ws.iter().enumerate().map(|(i, &w)| Edge::attractive(i as u32, i as u32 + 1, w));
        build_graph(ws.len() + 1, 0, edges).unwrap()
    }

    #[test]
    fn empty_graph() {
        let g = build_graph(2, 0, []).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.num_nodes(), 2);
        assert!(sort_edges(&g).is_empty());
    }

    #[test]
    fn singleton_graph() {
        let g = build_graph(2, 1, [Edge::attractive(0, 1, 0.9)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.edge(0), &Edge::attractive(0, 1, 0.9));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            build_graph(3, 2, [Edge::attractive(0, 1, -0.1)]),
            Err(GraphError::NegativeOrNonFiniteWeight { edge: 0, weight: -0.1 })
        );
        assert!(matches!(
            build_graph(3, 2, [Edge::repulsive(0, 1, f64::NAN)]),
            Err(GraphError::NegativeOrNonFiniteWeight { .. })
        ));
        assert!(matches!(
            build_graph(3, 2, [Edge::attractive(0, 3, 0.5)]),
            Err(GraphError::OutOfRangeEndpoint { node: 3, .. })
        ));
        assert!(matches!(
            build_graph(3, 2, [Edge::semantic(0, 2, 0.5)]),
            Err(GraphError::LabelOutOfRange { label: 2, .. })
        ));
        assert!(matches!(build_graph(3, 2, [Edge::repulsive(1, 1, 0.5)]), Err(GraphError::SelfLoop { node: 1, .. })));
    }

    #[test]
    fn parallel_edges_are_kept() {
        let g = build_graph(2, 0, [Edge::attractive(0, 1, 0.5), Edge::attractive(1, 0, 0.5)]).unwrap();
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn sort_examples() {
        assert_eq!(sort_edges(&weighted(&[0.1, 0.9, 0.5])).as_slice(), &[1, 2, 0]);
        assert_eq!(sort_edges(&weighted(&[0.5, 0.5])).as_slice(), &[0, 1]);
    }

    #[test]
    fn negative_zero_ties_with_zero() {
        let g = weighted(&[0.0, -0.0, 0.0]);
        assert_eq!(sort_edges(&g).as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn doubles_sharing_a_single_precision_key() {
        let ws = [0.1, 0.1 + 1e-12, 0.1 - 1e-12, 0.1, 1e300, 1e-300, 0.0];
        assert_eq!(sort_edges(&weighted(&ws)).as_slice(), &[4, 1, 0, 3, 2, 5, 6]);
    }

    #[test]
    fn ranks_count_from_weakest() {
        let order = sort_edges(&weighted(&[0.1, 0.9, 0.5]));
        assert_eq!(order.ranks(), vec![0, 2, 1]);
    }

    proptest! {
        #[test]
        fn sort_is_descending_permutation(ws in proptest::collection::vec(prop_oneof![0.0f64..1.0, Just(0.5), Just(0.0), (0u32..8).prop_map(|k| 0.25 + k as f64 * 1e-15), 0.0f64..1e30], 0..64)) {
            let g = weighted(&ws);
            let order = sort_edges(&g);
            let mut seen = vec![false; ws.len()];
            for id in order.iter() {
                prop_assert!(!seen[id]);
                seen[id] = true;
            }
            prop_assert!(seen.iter().all(|&s| s));
            for pair in order.as_slice().windows(2) {
                let (a, b) = (pair[0] as usize, pair[1] as usize);
                prop_assert!(ws[a] > ws[b] || (ws[a] == ws[b] && a < b));
            }
        }
    }
}
