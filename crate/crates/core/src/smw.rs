//! The Semantic Mutex Watershed: greedy edge processing over a union-find
//! cluster state with mutex constraints and per-cluster labels.

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::graph::{sort_edges, Edge, EdgeKind, EdgeOrder, ExtendedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmwError {
    #[error("clusters of nodes {0} and {1} are mutually exclusive")]
    MutexViolation(u32, u32),
    #[error("cluster labels {0} and {1} conflict")]
    LabelConflict(u32, u32),
    #[error("nodes {0} and {1} are already connected")]
    AlreadyConnected(u32, u32),
    #[error("mutex watershed accepts at most one label, graph has {0}")]
    TooManyLabels(usize),
}

const NONE: u32 = u32::MAX;

#[inline(always)]
fn prefetch<T>(_x: &T) {
    // SAFETY: a prefetch is a cache hint on a valid reference; it never
    // faults and has no observable effect. SSE is part of the x86_64 baseline.
    #[cfg(target_arch = "x86_64")]
    unsafe {
        std::arch::x86_64::_mm_prefetch::<{ std::arch::x86_64::_MM_HINT_T0 }>((_x as *const T).cast());
    }
}

/// Everything the greedy loop touches for one node, packed so that a root
/// lookup costs a single cache line.
#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    size: u32,
    /// Label of the cluster when this node is its root, else `NONE`.
    label: u32,
    /// Slot in the partner-list pool, `NONE` while the root has no mutex.
    partners: u32,
}

/// Union-find forest over internal nodes, with a mutex table keyed by root
/// and an optional label per root.
///
/// Mutually exclusive root pairs live in one hash set, so a check is a
/// single probe. A root with mutexes also owns a partner list, used only to
/// re-key its pairs when a merge absorbs it. Lists may hold stale node ids
/// and duplicates; stale ids resolve to their current root through `find`.
#[derive(Debug, Clone)]
pub struct ClusterState {
    nodes: Vec<Node>,
    pairs: FxHashSet<u64>,
    lists: Vec<Vec<u32>>,
    free: Vec<u32>,
}

fn pair_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    (u64::from(lo) << 32) | u64::from(hi)
}

impl ClusterState {
    pub fn new(num_nodes: usize) -> Self {
        ClusterState {
            nodes: (0..num_nodes as u32).map(|i| Node { parent: i, size: 1, label: NONE, partners: NONE }).collect(),
            pairs: FxHashSet::default(),
            lists: Vec::new(),
            free: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn find(&mut self, mut i: u32) -> u32 {
        // path halving
        loop {
            let p = self.nodes[i as usize].parent;
            if p == i {
                return i;
            }
            let grand = self.nodes[p as usize].parent;
            self.nodes[i as usize].parent = grand;
            i = grand;
        }
    }

    fn prefetch_node(&self, i: u32) {
        prefetch(&self.nodes[i as usize]);
    }

    /// Assumes `i` was prefetched earlier; pulls in its parent, which after
    /// path halving is usually the root.
    fn prefetch_parent(&self, i: u32) {
        prefetch(&self.nodes[self.nodes[i as usize].parent as usize]);
    }

    /// Root lookup without path compression.
    pub fn root(&self, mut i: u32) -> u32 {
        while self.nodes[i as usize].parent != i {
            i = self.nodes[i as usize].parent;
        }
        i
    }

    pub fn connected(&mut self, i: u32, j: u32) -> bool {
        self.find(i) == self.find(j)
    }

    pub fn mutex(&mut self, i: u32, j: u32) -> bool {
        let (ri, rj) = (self.find(i), self.find(j));
        self.roots_mutex(ri, rj)
    }

    fn list_mut(&mut self, root: u32) -> &mut Vec<u32> {
        let slot = match self.nodes[root as usize].partners {
            NONE => {
                let slot = self.free.pop().unwrap_or_else(|| {
                    self.lists.push(Vec::new());
                    self.lists.len() as u32 - 1
                });
                self.nodes[root as usize].partners = slot;
                slot
            }
            slot => slot,
        };
        &mut self.lists[slot as usize]
    }

    fn roots_mutex(&self, ri: u32, rj: u32) -> bool {
        self.nodes[ri as usize].partners != NONE
            && self.nodes[rj as usize].partners != NONE
            && self.pairs.contains(&pair_key(ri, rj))
    }

    fn label_of_root(&self, root: u32) -> Option<u32> {
        match self.nodes[root as usize].label {
            NONE => None,
            l => Some(l),
        }
    }

    pub fn class_of(&mut self, i: u32) -> Option<u32> {
        let r = self.find(i);
        self.label_of_root(r)
    }

    pub fn merge(&mut self, i: u32, j: u32) -> Result<(), SmwError> {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri == rj {
            return Ok(());
        }
        if self.roots_mutex(ri, rj) {
            return Err(SmwError::MutexViolation(i, j));
        }
        let label = match (self.label_of_root(ri), self.label_of_root(rj)) {
            (Some(a), Some(b)) if a != b => return Err(SmwError::LabelConflict(a, b)),
            (a, b) => a.or(b),
        };
        self.link_roots(ri, rj, label);
        Ok(())
    }

    /// Joins two distinct, non-exclusive roots; the caller has checked the
    /// guards.
    fn link_roots(&mut self, ri: u32, rj: u32, label: Option<u32>) {
        let (big, small) =
            if self.nodes[ri as usize].size >= self.nodes[rj as usize].size { (ri, rj) } else { (rj, ri) };
        let small_node = self.nodes[small as usize];
        self.nodes[small as usize] = Node { parent: big, size: small_node.size, label: NONE, partners: NONE };
        let b = &mut self.nodes[big as usize];
        b.size += small_node.size;
        b.label = label.unwrap_or(NONE);
        let big_slot = b.partners;

        let small_slot = small_node.partners;
        if small_slot == NONE {
            return;
        }
        let mut moved = std::mem::take(&mut self.lists[small_slot as usize]);
        for &x in &moved {
            let p = self.find(x);
            debug_assert!(p != small && p != big, "a cluster cannot be exclusive with itself");
            // duplicates and already re-keyed entries find nothing to remove
            if self.pairs.remove(&pair_key(small, p)) {
                self.pairs.insert(pair_key(big, p));
            }
        }
        if big_slot == NONE {
            self.lists[small_slot as usize] = moved;
            self.nodes[big as usize].partners = small_slot;
            return;
        }
        let mut kept = std::mem::take(&mut self.lists[big_slot as usize]);
        if moved.len() > kept.len() {
            std::mem::swap(&mut moved, &mut kept);
        }
        kept.extend_from_slice(&moved);
        moved.clear();
        self.lists[big_slot as usize] = kept;
        // the emptied list keeps its allocation for reuse
        self.lists[small_slot as usize] = moved;
        self.free.push(small_slot);
    }

    fn insert_mutex_roots(&mut self, ri: u32, rj: u32) {
        if self.pairs.insert(pair_key(ri, rj)) {
            self.list_mut(ri).push(rj);
            self.list_mut(rj).push(ri);
        }
    }

    pub fn add_mutex(&mut self, i: u32, j: u32) -> Result<(), SmwError> {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri == rj {
            return Err(SmwError::AlreadyConnected(i, j));
        }
        self.insert_mutex_roots(ri, rj);
        Ok(())
    }

    pub fn assign_class(&mut self, i: u32, label: u32) -> Result<(), SmwError> {
        let r = self.find(i) as usize;
        match self.nodes[r].label {
            NONE => {
                self.nodes[r].label = label;
                Ok(())
            }
            l if l != label => Err(SmwError::LabelConflict(l, label)),
            _ => Ok(()),
        }
    }

    /// Number of entries in the mutex table (unordered root pairs).
    pub fn mutex_count(&self) -> usize {
        self.pairs.len()
    }

    /// Structural checks: only roots carry labels and partner lists, every
    /// mutex pair joins two roots whose lists reach each other, and no list
    /// slot is shared.
    pub fn check_invariants(&self) -> bool {
        let mut slot_used = vec![false; self.lists.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.parent != i as u32 {
                if node.partners != NONE || node.label != NONE {
                    return false;
                }
            } else if node.partners != NONE && std::mem::replace(&mut slot_used[node.partners as usize], true) {
                return false;
            }
        }
        let lists_reach = |a: u32, b: u32| {
            let slot = self.nodes[a as usize].partners;
            slot != NONE && self.lists[slot as usize].iter().any(|&x| self.root(x) == b)
        };
        for &key in &self.pairs {
            let (a, b) = ((key >> 32) as u32, key as u32);
            let is_root = |i: u32| (i as usize) < self.nodes.len() && self.nodes[i as usize].parent == i;
            if a >= b || !is_root(a) || !is_root(b) || !lists_reach(a, b) || !lists_reach(b, a) {
                return false;
            }
        }
        self.free.iter().all(|&f| !slot_used[f as usize] && self.lists[f as usize].is_empty())
    }
}

/// Final partition, labels and active set of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationResult {
    /// Cluster id per node, numbered by first occurrence in node order.
    pub node_cluster: Vec<u32>,
    /// Label per cluster; `None` for clusters never reached by a semantic edge.
    pub cluster_labels: Vec<Option<u32>>,
    /// Activation flag per edge id.
    pub active: Vec<bool>,
    /// Sum of active edge weights, accumulated in processing order.
    pub energy: F64Bits,
    /// Dominant-power energy, sum of `2^rank` over active edges.
    pub exact_energy: Option<BigUint>,
}

/// `f64` compared bitwise, so results can be compared with `==`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct F64Bits(u64);

impl F64Bits {
    pub fn new(x: f64) -> Self {
        F64Bits(x.to_bits())
    }

    pub fn get(self) -> f64 {
        f64::from_bits(self.0)
    }
}

impl SegmentationResult {
    pub fn num_clusters(&self) -> usize {
        self.cluster_labels.len()
    }

    pub fn label_of_node(&self, node: usize) -> Option<u32> {
        self.cluster_labels[self.node_cluster[node] as usize]
    }
}

/// An in-progress run. Edges are fed one at a time, normally in
/// [`sort_edges`] order.
#[derive(Debug, Clone)]
pub struct SmwRun<'g> {
    graph: &'g ExtendedGraph,
    state: ClusterState,
    // a bitset keeps the scattered writes inside the cache on large graphs
    active: FixedBitSet,
    energy: f64,
}

impl<'g> SmwRun<'g> {
    pub fn new(graph: &'g ExtendedGraph) -> Self {
        SmwRun {
            graph,
            state: ClusterState::new(graph.num_nodes()),
            active: FixedBitSet::with_capacity(graph.num_edges()),
            energy: 0.0,
        }
    }

    pub fn state(&self) -> &ClusterState {
        &self.state
    }

    pub fn is_active(&self, id: usize) -> bool {
        self.active.contains(id)
    }

    /// Applies the greedy rule for one edge; returns whether it became active.
    pub fn process(&mut self, id: usize) -> bool {
        let e = *self.graph.edge(id);
        self.process_edge(id, &e)
    }

    fn process_block(&mut self, block: &[(u32, Edge)]) {
        for (k, (id, e)) in block.iter().enumerate() {
            // Node records are touched in effectively random order; request
            // them a few edges early so the misses overlap.
            if let Some((_, far)) = block.get(k + 16) {
                self.state.prefetch_node(far.u);
                self.state.prefetch_node(far.v);
            }
            if let Some((_, near)) = block.get(k + 8) {
                self.state.prefetch_parent(near.u);
                self.state.prefetch_parent(near.v);
            }
            self.process_edge(*id as usize, e);
        }
    }

    fn process_edge(&mut self, id: usize, e: &Edge) -> bool {
        let s = &mut self.state;
        match e.kind {
            EdgeKind::Attractive => {
                let (ri, rj) = (s.find(e.u), s.find(e.v));
                if ri != rj {
                    let label = match (s.label_of_root(ri), s.label_of_root(rj)) {
                        (Some(a), Some(b)) if a != b => return false,
                        (a, b) => a.or(b),
                    };
                    if s.roots_mutex(ri, rj) {
                        return false;
                    }
                    s.link_roots(ri, rj, label);
                }
            }
            EdgeKind::Repulsive => {
                let (ri, rj) = (s.find(e.u), s.find(e.v));
                if ri == rj {
                    return false;
                }
                s.insert_mutex_roots(ri, rj);
            }
            EdgeKind::Semantic(l) => {
                let r = s.find(e.u) as usize;
                match s.nodes[r].label {
                    NONE => s.nodes[r].label = l,
                    c if c != l => return false,
                    _ => {}
                }
            }
        }
        self.active.insert(id);
        self.energy += e.weight;
        true
    }

    /// Forces an edge into the active set through the guarded state
    /// operations, without the greedy decision.
    pub fn apply(&mut self, id: usize) -> Result<(), SmwError> {
        let e = *self.graph.edge(id);
        match e.kind {
            EdgeKind::Attractive => self.state.merge(e.u, e.v)?,
            EdgeKind::Repulsive => self.state.add_mutex(e.u, e.v)?,
            EdgeKind::Semantic(l) => self.state.assign_class(e.u, l)?,
        }
        self.active.insert(id);
        self.energy += e.weight;
        Ok(())
    }

    pub fn finish(mut self, order: Option<&EdgeOrder>) -> SegmentationResult {
        let n = self.state.num_nodes();
        let mut root_cluster = vec![u32::MAX; n];
        let mut node_cluster = Vec::with_capacity(n);
        let mut cluster_labels = Vec::new();
        for i in 0..n as u32 {
            let r = self.state.find(i) as usize;
            if root_cluster[r] == u32::MAX {
                root_cluster[r] = cluster_labels.len() as u32;
                cluster_labels.push(self.state.label_of_root(r as u32));
            }
            node_cluster.push(root_cluster[r]);
        }
        let exact_energy = order.map(|order| {
            let mut acc = BigUint::default();
            for (id, rank) in order.ranks().into_iter().enumerate() {
                if self.active.contains(id) {
                    acc.set_bit(rank as u64, true);
                }
            }
            acc
        });
        SegmentationResult {
            node_cluster,
            cluster_labels,
            active: (0..self.graph.num_edges()).map(|id| self.active.contains(id)).collect(),
            energy: F64Bits::new(self.energy),
            exact_energy,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmwOptions {
    /// Also compute the dominant-power energy.
    pub exact_energy: bool,
}

pub fn run_smw(g: &ExtendedGraph) -> SegmentationResult {
    run_smw_with(g, SmwOptions::default())
}

pub fn run_smw_with(g: &ExtendedGraph, options: SmwOptions) -> SegmentationResult {
    let order = sort_edges(g);
    run_smw_ordered(g, &order, options)
}

const BLOCK: usize = 4096;

pub fn run_smw_ordered(g: &ExtendedGraph, order: &EdgeOrder, options: SmwOptions) -> SegmentationResult {
    // Edges are copied out in sorted order a block at a time so the greedy
    // loop reads them sequentially instead of chasing ids through the graph.
    let mut run = SmwRun::new(g);
    let mut buffer = Vec::with_capacity(BLOCK);
    for ids in order.as_slice().chunks(BLOCK) {
        buffer.clear();
        buffer.extend(ids.iter().map(|&id| (id, *g.edge(id as usize))));
        run.process_block(&buffer);
    }
    run.finish(options.exact_energy.then_some(order))
}

/// Plain mutex watershed: the zero- or one-label special case.
pub fn run_mws(g: &ExtendedGraph) -> Result<SegmentationResult, SmwError> {
    if g.num_labels() > 1 {
        return Err(SmwError::TooManyLabels(g.num_labels()));
    }
    Ok(run_smw(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge};

    /// Active edges as an explicit multigraph over internal nodes
    /// `0..n` and terminals `n..n+k`; each entry is (a, b, repulsive).
    struct PathOracle {
        edges: Vec<(usize, usize, bool)>,
        size: usize,
    }

    impl PathOracle {
        fn new(n: usize, k: usize) -> Self {
            PathOracle { edges: Vec::new(), size: n + k }
        }

        /// Enumerates all simple paths from `from` to `to` and returns the
        /// repulsive-edge counts of each.
        fn path_repulsive_counts(&self, from: usize, to: usize) -> Vec<usize> {
            fn walk(o: &PathOracle, at: usize, to: usize, seen: &mut Vec<bool>, rep: usize, out: &mut Vec<usize>) {
                if at == to {
                    out.push(rep);
                    return;
                }
                for &(a, b, r) in &o.edges {
                    let next = if a == at {
                        b
                    } else if b == at {
                        a
                    } else {
                        continue;
                    };
                    if !seen[next] {
                        seen[next] = true;
                        walk(o, next, to, seen, rep + r as usize, out);
                        seen[next] = false;
                    }
                }
            }
            let mut seen = vec![false; self.size];
            seen[from] = true;
            let mut out = Vec::new();
            walk(self, from, to, &mut seen, 0, &mut out);
            out
        }
    }

    #[test]
    fn connected_examples() {
        let mut s = ClusterState::new(3);
        assert!(!s.connected(0, 1));
        s.merge(0, 1).unwrap();
        assert!(s.connected(0, 1));
        s.merge(1, 2).unwrap();
        assert!(s.connected(0, 2));
    }

    #[test]
    fn mutex_examples() {
        let mut s = ClusterState::new(3);
        assert!(!s.mutex(0, 1));
        s.add_mutex(0, 1).unwrap();
        assert!(s.mutex(0, 1));
        s.merge(1, 2).unwrap();
        assert!(s.mutex(0, 2));

        // path 0 -R- 1 -A- 2 carries exactly one repulsive edge
        let mut oracle = PathOracle::new(3, 0);
        oracle.edges.push((0, 1, true));
        oracle.edges.push((1, 2, false));
        assert!(oracle.path_repulsive_counts(0, 2).contains(&1));
    }

    #[test]
    fn class_examples() {
        let mut s = ClusterState::new(2);
        assert_eq!(s.class_of(0), None);
        s.assign_class(0, 2).unwrap();
        assert_eq!(s.class_of(0), Some(2));
        s.merge(0, 1).unwrap();
        assert_eq!(s.class_of(1), Some(2));

        // 1 -A- 0 -S- t2: terminal t2 is node index 2 + 2
        let mut oracle = PathOracle::new(2, 3);
        oracle.edges.push((1, 0, false));
        oracle.edges.push((0, 2 + 2, false));
        assert!(!oracle.path_repulsive_counts(1, 4).is_empty());
    }

    #[test]
    fn merge_guards() {
        let mut s = ClusterState::new(4);
        s.assign_class(0, 1).unwrap();
        s.merge(0, 1).unwrap();
        assert_eq!(s.class_of(1), Some(1));
        s.assign_class(2, 2).unwrap();
        assert_eq!(s.merge(1, 2), Err(SmwError::LabelConflict(1, 2)));
        s.add_mutex(0, 3).unwrap();
        assert_eq!(s.merge(1, 3), Err(SmwError::MutexViolation(1, 3)));
    }

    #[test]
    fn add_mutex_guards() {
        let mut s = ClusterState::new(3);
        s.add_mutex(0, 1).unwrap();
        s.add_mutex(1, 0).unwrap();
        assert_eq!(s.mutex_count(), 1);
        s.merge(1, 2).unwrap();
        assert_eq!(s.add_mutex(1, 2), Err(SmwError::AlreadyConnected(1, 2)));
    }

    #[test]
    fn assign_class_guards() {
        let mut s = ClusterState::new(1);
        s.assign_class(0, 1).unwrap();
        s.assign_class(0, 1).unwrap();
        assert_eq!(s.class_of(0), Some(1));
        assert_eq!(s.assign_class(0, 2), Err(SmwError::LabelConflict(1, 2)));
    }

    #[test]
    fn mutex_rekeyed_through_merges() {
        let mut s = ClusterState::new(6);
        s.add_mutex(0, 1).unwrap();
        s.add_mutex(0, 2).unwrap();
        s.add_mutex(3, 4).unwrap();
        s.merge(1, 3).unwrap();
        s.merge(4, 5).unwrap();
        assert!(s.mutex(3, 0));
        assert!(s.mutex(5, 1));
        s.merge(2, 5).unwrap();
        assert!(s.mutex(0, 4));
        assert!(s.check_invariants());
        // {0} | {1,3} | {2,4,5}, pairwise exclusive
        assert_eq!(s.mutex_count(), 3);
        assert!(s.mutex(1, 2));
    }

    #[test]
    fn two_labels_stay_apart() {
        let g = build_graph(2, 2, [Edge::semantic(0, 0, 0.9), Edge::semantic(1, 1, 0.8), Edge::attractive(0, 1, 0.7)])
            .unwrap();
        let r = run_smw(&g);
        assert_eq!(r.node_cluster, vec![0, 1]);
        assert_eq!(r.cluster_labels, vec![Some(0), Some(1)]);
        assert_eq!(r.active, vec![true, true, false]);
    }

    #[test]
    fn repulsion_after_merge_is_rejected() {
        let g = build_graph(2, 1, [Edge::attractive(0, 1, 0.9), Edge::repulsive(0, 1, 0.5)]).unwrap();
        let r = run_smw(&g);
        assert_eq!(r.node_cluster, vec![0, 0]);
        assert_eq!(r.active, vec![true, false]);
        assert_eq!(r.cluster_labels, vec![None]);
    }

    #[test]
    fn empty_graph_gives_singletons() {
        let g = build_graph(4, 2, []).unwrap();
        let r = run_smw_with(&g, SmwOptions { exact_energy: true });
        assert_eq!(r.node_cluster, vec![0, 1, 2, 3]);
        assert_eq!(r.cluster_labels, vec![None; 4]);
        assert_eq!(r.energy.get(), 0.0);
        assert_eq!(r.exact_energy, Some(BigUint::default()));
    }

    #[test]
    fn mws_chain() {
        let g =
            build_graph(3, 0, [Edge::attractive(0, 1, 0.9), Edge::attractive(1, 2, 0.8), Edge::repulsive(0, 2, 0.85)])
                .unwrap();
        let r = run_mws(&g).unwrap();
        assert_eq!(r.node_cluster, vec![0, 0, 1]);
        assert_eq!(r.active, vec![true, false, true]);
        assert_eq!(r, run_smw(&g));
    }

    #[test]
    fn mws_rejects_two_labels() {
        let g = build_graph(1, 2, []).unwrap();
        assert_eq!(run_mws(&g), Err(SmwError::TooManyLabels(2)));
    }

    #[test]
    fn redundant_activations_count() {
        let g = build_graph(
            3,
            1,
            [
                Edge::repulsive(0, 1, 0.9),
                Edge::repulsive(1, 0, 0.8),
                Edge::semantic(2, 0, 0.7),
                Edge::semantic(2, 0, 0.6),
                Edge::attractive(0, 2, 0.5),
                Edge::attractive(2, 0, 0.4),
            ],
        )
        .unwrap();
        let r = run_smw_with(&g, SmwOptions { exact_energy: true });
        assert_eq!(r.active, vec![true; 6]);
        assert_eq!(r.exact_energy, Some(BigUint::from(63u32)));
        assert!((r.energy.get() - 3.9).abs() < 1e-12);
    }

    #[test]
    fn unlabeled_merges_into_labeled() {
        let g =
            build_graph(3, 2, [Edge::semantic(0, 1, 0.9), Edge::attractive(0, 1, 0.8), Edge::attractive(1, 2, 0.7)])
                .unwrap();
        let r = run_smw(&g);
        assert_eq!(r.node_cluster, vec![0, 0, 0]);
        assert_eq!(r.cluster_labels, vec![Some(1)]);
    }

    #[test]
    fn exact_energy_uses_ranks() {
        let g =
            build_graph(2, 0, [Edge::attractive(0, 1, 0.1), Edge::repulsive(0, 1, 0.9), Edge::attractive(1, 0, 0.5)])
                .unwrap();
        let r = run_smw_with(&g, SmwOptions { exact_energy: true });
        // repulsion first (rank 2), both attractions rejected
        assert_eq!(r.active, vec![false, true, false]);
        assert_eq!(r.exact_energy, Some(BigUint::from(4u32)));
    }
}
