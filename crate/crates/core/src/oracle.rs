//! Exact verification machinery for small graphs.
//!
//! Weights are replaced by distinct powers of two assigned by processing rank
//! (`2^rank`, weakest edge rank 0). Every weight then exceeds the sum of all
//! weaker ones, so comparing subset energies reduces to comparing the subsets
//! as binary numbers. The checkers here are written independently of
//! [`crate::smw`] and only look at an activation vector.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

use crate::graph::{sort_edges, EdgeKind, ExtendedGraph};

/// Largest edge count accepted by the enumeration oracle.
pub const MAX_ORACLE_EDGES: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {0} edges, the oracle enumerates at most {MAX_ORACLE_EDGES}")]
    TooLargeForOracle(usize),
    #[error("active-set and cut-indicator energies disagree: {0}")]
    InconsistentTransform(String),
}

/// Strictly dominant integer weights, one per edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactWeights(pub Vec<BigUint>);

impl ExactWeights {
    /// Every weight exceeds the sum of all strictly smaller ones.
    pub fn is_strictly_dominant(&self) -> bool {
        let mut sorted: Vec<&BigUint> = self.0.iter().collect();
        sorted.sort();
        let mut below = BigUint::zero();
        for w in sorted {
            if *w <= below {
                return false;
            }
            below += w;
        }
        true
    }

    pub fn energy(&self, active: &[bool]) -> BigUint {
        self.0.iter().zip(active).filter(|(_, &a)| a).map(|(w, _)| w).sum()
    }
}

pub fn dominant_weights(g: &ExtendedGraph) -> ExactWeights {
    let ranks = sort_edges(g).ranks();
    ExactWeights(ranks.into_iter().map(|r| BigUint::from(1u8) << r as usize).collect())
}

/// Minimal disjoint-set helper kept separate from the algorithm's own
/// cluster state.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// No active cycle of internal edges contains exactly one repulsive edge.
///
/// Such a cycle exists iff some active repulsive edge has its endpoints
/// joined by active attractive edges.
pub fn check_mutex_constraint(g: &ExtendedGraph, active: &[bool]) -> bool {
    Checker::new(g).mutex_ok(g, active)
}

/// No path of active attractive and semantic edges joins two distinct
/// terminals.
pub fn check_label_constraint(g: &ExtendedGraph, active: &[bool]) -> bool {
    Checker::new(g).label_ok(g, active)
}

struct Checker {
    internal: Dsu,
    extended: Dsu,
    terminal_root: Vec<usize>,
}

impl Checker {
    fn new(g: &ExtendedGraph) -> Self {
        Checker {
            internal: Dsu::new(g.num_nodes()),
            extended: Dsu::new(g.num_nodes() + g.num_labels()),
            terminal_root: vec![0; g.num_labels()],
        }
    }

    fn mutex_ok(&mut self, g: &ExtendedGraph, active: &[bool]) -> bool {
        self.internal.reset();
        for (e, _) in g.edges().iter().zip(active).filter(|(_, &a)| a) {
            if e.kind == EdgeKind::Attractive {
                self.internal.union(e.u as usize, e.v as usize);
            }
        }
        g.edges().iter().zip(active).filter(|(_, &a)| a).all(|(e, _)| {
            e.kind != EdgeKind::Repulsive || self.internal.find(e.u as usize) != self.internal.find(e.v as usize)
        })
    }

    fn label_ok(&mut self, g: &ExtendedGraph, active: &[bool]) -> bool {
        let n = g.num_nodes();
        self.extended.reset();
        for (e, _) in g.edges().iter().zip(active).filter(|(_, &a)| a) {
            match e.kind {
                EdgeKind::Attractive => self.extended.union(e.u as usize, e.v as usize),
                EdgeKind::Semantic(l) => self.extended.union(e.u as usize, n + l as usize),
                EdgeKind::Repulsive => {}
            }
        }
        for t in 0..g.num_labels() {
            self.terminal_root[t] = self.extended.find(n + t);
        }
        let mut roots = self.terminal_root.clone();
        roots.sort_unstable();
        roots.windows(2).all(|w| w[0] != w[1])
    }

    fn feasible(&mut self, g: &ExtendedGraph, active: &[bool]) -> bool {
        self.mutex_ok(g, active) && self.label_ok(g, active)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub active: Vec<bool>,
    pub energy: BigUint,
}

/// Maximizes the dominant-power energy over all activation vectors that
/// satisfy both the mutex and the label constraint.
///
/// With weights `2^rank`, the energy of a subset is the subset read as a
/// binary number over ranks. Candidates are therefore visited from the
/// all-ones mask downwards, and the first feasible one is the maximizer
/// over the whole power set.
pub fn brute_force_optimum(g: &ExtendedGraph) -> Result<OracleSolution, OracleError> {
    let m = g.num_edges();
    if m > MAX_ORACLE_EDGES {
        return Err(OracleError::TooLargeForOracle(m));
    }
    let by_rank = edges_by_rank(g);
    let mut checker = Checker::new(g);
    let mut active = vec![false; m];
    for mask in (0..1u64 << m).rev() {
        fill_active(&by_rank, mask, &mut active);
        if checker.feasible(g, &active) {
            return Ok(OracleSolution { active, energy: BigUint::from(mask) });
        }
    }
    unreachable!("the empty set is always feasible")
}

/// Visits every subset, returning the maximizer and the number of feasible
/// subsets. Slower than [`brute_force_optimum`] but makes no use of the
/// ordering argument.
pub fn brute_force_exhaustive(g: &ExtendedGraph) -> Result<(OracleSolution, u64), OracleError> {
    let m = g.num_edges();
    if m > MAX_ORACLE_EDGES {
        return Err(OracleError::TooLargeForOracle(m));
    }
    let weights = dominant_weights(g);
    let mut checker = Checker::new(g);
    let mut active = vec![false; m];
    let mut best: Option<(BigUint, u64)> = None;
    let mut feasible = 0u64;
    for mask in 0..1u64 << m {
        for (id, a) in active.iter_mut().enumerate() {
            *a = mask >> id & 1 == 1;
        }
        if !checker.feasible(g, &active) {
            continue;
        }
        feasible += 1;
        let energy = weights.energy(&active);
        match &best {
            Some((b, _)) if *b >= energy => {}
            _ => best = Some((energy, mask)),
        }
    }
    let (energy, mask) = best.expect("the empty set is always feasible");
    let active = (0..m).map(|id| mask >> id & 1 == 1).collect();
    Ok((OracleSolution { active, energy }, feasible))
}

fn edges_by_rank(g: &ExtendedGraph) -> Vec<usize> {
    let mut by_rank = vec![0; g.num_edges()];
    for (id, r) in sort_edges(g).ranks().into_iter().enumerate() {
        by_rank[r as usize] = id;
    }
    by_rank
}

fn fill_active(by_rank: &[usize], mask: u64, active: &mut [bool]) {
    for (r, &id) in by_rank.iter().enumerate() {
        active[id] = mask >> r & 1 == 1;
    }
}

/// Partition and labeling implied by an activation vector, in canonical
/// form: clusters numbered by first node occurrence.
///
/// When a cluster touches several terminals (label constraint violated) the
/// lowest label is reported.
pub fn induced_segmentation(g: &ExtendedGraph, active: &[bool]) -> (Vec<u32>, Vec<Option<u32>>) {
    let n = g.num_nodes();
    let mut adjacency = vec![Vec::new(); n];
    let mut node_label: Vec<Option<u32>> = vec![None; n];
    for (e, _) in g.edges().iter().zip(active).filter(|(_, &a)| a) {
        match e.kind {
            EdgeKind::Attractive => {
                adjacency[e.u as usize].push(e.v as usize);
                adjacency[e.v as usize].push(e.u as usize);
            }
            EdgeKind::Semantic(l) => {
                let slot = &mut node_label[e.u as usize];
                *slot = Some(slot.map_or(l, |x| x.min(l)));
            }
            EdgeKind::Repulsive => {}
        }
    }
    let mut cluster = vec![u32::MAX; n];
    let mut labels = Vec::new();
    for start in 0..n {
        if cluster[start] != u32::MAX {
            continue;
        }
        let id = labels.len() as u32;
        let mut label: Option<u32> = None;
        let mut stack = vec![start];
        cluster[start] = id;
        while let Some(v) = stack.pop() {
            if let Some(l) = node_label[v] {
                label = Some(label.map_or(l, |x| x.min(l)));
            }
            for &w in &adjacency[v] {
                if cluster[w] == u32::MAX {
                    cluster[w] = id;
                    stack.push(w);
                }
            }
        }
        labels.push(label);
    }
    (cluster, labels)
}

/// Cut indicators per edge id, `true` meaning cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutIndicators(pub Vec<bool>);

/// Repulsive edges are cut when active; attractive and semantic edges are
/// cut when inactive.
pub fn active_to_cut(g: &ExtendedGraph, active: &[bool]) -> CutIndicators {
    CutIndicators(
        g.edges()
            .iter()
            .zip(active)
            .map(|(e, &a)| match e.kind {
                EdgeKind::Repulsive => a,
                EdgeKind::Attractive | EdgeKind::Semantic(_) => !a,
            })
            .collect(),
    )
}

/// Cut indicators over internal edges plus a dense node-by-terminal matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseCut {
    /// Indexed by edge id; entries of semantic edges are ignored.
    pub internal: Vec<bool>,
    /// `terminal[node * num_labels + label]`, `true` meaning cut.
    pub terminal: Vec<bool>,
}

impl DenseCut {
    /// Node-terminal pairs without an explicit semantic edge count as cut; a
    /// pair is uncut if any of its explicit edges is uncut.
    pub fn from_sparse(g: &ExtendedGraph, y: &CutIndicators) -> Self {
        let k = g.num_labels();
        let mut terminal = vec![true; g.num_nodes() * k];
        for (e, &cut) in g.edges().iter().zip(&y.0) {
            if let EdgeKind::Semantic(l) = e.kind {
                if !cut {
                    terminal[e.u as usize * k + l as usize] = false;
                }
            }
        }
        DenseCut { internal: y.0.clone(), terminal }
    }

    /// Internal indicators from the activation vector; every node keeps
    /// exactly the terminal of its cluster's label uncut, unlabeled clusters
    /// keep none.
    pub fn from_labeling(g: &ExtendedGraph, active: &[bool], node_labels: &[Option<u32>]) -> Self {
        let k = g.num_labels();
        let mut terminal = vec![true; g.num_nodes() * k];
        for (node, label) in node_labels.iter().enumerate() {
            if let Some(l) = label {
                terminal[node * k + *l as usize] = false;
            }
        }
        DenseCut { internal: active_to_cut(g, active).0, terminal }
    }
}

/// Outcome of the multiway-cut feasibility check, one flag per constraint
/// family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeReport {
    /// Cycle inequalities, checked in component form: a cut internal edge
    /// must join two different components of the uncut internal edges.
    /// Covers cut repulsive edges as well as cut attractive ones.
    pub cycle_consistent: bool,
    /// Every node keeps exactly one terminal edge uncut.
    pub unique_assignment: bool,
    /// `y_uv >= y_ut - y_vt` for all internal edges and terminals.
    pub consistent_uv: bool,
    /// `y_uv >= y_vt - y_ut` for all internal edges and terminals.
    pub consistent_vu: bool,
    /// Nodes with every terminal edge cut, skipped by the unique-assignment
    /// check because exemption was requested.
    pub exempt_unlabeled: Vec<u32>,
}

impl PolytopeReport {
    pub fn is_feasible(&self) -> bool {
        self.cycle_consistent && self.unique_assignment && self.consistent_uv && self.consistent_vu
    }
}

impl fmt::Display for PolytopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |b: bool| if b { "PASS" } else { "FAIL" };
        write!(
            f,
            "cycle(component form)={} unique_assignment={} consistency_uv={} consistency_vu={} exempt_unlabeled={}",
            word(self.cycle_consistent),
            word(self.unique_assignment),
            word(self.consistent_uv),
            word(self.consistent_vu),
            self.exempt_unlabeled.len()
        )
    }
}

pub fn check_smwc_polytope(g: &ExtendedGraph, y: &CutIndicators, exempt_unlabeled: bool) -> PolytopeReport {
    check_smwc_dense(g, &DenseCut::from_sparse(g, y), exempt_unlabeled)
}

pub fn check_smwc_dense(g: &ExtendedGraph, cut: &DenseCut, exempt_unlabeled: bool) -> PolytopeReport {
    let n = g.num_nodes();
    let k = g.num_labels();
    let internal = || {
        g.edges()
            .iter()
            .zip(&cut.internal)
            .filter(|(e, _)| e.kind.is_internal())
            .map(|(e, &y)| (e.u as usize, e.v as usize, y))
    };

    let mut dsu = Dsu::new(n);
    for (u, v, y) in internal() {
        if !y {
            dsu.union(u, v);
        }
    }
    let cycle_consistent = internal().all(|(u, v, y)| !y || dsu.find(u) != dsu.find(v));

    let mut unique_assignment = true;
    let mut exempt = Vec::new();
    for node in 0..n {
        let uncut = cut.terminal[node * k..(node + 1) * k].iter().filter(|&&c| !c).count();
        match uncut {
            1 => {}
            0 if exempt_unlabeled => exempt.push(node as u32),
            _ => unique_assignment = false,
        }
    }

    let mut consistent_uv = true;
    let mut consistent_vu = true;
    for (u, v, y) in internal() {
        if y {
            continue;
        }
        for t in 0..k {
            let (yu, yv) = (cut.terminal[u * k + t], cut.terminal[v * k + t]);
            consistent_uv &= !(yu && !yv);
            consistent_vu &= !(yv && !yu);
        }
    }

    PolytopeReport { cycle_consistent, unique_assignment, consistent_uv, consistent_vu, exempt_unlabeled: exempt }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// Raw weights in double precision, compared with relative tolerance 1e-9.
    Float,
    /// Dominant-power integer weights, compared exactly.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyValue {
    Float(f64),
    Exact(BigInt),
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyValue::Float(x) => write!(f, "{x}"),
            EnergyValue::Exact(x) => write!(f, "{x}"),
        }
    }
}

/// Both sides of the keep/cut objective transform.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyIdentity {
    /// Sum of weights over active edges.
    pub activeside: EnergyValue,
    /// Cut objective: attractive and semantic weights paid when cut, minus
    /// repulsive weights when cut.
    pub cutside: EnergyValue,
    /// Sum of all attractive and semantic weights.
    pub constant: EnergyValue,
}

/// Evaluates the keep-objective on `active` and the cut-objective on the
/// derived cut indicators, and checks `cutside = constant - activeside`.
pub fn energy_equivalence(g: &ExtendedGraph, active: &[bool], mode: EnergyMode) -> Result<EnergyIdentity, OracleError> {
    let y = active_to_cut(g, active);
    match mode {
        EnergyMode::Exact => {
            let w: Vec<BigInt> = dominant_weights(g).0.into_iter().map(BigInt::from).collect();
            let (activeside, cutside, constant) = transform_sides(g, active, &y, &w, BigInt::zero());
            if cutside != &constant - &activeside {
                return Err(OracleError::InconsistentTransform(format!(
                    "cutside {cutside} != {constant} - {activeside}"
                )));
            }
            Ok(EnergyIdentity {
                activeside: EnergyValue::Exact(activeside),
                cutside: EnergyValue::Exact(cutside),
                constant: EnergyValue::Exact(constant),
            })
        }
        EnergyMode::Float => {
            let w: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
            let (activeside, cutside, constant) = transform_sides(g, active, &y, &w, 0.0);
            let expected = constant - activeside;
            if (cutside - expected).abs() > 1e-9 * constant.abs().max(1.0) {
                return Err(OracleError::InconsistentTransform(format!(
                    "cutside {cutside} != {constant} - {activeside}"
                )));
            }
            Ok(EnergyIdentity {
                activeside: EnergyValue::Float(activeside),
                cutside: EnergyValue::Float(cutside),
                constant: EnergyValue::Float(constant),
            })
        }
    }
}

fn transform_sides<T>(g: &ExtendedGraph, active: &[bool], y: &CutIndicators, w: &[T], zero: T) -> (T, T, T)
where
    T: Clone + std::ops::AddAssign + std::ops::SubAssign,
    for<'a> T: std::ops::AddAssign<&'a T> + std::ops::SubAssign<&'a T>,
{
    let mut activeside = zero.clone();
    for (wi, _) in w.iter().zip(active).filter(|(_, &a)| a) {
        activeside += wi;
    }
    let mut cutside = zero.clone();
    let mut constant = zero;
    for ((e, wi), &cut) in g.edges().iter().zip(w).zip(&y.0) {
        match e.kind {
            EdgeKind::Repulsive => {
                if cut {
                    cutside -= wi;
                }
            }
            EdgeKind::Attractive | EdgeKind::Semantic(_) => {
                constant += wi;
                if cut {
                    cutside += wi;
                }
            }
        }
    }
    (activeside, cutside, constant)
}
