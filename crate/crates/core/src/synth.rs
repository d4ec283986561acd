//! Seeded generators: random small graphs for the oracle, feasible active
//! sets, synthetic affinity volumes and two-instance test scenes.

use std::collections::BTreeSet;

use crate::graph::{build_graph, Edge, ExtendedGraph};
use crate::grid::{Offset, OffsetPattern, Polarity};
use crate::metrics::PanopticLabelMap;
use crate::oracle::{check_label_constraint, check_mutex_constraint};
use crate::rng::Prng;
use crate::tensor::{DenseTensor, GridShape, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomGraphConfig {
    pub max_nodes: usize,
    pub max_labels: usize,
    pub max_edges: usize,
    /// Probability that a graph draws its weights from a coarse grid, which
    /// produces ties.
    pub tie_probability_percent: u8,
}

impl Default for RandomGraphConfig {
    fn default() -> Self {
        RandomGraphConfig { max_nodes: 8, max_labels: 3, max_edges: 18, tie_probability_percent: 25 }
    }
}

impl RandomGraphConfig {
    pub fn label_free() -> Self {
        RandomGraphConfig { max_labels: 0, ..Self::default() }
    }
}

/// Node count in `2..=max_nodes`, label count in `0..=max_labels`, edge count
/// in `0..=max_edges`, edge kinds uniform among those available.
pub fn random_graph(rng: &mut Prng, config: &RandomGraphConfig) -> ExtendedGraph {
    let n = rng.range_inclusive(2, config.max_nodes.max(2));
    let k = rng.range_inclusive(0, config.max_labels);
    let m = rng.range_inclusive(0, config.max_edges);
    let coarse = rng.below(100) < config.tie_probability_percent as usize;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let w = if coarse { rng.range_inclusive(0, 10) as f64 / 10.0 } else { rng.next_f64() };
        let u = rng.below(n) as u32;
        let kinds = if k > 0 { 3 } else { 2 };
        let edge = match rng.below(kinds) {
            2 => Edge::semantic(u, rng.below(k) as u32, w),
            kind => {
                let mut v = rng.below(n - 1) as u32;
                if v >= u {
                    v += 1;
                }
                if kind == 0 {
                    Edge::attractive(u, v, w)
                } else {
                    Edge::repulsive(u, v, w)
                }
            }
        };
        edges.push(edge);
    }
    build_graph(n, k, edges).expect("generated graph is valid")
}

/// Activation vector built by visiting edges in random order and keeping
/// each one that leaves the set feasible.
pub fn random_feasible_active_set(g: &ExtendedGraph, rng: &mut Prng) -> Vec<bool> {
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    rng.shuffle(&mut order);
    let mut active = vec![false; g.num_edges()];
    for id in order {
        if rng.chance(0.2) {
            continue;
        }
        active[id] = true;
        if !(check_mutex_constraint(g, &active) && check_label_constraint(g, &active)) {
            active[id] = false;
        }
    }
    active
}

/// Dense inputs of a grid segmentation problem.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub affinities: DenseTensor,
    pub pattern: OffsetPattern,
    pub semantic: DenseTensor,
}

fn offset(delta: Vec<isize>, polarity: Polarity) -> Offset {
    Offset { delta, polarity }
}

/// Cubic volume of `side^3` voxels partitioned into 8-voxel blocks, each a
/// ground-truth segment with one of two classes. Three attractive nearest
/// neighbour offsets and three repulsive offsets of length 3; affinities are
/// high inside a block and low across, with uniform noise.
pub fn synthetic_volume(side: usize, seed: u64) -> GridProblem {
    let mut rng = Prng::new(seed);
    let grid = GridShape::new(&[side, side, side]);
    let n = grid.len();
    let block = |i: usize| {
        let c = grid.coords(i);
        (c[0] / 8, c[1] / 8, c[2] / 8)
    };
    let blocks_per_axis = side.div_ceil(8);
    let block_class: Vec<usize> = (0..blocks_per_axis.pow(3)).map(|_| rng.below(2)).collect();
    let class_of = |b: (usize, usize, usize)| block_class[(b.0 * blocks_per_axis + b.1) * blocks_per_axis + b.2];

    let mut offsets = Vec::new();
    for (length, polarity) in [(1, Polarity::Attractive), (3, Polarity::Repulsive)] {
        for axis in 0..3 {
            let mut d = vec![0; 3];
            d[axis] = length;
            offsets.push(offset(d, polarity));
        }
    }
    let pattern = OffsetPattern::new(offsets).expect("valid offsets");

    let mut aff = Vec::with_capacity(pattern.len() * n);
    for o in pattern.offsets() {
        for i in 0..n {
            let same = grid.shifted(i, &o.delta).is_none_or(|j| block(i) == block(j));
            let a = if same { rng.uniform(0.6, 1.0) } else { rng.uniform(0.0, 0.4) };
            aff.push(a as f32);
        }
    }
    let mut sem = vec![0.0f32; 2 * n];
    for i in 0..n {
        let p = rng.uniform(0.55, 0.95) as f32;
        let c = class_of(block(i));
        sem[c * n + i] = p;
        sem[(1 - c) * n + i] = 1.0 - p;
    }
    GridProblem {
        affinities: Tensor::new(vec![pattern.len(), side, side, side], aff).expect("shape"),
        pattern,
        semantic: Tensor::new(vec![2, side, side, side], sem).expect("shape"),
    }
}

/// Two touching thing instances of different classes below a stuff band.
#[derive(Debug, Clone)]
pub struct TwoInstanceScene {
    pub problem: GridProblem,
    pub ground_truth: PanopticLabelMap,
    pub things: BTreeSet<i32>,
    pub stuff: BTreeSet<i32>,
}

/// Class 0 is a stuff band along the top; classes 1 and 2 are two instances
/// sharing a vertical boundary. Affinities across that boundary are as high
/// as inside the instances and repulsion across it is weak, so the
/// instances are told apart only by their semantic evidence.
pub fn two_instance_scene(seed: u64) -> TwoInstanceScene {
    let mut rng = Prng::new(seed);
    let h = rng.range_inclusive(8, 12);
    let w = rng.range_inclusive(12, 20);
    let band = rng.range_inclusive(2, 3);
    let split = rng.range_inclusive(w / 3, 2 * w / 3);
    let grid = GridShape::new(&[h, w]);
    let n = grid.len();
    let segment = |i: usize| {
        let (y, x) = (i / w, i % w);
        if y < band {
            0
        } else if x < split {
            1
        } else {
            2
        }
    };

    let pattern = OffsetPattern::new(vec![
        offset(vec![0, 1], Polarity::Attractive),
        offset(vec![1, 0], Polarity::Attractive),
        offset(vec![0, 4], Polarity::Repulsive),
        offset(vec![4, 0], Polarity::Repulsive),
    ])
    .expect("valid offsets");

    let mut aff = Vec::with_capacity(pattern.len() * n);
    for o in pattern.offsets() {
        for i in 0..n {
            let a = match grid.shifted(i, &o.delta).map(|j| (segment(i), segment(j))) {
                None => 1.0,
                Some((a, b)) if a == b => match o.polarity {
                    Polarity::Attractive => rng.uniform(0.75, 1.0),
                    Polarity::Repulsive => rng.uniform(0.7, 1.0),
                },
                Some((a, b)) if a != 0 && b != 0 => match o.polarity {
                    Polarity::Attractive => rng.uniform(0.55, 0.9),
                    Polarity::Repulsive => rng.uniform(0.5, 0.9),
                },
                Some(_) => rng.uniform(0.0, 0.2),
            };
            aff.push(a as f32);
        }
    }

    let mut sem = vec![0.0f32; 3 * n];
    for i in 0..n {
        let c = segment(i);
        let p = rng.uniform(0.6, 0.95);
        let share = rng.next_f64();
        let rest = 1.0 - p;
        let others: Vec<usize> = (0..3).filter(|&o| o != c).collect();
        sem[c * n + i] = p as f32;
        sem[others[0] * n + i] = (rest * share) as f32;
        sem[others[1] * n + i] = (rest * (1.0 - share)) as f32;
    }

    let class: Vec<i32> = (0..n).map(|i| segment(i) as i32).collect();
    let instance: Vec<i32> = class.iter().map(|&c| if c == 0 { 0 } else { 1 }).collect();
    let ground_truth = PanopticLabelMap::new(
        Tensor::new(vec![h, w], class).expect("shape"),
        Tensor::new(vec![h, w], instance).expect("shape"),
    )
    .expect("matching shapes");

    TwoInstanceScene {
        problem: GridProblem {
            affinities: Tensor::new(vec![pattern.len(), h, w], aff).expect("shape"),
            pattern,
            semantic: Tensor::new(vec![3, h, w], sem).expect("shape"),
        },
        ground_truth,
        things: [1, 2].into_iter().collect(),
        stuff: [0].into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_graphs_respect_limits() {
        let mut rng = Prng::new(1);
        let cfg = RandomGraphConfig::default();
        for _ in 0..200 {
            let g = random_graph(&mut rng, &cfg);
            assert!(g.num_nodes() <= 8 && g.num_labels() <= 3 && g.num_edges() <= 18);
        }
        let free = RandomGraphConfig::label_free();
        for _ in 0..50 {
            assert_eq!(random_graph(&mut rng, &free).num_labels(), 0);
        }
    }

    #[test]
    fn feasible_sets_are_feasible() {
        let mut rng = Prng::new(2);
        for _ in 0..100 {
            let g = random_graph(&mut rng, &RandomGraphConfig::default());
            let a = random_feasible_active_set(&g, &mut rng);
            assert!(check_mutex_constraint(&g, &a) && check_label_constraint(&g, &a));
        }
    }

    #[test]
    fn generators_are_seeded() {
        let a = synthetic_volume(10, 4);
        let b = synthetic_volume(10, 4);
        assert_eq!(a.affinities, b.affinities);
        assert_eq!(a.semantic.shape(), &[2, 10, 10, 10]);
        let s = two_instance_scene(3);
        assert_eq!(s.ground_truth, two_instance_scene(3).ground_truth);
    }
}
