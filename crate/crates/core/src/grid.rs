//! Graph construction from dense image or volume tensors.
//!
//! Node ids are row-major pixel indices. Edges are emitted offset-major and
//! then in row-major pixel order; neighbour pairs that leave the grid are
//! skipped.

use log::warn;
use thiserror::Error;

use crate::graph::{build_graph, Edge, ExtendedGraph, GraphError};
use crate::rng::Prng;
use crate::tensor::{DenseTensor, GridShape, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("threshold {0} is not inside (0, 1)")]
    BadThreshold(f64),
    #[error("invalid offset pattern: {0}")]
    BadOffsets(String),
    #[error("both masks are empty")]
    BothMasksEmpty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<TensorError> for GridError {
    fn from(e: TensorError) -> Self {
        let TensorError::ShapeMismatch(msg) = e;
        GridError::ShapeMismatch(msg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Attractive,
    Repulsive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offset {
    pub delta: Vec<isize>,
    pub polarity: Polarity,
}

/// Stencil of neighbour offsets, one affinity channel per offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetPattern {
    offsets: Vec<Offset>,
}

impl OffsetPattern {
    pub fn new(offsets: Vec<Offset>) -> Result<Self, GridError> {
        if let Some(first) = offsets.first() {
            let ndim = first.delta.len();
            for o in &offsets {
                if o.delta.len() != ndim {
                    return Err(GridError::BadOffsets(format!(
                        "offset {:?} has {} dimensions, expected {ndim}",
                        o.delta,
                        o.delta.len()
                    )));
                }
                if o.delta.iter().all(|&d| d == 0) {
                    return Err(GridError::BadOffsets("zero offset".into()));
                }
            }
        }
        Ok(OffsetPattern { offsets })
    }

    /// Direct neighbours along every axis, all attractive.
    pub fn nearest_neighbours(ndim: usize) -> Self {
        let offsets = (0..ndim)
            .map(|axis| {
                let mut delta = vec![0; ndim];
                delta[axis] = 1;
                Offset { delta, polarity: Polarity::Attractive }
            })
            .collect();
        OffsetPattern { offsets }
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn ndim(&self) -> Option<usize> {
        self.offsets.first().map(|o| o.delta.len())
    }

    fn check_grid(&self, grid: &GridShape) -> Result<(), GridError> {
        match self.ndim() {
            Some(d) if d != grid.ndim() => Err(GridError::ShapeMismatch(format!(
                "offsets are {d}-dimensional, grid is {}-dimensional",
                grid.ndim()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridOptions {
    /// Semantic edges with weight at or below this value are dropped.
    pub semantic_epsilon: f32,
    /// Classes for which joint-probability affinities are added on every
    /// attractive offset.
    pub stuff_classes: Vec<u32>,
}

fn check_spatial(name: &str, t: &DenseTensor, spatial: &[usize]) -> Result<(), GridError> {
    if t.spatial_shape() != spatial {
        return Err(GridError::ShapeMismatch(format!(
            "{name} spatial shape {:?} differs from {spatial:?}",
            t.spatial_shape()
        )));
    }
    Ok(())
}

/// Builds the extended graph of a grid.
///
/// `affinities` has shape `[offsets, spatial...]`. Attractive offsets use the
/// affinity as weight, repulsive offsets use `1 - affinity`. `semantic`, if
/// given, has shape `[classes, spatial...]` and contributes one semantic
/// edge per pixel and class, weighted by the probability.
pub fn build_grid_graph(
    affinities: &DenseTensor,
    pattern: &OffsetPattern,
    semantic: Option<&DenseTensor>,
    options: &GridOptions,
) -> Result<ExtendedGraph, GridError> {
    if affinities.shape().first() != Some(&pattern.len()) {
        return Err(GridError::ShapeMismatch(format!(
            "affinity tensor {:?} needs {} channels",
            affinities.shape(),
            pattern.len()
        )));
    }
    let grid = GridShape::new(affinities.spatial_shape());
    pattern.check_grid(&grid)?;
    let mut edges = offset_edges(affinities, pattern, &grid, |a, polarity| match polarity {
        Polarity::Attractive => Edge::attractive(0, 0, a as f64),
        Polarity::Repulsive => Edge::repulsive(0, 0, f64::from(1.0 - a)),
    });
    let num_labels = finish_semantic(&mut edges, semantic, pattern, &grid, options)?;
    Ok(build_graph(grid.len(), num_labels, edges)?)
}

/// Like [`build_grid_graph`], but every offset channel is split at
/// `threshold` into attractive and repulsive edges; polarities in the
/// pattern are ignored.
pub fn build_thresholded_grid_graph(
    affinities: &DenseTensor,
    pattern: &OffsetPattern,
    threshold: f64,
    semantic: Option<&DenseTensor>,
    options: &GridOptions,
) -> Result<ExtendedGraph, GridError> {
    check_threshold(threshold)?;
    if affinities.shape().first() != Some(&pattern.len()) {
        return Err(GridError::ShapeMismatch(format!(
            "affinity tensor {:?} needs {} channels",
            affinities.shape(),
            pattern.len()
        )));
    }
    let grid = GridShape::new(affinities.spatial_shape());
    pattern.check_grid(&grid)?;
    let mut edges = offset_edges(affinities, pattern, &grid, |a, _| match split_affinity(a as f64, threshold) {
        SplitAffinity::Attractive(w) => Edge::attractive(0, 0, w),
        SplitAffinity::Repulsive(w) => Edge::repulsive(0, 0, w),
    });
    let num_labels = finish_semantic(&mut edges, semantic, pattern, &grid, options)?;
    Ok(build_graph(grid.len(), num_labels, edges)?)
}

fn offset_edges(
    affinities: &DenseTensor,
    pattern: &OffsetPattern,
    grid: &GridShape,
    make: impl Fn(f32, Polarity) -> Edge,
) -> Vec<Edge> {
    let mut edges = Vec::new();
    for (c, offset) in pattern.offsets().iter().enumerate() {
        let channel = affinities.channel(c);
        for (i, &a) in channel.iter().enumerate() {
            if let Some(j) = grid.shifted(i, &offset.delta) {
                let mut e = make(a, offset.polarity);
                e.u = i as u32;
                e.v = j as u32;
                edges.push(e);
            }
        }
    }
    edges
}

fn finish_semantic(
    edges: &mut Vec<Edge>,
    semantic: Option<&DenseTensor>,
    pattern: &OffsetPattern,
    grid: &GridShape,
    options: &GridOptions,
) -> Result<usize, GridError> {
    let Some(semantic) = semantic else {
        if !options.stuff_classes.is_empty() {
            return Err(GridError::ShapeMismatch("stuff classes given without semantic tensor".into()));
        }
        return Ok(0);
    };
    check_spatial("semantic", semantic, grid.dims())?;
    let num_labels = semantic.shape()[0];

    for &c in &options.stuff_classes {
        if c as usize >= num_labels {
            return Err(GridError::ShapeMismatch(format!("stuff class {c} outside {num_labels} classes")));
        }
        let p = semantic.channel(c as usize);
        for offset in pattern.offsets().iter().filter(|o| o.polarity == Polarity::Attractive) {
            for i in 0..grid.len() {
                if let Some(j) = grid.shifted(i, &offset.delta) {
                    let a = stuff_affinity(p, i, j);
                    if a > 0.0 {
                        edges.push(Edge::attractive(i as u32, j as u32, a as f64));
                    }
                }
            }
        }
    }

    for c in 0..num_labels {
        for (i, &p) in semantic.channel(c).iter().enumerate() {
            if p > options.semantic_epsilon {
                edges.push(Edge::semantic(i as u32, c as u32, p as f64));
            }
        }
    }
    Ok(num_labels)
}

/// Joint probability of two pixels belonging to the same stuff class.
pub fn stuff_affinity(class_probability: &[f32], i: usize, j: usize) -> f32 {
    class_probability[i] * class_probability[j]
}

/// Instance mask with per-pixel foreground probability and a class score.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    /// Probabilities over the spatial grid, no channel axis.
    pub probabilities: DenseTensor,
    pub score: f32,
    pub class: u32,
}

impl SoftMask {
    fn support(&self) -> Vec<usize> {
        self.probabilities.data().iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, _)| i).collect()
    }
}

/// Joint foreground probability weighted by the mask score.
pub fn mask_affinity(mask: &SoftMask, i: usize, j: usize) -> f32 {
    let p = mask.probabilities.data();
    mask.score * p[i] * p[j]
}

/// `1 - sum(p_m p_n) / sum(max(p_m, p_n))`: 0 for identical masks, 1 for
/// disjoint ones.
pub fn soft_iou_repulsion(m: &SoftMask, n: &SoftMask) -> Result<f64, GridError> {
    if m.probabilities.shape() != n.probabilities.shape() {
        return Err(GridError::ShapeMismatch(format!(
            "mask shapes {:?} and {:?}",
            m.probabilities.shape(),
            n.probabilities.shape()
        )));
    }
    let (mut inter, mut union) = (0.0f64, 0.0f64);
    for (&a, &b) in m.probabilities.data().iter().zip(n.probabilities.data()) {
        inter += a as f64 * b as f64;
        union += a.max(b) as f64;
    }
    if union == 0.0 {
        return Err(GridError::BothMasksEmpty);
    }
    Ok(1.0 - inter / union)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskSampling {
    /// Repulsive pixel pairs drawn for every pair of masks.
    pub samples_per_pair: usize,
    /// Attractive pixel pairs drawn inside every mask.
    pub intra_pairs_per_mask: usize,
    /// Factor applied to soft-IoU repulsion weights.
    pub repulsive_scale: f64,
    pub seed: u64,
}

impl Default for MaskSampling {
    fn default() -> Self {
        MaskSampling { samples_per_pair: 5, intra_pairs_per_mask: 32, repulsive_scale: 1.0, seed: 0 }
    }
}

/// Sampled attractive edges inside each mask and repulsive edges between
/// every pair of masks.
///
/// Draws come from [`Prng`] seeded with `sampling.seed`: first, for each mask
/// in order, `intra_pairs_per_mask` pairs of support pixels; then, for each
/// mask pair `(m, n)` with `m < n`, `samples_per_pair` pairs with one pixel
/// from each support. Pairs that land on the same pixel are dropped.
pub fn masks_to_edges(masks: &[SoftMask], sampling: &MaskSampling) -> Result<Vec<Edge>, GridError> {
    let mut rng = Prng::new(sampling.seed);
    let supports: Vec<Vec<usize>> = masks.iter().map(SoftMask::support).collect();
    let mut edges = Vec::new();

    for (mask, support) in masks.iter().zip(&supports) {
        if support.is_empty() {
            continue;
        }
        for _ in 0..sampling.intra_pairs_per_mask {
            let i = support[rng.below(support.len())];
            let j = support[rng.below(support.len())];
            if i != j {
                edges.push(Edge::attractive(i as u32, j as u32, mask_affinity(mask, i, j) as f64));
            }
        }
    }

    for m in 0..masks.len() {
        for n in m + 1..masks.len() {
            let repulsion = match soft_iou_repulsion(&masks[m], &masks[n]) {
                Ok(w) => w,
                Err(GridError::BothMasksEmpty) => {
                    warn!("masks {m} and {n} are both empty, repulsion set to 0");
                    0.0
                }
                Err(e) => return Err(e),
            };
            let (sm, sn) = (&supports[m], &supports[n]);
            if sm.is_empty() || sn.is_empty() {
                continue;
            }
            for _ in 0..sampling.samples_per_pair {
                let i = sm[rng.below(sm.len())];
                let j = sn[rng.below(sn.len())];
                if i != j {
                    edges.push(Edge::repulsive(i as u32, j as u32, sampling.repulsive_scale * repulsion));
                }
            }
        }
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitAffinity {
    Attractive(f64),
    Repulsive(f64),
}

fn check_threshold(threshold: f64) -> Result<(), GridError> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(GridError::BadThreshold(threshold))
    }
}

fn split_affinity(a: f64, threshold: f64) -> SplitAffinity {
    if a >= threshold {
        SplitAffinity::Attractive((a - threshold) / (1.0 - threshold))
    } else {
        SplitAffinity::Repulsive((threshold - a) / threshold)
    }
}

/// Affinities at or above `threshold` become attractive weights rescaled to
/// `[0, 1]`; those below are inverted and rescaled into repulsive weights.
pub fn split_thresholded_affinities(a: &DenseTensor, threshold: f64) -> Result<Vec<SplitAffinity>, GridError> {
    check_threshold(threshold)?;
    Ok(a.data().iter().map(|&x| split_affinity(x as f64, threshold)).collect())
}
