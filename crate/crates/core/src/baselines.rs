//! Separate partition-then-label baselines.

use std::collections::BTreeSet;

use crate::graph::{EdgeKind, ExtendedGraph};
use crate::grid::{GridError, OffsetPattern, Polarity};
use crate::metrics::PanopticLabelMap;
use crate::smw::{run_smw, F64Bits, SegmentationResult};
use crate::tensor::{DenseTensor, GridShape, Tensor};

/// Mutex watershed on the internal edges only, then every cluster takes the
/// label of its strongest incident semantic edge (lowest label on ties).
///
/// Semantic edges agreeing with their cluster's final label are reported
/// active.
pub fn mws_max(g: &ExtendedGraph) -> SegmentationResult {
    let (internal, kept) = g.without_semantic();
    let partition = run_smw(&internal);

    let mut best: Vec<Option<(f64, u32)>> = vec![None; partition.num_clusters()];
    for e in g.edges() {
        if let EdgeKind::Semantic(l) = e.kind {
            let slot = &mut best[partition.node_cluster[e.u as usize] as usize];
            let better = match *slot {
                None => true,
                Some((w, bl)) => e.weight > w || (e.weight == w && l < bl),
            };
            if better {
                *slot = Some((e.weight, l));
            }
        }
    }
    let cluster_labels: Vec<Option<u32>> = best.iter().map(|b| b.map(|(_, l)| l)).collect();

    let mut active = vec![false; g.num_edges()];
    for (new_id, &old_id) in kept.iter().enumerate() {
        active[old_id] = partition.active[new_id];
    }
    let mut energy = 0.0;
    for (id, e) in g.edges().iter().enumerate() {
        if let EdgeKind::Semantic(l) = e.kind {
            active[id] = cluster_labels[partition.node_cluster[e.u as usize] as usize] == Some(l);
        }
        if active[id] {
            energy += e.weight;
        }
    }
    SegmentationResult {
        node_cluster: partition.node_cluster,
        cluster_labels,
        active,
        energy: F64Bits::new(energy),
        exact_energy: None,
    }
}

/// Per-pixel argmax class, lowest class on ties.
fn argmax_classes(semantic: &DenseTensor) -> Vec<u32> {
    let k = semantic.shape()[0];
    let n: usize = semantic.spatial_shape().iter().product();
    (0..n)
        .map(|i| {
            let mut best = 0;
            for c in 1..k {
                if semantic.channel(c)[i] > semantic.channel(best)[i] {
                    best = c;
                }
            }
            best as u32
        })
        .collect()
}

/// Connected components over the given offsets; components numbered by
/// first pixel occurrence.
fn grid_components(
    grid: &GridShape,
    offsets: &[&[isize]],
    mut joined: impl FnMut(usize, usize, usize) -> bool,
) -> Vec<u32> {
    let n = grid.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (c, delta) in offsets.iter().enumerate() {
        for i in 0..n {
            if let Some(j) = grid.shifted(i, delta) {
                if joined(c, i, j) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut ids = vec![u32::MAX; n];
    let mut next = 0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = find(&mut parent, i);
        if ids[r] == u32::MAX {
            ids[r] = next;
            next += 1;
        }
        out.push(ids[r]);
    }
    out
}

fn components_to_map(
    shape: &[usize],
    components: &[u32],
    component_class: &[u32],
    stuff: &BTreeSet<u32>,
) -> PanopticLabelMap {
    let result = SegmentationResult {
        node_cluster: components.to_vec(),
        cluster_labels: component_class.iter().map(|&c| Some(c)).collect(),
        active: Vec::new(),
        energy: F64Bits::new(0.0),
        exact_energy: None,
    };
    PanopticLabelMap::from_segmentation(&result, shape, stuff)
}

/// Connected components of the argmax class map. Pixels join when they are
/// neighbours under `connectivity` (polarity ignored) and share a class.
/// Stuff classes are emitted with instance 0.
pub fn cc_semantic(
    semantic: &DenseTensor,
    connectivity: &OffsetPattern,
    stuff: &BTreeSet<u32>,
) -> Result<PanopticLabelMap, GridError> {
    if semantic.shape().first().is_none_or(|&k| k == 0) {
        return Err(GridError::ShapeMismatch("semantic tensor needs at least one class".into()));
    }
    let grid = GridShape::new(semantic.spatial_shape());
    if connectivity.ndim().is_some_and(|d| d != grid.ndim()) {
        return Err(GridError::ShapeMismatch("connectivity dimensionality differs from the grid".into()));
    }
    let classes = argmax_classes(semantic);
    let offsets: Vec<&[isize]> = connectivity.offsets().iter().map(|o| o.delta.as_slice()).collect();
    let components = grid_components(&grid, &offsets, |_, i, j| classes[i] == classes[j]);
    let num = components.iter().max().map_or(0, |&m| m as usize + 1);
    let mut component_class = vec![0; num];
    for (i, &c) in components.iter().enumerate() {
        component_class[c as usize] = classes[i];
    }
    Ok(components_to_map(grid.dims(), &components, &component_class, stuff))
}

/// Connected components of the attractive affinity channels binarized at
/// `threshold` (joined when `affinity >= threshold`). Each component takes
/// the most frequent argmax class of its pixels, lowest class on ties.
pub fn cc_affinity(
    affinities: &DenseTensor,
    pattern: &OffsetPattern,
    threshold: f64,
    semantic: &DenseTensor,
    stuff: &BTreeSet<u32>,
) -> Result<PanopticLabelMap, GridError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(GridError::BadThreshold(threshold));
    }
    if affinities.shape().first() != Some(&pattern.len()) {
        return Err(GridError::ShapeMismatch(format!(
            "affinity tensor {:?} needs {} channels",
            affinities.shape(),
            pattern.len()
        )));
    }
    if semantic.spatial_shape() != affinities.spatial_shape() || semantic.shape()[0] == 0 {
        return Err(GridError::ShapeMismatch(format!(
            "semantic {:?} vs affinities {:?}",
            semantic.shape(),
            affinities.shape()
        )));
    }
    let grid = GridShape::new(affinities.spatial_shape());
    if pattern.ndim().is_some_and(|d| d != grid.ndim()) {
        return Err(GridError::ShapeMismatch("offset dimensionality differs from the grid".into()));
    }
    let channels: Vec<usize> =
        (0..pattern.len()).filter(|&c| pattern.offsets()[c].polarity == Polarity::Attractive).collect();
    let offsets: Vec<&[isize]> = channels.iter().map(|&c| pattern.offsets()[c].delta.as_slice()).collect();
    let components = grid_components(&grid, &offsets, |k, i, _| affinities.channel(channels[k])[i] as f64 >= threshold);

    let classes = argmax_classes(semantic);
    let k = semantic.shape()[0];
    let num = components.iter().max().map_or(0, |&m| m as usize + 1);
    let mut votes = vec![0u32; num * k];
    for (i, &c) in components.iter().enumerate() {
        votes[c as usize * k + classes[i] as usize] += 1;
    }
    let component_class: Vec<u32> = votes
        .chunks(k)
        .map(|v| {
            let mut best = 0;
            for c in 1..k {
                if v[c] > v[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect();
    Ok(components_to_map(grid.dims(), &components, &component_class, stuff))
}

/// Builds a probability tensor with all mass on one class per pixel.
pub fn one_hot(classes: &[u32], num_classes: usize, spatial: &[usize]) -> DenseTensor {
    let n = classes.len();
    let mut data = vec![0.0f32; num_classes * n];
    for (i, &c) in classes.iter().enumerate() {
        data[c as usize * n + i] = 1.0;
    }
    let mut shape = vec![num_classes];
    shape.extend_from_slice(spatial);
    Tensor::new(shape, data).expect("one-hot shape")
}
