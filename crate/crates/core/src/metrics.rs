//! Panoptic quality.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::smw::SegmentationResult;
use crate::tensor::{LabelTensor, Tensor};

/// Class id of void / unlabeled pixels.
pub const VOID: i32 = -1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("classes {0:?} are listed as both thing and stuff")]
    OverlappingClassSets(Vec<i32>),
}

/// Per-pixel class and instance ids. Class [`VOID`] marks unlabeled pixels;
/// stuff segments use instance 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PanopticLabelMap {
    pub class: LabelTensor,
    pub instance: LabelTensor,
}

impl PanopticLabelMap {
    pub fn new(class: LabelTensor, instance: LabelTensor) -> Result<Self, MetricsError> {
        if class.shape() != instance.shape() {
            return Err(MetricsError::ShapeMismatch(format!(
                "class map {:?} vs instance map {:?}",
                class.shape(),
                instance.shape()
            )));
        }
        Ok(PanopticLabelMap { class, instance })
    }

    pub fn shape(&self) -> &[usize] {
        self.class.shape()
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    /// Converts a node segmentation on a grid. Labeled clusters get their
    /// label as class, unlabeled ones [`VOID`]. Instances are numbered from
    /// 1 per class by first pixel occurrence, except stuff classes which
    /// use instance 0.
    pub fn from_segmentation(result: &SegmentationResult, shape: &[usize], stuff: &BTreeSet<u32>) -> Self {
        let mut cluster_instance = vec![0i32; result.num_clusters()];
        let mut next: HashMap<i32, i32> = HashMap::new();
        let mut class = Vec::with_capacity(result.node_cluster.len());
        let mut instance = Vec::with_capacity(result.node_cluster.len());
        for &c in &result.node_cluster {
            let label = result.cluster_labels[c as usize];
            let cls = label.map_or(VOID, |l| l as i32);
            if label.is_some_and(|l| stuff.contains(&l)) {
                instance.push(0);
            } else {
                if cluster_instance[c as usize] == 0 {
                    let n = next.entry(cls).or_insert(0);
                    *n += 1;
                    cluster_instance[c as usize] = *n;
                }
                instance.push(cluster_instance[c as usize]);
            }
            class.push(cls);
        }
        PanopticLabelMap {
            class: Tensor::new(shape.to_vec(), class).expect("node count matches shape"),
            instance: Tensor::new(shape.to_vec(), instance).expect("node count matches shape"),
        }
    }

    /// Instance ids of every non-stuff class form `1..=n`, and stuff pixels
    /// carry instance 0.
    pub fn is_canonical(&self, stuff: &BTreeSet<i32>) -> bool {
        let mut ids: BTreeMap<i32, BTreeSet<i32>> = BTreeMap::new();
        for (&c, &i) in self.class.data().iter().zip(self.instance.data()) {
            if stuff.contains(&c) {
                if i != 0 {
                    return false;
                }
            } else {
                ids.entry(c).or_default().insert(i);
            }
        }
        ids.values().all(|set| set.iter().copied().eq(1..=set.len() as i32))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassStats {
    pub iou_sum: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub pq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PqReport {
    pub per_class: BTreeMap<i32, ClassStats>,
    pub pq: f64,
    pub pq_things: f64,
    pub pq_stuff: f64,
    /// Predicted void pixels lying on labeled ground truth.
    pub unlabeled_pixels: u64,
}

impl PqReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "PQ={}", self.pq);
        let _ = writeln!(out, "PQ_Th={}", self.pq_things);
        let _ = writeln!(out, "PQ_St={}", self.pq_stuff);
        let _ = writeln!(out, "unlabeled_pixels={}", self.unlabeled_pixels);
        for (c, s) in &self.per_class {
            let _ = writeln!(
                out,
                "class.{c}.pq={} class.{c}.tp={} class.{c}.fp={} class.{c}.fn={} class.{c}.iou_sum={}",
                s.pq, s.tp, s.fp, s.fn_, s.iou_sum
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PqOptions {
    /// Let classes that only occur in the prediction enter the means.
    pub include_prediction_only_classes: bool,
}

impl Default for PqOptions {
    fn default() -> Self {
        PqOptions { include_prediction_only_classes: true }
    }
}

type Segment = (i32, i32);

fn segment_of(class: i32, instance: i32, stuff: &BTreeSet<i32>) -> Option<Segment> {
    if class < 0 {
        None
    } else if stuff.contains(&class) {
        Some((class, 0))
    } else {
        Some((class, instance))
    }
}

/// Matches segments of equal class with IoU above one half. Predicted pixels
/// on void ground truth are left out of the union; unmatched predictions
/// lying mostly on void are not counted as false positives.
pub fn panoptic_quality(
    pred: &PanopticLabelMap,
    gt: &PanopticLabelMap,
    things: &BTreeSet<i32>,
    stuff: &BTreeSet<i32>,
    options: PqOptions,
) -> Result<PqReport, MetricsError> {
    if pred.shape() != gt.shape() {
        return Err(MetricsError::ShapeMismatch(format!(
            "prediction {:?} vs ground truth {:?}",
            pred.shape(),
            gt.shape()
        )));
    }
    let overlap: Vec<i32> = things.intersection(stuff).copied().collect();
    if !overlap.is_empty() {
        return Err(MetricsError::OverlappingClassSets(overlap));
    }

    let mut pred_area: HashMap<Segment, u64> = HashMap::new();
    let mut gt_area: HashMap<Segment, u64> = HashMap::new();
    let mut pred_on_void: HashMap<Segment, u64> = HashMap::new();
    let mut intersections: HashMap<(Segment, Segment), u64> = HashMap::new();
    let mut unlabeled_pixels = 0;

    let pixels = pred.class.data().iter().zip(pred.instance.data()).zip(gt.class.data().iter().zip(gt.instance.data()));
    for ((&pc, &pi), (&gc, &gi)) in pixels {
        let p = segment_of(pc, pi, stuff);
        let g = segment_of(gc, gi, stuff);
        if let Some(p) = p {
            *pred_area.entry(p).or_default() += 1;
        }
        if let Some(g) = g {
            *gt_area.entry(g).or_default() += 1;
        }
        match (p, g) {
            (Some(p), Some(g)) => *intersections.entry((p, g)).or_default() += 1,
            (Some(p), None) => *pred_on_void.entry(p).or_default() += 1,
            (None, Some(_)) => unlabeled_pixels += 1,
            (None, None) => {}
        }
    }

    let mut per_class: BTreeMap<i32, ClassStats> = BTreeMap::new();
    let mut matched_pred: BTreeSet<Segment> = BTreeSet::new();
    let mut matched_gt: BTreeSet<Segment> = BTreeSet::new();
    let mut pairs: Vec<_> = intersections.iter().filter(|((p, g), _)| p.0 == g.0).collect();
    pairs.sort();
    for (&(p, g), &inter) in pairs {
        let union = pred_area[&p] + gt_area[&g] - inter - pred_on_void.get(&p).copied().unwrap_or(0);
        let iou = inter as f64 / union as f64;
        if iou > 0.5 {
            let stats = per_class.entry(p.0).or_default();
            stats.tp += 1;
            stats.iou_sum += iou;
            matched_pred.insert(p);
            matched_gt.insert(g);
        }
    }
    let gt_classes: BTreeSet<i32> = gt_area.keys().map(|s| s.0).collect();
    for g in gt_area.keys().filter(|g| !matched_gt.contains(g)) {
        per_class.entry(g.0).or_default().fn_ += 1;
    }
    for (p, &area) in pred_area.iter().filter(|(p, _)| !matched_pred.contains(p)) {
        if pred_on_void.get(p).copied().unwrap_or(0) * 2 > area {
            continue;
        }
        per_class.entry(p.0).or_default().fp += 1;
    }
    for stats in per_class.values_mut() {
        let denom = stats.tp as f64 + 0.5 * stats.fp as f64 + 0.5 * stats.fn_ as f64;
        stats.pq = if denom > 0.0 { stats.iou_sum / denom } else { 0.0 };
    }

    let included = |c: &i32| options.include_prediction_only_classes || gt_classes.contains(c);
    let mean = |filter: &dyn Fn(&i32) -> bool| {
        let vals: Vec<f64> = per_class.iter().filter(|(c, _)| included(c) && filter(c)).map(|(_, s)| s.pq).collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };
    let pq = mean(&|_| true);
    let pq_things = mean(&|c| things.contains(c));
    let pq_stuff = mean(&|c| stuff.contains(c));
    Ok(PqReport { per_class, pq, pq_things, pq_stuff, unlabeled_pixels })
}
