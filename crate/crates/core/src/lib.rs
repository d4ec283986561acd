//! Semantic Mutex Watershed.
//!
//! Greedy joint partitioning and labeling of a weighted graph whose internal
//! nodes are linked by attractive and repulsive edges and, through semantic
//! edges, to one terminal node per label. Edges are visited by descending
//! weight; each is accepted if it keeps the clustering free of internal
//! repulsion and keeps every cluster attached to at most one terminal.
//!
//! Besides the algorithm itself ([`smw`]) the crate ships:
//!
//! * [`oracle`]: exact brute-force verification on small graphs, constraint
//!   checkers and the cut-indicator transform,
//! * [`grid`]: graph construction from dense affinity and probability tensors,
//! * [`baselines`]: separate partition-then-label pipelines for comparison,
//! * [`metrics`]: panoptic quality,
//! * [`synth`]: seeded generators for random graphs and synthetic scenes.

pub mod baselines;
pub mod graph;
pub mod grid;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod smw;
pub mod synth;
pub mod tensor;

pub use graph::{build_graph, sort_edges, Edge, EdgeKind, EdgeOrder, ExtendedGraph, GraphError};
pub use smw::{run_mws, run_smw, ClusterState, SegmentationResult, SmwError};
pub use tensor::{DenseTensor, LabelTensor, Tensor, TensorError};
