//! On-disk formats.
//!
//! * Graph text files (`SMWG v1`): a header `SMWG v1 <num_nodes> <num_labels>`
//!   followed by one edge per line, `A u v w`, `R u v w` or `S u label w`.
//!   `#` starts a comment; blank lines are ignored.
//! * Tensors: `<name>.json` holding `{"dtype", "shape", "order": "C",
//!   "endian": "LE"}` next to `<name>.bin` with the raw little-endian payload.
//! * Offset files: one offset per line, `A d0 d1 ...` or `R d0 d1 ...`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smw_core::graph::{build_graph, Edge, EdgeKind, ExtendedGraph};
use smw_core::grid::{Offset, OffsetPattern, Polarity};
use smw_core::metrics::PanopticLabelMap;
use smw_core::{DenseTensor, LabelTensor, SegmentationResult, Tensor};

use crate::CliError;

pub fn parse_graph(text: &str) -> Result<ExtendedGraph, CliError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: String| CliError::Parse { line: line_no, msg };
        if header.is_none() {
            if fields.len() != 4 || fields[0] != "SMWG" || fields[1] != "v1" {
                return Err(err(format!("expected header `SMWG v1 <nodes> <labels>`, got `{line}`")));
            }
            let n = fields[2].parse().map_err(|_| err(format!("bad node count `{}`", fields[2])))?;
            let k = fields[3].parse().map_err(|_| err(format!("bad label count `{}`", fields[3])))?;
            header = Some((n, k));
            continue;
        }
        if fields.len() != 4 {
            return Err(err(format!("expected `<A|R|S> <u> <v|label> <weight>`, got `{line}`")));
        }
        let u: u32 = fields[1].parse().map_err(|_| err(format!("bad node id `{}`", fields[1])))?;
        let v: u32 = fields[2].parse().map_err(|_| err(format!("bad node or label id `{}`", fields[2])))?;
        let w: f64 = fields[3].parse().map_err(|_| err(format!("bad weight `{}`", fields[3])))?;
        let edge = match fields[0] {
            "A" => Edge::attractive(u, v, w),
            "R" => Edge::repulsive(u, v, w),
            "S" => Edge::semantic(u, v, w),
            other => return Err(err(format!("unknown edge type `{other}`"))),
        };
        edges.push(edge);
        edge_lines.push(line_no);
    }
    let (n, k) = header.ok_or(CliError::Parse { line: 1, msg: "missing `SMWG v1` header".into() })?;
    build_graph(n, k, edges).map_err(|e| {
        let line = match &e {
            smw_core::GraphError::OutOfRangeEndpoint { edge, .. }
            | smw_core::GraphError::NegativeOrNonFiniteWeight { edge, .. }
            | smw_core::GraphError::LabelOutOfRange { edge, .. }
            | smw_core::GraphError::SelfLoop { edge, .. } => edge_lines[*edge],
            smw_core::GraphError::TooLarge(_) => 1,
        };
        CliError::Parse { line, msg: e.to_string() }
    })
}

pub fn write_graph(g: &ExtendedGraph) -> String {
    let mut out = format!("SMWG v1 {} {}\n", g.num_nodes(), g.num_labels());
    for e in g.edges() {
        let _ = match e.kind {
            EdgeKind::Attractive => writeln!(out, "A {} {} {}", e.u, e.v, e.weight),
            EdgeKind::Repulsive => writeln!(out, "R {} {} {}", e.u, e.v, e.weight),
            EdgeKind::Semantic(l) => writeln!(out, "S {} {} {}", e.u, l, e.weight),
        };
    }
    out
}

pub fn read_graph(path: &Path) -> Result<ExtendedGraph, CliError> {
    parse_graph(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)
}

/// `node cluster label` lines, label `-1` for unlabeled clusters.
pub fn write_node_file(result: &SegmentationResult) -> String {
    let mut out = String::new();
    for (node, &cluster) in result.node_cluster.iter().enumerate() {
        let label = result.cluster_labels[cluster as usize].map_or(-1, |l| l as i64);
        let _ = writeln!(out, "{node} {cluster} {label}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorHeader {
    pub dtype: String,
    pub shape: Vec<usize>,
    pub order: String,
    pub endian: String,
}

/// Element types storable in the tensor format.
pub trait TensorElement: Copy {
    const DTYPE: &'static str;
    fn to_le(self) -> [u8; 4];
    fn from_le(bytes: [u8; 4]) -> Self;
}

impl TensorElement for f32 {
    const DTYPE: &'static str = "f32";
    fn to_le(self) -> [u8; 4] {
        self.to_le_bytes()
    }
    fn from_le(bytes: [u8; 4]) -> Self {
        f32::from_le_bytes(bytes)
    }
}

impl TensorElement for i32 {
    const DTYPE: &'static str = "i32";
    fn to_le(self) -> [u8; 4] {
        self.to_le_bytes()
    }
    fn from_le(bytes: [u8; 4]) -> Self {
        i32::from_le_bytes(bytes)
    }
}

/// Strips a trailing `.json` or `.bin` so either file or the bare prefix
/// can name a tensor.
pub fn tensor_prefix(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("bin") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_tensor<T: TensorElement>(prefix: &Path, t: &Tensor<T>) -> Result<(), CliError> {
    let prefix = tensor_prefix(prefix);
    let header =
        TensorHeader { dtype: T::DTYPE.into(), shape: t.shape().to_vec(), order: "C".into(), endian: "LE".into() };
    let json = serde_json::to_string_pretty(&header).expect("header serializes") + "\n";
    let json_path = with_suffix(&prefix, ".json");
    fs::write(&json_path, json).map_err(|e| CliError::io(&json_path, e))?;
    let mut payload = Vec::with_capacity(t.len() * 4);
    for &x in t.data() {
        payload.extend_from_slice(&x.to_le());
    }
    let bin_path = with_suffix(&prefix, ".bin");
    fs::write(&bin_path, payload).map_err(|e| CliError::io(&bin_path, e))
}

pub fn read_tensor<T: TensorElement>(path: &Path) -> Result<Tensor<T>, CliError> {
    let prefix = tensor_prefix(path);
    let json_path = with_suffix(&prefix, ".json");
    let text = fs::read_to_string(&json_path).map_err(|e| CliError::io(&json_path, e))?;
    let header: TensorHeader = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse { line: e.line(), msg: format!("{}: {e}", json_path.display()) })?;
    if header.dtype != T::DTYPE || header.order != "C" || header.endian != "LE" {
        return Err(CliError::Parse {
            line: 1,
            msg: format!(
                "{}: expected dtype {} order C endian LE, got {} {} {}",
                json_path.display(),
                T::DTYPE,
                header.dtype,
                header.order,
                header.endian
            ),
        });
    }
    let bin_path = with_suffix(&prefix, ".bin");
    let payload = fs::read(&bin_path).map_err(|e| CliError::io(&bin_path, e))?;
    let expected = header.shape.iter().product::<usize>() * 4;
    if payload.len() != expected {
        return Err(CliError::Shape(format!(
            "{}: payload has {} bytes, shape {:?} needs {expected}",
            bin_path.display(),
            payload.len(),
            header.shape
        )));
    }
    let data = payload.chunks_exact(4).map(|c| T::from_le([c[0], c[1], c[2], c[3]])).collect();
    Tensor::new(header.shape, data).map_err(|e| CliError::Shape(e.to_string()))
}

pub fn read_dense(path: &Path) -> Result<DenseTensor, CliError> {
    read_tensor::<f32>(path)
}

/// Writes `<prefix>.class` and `<prefix>.instance` tensors.
pub fn write_label_map(prefix: &Path, map: &PanopticLabelMap) -> Result<(), CliError> {
    write_tensor(&with_suffix(prefix, ".class"), &map.class)?;
    write_tensor(&with_suffix(prefix, ".instance"), &map.instance)
}

pub fn read_label_map(prefix: &Path) -> Result<PanopticLabelMap, CliError> {
    let class: LabelTensor = read_tensor(&with_suffix(prefix, ".class"))?;
    let instance: LabelTensor = read_tensor(&with_suffix(prefix, ".instance"))?;
    PanopticLabelMap::new(class, instance).map_err(|e| CliError::Shape(e.to_string()))
}

pub fn parse_offsets(text: &str) -> Result<OffsetPattern, CliError> {
    let mut offsets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Parse { line: idx + 1, msg };
        let mut fields = line.split_whitespace();
        let polarity = match fields.next() {
            Some("A") => Polarity::Attractive,
            Some("R") => Polarity::Repulsive,
            other => return Err(err(format!("expected A or R, got {other:?}"))),
        };
        let delta = fields
            .map(|f| f.parse::<isize>().map_err(|_| err(format!("bad offset component `{f}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        offsets.push(Offset { delta, polarity });
    }
    OffsetPattern::new(offsets).map_err(|e| CliError::Parse { line: 0, msg: e.to_string() })
}

pub fn write_offsets(pattern: &OffsetPattern) -> String {
    let mut out = String::new();
    for o in pattern.offsets() {
        out.push(match o.polarity {
            Polarity::Attractive => 'A',
            Polarity::Repulsive => 'R',
        });
        for d in &o.delta {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
    }
    out
}

pub fn read_offsets(path: &Path) -> Result<OffsetPattern, CliError> {
    parse_offsets(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example_graph() {
        let g = parse_graph("# two nodes\nSMWG v1 2 2\nS 0 0 0.9\nS 1 1 0.8  # trailing\n\nA 0 1 0.7\n").unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.edge(1), &Edge::semantic(1, 1, 0.8));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_graph("SMWG v1 2 0\nA 0 1 0.5\nX 0 1 0.5\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }));
        let err = parse_graph("SMWG v1 2 0\n\nA 0 1 -0.5\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }));
        let err = parse_graph("SMWG v2 2 0\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 1, .. }));
        assert!(matches!(parse_graph(""), Err(CliError::Parse { .. })));
    }

    #[test]
    fn offsets_round_trip() {
        let p = parse_offsets("A 0 1\nA 1 0\nR -3 0 # long range\n").unwrap();
        assert_eq!(parse_offsets(&write_offsets(&p)).unwrap(), p);
        assert!(parse_offsets("A 0 0\n").is_err());
    }
}
