use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use smw_core::baselines::{cc_affinity, cc_semantic, mws_max};
use smw_core::grid::{build_grid_graph, build_thresholded_grid_graph, GridOptions};
use smw_core::metrics::{panoptic_quality, PanopticLabelMap, PqOptions};
use smw_core::oracle::{
    brute_force_optimum, check_label_constraint, check_mutex_constraint, check_smwc_dense, DenseCut, MAX_ORACLE_EDGES,
};
use smw_core::rng::Prng;
use smw_core::smw::{run_smw_with, SmwOptions};
use smw_core::synth::{random_graph, synthetic_volume, two_instance_scene, GridProblem, RandomGraphConfig};
use smw_core::{ExtendedGraph, SegmentationResult};

use crate::args::*;
use crate::bench::run_bench;
use crate::formats::*;
use crate::CliError;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::SegmentGraph(a) => segment_graph(&a),
        Command::SegmentGrid(a) => segment_grid(&a),
        Command::Verify(a) => verify(&a),
        Command::Bench(a) => bench(&a),
        Command::Eval(a) => eval(&a),
        Command::Baseline(a) => baseline(&a),
        Command::Generate(a) => generate(&a),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    write_file(path, serde_json::to_string_pretty(value).expect("json serializes") + "\n")
}

fn segment_graph(a: &SegmentGraphArgs) -> Result<(), CliError> {
    let g = read_graph(&a.graph)?;
    let start = Instant::now();
    let result = run_smw_with(&g, SmwOptions { exact_energy: true });
    let elapsed = start.elapsed();
    write_file(&a.out, write_node_file(&result))?;

    let mut summary = json!({
        "num_nodes": g.num_nodes(),
        "num_edges": g.num_edges(),
        "num_clusters": result.num_clusters(),
        "energy": result.energy.get(),
        "exact_energy": result.exact_energy.as_ref().map(|e| e.to_string()),
    });
    if a.timing {
        summary["runtime_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }
    let path = a.summary.clone().unwrap_or_else(|| with_suffix(&a.out, ".summary.json"));
    write_json(&path, &summary)
}

fn load_semantic(path: Option<&PathBuf>) -> Result<Option<smw_core::DenseTensor>, CliError> {
    path.map(|p| read_dense(p)).transpose()
}

fn segment_grid(a: &SegmentGridArgs) -> Result<(), CliError> {
    let affinities = read_dense(&a.input.affinities)?;
    let pattern = read_offsets(&a.input.offsets)?;
    let semantic = load_semantic(a.input.semantic.as_ref())?;
    let options = GridOptions {
        semantic_epsilon: a.semantic_epsilon,
        stuff_classes: if a.stuff_affinity { a.input.stuff.clone() } else { Vec::new() },
    };
    if a.stuff_affinity && semantic.is_none() {
        return Err(CliError::Invalid("--stuff-affinity needs --semantic".into()));
    }
    let g = match a.threshold {
        Some(t) => build_thresholded_grid_graph(&affinities, &pattern, t, semantic.as_ref(), &options)?,
        None => build_grid_graph(&affinities, &pattern, semantic.as_ref(), &options)?,
    };
    let start = Instant::now();
    let result = run_smw_with(&g, SmwOptions { exact_energy: false });
    let elapsed = start.elapsed();

    let stuff: BTreeSet<u32> = a.input.stuff.iter().copied().collect();
    let map = PanopticLabelMap::from_segmentation(&result, affinities.spatial_shape(), &stuff);
    write_label_map(&a.out, &map)?;
    let mut summary = json!({
        "shape": affinities.spatial_shape(),
        "num_edges": g.num_edges(),
        "num_clusters": result.num_clusters(),
        "energy": result.energy.get(),
    });
    if a.timing {
        summary["runtime_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }
    write_json(&with_suffix(&a.out, ".summary.json"), &summary)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub num_nodes: usize,
    pub num_labels: usize,
    pub num_edges: usize,
    /// `None` when the optimality comparison was skipped.
    pub optimal: Option<bool>,
    pub smw_energy: String,
    pub oracle_energy: Option<String>,
    pub mutex_ok: bool,
    pub label_ok: bool,
    pub polytope: String,
    pub polytope_ok: bool,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.optimal != Some(false) && self.mutex_ok && self.label_ok && self.polytope_ok
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Runs the greedy solver on `g` and checks it against the oracle (unless
/// `constraints_only`) and against both constraints and the polytope.
pub fn verify_graph(
    g: &ExtendedGraph,
    constraints_only: bool,
    exempt_unlabeled: bool,
) -> Result<VerifyOutcome, CliError> {
    if !constraints_only && g.num_edges() > MAX_ORACLE_EDGES {
        return Err(CliError::OracleSize(g.num_edges()));
    }
    let r: SegmentationResult = run_smw_with(g, SmwOptions { exact_energy: true });
    let smw_energy = r.exact_energy.clone().expect("exact energy requested");
    let (optimal, oracle_energy) = if constraints_only {
        (None, None)
    } else {
        let best = brute_force_optimum(g)?;
        (Some(best.energy == smw_energy && best.active == r.active), Some(best.energy.to_string()))
    };
    let labels: Vec<Option<u32>> = (0..g.num_nodes()).map(|i| r.label_of_node(i)).collect();
    let report = check_smwc_dense(g, &DenseCut::from_labeling(g, &r.active, &labels), exempt_unlabeled);
    Ok(VerifyOutcome {
        num_nodes: g.num_nodes(),
        num_labels: g.num_labels(),
        num_edges: g.num_edges(),
        optimal,
        smw_energy: smw_energy.to_string(),
        oracle_energy,
        mutex_ok: check_mutex_constraint(g, &r.active),
        label_ok: check_label_constraint(g, &r.active),
        polytope: report.to_string(),
        polytope_ok: report.is_feasible(),
    })
}

fn verdict(o: &VerifyOutcome) -> &'static str {
    match o.optimal {
        None => "SKIPPED",
        Some(true) => "OPTIMAL",
        Some(false) => "SUBOPTIMAL",
    }
}

fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let exempt = !a.strict_assignment;
    let mut out = String::new();
    let failures;
    if let Some(path) = &a.graph {
        let g = read_graph(path)?;
        let o = verify_graph(&g, a.constraints_only, exempt)?;
        let _ = writeln!(out, "nodes={} labels={} edges={}", o.num_nodes, o.num_labels, o.num_edges);
        let _ = writeln!(out, "smw_energy={}", o.smw_energy);
        if let Some(e) = &o.oracle_energy {
            let _ = writeln!(out, "oracle_energy={e}");
        }
        let _ = writeln!(out, "verdict={}", verdict(&o));
        let _ = writeln!(out, "mutex_constraint={}", pass(o.mutex_ok));
        let _ = writeln!(out, "label_constraint={}", pass(o.label_ok));
        let _ = writeln!(out, "polytope={}", o.polytope);
        failures = usize::from(!o.passed());
    } else {
        let count = a.random.unwrap_or(0);
        let mut rng = Prng::new(a.seed);
        let graphs: Vec<ExtendedGraph> =
            (0..count).map(|_| random_graph(&mut rng, &RandomGraphConfig::default())).collect();
        let outcomes =
            graphs.par_iter().map(|g| verify_graph(g, a.constraints_only, exempt)).collect::<Result<Vec<_>, _>>()?;
        for (i, o) in outcomes.iter().enumerate() {
            let _ = writeln!(
                out,
                "graph={i} nodes={} labels={} edges={} verdict={} mutex={} label={} polytope={}",
                o.num_nodes,
                o.num_labels,
                o.num_edges,
                verdict(o),
                pass(o.mutex_ok),
                pass(o.label_ok),
                pass(o.polytope_ok)
            );
        }
        let optimal = outcomes.iter().filter(|o| o.optimal == Some(true)).count();
        let constraints = outcomes.iter().filter(|o| o.mutex_ok && o.label_ok).count();
        let polytope = outcomes.iter().filter(|o| o.polytope_ok).count();
        let _ = writeln!(
            out,
            "summary graphs={count} optimal={} constraints={constraints} polytope={polytope}",
            if a.constraints_only { "skipped".to_string() } else { optimal.to_string() }
        );
        failures = outcomes.iter().filter(|o| !o.passed()).count();
    }
    print!("{out}");
    if failures > 0 {
        return Err(CliError::CheckFailed(format!("{failures} graph(s) failed verification")));
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<(), CliError> {
    let report = run_bench(&a.sizes, a.repeats, a.seed)?;
    match &a.out {
        Some(path) => write_file(path, report.to_csv())?,
        None => print!("{}", report.to_csv()),
    }
    println!("slope={:.4}", report.slope);
    if let Some(max) = a.max_slope {
        if report.slope > max {
            return Err(CliError::CheckFailed(format!("slope {:.4} exceeds {max}", report.slope)));
        }
    }
    Ok(())
}

fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let pred = read_label_map(&a.pred)?;
    let gt = read_label_map(&a.gt)?;
    let things: BTreeSet<i32> = a.things.iter().copied().collect();
    let stuff: BTreeSet<i32> = a.stuff.iter().copied().collect();
    let options = PqOptions { include_prediction_only_classes: !a.exclude_prediction_only };
    let report = panoptic_quality(&pred, &gt, &things, &stuff, options)?;
    print!("{}", report.to_key_value());
    if let Some(path) = &a.json {
        write_json(path, &serde_json::to_value(&report).expect("report serializes"))?;
    }
    Ok(())
}

fn require<'a>(value: &'a Option<PathBuf>, flag: &str, method: &str) -> Result<&'a PathBuf, CliError> {
    value.as_ref().ok_or_else(|| CliError::Invalid(format!("{method} needs --{flag}")))
}

fn baseline(a: &BaselineArgs) -> Result<(), CliError> {
    let stuff: BTreeSet<u32> = a.stuff.iter().copied().collect();
    let map = match a.method {
        BaselineMethod::MwsMax => {
            if let Some(path) = &a.graph {
                let result = mws_max(&read_graph(path)?);
                return write_file(&a.out, write_node_file(&result));
            }
            let affinities = read_dense(require(&a.affinities, "affinities", "mws-max")?)?;
            let pattern = read_offsets(require(&a.offsets, "offsets", "mws-max")?)?;
            let semantic = load_semantic(a.semantic.as_ref())?;
            let g = build_grid_graph(&affinities, &pattern, semantic.as_ref(), &GridOptions::default())?;
            PanopticLabelMap::from_segmentation(&mws_max(&g), affinities.spatial_shape(), &stuff)
        }
        BaselineMethod::CcSem => {
            let semantic = read_dense(require(&a.semantic, "semantic", "cc-sem")?)?;
            let pattern = read_offsets(require(&a.offsets, "offsets", "cc-sem")?)?;
            cc_semantic(&semantic, &pattern, &stuff)?
        }
        BaselineMethod::CcAff => {
            let affinities = read_dense(require(&a.affinities, "affinities", "cc-aff")?)?;
            let pattern = read_offsets(require(&a.offsets, "offsets", "cc-aff")?)?;
            let semantic = read_dense(require(&a.semantic, "semantic", "cc-aff")?)?;
            cc_affinity(&affinities, &pattern, a.threshold, &semantic, &stuff)?
        }
    };
    write_label_map(&a.out, &map)
}

fn write_problem(prefix: &Path, p: &GridProblem) -> Result<(), CliError> {
    write_tensor(&with_suffix(prefix, ".affinities"), &p.affinities)?;
    write_tensor(&with_suffix(prefix, ".semantic"), &p.semantic)?;
    write_file(&with_suffix(prefix, ".offsets.txt"), write_offsets(&p.pattern))
}

fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    match a.kind {
        GenerateKind::Graph => {
            let g = random_graph(&mut Prng::new(a.seed), &RandomGraphConfig::default());
            write_file(&a.out, write_graph(&g))
        }
        GenerateKind::Scene => {
            let scene = two_instance_scene(a.seed);
            write_problem(&a.out, &scene.problem)?;
            write_label_map(&with_suffix(&a.out, ".gt"), &scene.ground_truth)
        }
        GenerateKind::Volume => {
            if a.side == 0 {
                return Err(CliError::Invalid("--side must be positive".into()));
            }
            write_problem(&a.out, &synthetic_volume(a.side, a.seed))
        }
    }
}
