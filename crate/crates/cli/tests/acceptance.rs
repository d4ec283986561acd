//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use smw_cli::bench::run_bench;
use smw_core::baselines::mws_max;
use smw_core::grid::{build_grid_graph, GridOptions};
use smw_core::metrics::{panoptic_quality, PanopticLabelMap, PqOptions};
use smw_core::oracle::{
    brute_force_optimum, check_label_constraint, check_mutex_constraint, check_smwc_dense, energy_equivalence,
    induced_segmentation, DenseCut, EnergyMode, EnergyValue,
};
use smw_core::rng::Prng;
use smw_core::smw::{run_smw_with, SmwOptions};
use smw_core::synth::{random_feasible_active_set, random_graph, two_instance_scene, RandomGraphConfig};
use smw_core::{run_mws, run_smw, Tensor};

struct Outcome {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn optimality_and_constraints() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = Prng::new(20_240_501);
    let (mut optimal, mut feasible) = (0, 0);
    const N: usize = 500;
    for _ in 0..N {
        let g = random_graph(&mut rng, &RandomGraphConfig::default());
        let r = run_smw_with(&g, SmwOptions { exact_energy: true });
        let best = brute_force_optimum(&g).expect("graph within oracle limit");
        let (clusters, labels) = induced_segmentation(&g, &best.active);
        if r.exact_energy.as_ref() == Some(&best.energy) && r.node_cluster == clusters && r.cluster_labels == labels {
            optimal += 1;
        }
        // densify: every node of a labeled cluster keeps that cluster's terminal
        let node_labels: Vec<Option<u32>> = (0..g.num_nodes()).map(|i| r.label_of_node(i)).collect();
        let polytope = check_smwc_dense(&g, &DenseCut::from_labeling(&g, &r.active, &node_labels), true);
        if check_mutex_constraint(&g, &r.active) && check_label_constraint(&g, &r.active) && polytope.is_feasible() {
            feasible += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        Outcome {
            name: "optimality on 500 random graphs",
            ok: optimal == N && secs < 60.0,
            detail: format!("{optimal}/{N} optimal in {secs:.1}s"),
        },
        Outcome {
            name: "constraint satisfaction and polytope",
            ok: feasible == N,
            detail: format!("{feasible}/{N} feasible (unlabeled clusters exempt)"),
        },
    )
}

fn mws_special_case() -> Outcome {
    let mut rng = Prng::new(7);
    const N: usize = 200;
    let mut agree = 0;
    for _ in 0..N {
        let g = random_graph(&mut rng, &RandomGraphConfig::label_free());
        let smw = run_smw(&g);
        let mws = run_mws(&g).expect("label-free graph");
        let best = brute_force_optimum(&g).expect("graph within oracle limit");
        let (clusters, _) = induced_segmentation(&g, &best.active);
        if smw.node_cluster == mws.node_cluster && smw.node_cluster == clusters {
            agree += 1;
        }
    }
    Outcome {
        name: "label-free graphs reduce to mutex watershed",
        ok: agree == N,
        detail: format!("{agree}/{N} agree"),
    }
}

fn energy_transform() -> Outcome {
    let mut rng = Prng::new(11);
    const N: usize = 200;
    let mut holds = 0;
    for _ in 0..N {
        let g = random_graph(&mut rng, &RandomGraphConfig::default());
        let active = random_feasible_active_set(&g, &mut rng);
        if let Ok(id) = energy_equivalence(&g, &active, EnergyMode::Exact) {
            if let (EnergyValue::Exact(a), EnergyValue::Exact(c), EnergyValue::Exact(k)) =
                (&id.activeside, &id.cutside, &id.constant)
            {
                if *c == k - a {
                    holds += 1;
                }
            }
        }
    }
    Outcome { name: "keep/cut energy identity (exact)", ok: holds == N, detail: format!("{holds}/{N} hold") }
}

fn joint_beats_separate() -> Outcome {
    const N: u64 = 24;
    let (mut geq, mut greater) = (0, 0);
    for seed in 0..N {
        let scene = two_instance_scene(seed);
        let p = &scene.problem;
        let g = build_grid_graph(&p.affinities, &p.pattern, Some(&p.semantic), &GridOptions::default())
            .expect("scene graph");
        let shape = p.affinities.spatial_shape();
        let stuff: BTreeSet<u32> = scene.stuff.iter().map(|&c| c as u32).collect();
        let pq = |r| {
            let pred = PanopticLabelMap::from_segmentation(r, shape, &stuff);
            panoptic_quality(&pred, &scene.ground_truth, &scene.things, &scene.stuff, PqOptions::default())
                .expect("matching shapes")
                .pq
        };
        let (joint, separate) = (pq(&run_smw(&g)), pq(&mws_max(&g)));
        geq += usize::from(joint >= separate);
        greater += usize::from(joint > separate);
    }
    let n = N as usize;
    Outcome {
        name: "joint labeling beats partition-then-label",
        ok: geq == n && greater * 5 >= n * 4,
        detail: format!("SMW >= MWS-MAX in {geq}/{n}, strictly greater in {greater}/{n}"),
    }
}

fn scaling() -> Outcome {
    let start = Instant::now();
    match run_bench(&[16, 32, 64, 96], 3, 0) {
        Ok(report) => {
            let medians: Vec<String> =
                report.medians.iter().map(|r| format!("{}^3:{:.3}s", r.side, r.seconds)).collect();
            Outcome {
                name: "near-linear scaling (log-log slope <= 1.15)",
                ok: report.slope <= 1.15,
                detail: format!(
                    "slope {:.4} [{}] in {:.0}s",
                    report.slope,
                    medians.join(" "),
                    start.elapsed().as_secs_f64()
                ),
            }
        }
        Err(e) => Outcome { name: "near-linear scaling (log-log slope <= 1.15)", ok: false, detail: e.to_string() },
    }
}

fn metric_sanity() -> Outcome {
    let map = |class: &[i32], instance: &[i32]| {
        let shape = vec![class.len()];
        PanopticLabelMap::new(
            Tensor::new(shape.clone(), class.to_vec()).unwrap(),
            Tensor::new(shape, instance.to_vec()).unwrap(),
        )
        .unwrap()
    };
    let things: BTreeSet<i32> = [1, 2].into_iter().collect();
    let stuff: BTreeSet<i32> = [0].into_iter().collect();
    let gt = map(&[0, 0, 1, 1, 2, 2, 1], &[0, 0, 1, 1, 1, 1, 2]);
    let identity = panoptic_quality(&gt, &gt, &things, &stuff, PqOptions::default()).unwrap().pq;

    // four ground-truth pixels, three of them predicted plus one extra: IoU 3/5
    let gt = map(&[1, 1, 1, 1, 0], &[1, 1, 1, 1, 0]);
    let pred = map(&[-1, 1, 1, 1, 1], &[0, 1, 1, 1, 1]);
    let r = panoptic_quality(&pred, &gt, &things, &stuff, PqOptions::default()).unwrap();
    let class_pq = r.per_class[&1].pq;
    Outcome {
        name: "panoptic quality sanity",
        ok: identity == 1.0 && (class_pq - 0.6).abs() <= 1e-12,
        detail: format!("identity PQ {identity}, 3/5-IoU class PQ {class_pq}"),
    }
}

// --- determinism -----------------------------------------------------------

fn smw(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_smw"))
        .args(args)
        .current_dir(dir)
        .env("SMW_THREADS", "2")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("smw {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

/// Runs every subcommand in `dir` and returns all stdout plus every file
/// written, in a fixed order. Bench timings are dropped.
fn run_all(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut stdout = Vec::new();
    let commands: &[&[&str]] = &[
        &["generate", "graph", "--seed", "5", "--out", "g.smwg"],
        &["generate", "scene", "--seed", "3", "--out", "scene"],
        &["generate", "volume", "--seed", "2", "--side", "6", "--out", "vol"],
        &["segment-graph", "--graph", "g.smwg", "--out", "g.nodes"],
        &[
            "segment-grid",
            "--affinities",
            "scene.affinities",
            "--offsets",
            "scene.offsets.txt",
            "--semantic",
            "scene.semantic",
            "--stuff",
            "0",
            "--out",
            "pred",
        ],
        &[
            "segment-grid",
            "--affinities",
            "vol.affinities",
            "--offsets",
            "vol.offsets.txt",
            "--semantic",
            "vol.semantic",
            "--out",
            "volpred",
        ],
        &["verify", "g.smwg"],
        &["verify", "--random", "40", "--seed", "9"],
        &["eval", "--pred", "pred", "--gt", "scene.gt", "--things", "1,2", "--stuff", "0", "--json", "pq.json"],
        &["baseline", "mws-max", "--graph", "g.smwg", "--out", "base.nodes"],
        &[
            "baseline",
            "mws-max",
            "--affinities",
            "scene.affinities",
            "--offsets",
            "scene.offsets.txt",
            "--semantic",
            "scene.semantic",
            "--stuff",
            "0",
            "--out",
            "mwsmax",
        ],
        &[
            "baseline",
            "cc-sem",
            "--semantic",
            "scene.semantic",
            "--offsets",
            "scene.offsets.txt",
            "--stuff",
            "0",
            "--out",
            "ccsem",
        ],
        &[
            "baseline",
            "cc-aff",
            "--affinities",
            "scene.affinities",
            "--offsets",
            "scene.offsets.txt",
            "--semantic",
            "scene.semantic",
            "--stuff",
            "0",
            "--out",
            "ccaff",
        ],
        &["bench", "--sizes", "4,6", "--repeats", "2", "--out", "bench.csv"],
    ];
    for args in commands {
        let mut out = smw(dir, args)?;
        if args[0] == "bench" {
            out.clear();
        }
        stdout.push((args.join(" "), out));
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    files.sort();
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        if name == "bench.csv" {
            // every column except the timing
            let text = String::from_utf8_lossy(&bytes)
                .lines()
                .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string() + "\n")
                .collect::<String>();
            bytes = text.into_bytes();
        }
        stdout.push((name, bytes));
    }
    Ok(stdout)
}

fn determinism() -> Outcome {
    let name = "byte-identical CLI outputs across runs";
    let result = (|| {
        let (a, b) = (tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?);
        let (ra, rb) = (run_all(a.path())?, run_all(b.path())?);
        if ra.len() != rb.len() {
            return Err(format!("{} vs {} outputs", ra.len(), rb.len()));
        }
        for ((na, xa), (nb, xb)) in ra.iter().zip(&rb) {
            if na != nb || xa != xb {
                return Err(format!("{na} differs"));
            }
        }
        Ok(ra.len())
    })();
    match result {
        Ok(n) => Outcome { name, ok: true, detail: format!("{n} outputs compared") },
        Err(e) => Outcome { name, ok: false, detail: e },
    }
}

fn main() {
    let (optimality, constraints) = optimality_and_constraints();
    let outcomes = [
        optimality,
        constraints,
        mws_special_case(),
        energy_transform(),
        joint_beats_separate(),
        scaling(),
        metric_sanity(),
        determinism(),
    ];
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.ok { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
