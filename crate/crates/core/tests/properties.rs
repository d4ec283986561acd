use proptest::prelude::*;
use smw_core::graph::sort_edges;
use smw_core::oracle::{
    brute_force_exhaustive, brute_force_optimum, check_label_constraint, check_mutex_constraint, check_smwc_dense,
    induced_segmentation, DenseCut,
};
use smw_core::rng::Prng;
use smw_core::smw::{run_smw_ordered, run_smw_with, SmwOptions, SmwRun};
use smw_core::synth::{random_graph, RandomGraphConfig};
use smw_core::{run_mws, run_smw};

fn graph_for(seed: u64, config: &RandomGraphConfig) -> smw_core::ExtendedGraph {
    random_graph(&mut Prng::new(seed), config)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smw_matches_brute_force(seed in any::<u64>()) {
        let g = graph_for(seed, &RandomGraphConfig { max_edges: 12, ..Default::default() });
        let r = run_smw_with(&g, SmwOptions { exact_energy: true });
        let (best, _) = brute_force_exhaustive(&g).unwrap();
        prop_assert_eq!(r.exact_energy.as_ref(), Some(&best.energy));
        prop_assert_eq!(&r.active, &best.active);
        let (clusters, labels) = induced_segmentation(&g, &best.active);
        prop_assert_eq!(&r.node_cluster, &clusters);
        prop_assert_eq!(&r.cluster_labels, &labels);
    }

    #[test]
    fn output_satisfies_constraints(seed in any::<u64>()) {
        let g = graph_for(seed, &RandomGraphConfig { max_nodes: 20, max_labels: 4, max_edges: 80, ..Default::default() });
        let r = run_smw(&g);
        prop_assert!(check_mutex_constraint(&g, &r.active));
        prop_assert!(check_label_constraint(&g, &r.active));
        let labels: Vec<Option<u32>> = (0..g.num_nodes()).map(|i| r.label_of_node(i)).collect();
        let report = check_smwc_dense(&g, &DenseCut::from_labeling(&g, &r.active, &labels), true);
        prop_assert!(report.is_feasible(), "{}", report);

        // per-edge consistency of the active set with the partition
        for (e, &a) in g.edges().iter().zip(&r.active) {
            let (cu, cv) = (r.node_cluster[e.u as usize], r.node_cluster[e.v as usize]);
            match e.kind {
                smw_core::EdgeKind::Attractive => prop_assert_eq!(a, cu == cv),
                smw_core::EdgeKind::Repulsive => prop_assert_eq!(a, cu != cv),
                smw_core::EdgeKind::Semantic(l) => if a { prop_assert_eq!(r.cluster_labels[cu as usize], Some(l)) },
            }
        }
    }

    #[test]
    fn label_free_graphs_reduce_to_mws(seed in any::<u64>()) {
        let g = graph_for(seed, &RandomGraphConfig::label_free());
        let smw = run_smw(&g);
        prop_assert_eq!(&run_mws(&g).unwrap(), &smw);
        prop_assert_eq!(&brute_force_optimum(&g).unwrap().active, &smw.active);
    }

    #[test]
    fn replaying_a_prefix_reproduces_the_run(seed in any::<u64>(), cut in 0usize..100) {
        let g = graph_for(seed, &RandomGraphConfig { max_nodes: 12, max_edges: 40, ..Default::default() });
        let order = sort_edges(&g);
        let full = run_smw_ordered(&g, &order, SmwOptions { exact_energy: true });
        let k = cut.min(order.len());
        let mut replay = SmwRun::new(&g);
        for id in order.iter().take(k) {
            if full.active[id] {
                replay.apply(id).unwrap();
            }
        }
        for id in order.iter().skip(k) {
            replay.process(id);
        }
        prop_assert_eq!(replay.finish(Some(&order)), full);
    }

    #[test]
    fn state_invariants_hold_throughout(seed in any::<u64>()) {
        let g = graph_for(seed, &RandomGraphConfig { max_nodes: 15, max_edges: 60, ..Default::default() });
        let order = sort_edges(&g);
        let mut run = SmwRun::new(&g);
        for id in order.iter() {
            run.process(id);
            prop_assert!(run.state().check_invariants());
        }
        let mut state = run.state().clone();
        for i in 0..g.num_nodes() as u32 {
            for j in 0..g.num_nodes() as u32 {
                prop_assert!(!(state.connected(i, j) && state.mutex(i, j)));
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = Prng::new(99);
    for _ in 0..50 {
        let g = random_graph(&mut rng, &RandomGraphConfig { max_nodes: 30, max_edges: 200, ..Default::default() });
        let a = run_smw_with(&g, SmwOptions { exact_energy: true });
        let b = run_smw_with(&g, SmwOptions { exact_energy: true });
        assert_eq!(a, b);
        assert_eq!(a.energy.get().to_bits(), b.energy.get().to_bits());
    }
}
