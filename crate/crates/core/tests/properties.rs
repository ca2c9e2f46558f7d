use proptest::prelude::*;

use adoracle_core::audit::{bellman_ford, exact_oracle};
use adoracle_core::composite::build_small_k;
use adoracle_core::graph::{contract_zero_edges, validate_graph, Graph};
use adoracle_core::spanner::build_spanner;
use adoracle_core::sssp::{build_sparsified, dijkstra, nearest_sample};
use adoracle_core::tz::{build_tz, TzOptions};
use adoracle_core::{generators, NoopObserver, INFINITY};

fn arb_edges(max_n: usize, max_w: u64) -> impl Strategy<Value = (usize, Vec<(usize, usize, u64)>)> {
    (2..max_n).prop_flat_map(move |n| {
        let edge = (0..n, 0..n, 0..=max_w);
        (Just(n), proptest::collection::vec(edge, 0..4 * n))
    })
}

fn connected(n: usize, seed: u64) -> Graph {
    generators::gnm(n, 2 * n, 1..=50, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ingestion_is_symmetric((n, edges) in arb_edges(40, 20)) {
        let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
        prop_assert!(validate_graph(&g).symmetric);
        for (u, v, w) in g.edges() {
            prop_assert_eq!(g.edge_weight(v, u), Some(w));
            let min = edges
                .iter()
                .filter(|&&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u))
                .map(|e| e.2)
                .min();
            prop_assert_eq!(min, Some(w));
        }
    }

    #[test]
    fn dijkstra_matches_bellman_ford((n, edges) in arb_edges(30, 20), src in 0usize..30) {
        let g = Graph::from_edges(n, edges).unwrap();
        let s = src % n;
        prop_assert_eq!(dijkstra(&g, s).into_distances(), bellman_ford(&g, s));
    }

    #[test]
    fn contraction_preserves_distances((n, edges) in arb_edges(30, 4)) {
        let g = Graph::from_edges(n, edges).unwrap();
        let c = contract_zero_edges(&g);
        prop_assert!(c.graph.edges().all(|(_, _, w)| w > 0));
        for u in 0..n {
            let before = dijkstra(&g, u);
            let after = dijkstra(&c.graph, c.merge_map[u]);
            for v in 0..n {
                prop_assert_eq!(before.distance(v), after.distance(c.merge_map[v]));
            }
        }
    }

    #[test]
    fn tz_estimates_within_stretch(n in 2usize..80, kappa in 1usize..5, seed in any::<u64>()) {
        let g = connected(n, seed);
        let exact = exact_oracle(&g).unwrap();
        let tz = build_tz(&g, kappa, seed, &TzOptions::default()).unwrap();
        let bound = tz.stretch_bound();
        for u in 0..n {
            for v in 0..n {
                let d = exact.distance(u, v);
                let e = tz.query(u, v).unwrap();
                prop_assert!(d <= e && e <= bound * d);
                prop_assert_eq!(e, tz.query(v, u).unwrap());
            }
        }
    }

    #[test]
    fn spanner_is_subgraph_within_stretch(n in 2usize..80, kp in 1usize..4, seed in any::<u64>()) {
        let g = connected(n, seed);
        let h = build_spanner(&g, kp, seed).unwrap();
        prop_assert!(h.graph().edges().all(|(u, v, w)| g.edge_weight(u, v) == Some(w)));
        prop_assert!(validate_graph(h.graph()).connected);
        let (dg, dh) = (exact_oracle(&g).unwrap(), exact_oracle(h.graph()).unwrap());
        let bound = h.stretch_bound();
        for u in 0..n {
            for v in 0..n {
                prop_assert!(dh.distance(u, v) <= bound * dg.distance(u, v));
            }
        }
    }

    #[test]
    fn sparsified_keeps_ball_distances(n in 2usize..60, seed in any::<u64>(), mask in any::<u64>()) {
        let g = connected(n, seed);
        let mut samples: Vec<usize> = (0..n).filter(|&v| mask >> (v % 64) & 1 == 1).collect();
        if samples.is_empty() {
            samples.push(0);
        }
        let sa = nearest_sample(&g, &samples).unwrap();
        let gs = build_sparsified(&g, &sa);
        for u in 0..n {
            let (d, ds) = (dijkstra(&g, u), dijkstra(gs.graph(), u));
            for v in 0..n {
                prop_assert!(ds.distance(v) >= d.distance(v));
                if d.distance(v) < sa.distance(u) {
                    prop_assert_eq!(ds.distance(v), d.distance(v));
                }
            }
        }
    }

    #[test]
    fn small_k_estimates_within_stretch(n in 2usize..80, k in 3usize..9, seed in any::<u64>()) {
        let g = connected(n, seed);
        let exact = exact_oracle(&g).unwrap();
        let o = build_small_k(&g, k, seed, &mut NoopObserver).unwrap();
        let bound = 2 * k as u64 - 1;
        for u in 0..n {
            for v in 0..n {
                let d = exact.distance(u, v);
                let e = o.query(u, v).unwrap();
                prop_assert!(e != INFINITY && d <= e && e <= bound * d);
            }
        }
    }
}
