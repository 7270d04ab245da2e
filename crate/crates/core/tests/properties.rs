mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use s2graph::complexity::CutStructure;
use s2graph::engine::{label_completion, mssp_choice, s2_run, StoppingRule};
use s2graph::experiments::{dc_query_complexity, DcComplexity};
use s2graph::ingest::{knn_graph, FeatureMatrix};
use s2graph::io::{read_edge_list, read_labels, write_edge_list, write_labels};
use s2graph::oracle::NoisyOracle;
use s2graph::{Edge, Graph, Label, Labeling};

fn instance(seed: u64, n: usize, p: f64) -> (Graph, Labeling) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(&mut rng, n, p);
    let f = random_labeling(&mut rng, n);
    (g, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distances_are_a_metric(seed in any::<u64>(), n in 1usize..30, p in 0.05f64..0.5) {
        let (g, _) = instance(seed, n, p);
        let d: Vec<Vec<Option<usize>>> = (0..n).map(|s| g.distances_from(s)).collect();
        for u in 0..n {
            prop_assert_eq!(d[u][u], Some(0));
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                for w in 0..n {
                    if let (Some(a), Some(b), Some(c)) = (d[u][w], d[u][v], d[v][w]) {
                        prop_assert!(a <= b + c);
                    }
                }
            }
        }
    }

    #[test]
    fn shortest_paths_are_valid(seed in any::<u64>(), n in 1usize..25, p in 0.05f64..0.4) {
        let (g, _) = instance(seed, n, p);
        for u in 0..n {
            let d = g.distances_from(u);
            for v in 0..n {
                match g.shortest_path(u, v).unwrap() {
                    Some(path) => {
                        prop_assert_eq!(Some(path.len()), d[v]);
                        prop_assert_eq!(path.source(), u);
                        prop_assert_eq!(path.target(), v);
                        for w in path.vertices().windows(2) {
                            prop_assert!(g.has_edge(w[0], w[1]));
                        }
                    }
                    None => prop_assert_eq!(d[v], None),
                }
            }
        }
    }

    #[test]
    fn small_graphs_match_brute_force(seed in any::<u64>(), n in 1usize..=8, p in 0.1f64..0.9) {
        let (g, _) = instance(seed, n, p);
        for u in 0..n {
            for v in 0..n {
                let bfs = g.shortest_path(u, v).unwrap().map(|p| p.len());
                prop_assert_eq!(bfs, brute_force_distance(&g, u, v));
            }
        }
    }

    #[test]
    fn removing_edges_never_merges_components(seed in any::<u64>(), n in 1usize..30, p in 0.05f64..0.4, keep in 0.0f64..1.0) {
        let (g, _) = instance(seed, n, p);
        let drop: Vec<Edge> = g.edges().enumerate()
            .filter(|(i, _)| (*i as f64 / g.edge_count().max(1) as f64) >= keep)
            .map(|(_, e)| e)
            .collect();
        let h = g.remove_edges(drop.iter().copied()).unwrap();
        prop_assert_eq!(h.n(), g.n());
        prop_assert_eq!(h.edge_count(), g.edge_count() - drop.len());
        prop_assert!(h.connected_components().len() >= g.connected_components().len());
    }

    #[test]
    fn components_partition_vertices(seed in any::<u64>(), n in 1usize..40, p in 0.0f64..0.2) {
        let (g, _) = instance(seed, n, p);
        let blocks = g.connected_components();
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let mins: Vec<usize> = blocks.iter().map(|b| *b.iter().min().unwrap()).collect();
        prop_assert!(mins.windows(2).all(|w| w[0] < w[1]));
        let edges: Vec<(usize, usize)> = g.edges().map(Edge::endpoints).collect();
        prop_assert_eq!(blocks.len(), components(n, &edges).1);
    }

    #[test]
    fn analyzer_matches_reference(seed in any::<u64>(), n in 2usize..16, p in 0.1f64..0.6) {
        let (g, f) = instance(seed, n, p);
        let s = CutStructure::new(&g, &f).unwrap();
        prop_assume!(s.cut_size() <= 12);
        let r = reference(&g, &f);
        let cuts: Vec<(usize, usize)> = s.cuts().iter().map(|c| (c.positive, c.negative)).collect();
        prop_assert_eq!(&cuts, &r.cuts);
        prop_assert_eq!(s.delta_table(), r.delta.clone());
        prop_assert_eq!(s.m(), r.m);
        let min = *r.component_sizes.iter().min().unwrap();
        prop_assert_eq!(s.balancedness(), num_rational::Ratio::new(min, n));
        prop_assert!(s.boundary_size() <= 2 * s.cut_size());
        prop_assert!(s.m() <= s.cut_size().min(s.k() * s.k() / 4));
    }

    #[test]
    fn mssp_matches_pair_enumeration(seed in any::<u64>(), n in 2usize..20, p in 0.1f64..0.5, frac in 0.1f64..0.9) {
        let (g, f) = instance(seed, n, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut observed = Labeling::empty(n);
        for v in 0..n {
            if rand::Rng::gen_bool(&mut rng, frac) {
                observed.set(v, f.at(v)).unwrap();
            }
        }
        let known: Vec<Edge> = g.edges()
            .filter(|e| matches!((observed.get(e.lo()), observed.get(e.hi())), (Some(a), Some(b)) if a != b))
            .collect();
        let working = g.remove_edges(known).unwrap();
        let d = floyd(&working);
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..n {
            for b in a + 1..n {
                if let (Some(x), Some(y), Some(dist)) = (observed.get(a), observed.get(b), d[a][b]) {
                    if x != y && best.is_none_or(|t| (dist, a, b) < t) {
                        best = Some((dist, a, b));
                    }
                }
            }
        }
        let choice = mssp_choice(&working, &observed);
        match best {
            None => prop_assert!(choice.is_none()),
            Some((dist, a, b)) => {
                let c = choice.unwrap();
                prop_assert_eq!(c.pair, (a, b));
                prop_assert_eq!(c.path.len(), dist);
                let path = working.shortest_path(a, b).unwrap().unwrap();
                prop_assert_eq!(c.path.vertices(), path.vertices());
                let v = path.vertices();
                prop_assert_eq!(c.midpoint, v[dist / 2].min(v[dist.div_ceil(2)]));
                prop_assert!(observed.get(c.midpoint).is_none());
            }
        }
    }

    #[test]
    fn completion_respects_unanimous_components(seed in any::<u64>(), n in 1usize..30, p in 0.02f64..0.3) {
        let (g, f) = instance(seed, n, p);
        let mut observed = Labeling::empty(n);
        for v in (0..n).step_by(3) {
            observed.set(v, f.at(v)).unwrap();
        }
        let predicted = label_completion(&g, &observed);
        prop_assert!(predicted.is_total());
        for block in g.connected_components() {
            let labels: Vec<Label> = block.iter().filter_map(|&v| observed.get(v)).collect();
            let first = predicted.at(block[0]);
            prop_assert!(block.iter().all(|&v| predicted.at(v) == first));
            if !labels.is_empty() && labels.iter().all(|&l| l == labels[0]) {
                prop_assert_eq!(first, labels[0]);
            }
        }
    }

    #[test]
    fn noiseless_runs_find_only_true_cuts(seed in any::<u64>(), n in 2usize..40, p in 0.05f64..0.3, budget_frac in 0.05f64..1.0) {
        let (g, f) = instance(seed, n, p);
        let truth = CutStructure::new(&g, &f).unwrap().cut_edges();
        let budget = ((n as f64 * budget_frac) as usize).clamp(1, n);
        let mut oracle = NoisyOracle::noiseless(f.clone()).unwrap();
        let r = s2_run(&g, &mut oracle, &StoppingRule::Budget(budget), seed).unwrap();
        prop_assert_eq!(r.queries_used, budget);
        let mut seen: Vec<usize> = r.queried_vertices().collect();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), budget);
        prop_assert!(r.found_cuts.iter().all(|e| truth.contains(e)));
        if budget == n {
            prop_assert_eq!(&r.found_cuts, &truth);
            prop_assert_eq!(&r.predicted, &f);
        }
    }

    #[test]
    fn dc_complexity_at_least_boundary(seed in any::<u64>(), n in 2usize..30, p in 0.1f64..0.4) {
        let (g, f) = instance(seed, n, p);
        let s = CutStructure::new(&g, &f).unwrap();
        prop_assume!(s.boundary_size() > 0);
        let mut oracle = NoisyOracle::noiseless(f).unwrap();
        let r = s2_run(&g, &mut oracle, &StoppingRule::Budget(n), seed).unwrap();
        match dc_query_complexity(r.queried_vertices(), s.boundary()).unwrap() {
            DcComplexity::Covered(q) => prop_assert!(q >= s.boundary_size() && q <= n),
            DcComplexity::NotCovered { .. } => prop_assert!(false, "full run must cover the boundary"),
        }
    }

    #[test]
    fn knn_is_symmetric_and_monotone(seed in any::<u64>(), n in 2usize..25, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0..4) as f64).collect())
            .collect();
        let features = FeatureMatrix::new(rows, None).unwrap();
        let small = knn_graph(&features, k);
        let large = knn_graph(&features, k + 1);
        for e in small.edges() {
            prop_assert!(large.has_edge(e.lo(), e.hi()));
        }
        for v in 0..n {
            prop_assert!(small.degree(v) >= k.min(n - 1));
            for &u in small.neighbors(v) {
                prop_assert!(small.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), n in 1usize..30, p in 0.0f64..0.5) {
        let (g, f) = instance(seed, n, p);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        prop_assert_eq!(read_edge_list(&buf[..]).unwrap(), g);
        let mut buf = Vec::new();
        write_labels(&f, &mut buf).unwrap();
        prop_assert_eq!(read_labels(&buf[..], n).unwrap(), f);
    }
}

#[test]
fn noisy_runs_are_reproducible() {
    let g = s2graph::generators::grid_graph(15, 15);
    let f = s2graph::generators::half_split_labeling(15, 15, 7);
    let run = || {
        let mut o = NoisyOracle::new(f.clone(), 0.25, 10).unwrap();
        s2_run(&g, &mut o, &StoppingRule::Budget(150), 2).unwrap()
    };
    assert_eq!(run().log, run().log);
}
