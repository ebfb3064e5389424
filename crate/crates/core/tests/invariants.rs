use blanket_lab::excursion::{excursion_to_tree, glue_continuum, sample_excursion, sample_pointset, theta_scale, GluedSpace};
use blanket_lab::graph::{effective_resistance, resistance_potential, Edge, WeightedGraph};
use blanket_lab::io::{parse_config, CsvTable, Flags};
use blanket_lab::tree::{contour_process, depth_first_walk_and_area, permitted_edges, sample_conditioned_gw, Offspring};
use blanket_lab::walk::{blanket_time_variable, blanket_times_multi, run_walk, LocalTimeField};
use proptest::prelude::*;

/// Conditioned tree plus `extra` random weighted edges.
fn random_graph(n: usize, extra: &[(usize, usize, f64)], seed: u64) -> WeightedGraph<f64> {
    let t = sample_conditioned_gw(&Offspring::Poisson1, n, seed).unwrap();
    let v = t.n_vertices();
    let mut edges: Vec<Edge<f64>> = t.edges().into_iter().map(|(a, b)| Edge::new(a, b, 1.0)).collect();
    for &(a, b, w) in extra {
        let (a, b) = (a % v, b % v);
        if a != b {
            edges.push(Edge::new(a, b, w));
        }
    }
    WeightedGraph::multigraph_from_edges(v, edges).unwrap()
}

fn extras() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0usize..64, 0usize..64, 0.1f64..5.0), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupation_identity(n in 1usize..40, extra in extras(), steps in 0usize..500, seed in any::<u64>()) {
        let g = random_graph(n, &extra, seed);
        let path = run_walk(&g, 0, steps, seed ^ 1).unwrap();
        for t in [0, steps / 2, steps + 1] {
            let f = LocalTimeField::from_path(&g, &path, t).unwrap();
            prop_assert!(f.occupation_identity_holds());
            let total: f64 = (0..g.n_vertices()).map(|x| g.vertex_weight(x) * f.value(x)).sum();
            prop_assert!((total - t as f64).abs() <= 1e-9 * (1.0 + t as f64));
        }
    }

    #[test]
    fn blanket_after_cover_and_monotone(n in 1usize..30, extra in extras(), eps in prop::collection::vec(0.05f64..0.95, 1..5), seed in any::<u64>()) {
        let g = random_graph(n, &extra, seed);
        let mut eps = eps;
        eps.sort_by(|a, b| a.total_cmp(b));
        let t_max = 2_000_000;
        let single = blanket_time_variable(&g, 0, eps[0], t_max, seed).unwrap();
        if let (Some(tau), Some(cover)) = (single.tau_blanket, single.cover_time) {
            prop_assert!(tau >= cover);
        }
        let multi = blanket_times_multi(&g, 0, &eps, t_max, seed).unwrap();
        prop_assert_eq!(multi[0].tau_blanket, single.tau_blanket);
        for w in multi.windows(2) {
            match (w[0].tau_blanket, w[1].tau_blanket) {
                (Some(a), Some(b)) => prop_assert!(a <= b),
                (None, Some(_)) => prop_assert!(false, "smaller epsilon timed out first"),
                _ => {}
            }
        }
    }

    #[test]
    fn tree_resistance_is_path_length(n in 1usize..60, seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let t = sample_conditioned_gw(&Offspring::Poisson1, n, seed).unwrap();
        let g = t.to_graph().unwrap();
        let (a, b) = (pick.0 % g.n_vertices(), pick.1 % g.n_vertices());
        prop_assume!(a != b);
        let d = t.metric().distance(a, b) as f64;
        prop_assert!((effective_resistance(&g, a, b).unwrap() - d).abs() <= 1e-9);
        prop_assert!((resistance_potential(&g, a, b).unwrap().resistance - d).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn area_counts_permitted_edges(n in 0usize..80, seed in any::<u64>()) {
        let t = sample_conditioned_gw(&Offspring::Geometric, n, seed).unwrap();
        prop_assert_eq!(depth_first_walk_and_area(&t).area, permitted_edges(&t).len());
    }

    #[test]
    fn contour_codes_tree_distance(n in 1usize..60, seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let t = sample_conditioned_gw(&Offspring::Poisson1, n, seed).unwrap();
        let c = contour_process(&t);
        let len = c.values.len();
        let (i, j) = { let (a, b) = (pick.0 % len, pick.1 % len); (a.min(b), a.max(b)) };
        let low = *c.values[i..=j].iter().min().unwrap();
        prop_assert_eq!(t.metric().distance(c.vertices[i], c.vertices[j]), c.values[i] + c.values[j] - 2 * low);
    }

    #[test]
    fn gluing_never_increases_distances(seed in any::<u64>(), c3 in 0.5f64..4.0, leaves in 4usize..24) {
        let e = sample_excursion(1.0, 256, seed).unwrap();
        let tree = excursion_to_tree(&e, leaves).unwrap();
        let glued = glue_continuum(&tree, &sample_pointset(&e, c3, seed ^ 7).unwrap()).unwrap();
        let n = glued.n_points();
        for a in 0..n {
            for b in 0..n {
                prop_assert!(glued.distance(a, b) <= tree.distance(a, b) + 1e-12);
            }
        }
        // explicit identifications collapse their endpoints
        let pairs = vec![(0, n - 1)];
        let g2 = GluedSpace::new(tree.clone(), pairs);
        prop_assert!(g2.distance(0, n - 1) <= 1e-12);
    }

    #[test]
    fn theta_composition_is_exact(seed in any::<u64>(), a in 0.01f64..100.0, b in 0.01f64..100.0) {
        let e = sample_excursion(1.0, 64, seed).unwrap();
        let ab = theta_scale(&theta_scale(&e, a).unwrap(), b).unwrap();
        let direct = theta_scale(&e, a * b).unwrap();
        prop_assert_eq!(ab.values(), direct.values());
        prop_assert_eq!(ab.zeta(), direct.zeta());
    }

    #[test]
    fn csv_rows_match_records(values in prop::collection::vec((any::<u32>(), prop::option::of(-1e6f64..1e6)), 0..50)) {
        #[derive(serde::Serialize)]
        struct R { a: u32, b: Option<f64> }
        let recs: Vec<R> = values.iter().map(|&(a, b)| R { a, b }).collect();
        let text = CsvTable::from_records("p/v1", &recs).unwrap().to_csv();
        prop_assert_eq!(text.lines().count(), 2 + recs.len());
        prop_assert!(text.starts_with("# schema: p/v1\n"));
    }

    #[test]
    fn flags_always_win(file_eps in 0.01f64..0.99, flag_eps in 0.01f64..0.99) {
        use blanket_lab::io::{KeySpec, ValueKind};
        let schema = [KeySpec::new("epsilon", ValueKind::Float, "0.3", "")];
        let flags = Flags { seed: Some(1), params: vec![("epsilon".into(), flag_eps.to_string())], ..Flags::default() };
        let c = parse_config("x", &schema, &flags, Some(&format!("{{\"epsilon\": {file_eps}}}"))).unwrap();
        prop_assert_eq!(c.f64("epsilon").unwrap(), flag_eps);
        prop_assert_eq!(c.overridden, vec!["epsilon".to_string()]);
    }
}
