use blanket_lab::compare::{dk_upper_bound, prokhorov_distance, skorokhod_j1, uniform_distance, Correspondence, LocalTimeTable, PcPath, Quadruple};
use blanket_lab::excursion::{excursion_to_tree, glue_continuum, sample_excursion, sample_pointset, theta_scale, GluedSpace};
use blanket_lab::gen::{components_with_surplus, sample_configuration_model, sample_er, sample_prescribed_connected, DegreeSequence};
use blanket_lab::graph::{dirichlet_energy, effective_resistance, resistance_potential, Edge, MetricKind, MetricMatrix, WeightedGraph};
use blanket_lab::harness::{fit_records, run_replicate, Model, TMaxPolicy};
use blanket_lab::tree::{sample_conditioned_gw, uniform_plane_tree_with_ecd, Ecd, Offspring};
use blanket_lab::walk::{blanket_time_variable, run_walk, smoothed_occupation, LocalTimeField};
use proptest::prelude::*;

/// Connected weighted graph: a random tree on `n` vertices plus extra edges.
fn connected(n: usize, parents: &[usize], extra: &[(usize, usize, f64)], weights: &[f64]) -> WeightedGraph<f64> {
    let mut edges: Vec<Edge<f64>> = (1..n).map(|v| Edge::new(parents[v - 1] % v, v, weights[v - 1])).collect();
    for &(a, b, w) in extra {
        let (a, b) = (a % n, b % n);
        if a != b && !edges.iter().any(|e| (e.u, e.v) == (a.min(b), a.max(b)) || (e.u, e.v) == (a.max(b), a.min(b))) {
            edges.push(Edge::new(a, b, w));
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

prop_compose! {
    fn small_graph(max_n: usize)(n in 2..=max_n)
        (parents in prop::collection::vec(any::<usize>(), n - 1),
         weights in prop::collection::vec(0.2f64..5.0, n - 1),
         extra in prop::collection::vec((any::<usize>(), any::<usize>(), 0.2f64..5.0), 0..2 * n),
         n in Just(n)) -> WeightedGraph<f64> {
        connected(n, &parents, &extra, &weights)
    }
}

/// Naive blanket time: full scan of every vertex at every `t`.
fn naive_blanket(g: &WeightedGraph<f64>, steps: &[usize], eps: f64) -> Option<u64> {
    let n = g.n_vertices();
    let mu: Vec<f64> = (0..n).map(|x| g.vertex_weight(x)).collect();
    let m: f64 = mu.iter().sum();
    let mut counts = vec![0u64; n];
    for (i, &x) in steps.iter().enumerate() {
        counts[x] += 1;
        let t = (i + 1) as u64;
        if (0..n).all(|y| m * counts[y] as f64 >= eps * t as f64 * mu[y]) {
            return Some(t);
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rayleigh_monotonicity(g in small_graph(12), a in any::<usize>(), b in any::<usize>(), u in any::<usize>(), v in any::<usize>(), w in 0.1f64..4.0) {
        let n = g.n_vertices();
        let (a, b, u, v) = (a % n, b % n, u % n, v % n);
        prop_assume!(a != b && u != v);
        let before = effective_resistance(&g, a, b).unwrap();
        let mut edges = g.edges().to_vec();
        edges.push(Edge::new(u, v, w));
        let h = WeightedGraph::multigraph_from_edges(n, edges).unwrap();
        prop_assert!(effective_resistance(&h, a, b).unwrap() <= before + 1e-9);
    }

    #[test]
    fn resistance_is_a_metric(g in small_graph(10)) {
        let n = g.n_vertices();
        let r = |a: usize, b: usize| if a == b { 0.0 } else { effective_resistance(&g, a, b).unwrap() };
        for a in 0..n {
            for b in 0..n {
                prop_assert!((r(a, b) - r(b, a)).abs() <= 1e-9);
                for c in 0..n {
                    prop_assert!(r(a, c) <= r(a, b) + r(b, c) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn energy_vanishes_only_on_constants(g in small_graph(12), f in prop::collection::vec(-3.0f64..3.0, 12), c in -5.0f64..5.0) {
        let n = g.n_vertices();
        let constant = vec![c; n];
        prop_assert!(dirichlet_energy(&g, &constant, &constant).unwrap().abs() <= 1e-12);
        let f = &f[..n];
        let spread = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - f.iter().cloned().fold(f64::INFINITY, f64::min);
        let e = dirichlet_energy(&g, f, f).unwrap();
        if spread > 1e-3 {
            prop_assert!(e > 1e-12);
        }
    }

    #[test]
    fn resistance_potential_is_self_consistent(g in small_graph(12), a in any::<usize>(), b in any::<usize>()) {
        let n = g.n_vertices();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let s = resistance_potential(&g, a, b).unwrap();
        let energy = dirichlet_energy(&g, &s.potential, &s.potential).unwrap();
        prop_assert!((energy / s.resistance - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn detector_matches_full_scan(g in small_graph(30), eps in 0.05f64..0.95, seed in any::<u64>(), t_max in 1u64..10_000) {
        let path = run_walk(&g, 0, t_max as usize - 1, seed).unwrap();
        let fast = blanket_time_variable(&g, 0, eps, t_max, seed).unwrap();
        prop_assert_eq!(fast.tau_blanket, naive_blanket(&g, &path.steps, eps));
    }

    #[test]
    fn walks_are_deterministic(g in small_graph(20), seed in any::<u64>(), steps in 0usize..2000) {
        let a = run_walk(&g, 0, steps, seed).unwrap();
        let b = std::thread::scope(|s| s.spawn(|| run_walk(&g, 0, steps, seed).unwrap()).join().unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn smoothing_below_minimal_distance_is_exact(g in small_graph(12), seed in any::<u64>(), steps in 1usize..300, x in any::<usize>()) {
        let n = g.n_vertices();
        let x = x % n;
        let d = MetricMatrix::from_fn(MetricKind::ShortestPath, n, |i, j| if i == j { 0.0 } else { 1.0 + ((i * 7 + j * 7) % 5) as f64 });
        let path = run_walk(&g, 0, steps, seed).unwrap();
        let exact = LocalTimeField::from_path(&g, &path, steps).unwrap().value(x);
        for delta in [0.999, 0.5, 1e-3] {
            prop_assert_eq!(smoothed_occupation(&g, &path, x, delta, steps, &d).unwrap(), exact);
        }
    }

    #[test]
    fn tenable_ecds_build_trees(s in prop::collection::vec(0usize..6, 1..6), seed in any::<u64>()) {
        let ecd = Ecd(s);
        match uniform_plane_tree_with_ecd(&ecd, seed) {
            Ok(t) => {
                prop_assert!(ecd.is_tenable());
                prop_assert_eq!(Ecd::of(&t).multiset(), ecd.multiset());
            }
            Err(_) => prop_assert!(!ecd.is_tenable()),
        }
    }

    #[test]
    fn component_sizes_and_surplus_add_up(n in 2usize..60, p in 0.0f64..0.2, seed in any::<u64>()) {
        let g = sample_er(n, p, seed).unwrap();
        let c = components_with_surplus(&g);
        prop_assert_eq!(c.sizes.iter().sum::<usize>(), n);
        prop_assert_eq!(c.surpluses.iter().sum::<usize>() + n, g.n_edges() + c.sizes.len());
    }

    #[test]
    fn configuration_model_uses_every_half_edge(d in prop::collection::vec(1usize..5, 2..20), seed in any::<u64>()) {
        let mut d = d;
        if d.iter().sum::<usize>() % 2 == 1 {
            d[0] += 1;
        }
        let g = sample_configuration_model(&DegreeSequence(d.clone()), seed).unwrap();
        let mut deg = vec![0; d.len()];
        for e in g.edges() {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        prop_assert_eq!(deg, d.clone());
        prop_assert_eq!(2 * g.n_edges(), d.iter().sum::<usize>());
    }

    #[test]
    fn prescribed_samples_are_connected_with_surplus(seed in any::<u64>(), pick in 0usize..3) {
        let d = [vec![1, 1, 2, 2], vec![1, 2, 2, 2, 3], vec![1, 3, 3, 2, 2, 3]][pick].clone();
        let k = (d.iter().sum::<usize>() / 2 + 1).saturating_sub(d.len());
        let s = sample_prescribed_connected(&DegreeSequence(d.clone()), seed, 256).unwrap();
        prop_assert!(s.graph.is_connected());
        prop_assert_eq!(s.surplus, k);
        prop_assert_eq!(s.graph.n_edges() + 1, d.len() + k);
    }

    #[test]
    fn theta_inverse_is_identity(seed in any::<u64>(), a in 0.01f64..100.0) {
        let e = sample_excursion(1.0, 64, seed).unwrap();
        let back = theta_scale(&theta_scale(&e, a).unwrap(), 1.0 / a).unwrap();
        for (x, y) in back.values().iter().zip(e.values()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        prop_assert!((back.zeta() - e.zeta()).abs() <= 1e-12);
    }

    #[test]
    fn gluing_keeps_mass_and_unglued_metric(seed in any::<u64>(), zeta in 0.5f64..3.0, leaves in 4usize..20) {
        let e = sample_excursion(zeta, 256, seed).unwrap();
        let tree = excursion_to_tree(&e, leaves).unwrap();
        let total: f64 = tree.masses().iter().sum();
        prop_assert!((total - zeta).abs() <= 1e-9);
        let glued = glue_continuum(&tree, &sample_pointset(&e, 2.0, seed).unwrap()).unwrap();
        prop_assert!((glued.masses().iter().sum::<f64>() - zeta).abs() <= 1e-9);
        let plain = GluedSpace::new(tree.clone(), Vec::new());
        for a in 0..tree.n_representatives() {
            for b in 0..tree.n_representatives() {
                prop_assert_eq!(plain.distance(a, b), tree.distance(a, b));
            }
        }
    }

    #[test]
    fn dk_bound_vanishes_on_identity(n in 2usize..7, steps in prop::collection::vec(any::<usize>(), 2..30), seed in any::<u64>()) {
        let space = MetricMatrix::from_fn(MetricKind::ShortestPath, n, |i, j| if i == j { 0.0 } else { 1.0 + ((seed as usize ^ (i + j)) % 3) as f64 });
        let states: Vec<usize> = steps.iter().map(|s| s % n).collect();
        let horizon = 0.1 * states.len() as f64;
        let q = Quadruple {
            space,
            measure: vec![1.0 / n as f64; n],
            path: PcPath::from_steps(&states, 0.1, horizon).unwrap(),
            local_times: LocalTimeTable::from_walk(&states, &vec![1.0; n], 0.1, 0.1, horizon, 17),
            root: 0,
        };
        let b = dk_upper_bound(&q, &q, &Correspondence::identity(n), true).unwrap();
        prop_assert_eq!(b.total, 0.0);
    }

    #[test]
    fn prokhorov_is_bounded(mu in prop::collection::vec(0.0f64..1.0, 1..6), nu in prop::collection::vec(0.0f64..1.0, 6), scale in 0.1f64..3.0) {
        let n = mu.len();
        let nu = &nu[..n];
        let d = MetricMatrix::from_fn(MetricKind::ShortestPath, n, |i, j| scale * i.abs_diff(j) as f64);
        let p = prokhorov_distance(&mu, nu, &d, true).unwrap();
        let discrepancy = (mu.iter().sum::<f64>() - nu.iter().sum::<f64>()).abs();
        prop_assert!(p.value <= 1.0_f64.max(mu.iter().sum::<f64>()).max(nu.iter().sum::<f64>()) + discrepancy + 1e-12);
    }

    #[test]
    fn skorokhod_below_uniform(a in prop::collection::vec(0usize..5, 1..12), b in prop::collection::vec(0usize..5, 1..12)) {
        let d = MetricMatrix::from_fn(MetricKind::ShortestPath, 5, |i, j| i.abs_diff(j) as f64);
        let p = PcPath::from_steps(&a, 1.0 / a.len() as f64, 1.0).unwrap();
        let q = PcPath::from_steps(&b, 1.0 / b.len() as f64, 1.0).unwrap();
        prop_assert!(skorokhod_j1(&p, &q, &d).unwrap() <= uniform_distance(&p, &q, &d) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fits_ignore_record_order(master in any::<u64>(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let model = Model::GwTree { offspring: Offspring::Poisson1 };
        let mut records = Vec::new();
        for size in [8, 16, 32] {
            for i in 0..5 {
                records.push(run_replicate(&model, size, i, 0.3, TMaxPolicy::Default, master).unwrap());
            }
        }
        let fit = fit_records(&records).unwrap();
        records.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let again = fit_records(&records).unwrap();
        prop_assert_eq!(fit.slope, again.slope);
        prop_assert_eq!(fit.per_size, again.per_size);
        // every record replays bit for bit from its own fields
        for r in &records {
            let again = run_replicate(&model, r.size, r.index, r.epsilon, TMaxPolicy::Default, master).unwrap();
            prop_assert_eq!((again.seed, again.tau_blanket, again.cover_time), (r.seed, r.tau_blanket, r.cover_time));
        }
    }

    #[test]
    fn conditioned_tree_sizes(n in 0usize..200, seed in any::<u64>()) {
        let t = sample_conditioned_gw(&Offspring::Poisson1, n, seed).unwrap();
        prop_assert_eq!(t.n_edges(), n);
    }
}
