use gmatch::matrix::feasibility_violation;
use gmatch::random::sample_lambda_uniform;
use gmatch::*;
use ndarray::Array2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binary_graph(n: usize, bits: &[bool], directed: bool) -> AdjacencyMatrix {
    let mut m = Array2::zeros((n, n));
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if bits[k % bits.len()] {
                m[[i, j]] = 1.0;
                if !directed {
                    m[[j, i]] = 1.0;
                }
            }
            k += 1;
        }
    }
    AdjacencyMatrix::new(m, directed).unwrap()
}

fn perm_from_seed(n: usize, seed: u64) -> Permutation {
    Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

prop_compose! {
    fn graph_pair(max_n: usize)(n in 2..=max_n, directed in any::<bool>())
        (a in proptest::collection::vec(any::<bool>(), n * n),
         b in proptest::collection::vec(any::<bool>(), n * n),
         n in Just(n), directed in Just(directed))
        -> (AdjacencyMatrix, AdjacencyMatrix)
    {
        (binary_graph(n, &a, directed), binary_graph(n, &b, directed))
    }
}

prop_compose! {
    fn weighted_pair(max_n: usize)(n in 2..=max_n)
        (a in proptest::collection::vec(-5.0f64..5.0, n * n),
         b in proptest::collection::vec(-5.0f64..5.0, n * n),
         n in Just(n))
        -> (AdjacencyMatrix, AdjacencyMatrix)
    {
        let a = Array2::from_shape_vec((n, n), a).unwrap();
        let b = Array2::from_shape_vec((n, n), b).unwrap();
        (AdjacencyMatrix::new(a, true).unwrap(), AdjacencyMatrix::new(b, true).unwrap())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn expansion_identity((a, b) in weighted_pair(12), seed in any::<u64>()) {
        let p = perm_from_seed(a.n(), seed);
        let lhs = frobenius_objective(&a, &b, &p).unwrap();
        let cross = neg_inner_objective(&a, &b, &p.to_matrix()).unwrap();
        let rhs = a.frobenius_norm_sq() + b.frobenius_norm_sq() + 2.0 * cross;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn theta_gamma_identity_is_exact(
        (a, b) in graph_pair(20),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
    ) {
        let p = perm_from_seed(a.n(), s1);
        let q = perm_from_seed(a.n(), s2);
        let tg = theta_gamma_identity(&a, &b, &p, &q).unwrap();
        prop_assert!(tg.holds(), "{:?}", tg);
    }

    #[test]
    fn permutation_preserves_degrees((a, _) in graph_pair(15), seed in any::<u64>()) {
        let p = perm_from_seed(a.n(), seed);
        let pa = permute_graph(&a, &p).unwrap();
        let mut d1 = a.degrees();
        let mut d2 = pa.degrees();
        d1.sort_by(f64::total_cmp);
        d2.sort_by(f64::total_cmp);
        prop_assert_eq!(d1, d2);
        prop_assert_eq!(permute_graph(&pa, &p.inverse()).unwrap(), a.clone());
        // The true alignment of the permuted copy scores like the identity.
        prop_assert_eq!(
            frobenius_objective(&pa, &a, &p).unwrap(),
            frobenius_objective(&a, &a, &Permutation::identity(a.n())).unwrap()
        );
    }

    #[test]
    fn lap_shift_invariance(
        n in 1usize..9,
        vals in proptest::collection::vec(0.0f64..1.0, 64),
        row in 0usize..8,
        shift in -3.0f64..3.0,
    ) {
        let cost = Array2::from_shape_fn((n, n), |(i, j)| vals[(i * 8 + j) % 64]);
        let base = solve_lap_min(&cost).unwrap();
        let mut shifted = cost.clone();
        shifted.row_mut(row % n).mapv_inplace(|v| v + shift);
        let moved = solve_lap_min(&shifted).unwrap();
        prop_assert!((moved.total_cost - base.total_cost - shift).abs() < 1e-9);
        let oracle = brute_force_lap(&cost).unwrap();
        prop_assert!(oracle.optimizers.contains(&base.permutation));
    }

    #[test]
    fn traces_decrease_and_iterates_stay_feasible(
        (a, b) in graph_pair(10),
        indefinite in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let kind = if indefinite { Relaxation::Indefinite } else { Relaxation::Convex };
        let problem = MatchProblem::new(a, b).unwrap();
        let config = SolverConfig::for_relaxation(kind).with_trace();
        let r = solve(&problem, kind, &InitSpec::RandomDs(seed), &config).unwrap();
        let trace = r.objective_trace.unwrap();
        prop_assert_eq!(trace.len(), r.iterations + 1);
        for w in trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
        prop_assert!(feasibility_violation(r.final_iterate.entries()) <= DS_TOLERANCE);
        prop_assert_eq!(project_to_permutation(&r.final_iterate).unwrap(), r.permutation);
    }

    #[test]
    fn convex_certificate((a, b) in graph_pair(8), seeds in proptest::collection::vec(any::<u64>(), 5)) {
        let problem = MatchProblem::new(a.clone(), b.clone()).unwrap();
        let r = solve_convex(&problem, &SolverConfig::convex()).unwrap();
        let f = convex_objective(&a, &b, r.final_iterate.entries()).unwrap();
        for s in seeds {
            let x = problem.initial_point(&InitSpec::RandomDs(s)).unwrap();
            let fx = convex_objective(&a, &b, x.entries()).unwrap();
            prop_assert!(f <= fx + r.fw_gap_final.max(0.0) + 1e-9);
        }
        let g = fw_gap_at(Relaxation::Convex, &a, &b, &r.final_iterate).unwrap();
        let tol = 1e-6 * (1.0 + convex_objective(&a, &b, DoublyStochastic::barycenter(a.n()).entries()).unwrap());
        if r.converged {
            prop_assert!(g >= -tol - 1e-12);
        }
    }

    #[test]
    fn indefinite_local_optimality((a, b) in graph_pair(10)) {
        let problem = MatchProblem::new(a.clone(), b.clone()).unwrap();
        let r = solve_indefinite(&problem, &InitSpec::Barycenter, &SolverConfig::indefinite()).unwrap();
        let h0 = neg_inner_objective(&a, &b, DoublyStochastic::barycenter(a.n()).entries()).unwrap();
        if r.converged {
            let g = fw_gap_at(Relaxation::Indefinite, &a, &b, &r.final_iterate).unwrap();
            prop_assert!(g >= -1e-6 * (1.0 + h0.abs()) - 1e-12);
        }
    }

    #[test]
    fn zero_seeds_and_unit_lambda_change_nothing((a, b) in graph_pair(9), seed in any::<u64>()) {
        let base = MatchProblem::new(a.clone(), b.clone()).unwrap();
        let seeded = base.clone().with_seeds(0).unwrap();
        let cost = Array2::from_elem((a.n(), a.n()), 1.0);
        let featured = base.clone().with_features(cost, 1.0).unwrap();
        for kind in [Relaxation::Convex, Relaxation::Indefinite] {
            let init = InitSpec::RandomDs(seed);
            let config = SolverConfig::for_relaxation(kind);
            let r0 = solve(&base, kind, &init, &config).unwrap();
            let r1 = solve_seeded(&seeded, kind, &init, &config).unwrap();
            let r2 = solve_with_features(&featured, &init, &config, kind).unwrap();
            for r in [&r1, &r2] {
                prop_assert_eq!(&r.permutation, &r0.permutation);
                prop_assert_eq!(r.final_iterate.entries(), r0.final_iterate.entries());
                prop_assert_eq!(r.iterations, r0.iterations);
            }
        }
    }

    #[test]
    fn seeds_stay_fixed((a, b) in graph_pair(10), s in 0usize..10, seed in any::<u64>()) {
        let n = a.n();
        let s = s.min(n);
        let problem = MatchProblem::new(a, b).unwrap().with_seeds(s).unwrap();
        let r = solve_seeded(&problem, Relaxation::Indefinite, &InitSpec::RandomDs(seed), &SolverConfig::indefinite()).unwrap();
        for i in 0..s {
            prop_assert_eq!(r.permutation.apply(i), i);
            prop_assert_eq!(r.final_iterate.entries()[[i, i]], 1.0);
        }
    }

    #[test]
    fn lambda_samples_stay_in_band(n in 1usize..30, alpha in 0.01f64..0.5, seed in any::<u64>()) {
        let l = sample_lambda_uniform(n, alpha, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for ((i, j), &v) in l.indexed_iter() {
            if i == j {
                prop_assert_eq!(v, 0.0);
            } else {
                prop_assert!(v >= alpha && v <= 1.0 - alpha);
                prop_assert_eq!(v, l[[j, i]]);
            }
        }
    }
}
