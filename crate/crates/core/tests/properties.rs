//! Randomized invariants, each checked against an independent route where one exists.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extremal::gridfn::{is_monotone, marginals, nesting_decompose, sup_distance, GridFunction, QuantileTransform, StepFunction1D, UpSet};
use extremal::oracle::{
    brute_force_lp, brute_force_rationalizable, brute_force_reduced_form, brute_force_unique, brute_force_vertices, enumerate_upsets,
    RefOutcome,
};
use extremal::ppi::{pooling_implementation, BiUpsetSignal};
use extremal::rationalize::{
    detect_rectangle_structure, is_additive_set, is_rationalizable, is_rationalizable_lp, monotone_rationalizer,
    unique_rationalization_check,
};
use extremal::rfauction::{check_reduced_form, construct_implementation, ReducedForm};
use extremal::socialchoice::{anti_equivalence_report, denormalize_mechanism, normalize_mechanism, ScgScenario};
use extremal::solver::{is_vertex, solve_lp, LpProblem, LpStatus, Relation};
use extremal::suite::random_monotone;
use extremal::trade::{check_solution, solve_interim_efficient, TradeScenario};

fn monotone(seed: u64, dims: &[usize], levels: usize) -> GridFunction {
    random_monotone(&mut ChaCha8Rng::seed_from_u64(seed), dims, levels).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn upset_2d(seed: u64, m1: usize, m2: usize) -> UpSet {
    let f = monotone(seed, &[m1, m2], 1);
    UpSet::new(&[m1, m2], f.values().iter().map(|&v| v >= 0.5).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn nesting_reconstructs(seed in any::<u64>(), n in 1usize..=3, levels in 1usize..6) {
        let dims: Vec<usize> = (0..n).map(|k| 2 + (seed as usize >> (4 * k)) % 5).collect();
        let f = monotone(seed, &dims, levels);
        let rep = nesting_decompose(&f).unwrap();
        prop_assert!(rep.is_nested());
        prop_assert!(rep.levels.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rep.reconstruct(&dims).unwrap().max_abs_diff(&f) <= 1e-12);
        prop_assert!((rep.weights.iter().sum::<f64>() + rep.residual - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn quantile_transform_round_trip(mu in -1.0f64..1.0, sigma in 0.1f64..2.0, z in 0.001f64..0.999) {
        for g in [
            QuantileTransform::Uniform { lo: -1.0, hi: 3.0 },
            QuantileTransform::TruncatedNormal { lo: -2.0, hi: 2.0, mu, sigma },
            QuantileTransform::TruncatedLognormal { lo: 0.1, hi: 5.0, mu, sigma },
        ] {
            let (lo, hi) = g.support();
            prop_assert!(g.cdf(lo).abs() <= 1e-12 && (g.cdf(hi) - 1.0).abs() <= 1e-12);
            let x = g.inverse_cdf(z);
            prop_assert!((g.cdf(x) - z).abs() <= 1e-7, "{g:?} z {z} x {x}");
            let masses = g.cell_masses(17);
            prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn step_inverse_is_generalized_inverse(raw in prop::collection::vec(0.0f64..1.0, 1..12), z in 0.0f64..1.0) {
        let q = StepFunction1D::uniform(sorted(raw)).unwrap();
        let inv = q.inverse();
        prop_assert!(inv.is_nondecreasing(0.0));
        // inf{x : q(x) > z} read off the cells directly.
        let m = q.m();
        let direct = (0..m).find(|&k| q.values()[k] > z).map_or(1.0, |k| k as f64 / m as f64);
        prop_assert!((inv.eval(z) - direct).abs() <= 1e-12 || q.values().iter().any(|&v| (v - z).abs() < 1e-12));
    }

    #[test]
    fn majorization_matches_lp(seed in any::<u64>(), m1 in 2usize..7, m2 in 2usize..7, shrink in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_monotone(&mut rng, &[m1], 4).unwrap().into_values();
        let b = random_monotone(&mut rng, &[m2], 4).unwrap().into_values().into_iter().map(|v| v * shrink).collect::<Vec<_>>();
        let q = vec![StepFunction1D::uniform(a.clone()).unwrap(), StepFunction1D::uniform(b.clone()).unwrap()];
        let fast = is_rationalizable(&q).unwrap();
        prop_assert_eq!(fast, is_rationalizable_lp(&q).unwrap());
        prop_assert_eq!(fast, brute_force_rationalizable(&[a, b], &[m1, m2]).unwrap());
        if fast {
            let f = monotone_rationalizer(&q).unwrap();
            prop_assert!(is_monotone(&f, 1e-6));
            let back = marginals(&f);
            prop_assert!(back.iter().zip(&q).all(|(x, y)| sup_distance(x, y) <= 1e-6));
        }
    }

    #[test]
    fn mixtures_are_not_vertices(seed in any::<u64>(), m1 in 2usize..5, m2 in 2usize..5, w in 0.1f64..0.9) {
        let (a, b) = (upset_2d(seed, m1, m2), upset_2d(seed ^ 0xabc, m1, m2));
        prop_assume!(a.mask() != b.mask());
        let p = LpProblem::new(&[m1, m2]).unwrap().with_monotonicity();
        let x = GridFunction::indicator(&a).mix(&GridFunction::indicator(&b), w).unwrap().into_values();
        let cert = is_vertex(&x, &p).unwrap();
        prop_assert!(!cert.is_vertex);
        let u = cert.perturbation.unwrap();
        for sign in [1.0, -1.0] {
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + sign * b).collect();
            prop_assert!(p.violation(&y) <= 1e-9);
        }
        prop_assert!(is_vertex(&GridFunction::indicator(&a).into_values(), &p).unwrap().is_vertex);
    }

    #[test]
    fn lp_matches_reference(seed in any::<u64>(), m in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let n = m * m;
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut p = LpProblem::new(&[m, m]).unwrap().with_monotonicity().with_objective(&c);
        let row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let rhs = row.iter().sum::<f64>() * rng.gen_range(0.1..0.9);
        p.add_constraint(&row, Relation::Le, rhs);
        let sol = solve_lp(&p).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(p.violation(&sol.values) <= 1e-8);
        match brute_force_lp(&p).unwrap() {
            RefOutcome::Optimal { value, .. } => prop_assert!((value - sol.objective).abs() <= 1e-7),
            other => prop_assert!(false, "reference says {other:?}"),
        }
    }

    #[test]
    fn uniqueness_matches_oracle(seed in any::<u64>(), levels in 1usize..4, monotone_only in any::<bool>()) {
        let f = monotone(seed, &[3, 3], levels);
        let fast = unique_rationalization_check(&f, monotone_only).unwrap();
        prop_assert_eq!(fast.unique, brute_force_unique(&[3, 3], f.values(), monotone_only).unwrap());
        if let Some(w) = fast.witness {
            let alt = GridFunction::new(&[3, 3], w).unwrap();
            prop_assert!(alt.max_abs_diff(&f) > 1e-7);
            prop_assert!(marginals(&alt).iter().zip(&marginals(&f)).all(|(x, y)| sup_distance(x, y) <= 1e-7));
        }
    }

    #[test]
    fn rectangle_decomposition_is_exact(seed in any::<u64>(), m in 2usize..9, levels in 1usize..4) {
        let f = monotone(seed, &[m, m], levels);
        let rep = detect_rectangle_structure(&f).unwrap();
        if rep.valid {
            let a1 = GridFunction::indicator(&rep.a1);
            let a2 = GridFunction::indicator(&rep.a2);
            let rebuilt = a2.mix(&a1, rep.lambda).unwrap();
            prop_assert!(is_monotone(&rebuilt, 1e-12));
            prop_assert!(rebuilt.max_abs_diff(&f) <= 1e-9);
            if let Some([(i0, i1), (j0, j1)]) = rep.rectangle {
                for c in 0..m * m {
                    let (i, j) = (c / m, c % m);
                    let inside = (i0..=i1).contains(&i) && (j0..=j1).contains(&j);
                    prop_assert_eq!(inside, rep.a2.contains(c) && !rep.a1.contains(c));
                }
            }
        }
    }

    #[test]
    fn planar_upsets_are_additive(seed in any::<u64>(), m1 in 1usize..8, m2 in 1usize..8) {
        let a = upset_2d(seed, m1, m2);
        let cert = is_additive_set(&a).unwrap();
        prop_assert!(cert.additive);
        for c in 0..m1 * m2 {
            let s = cert.phi[0][c / m2] + cert.phi[1][c % m2];
            if a.contains(c) {
                prop_assert!(s >= -1e-9);
            } else {
                prop_assert!(s <= -cert.margin + 1e-9);
            }
        }
    }

    #[test]
    fn reduced_form_matches_brute_force(seed in any::<u64>(), scale in 0.2f64..1.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q1: Vec<f64> = random_monotone(&mut rng, &[5], 4).unwrap().into_values().iter().map(|v| (v * scale).min(1.0)).collect();
        let q2: Vec<f64> = random_monotone(&mut rng, &[5], 4).unwrap().into_values().iter().map(|v| (v * scale).min(1.0)).collect();
        let rf = ReducedForm::uniform(q1.clone(), q2.clone()).unwrap();
        let feasible = check_reduced_form(&rf).feasible;
        let g = vec![0.2; 5];
        prop_assert_eq!(feasible, brute_force_reduced_form(&q1, &q2, &g, &g).unwrap());
        if feasible {
            let imp = construct_implementation(&rf).unwrap();
            prop_assert!(imp.p1.values().iter().chain(imp.p2.values()).all(|&v| v >= -1e-12));
            prop_assert!(imp.max_total() <= 1.0 + 1e-9);
            prop_assert!(imp.residual(&rf) <= 1e-7);
        }
    }

    #[test]
    fn bi_upset_signals_pool_exactly(seed in any::<u64>(), m in 2usize..9, prior_frac in 0.0f64..1.0) {
        let a1 = upset_2d(seed, m, m);
        let f2 = monotone(seed ^ 0x55, &[m, m], 1);
        let a2 = UpSet::new(&[m, m], a1.mask().iter().zip(f2.values()).map(|(&x, &v)| x || v >= 0.5).collect()).unwrap();
        let n = (m * m) as f64;
        let prior = (a1.count() as f64 + prior_frac * (a2.count() - a1.count()) as f64) / n;
        prop_assume!(prior > 0.0 && prior < 1.0);
        let sig = BiUpsetSignal::new(a1, a2, prior).unwrap();
        prop_assert!((sig.mean() - prior).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&sig.lambda));
        if let Ok(pool) = pooling_implementation(&sig) {
            let (p1, p2) = pool.marginals();
            let q = sig.marginals();
            prop_assert!(p1.iter().zip(q[0].values()).all(|(a, b)| (a - b).abs() <= 1e-9));
            prop_assert!(p2.iter().zip(q[1].values()).all(|(a, b)| (a - b).abs() <= 1e-9));
        }
    }

    #[test]
    fn mechanism_normalization_round_trips(seed in any::<u64>(), flip0 in any::<bool>(), flip1 in any::<bool>()) {
        let gap = |f: bool| if f { [0.0, 1.0] } else { [1.0, 0.0] };
        let s = ScgScenario::uniform(vec![gap(flip0), gap(flip1)], vec![[0.0, 0.0], [0.0, 0.0]], &[3, 4]).unwrap();
        let p = monotone(seed, &[3, 4], 2);
        let n = normalize_mechanism(&s, &p).unwrap();
        prop_assert_eq!(denormalize_mechanism(&n).unwrap(), p.clone());
        let q = monotone(seed ^ 9, &[3, 4], 2);
        if let Ok(rep) = anti_equivalence_report(&s, &p, &q) {
            prop_assert!(!rep.expost_equivalent || rep.payoff_equivalent);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn order_polytope_vertices_are_upsets(m1 in 1usize..4, m2 in 1usize..3) {
        let dims = [m1, m2];
        let p = LpProblem::new(&dims).unwrap().with_monotonicity();
        let verts = brute_force_vertices(&p).unwrap();
        let ups = enumerate_upsets(&dims).unwrap();
        prop_assert_eq!(verts.len(), ups.len());
        for v in &verts {
            prop_assert!(ups.iter().any(|a| GridFunction::indicator(a).values().iter().zip(v).all(|(x, y)| (x - y).abs() <= 1e-9)));
        }
    }

    #[test]
    fn random_trade_solutions_check(seed in any::<u64>(), mv in 3usize..9, mc in 3usize..9) {
        let s = TradeScenario::random(seed, mv, mc).unwrap();
        let sol = solve_interim_efficient(&s).unwrap();
        prop_assert!(check_solution(&s, &sol).is_ok());
        prop_assert!(is_monotone(&extremal::trade::flip_cost(&sol.p), 1e-9));
    }
}
