mod support;

use std::sync::Arc;

use eufactor::axioms::{check_weak_order, CheckOptions};
use eufactor::generators::*;
use eufactor::representation::{evaluate_v_nested, factorize_from, max_minor, DEFAULT_FACTORIZE_TOL};
use eufactor::*;
use proptest::prelude::*;
use support::*;

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    })
}

fn product_belief() -> impl Strategy<Value = ProductBelief> {
    (2usize..=5, 2usize..=5).prop_flat_map(|(n_s, n_t)| (simplex(n_s), simplex(n_t))).prop_map(|(p, q)| ProductBelief::new(p, q).unwrap())
}

fn utility() -> impl Strategy<Value = UtilityFunction> {
    (prop::collection::vec(-5.0f64..5.0, 2..6), prop::collection::vec(0.01f64..3.0, 6)).prop_filter_map("distinct knots", |(mut xs, steps)| {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() < 2 || xs.windows(2).any(|w| w[1] - w[0] < 1e-6) {
            return None;
        }
        let mut level = 0.0;
        let knots = xs.iter().zip(&steps).map(|(&x, s)| {
            level += s;
            (x, level)
        });
        UtilityFunction::new(knots.collect()).ok()
    })
}

fn agent_model() -> impl Strategy<Value = (RepresentationKind, StateSpace)> {
    prop_oneof![
        (2usize..=3, 2usize..=3).prop_map(|(s, t)| (RepresentationKind::Product2D, StateSpace::indexed(s, t, None).unwrap())),
        (2usize..=3, 2usize..=3).prop_map(|(s, t)| (RepresentationKind::Joint2D, StateSpace::indexed(s, t, None).unwrap())),
        (2usize..=3, 2usize..=3).prop_map(|(i, t)| (RepresentationKind::Joint3D, StateSpace::indexed(2, t, Some(i)).unwrap())),
        (2usize..=3, 2usize..=3).prop_map(|(i, s)| (RepresentationKind::Product3D, StateSpace::indexed(s, 2, Some(i)).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn regrouping_identity(b in product_belief(), u in utility(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = Arc::new(StateSpace::indexed(b.p().len(), b.q().len(), None).unwrap());
        let x = random_real_prospect(&mut r, &space);
        let v = evaluate_v(&x, &u, &b).unwrap();
        for axis in [Axis::S, Axis::T] {
            prop_assert!((v - evaluate_v_nested(&x, &u, &b, axis).unwrap()).abs() <= 1e-12);
        }
        prop_assert!((v - brute_v(&x, &u, b.p(), b.q())).abs() <= 1e-12);
    }

    #[test]
    fn period_values_match_the_direct_sum((model, space) in agent_model(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let rep = random_representation(&mut r, model, &space, &[0.0, 1.0, 2.0, 5.0], BeliefStructure::Product).unwrap();
        let arc = Arc::new(space);
        for _ in 0..10 {
            let x = random_prospect(&mut r, &arc, &[-1.0, 0.0, 0.5, 2.0, 7.0]);
            let direct = brute_w(&x, rep.utilities(), &rep.joint_belief());
            prop_assert!((rep.evaluate(&x).unwrap() - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn factorization_soundness(b in product_belief(), bend in 0.0f64..0.2, cell in any::<prop::sample::Index>()) {
        let joint = b.to_joint();
        let n_s = joint.n_s();
        let n_t = joint.n_t();
        // shift mass between two cells of the first row and the last row
        let mut pi = joint.as_slice().to_vec();
        let t = cell.index(n_t - 1);
        let d = bend * pi[t].min(pi[t + 1]).min(pi[(n_s - 1) * n_t + t]).min(pi[(n_s - 1) * n_t + t + 1]);
        pi[t] += d;
        pi[t + 1] -= d;
        pi[(n_s - 1) * n_t + t] -= d;
        pi[(n_s - 1) * n_t + t + 1] += d;
        let bent = JointBelief::from_flat(n_s, n_t, pi).unwrap();
        for belief in [&joint, &bent] {
            for tol in [DEFAULT_FACTORIZE_TOL, 1e-6, 1e-3] {
                let r = factorize(belief, tol).unwrap();
                if let Some(prod) = r.product() {
                    let rebuilt = prod.to_joint();
                    for (a, b) in rebuilt.as_slice().iter().zip(belief.as_slice()) {
                        prop_assert!((a - b).abs() <= tol);
                    }
                } else {
                    prop_assert!(r.witness.recompute(belief, &r.p, &r.q) > tol);
                }
                // marginal consistency, bit for bit
                prop_assert_eq!(&r.p, &belief.row_sums());
            }
        }
    }

    #[test]
    fn row_normalized_rows_decide_independence(b in product_belief(), seed in any::<u64>()) {
        let joint = b.to_joint();
        let mut r = rng(seed);
        let corr = correlated_belief(&mut r, joint.n_s(), joint.n_t(), 0.05).unwrap();
        for (belief, expect) in [(&joint, true), (&corr, false)] {
            let rows: Vec<Vec<f64>> = (0..belief.n_s())
                .map(|s| {
                    let m: f64 = belief.row(s).iter().sum();
                    belief.row(s).iter().map(|v| v / m).collect()
                })
                .collect();
            let equal = rows.iter().all(|row| row.iter().zip(&rows[0]).all(|(a, b)| (a - b).abs() <= DEFAULT_FACTORIZE_TOL));
            prop_assert_eq!(equal, expect);
            prop_assert_eq!(factorize(belief, DEFAULT_FACTORIZE_TOL).unwrap().is_product(), expect);
            for s0 in 0..belief.n_s() {
                prop_assert_eq!(factorize_from(belief, DEFAULT_FACTORIZE_TOL, s0).unwrap().is_product(), expect);
            }
        }
    }

    #[test]
    fn affine_maps_keep_verdicts((model, space) in agent_model(), seed in any::<u64>(), a in 0.1f64..20.0, shift in -10.0f64..10.0) {
        let mut r = rng(seed);
        let rep = random_representation(&mut r, model, &space, &[0.0, 1.0, 2.0, 3.0], BeliefStructure::Product).unwrap();
        let universe = random_universe(&mut r, &Arc::new(space), &[0.0, 1.0, 2.0, 3.0], 12);
        let base = induced_preference(&rep, &universe).unwrap();
        let moved = induced_preference(&rep.affine(a, shift).unwrap(), &universe).unwrap();
        prop_assert_eq!(base.comparisons(), moved.comparisons());
        let norm = normalize_representation(&rep).unwrap();
        prop_assert_eq!(&normalize_representation(&norm).unwrap(), &norm);
        let after = induced_preference(&norm, &universe).unwrap();
        prop_assert_eq!(after.comparisons(), base.comparisons());
    }

    #[test]
    fn generated_agents_show_their_pattern((model, space) in agent_model(), seed in 0u64..1000) {
        let cfg = AgentConfig::new(model, seed, space, vec![0.0, 1.0, 2.0, 3.0], 40);
        let (rep, data) = gen_agent(&cfg).unwrap();
        let opts = CheckOptions::default();
        prop_assert_eq!(check_weak_order(&data, &opts).verdict, ReportVerdict::Pass);
        let reports = if data.has_periods() {
            check_theorem2_hypotheses(&data, Stage::Joint, &opts).unwrap()
        } else {
            check_theorem1_hypotheses(&data, &opts).unwrap()
        };
        let product = factorize(&rep.joint_belief(), DEFAULT_FACTORIZE_TOL).unwrap().is_product();
        for r in &reports {
            // joint-stage checks hold for every joint belief; product beliefs pass everything
            if data.has_periods() || product {
                prop_assert_ne!(r.verdict, ReportVerdict::Fail, "{} failed", r.axiom);
            }
        }
        if !product {
            let checks = if data.has_periods() {
                check_theorem2_hypotheses(&data, Stage::Product, &opts).unwrap()
            } else {
                reports.clone()
            };
            prop_assert!(checks.iter().any(|r| r.axiom.starts_with("invariance") && r.verdict == ReportVerdict::Fail));
        }
    }

    #[test]
    fn witnesses_replay_and_vacuous_means_no_evidence((model, space) in agent_model(), seed in 0u64..1000, flips in 0usize..6, keep in 0.02f64..1.0) {
        let cfg = AgentConfig::new(model, seed, space, vec![0.0, 1.0, 2.0], 20);
        let (_, clean) = gen_agent(&cfg).unwrap();
        let mut r = rng(seed);
        let noisy = perturb(&mut r, &clean, flips, 1);
        let data = thin(&mut r, &noisy, keep);
        let opts = CheckOptions::default();
        let reports = if data.has_periods() {
            check_theorem2_hypotheses(&data, Stage::Product, &opts).unwrap()
        } else {
            check_theorem1_hypotheses(&data, &opts).unwrap()
        };
        for rep in &reports {
            for w in &rep.witnesses {
                prop_assert!(w.replays(&data), "{} witness {:?} does not replay", rep.axiom, w);
            }
            if rep.verdict == ReportVerdict::Vacuous {
                prop_assert_eq!(rep.coverage, 0);
            }
            prop_assert_eq!(rep.verdict == ReportVerdict::Fail, !rep.witnesses.is_empty());
        }
    }

    #[test]
    fn sequential_and_parallel_agree((model, space) in agent_model(), seed in 0u64..1000) {
        let cfg = AgentConfig::new(model, seed, space, vec![0.0, 1.0, 2.0, 3.0], 30);
        let (rep, data) = gen_agent(&cfg).unwrap();
        let seq = representation::induced_preference_with(&rep, data.universe(), Execution::Sequential).unwrap();
        let par = representation::induced_preference_with(&rep, data.universe(), Execution::Parallel).unwrap();
        prop_assert_eq!(&seq, &par);
        let run = |exec| {
            let opts = CheckOptions { exec, ..CheckOptions::default() };
            if data.has_periods() {
                check_theorem2_hypotheses(&data, Stage::Product, &opts).unwrap()
            } else {
                check_theorem1_hypotheses(&data, &opts).unwrap()
            }
        };
        prop_assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn json_round_trips((model, space) in agent_model(), seed in 0u64..1000) {
        let cfg = AgentConfig::new(model, seed, space, vec![0.0, 1.5, 3.0], 12);
        let (rep, data) = gen_agent(&cfg).unwrap();
        let rep2: EURepresentation = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        prop_assert_eq!(&rep, &rep2);
        let data2: PreferenceDataset = serde_json::from_str(&serde_json::to_string(&data).unwrap()).unwrap();
        prop_assert_eq!(&data, &data2);
        let reports = if data.has_periods() {
            check_theorem2_hypotheses(&data, Stage::Joint, &CheckOptions::default()).unwrap()
        } else {
            check_theorem1_hypotheses(&data, &CheckOptions::default()).unwrap()
        };
        let back: Vec<AxiomReport> = serde_json::from_str(&serde_json::to_string(&reports).unwrap()).unwrap();
        prop_assert_eq!(reports, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fit_is_deterministic_and_monotone(seed in 0u64..1000) {
        let space = StateSpace::indexed(2, 3, None).unwrap();
        let cfg = AgentConfig::new(RepresentationKind::Product2D, seed, space, vec![0.0, 1.0, 2.0], 25);
        let (_, data) = gen_agent(&cfg).unwrap();
        let fc = FitConfig { seed, max_outer_iterations: 40, ..FitConfig::default() };
        let a = fit(&data, &fc).unwrap();
        let b = fit(&data, &FitConfig { exec: Execution::Sequential, ..fc.clone() }).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(count_violations(&a.representation, &data).unwrap(), a.violations);
        prop_assert_eq!(a.violations, 0);
    }
}

#[test]
fn max_minor_of_a_product_is_tiny() {
    let b = ProductBelief::new(vec![0.2, 0.3, 0.5], vec![0.1, 0.9]).unwrap().to_joint();
    assert!(max_minor(&b).0 <= 1e-15);
}
