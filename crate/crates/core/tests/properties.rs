use optlcl::catalog::builtin_examples;
use optlcl::classify::{classify, threshold_report, ComplexityClass};
use optlcl::params::compute_all;
use optlcl::pipeline::Pipeline;
use optlcl::problem::{Aggregation, CostValue, Objective, OptLcl};
use optlcl::sim::{assign_ids, run, IdPolicy};
use optlcl::synthesis::SynthesisPlan;
use optlcl::verify::{opt_bruteforce, opt_dp, solution_value};
use optlcl::{BigRational, Problem, Rational};
use proptest::prelude::*;

fn cost_strategy() -> impl Strategy<Value = CostValue<Rational>> {
    prop_oneof![
        1 => Just(CostValue::Bot),
        3 => (0i64..10, 1i64..4).prop_map(|(n, d)| CostValue::Finite(Rational::new(n, d))),
    ]
}

fn problem_strategy() -> impl Strategy<Value = Problem> {
    (1usize..=3, 0usize..=2, 0usize..4).prop_flat_map(|(k, r, kind)| {
        let count = k.pow(r as u32 + 1);
        proptest::collection::vec(cost_strategy(), count).prop_map(move |costs| {
            let (objective, aggregation) = [
                (Objective::Min, Aggregation::Sum),
                (Objective::Max, Aggregation::Sum),
                (Objective::Min, Aggregation::Max),
                (Objective::Max, Aggregation::Min),
            ][kind];
            let alphabet = ["x", "y", "z"][..k].iter().map(|s| s.to_string()).collect();
            OptLcl::new(alphabet, r, objective, aggregation, costs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn dp_matches_enumeration(p in problem_strategy(), n in 1usize..8) {
        let dp = opt_dp(&p, n);
        prop_assert_eq!(&dp.value, &opt_bruteforce(&p, n, u64::MAX).unwrap());
        if let Some(w) = &dp.witness {
            prop_assert_eq!(solution_value(&p, w).unwrap(), dp.value);
        } else {
            prop_assert!(dp.value.is_bot());
        }
    }

    #[test]
    fn value_is_rotation_invariant(p in problem_strategy(), labels in proptest::collection::vec(0usize..3, 1..9), shift in 0usize..9) {
        let k = p.alphabet().len();
        let labels: Vec<usize> = labels.into_iter().map(|l| l % k).collect();
        let mut rotated = labels.clone();
        rotated.rotate_left(shift % labels.len());
        prop_assert_eq!(solution_value(&p, &labels).unwrap(), solution_value(&p, &rotated).unwrap());
    }

    #[test]
    fn thresholds_agree_with_classify(p in problem_strategy(), num in 1i64..400, den in 1i64..40) {
        let params = compute_all(&p);
        let Ok(report) = threshold_report(&params) else { return Ok(()) };
        let alpha = Rational::new(num.max(den), den);
        let piece = report.classification_at(&alpha).expect("pieces cover [1, inf)");
        prop_assert_eq!(piece, &classify(&params, &alpha).unwrap());
        for (interval, c) in &report.pieces {
            prop_assert_eq!(c, &classify(&params, &interval.representative()).unwrap());
        }
    }

    #[test]
    fn unsolvable_problems_are_class_e(p in problem_strategy()) {
        let params = compute_all(&p);
        if matches!(params.beta_opt, Some(CostValue::Bot)) {
            let c = classify(&params, &Rational::from_integer(2)).unwrap();
            prop_assert_eq!(c.class, ComplexityClass::E);
            for n in 1..6 {
                prop_assert!(opt_dp(&p, n).value.is_bot());
            }
        }
    }
}

#[test]
fn scalar_types_agree() {
    for ((name, a), (_, b)) in builtin_examples::<Rational>().into_iter().zip(builtin_examples::<BigRational>()) {
        let ra = threshold_report(&compute_all(&a)).unwrap().report();
        let rb = threshold_report(&compute_all(&b)).unwrap().report();
        assert_eq!(ra, rb, "{name}");
        for n in [1, 7, 40] {
            assert_eq!(opt_dp(&a, n).value.to_string(), opt_dp(&b, n).value.to_string(), "{name} n={n}");
        }
    }
}

#[test]
fn optimum_is_periodic_on_witness_multiples() {
    for (name, p) in builtin_examples::<Rational>() {
        if p.aggregation() != Aggregation::Sum {
            continue;
        }
        let params = compute_all(&p);
        let beta = params.beta_opt.clone().unwrap().into_option().unwrap();
        let k = params.witness.opt.as_ref().unwrap().len() - 1;
        for m in 1..=12 {
            let n = m * k;
            let opt = opt_dp(&p, n).value.into_option().unwrap();
            assert_eq!(opt, beta * Rational::from_integer(n as i64), "{name} n={n}");
        }
    }
}

#[test]
fn plans_survive_text_roundtrip() {
    for (name, p) in builtin_examples::<Rational>() {
        let pipe = Pipeline::new(p);
        for (interval, _) in threshold_report(&pipe.params).unwrap().pieces {
            let plan = pipe.plan(&interval.representative()).unwrap();
            let text = plan.to_text(&pipe.problem);
            assert_eq!(SynthesisPlan::from_text(&pipe.problem, &text).unwrap(), plan, "{name} {interval}");
        }
    }
}

#[test]
fn adversarial_ids_keep_guarantees() {
    for (name, p) in builtin_examples::<Rational>() {
        let pipe = Pipeline::new(p);
        for (interval, c) in threshold_report(&pipe.params).unwrap().pieces {
            if c.class == ComplexityClass::D {
                continue;
            }
            let alpha = interval.representative();
            let plan = pipe.plan(&alpha).unwrap();
            let alg = pipe.algorithm(&plan).unwrap();
            for (n, block) in [(600, 1), (601, 600), (777, 25)] {
                let r = pipe.run_once(alg.as_ref(), n, 11, IdPolicy::AdversarialBlocks(block), &alpha).unwrap();
                assert!(r.valid, "{name} {interval} n={n}");
                if !plan.strategy.is_randomized() {
                    assert_eq!(r.alpha_ok, Some(true), "{name} {interval} n={n}");
                }
            }
        }
    }
}

#[test]
fn measured_locality_within_declared() {
    for (_, p) in builtin_examples::<Rational>() {
        let pipe = Pipeline::new(p);
        for (interval, _) in threshold_report(&pipe.params).unwrap().pieces {
            let plan = pipe.plan(&interval.representative()).unwrap();
            let alg = pipe.algorithm(&plan).unwrap();
            for n in [5, 64, 300] {
                let inst = assign_ids(n, 2, IdPolicy::RandomPermutation);
                if let Ok(r) = run(alg.as_ref(), &inst, 2) {
                    assert!(r.measured_locality <= r.declared_locality);
                }
            }
        }
    }
}
