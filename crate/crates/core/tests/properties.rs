mod support;

use proptest::prelude::*;
use qlin_core::oracle::{dominance_violations, enumerate_optimum, feasible_points};
use qlin_core::{
    add_cuts, build_model, check_identities, check_lift, compute_bound_set, read_mps, solve_lp, write_mps,
    BoundOptions, CutFamily, GeneratorConfig, LpStatus, ModelVariant, Rational, Scalar,
};
use support::{random_lp, suite, suite_instance, vertex_minimum};

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut solved = 0;
    for seed in 0..500 {
        let lp = random_lp(seed);
        let sol = solve_lp(&lp).unwrap();
        match (sol.status, vertex_minimum(&lp)) {
            (LpStatus::Optimal, Some(v)) => {
                let got = sol.objective.unwrap();
                assert!((got - v).abs() <= 1e-7, "seed {seed}: {got} vs {v}");
                assert!(support::feasible(&lp, sol.x.as_ref().unwrap(), 1e-7));
                solved += 1;
            }
            (LpStatus::Infeasible, None) => {}
            (status, v) => panic!("seed {seed}: {status:?} vs {v:?}"),
        }
    }
    assert!(solved > 250);
}

#[test]
fn row_order_does_not_change_the_optimum() {
    for seed in 0..200 {
        let lp = random_lp(seed);
        let mut permuted = lp.clone();
        permuted.rows.reverse();
        let (a, b) = (solve_lp(&lp).unwrap(), solve_lp(&permuted).unwrap());
        assert_eq!(a.status, b.status, "seed {seed}");
        if let (Some(x), Some(y)) = (a.objective, b.objective) {
            assert!((x - y).abs() <= 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn generated_instances_have_feasible_points() {
    for seed in 0..100 {
        let cfg =
            GeneratorConfig { n: 4 + (seed as usize) % 5, with_quad_constraint: true, seed, ..Default::default() };
        let inst = qlin_core::generate_random(&cfg).unwrap();
        assert!(!feasible_points(&inst).unwrap().is_empty(), "seed {seed}");
    }
}

#[test]
fn oracle_minimizers_reevaluate_exactly() {
    for (seed, inst) in suite(30, 3, 9) {
        let r = enumerate_optimum(&inst).unwrap();
        for x in &r.argmins {
            let v = inst.evaluate_point(x).unwrap();
            assert!(v.feasible);
            assert_eq!(Some(v.objective), r.objective, "seed {seed}");
        }
    }
}

#[test]
fn conditional_bounds_stay_inside_plain_bounds() {
    for (seed, inst) in suite(40, 3, 9) {
        for enhanced in [false, true] {
            let opts = BoundOptions { conditional: true, enhanced, ..BoundOptions::default() };
            let b = compute_bound_set::<Rational>(&inst, &opts).unwrap();
            let found = dominance_violations(&b, &Rational::approx(1e-9));
            assert!(found.is_empty(), "seed {seed}: {found:?}");
        }
    }
}

#[test]
fn identities_are_exact_on_every_feasible_point() {
    for (seed, inst) in suite(30, 3, 7) {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set::<Rational>(&inst, &opts).unwrap();
        for x in feasible_points(&inst).unwrap() {
            let report = check_identities(&inst, &b, &x).unwrap();
            assert_eq!(report.max_residual, Rational::from_integer(0.into()), "seed {seed} {x:?}");
            assert!(report.sandwich_holds);
        }
    }
}

#[test]
fn mps_round_trips_generated_models() {
    for (seed, inst) in suite(10, 3, 6) {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set::<f64>(&inst, &opts).unwrap();
        for v in ModelVariant::ALL {
            let m = build_model(&inst, &b, v).unwrap();
            assert_eq!(read_mps(&write_mps(&m)).unwrap(), m, "seed {seed} {v}");
            for family in CutFamily::ALL.into_iter().filter(|f| f.compatible_with(v)) {
                let cut = add_cuts(&m, &inst, &b, family).unwrap();
                assert_eq!(read_mps(&write_mps(&cut)).unwrap(), cut);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lifts_of_feasible_points_satisfy_every_model(seed in 0u64..5000, n in 3usize..7) {
        let inst = suite_instance(seed, n);
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set::<Rational>(&inst, &opts).unwrap();
        let zero = Rational::from_integer(0.into());
        for x in feasible_points(&inst).unwrap() {
            for v in ModelVariant::ALL {
                let base = build_model(&inst, &b, v).unwrap();
                let mut models = vec![base.clone()];
                for family in CutFamily::ALL.into_iter().filter(|f| f.compatible_with(v)) {
                    models.push(add_cuts(&base, &inst, &b, family).unwrap());
                }
                for m in &models {
                    let check = check_lift(m, &inst, &b, &x, &zero).unwrap();
                    prop_assert!(check.feasible(), "{} {:?}: {:?}", v, m.cuts, check.violations);
                    prop_assert!(check.objective_matches(&zero));
                }
            }
        }
    }
}
