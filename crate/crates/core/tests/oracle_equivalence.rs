mod common;

use common::{same_objective, small_integer, FAMILIES};
use rapnc::mda::solve_integer;
use rapnc::model::{check_feasibility, Family};
use rapnc::oracle::{dp_solve, enumerate_solve, exact_linear_cost};

#[test]
fn solver_matches_dp_on_every_family() {
    for family in FAMILIES {
        for seed in 0..500 {
            let inst = small_integer(family, seed, 8, 4, 24);
            let dp = dp_solve(&inst).unwrap();
            let got = solve_integer(&inst).unwrap_or_else(|e| panic!("{family} seed {seed}: {e}"));
            assert!(check_feasibility(&inst, &got.x, 0.0).all_zero());
            if family == Family::Linear {
                assert_eq!(exact_linear_cost(&inst.objective, &got.x), exact_linear_cost(&inst.objective, &dp.x), "seed {seed}");
            } else {
                assert!(same_objective(got.objective_value, dp.objective_value), "{family} seed {seed}: {} vs {}", got.objective_value, dp.objective_value);
            }
        }
    }
}

#[test]
fn dp_matches_enumeration_on_tiny_instances() {
    for family in FAMILIES {
        for seed in 0..200 {
            let inst = small_integer(family, 10_000 + seed, 4, 4, 8);
            let dp = dp_solve(&inst).unwrap();
            let full = enumerate_solve(&inst).unwrap();
            assert!(same_objective(dp.objective_value, full.objective_value), "{family} seed {seed}");
        }
    }
}
