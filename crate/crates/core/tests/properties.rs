mod common;

use common::{small_integer, FAMILIES};
use proptest::prelude::*;
use rapnc::bench::{gen_instance, GenSpec};
use rapnc::mda::{solve_continuous, solve_continuous_with, solve_integer, solve_real, verify_kkt};
use rapnc::model::{check_feasibility, evaluate, validate, ContinuousMethod, Family, Mode, NestedInstance, SolverConfig};

const STRICT: [Family; 4] = [Family::Quadratic, Family::F, Family::Crash, Family::Fuel];

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(FAMILIES.to_vec())
}

fn strict_family() -> impl Strategy<Value = Family> {
    prop::sample::select(STRICT.to_vec())
}

/// Quadratic weights drawn from [0, 3) can be zero in principle; lift them.
fn strictly_convex(mut inst: NestedInstance) -> NestedInstance {
    if let rapnc::model::ObjectiveSpec::Quadratic { w, .. } = &mut inst.objective {
        w.iter_mut().for_each(|w| *w += 0.1);
    }
    inst
}

fn with_total(inst: &NestedInstance, total: f64) -> NestedInstance {
    let mut out = inst.clone();
    let last = out.m() - 1;
    out.a[last] = total;
    out.b[last] = total;
    out
}

fn continuous(family: Family, n: usize, m: usize, seed: u64) -> NestedInstance {
    strictly_convex(gen_instance(GenSpec { n, m, seed, family }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integer_output_is_exactly_feasible(f in family(), seed in any::<u64>()) {
        let inst = small_integer(f, seed, 12, 6, 40);
        let x = solve_integer(&inst).unwrap().x;
        prop_assert!(check_feasibility(&inst, &x, 0.0).all_zero());
        prop_assert!(x.iter().all(|v| v.fract() == 0.0));
    }

    #[test]
    fn continuous_output_is_feasible(f in family(), n in 1usize..60, seed in any::<u64>()) {
        let m = 1 + (seed as usize) % n;
        let inst = gen_instance(GenSpec { n, m, seed, family: f }).unwrap();
        let x = solve_continuous(&inst, 1e-6).unwrap().x;
        prop_assert!(check_feasibility(&inst, &x, 1e-9).within(1e-9));
    }

    #[test]
    fn integer_solution_grows_with_budget(f in strict_family(), seed in any::<u64>(), step in 1i64..4) {
        let low = strictly_convex(small_integer(f, seed, 10, 5, 30));
        let high = with_total(&low, low.total() + step as f64);
        prop_assume!(validate(&high, Mode::Integer).is_ok());
        let x_low = solve_integer(&low).unwrap().x;
        let x_high = solve_integer(&high).unwrap().x;
        for (i, (lo, hi)) in x_low.iter().zip(&x_high).enumerate() {
            prop_assert!(lo <= hi, "coordinate {i}: {x_low:?} vs {x_high:?}");
        }
    }

    #[test]
    fn continuous_solution_grows_with_budget(f in strict_family(), n in 2usize..30, seed in any::<u64>(), frac in 0.01f64..0.5) {
        let low = continuous(f, n, n, seed);
        let room: f64 = low.d.iter().sum::<f64>() - low.total();
        let high = with_total(&low, low.total() + frac * room);
        prop_assume!(validate(&high, Mode::Continuous).is_ok());
        let x_low = solve_real(&low, &SolverConfig::default()).unwrap().x;
        let x_high = solve_real(&high, &SolverConfig::default()).unwrap().x;
        for (i, (lo, hi)) in x_low.iter().zip(&x_high).enumerate() {
            prop_assert!(*lo <= hi + 1e-9, "coordinate {i}: {lo} > {hi}");
        }
    }

    #[test]
    fn integer_and_continuous_optima_are_close(f in strict_family(), seed in any::<u64>()) {
        let inst = strictly_convex(small_integer(f, seed, 10, 5, 30));
        prop_assume!(inst.n() >= 2);
        let xi = solve_integer(&inst).unwrap().x;
        let xc = solve_continuous(&inst, 1e-4).unwrap().x;
        let bound = (inst.n() - 1) as f64;
        for (a, b) in xi.iter().zip(&xc) {
            prop_assert!((a - b).abs() < bound, "{xi:?} vs {xc:?}");
        }
    }

    #[test]
    fn refining_epsilon_moves_little(f in strict_family(), n in 1usize..=50, seed in any::<u64>()) {
        let m = 1 + (seed as usize) % n;
        let inst = continuous(f, n, m, seed);
        let eps = 1e-3;
        let coarse = solve_continuous(&inst, eps).unwrap();
        let fine = solve_continuous(&inst, eps / 100.0).unwrap();
        for (a, b) in coarse.x.iter().zip(&fine.x) {
            prop_assert!((a - b).abs() <= 1.1 * eps, "{a} vs {b}");
        }
        let lipschitz = (0..n).map(|i| inst.objective.slope_bound(i, inst.c[i], inst.d[i])).fold(0.0, f64::max);
        let gap = (evaluate(&inst.objective, &coarse.x).unwrap() - evaluate(&inst.objective, &fine.x).unwrap()).abs();
        prop_assert!(gap <= lipschitz * n as f64 * eps);
    }

    #[test]
    fn direct_solutions_carry_kkt_certificates(f in strict_family(), n in 1usize..40, seed in any::<u64>()) {
        let m = 1 + (seed as usize) % n;
        let inst = continuous(f, n, m, seed);
        let cfg = SolverConfig { continuous_method: ContinuousMethod::DirectBisection, ..SolverConfig::default() };
        let x = solve_continuous_with(&inst, &cfg).unwrap().x;
        prop_assert!(verify_kkt(&inst, &x, 1e-7, None).is_certified(), "{x:?}");
    }
}
