//! Monotonic decomposition over nested constraints.
//!
//! A node covering constraints v..=w solves four subproblems, one per choice
//! of the outer prefix values (L, R). Its children's solutions, once ordered
//! by [`adjust`], become per-variable bounds that make every inner nested
//! constraint redundant, so each node reduces to a single-constraint RAP.

mod kkt;
mod recursion;
mod scaling;

pub use kkt::{verify_kkt, KktCertificate, KktVerdict, KktViolation};

use recursion::{adjust_in_place, Decomposition};

use crate::error::{Error, Result};
use crate::model::{
    check_feasibility, evaluate, validate, Allocation, ContinuousMethod, Mode, NestedInstance, ObjectiveSpec,
    SolveStats, SolverConfig,
};
use crate::rap::num::Num;
use crate::rap::{Engine, IntEngine, RealEngine, Scaled};

/// Algorithm-level Adjust on an explicit index order.
///
/// Pools everything above `x_up` and redistributes it, in the order of `v`,
/// to entries below `x_up`. Entries outside `v` are untouched.
pub fn adjust(v: &[usize], x: &[f64], x_up: &[f64]) -> Result<Vec<f64>> {
    let mut sub: Vec<f64> = v.iter().map(|&i| x[i]).collect();
    let up: Vec<f64> = v.iter().map(|&i| x_up[i]).collect();
    let have: f64 = sub.iter().sum();
    let cap: f64 = up.iter().sum();
    if have > cap + 1e-9 * cap.abs().max(1.0) {
        return Err(Error::Internal(format!("adjust needs sum(x) <= sum(x_up) on V, got {have} > {cap}")));
    }
    adjust_in_place(&mut sub, &up, false)?;
    let mut out = x.to_vec();
    for (k, &i) in v.iter().enumerate() {
        out[i] = sub[k];
    }
    Ok(out)
}

/// The four solutions of a node, over variables sigma[v-1]..sigma[w].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSolutionSet {
    pub x_aa: Vec<f64>,
    pub x_ab: Vec<f64>,
    pub x_ba: Vec<f64>,
    pub x_bb: Vec<f64>,
    pub stats: SolveStats,
}

fn run<E: Engine>(engine: &E, sigma: &[usize], a: Vec<E::T>, b: Vec<E::T>, v: usize, w: usize, parallel: bool) -> Result<([Vec<E::T>; 4], SolveStats)> {
    let dec = Decomposition::new(engine, sigma, a, b, parallel);
    let start = if v == 0 { 0 } else { sigma[v - 1] };
    let len = sigma[w] - start;
    let mut lanes = [vec![E::T::ZERO; len], vec![E::T::ZERO; len], vec![E::T::ZERO; len], vec![E::T::ZERO; len]];
    {
        let [l0, l1, l2, l3] = &mut lanes;
        dec.solve_range(v, w, [l0, l1, l2, l3])?;
    }
    Ok((lanes, dec.counters.snapshot()))
}

fn int_bounds(v: &[f64]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

/// Runs the decomposition on constraints v..=w (1-based, inclusive).
pub fn mda(inst: &NestedInstance, v: usize, w: usize, mode: Mode) -> Result<QuadSolutionSet> {
    validate(inst, mode)?;
    if v == 0 || v > w || w > inst.m() {
        return Err(Error::Malformed(format!("constraint range {v}..={w} outside 1..={}", inst.m())));
    }
    let (lanes, stats): ([Vec<f64>; 4], SolveStats) = match mode {
        Mode::Integer => {
            let engine = IntEngine { g: Scaled::new(&inst.objective, 1.0), c: int_bounds(&inst.c), d: int_bounds(&inst.d) };
            let (l, st) = run(&engine, &inst.sigma, int_bounds(&inst.a), int_bounds(&inst.b), v - 1, w - 1, false)?;
            (l.map(|x| x.into_iter().map(|v| v as f64).collect()), st)
        }
        Mode::Continuous => {
            let engine = RealEngine { obj: &inst.objective, c: &inst.c, d: &inst.d };
            run(&engine, &inst.sigma, inst.a.clone(), inst.b.clone(), v - 1, w - 1, false)?
        }
    };
    let [x_aa, x_ab, x_ba, x_bb] = lanes;
    Ok(QuadSolutionSet { x_aa, x_ab, x_ba, x_bb, stats })
}

/// Upper bound on subproblem solves: four per node of a balanced split of m constraints.
pub fn rap_solve_bound(m: usize) -> u64 {
    let depth = (m.max(1) as f64).log2().ceil() as u32;
    4 * (2 * 2u64.pow(depth) - 1)
}

fn finish(inst: &NestedInstance, x: Vec<f64>, mode: Mode, stats: SolveStats) -> Result<Allocation> {
    let objective_value = evaluate(&inst.objective, &x).map_err(|e| Error::Internal(format!("root solution outside the objective domain: {e}")))?;
    Ok(Allocation { x, objective_value, mode, stats })
}

fn check_root(inst: &NestedInstance, x: &[f64], tol: f64) -> Result<()> {
    let rep = check_feasibility(inst, x, tol);
    if rep.all_zero() {
        Ok(())
    } else {
        Err(Error::Internal(format!("root solution violates constraints: {rep:?}")))
    }
}

/// Exact integer optimum of an integral instance.
pub fn solve_integer(inst: &NestedInstance) -> Result<Allocation> {
    solve_integer_with(inst, &SolverConfig::default())
}

pub fn solve_integer_with(inst: &NestedInstance, cfg: &SolverConfig) -> Result<Allocation> {
    validate(inst, Mode::Integer)?;
    let engine = IntEngine { g: Scaled::new(&inst.objective, 1.0), c: int_bounds(&inst.c), d: int_bounds(&inst.d) };
    let (lanes, stats) = run(&engine, &inst.sigma, int_bounds(&inst.a), int_bounds(&inst.b), 0, inst.m() - 1, cfg.parallel)?;
    let [_, _, _, x_bb] = lanes;
    let x: Vec<f64> = x_bb.into_iter().map(|v| v as f64).collect();
    check_root(inst, &x, 0.0)?;
    finish(inst, x, Mode::Integer, stats)
}

/// Solves on the grid of step 1/s and maps back, then removes rounding residue
/// on equality constraints.
pub fn solve_scaled(inst: &NestedInstance, s: f64, cfg: &SolverConfig) -> Result<Allocation> {
    validate(inst, Mode::Continuous)?;
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::ScaleOverflow { scale: s });
    }
    let grid = scaling::scale_bounds(inst, s)?;
    if !scaling::grid_feasible(&inst.sigma, &grid) {
        return Err(Error::ScaledInfeasible { scale: s });
    }
    let engine = IntEngine { g: Scaled::new(&inst.objective, s), c: grid.c, d: grid.d };
    let (lanes, stats) = run(&engine, &inst.sigma, grid.a, grid.b, 0, inst.m() - 1, cfg.parallel)?;
    let [_, _, _, x_bb] = lanes;
    let mut x: Vec<f64> = x_bb.into_iter().map(|v| v as f64 / s).collect();
    scaling::polish(inst, &mut x);
    check_root(inst, &x, cfg.feasibility_tol.max(1e-12))?;
    finish(inst, x, Mode::Continuous, stats)
}

/// Decomposition run directly in floating point.
pub fn solve_real(inst: &NestedInstance, cfg: &SolverConfig) -> Result<Allocation> {
    validate(inst, Mode::Continuous)?;
    let engine = RealEngine { obj: &inst.objective, c: &inst.c, d: &inst.d };
    let (lanes, stats) = run(&engine, &inst.sigma, inst.a.clone(), inst.b.clone(), 0, inst.m() - 1, cfg.parallel)?;
    let [_, _, _, mut x] = lanes;
    scaling::polish(inst, &mut x);
    check_root(inst, &x, cfg.feasibility_tol.max(1e-12))?;
    finish(inst, x, Mode::Continuous, stats)
}

/// Grid factor giving accuracy epsilon on n variables.
pub fn scale_factor(n: usize, epsilon: f64) -> f64 {
    (n as f64 / epsilon).ceil()
}

/// epsilon-approximate continuous solve.
///
/// Quadratic objectives are solved exactly in floating point. Others go
/// through an integer solve on a grid of step epsilon / n, or through direct
/// bisection when the config asks for it.
pub fn solve_continuous(inst: &NestedInstance, epsilon: f64) -> Result<Allocation> {
    solve_continuous_with(inst, &SolverConfig { epsilon, ..SolverConfig::default() })
}

pub fn solve_continuous_with(inst: &NestedInstance, cfg: &SolverConfig) -> Result<Allocation> {
    cfg.check()?;
    validate(inst, Mode::Continuous)?;
    if matches!(inst.objective, ObjectiveSpec::Quadratic { .. }) {
        return solve_real(inst, cfg);
    }
    if inst.n() == 1 {
        let stats = SolveStats::default();
        return finish(inst, vec![inst.total()], Mode::Continuous, stats);
    }
    match cfg.continuous_method {
        ContinuousMethod::Scaling => solve_scaled(inst, scale_factor(inst.n(), cfg.epsilon), cfg),
        ContinuousMethod::DirectBisection => solve_real(inst, cfg),
    }
}

/// Dispatch on mode.
pub fn solve(inst: &NestedInstance, mode: Mode, cfg: &SolverConfig) -> Result<Allocation> {
    match mode {
        Mode::Integer => solve_integer_with(inst, cfg),
        Mode::Continuous => solve_continuous_with(inst, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_quadratic() -> NestedInstance {
        NestedInstance::new(
            vec![1, 2],
            vec![0.0, 4.0],
            vec![1.0, 4.0],
            vec![0.0, 0.0],
            vec![4.0, 4.0],
            ObjectiveSpec::Quadratic { w: vec![1.0, 1.0], t: vec![0.0, 0.0] },
        )
    }

    #[test]
    fn adjust_examples() {
        assert_eq!(adjust(&[0, 1], &[3.0, 1.0], &[2.0, 3.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(adjust(&[0, 1], &[1.0, 1.0], &[2.0, 3.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(adjust(&[0, 1, 2], &[5.0, 0.0, 0.0], &[2.0, 2.0, 2.0]).unwrap(), vec![2.0, 2.0, 1.0]);
        assert!(matches!(adjust(&[0], &[3.0], &[2.0]), Err(Error::Internal(_))));
    }

    #[test]
    fn adjust_leaves_outside_entries() {
        let out = adjust(&[2, 0], &[3.0, 7.0, 0.0], &[2.0, 0.0, 5.0]).unwrap();
        assert_eq!(out, vec![2.0, 7.0, 1.0]);
    }

    #[test]
    fn quadratic_two_variables() {
        let a = solve_integer(&two_var_quadratic()).unwrap();
        assert_eq!(a.x, vec![1.0, 3.0]);
        assert_eq!(a.objective_value, 10.0);
        assert!(a.stats.rap_solves <= rap_solve_bound(2));
        let set = mda(&two_var_quadratic(), 1, 2, Mode::Integer).unwrap();
        assert_eq!(set.x_bb, vec![1.0, 3.0]);
    }

    #[test]
    fn single_constraint_symmetric() {
        let inst = NestedInstance::single(4.0, vec![0.0; 2], vec![4.0; 2], ObjectiveSpec::Quadratic { w: vec![1.0; 2], t: vec![0.0; 2] });
        assert_eq!(solve_integer(&inst).unwrap().x, vec![2.0, 2.0]);
    }

    #[test]
    fn linear_three_variables() {
        let inst = NestedInstance::new(
            vec![2, 3],
            vec![0.0, 6.0],
            vec![3.0, 6.0],
            vec![0.0; 3],
            vec![3.0; 3],
            ObjectiveSpec::Linear { p: vec![3.0, 1.0, 2.0] },
        );
        let a = solve_integer(&inst).unwrap();
        assert_eq!(a.x, vec![0.0, 3.0, 3.0]);
        assert_eq!(a.objective_value, 9.0);
    }

    #[test]
    fn pinned_instance() {
        let c = vec![1.0, 2.0, 3.0];
        let inst = NestedInstance::new(vec![1, 3], vec![0.0, 6.0], vec![5.0, 6.0], c.clone(), c.clone(), ObjectiveSpec::F { p: vec![0.0; 3] });
        assert_eq!(solve_integer(&inst).unwrap().x, c);
    }

    #[test]
    fn infeasible_instance_rejected() {
        let inst = NestedInstance::single(6.0, vec![0.0], vec![5.0], ObjectiveSpec::Linear { p: vec![1.0] });
        assert!(matches!(solve_integer(&inst), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn scale_factor_example() {
        assert_eq!(scale_factor(4, 0.5), 8.0);
    }

    #[test]
    fn crash_continuous_symmetric() {
        let inst = NestedInstance::single(4.0, vec![1.0; 2], vec![3.0; 2], ObjectiveSpec::Crash { k: vec![0.0; 2], p: vec![1.0; 2] });
        for eps in [0.5, 1e-3, 1e-6] {
            let a = solve_continuous(&inst, eps).unwrap();
            assert!((a.x[0] - 2.0).abs() <= eps && (a.x[1] - 2.0).abs() <= eps, "{eps}: {:?}", a.x);
        }
    }

    #[test]
    fn quadratic_continuous_exact() {
        let inst = NestedInstance::new(
            vec![1, 3],
            vec![0.0, 2.0],
            vec![0.5, 2.0],
            vec![0.0; 3],
            vec![2.0; 3],
            ObjectiveSpec::Quadratic { w: vec![1.0, 2.0, 1.0], t: vec![1.5, 0.0, 1.0] },
        );
        let a = solve_continuous(&inst, 1e-6).unwrap();
        assert!(check_feasibility(&inst, &a.x, 1e-12).all_zero());
        assert!(verify_kkt(&inst, &a.x, 1e-9, None).is_certified(), "{:?}", a.x);
    }

    #[test]
    fn kkt_rejects_perturbed_point() {
        let inst = NestedInstance::single(3.0, vec![0.0; 3], vec![3.0; 3], ObjectiveSpec::Quadratic { w: vec![1.0; 3], t: vec![0.5, 1.0, 1.5] });
        let a = solve_continuous(&inst, 1e-6).unwrap();
        assert!(verify_kkt(&inst, &a.x, 1e-9, None).is_certified());
        let mut bad = a.x.clone();
        bad[0] += 0.1;
        bad[1] -= 0.1;
        assert!(matches!(verify_kkt(&inst, &bad, 1e-9, None), KktVerdict::Violated(KktViolation::Stationarity { .. })));
    }

    #[test]
    fn kkt_pinned_instance() {
        let c = vec![1.0, 2.0];
        let inst = NestedInstance::new(vec![1, 2], vec![1.0, 3.0], vec![1.0, 3.0], c.clone(), c.clone(), ObjectiveSpec::Quadratic { w: vec![1.0; 2], t: vec![0.0; 2] });
        assert!(verify_kkt(&inst, &c, 1e-9, None).is_certified());
    }

    #[test]
    fn parallel_matches_sequential() {
        let n = 20_000;
        let c = vec![0.0; n];
        let d = vec![3.0; n];
        let a: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let b: Vec<f64> = (1..=n).map(|i| if i == n { n as f64 } else { 2.0 * i as f64 }).collect();
        let p: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64).collect();
        let inst = NestedInstance::full_nesting(a, b, c, d, ObjectiveSpec::Linear { p });
        let seq = solve_integer(&inst).unwrap();
        let par = solve_integer_with(&inst, &SolverConfig { parallel: true, ..SolverConfig::default() }).unwrap();
        assert_eq!(seq.x, par.x);
        assert_eq!(seq.stats, par.stats);
    }
}
