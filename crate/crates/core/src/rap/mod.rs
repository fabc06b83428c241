//! Single-constraint resource allocation: min Σ f_i(x_i) s.t. Σx = budget on a box.
//!
//! The decomposition calls [`Engine::solve_node`] at every node. It first
//! applies the penalty shortcut, which settles a subproblem outright when the
//! budget lies outside what the original boxes allow inside the effective
//! bounds; otherwise it hands the clipped box to a family-specific engine.

mod convex;
mod cost;
mod linear;
pub(crate) mod num;
mod quadratic;

use std::cell::RefCell;

pub(crate) use cost::Scaled;
use num::{clamp, sum, Num};

use crate::error::{Error, Result};
use crate::model::{Allocation, Family, Mode, ObjectiveSpec, SolveStats};

#[derive(Default)]
pub(crate) struct Pool {
    pub idx: Vec<usize>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub i1: Vec<i64>,
}

thread_local! {
    static POOL: RefCell<Pool> = RefCell::new(Pool::default());
}

/// Borrow this thread's scratch buffers. Nested calls get fresh buffers.
pub(crate) fn with_pool<R>(f: impl FnOnce(&mut Pool) -> R) -> R {
    let mut pool = POOL.with(|p| std::mem::take(&mut *p.borrow_mut()));
    let r = f(&mut pool);
    POOL.with(|p| *p.borrow_mut() = pool);
    r
}

fn infeasible(lo: f64, hi: f64) -> Error {
    Error::InfeasibleSubproblem { v: 0, w: 0, left: lo, right: hi }
}

/// A per-variable RAP solver over one numeric type.
pub(crate) trait Engine: Sync {
    type T: Num;

    /// Original lower box bound of variable `i`, in engine units.
    fn c(&self, i: usize) -> Self::T;
    /// Original upper box bound of variable `i`, in engine units.
    fn d(&self, i: usize) -> Self::T;

    /// Hard-box RAP on variables `start..start + lo.len()`; bounds are finite.
    fn solve_box(&self, start: usize, lo: &[Self::T], hi: &[Self::T], target: Self::T, out: &mut [Self::T]) -> Result<()>;

    /// Penalized RAP with effective bounds `cbar..dbar` (possibly unbounded).
    ///
    /// Outside the range the original boxes allow, every optimum sits on the
    /// penalized side of each box, where any split of the shortfall costs the
    /// same. Otherwise the optimum lies inside the clipped box. `cbar` and
    /// `dbar` are overwritten with that box on pass-through. Returns whether
    /// the shortcut settled the subproblem.
    fn solve_node(
        &self,
        start: usize,
        cbar: &mut [Self::T],
        dbar: &mut [Self::T],
        target: Self::T,
        out: &mut [Self::T],
    ) -> Result<bool> {
        let k = out.len();
        let (mut slo, mut shi) = (Self::T::ZERO, Self::T::ZERO);
        for j in 0..k {
            slo += clamp(self.c(start + j), cbar[j], dbar[j]);
            shi += clamp(self.d(start + j), cbar[j], dbar[j]);
        }
        if target < slo {
            for j in 0..k {
                out[j] = clamp(self.c(start + j), cbar[j], dbar[j]);
            }
            Self::T::spread_down(out, cbar, slo - target);
            return Ok(true);
        }
        if target > shi {
            for j in 0..k {
                out[j] = clamp(self.d(start + j), cbar[j], dbar[j]);
            }
            Self::T::spread_up(out, dbar, target - shi);
            return Ok(true);
        }
        for j in 0..k {
            let (cb, db) = (cbar[j], dbar[j]);
            cbar[j] = clamp(self.c(start + j), cb, db);
            dbar[j] = clamp(self.d(start + j), cb, db);
        }
        self.solve_box(start, cbar, dbar, target, out)?;
        Ok(false)
    }
}

/// Engine on the integer grid of step 1/s.
pub(crate) struct IntEngine<'a> {
    pub g: Scaled<'a>,
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

impl Engine for IntEngine<'_> {
    type T = i64;

    fn c(&self, i: usize) -> i64 {
        self.c[i]
    }

    fn d(&self, i: usize) -> i64 {
        self.d[i]
    }

    fn solve_box(&self, start: usize, lo: &[i64], hi: &[i64], target: i64, out: &mut [i64]) -> Result<()> {
        let (slo, shi) = (sum(lo), sum(hi));
        if target < slo || target > shi {
            return Err(infeasible(slo as f64, shi as f64));
        }
        if target == slo {
            out.copy_from_slice(lo);
            return Ok(());
        }
        if target == shi {
            out.copy_from_slice(hi);
            return Ok(());
        }
        if out.len() == 1 {
            out[0] = target;
            return Ok(());
        }
        with_pool(|pool| {
            match self.g.obj {
                ObjectiveSpec::Linear { p } => {
                    linear::greedy_by_key(|j| p[start + j], lo, hi, target, out, &mut pool.idx);
                }
                ObjectiveSpec::Quadratic { w, t } => {
                    let k = lo.len();
                    quadratic::solve_int(
                        self.g,
                        &w[start..start + k],
                        &t[start..start + k],
                        start,
                        lo,
                        hi,
                        target,
                        out,
                        &mut pool.f1,
                        &mut pool.f2,
                    );
                }
                _ => convex::solve_int(self.g, start, lo, hi, target, out, &mut pool.i1),
            }
        });
        Ok(())
    }
}

/// Engine in floating point.
pub(crate) struct RealEngine<'a> {
    pub obj: &'a ObjectiveSpec,
    pub c: &'a [f64],
    pub d: &'a [f64],
}

impl Engine for RealEngine<'_> {
    type T = f64;

    fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    fn d(&self, i: usize) -> f64 {
        self.d[i]
    }

    fn solve_box(&self, start: usize, lo: &[f64], hi: &[f64], target: f64, out: &mut [f64]) -> Result<()> {
        let (slo, shi) = (sum(lo), sum(hi));
        let tol = 1e-9 * target.abs().max(slo.abs()).max(shi.abs()).max(1.0);
        if target < slo - tol || target > shi + tol {
            return Err(infeasible(slo, shi));
        }
        if target <= slo {
            out.copy_from_slice(lo);
            return Ok(());
        }
        if target >= shi {
            out.copy_from_slice(hi);
            return Ok(());
        }
        if out.len() == 1 {
            out[0] = target;
            return Ok(());
        }
        with_pool(|pool| {
            let k = lo.len();
            match self.obj {
                ObjectiveSpec::Linear { p } => {
                    linear::greedy_by_key(|j| p[start + j], lo, hi, target, out, &mut pool.idx);
                }
                ObjectiveSpec::Quadratic { w, t } => {
                    quadratic::solve_real(&w[start..start + k], &t[start..start + k], lo, hi, target, out, &mut pool.f1)
                }
                obj => convex::solve_real(Scaled::new(obj, 1.0), start, lo, hi, target, out, &mut pool.f1),
            }
        });
        Ok(())
    }
}

/// One RAP subproblem over the consecutive variables `start..start + c.len()`.
///
/// `c`, `d` are the original boxes; `cbar`, `dbar` the effective bounds,
/// which may be infinite. Outside `[c, d]` the objective is extended by an
/// exact linear penalty.
#[derive(Debug, Clone, Copy)]
pub struct RapSubproblem<'a> {
    pub objective: &'a ObjectiveSpec,
    pub start: usize,
    pub c: &'a [f64],
    pub d: &'a [f64],
    pub cbar: &'a [f64],
    pub dbar: &'a [f64],
    pub budget: f64,
}

impl<'a> RapSubproblem<'a> {
    /// A plain RAP where the effective bounds coincide with the boxes.
    pub fn boxed(objective: &'a ObjectiveSpec, c: &'a [f64], d: &'a [f64], budget: f64) -> Self {
        Self { objective, start: 0, c, d, cbar: c, dbar: d, budget }
    }

    fn len(&self) -> usize {
        self.c.len()
    }

    fn check(&self) -> Result<()> {
        let k = self.len();
        if self.d.len() != k || self.cbar.len() != k || self.dbar.len() != k {
            return Err(Error::Malformed("subproblem arrays differ in length".into()));
        }
        for j in 0..k {
            if self.cbar[j] > self.dbar[j] {
                return Err(Error::BoundOrderViolation {
                    which: "cbar/dbar",
                    index: j,
                    lower: self.cbar[j],
                    upper: self.dbar[j],
                });
            }
        }
        let (lo, hi) = (sum(self.cbar), sum(self.dbar));
        if self.budget < lo || self.budget > hi {
            return Err(infeasible(lo, hi));
        }
        Ok(())
    }

    /// The clipped box [max(c, cbar), min(d, dbar)].
    pub fn hard_box(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.len())
            .map(|j| (clamp(self.c[j], self.cbar[j], self.dbar[j]), clamp(self.d[j], self.cbar[j], self.dbar[j])))
            .unzip()
    }
}

/// Outcome of the penalty shortcut.
#[derive(Debug, Clone, PartialEq)]
pub enum Shortcut {
    /// The budget lies outside the clipped box; this allocation is optimal.
    Clamped(Vec<f64>),
    /// Solve the true objective on this hard box instead.
    PassThrough { lo: Vec<f64>, hi: Vec<f64> },
}

/// Settles a subproblem whose budget cannot be met inside the original boxes.
///
/// Below the clipped lower sum the shortfall is shared in proportion to each
/// variable's room down to `cbar` (evenly when `cbar` is unbounded); above the
/// clipped upper sum it mirrors that. Otherwise passes the clipped box through.
pub fn clamp_shortcut(sub: &RapSubproblem<'_>) -> Shortcut {
    let (lo, hi) = sub.hard_box();
    let (slo, shi) = (sum(&lo), sum(&hi));
    if sub.budget < slo {
        let mut x = lo;
        f64::spread_down(&mut x, sub.cbar, slo - sub.budget);
        Shortcut::Clamped(x)
    } else if sub.budget > shi {
        let mut x = hi;
        f64::spread_up(&mut x, sub.dbar, sub.budget - shi);
        Shortcut::Clamped(x)
    } else {
        Shortcut::PassThrough { lo, hi }
    }
}

fn to_int(v: &[f64]) -> Result<Vec<i64>> {
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x.fract() != 0.0 || x.abs() > 2f64.powi(62) {
                Err(Error::NotIntegral { index: i, value: x })
            } else {
                Ok(x as i64)
            }
        })
        .collect()
}

fn finish(sub: &RapSubproblem<'_>, x: Vec<f64>, mode: Mode, shortcut: bool) -> Allocation {
    let objective_value = x.iter().enumerate().map(|(j, &v)| sub.objective.value(sub.start + j, v)).sum();
    Allocation {
        x,
        objective_value,
        mode,
        stats: SolveStats { rap_solves: 1, shortcut_hits: u64::from(shortcut), adjust_repairs: 0 },
    }
}

/// Solve on the clipped box with the given engine family, without the shortcut.
fn solve_hard(sub: &RapSubproblem<'_>, mode: Mode, family: Option<Family>) -> Result<Allocation> {
    sub.check()?;
    if let Some(f) = family {
        if sub.objective.family() != f {
            return Err(Error::Unsupported(format!("{f} solver called on a {} objective", sub.objective.family())));
        }
    }
    let (lo, hi) = sub.hard_box();
    let (slo, shi) = (sum(&lo), sum(&hi));
    if sub.budget < slo || sub.budget > shi {
        return Err(infeasible(slo, shi));
    }
    let k = sub.len();
    let x = match mode {
        Mode::Integer => {
            let (lo, hi) = (to_int(&lo)?, to_int(&hi)?);
            let target = to_int(&[sub.budget])?[0];
            let engine = IntEngine { g: Scaled::new(sub.objective, 1.0), c: vec![0; 0], d: vec![0; 0] };
            if matches!(sub.objective, ObjectiveSpec::Custom(_)) {
                convex::check_convex_samples(&engine.g, sub.start, &lo, &hi)?;
            }
            let mut out = vec![0i64; k];
            solve_box_shifted(&engine, sub.start, &lo, &hi, target, &mut out)?;
            out.into_iter().map(|v| v as f64).collect()
        }
        Mode::Continuous => {
            let engine = RealEngine { obj: sub.objective, c: &[], d: &[] };
            let mut out = vec![0.0; k];
            solve_box_shifted(&engine, sub.start, &lo, &hi, sub.budget, &mut out)?;
            out
        }
    };
    Ok(finish(sub, x, mode, false))
}

fn solve_box_shifted<E: Engine>(e: &E, start: usize, lo: &[E::T], hi: &[E::T], t: E::T, out: &mut [E::T]) -> Result<()> {
    e.solve_box(start, lo, hi, t, out)
}

/// Linear RAP by weighted-median selection; ties go to the lowest index.
pub fn solve_rap_linear(sub: &RapSubproblem<'_>, mode: Mode) -> Result<Allocation> {
    solve_hard(sub, mode, Some(Family::Linear))
}

/// Quadratic RAP by breakpoint search, with greedy rounding in integer mode.
pub fn solve_rap_quadratic(sub: &RapSubproblem<'_>, mode: Mode) -> Result<Allocation> {
    solve_hard(sub, mode, Some(Family::Quadratic))
}

/// Any convex family by bisection on the sum multiplier.
pub fn solve_rap_convex(sub: &RapSubproblem<'_>, mode: Mode) -> Result<Allocation> {
    sub.check()?;
    let (lo, hi) = sub.hard_box();
    let k = sub.len();
    let x = match mode {
        Mode::Integer => {
            let (lo, hi) = (to_int(&lo)?, to_int(&hi)?);
            let target = to_int(&[sub.budget])?[0];
            let g = Scaled::new(sub.objective, 1.0);
            convex::check_convex_samples(&g, sub.start, &lo, &hi)?;
            if target < sum(&lo) || target > sum(&hi) {
                return Err(infeasible(sum(&lo) as f64, sum(&hi) as f64));
            }
            let mut out = vec![0i64; k];
            convex::solve_int(g, sub.start, &lo, &hi, target, &mut out, &mut Vec::new());
            out.into_iter().map(|v| v as f64).collect()
        }
        Mode::Continuous => {
            if sub.budget < sum(&lo) || sub.budget > sum(&hi) {
                return Err(infeasible(sum(&lo), sum(&hi)));
            }
            let mut out = vec![0.0; k];
            match sub.objective {
                ObjectiveSpec::Linear { .. } => {
                    return Err(Error::Unsupported("bisection needs a strictly convex objective".into()))
                }
                obj => convex::solve_real(Scaled::new(obj, 1.0), sub.start, &lo, &hi, sub.budget, &mut out, &mut Vec::new()),
            }
            out
        }
    };
    Ok(finish(sub, x, mode, false))
}

/// Penalized RAP: shortcut first, then the engine matching the family.
pub fn solve_rap(sub: &RapSubproblem<'_>, mode: Mode) -> Result<Allocation> {
    match clamp_shortcut(sub) {
        Shortcut::Clamped(x) => {
            if mode == Mode::Integer {
                // Integer shortcut shares units lowest index first.
                let (lo, hi) = sub.hard_box();
                let (lo, hi) = (to_int(&lo)?, to_int(&hi)?);
                let target = to_int(&[sub.budget])?[0];
                let floor: Vec<i64> = sub.cbar.iter().map(|&v| if v.is_infinite() { i64::NEG_INF } else { v as i64 }).collect();
                let ceil: Vec<i64> = sub.dbar.iter().map(|&v| if v.is_infinite() { i64::POS_INF } else { v as i64 }).collect();
                let mut out;
                if target < sum(&lo) {
                    out = lo.clone();
                    i64::spread_down(&mut out, &floor, sum(&lo) - target);
                } else {
                    out = hi.clone();
                    i64::spread_up(&mut out, &ceil, target - sum(&hi));
                }
                Ok(finish(sub, out.into_iter().map(|v| v as f64).collect(), mode, true))
            } else {
                Ok(finish(sub, x, mode, true))
            }
        }
        Shortcut::PassThrough { .. } => solve_hard(sub, mode, None),
    }
}
