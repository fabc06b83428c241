//! Brute-force ground truth for tests: an exact DP over integer prefix sums and
//! a sampled variational-inequality check for projections.
//!
//! Nothing here shares code with the solver beyond the instance type and the
//! objective evaluator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{check_feasibility, Allocation, Mode, NestedInstance, ObjectiveSpec, SolveStats};

/// Upper bound on (state, choice) pairs the DP will visit.
pub const DP_WORK_LIMIT: u64 = 50_000_000;

/// Cost accumulator: exact for linear objectives with integer prices.
trait Cost: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn better(self, than: Self) -> bool;
}

impl Cost for i128 {
    fn zero() -> Self {
        0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn better(self, than: Self) -> bool {
        self < than
    }
}

impl Cost for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn better(self, than: Self) -> bool {
        self < than - 1e-9 * than.abs().max(1.0)
    }
}

/// One DP layer: best cost and last step for each prefix sum in lo..=hi.
#[derive(Debug, Clone)]
struct Layer<C> {
    lo: i64,
    best: Vec<Option<C>>,
    step: Vec<i64>,
}

/// Dense DP table over absolute prefix sums, one layer per variable boundary.
#[derive(Debug, Clone)]
pub struct DpTable {
    layers: Vec<Layer<f64>>,
}

impl DpTable {
    /// Reachable prefix sums after `i` variables.
    pub fn keys(&self, i: usize) -> Vec<i64> {
        let l = &self.layers[i];
        (0..l.best.len()).filter(|&k| l.best[k].is_some()).map(|k| l.lo + k as i64).collect()
    }

    /// Best cost of reaching prefix sum `s` after `i` variables.
    pub fn cost(&self, i: usize, s: i64) -> Option<f64> {
        let l = &self.layers[i];
        let k = s - l.lo;
        if k < 0 || k as usize >= l.best.len() {
            return None;
        }
        l.best[k as usize]
    }
}

fn integer_prices(obj: &ObjectiveSpec) -> Option<Vec<i128>> {
    match obj {
        ObjectiveSpec::Linear { p } if p.iter().all(|v| v.fract() == 0.0 && v.abs() < 1e15) => {
            Some(p.iter().map(|&v| v as i128).collect())
        }
        _ => None,
    }
}

fn run_dp<C: Cost>(inst: &NestedInstance, cost: impl Fn(usize, i64) -> Result<C>) -> Result<(Vec<i64>, Vec<Layer<C>>)> {
    let n = inst.n();
    let c: Vec<i64> = inst.c.iter().map(|&v| v as i64).collect();
    let d: Vec<i64> = inst.d.iter().map(|&v| v as i64).collect();
    // Constraint bounds keyed by prefix length; the empty prefix is pinned at 0.
    let mut lower = vec![i64::MIN; n + 1];
    let mut upper = vec![i64::MAX; n + 1];
    lower[0] = 0;
    upper[0] = 0;
    for j in 0..inst.m() {
        let k = inst.sigma[j];
        lower[k] = lower[k].max(inst.a[j] as i64);
        upper[k] = upper[k].min(inst.b[j] as i64);
    }

    let mut work: u64 = 0;
    let mut layers: Vec<Layer<C>> = vec![Layer { lo: 0, best: vec![Some(C::zero())], step: vec![0] }];
    for i in 0..n {
        let prev = &layers[i];
        let prev_hi = prev.lo + prev.best.len() as i64 - 1;
        let lo = (prev.lo + c[i]).max(lower[i + 1]);
        let hi = (prev_hi + d[i]).min(upper[i + 1]);
        if lo > hi {
            return Err(Error::Infeasible { from: 0, to: constraint_at(inst, i + 1) });
        }
        let width = (hi - lo + 1) as u64;
        work = work.saturating_add((prev.best.len() as u64).saturating_mul((d[i] - c[i] + 1) as u64));
        if work > DP_WORK_LIMIT || width > DP_WORK_LIMIT {
            return Err(Error::SizeLimitExceeded(format!("dp would visit more than {DP_WORK_LIMIT} states")));
        }
        let unit: Vec<C> = (c[i]..=d[i]).map(|x| cost(i, x)).collect::<Result<_>>()?;
        let mut best: Vec<Option<C>> = vec![None; width as usize];
        let mut step = vec![0i64; width as usize];
        for (k, from) in prev.best.iter().enumerate() {
            let Some(from) = *from else { continue };
            let s0 = prev.lo + k as i64;
            for x in c[i]..=d[i] {
                let s = s0 + x;
                if s < lo || s > hi {
                    continue;
                }
                let t = (s - lo) as usize;
                let cand = from.add(unit[(x - c[i]) as usize]);
                if best[t].is_none_or(|b| cand.better(b)) {
                    best[t] = Some(cand);
                    step[t] = x;
                }
            }
        }
        if best.iter().all(Option::is_none) {
            return Err(Error::Infeasible { from: 0, to: constraint_at(inst, i + 1) });
        }
        layers.push(Layer { lo, best, step });
    }

    let last = &layers[n];
    let target = inst.total() as i64;
    let k = target - last.lo;
    if k < 0 || k as usize >= last.best.len() || last.best[k as usize].is_none() {
        return Err(Error::Infeasible { from: 0, to: inst.m() });
    }
    let mut x = vec![0i64; n];
    let mut s = target;
    for i in (0..n).rev() {
        let l = &layers[i + 1];
        let xi = l.step[(s - l.lo) as usize];
        x[i] = xi;
        s -= xi;
    }
    Ok((x, layers))
}

/// 1-based index of the first constraint at or after prefix length `k`.
fn constraint_at(inst: &NestedInstance, k: usize) -> usize {
    inst.sigma.iter().position(|&s| s >= k).map_or(inst.m(), |j| j + 1)
}

fn check_integral(inst: &NestedInstance) -> Result<()> {
    inst.check_structure(Mode::Integer)
}

/// Exact integer optimum together with the DP table it came from.
pub fn dp_table(inst: &NestedInstance) -> Result<(Allocation, DpTable)> {
    check_integral(inst)?;
    let obj = &inst.objective;
    let (x, layers) = run_dp(inst, |i, x| obj.checked_value(i, x as f64))?;
    let x: Vec<f64> = x.into_iter().map(|v| v as f64).collect();
    let objective_value = layers[inst.n()].best[(inst.total() as i64 - layers[inst.n()].lo) as usize].unwrap_or(f64::NAN);
    let alloc = Allocation { x, objective_value, mode: Mode::Integer, stats: SolveStats::default() };
    Ok((alloc, DpTable { layers }))
}

/// Exact integer optimum by forward DP over prefix sums.
///
/// Linear objectives with integer prices accumulate in i128, so ties and
/// optima are decided exactly; the reported value is then the exact sum.
pub fn dp_solve(inst: &NestedInstance) -> Result<Allocation> {
    check_integral(inst)?;
    if let Some(p) = integer_prices(&inst.objective) {
        let (x, layers) = run_dp(inst, |i, x| Ok(p[i] * x as i128))?;
        let total = layers[inst.n()].best[(inst.total() as i64 - layers[inst.n()].lo) as usize].unwrap_or(0);
        let x: Vec<f64> = x.into_iter().map(|v| v as f64).collect();
        return Ok(Allocation { x, objective_value: total as f64, mode: Mode::Integer, stats: SolveStats::default() });
    }
    dp_table(inst).map(|(a, _)| a)
}

/// Exact cost of an integer point under a linear objective with integer prices.
pub fn exact_linear_cost(obj: &ObjectiveSpec, x: &[f64]) -> Option<i128> {
    let p = integer_prices(obj)?;
    Some(p.iter().zip(x).map(|(&p, &x)| p * x as i128).sum())
}

/// Full enumeration of the integer box, for cross-checking the DP on tiny instances.
pub fn enumerate_solve(inst: &NestedInstance) -> Result<Allocation> {
    check_integral(inst)?;
    let n = inst.n();
    let states: f64 = inst.c.iter().zip(&inst.d).map(|(c, d)| d - c + 1.0).product();
    if states > 1e7 {
        return Err(Error::SizeLimitExceeded(format!("{states} grid points")));
    }
    let mut x: Vec<f64> = inst.c.clone();
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        if check_feasibility(inst, &x, 0.0).all_zero() {
            let v: f64 = (0..n).map(|i| inst.objective.value(i, x[i])).sum();
            if best.as_ref().is_none_or(|(b, _)| v < b - 1e-9 * b.abs().max(1.0)) {
                best = Some((v, x.clone()));
            }
        }
        // Odometer increment.
        let mut i = 0;
        while i < n && x[i] >= inst.d[i] {
            x[i] = inst.c[i];
            i += 1;
        }
        if i == n {
            break;
        }
        x[i] += 1.0;
    }
    match best {
        Some((v, x)) => Ok(Allocation { x, objective_value: v, mode: Mode::Integer, stats: SolveStats::default() }),
        None => Err(Error::Infeasible { from: 0, to: inst.m() }),
    }
}

/// Outcome of a sampled projection check.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionVerdict {
    Pass,
    /// `witness` is a feasible point with <point - candidate, witness - candidate> = `inner` > tol.
    Fail { witness: Vec<f64>, inner: f64 },
    CandidateInfeasible { worst_residual: f64 },
}

impl ProjectionVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ProjectionVerdict::Pass)
    }
}

/// Prefix-sum intervals from which the remaining variables can still finish feasibly.
///
/// Entry i bounds the sum of the first i variables.
pub fn completion_intervals(set: &NestedInstance) -> Vec<(f64, f64)> {
    let n = set.n();
    let mut lower = vec![f64::NEG_INFINITY; n + 1];
    let mut upper = vec![f64::INFINITY; n + 1];
    lower[0] = 0.0;
    upper[0] = 0.0;
    for j in 0..set.m() {
        let k = set.sigma[j];
        lower[k] = lower[k].max(set.a[j]);
        upper[k] = upper[k].min(set.b[j]);
    }
    let mut out = vec![(0.0, 0.0); n + 1];
    out[n] = (set.total(), set.total());
    for i in (0..n).rev() {
        let (lo, hi) = out[i + 1];
        out[i] = ((lo - set.d[i]).max(lower[i]), (hi - set.c[i]).min(upper[i]));
    }
    out
}

/// Draws a feasible point coordinate by coordinate.
///
/// Each coordinate lands on the low end, the high end, or uniformly inside
/// the range that keeps completion possible, so vertices and interior points
/// both show up.
pub fn sample_feasible<R: Rng>(set: &NestedInstance, reach: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
    let n = set.n();
    let mut z = vec![0.0; n];
    let mut s = 0.0;
    for i in 0..n {
        if i + 1 == n {
            z[i] = set.total() - s;
            break;
        }
        let lo = set.c[i].max(reach[i + 1].0 - s);
        let hi = set.d[i].min(reach[i + 1].1 - s);
        let (lo, hi) = if lo <= hi { (lo, hi) } else { let m = 0.5 * (lo + hi); (m, m) };
        z[i] = match rng.random_range(0..3) {
            0 => lo,
            1 => hi,
            _ => lo + (hi - lo) * rng.random::<f64>(),
        };
        s += z[i];
    }
    z
}

/// Samples feasible z and tests <point - candidate, z - candidate> <= tol.
///
/// A projection of `point` onto the set satisfies this for every feasible z.
pub fn projection_check(set: &NestedInstance, point: &[f64], candidate: &[f64], samples: usize, tol: f64, seed: u64) -> ProjectionVerdict {
    let rep = check_feasibility(set, candidate, 1e-9);
    if !rep.all_zero() {
        return ProjectionVerdict::CandidateInfeasible { worst_residual: rep.worst() };
    }
    let reach = completion_intervals(set);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<f64> = point.iter().zip(candidate).map(|(p, c)| p - c).collect();
    for _ in 0..samples {
        let z = sample_feasible(set, &reach, &mut rng);
        let inner: f64 = dir.iter().zip(z.iter().zip(candidate)).map(|(g, (z, c))| g * (z - c)).sum();
        if inner > tol {
            return ProjectionVerdict::Fail { witness: z, inner };
        }
    }
    ProjectionVerdict::Pass
}
