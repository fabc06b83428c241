//! Working-set training of the ordinal regression dual.
//!
//! The dual is solved in minimization form over y-space: each class pair
//! (k, k+1) owns one block holding α of class k followed by -α* of class
//! k+1. Threshold ordering becomes "every prefix of blocks sums to >= 0, the
//! whole sum is 0", which is a nested allocation constraint set. Each projected
//! gradient step is a squared-distance projection onto that set with the
//! non-working variables frozen.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::data::OrdinalDataset;
use super::kernel::{gaussian, KernelMatrix};
use crate::error::{Error, Result};
use crate::mda::solve_continuous;
use crate::model::{NestedInstance, ObjectiveSpec};
use crate::oracle::{projection_check, ProjectionVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvorexConfig {
    /// Box bound on every dual variable.
    pub c: f64,
    /// Gaussian kernel width.
    pub width: f64,
    /// Gradient step, capped at 1/L for the working block's curvature L.
    pub gamma: f64,
    /// Projected gradient steps per working set.
    pub n_grad: usize,
    /// Maximum number of samples in a working set, at least 2.
    pub n_ws: usize,
    /// A pair counts as violating when moving mass between them improves the dual at rate > kkt_tol.
    pub kkt_tol: f64,
    /// Cap on working-set selections.
    pub max_selections: usize,
    /// Samples for the variational-inequality check of each projection; 0 disables it.
    pub check_samples: usize,
    pub seed: u64,
}

impl Default for SvorexConfig {
    fn default() -> Self {
        Self { c: 10.0, width: 1.0, gamma: 0.2, n_grad: 20, n_ws: 6, kkt_tol: 1e-3, max_selections: 200_000, check_samples: 0, seed: 0 }
    }
}

impl SvorexConfig {
    fn check(&self) -> Result<()> {
        let ok = self.c > 0.0
            && self.c.is_finite()
            && self.width >= 0.0
            && self.gamma > 0.0
            && self.n_grad >= 1
            && self.n_ws >= 2
            && self.kkt_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed(format!("invalid training configuration {self:?}")))
        }
    }
}

/// Dual variables per sample plus the recovered thresholds.
///
/// A sample of class j holds α for hyperplane j and α* for hyperplane j - 1.
/// α of the top class and α* of the bottom class stay 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvorexModel {
    pub classes: usize,
    pub alpha: Vec<f64>,
    pub alpha_star: Vec<f64>,
    /// Nondecreasing, one per adjacent class pair.
    pub thresholds: Vec<f64>,
    pub config: SvorexConfig,
    /// Working-set selections performed.
    pub selections: usize,
}

impl SvorexModel {
    pub fn zero(ds: &OrdinalDataset, config: SvorexConfig) -> Self {
        let r = ds.classes();
        Self {
            classes: r,
            alpha: vec![0.0; ds.len()],
            alpha_star: vec![0.0; ds.len()],
            thresholds: vec![0.0; r.saturating_sub(1)],
            config,
            selections: 0,
        }
    }

    /// Expansion weights of the latent score, α* - α per sample.
    pub fn weights(&self) -> Vec<f64> {
        self.alpha_star.iter().zip(&self.alpha).map(|(s, a)| s - a).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(format!("model encoding: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model: {e}")))
    }
}

/// Samples chosen for one round of projected gradient steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkingSet {
    pub samples: Vec<usize>,
}

impl WorkingSet {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One dual variable in y-space.
#[derive(Debug, Clone, Copy)]
struct Var {
    sample: usize,
    star: bool,
}

/// Most violating (decrease, increase) pair in y-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolatingPair {
    pub down_sample: usize,
    pub up_sample: usize,
    pub violation: f64,
}

/// Data, kernel and y-space layout shared by all training operations.
pub struct SvorexProblem<'a> {
    ds: &'a OrdinalDataset,
    kernel: KernelMatrix,
    c: f64,
    vars: Vec<Var>,
    /// Variable index range of each block.
    blocks: Vec<(usize, usize)>,
    /// Variable indices of each sample.
    of_sample: Vec<Vec<usize>>,
}

fn bound_tol(c: f64) -> f64 {
    1e-12 * c.max(1.0)
}

impl<'a> SvorexProblem<'a> {
    pub fn new(ds: &'a OrdinalDataset, config: &SvorexConfig) -> Self {
        let r = ds.classes();
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); r];
        for (i, &l) in ds.labels.iter().enumerate() {
            by_class[l - 1].push(i);
        }
        let mut vars = Vec::new();
        let mut blocks = Vec::new();
        let mut of_sample = vec![Vec::new(); ds.len()];
        for k in 0..r.saturating_sub(1) {
            let start = vars.len();
            for &s in &by_class[k] {
                of_sample[s].push(vars.len());
                vars.push(Var { sample: s, star: false });
            }
            for &s in &by_class[k + 1] {
                of_sample[s].push(vars.len());
                vars.push(Var { sample: s, star: true });
            }
            blocks.push((start, vars.len()));
        }
        Self { ds, kernel: KernelMatrix::new(ds, config.width), c: config.c, vars, blocks, of_sample }
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    /// Kernel expansion f_s = Σ_t (α*_t - α_t) K(s, t) at every sample.
    pub fn scores(&self, model: &SvorexModel) -> Vec<f64> {
        let beta = model.weights();
        (0..self.ds.len()).map(|s| self.kernel.row(s).iter().zip(&beta).map(|(k, b)| k * b).sum()).collect()
    }

    /// Dual objective (maximization form): Σ(α + α*) - ½ βᵀKβ.
    pub fn objective(&self, model: &SvorexModel) -> f64 {
        objective_with(model, &self.scores(model))
    }

    /// Partials of the dual objective with respect to α and α*.
    ///
    /// Pinned variables get their formal partial too; callers ignore them.
    pub fn gradient(&self, model: &SvorexModel) -> (Vec<f64>, Vec<f64>) {
        let f = self.scores(model);
        (f.iter().map(|v| 1.0 + v).collect(), f.iter().map(|v| 1.0 - v).collect())
    }

    fn y(&self, m: &SvorexModel, v: usize) -> f64 {
        let var = self.vars[v];
        if var.star {
            -m.alpha_star[var.sample]
        } else {
            m.alpha[var.sample]
        }
    }

    fn set_y(&self, m: &mut SvorexModel, v: usize, y: f64) {
        let var = self.vars[v];
        if var.star {
            m.alpha_star[var.sample] = -y;
        } else {
            m.alpha[var.sample] = y;
        }
    }

    /// Gradient of the minimization objective in y-space.
    fn g(&self, f: &[f64], v: usize) -> f64 {
        let var = self.vars[v];
        if var.star {
            1.0 - f[var.sample]
        } else {
            -1.0 - f[var.sample]
        }
    }

    fn bounds(&self, v: usize) -> (f64, f64) {
        if self.vars[v].star {
            (-self.c, 0.0)
        } else {
            (0.0, self.c)
        }
    }

    /// Prefix sums of y after each block.
    fn prefix(&self, m: &SvorexModel) -> Vec<f64> {
        let mut acc = 0.0;
        self.blocks
            .iter()
            .map(|&(lo, hi)| {
                acc += (lo..hi).map(|v| self.y(m, v)).sum::<f64>();
                acc
            })
            .collect()
    }

    /// Largest violation of the box, prefix and total-sum constraints.
    pub fn feasibility_residual(&self, m: &SvorexModel) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, &l) in self.ds.labels.iter().enumerate() {
            let (a, a_s) = (m.alpha[s], m.alpha_star[s]);
            worst = worst.max(-a).max(a - self.c).max(-a_s).max(a_s - self.c);
            if l == m.classes {
                worst = worst.max(a.abs());
            }
            if l == 1 {
                worst = worst.max(a_s.abs());
            }
        }
        let p = self.prefix(m);
        for (j, &v) in p.iter().enumerate() {
            worst = worst.max(if j + 1 == p.len() { v.abs() } else { -v });
        }
        worst
    }

    /// Pair scan for the largest first-order improvement.
    ///
    /// Moving mass from s (decrease) to t (increase) lowers the objective at
    /// rate g_s - g_t. It is feasible when t sits in an earlier or the same
    /// block (prefix sums only grow) or when no tight prefix constraint lies
    /// between the two blocks.
    fn scan(&self, m: &SvorexModel, f: &[f64], excluded: &[bool]) -> Option<(usize, usize, f64)> {
        let tol = bound_tol(self.c);
        let prefix = self.prefix(m);
        let nb = self.blocks.len();
        let up = |v: usize| !excluded[self.vars[v].sample] && self.y(m, v) < self.bounds(v).1 - tol;
        let down = |v: usize| !excluded[self.vars[v].sample] && self.y(m, v) > self.bounds(v).0 + tol;
        let mut best: Option<(usize, usize, f64)> = None;
        let mut offer = |s: usize, t: usize, viol: f64| {
            if best.is_none_or(|b| viol > b.2) {
                best = Some((s, t, viol));
            }
        };

        let mut run_min = (f64::INFINITY, usize::MAX);
        for &(lo, hi) in &self.blocks {
            for v in lo..hi {
                if up(v) && self.g(f, v) < run_min.0 {
                    run_min = (self.g(f, v), v);
                }
            }
            if run_min.1 == usize::MAX {
                continue;
            }
            for v in lo..hi {
                if down(v) {
                    offer(v, run_min.1, self.g(f, v) - run_min.0);
                }
            }
        }

        let mut seg_start = 0;
        for b in 0..nb {
            if b + 1 < nb && prefix[b] > tol {
                continue;
            }
            let (lo, hi) = (self.blocks[seg_start].0, self.blocks[b].1);
            let mut min_up = (f64::INFINITY, usize::MAX);
            let mut max_down = (f64::NEG_INFINITY, usize::MAX);
            for v in lo..hi {
                let g = self.g(f, v);
                if up(v) && g < min_up.0 {
                    min_up = (g, v);
                }
                if down(v) && g > max_down.0 {
                    max_down = (g, v);
                }
            }
            if min_up.1 != usize::MAX && max_down.1 != usize::MAX {
                offer(max_down.1, min_up.1, max_down.0 - min_up.0);
            }
            seg_start = b + 1;
        }
        best
    }

    /// Most violating pair over all samples, if any pair improves at all.
    pub fn most_violating_pair(&self, m: &SvorexModel) -> Option<ViolatingPair> {
        let f = self.scores(m);
        self.scan(m, &f, &vec![false; self.ds.len()])
            .map(|(s, t, v)| ViolatingPair { down_sample: self.vars[s].sample, up_sample: self.vars[t].sample, violation: v })
    }

    /// Largest pair violation; 0 when no pair can improve.
    pub fn max_violation(&self, m: &SvorexModel) -> f64 {
        self.most_violating_pair(m).map_or(0.0, |p| p.violation.max(0.0))
    }

    fn select(&self, m: &SvorexModel, f: &[f64], n_ws: usize, tol: f64) -> WorkingSet {
        let mut excluded = vec![false; self.ds.len()];
        let mut ws = WorkingSet::default();
        while ws.samples.len() < n_ws {
            let Some((s, t, viol)) = self.scan(m, f, &excluded) else { break };
            if viol <= tol {
                break;
            }
            let (a, b) = (self.vars[s].sample, self.vars[t].sample);
            let add = if a == b { 1 } else { 2 };
            if !ws.samples.is_empty() && ws.samples.len() + add > n_ws {
                break;
            }
            for x in [a, b] {
                if !excluded[x] {
                    excluded[x] = true;
                    ws.samples.push(x);
                }
            }
        }
        ws
    }

    /// Repeated most-violating-pair extraction; empty when converged.
    pub fn select_working_set(&self, m: &SvorexModel, n_ws: usize) -> WorkingSet {
        let f = self.scores(m);
        self.select(m, &f, n_ws, m.config.kkt_tol)
    }

    fn working_vars(&self, ws: &WorkingSet) -> Vec<usize> {
        let mut v: Vec<usize> = ws.samples.iter().flat_map(|&s| self.of_sample[s].iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Feasible set of the working variables with everything else frozen.
    fn subproblem(&self, m: &SvorexModel, vars: &[usize]) -> NestedInstance {
        let nb = self.blocks.len();
        let mut frozen = vec![0.0; nb];
        let mut working = vec![false; self.vars.len()];
        for &v in vars {
            working[v] = true;
        }
        for (b, &(lo, hi)) in self.blocks.iter().enumerate() {
            frozen[b] = (lo..hi).filter(|&v| !working[v]).map(|v| self.y(m, v)).sum();
        }
        let (c, d): (Vec<f64>, Vec<f64>) = vars.iter().map(|&v| self.bounds(v)).unzip();
        let total = -frozen.iter().sum::<f64>();

        let mut sigma = Vec::new();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut count = 0;
        let mut frozen_prefix = 0.0;
        let mut room = 0.0;
        let mut k = 0;
        for blk in 0..nb {
            while k < vars.len() && vars[k] < self.blocks[blk].1 {
                room += d[k];
                k += 1;
                count += 1;
            }
            frozen_prefix += frozen[blk];
            let last = blk + 1 == nb;
            let lower = if last { total } else { -frozen_prefix };
            if count == 0 {
                continue;
            }
            // Blocks without working variables share the previous prefix; keep the strongest bound.
            if sigma.last() == Some(&count) {
                let j = sigma.len() - 1;
                a[j] = f64::max(a[j], lower);
                if last {
                    a[j] = total;
                    b[j] = total;
                }
            } else {
                sigma.push(count);
                a.push(lower);
                b.push(if last { total } else { room.max(lower) });
            }
        }
        let w = vec![1.0; vars.len()];
        NestedInstance::new(sigma, a, b, c, d, ObjectiveSpec::Quadratic { w, t: vec![0.0; vars.len()] })
    }

    /// Euclidean projection of targets for the working variables, y-space.
    fn project_y(&self, m: &SvorexModel, vars: &[usize], target: &[f64], check: Option<(usize, u64)>) -> Result<(Vec<f64>, Option<ProjectionVerdict>)> {
        let mut inst = self.subproblem(m, vars);
        inst.objective = ObjectiveSpec::Quadratic { w: vec![1.0; vars.len()], t: target.to_vec() };
        let y = solve_continuous(&inst, 1e-9)?.x;
        let verdict = check.map(|(samples, seed)| projection_check(&inst, target, &y, samples, 1e-8, seed));
        Ok((y, verdict))
    }

    /// Projects (α̂, α̂*) restricted to the working set onto the feasible set
    /// with all other variables fixed at their values in `model`.
    pub fn project_working_set(&self, model: &SvorexModel, ws: &WorkingSet, alpha_hat: &[f64], alpha_star_hat: &[f64]) -> Result<SvorexModel> {
        let vars = self.working_vars(ws);
        let target: Vec<f64> = vars
            .iter()
            .map(|&v| {
                let var = self.vars[v];
                if var.star {
                    -alpha_star_hat[var.sample]
                } else {
                    alpha_hat[var.sample]
                }
            })
            .collect();
        let (y, _) = self.project_y(model, &vars, &target, None)?;
        let mut out = model.clone();
        for (k, &v) in vars.iter().enumerate() {
            self.set_y(&mut out, v, y[k]);
        }
        Ok(out)
    }

    /// Thresholds from the stationarity conditions.
    ///
    /// Each block's multiplier ψ is bracketed by its variables: ψ <= g at a
    /// lower bound, ψ >= g at an upper bound, ψ = g in between. Blocks joined
    /// by a slack prefix constraint share ψ. Multipliers must be nonincreasing
    /// across blocks, enforced by pooling adjacent violators. Threshold = -ψ.
    pub fn thresholds(&self, m: &SvorexModel) -> Vec<f64> {
        let f = self.scores(m);
        self.thresholds_with(m, &f)
    }

    fn thresholds_with(&self, m: &SvorexModel, f: &[f64]) -> Vec<f64> {
        let tol = bound_tol(self.c);
        let prefix = self.prefix(m);
        let nb = self.blocks.len();
        // (first block, last block, lo, hi)
        let mut groups: Vec<(usize, usize, f64, f64)> = Vec::new();
        for (b, &(lo, hi)) in self.blocks.iter().enumerate() {
            let (mut l, mut h) = (f64::NEG_INFINITY, f64::INFINITY);
            for v in lo..hi {
                let g = self.g(f, v);
                let (vl, vh) = self.bounds(v);
                let y = self.y(m, v);
                if y > vl + tol {
                    l = l.max(g);
                }
                if y < vh - tol {
                    h = h.min(g);
                }
            }
            let joined = b > 0 && prefix[b - 1] > tol;
            match groups.last_mut() {
                Some(last) if joined => {
                    last.1 = b;
                    last.2 = last.2.max(l);
                    last.3 = last.3.min(h);
                }
                _ => groups.push((b, b, l, h)),
            }
        }
        // Value and weight per pooled group.
        let mut pooled: Vec<(f64, f64, usize)> = Vec::new();
        for &(first, last, l, h) in &groups {
            let v = match (l.is_finite(), h.is_finite()) {
                (true, true) => 0.5 * (l + h),
                (true, false) => l,
                (false, true) => h,
                (false, false) => 0.0,
            };
            let w = (last - first + 1) as f64;
            pooled.push((v, w, last - first + 1));
            while pooled.len() > 1 {
                let k = pooled.len();
                if pooled[k - 2].0 >= pooled[k - 1].0 {
                    break;
                }
                let (v2, w2, c2) = pooled.pop().unwrap();
                let (v1, w1, c1) = pooled.pop().unwrap();
                pooled.push(((v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2, c1 + c2));
            }
        }
        let mut out = Vec::with_capacity(nb);
        for (v, _, count) in pooled {
            out.extend(std::iter::repeat_n(-v, count));
        }
        out
    }
}

fn objective_with(m: &SvorexModel, f: &[f64]) -> f64 {
    let lin: f64 = m.alpha.iter().chain(&m.alpha_star).sum();
    let quad: f64 = m.weights().iter().zip(f).map(|(b, f)| b * f).sum();
    lin - 0.5 * quad
}

/// Per-selection record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub selection: usize,
    pub working_set: usize,
    pub objective: f64,
    pub feasibility: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectionStats {
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: SvorexModel,
    pub trace: Vec<TraceEntry>,
    pub projections: ProjectionStats,
    /// Largest pair violation at exit, from a full scan.
    pub final_violation: f64,
    pub seconds: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("stopped after {} working-set selections without converging", .report.model.selections)]
    IterationLimitExceeded { report: Box<TrainReport> },
    #[error(transparent)]
    Solver(#[from] Error),
}

/// Working-set decomposition with projected gradient steps.
pub fn train(ds: &OrdinalDataset, config: &SvorexConfig) -> std::result::Result<TrainReport, TrainError> {
    train_observed(ds, config, |_| {})
}

/// `train`, handing every iterate to `observe` after its selection finishes.
pub fn train_observed(
    ds: &OrdinalDataset,
    config: &SvorexConfig,
    mut observe: impl FnMut(&SvorexModel),
) -> std::result::Result<TrainReport, TrainError> {
    config.check()?;
    let start = Instant::now();
    let problem = SvorexProblem::new(ds, config);
    let mut model = SvorexModel::zero(ds, *config);
    let mut f = vec![0.0; ds.len()];
    let mut trace = Vec::new();
    let mut stats = ProjectionStats::default();

    loop {
        let ws = problem.select(&model, &f, config.n_ws, config.kkt_tol);
        if ws.is_empty() {
            break;
        }
        if model.selections >= config.max_selections {
            model.thresholds = problem.thresholds_with(&model, &f);
            let final_violation = problem.scan(&model, &f, &vec![false; ds.len()]).map_or(0.0, |p| p.2.max(0.0));
            let report = TrainReport { model, trace, projections: stats, final_violation, seconds: start.elapsed().as_secs_f64() };
            return Err(TrainError::IterationLimitExceeded { report: Box::new(report) });
        }
        model.selections += 1;
        let vars = problem.working_vars(&ws);

        // Gershgorin bound on the working block's curvature keeps each step a descent step.
        let k = problem.kernel();
        let curvature = vars
            .iter()
            .map(|&u| vars.iter().map(|&v| k.get(problem.vars[u].sample, problem.vars[v].sample).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let step = config.gamma.min(1.0 / curvature.max(f64::MIN_POSITIVE));

        for it in 0..config.n_grad {
            let target: Vec<f64> = vars.iter().map(|&v| problem.y(&model, v) - step * problem.g(&f, v)).collect();
            let check = (config.check_samples > 0).then(|| (config.check_samples, config.seed ^ ((model.selections as u64) << 8) ^ it as u64));
            let (y, verdict) = problem.project_y(&model, &vars, &target, check)?;
            if let Some(v) = verdict {
                stats.checked += 1;
                if !v.passed() {
                    stats.failed += 1;
                    stats.first_failure.get_or_insert_with(|| format!("selection {} step {it}: {v:?}", model.selections));
                }
            }
            let mut moved = false;
            for (i, &v) in vars.iter().enumerate() {
                let delta = y[i] - problem.y(&model, v);
                if delta == 0.0 {
                    continue;
                }
                moved = true;
                problem.set_y(&mut model, v, y[i]);
                // β = α* - α changes by -Δy for both kinds of variable.
                let s = problem.vars[v].sample;
                for (fi, kv) in f.iter_mut().zip(k.row(s)) {
                    *fi -= delta * kv;
                }
            }
            if !moved {
                break;
            }
        }
        trace.push(TraceEntry {
            selection: model.selections,
            working_set: ws.samples.len(),
            objective: objective_with(&model, &f),
            feasibility: problem.feasibility_residual(&model),
        });
        observe(&model);
    }
    // Refresh the incrementally maintained scores before reading off thresholds.
    let f = problem.scores(&model);
    model.thresholds = problem.thresholds_with(&model, &f);
    let final_violation = problem.scan(&model, &f, &vec![false; ds.len()]).map_or(0.0, |p| p.2.max(0.0));
    Ok(TrainReport { model, trace, projections: stats, final_violation, seconds: start.elapsed().as_secs_f64() })
}

/// Latent score Σ_s (α*_s - α_s) K(x_s, x).
pub fn latent_score(model: &SvorexModel, train: &OrdinalDataset, x: &[f64]) -> f64 {
    model
        .weights()
        .iter()
        .zip(&train.features)
        .filter(|(b, _)| **b != 0.0)
        .map(|(b, xs)| b * gaussian(xs, x, model.config.width))
        .sum()
}

/// Class 1 + number of thresholds strictly below the latent score.
pub fn predict(model: &SvorexModel, train: &OrdinalDataset, x: &[f64]) -> usize {
    let score = latent_score(model, train, x);
    1 + model.thresholds.iter().filter(|&&b| score > b).count()
}

#[cfg(test)]
mod tests {
    use super::super::data::synthetic;
    use super::*;

    fn one_d(n: usize) -> OrdinalDataset {
        let features: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64 * 6.0 - 3.0]).collect();
        let labels = (0..n).map(|i| 1 + i * 3 / n).collect();
        OrdinalDataset::new(features, labels).unwrap()
    }

    #[test]
    fn zero_model_gradient_is_one() {
        let ds = one_d(12);
        let p = SvorexProblem::new(&ds, &SvorexConfig::default());
        let m = SvorexModel::zero(&ds, SvorexConfig::default());
        let (ga, gs) = p.gradient(&m);
        assert!(ga.iter().chain(&gs).all(|&v| v == 1.0));
    }

    #[test]
    fn single_active_alpha() {
        let ds = one_d(12);
        let p = SvorexProblem::new(&ds, &SvorexConfig::default());
        let mut m = SvorexModel::zero(&ds, SvorexConfig::default());
        m.alpha[0] = 0.7;
        assert!((p.gradient(&m).0[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn one_class_is_trivial() {
        let ds = OrdinalDataset::new(vec![vec![0.0], vec![1.0]], vec![1, 1]).unwrap();
        let r = train(&ds, &SvorexConfig::default()).unwrap();
        assert_eq!(r.model.selections, 0);
        assert!(r.model.alpha.iter().chain(&r.model.alpha_star).all(|&v| v == 0.0));
        assert_eq!(predict(&r.model, &ds, &[0.5]), 1);
    }

    #[test]
    fn zero_model_predicts_lowest_class() {
        let ds = one_d(12);
        let m = SvorexModel::zero(&ds, SvorexConfig::default());
        assert!(ds.features.iter().all(|x| predict(&m, &ds, x) == 1));
        let p = SvorexProblem::new(&ds, &SvorexConfig::default());
        assert!(!p.select_working_set(&m, 2).is_empty());
        assert_eq!(p.thresholds(&m), vec![0.0, 0.0]);
    }

    #[test]
    fn feasible_target_is_fixed_point() {
        let ds = one_d(9);
        let cfg = SvorexConfig::default();
        let p = SvorexProblem::new(&ds, &cfg);
        let m = SvorexModel::zero(&ds, cfg);
        let ws = WorkingSet { samples: vec![0, 3, 4, 8] };
        let mut a = m.alpha.clone();
        let mut s = m.alpha_star.clone();
        // Sample 0 is class 1 (α in block 1); sample 3 is class 2 (α* in block 1).
        a[0] = 1.5;
        s[3] = 1.5;
        let out = p.project_working_set(&m, &ws, &a, &s).unwrap();
        assert!((out.alpha[0] - 1.5).abs() < 1e-12 && (out.alpha_star[3] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn two_classes_shift_uniformly() {
        // Plain SVM case: the total-sum constraint alone binds.
        let ds = OrdinalDataset::new(vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, 2, 2]).unwrap();
        let cfg = SvorexConfig::default();
        let p = SvorexProblem::new(&ds, &cfg);
        let m = SvorexModel::zero(&ds, cfg);
        let ws = WorkingSet { samples: vec![0, 1, 2, 3] };
        let out = p.project_working_set(&m, &ws, &[1.0, 2.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        // y = (1, 2, -1, -1) sums to 1; the projection subtracts 1/4 from each.
        let expect = [0.75, 1.75];
        assert!((out.alpha[0] - expect[0]).abs() < 1e-12 && (out.alpha[1] - expect[1]).abs() < 1e-12);
        assert!((out.alpha_star[2] - 1.25).abs() < 1e-12 && (out.alpha_star[3] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn converges_with_ordered_thresholds() {
        let ds = one_d(60);
        let r = train(&ds, &SvorexConfig::default()).unwrap();
        let p = SvorexProblem::new(&ds, &r.model.config);
        assert!(p.max_violation(&r.model) <= 1e-3);
        assert!(p.feasibility_residual(&r.model) <= 1e-9);
        assert!(r.model.thresholds.windows(2).all(|w| w[0] <= w[1]), "{:?}", r.model.thresholds);
        let errors = ds.features.iter().zip(&ds.labels).filter(|(x, &l)| predict(&r.model, &ds, x) != l).count();
        assert!(errors * 10 < ds.len(), "{errors} training errors");
    }

    #[test]
    fn objective_never_decreases() {
        let ds = synthetic(60, 2, 3, 0.2, 4).unwrap();
        let r = train(&ds, &SvorexConfig { n_ws: 4, ..SvorexConfig::default() }).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].objective >= w[0].objective - 1e-9));
        assert!(r.trace.iter().all(|t| t.feasibility <= 1e-9));
    }

    #[test]
    fn model_json_round_trip() {
        let ds = one_d(6);
        let m = SvorexModel::zero(&ds, SvorexConfig::default());
        assert_eq!(SvorexModel::from_json(&m.to_json().unwrap()).unwrap(), m);
    }
}
