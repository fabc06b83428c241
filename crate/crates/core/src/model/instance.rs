use serde::{Deserialize, Serialize};

use super::objective::ObjectiveSpec;
use crate::error::{Error, Result};

/// Arithmetic mode of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Integer,
    Continuous,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integer" => Ok(Mode::Integer),
            "continuous" => Ok(Mode::Continuous),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Integer => "integer",
            Mode::Continuous => "continuous",
        })
    }
}

/// min Σ f_i(x_i) s.t. a_j <= x_1 + .. + x_{sigma[j]} <= b_j, c <= x <= d.
///
/// `sigma[j]` is the length of the j-th prefix, strictly increasing with
/// `sigma[m-1] == n`. The last constraint is an equality: `a[m-1] == b[m-1]`.
#[derive(Debug, Clone)]
pub struct NestedInstance {
    pub sigma: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub objective: ObjectiveSpec,
}

impl NestedInstance {
    pub fn new(
        sigma: Vec<usize>,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        d: Vec<f64>,
        objective: ObjectiveSpec,
    ) -> Self {
        Self { sigma, a, b, c, d, objective }
    }

    /// One nested constraint per variable.
    pub fn full_nesting(
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        d: Vec<f64>,
        objective: ObjectiveSpec,
    ) -> Self {
        let sigma = (1..=c.len()).collect();
        Self { sigma, a, b, c, d, objective }
    }

    /// A plain resource allocation problem: Σx = total, c <= x <= d.
    pub fn single(total: f64, c: Vec<f64>, d: Vec<f64>, objective: ObjectiveSpec) -> Self {
        let n = c.len();
        Self { sigma: vec![n], a: vec![total], b: vec![total], c, d, objective }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.sigma.len()
    }

    /// The total resource B.
    pub fn total(&self) -> f64 {
        self.b.last().copied().unwrap_or(0.0)
    }

    /// Prefix length before constraint `j` (0-based), i.e. sigma[j-1] with sigma[-1] = 0.
    pub fn block_start(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.sigma[j - 1]
        }
    }

    /// Structural checks only: lengths, breakpoint order, bound order, integrality.
    pub fn check_structure(&self, mode: Mode) -> Result<()> {
        let n = self.n();
        let m = self.m();
        if n == 0 || m == 0 {
            return Err(Error::Malformed("instance needs at least one variable and one constraint".into()));
        }
        if self.d.len() != n || self.a.len() != m || self.b.len() != m {
            return Err(Error::Malformed("array lengths disagree with n and m".into()));
        }
        let mut prev = 0;
        for (j, &s) in self.sigma.iter().enumerate() {
            if s <= prev || s > n {
                return Err(Error::NonMonotoneSigma { index: j });
            }
            prev = s;
        }
        if prev != n {
            return Err(Error::NonMonotoneSigma { index: m - 1 });
        }
        for (name, lo, hi) in [("a/b", &self.a, &self.b), ("c/d", &self.c, &self.d)] {
            for (i, (&l, &h)) in lo.iter().zip(hi.iter()).enumerate() {
                if l.is_nan() || h.is_nan() || l.is_infinite() || h.is_infinite() {
                    return Err(Error::Malformed(format!("{name} bound {i} is not finite")));
                }
                if l > h {
                    return Err(Error::BoundOrderViolation { which: name, index: i, lower: l, upper: h });
                }
            }
        }
        if self.a[m - 1] != self.b[m - 1] {
            return Err(Error::Malformed("last nested constraint must be an equality (a_m = b_m)".into()));
        }
        if mode == Mode::Integer {
            for v in [&self.a, &self.b, &self.c, &self.d] {
                if let Some(i) = v.iter().position(|x| x.fract() != 0.0 || x.abs() > 2f64.powi(53)) {
                    return Err(Error::NotIntegral { index: i, value: v[i] });
                }
            }
        }
        self.objective.check_params(n)?;
        if self.objective.needs_positive_domain() {
            if let Some(i) = self.c.iter().position(|&c| c <= 0.0) {
                return Err(Error::DomainError { index: i, x: self.c[i] });
            }
        }
        Ok(())
    }
}

/// Accepts iff the instance is well formed and some point satisfies every constraint.
///
/// Feasibility is decided by propagating the reachable interval of prefix sums
/// block by block; an empty interval names the two constraints that clash
/// (index 0 is the implicit empty prefix).
pub fn validate(instance: &NestedInstance, mode: Mode) -> Result<()> {
    instance.check_structure(mode)?;
    let slack = |v: f64| match mode {
        Mode::Integer => 0.0,
        Mode::Continuous => 1e-9 * v.abs().max(1.0),
    };
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let (mut lo_src, mut hi_src) = (0usize, 0usize);
    let mut start = 0;
    for j in 0..instance.m() {
        let end = instance.sigma[j];
        let cs: f64 = instance.c[start..end].iter().sum();
        let ds: f64 = instance.d[start..end].iter().sum();
        lo += cs;
        hi += ds;
        if instance.a[j] > lo {
            lo = instance.a[j];
            lo_src = j + 1;
        }
        if instance.b[j] < hi {
            hi = instance.b[j];
            hi_src = j + 1;
        }
        if lo > hi + slack(hi) {
            return Err(Error::Infeasible { from: lo_src.min(hi_src), to: lo_src.max(hi_src) });
        }
        start = end;
    }
    Ok(())
}

/// Residuals of a candidate point. All entries are >= 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_nested_violation: f64,
    pub max_box_violation: f64,
    pub sum_residual: f64,
}

impl FeasibilityReport {
    pub fn all_zero(&self) -> bool {
        self.max_nested_violation == 0.0 && self.max_box_violation == 0.0 && self.sum_residual == 0.0
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_nested_violation <= tol && self.max_box_violation <= tol && self.sum_residual <= tol
    }

    pub fn worst(&self) -> f64 {
        self.max_nested_violation.max(self.max_box_violation).max(self.sum_residual)
    }
}

/// Compensated running sum, exact for integral inputs below 2^53.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Residuals of `x` against every constraint, one prefix pass.
///
/// Residuals at or below `tol` are reported as zero.
pub fn check_feasibility(instance: &NestedInstance, x: &[f64], tol: f64) -> FeasibilityReport {
    let mut rep = FeasibilityReport::default();
    if x.len() != instance.n() {
        rep.sum_residual = f64::INFINITY;
        return rep;
    }
    let cut = |v: f64| if v > tol { v } else { 0.0 };
    for (i, &xi) in x.iter().enumerate() {
        let v = (instance.c[i] - xi).max(xi - instance.d[i]);
        rep.max_box_violation = rep.max_box_violation.max(cut(v));
        if xi.is_nan() {
            rep.max_box_violation = f64::INFINITY;
        }
    }
    let mut acc = Neumaier::default();
    let mut start = 0;
    let m = instance.m();
    for j in 0..m {
        for &xi in &x[start..instance.sigma[j]] {
            acc.add(xi);
        }
        start = instance.sigma[j];
        let s = acc.value();
        if j + 1 < m {
            let v = (instance.a[j] - s).max(s - instance.b[j]);
            rep.max_nested_violation = rep.max_nested_violation.max(cut(v));
        } else {
            rep.sum_residual = cut((s - instance.total()).abs());
        }
    }
    rep
}

/// Solver bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub rap_solves: u64,
    pub shortcut_hits: u64,
    pub adjust_repairs: u64,
}

/// A solution vector with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub mode: Mode,
    pub stats: SolveStats,
}

/// How non-quadratic continuous instances are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContinuousMethod {
    /// Integer solve on a grid of step epsilon / n, then rescale.
    #[default]
    Scaling,
    /// Run the decomposition directly in floating point with dual bisection.
    DirectBisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndexFirst,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target per-coordinate accuracy in continuous mode.
    pub epsilon: f64,
    /// Penalty slope for the bound relaxation; derived from the instance when unset.
    pub penalty_m: Option<f64>,
    pub tie_break: TieBreak,
    pub feasibility_tol: f64,
    pub continuous_method: ContinuousMethod,
    /// Fork the two halves of large recursion nodes onto the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            penalty_m: None,
            tie_break: TieBreak::LowestIndexFirst,
            feasibility_tol: 1e-9,
            continuous_method: ContinuousMethod::Scaling,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Malformed("epsilon must be positive".into()));
        }
        if let Some(m) = self.penalty_m {
            if !(m > 0.0) {
                return Err(Error::Malformed("penalty slope must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Slope above every |f_i'| on the boxes, so the penalty relaxation is exact.
pub fn derive_penalty_m(instance: &NestedInstance) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..instance.n() {
        let s = instance.objective.slope_bound(i, instance.c[i], instance.d[i]);
        if s.is_finite() {
            worst = worst.max(s);
        }
    }
    1.0 + worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var() -> NestedInstance {
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
    fn single_box_contains_total() {
        let inst = NestedInstance::single(3.0, vec![0.0], vec![5.0], ObjectiveSpec::Linear { p: vec![1.0] });
        assert!(validate(&inst, Mode::Integer).is_ok());
    }

    #[test]
    fn total_beyond_box() {
        let inst = NestedInstance::single(6.0, vec![0.0], vec![5.0], ObjectiveSpec::Linear { p: vec![1.0] });
        assert_eq!(validate(&inst, Mode::Integer), Err(Error::Infeasible { from: 0, to: 1 }));
    }

    #[test]
    fn two_variable_instance_valid() {
        assert!(validate(&two_var(), Mode::Integer).is_ok());
    }

    #[test]
    fn structural_errors() {
        let mut inst = two_var();
        inst.sigma = vec![2, 2];
        assert!(matches!(validate(&inst, Mode::Integer), Err(Error::NonMonotoneSigma { .. })));
        let mut inst = two_var();
        inst.a[0] = 2.0;
        assert!(matches!(validate(&inst, Mode::Integer), Err(Error::BoundOrderViolation { .. })));
        let mut inst = two_var();
        inst.c[1] = 0.5;
        assert!(matches!(validate(&inst, Mode::Integer), Err(Error::NotIntegral { .. })));
        assert!(validate(&inst, Mode::Continuous).is_ok());
    }

    #[test]
    fn feasibility_residuals() {
        let inst = two_var();
        let rep = check_feasibility(&inst, &[2.0, 2.0], 0.0);
        assert_eq!(rep.max_nested_violation, 1.0);
        assert_eq!(rep.sum_residual, 0.0);
        assert!(check_feasibility(&inst, &[1.0, 3.0], 0.0).all_zero());
        let rep = check_feasibility(&inst, &[-1.0, 5.0], 0.0);
        assert_eq!(rep.max_box_violation, 1.0);
    }

    #[test]
    fn witness_names_clashing_pair() {
        // Prefix 1 needs at least 3 but the box caps it at 2.
        let inst = NestedInstance::new(
            vec![1, 2, 3],
            vec![3.0, 3.0, 5.0],
            vec![4.0, 6.0, 5.0],
            vec![0.0; 3],
            vec![2.0; 3],
            ObjectiveSpec::Linear { p: vec![0.0; 3] },
        );
        assert_eq!(validate(&inst, Mode::Integer), Err(Error::Infeasible { from: 0, to: 1 }));
    }
}
