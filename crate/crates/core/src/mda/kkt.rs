use serde::Serialize;

use crate::model::{check_feasibility, derive_penalty_m, NestedInstance, Neumaier};

/// Dual values certifying optimality of a point.
///
/// `phi[i]` is the common marginal value of the block containing variable i;
/// it lies in the subdifferential of the penalized objective at x_i. The
/// multipliers satisfy phi(block j) - phi(block j+1) = kappa_j - lambda_j with
/// kappa_j = 0 unless prefix j sits at a_j, lambda_j = 0 unless it sits at b_j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktCertificate {
    pub phi: Vec<f64>,
    pub kappa: Vec<f64>,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum KktViolation {
    /// The point itself violates a constraint by more than the tolerance.
    Infeasible { worst_residual: f64 },
    /// No common marginal value exists inside block `block` (0-based constraint index).
    Stationarity { block: usize, variable: usize },
    /// Marginal values of blocks `constraint` and `constraint + 1` cannot be ordered as
    /// the activity of prefix constraint `constraint` requires.
    ComplementarySlackness { constraint: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum KktVerdict {
    Certified(KktCertificate),
    Violated(KktViolation),
}

impl KktVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, KktVerdict::Certified(_))
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Link {
    Equal,
    /// phi_j >= phi_{j+1}: prefix at its lower bound.
    NotBelow,
    /// phi_j <= phi_{j+1}: prefix at its upper bound.
    NotAbove,
    Free,
}

/// Builds dual multipliers for `x` or reports the first condition that fails.
///
/// `tol` is used both for constraint activity and, scaled by the slope
/// magnitude, for widening the subdifferential intervals. `penalty_m` defaults
/// to one plus the largest box-endpoint slope.
pub fn verify_kkt(inst: &NestedInstance, x: &[f64], tol: f64, penalty_m: Option<f64>) -> KktVerdict {
    let rep = check_feasibility(inst, x, tol);
    if !rep.all_zero() {
        return KktVerdict::Violated(KktViolation::Infeasible { worst_residual: rep.worst() });
    }
    let big_m = penalty_m.unwrap_or_else(|| derive_penalty_m(inst));
    let m = inst.m();
    let f = &inst.objective;

    // Subdifferential interval of each block.
    let mut blocks = Vec::with_capacity(m);
    let mut start = 0;
    for j in 0..m {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in start..inst.sigma[j] {
            let (c, d) = (inst.c[i], inst.d[i]);
            let at_c = x[i] <= c + tol;
            let at_d = x[i] >= d - tol;
            let g = f.derivative(i, x[i].clamp(c, d));
            let (l, h) = match (at_c, at_d) {
                (true, true) => (g - big_m, g + big_m),
                (true, false) => (g - big_m, g),
                (false, true) => (g, g + big_m),
                (false, false) => (g, g),
            };
            let slack = tol * g.abs().max(1.0);
            lo = lo.max(l - slack);
            hi = hi.min(h + slack);
            if lo > hi {
                return KktVerdict::Violated(KktViolation::Stationarity { block: j, variable: i });
            }
        }
        blocks.push((lo, hi));
        start = inst.sigma[j];
    }

    // Activity of each inner prefix constraint.
    let mut links = Vec::with_capacity(m.saturating_sub(1));
    let mut acc = Neumaier::default();
    let mut start = 0;
    for j in 0..m.saturating_sub(1) {
        for &xi in &x[start..inst.sigma[j]] {
            acc.add(xi);
        }
        start = inst.sigma[j];
        let s = acc.value();
        let band = tol * s.abs().max(1.0);
        let at_a = s <= inst.a[j] + band;
        let at_b = s >= inst.b[j] - band;
        links.push(match (at_a, at_b) {
            (true, true) => Link::Free,
            (true, false) => Link::NotBelow,
            (false, true) => Link::NotAbove,
            (false, false) => Link::Equal,
        });
    }

    // Forward pass: reachable interval for each block's value.
    let mut reach = Vec::with_capacity(m);
    reach.push(blocks[0]);
    for j in 1..m {
        let (plo, phi) = reach[j - 1];
        let (lo, hi) = match links[j - 1] {
            Link::Equal => (plo, phi),
            Link::NotBelow => (f64::NEG_INFINITY, phi),
            Link::NotAbove => (plo, f64::INFINITY),
            Link::Free => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let (lo, hi) = (lo.max(blocks[j].0), hi.min(blocks[j].1));
        if lo > hi {
            return KktVerdict::Violated(KktViolation::ComplementarySlackness { constraint: j - 1 });
        }
        reach.push((lo, hi));
    }

    // Backward pass: pick concrete values.
    let pick = |(lo, hi): (f64, f64)| {
        if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        }
    };
    let mut psi = vec![0.0; m];
    psi[m - 1] = pick(reach[m - 1]);
    for j in (0..m - 1).rev() {
        let (lo, hi) = reach[j];
        let next = psi[j + 1];
        psi[j] = match links[j] {
            Link::Equal => next,
            Link::NotBelow => next.max(lo).min(hi),
            Link::NotAbove => next.min(hi).max(lo),
            Link::Free => pick((lo, hi)),
        };
    }

    let mut kappa = vec![0.0; m];
    let mut lambda = vec![0.0; m];
    for j in 0..m {
        let diff = if j + 1 < m { psi[j] - psi[j + 1] } else { psi[j] };
        if diff > 0.0 {
            kappa[j] = diff;
        } else {
            lambda[j] = -diff;
        }
    }
    let mut phi = Vec::with_capacity(inst.n());
    let mut start = 0;
    for (j, &end) in inst.sigma.iter().enumerate() {
        phi.extend(std::iter::repeat(psi[j]).take(end - start));
        start = end;
    }
    KktVerdict::Certified(KktCertificate { phi, kappa, lambda })
}
