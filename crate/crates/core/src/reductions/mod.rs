//! Application models that reduce to nested allocation.
//!
//! Both models leave the last cumulative quantity ranged while the solver
//! needs it fixed, so each reduction appends one zero-cost slack variable
//! that absorbs the unused range of the final constraint.

pub mod lot_sizing;
pub mod speed;

pub use lot_sizing::{lot_sizing_to_rapnc, LotSizingDoc, LotSizingInstance, LotSizingReduction};
pub use speed::{speed_opt_to_rapnc, FuelCurve, SpeedDoc, SpeedOptInstance};

use crate::error::{Error, Result};
use crate::model::{validate, Mode, NestedInstance};

/// Builds the instance with a trailing slack variable and the equality B = b_last.
pub(crate) fn close_with_slack(
    a: Vec<f64>,
    b: Vec<f64>,
    mut c: Vec<f64>,
    mut d: Vec<f64>,
    objective: crate::model::ObjectiveSpec,
) -> NestedInstance {
    let n = c.len();
    let (a_last, b_last) = (a[n - 1], b[n - 1]);
    c.push(0.0);
    d.push((b_last - a_last).max(0.0));
    let mut sigma: Vec<usize> = (1..=n).collect();
    sigma.push(n + 1);
    let mut a = a;
    let mut b = b;
    a.push(b_last);
    b.push(b_last);
    NestedInstance::new(sigma, a, b, c, d, objective)
}

/// Runs feasibility and hands back the 1-based constraint that failed.
pub(crate) fn failing_constraint(inst: &NestedInstance) -> Result<Option<usize>> {
    match validate(inst, Mode::Continuous) {
        Ok(()) => Ok(None),
        Err(Error::Infeasible { to, .. }) => Ok(Some(to)),
        Err(e) => Err(e),
    }
}
