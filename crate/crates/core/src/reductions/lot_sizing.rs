//! Production planning with time-dependent inventory caps.
//!
//! Inventory after period i is K + Σ_{k≤i}(x_k - d_k). Substituting it turns
//! the inventory bounds into nested bounds on cumulative production and the
//! holding cost into a linear term on each production variable.

use serde::{Deserialize, Serialize};

use super::{close_with_slack, failing_constraint};
use crate::error::{Error, Result};
use crate::model::io::{Dec, ObjectiveDoc};
use crate::model::{CustomObjective, NestedInstance, ObjectiveSpec};

#[derive(Debug, Clone)]
pub struct LotSizingInstance {
    pub demand: Vec<f64>,
    pub initial_inventory: f64,
    pub inventory_cap: Vec<f64>,
    pub production_cap: Vec<f64>,
    /// Production cost p_i(x), one entry per period.
    pub production_cost: ObjectiveSpec,
    pub holding_cost: Vec<f64>,
}

/// The reduced instance; original cost = solver objective + `offset`.
#[derive(Debug, Clone)]
pub struct LotSizingReduction {
    pub instance: NestedInstance,
    pub offset: f64,
}

impl LotSizingInstance {
    pub fn periods(&self) -> usize {
        self.demand.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.periods();
        if n == 0 {
            return Err(Error::Malformed("lot sizing needs at least one period".into()));
        }
        for (name, v) in [("inventory_cap", &self.inventory_cap), ("production_cap", &self.production_cap), ("holding_cost", &self.holding_cost)] {
            if v.len() != n {
                return Err(Error::Malformed(format!("{name} has {} entries, expected {n}", v.len())));
            }
        }
        self.production_cost.check_params(n)?;
        let nonneg = |v: &[f64], name: &str| match v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
            Some(i) => Err(Error::Malformed(format!("{name}[{i}] must be finite and >= 0"))),
            None => Ok(()),
        };
        nonneg(&self.demand, "demand")?;
        nonneg(&self.inventory_cap, "inventory_cap")?;
        nonneg(&self.production_cap, "production_cap")?;
        nonneg(&self.holding_cost, "holding_cost")?;
        nonneg(&[self.initial_inventory], "initial_inventory")
    }

    /// Inventory level after each period.
    pub fn inventories(&self, production: &[f64]) -> Vec<f64> {
        let mut level = self.initial_inventory;
        production.iter().zip(&self.demand).map(|(x, d)| {
            level += x - d;
            level
        }).collect()
    }

    /// Production plus holding cost of a plan, in the original variables.
    pub fn cost(&self, production: &[f64]) -> f64 {
        let prod: f64 = production.iter().enumerate().map(|(i, &x)| self.production_cost.value(i, x)).sum();
        let hold: f64 = self.inventories(production).iter().zip(&self.holding_cost).map(|(i, a)| a * i).sum();
        prod + hold
    }
}

/// Rewrites the plan as nested allocation over cumulative production.
///
/// Bounds: D_i - K <= Σ_{k≤i} x_k <= D_i + Imax_i - K with D_i the cumulative
/// demand. The holding term contributes (Σ_{j≥i} α_j)·x_i to period i and a
/// constant returned as `offset`.
pub fn lot_sizing_to_rapnc(ls: &LotSizingInstance) -> Result<LotSizingReduction> {
    ls.check()?;
    let n = ls.periods();
    let k = ls.initial_inventory;
    let mut cum = 0.0;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut offset = 0.0;
    for i in 0..n {
        cum += ls.demand[i];
        a.push(cum - k);
        b.push(cum + ls.inventory_cap[i] - k);
        offset += ls.holding_cost[i] * (k - cum);
    }
    // Suffix sums of holding cost.
    let mut tail = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += ls.holding_cost[i];
        tail[i] = acc;
    }

    let objective = match &ls.production_cost {
        ObjectiveSpec::Linear { p } => {
            let mut p: Vec<f64> = p.iter().zip(&tail).map(|(p, t)| p + t).collect();
            p.push(0.0);
            ObjectiveSpec::Linear { p }
        }
        ObjectiveSpec::Quadratic { w, t } if w.iter().zip(&tail).all(|(&w, &h)| w > 0.0 || h == 0.0) => {
            // w (x - t)^2 + h x = w (x - t')^2 + const with t' = t - h / (2w).
            let mut shifted = Vec::with_capacity(n + 1);
            for i in 0..n {
                if w[i] > 0.0 {
                    let s = t[i] - tail[i] / (2.0 * w[i]);
                    offset += w[i] * (t[i] * t[i] - s * s);
                    shifted.push(s);
                } else {
                    shifted.push(t[i]);
                }
            }
            shifted.push(0.0);
            let mut w = w.clone();
            w.push(0.0);
            ObjectiveSpec::Quadratic { w, t: shifted }
        }
        other => {
            let base = other.clone();
            let slope = tail.clone();
            let base_d = other.clone();
            let slope_d = tail;
            ObjectiveSpec::Custom(
                CustomObjective::new(move |i, x| if i < n { base.value(i, x) + slope[i] * x } else { 0.0 })
                    .with_derivative(move |i, x| if i < n { base_d.derivative(i, x) + slope_d[i] } else { 0.0 }),
            )
        }
    };

    let instance = close_with_slack(a, b, vec![0.0; n], ls.production_cap.clone(), objective);
    if let Some(j) = failing_constraint(&instance)? {
        return Err(Error::NegativeBound { period: j.min(n) });
    }
    Ok(LotSizingReduction { instance, offset })
}

/// Text form of a lot-sizing model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LotSizingDoc {
    pub demand: Vec<Dec>,
    pub initial_inventory: Dec,
    pub inventory_cap: Vec<Dec>,
    pub production_cap: Vec<Dec>,
    pub production_cost: ObjectiveDoc,
    pub holding_cost: Vec<Dec>,
}

impl LotSizingDoc {
    pub fn to_instance(&self) -> Result<LotSizingInstance> {
        let f = |v: &[Dec]| v.iter().map(|d| d.0).collect::<Vec<_>>();
        Ok(LotSizingInstance {
            demand: f(&self.demand),
            initial_inventory: self.initial_inventory.0,
            inventory_cap: f(&self.inventory_cap),
            production_cap: f(&self.production_cap),
            production_cost: self.production_cost.to_spec()?,
            holding_cost: f(&self.holding_cost),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_periods(holding: Vec<f64>, cost: ObjectiveSpec) -> LotSizingInstance {
        LotSizingInstance {
            demand: vec![1.0, 1.0],
            initial_inventory: 0.0,
            inventory_cap: vec![1.0, 1.0],
            production_cap: vec![2.0, 2.0],
            production_cost: cost,
            holding_cost: holding,
        }
    }

    #[test]
    fn prefix_bounds_and_slack() {
        let r = lot_sizing_to_rapnc(&two_periods(vec![0.0; 2], ObjectiveSpec::Linear { p: vec![0.0; 2] })).unwrap();
        let inst = &r.instance;
        assert_eq!(inst.a[..2], [1.0, 2.0]);
        assert_eq!(inst.b[..2], [2.0, 3.0]);
        assert_eq!((inst.c[2], inst.d[2]), (0.0, 1.0));
        assert_eq!(inst.total(), 3.0);
        assert_eq!(inst.sigma, vec![1, 2, 3]);
    }

    #[test]
    fn holding_cost_moves_onto_production() {
        let r = lot_sizing_to_rapnc(&two_periods(vec![1.0, 0.0], ObjectiveSpec::Linear { p: vec![0.0; 2] })).unwrap();
        let ObjectiveSpec::Linear { p } = &r.instance.objective else { panic!() };
        assert_eq!(p, &vec![1.0, 0.0, 0.0]);
        // Offset: α_1 (K - d_1) = -1.
        assert_eq!(r.offset, -1.0);
    }

    #[test]
    fn stock_covers_demand() {
        let ls = LotSizingInstance {
            demand: vec![1.0, 2.0],
            initial_inventory: 5.0,
            inventory_cap: vec![100.0; 2],
            production_cap: vec![3.0; 2],
            production_cost: ObjectiveSpec::Linear { p: vec![1.0; 2] },
            holding_cost: vec![0.0; 2],
        };
        let r = lot_sizing_to_rapnc(&ls).unwrap();
        assert!(r.instance.a[..2].iter().all(|&a| a <= 0.0));
        let x = crate::mda::solve_continuous(&r.instance, 1e-6).unwrap().x;
        assert_eq!(&x[..2], &[0.0, 0.0]);
    }

    #[test]
    fn unmeetable_demand() {
        let mut ls = two_periods(vec![0.0; 2], ObjectiveSpec::Linear { p: vec![0.0; 2] });
        ls.demand = vec![3.0, 0.0];
        assert!(matches!(lot_sizing_to_rapnc(&ls), Err(Error::NegativeBound { period: 1 })));
    }

    #[test]
    fn quadratic_shift_preserves_cost() {
        let ls = two_periods(vec![0.5, 0.25], ObjectiveSpec::Quadratic { w: vec![1.0, 2.0], t: vec![1.0, 0.5] });
        let r = lot_sizing_to_rapnc(&ls).unwrap();
        for plan in [[1.0, 1.0], [2.0, 0.0], [1.5, 1.25]] {
            let mut x = plan.to_vec();
            let cum: f64 = plan.iter().sum();
            x.push(r.instance.total() - cum);
            let reduced = crate::model::evaluate(&r.instance.objective, &x).unwrap() + r.offset;
            assert!((reduced - ls.cost(&plan)).abs() < 1e-12, "{plan:?}");
        }
    }

    #[test]
    fn nonlinear_cost_goes_through_closure() {
        let ls = two_periods(vec![1.0, 1.0], ObjectiveSpec::F { p: vec![0.0; 2] });
        let r = lot_sizing_to_rapnc(&ls).unwrap();
        assert!(matches!(r.instance.objective, ObjectiveSpec::Custom(_)));
        let x = [1.0, 2.0, 0.0];
        let reduced = crate::model::evaluate(&r.instance.objective, &x).unwrap() + r.offset;
        assert!((reduced - ls.cost(&x[..2])).abs() < 1e-12);
    }
}
