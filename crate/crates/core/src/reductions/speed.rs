//! Vessel speed optimization over a fixed port sequence.
//!
//! Variables are inter-arrival times: x_1 is the arrival at the first port and
//! x_i the sailing time of the leg into port i. A leg of length δ sailed in
//! time x costs δ·g(δ/x), where g equals the fuel-per-mile curve above its
//! minimizer and stays flat below it (sailing slower than optimal and waiting
//! costs the same as sailing at the optimum).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{close_with_slack, failing_constraint};
use crate::error::{Error, Result};
use crate::model::io::{Dec, ObjectiveDoc};
use crate::model::{CustomObjective, NestedInstance, ObjectiveSpec};

/// Fuel consumption per mile as a function of speed.
#[derive(Clone)]
pub enum FuelCurve {
    /// k·v^exponent, exponent >= 1; cheapest at zero speed.
    Power { k: f64, exponent: f64 },
    /// k·v² + h / v: propulsion plus a fixed hourly load spread over the miles covered.
    Hotel { k: f64, h: f64 },
    /// Any convex curve together with its minimizer.
    Custom { f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, v_opt: f64 },
}

impl fmt::Debug for FuelCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuelCurve::Power { k, exponent } => write!(f, "Power {{ k: {k}, exponent: {exponent} }}"),
            FuelCurve::Hotel { k, h } => write!(f, "Hotel {{ k: {k}, h: {h} }}"),
            FuelCurve::Custom { v_opt, .. } => write!(f, "Custom {{ v_opt: {v_opt} }}"),
        }
    }
}

impl FuelCurve {
    pub fn value(&self, v: f64) -> f64 {
        match self {
            FuelCurve::Power { k, exponent } => k * v.powf(*exponent),
            FuelCurve::Hotel { k, h } => k * v * v + h / v,
            FuelCurve::Custom { f, .. } => f(v),
        }
    }

    /// Speed minimizing fuel per mile.
    pub fn v_opt(&self) -> f64 {
        match self {
            FuelCurve::Power { .. } => 0.0,
            FuelCurve::Hotel { k, h } => (h / (2.0 * k)).cbrt(),
            FuelCurve::Custom { v_opt, .. } => *v_opt,
        }
    }

    fn slope(&self, v: f64) -> Option<f64> {
        match self {
            FuelCurve::Power { k, exponent } => Some(k * exponent * v.powf(exponent - 1.0)),
            FuelCurve::Hotel { k, h } => Some(2.0 * k * v - h / (v * v)),
            FuelCurve::Custom { .. } => None,
        }
    }

    /// The curve with everything below the minimizer replaced by the minimum.
    pub fn flattened(&self, v: f64) -> f64 {
        let opt = self.v_opt();
        if v <= opt {
            self.value(opt)
        } else {
            self.value(v)
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match self {
            FuelCurve::Power { k, exponent } => *k >= 0.0 && *exponent >= 1.0 && k.is_finite() && exponent.is_finite(),
            FuelCurve::Hotel { k, h } => *k > 0.0 && *h >= 0.0 && k.is_finite() && h.is_finite(),
            FuelCurve::Custom { v_opt, .. } => *v_opt >= 0.0 && v_opt.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed(format!("invalid fuel curve {self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpeedOptInstance {
    /// Leg lengths; leg i ends at port i + 1, so there is one fewer than ports.
    pub legs: Vec<f64>,
    /// Arrival window per port.
    pub windows: Vec<(f64, f64)>,
    /// 0 means no minimum speed.
    pub v_min: f64,
    pub v_max: f64,
    /// One curve per leg.
    pub fuel: Vec<FuelCurve>,
}

impl SpeedOptInstance {
    pub fn ports(&self) -> usize {
        self.windows.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.ports();
        if n == 0 || self.legs.len() + 1 != n || self.fuel.len() != self.legs.len() {
            return Err(Error::Malformed(format!(
                "{n} ports need {} legs and fuel curves, got {} and {}",
                n.saturating_sub(1),
                self.legs.len(),
                self.fuel.len()
            )));
        }
        if let Some(i) = self.legs.iter().position(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Malformed(format!("leg {i} must have positive finite length")));
        }
        if let Some(i) = self.windows.iter().position(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Malformed(format!("window {} is not an ordered finite interval", i + 1)));
        }
        if !(self.v_min >= 0.0 && self.v_min <= self.v_max && self.v_max > 0.0) {
            return Err(Error::Malformed(format!("speed limits [{}, {}] are not ordered", self.v_min, self.v_max)));
        }
        self.fuel.iter().try_for_each(FuelCurve::check)
    }

    /// Cost of sailing leg i in time x.
    pub fn leg_cost(&self, leg: usize, x: f64) -> f64 {
        let delta = self.legs[leg];
        delta * self.fuel[leg].flattened(delta / x)
    }

    /// Sailing speed on each leg for a vector of inter-arrival times.
    pub fn speeds(&self, x: &[f64]) -> Vec<f64> {
        self.legs.iter().enumerate().map(|(i, d)| d / x[i + 1]).collect()
    }

    /// Arrival time at each port.
    pub fn arrivals(&self, x: &[f64]) -> Vec<f64> {
        let mut t = 0.0;
        x[..self.ports()].iter().map(|v| {
            t += v;
            t
        }).collect()
    }
}

/// Rewrites the voyage as nested allocation over inter-arrival times.
pub fn speed_opt_to_rapnc(so: &SpeedOptInstance) -> Result<NestedInstance> {
    so.check()?;
    let n = so.ports();
    let (a, b): (Vec<f64>, Vec<f64>) = so.windows.iter().copied().unzip();
    let horizon = b[n - 1] - a[0];
    let mut c = vec![a[0]];
    let mut d = vec![b[0]];
    for &delta in &so.legs {
        // Keep times strictly positive so the cost stays finite.
        let lo = if so.v_max.is_finite() { delta / so.v_max } else { 0.0 };
        c.push(lo.max(1e-9 * delta));
        d.push(if so.v_min > 0.0 { delta / so.v_min } else { horizon.max(lo) });
    }

    let mut legs: Vec<Option<(f64, FuelCurve)>> = vec![None];
    legs.extend(so.legs.iter().zip(&so.fuel).map(|(&d, f)| Some((d, f.clone()))));
    let objective = leg_objective(legs);

    let instance = close_with_slack(a, b, c, d, objective);
    if let Some(j) = failing_constraint(&instance)? {
        return Err(Error::WindowInfeasible { port: j.min(n) });
    }
    Ok(instance)
}

/// Zero cost for `None` entries, δ·g(δ/x) for a leg (δ, curve).
///
/// Entries past the end of `legs` cost nothing, which covers the slack variable.
pub fn leg_objective(legs: Vec<Option<(f64, FuelCurve)>>) -> ObjectiveSpec {
    let legs = Arc::new(legs);
    let for_value = Arc::clone(&legs);
    let cost = |leg: &(f64, FuelCurve), x: f64| leg.0 * leg.1.flattened(leg.0 / x);
    let value = move |i: usize, x: f64| match for_value.get(i) {
        Some(Some(leg)) => cost(leg, x),
        _ => 0.0,
    };
    let derivative = move |i: usize, x: f64| {
        let Some(Some(leg)) = legs.get(i) else { return 0.0 };
        let (delta, curve) = leg;
        let v = delta / x;
        if v <= curve.v_opt() {
            return 0.0;
        }
        match curve.slope(v) {
            Some(s) => -delta * delta / (x * x) * s,
            None => {
                let h = 1e-6 * x.abs().max(1e-3);
                (cost(leg, x + h) - cost(leg, x - h)) / (2.0 * h)
            }
        }
    };
    ObjectiveSpec::Custom(CustomObjective::new(value).with_derivative(derivative))
}

/// Rebuilds a voyage objective from per-variable parameters.
///
/// delta = 0 marks a zero-cost variable. Otherwise h = 0 gives a power curve
/// and exponent = 2 with h > 0 a hotel-load curve.
pub fn voyage_objective(delta: &[f64], k: &[f64], exponent: &[f64], h: &[f64]) -> Result<ObjectiveSpec> {
    let n = delta.len();
    if k.len() != n || exponent.len() != n || h.len() != n {
        return Err(Error::Parse("voyage parameters differ in length".into()));
    }
    let mut legs = Vec::with_capacity(n);
    for i in 0..n {
        if delta[i] == 0.0 {
            legs.push(None);
            continue;
        }
        let curve = if h[i] == 0.0 {
            FuelCurve::Power { k: k[i], exponent: exponent[i] }
        } else if exponent[i] == 2.0 {
            FuelCurve::Hotel { k: k[i], h: h[i] }
        } else {
            return Err(Error::Parse(format!("voyage variable {i}: a hotel load needs exponent 2")));
        };
        if !(delta[i] > 0.0) {
            return Err(Error::Parse(format!("voyage variable {i}: negative leg length")));
        }
        curve.check()?;
        legs.push(Some((delta[i], curve)));
    }
    Ok(leg_objective(legs))
}

/// Text form of the reduced objective; custom curves have none.
pub fn voyage_objective_doc(so: &SpeedOptInstance) -> Result<ObjectiveDoc> {
    let n = so.ports() + 1;
    let mut cols = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (leg, (&delta, curve)) in so.legs.iter().zip(&so.fuel).enumerate() {
        let i = leg + 1;
        let (k, e, h) = match curve {
            FuelCurve::Power { k, exponent } => (*k, *exponent, 0.0),
            FuelCurve::Hotel { k, h } => (*k, 2.0, *h),
            FuelCurve::Custom { .. } => return Err(Error::Unsupported("custom fuel curves cannot be serialized".into())),
        };
        cols[0][i] = delta;
        cols[1][i] = k;
        cols[2][i] = e;
        cols[3][i] = h;
    }
    let params = ["delta", "k", "exponent", "h"].iter().zip(cols).map(|(name, v)| (name.to_string(), v.into_iter().map(Dec).collect())).collect();
    Ok(ObjectiveDoc { kind: "voyage".into(), params })
}

/// Text form of a voyage with power-law or hotel-load fuel curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedDoc {
    pub legs: Vec<Dec>,
    pub windows: Vec<[Dec; 2]>,
    #[serde(default)]
    pub v_min: Option<Dec>,
    pub v_max: Dec,
    pub fuel: Vec<FuelDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FuelDoc {
    Power { k: Dec, exponent: Dec },
    Hotel { k: Dec, h: Dec },
}

impl SpeedDoc {
    pub fn to_instance(&self) -> Result<SpeedOptInstance> {
        Ok(SpeedOptInstance {
            legs: self.legs.iter().map(|d| d.0).collect(),
            windows: self.windows.iter().map(|[a, b]| (a.0, b.0)).collect(),
            v_min: self.v_min.map_or(0.0, |v| v.0),
            v_max: self.v_max.0,
            fuel: self
                .fuel
                .iter()
                .map(|f| match f {
                    FuelDoc::Power { k, exponent } => FuelCurve::Power { k: k.0, exponent: exponent.0 },
                    FuelDoc::Hotel { k, h } => FuelCurve::Hotel { k: k.0, h: h.0 },
                })
                .collect(),
        })
    }
}
