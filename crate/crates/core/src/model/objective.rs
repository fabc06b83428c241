use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Eval = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Per-variable convex function supplied by the caller.
///
/// `value(i, x)` must be convex in `x` on the box of variable `i`. The
/// derivative is optional; when absent it is estimated by central differences.
#[derive(Clone)]
pub struct CustomObjective {
    value: Eval,
    derivative: Option<Eval>,
}

impl CustomObjective {
    pub fn new(value: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn value(&self, i: usize, x: f64) -> f64 {
        (self.value)(i, x)
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(i, x),
            None => {
                let h = 1e-6 * x.abs().max(1.0);
                (self.value(i, x + h) - self.value(i, x - h)) / (2.0 * h)
            }
        }
    }
}

impl fmt::Debug for CustomObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomObjective")
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Objective family tag, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Linear,
    Quadratic,
    F,
    Crash,
    Fuel,
    Custom,
}

impl Family {
    pub const PARAMETRIC: [Family; 5] = [
        Family::Linear,
        Family::Quadratic,
        Family::F,
        Family::Crash,
        Family::Fuel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Quadratic => "quadratic",
            Family::F => "f",
            Family::Crash => "crash",
            Family::Fuel => "fuel",
            Family::Custom => "custom",
        }
    }

    pub fn strictly_convex(self) -> bool {
        matches!(self, Family::F | Family::Crash | Family::Fuel)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Family::Linear),
            "quadratic" => Ok(Family::Quadratic),
            "f" => Ok(Family::F),
            "crash" => Ok(Family::Crash),
            "fuel" => Ok(Family::Fuel),
            "custom" => Ok(Family::Custom),
            other => Err(Error::Parse(format!("unknown objective family `{other}`"))),
        }
    }
}

/// Separable objective Σ f_i(x_i).
///
/// - `Linear`: f_i(x) = p_i x
/// - `Quadratic`: f_i(x) = w_i (x - t_i)^2, w_i >= 0
/// - `F`: f_i(x) = x^4 / 4 + p_i x
/// - `Crash`: f_i(x) = k_i + p_i / x, p_i > 0, x > 0
/// - `Fuel`: f_i(x) = p_i c_i (c_i / x)^3, p_i, c_i > 0, x > 0
#[derive(Debug, Clone)]
pub enum ObjectiveSpec {
    Linear { p: Vec<f64> },
    Quadratic { w: Vec<f64>, t: Vec<f64> },
    F { p: Vec<f64> },
    Crash { k: Vec<f64>, p: Vec<f64> },
    Fuel { p: Vec<f64>, c: Vec<f64> },
    Custom(CustomObjective),
}

impl ObjectiveSpec {
    pub fn family(&self) -> Family {
        match self {
            ObjectiveSpec::Linear { .. } => Family::Linear,
            ObjectiveSpec::Quadratic { .. } => Family::Quadratic,
            ObjectiveSpec::F { .. } => Family::F,
            ObjectiveSpec::Crash { .. } => Family::Crash,
            ObjectiveSpec::Fuel { .. } => Family::Fuel,
            ObjectiveSpec::Custom(_) => Family::Custom,
        }
    }

    /// Number of variables the parameters describe; `None` for custom objectives.
    pub fn len(&self) -> Option<usize> {
        match self {
            ObjectiveSpec::Linear { p } | ObjectiveSpec::F { p } => Some(p.len()),
            ObjectiveSpec::Quadratic { w, t } => (w.len() == t.len()).then_some(w.len()),
            ObjectiveSpec::Crash { k, p } => (k.len() == p.len()).then_some(p.len()),
            ObjectiveSpec::Fuel { p, c } => (p.len() == c.len()).then_some(p.len()),
            ObjectiveSpec::Custom(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Parameter checks independent of the boxes.
    pub fn check_params(&self, n: usize) -> Result<()> {
        if let Some(len) = self.len() {
            if len != n {
                return Err(Error::Malformed(format!(
                    "objective has {len} parameter entries, instance has {n} variables"
                )));
            }
        } else if !matches!(self, ObjectiveSpec::Custom(_)) {
            return Err(Error::Malformed("objective parameter arrays differ in length".into()));
        }
        let finite = |v: &[f64], name: &str| -> Result<()> {
            match v.iter().position(|x| !x.is_finite()) {
                Some(i) => Err(Error::Malformed(format!("objective {name}[{i}] is not finite"))),
                None => Ok(()),
            }
        };
        match self {
            ObjectiveSpec::Linear { p } | ObjectiveSpec::F { p } => finite(p, "p"),
            ObjectiveSpec::Quadratic { w, t } => {
                finite(w, "w")?;
                finite(t, "t")?;
                match w.iter().position(|&x| x < 0.0) {
                    Some(i) => Err(Error::NonConvexDetected { index: i }),
                    None => Ok(()),
                }
            }
            ObjectiveSpec::Crash { k, p } => {
                finite(k, "k")?;
                finite(p, "p")?;
                match p.iter().position(|&x| x < 0.0) {
                    Some(i) => Err(Error::NonConvexDetected { index: i }),
                    None => Ok(()),
                }
            }
            ObjectiveSpec::Fuel { p, c } => {
                finite(p, "p")?;
                finite(c, "c")?;
                match p.iter().zip(c).position(|(&p, &c)| p < 0.0 || c <= 0.0) {
                    Some(i) => Err(Error::NonConvexDetected { index: i }),
                    None => Ok(()),
                }
            }
            ObjectiveSpec::Custom(_) => Ok(()),
        }
    }

    /// Families undefined at x <= 0.
    pub fn needs_positive_domain(&self) -> bool {
        matches!(self, ObjectiveSpec::Crash { .. } | ObjectiveSpec::Fuel { .. })
    }

    /// f_i(x) without domain checks.
    #[inline]
    pub fn value(&self, i: usize, x: f64) -> f64 {
        match self {
            ObjectiveSpec::Linear { p } => p[i] * x,
            ObjectiveSpec::Quadratic { w, t } => {
                let d = x - t[i];
                w[i] * d * d
            }
            ObjectiveSpec::F { p } => {
                let x2 = x * x;
                0.25 * x2 * x2 + p[i] * x
            }
            ObjectiveSpec::Crash { k, p } => k[i] + p[i] / x,
            ObjectiveSpec::Fuel { p, c } => {
                let r = c[i] / x;
                p[i] * c[i] * r * r * r
            }
            ObjectiveSpec::Custom(f) => f.value(i, x),
        }
    }

    /// f_i(x), rejecting points outside the domain.
    pub fn checked_value(&self, i: usize, x: f64) -> Result<f64> {
        if !x.is_finite() || (self.needs_positive_domain() && x <= 0.0) {
            return Err(Error::DomainError { index: i, x });
        }
        let v = self.value(i, x);
        if v.is_nan() {
            return Err(Error::DomainError { index: i, x });
        }
        Ok(v)
    }

    /// f_i'(x). Every parametric family is differentiable on its domain.
    #[inline]
    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        match self {
            ObjectiveSpec::Linear { p } => p[i],
            ObjectiveSpec::Quadratic { w, t } => 2.0 * w[i] * (x - t[i]),
            ObjectiveSpec::F { p } => x * x * x + p[i],
            ObjectiveSpec::Crash { p, .. } => -p[i] / (x * x),
            ObjectiveSpec::Fuel { p, c } => {
                let c2 = c[i] * c[i];
                let x2 = x * x;
                -3.0 * p[i] * c2 * c2 / (x2 * x2)
            }
            ObjectiveSpec::Custom(f) => f.derivative(i, x),
        }
    }

    /// Largest |f_i'| on [lo, hi]; for a convex function it sits at an endpoint.
    pub fn slope_bound(&self, i: usize, lo: f64, hi: f64) -> f64 {
        self.derivative(i, lo).abs().max(self.derivative(i, hi).abs())
    }
}

/// Σ f_i(x_i), failing on the first point outside the objective's domain.
pub fn evaluate(objective: &ObjectiveSpec, x: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        total += objective.checked_value(i, xi)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn crash_at_two() {
        let f = ObjectiveSpec::Crash { k: vec![0.0], p: vec![1.0] };
        assert_eq!(evaluate(&f, &[2.0]).unwrap(), 0.5);
    }

    #[test]
    fn fuel_at_two() {
        let f = ObjectiveSpec::Fuel { p: vec![1.0], c: vec![2.0] };
        assert_eq!(evaluate(&f, &[2.0]).unwrap(), 2.0);
    }

    #[test]
    fn f_at_one() {
        let f = ObjectiveSpec::F { p: vec![1.0] };
        assert_eq!(evaluate(&f, &[1.0]).unwrap(), 1.25);
    }

    #[test]
    fn positive_domain_enforced() {
        let f = ObjectiveSpec::Crash { k: vec![0.0], p: vec![1.0] };
        assert!(matches!(evaluate(&f, &[0.0]), Err(Error::DomainError { index: 0, .. })));
        let f = ObjectiveSpec::Fuel { p: vec![1.0], c: vec![1.0] };
        assert!(evaluate(&f, &[-1.0]).is_err());
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let specs = [
            ObjectiveSpec::Linear { p: vec![0.3] },
            ObjectiveSpec::Quadratic { w: vec![1.5], t: vec![0.2] },
            ObjectiveSpec::F { p: vec![0.7] },
            ObjectiveSpec::Crash { k: vec![1.0], p: vec![0.4] },
            ObjectiveSpec::Fuel { p: vec![0.9], c: vec![0.3] },
        ];
        for s in &specs {
            for &x in &[0.2, 0.7, 1.9] {
                let h = 1e-6;
                let fd = (s.value(0, x + h) - s.value(0, x - h)) / (2.0 * h);
                let d = s.derivative(0, x);
                assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0), "{:?} at {x}", s.family());
            }
        }
    }

    fn family_strategy() -> impl Strategy<Value = ObjectiveSpec> {
        prop_oneof![
            (-2.0..2.0f64).prop_map(|p| ObjectiveSpec::Linear { p: vec![p] }),
            (0.0..3.0f64, -2.0..2.0f64).prop_map(|(w, t)| ObjectiveSpec::Quadratic { w: vec![w], t: vec![t] }),
            (-2.0..2.0f64).prop_map(|p| ObjectiveSpec::F { p: vec![p] }),
            (-1.0..1.0f64, 0.0..2.0f64).prop_map(|(k, p)| ObjectiveSpec::Crash { k: vec![k], p: vec![p] }),
            (0.0..2.0f64, 0.1..1.0f64).prop_map(|(p, c)| ObjectiveSpec::Fuel { p: vec![p], c: vec![c] }),
        ]
    }

    proptest! {
        #[test]
        fn midpoint_convexity(f in family_strategy(), x in 0.05..4.0f64, y in 0.05..4.0f64) {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let mid = f.value(0, 0.5 * (lo + hi));
            let avg = 0.5 * (f.value(0, lo) + f.value(0, hi));
            prop_assert!(mid <= avg + 1e-12 * avg.abs().max(1.0));
        }
    }
}
