use crate::model::ObjectiveSpec;

/// The objective seen on a grid of step 1/s: g_i(x) = f_i(x / s).
///
/// With s = 1 this is the objective itself. Forward differences are computed
/// in closed form so that large scale factors do not cancel digits.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Scaled<'a> {
    pub obj: &'a ObjectiveSpec,
    pub s: f64,
}

impl<'a> Scaled<'a> {
    pub fn new(obj: &'a ObjectiveSpec, s: f64) -> Self {
        Self { obj, s }
    }

    #[cfg(test)]
    pub fn value(&self, i: usize, x: f64) -> f64 {
        self.obj.value(i, x / self.s)
    }

    /// g_i(x + 1) - g_i(x).
    #[inline]
    pub fn delta(&self, i: usize, x: i64) -> f64 {
        let s = self.s;
        let x = x as f64;
        match self.obj {
            ObjectiveSpec::Linear { p } => p[i] / s,
            ObjectiveSpec::Quadratic { w, t } => w[i] * (2.0 * x + 1.0 - 2.0 * t[i] * s) / (s * s),
            ObjectiveSpec::F { p } => {
                let s2 = s * s;
                (((4.0 * x + 6.0) * x + 4.0) * x + 1.0) / (4.0 * s2 * s2) + p[i] / s
            }
            ObjectiveSpec::Crash { p, .. } => -p[i] * s / (x * (x + 1.0)),
            ObjectiveSpec::Fuel { p, c } => {
                let c2 = c[i] * c[i];
                let q = x * (x + 1.0);
                -p[i] * c2 * c2 * s * s * s * ((3.0 * x + 3.0) * x + 1.0) / (q * q * q)
            }
            ObjectiveSpec::Custom(f) => f.value(i, (x + 1.0) / s) - f.value(i, x / s),
        }
    }

    /// g_i'(x).
    #[inline]
    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        self.obj.derivative(i, x / self.s) / self.s
    }

    /// The point y with g_i'(y) = lambda, when a closed form exists.
    ///
    /// Returns +inf when the derivative never reaches lambda from below and NaN
    /// when no formula is available.
    #[inline]
    pub fn inverse(&self, i: usize, lambda: f64) -> f64 {
        let s = self.s;
        match self.obj {
            ObjectiveSpec::Quadratic { w, t } if w[i] > 0.0 => t[i] * s + lambda * s * s / (2.0 * w[i]),
            ObjectiveSpec::F { p } => s * (lambda * s - p[i]).cbrt(),
            ObjectiveSpec::Crash { p, .. } => {
                if lambda < 0.0 {
                    (-p[i] * s / lambda).sqrt()
                } else {
                    f64::INFINITY
                }
            }
            ObjectiveSpec::Fuel { p, c } => {
                if lambda < 0.0 {
                    let c2 = c[i] * c[i];
                    (3.0 * p[i] * c2 * c2 * s * s * s / -lambda).powf(0.25)
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::NAN,
        }
    }
}
