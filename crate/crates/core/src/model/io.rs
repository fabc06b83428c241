//! JSON instance documents.
//!
//! Numeric arrays are written as decimal strings that round-trip exactly;
//! plain JSON numbers are accepted on input.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Allocation, FeasibilityReport, Mode, NestedInstance, ObjectiveSpec};
use crate::error::{Error, Result};

/// A real number carried as an exact decimal string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dec(pub f64);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}", self.0))
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Dec(v)),
            Raw::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Dec)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a decimal number"))),
        }
    }
}

fn to_f64(v: &[Dec]) -> Vec<f64> {
    v.iter().map(|d| d.0).collect()
}

fn to_dec(v: &[f64]) -> Vec<Dec> {
    v.iter().map(|&x| Dec(x)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveDoc {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, Vec<Dec>>,
}

impl ObjectiveDoc {
    pub fn from_spec(spec: &ObjectiveSpec) -> Result<Self> {
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: &[f64]| {
            params.insert(k.to_string(), to_dec(v));
        };
        match spec {
            ObjectiveSpec::Linear { p } | ObjectiveSpec::F { p } => put("p", p),
            ObjectiveSpec::Quadratic { w, t } => {
                put("w", w);
                put("t", t);
            }
            ObjectiveSpec::Crash { k, p } => {
                put("k", k);
                put("p", p);
            }
            ObjectiveSpec::Fuel { p, c } => {
                put("p", p);
                put("c", c);
            }
            ObjectiveSpec::Custom(_) => {
                return Err(Error::Unsupported("custom objectives cannot be serialized".into()))
            }
        }
        Ok(Self { kind: spec.family().name().to_string(), params })
    }

    pub fn to_spec(&self) -> Result<ObjectiveSpec> {
        let get = |k: &str| -> Result<Vec<f64>> {
            self.params
                .get(k)
                .map(|v| to_f64(v))
                .ok_or_else(|| Error::Parse(format!("objective `{}` needs parameter `{k}`", self.kind)))
        };
        Ok(match self.kind.to_ascii_lowercase().as_str() {
            "linear" => ObjectiveSpec::Linear { p: get("p")? },
            "quadratic" => ObjectiveSpec::Quadratic { w: get("w")?, t: get("t")? },
            "f" => ObjectiveSpec::F { p: get("p")? },
            "crash" => ObjectiveSpec::Crash { k: get("k")?, p: get("p")? },
            "fuel" => ObjectiveSpec::Fuel { p: get("p")?, c: get("c")? },
            "voyage" => crate::reductions::speed::voyage_objective(&get("delta")?, &get("k")?, &get("exponent")?, &get("h")?)?,
            other => return Err(Error::Parse(format!("unknown objective kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub n: usize,
    pub m: usize,
    pub sigma: Vec<usize>,
    pub a: Vec<Dec>,
    pub b: Vec<Dec>,
    pub c: Vec<Dec>,
    pub d: Vec<Dec>,
    pub objective: ObjectiveDoc,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Constant to add to the objective to recover a source model's cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_offset: Option<Dec>,
}

fn default_mode() -> Mode {
    Mode::Integer
}

impl InstanceDoc {
    pub fn from_instance(inst: &NestedInstance, mode: Mode) -> Result<Self> {
        Ok(Self {
            n: inst.n(),
            m: inst.m(),
            sigma: inst.sigma.clone(),
            a: to_dec(&inst.a),
            b: to_dec(&inst.b),
            c: to_dec(&inst.c),
            d: to_dec(&inst.d),
            objective: ObjectiveDoc::from_spec(&inst.objective)?,
            mode,
            value_offset: None,
        })
    }

    pub fn to_instance(&self) -> Result<(NestedInstance, Mode)> {
        let inst = NestedInstance::new(
            self.sigma.clone(),
            to_f64(&self.a),
            to_f64(&self.b),
            to_f64(&self.c),
            to_f64(&self.d),
            self.objective.to_spec()?,
        );
        if inst.n() != self.n || inst.m() != self.m {
            return Err(Error::Parse(format!(
                "declared n={}, m={} but arrays give n={}, m={}",
                self.n,
                self.m,
                inst.n(),
                inst.m()
            )));
        }
        inst.check_structure(self.mode)?;
        Ok((inst, self.mode))
    }
}

pub fn parse_instance(text: &str) -> Result<(NestedInstance, Mode)> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_instance()
}

pub fn instance_to_string(inst: &NestedInstance, mode: Mode) -> Result<String> {
    let doc = InstanceDoc::from_instance(inst, mode)?;
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))
}

pub fn read_instance(path: &Path) -> Result<(NestedInstance, Mode)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, inst: &NestedInstance, mode: Mode) -> Result<()> {
    let text = instance_to_string(inst, mode)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Rounds to 12 significant digits, dropping trailing noise.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Result document printed by `solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub mode: Mode,
    pub x: Vec<f64>,
    pub objective: f64,
    pub feasibility: FeasibilityReport,
    pub rap_solves: u64,
    pub shortcut_hits: u64,
}

impl SolutionDoc {
    pub fn new(alloc: &Allocation, feasibility: FeasibilityReport) -> Self {
        let x = match alloc.mode {
            Mode::Integer => alloc.x.clone(),
            Mode::Continuous => alloc.x.iter().map(|&v| sig12(v)).collect(),
        };
        Self {
            mode: alloc.mode,
            x,
            objective: sig12(alloc.objective_value),
            feasibility: FeasibilityReport {
                max_nested_violation: sig12(feasibility.max_nested_violation),
                max_box_violation: sig12(feasibility.max_box_violation),
                sum_residual: sig12(feasibility.sum_residual),
            },
            rap_solves: alloc.stats.rap_solves,
            shortcut_hits: alloc.stats.shortcut_hits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_values() {
        let inst = NestedInstance::new(
            vec![1, 3],
            vec![0.1, 1.7],
            vec![0.9, 1.7],
            vec![0.123456789012345, 0.2, 0.3],
            vec![1.0, 1.0, 1.0],
            ObjectiveSpec::Crash { k: vec![0.5; 3], p: vec![1.0 / 3.0; 3] },
        );
        let text = instance_to_string(&inst, Mode::Continuous).unwrap();
        let (back, mode) = parse_instance(&text).unwrap();
        assert_eq!(mode, Mode::Continuous);
        assert_eq!(back.c, inst.c);
        assert_eq!(back.a, inst.a);
        match back.objective {
            ObjectiveSpec::Crash { p, .. } => assert_eq!(p[0], 1.0 / 3.0),
            _ => panic!("family changed"),
        }
    }

    #[test]
    fn numbers_and_strings_both_accepted() {
        let text = r#"{"n":2,"m":2,"sigma":[1,2],"a":[0,"4"],"b":["1",4],"c":[0,0],"d":[4,4],
            "objective":{"kind":"linear","params":{"p":[1,"2"]}},"mode":"integer"}"#;
        let (inst, _) = parse_instance(text).unwrap();
        assert_eq!(inst.b, vec![1.0, 4.0]);
    }

    #[test]
    fn integer_mode_rejects_fractions() {
        let text = r#"{"n":1,"m":1,"sigma":[1],"a":["2.5"],"b":["2.5"],"c":[0],"d":[4],
            "objective":{"kind":"linear","params":{"p":[1]}},"mode":"integer"}"#;
        assert!(matches!(parse_instance(text), Err(Error::NotIntegral { .. })));
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(10.0), 10.0);
    }
}
