use serde::Deserialize;
use serde_json::{json, Value};

use super::plane::{CrossingMode, Hyperplane, Plane};
use crate::error::{Error, Result};
use crate::scalar::{f64_to_json, rational_from_json, rational_to_f64, rational_to_json, Arithmetic};

/// An ordered list of hyperplanes in a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    n: usize,
    planes: Vec<Hyperplane>,
    mode: CrossingMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    #[serde(default)]
    mode: CrossingMode,
    #[serde(default)]
    arithmetic: Arithmetic,
    planes: Vec<RawPlane>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlane {
    coeffs: Vec<Value>,
    threshold: Value,
}

fn float_from_json(v: &Value) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::InvalidScalar(n.to_string()))?,
        _ => rational_to_f64(&rational_from_json(v)?),
    };
    if !x.is_finite() {
        return Err(Error::NonFiniteScalar(x));
    }
    Ok(x)
}

impl Configuration {
    pub fn new(n: usize, planes: Vec<Hyperplane>, mode: CrossingMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionZero);
        }
        for p in &planes {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
            }
        }
        Ok(Configuration { n, planes, mode })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn mode(&self) -> CrossingMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: CrossingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn push(&mut self, plane: Hyperplane) -> Result<()> {
        if plane.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: plane.dim() });
        }
        self.planes.push(plane);
        Ok(())
    }

    /// Copy with plane `index` removed.
    pub fn without_plane(&self, index: usize) -> Result<Self> {
        if index >= self.planes.len() {
            return Err(Error::PlaneIndexOutOfRange { index, m: self.planes.len() });
        }
        let mut planes = self.planes.clone();
        planes.remove(index);
        Ok(Configuration { n: self.n, planes, mode: self.mode })
    }

    /// Float copies of every plane scaled to unit norm.
    pub fn unit_planes(&self) -> Result<Vec<Plane<f64>>> {
        self.planes.iter().map(Hyperplane::unit_float).collect()
    }

    /// The common arithmetic of all planes; exact for an empty list.
    pub fn arithmetic(&self) -> Arithmetic {
        if self.planes.iter().any(|p| p.arithmetic() == Arithmetic::Float) {
            Arithmetic::Float
        } else {
            Arithmetic::Exact
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut planes = Vec::with_capacity(raw.planes.len());
        for p in &raw.planes {
            let plane = match raw.arithmetic {
                Arithmetic::Exact => Hyperplane::exact(
                    p.coeffs.iter().map(rational_from_json).collect::<Result<_>>()?,
                    rational_from_json(&p.threshold)?,
                )?,
                Arithmetic::Float => Hyperplane::float(
                    p.coeffs.iter().map(float_from_json).collect::<Result<_>>()?,
                    float_from_json(&p.threshold)?,
                )?,
            };
            planes.push(plane);
        }
        Configuration::new(raw.n, planes, raw.mode)
    }

    pub fn to_json(&self) -> Value {
        let planes: Vec<Value> = self
            .planes
            .iter()
            .map(|p| match p {
                Hyperplane::Exact(p) => json!({
                    "coeffs": p.coeffs().iter().map(rational_to_json).collect::<Vec<_>>(),
                    "threshold": rational_to_json(p.threshold()),
                }),
                Hyperplane::Float(p) => json!({
                    "coeffs": p.coeffs().iter().map(|&c| f64_to_json(c)).collect::<Vec<_>>(),
                    "threshold": f64_to_json(*p.threshold()),
                }),
            })
            .collect();
        json!({
            "n": self.n,
            "mode": self.mode,
            "arithmetic": self.arithmetic(),
            "planes": planes,
        })
    }
}
