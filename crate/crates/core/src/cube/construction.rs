use num_rational::BigRational;

use super::config::Configuration;
use super::plane::{CrossingMode, Hyperplane};
use crate::error::{Error, Result};
use crate::scalar::Arithmetic;

/// The classical `n`-plane slicings of `Q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    /// `x_i = 0` for every axis.
    Axis,
    /// Planes orthogonal to `(1, ..., 1)` between consecutive weight levels.
    MiddleLayers,
}

impl std::str::FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis" => Ok(ConstructionKind::Axis),
            "middle_layers" | "middle-layers" => Ok(ConstructionKind::MiddleLayers),
            other => Err(Error::UnknownConstruction(other.to_string())),
        }
    }
}

/// Thresholds of the middle-layer planes, `n - 2k - 1` for `k = 0..n`.
pub fn middle_layer_thresholds(n: usize) -> Vec<i64> {
    (0..n as i64).map(|k| n as i64 - 2 * k - 1).collect()
}

pub fn construction(kind: ConstructionKind, n: usize, arithmetic: Arithmetic) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::DimensionZero);
    }
    let mut planes = Vec::with_capacity(n);
    match kind {
        ConstructionKind::Axis => {
            for i in 0..n {
                let mut coeffs = vec![0i64; n];
                coeffs[i] = 1;
                planes.push(plane_from_ints(&coeffs, 0, 1.0, arithmetic)?);
            }
        }
        ConstructionKind::MiddleLayers => {
            // Crossing is invariant under positive scaling; float copies are unit-norm.
            let scale = 1.0 / (n as f64).sqrt();
            for t in middle_layer_thresholds(n) {
                planes.push(plane_from_ints(&vec![1i64; n], t, scale, arithmetic)?);
            }
        }
    }
    Configuration::new(n, planes, CrossingMode::Strict)
}

/// Lookup by name (`axis`, `middle_layers` / `middle-layers`).
pub fn construction_by_name(name: &str, n: usize, arithmetic: Arithmetic) -> Result<Configuration> {
    construction(name.parse()?, n, arithmetic)
}

fn plane_from_ints(coeffs: &[i64], t: i64, float_scale: f64, arithmetic: Arithmetic) -> Result<Hyperplane> {
    match arithmetic {
        Arithmetic::Exact => Hyperplane::exact(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            BigRational::from_integer(t.into()),
        ),
        Arithmetic::Float => {
            Hyperplane::float(coeffs.iter().map(|&c| c as f64 * float_scale).collect(), t as f64 * float_scale)
        }
    }
}
