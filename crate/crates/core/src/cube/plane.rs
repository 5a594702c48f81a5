use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::vertex::{Edge, Vertex};
use crate::error::{Error, Result};
use crate::scalar::{f64_to_rational, rational_to_f64, Arithmetic, Scalar};

/// Default float zero tolerance is this factor times `max(1, |t|, ||v||_1)`.
pub const FLOAT_ZERO_FACTOR: f64 = 1e-12;

/// Which edges count as dissected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingMode {
    /// The plane meets the edge and contains neither endpoint.
    #[default]
    Strict,
    /// The plane may additionally contain exactly one endpoint.
    Relaxed,
}

impl std::str::FromStr for CrossingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CrossingMode::Strict),
            "relaxed" => Ok(CrossingMode::Relaxed),
            other => Err(Error::InvalidArgument(format!("unknown crossing mode `{other}`"))),
        }
    }
}

/// Decides crossing from the signed offsets of the two endpoints.
#[inline]
pub fn offsets_cross<T: Scalar>(s: &T, s2: &T, tol: &T, mode: CrossingMode) -> bool {
    let sign = |x: &T| -> i8 {
        if x.abs() <= *tol {
            0
        } else if x.is_positive() {
            1
        } else {
            -1
        }
    };
    let (a, b) = (sign(s), sign(s2));
    match mode {
        CrossingMode::Strict => a * b < 0,
        CrossingMode::Relaxed => a * b < 0 || (a == 0) != (b == 0),
    }
}

/// `{x : <v, x> = t}` over a fixed scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    coeffs: Vec<T>,
    threshold: T,
    zero_tol: T,
    norm: Option<f64>,
}

impl<T: Scalar> Plane<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn threshold(&self) -> &T {
        &self.threshold
    }

    /// Magnitudes at or below this are treated as zero when deciding signs.
    pub fn zero_tolerance(&self) -> &T {
        &self.zero_tol
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `<v, x> - t`, summed in coordinate order.
    pub fn offset(&self, x: &Vertex) -> T {
        let mut acc = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if x.is_plus(i) {
                acc = acc + c.clone();
            } else {
                acc = acc - c.clone();
            }
        }
        acc - self.threshold.clone()
    }

    /// Offsets of the base and of the far endpoint, the latter as
    /// `s ∓ 2 v_k` according to the base's `axis` coordinate.
    pub fn edge_offsets(&self, e: &Edge) -> (T, T) {
        let s = self.offset(e.base());
        let vk = self.coeffs[e.axis()].clone();
        let twice = vk.clone() + vk;
        let s2 = if e.base().is_plus(e.axis()) { s.clone() - twice } else { s.clone() + twice };
        (s, s2)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }

    pub fn crosses(&self, e: &Edge, mode: CrossingMode) -> Result<bool> {
        self.check_dim(e.dim())?;
        let (s, s2) = self.edge_offsets(e);
        Ok(offsets_cross(&s, &s2, &self.zero_tol, mode))
    }

    /// `|<v, u> - t| < 2 |v_k|`, necessary for `(u, k)` to cross.
    pub fn crossing_necessary(&self, e: &Edge) -> Result<bool> {
        self.check_dim(e.dim())?;
        let s = self.offset(e.base());
        let vk = self.coeffs[e.axis()].abs();
        Ok(s.abs() < vk.clone() + vk)
    }
}

impl Plane<BigRational> {
    pub fn new(coeffs: Vec<BigRational>, threshold: BigRational) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionZero);
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::AllZeroCoefficients);
        }
        Ok(Plane { coeffs, threshold, zero_tol: BigRational::zero(), norm: None })
    }

    /// Copy with `(v, t)` multiplied by `lambda`.
    pub fn scaled(&self, lambda: &BigRational) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|c| c * lambda).collect(), &self.threshold * lambda)
    }
}

impl Plane<f64> {
    pub fn new(coeffs: Vec<f64>, threshold: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionZero);
        }
        if let Some(&bad) = coeffs.iter().chain(std::iter::once(&threshold)).find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteScalar(bad));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::AllZeroCoefficients);
        }
        let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let zero_tol = FLOAT_ZERO_FACTOR * 1f64.max(threshold.abs()).max(l1);
        Ok(Plane { coeffs, threshold, zero_tol, norm: Some(norm) })
    }

    /// Replaces the zero tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !tol.is_finite() || tol < 0.0 {
            return Err(Error::NonFiniteScalar(tol));
        }
        self.zero_tol = tol;
        Ok(self)
    }

    /// Euclidean norm recorded at construction.
    pub fn norm(&self) -> f64 {
        self.norm.unwrap_or_else(|| self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// Copy scaled to unit Euclidean norm (threshold scaled alike).
    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        let coeffs: Vec<f64> = self.coeffs.iter().map(|c| c / norm).collect();
        Self::new(coeffs, self.threshold / norm).expect("scaling a valid plane keeps it valid")
    }
}

/// A hyperplane in either arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Hyperplane {
    Exact(Plane<BigRational>),
    Float(Plane<f64>),
}

impl Hyperplane {
    pub fn exact(coeffs: Vec<BigRational>, threshold: BigRational) -> Result<Self> {
        Plane::<BigRational>::new(coeffs, threshold).map(Hyperplane::Exact)
    }

    pub fn float(coeffs: Vec<f64>, threshold: f64) -> Result<Self> {
        Plane::<f64>::new(coeffs, threshold).map(Hyperplane::Float)
    }

    /// Exact-from-integers convenience.
    pub fn from_ints(coeffs: &[i64], threshold: i64) -> Result<Self> {
        Hyperplane::exact(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            BigRational::from_integer(threshold.into()),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            Hyperplane::Exact(p) => p.dim(),
            Hyperplane::Float(p) => p.dim(),
        }
    }

    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            Hyperplane::Exact(_) => Arithmetic::Exact,
            Hyperplane::Float(_) => Arithmetic::Float,
        }
    }

    pub fn crosses(&self, e: &Edge, mode: CrossingMode) -> Result<bool> {
        match self {
            Hyperplane::Exact(p) => p.crosses(e, mode),
            Hyperplane::Float(p) => p.crosses(e, mode),
        }
    }

    pub fn crossing_necessary(&self, e: &Edge) -> Result<bool> {
        match self {
            Hyperplane::Exact(p) => p.crossing_necessary(e),
            Hyperplane::Float(p) => p.crossing_necessary(e),
        }
    }

    /// Coefficients as doubles.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        match self {
            Hyperplane::Exact(p) => p.coeffs().iter().map(rational_to_f64).collect(),
            Hyperplane::Float(p) => p.coeffs().to_vec(),
        }
    }

    pub fn threshold_f64(&self) -> f64 {
        match self {
            Hyperplane::Exact(p) => rational_to_f64(p.threshold()),
            Hyperplane::Float(p) => *p.threshold(),
        }
    }

    /// Float copy (rationals rounded to nearest double).
    pub fn to_float(&self) -> Result<Plane<f64>> {
        match self {
            Hyperplane::Exact(_) => Plane::<f64>::new(self.coeffs_f64(), self.threshold_f64()),
            Hyperplane::Float(p) => Ok(p.clone()),
        }
    }

    /// Unit-norm float copy, the form the samplers consume.
    pub fn unit_float(&self) -> Result<Plane<f64>> {
        Ok(self.to_float()?.normalized())
    }

    /// Exact copy (doubles converted to their exact binary value).
    pub fn to_exact(&self) -> Result<Plane<BigRational>> {
        match self {
            Hyperplane::Exact(p) => Ok(p.clone()),
            Hyperplane::Float(p) => Plane::<BigRational>::new(
                p.coeffs().iter().map(|&c| f64_to_rational(c)).collect::<Result<_>>()?,
                f64_to_rational(*p.threshold())?,
            ),
        }
    }
}

/// Validated hyperplane from rational inputs in the requested arithmetic.
pub fn make_hyperplane(coeffs: &[BigRational], threshold: &BigRational, arithmetic: Arithmetic) -> Result<Hyperplane> {
    match arithmetic {
        Arithmetic::Exact => Hyperplane::exact(coeffs.to_vec(), threshold.clone()),
        Arithmetic::Float => {
            Hyperplane::float(coeffs.iter().map(rational_to_f64).collect(), rational_to_f64(threshold))
        }
    }
}

pub fn edge_crosses(h: &Hyperplane, e: &Edge, mode: CrossingMode) -> Result<bool> {
    h.crosses(e, mode)
}

pub fn crossing_necessary(h: &Hyperplane, e: &Edge) -> Result<bool> {
    h.crossing_necessary(e)
}
