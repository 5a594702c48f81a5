//! Dyadic (binary) decomposition of a vector.
//!
//! Every nonzero coordinate `v_k` lands in the unique bucket `j` with
//! `2^(-j-1) < |v_k| <= 2^(-j)`. Buckets are keyed by a signed `j`, so
//! coordinates larger than one are allowed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scalars whose dyadic bucket can be computed exactly.
pub trait DyadicScalar: Scalar {
    /// Bucket `j` of `|self|`, `None` for zero. Callers reject non-finite input first.
    fn dyadic_bucket(&self) -> Option<i32>;

    /// `2^k`, exact wherever representable.
    fn pow2(k: i32) -> Self;
}

impl DyadicScalar for f64 {
    fn dyadic_bucket(&self) -> Option<i32> {
        if *self == 0.0 {
            return None;
        }
        let bits = self.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let mantissa = bits & ((1u64 << 52) - 1);
        // |x| in [2^e, 2^(e+1)); an exact power of two sits on the closed end of bucket -e.
        let (e, power_of_two) = if exp == 0 {
            let top = 63 - mantissa.leading_zeros() as i32;
            (top - 1074, mantissa.is_power_of_two())
        } else {
            (exp - 1023, mantissa == 0)
        };
        Some(if power_of_two { -e } else { -e - 1 })
    }

    fn pow2(k: i32) -> Self {
        2f64.powi(k)
    }
}

/// `2^k` as an exact rational.
pub fn pow2_rational(k: i32) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

impl DyadicScalar for BigRational {
    fn dyadic_bucket(&self) -> Option<i32> {
        if self.is_zero() {
            return None;
        }
        let a = self.abs();
        let mut j = a.denom().bits() as i32 - a.numer().bits() as i32;
        while a > pow2_rational(-j) {
            j -= 1;
        }
        while a <= pow2_rational(-j - 1) {
            j += 1;
        }
        Some(j)
    }

    fn pow2(k: i32) -> Self {
        pow2_rational(k)
    }
}

/// One bucket: coordinate indices (ascending) and their values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompPart<T> {
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDecomposition<T> {
    source_dim: usize,
    parts: BTreeMap<i32, DecompPart<T>>,
}

impl<T: DyadicScalar> BinaryDecomposition<T> {
    /// Builds a decomposition from explicit parts; supports are not checked
    /// for disjointness until [`recompose`](Self::recompose).
    pub fn from_parts(source_dim: usize, parts: BTreeMap<i32, DecompPart<T>>) -> Result<Self> {
        for part in parts.values() {
            if part.indices.len() != part.values.len() {
                return Err(Error::InvalidArgument("indices and values differ in length".into()));
            }
            if let Some(&bad) = part.indices.iter().find(|&&i| i >= source_dim) {
                return Err(Error::InvalidArgument(format!("index {bad} out of range")));
            }
        }
        Ok(BinaryDecomposition { source_dim, parts })
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn parts(&self) -> &BTreeMap<i32, DecompPart<T>> {
        &self.parts
    }

    /// The occupied scales `J`, ascending.
    pub fn scales(&self) -> impl Iterator<Item = i32> + '_ {
        self.parts.keys().copied()
    }

    pub fn part(&self, j: i32) -> Option<&DecompPart<T>> {
        self.parts.get(&j)
    }

    /// Sum of the parts as a dense vector.
    pub fn recompose(&self) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.source_dim];
        let mut seen = vec![false; self.source_dim];
        for part in self.parts.values() {
            for (&i, x) in part.indices.iter().zip(&part.values) {
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::OverlappingSupports { index: i });
                }
                out[i] = x.clone();
            }
        }
        Ok(out)
    }
}

pub fn binary_decompose<T: DyadicScalar>(v: &[T]) -> Result<BinaryDecomposition<T>> {
    let mut parts: BTreeMap<i32, DecompPart<T>> = BTreeMap::new();
    for (k, x) in v.iter().enumerate() {
        if !x.is_finite_scalar() {
            return Err(Error::NonFiniteEntry { index: k });
        }
        if let Some(j) = x.dyadic_bucket() {
            let part = parts.entry(j).or_insert_with(|| DecompPart { indices: vec![], values: vec![] });
            part.indices.push(k);
            part.values.push(x.clone());
        }
    }
    Ok(BinaryDecomposition { source_dim: v.len(), parts })
}

pub fn recompose<T: DyadicScalar>(d: &BinaryDecomposition<T>) -> Result<Vec<T>> {
    d.recompose()
}
