use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest dimension the exhaustive oracle accepts (`2^22` sign vectors).
pub const ORACLE_MAX_DIM: usize = 22;

/// Coefficients `v` and a bias `p` with `|p|_inf <= 1`; the form is
/// `X_{v,p} = <v, x>` with `x ~ mu_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFormSpec<T> {
    v: Vec<T>,
    p: Vec<T>,
}

impl<T: Scalar> LinearFormSpec<T> {
    pub fn new(v: Vec<T>, p: Vec<T>) -> Result<Self> {
        if v.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), found: p.len() });
        }
        if let Some(index) = v.iter().chain(&p).position(|x| !x.is_finite_scalar()) {
            return Err(Error::NonFiniteEntry { index: index % v.len().max(1) });
        }
        if let Some(index) = p.iter().position(|x| x.abs() > T::one()) {
            return Err(Error::BiasOutOfRange { index, value: p[index].as_f64() });
        }
        Ok(LinearFormSpec { v, p })
    }

    /// Unbiased form `p = 0`.
    pub fn unbiased(v: Vec<T>) -> Result<Self> {
        let p = vec![T::zero(); v.len()];
        LinearFormSpec::new(v, p)
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn bias_linf(&self) -> T {
        self.p.iter().fold(T::zero(), |acc, x| if x.abs() > acc { x.abs() } else { acc })
    }

    pub fn is_unbiased(&self) -> bool {
        self.p.iter().all(Zero::is_zero)
    }

    /// `sum |v_i|`, the scale used for float atom merging.
    pub fn l1(&self) -> T {
        self.v.iter().fold(T::zero(), |acc, x| acc + x.abs())
    }
}

/// A finite law as `(value, probability)` atoms with strictly increasing values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomDistribution<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Scalar> AtomDistribution<T> {
    /// Sorts by value, merges values within tolerance of the group's first
    /// value, and drops zero-mass atoms.
    pub fn from_raw(mut raw: Vec<(T, T)>, scale: &T) -> Self {
        raw.retain(|(_, q)| !q.is_zero());
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut atoms: Vec<(T, T)> = Vec::with_capacity(raw.len());
        for (x, q) in raw {
            match atoms.last_mut() {
                Some((y, mass)) if y.merges_with(&x, scale) => *mass = mass.clone() + q,
                _ => atoms.push((x, q)),
            }
        }
        AtomDistribution { atoms }
    }

    pub fn point_mass(x: T) -> Self {
        AtomDistribution { atoms: vec![(x, T::one())] }
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, (_, q)| acc + q.clone())
    }

    /// `E[X]`.
    pub fn mean(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, (x, q)| acc + x.clone() * q.clone())
    }

    /// Law of `X + c * Y` with `Y` uniform on `{-1, +1}` weighted by
    /// `(lo, hi)`: `Pr[Y = -1] = lo`, `Pr[Y = 1] = hi`.
    pub(crate) fn convolve_sign(&self, c: &T, lo: &T, hi: &T, scale: &T) -> Self {
        let mut raw = Vec::with_capacity(2 * self.atoms.len());
        for (x, q) in &self.atoms {
            raw.push((x.clone() - c.clone(), q.clone() * lo.clone()));
            raw.push((x.clone() + c.clone(), q.clone() * hi.clone()));
        }
        AtomDistribution::from_raw(raw, scale)
    }

    /// Largest absolute difference in values or masses, `None` if the atom
    /// counts differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for ((x, q), (y, r)) in self.atoms.iter().zip(&other.atoms) {
            worst = worst.max((x.clone() - y.clone()).abs().as_f64());
            worst = worst.max((q.clone() - r.clone()).abs().as_f64());
        }
        Some(worst)
    }
}

/// Exact law of `X_{v,p}`: every sign vector `x` contributes `<v, x>` with
/// mass `prod_i (1 ± p_i) / 2`. Built coordinate by coordinate, merging equal
/// values after each step; zero coefficients leave the law unchanged.
pub fn linear_form_atoms<T: Scalar>(s: &LinearFormSpec<T>) -> Result<AtomDistribution<T>> {
    if s.dim() > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLargeForOracle { n: s.dim(), limit: ORACLE_MAX_DIM });
    }
    let scale = s.l1();
    let half = T::half();
    let mut dist = AtomDistribution::point_mass(T::zero());
    for (vi, pi) in s.v.iter().zip(&s.p) {
        if vi.is_zero() {
            continue;
        }
        let lo = (T::one() - pi.clone()) * half.clone();
        let hi = (T::one() + pi.clone()) * half.clone();
        dist = dist.convolve_sign(vi, &lo, &hi, &scale);
    }
    Ok(dist)
}

/// Levy concentration `Q(alpha, X) = sup_t Pr[|X - t| < alpha]`.
///
/// An open window of length `2 alpha` can be slid right until its left end
/// sits just below some atom without losing mass, so the supremum is the
/// largest mass of a half-open window `[x_i, x_i + 2 alpha)` anchored at an
/// atom. Two pointers sweep those windows in one pass.
pub fn levy_q<T: Scalar>(d: &AtomDistribution<T>, alpha: &T) -> Result<T> {
    if alpha.is_negative() {
        return Err(Error::NegativeAlpha);
    }
    if alpha.is_zero() {
        return Ok(T::zero());
    }
    let width = alpha.clone() + alpha.clone();
    let atoms = d.atoms();
    let mut best = T::zero();
    let mut mass = T::zero();
    let mut hi = 0;
    for lo in 0..atoms.len() {
        let end = atoms[lo].0.clone() + width.clone();
        while hi < atoms.len() && atoms[hi].0 < end {
            mass = mass + atoms[hi].1.clone();
            hi += 1;
        }
        if mass > best {
            best = mass.clone();
        }
        mass = mass - atoms[lo].1.clone();
    }
    Ok(best)
}
