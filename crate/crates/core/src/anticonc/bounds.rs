use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::atoms::{levy_q, linear_form_atoms, AtomDistribution, LinearFormSpec};
use crate::decomp::{binary_decompose, DyadicScalar};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Scalar};

/// Slack allowed in `Q(k alpha) <= k Q(alpha)` for float distributions.
pub const SCALING_TOLERANCE: f64 = 1e-12;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(a, floor(a/2)) / 2^a`, the largest mass an antichain of `{-1,1}^a` can carry.
pub fn sperner_bound(a: u32) -> BigRational {
    let num = binomial(a as u64, a as u64 / 2);
    BigRational::new(num.into(), (BigUint::one() << a as usize).into())
}

pub fn sperner_bound_f64(a: u32) -> f64 {
    rational_to_f64(&sperner_bound(a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
}

/// Compares `Q(k alpha, X)` against `k Q(alpha, X)`.
pub fn levy_scaling_check<T: Scalar>(d: &AtomDistribution<T>, alpha: &T, k: u32) -> Result<ScalingCheck<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let kk = T::from_u32(k).expect("small integers are representable");
    let lhs = levy_q(d, &(alpha.clone() * kk.clone()))?;
    let rhs = levy_q(d, alpha)? * kk;
    let ok = if T::is_exact() { lhs <= rhs } else { lhs.as_f64() <= rhs.as_f64() + SCALING_TOLERANCE };
    Ok(ScalingCheck { lhs, rhs, ok })
}

fn check_half_bias<T: Scalar>(s: &LinearFormSpec<T>) -> Result<()> {
    let b = s.bias_linf();
    if b > T::half() {
        return Err(Error::BiasTooLarge(b.as_f64()));
    }
    Ok(())
}

/// Outcome of the unbiased Sperner comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpernerComparison<T> {
    pub sperner: T,
    /// `q <= C(a, floor(a/2)) / 2^a`.
    pub within_sperner: bool,
    /// `q sqrt(a) <= 1`.
    pub ratio_at_most_one: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LittlewoodReport<T> {
    /// Number of coordinates with `|v_i| >= alpha`.
    pub a: u32,
    pub q: T,
    /// `q sqrt(a)`.
    pub ratio: f64,
    /// Present only for `p = 0` and `a >= 1`; biased forms are report-only.
    pub unbiased: Option<SpernerComparison<T>>,
}

impl<T> LittlewoodReport<T> {
    /// False only when an unbiased comparison was made and failed.
    pub fn holds(&self) -> bool {
        self.unbiased.as_ref().is_none_or(|u| u.within_sperner && u.ratio_at_most_one)
    }
}

pub fn littlewood_check<T: Scalar>(s: &LinearFormSpec<T>, alpha: &T) -> Result<LittlewoodReport<T>> {
    check_half_bias(s)?;
    let atoms = linear_form_atoms(s)?;
    let q = levy_q(&atoms, alpha)?;
    let a = s.v().iter().filter(|x| x.abs() >= *alpha).count() as u32;
    let ratio = q.as_f64() * (a as f64).sqrt();
    let unbiased = (s.is_unbiased() && a >= 1).then(|| {
        let sperner = T::from_rational(&sperner_bound(a));
        SpernerComparison { within_sperner: q <= sperner, ratio_at_most_one: ratio <= 1.0, sperner }
    });
    Ok(LittlewoodReport { a, q, ratio, unbiased })
}

/// Number of occupied scales `j` with `2^(-j-1) >= alpha`.
pub fn qualifying_scales<T: DyadicScalar>(v: &[T], alpha: &T) -> Result<usize> {
    let d = binary_decompose(v)?;
    Ok(d.scales().filter(|&j| T::pow2(-j - 1) >= *alpha).count())
}

/// Largest `r` with `count >= 2 r ln n`.
pub fn r_from_count(count: usize, n: usize) -> Result<u32> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    Ok((count as f64 / (2.0 * (n as f64).ln())).floor() as u32)
}

pub fn group_bound_r<T: DyadicScalar>(v: &[T], alpha: &T, n: usize) -> Result<u32> {
    r_from_count(qualifying_scales(v, alpha)?, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupBoundReport<T> {
    pub scales: usize,
    pub r: u32,
    pub q: T,
    /// `q 2^r`; the hidden constant is unknown, so this is report-only.
    pub bound_ratio: f64,
}

pub fn group_bound_check<T: DyadicScalar>(s: &LinearFormSpec<T>, alpha: &T, n: usize) -> Result<GroupBoundReport<T>> {
    check_half_bias(s)?;
    let scales = qualifying_scales(s.v(), alpha)?;
    let r = r_from_count(scales, n)?;
    let q = levy_q(&linear_form_atoms(s)?, alpha)?;
    let bound_ratio = q.as_f64() * 2f64.powi(r as i32);
    Ok(GroupBoundReport { scales, r, q, bound_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn sperner_values() {
        assert_eq!(sperner_bound(1), q(1, 2));
        assert_eq!(sperner_bound(2), q(1, 2));
        assert_eq!(sperner_bound(4), q(3, 8));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
    }

    #[test]
    fn scaling_check_examples() {
        let s = LinearFormSpec::unbiased(vec![q(1, 1), q(1, 1)]).unwrap();
        let d = linear_form_atoms(&s).unwrap();
        let c = levy_scaling_check(&d, &q(1, 1), 2).unwrap();
        assert_eq!((c.lhs, c.rhs, c.ok), (q(3, 4), q(1, 1), true));
        let c = levy_scaling_check(&d, &q(1, 1), 1).unwrap();
        assert!(c.ok && c.lhs == c.rhs);
        assert!(levy_scaling_check(&d, &q(1, 1), 0).is_err());
    }

    #[test]
    fn littlewood_examples() {
        let s = LinearFormSpec::unbiased(vec![q(1, 1), q(1, 1)]).unwrap();
        let r = littlewood_check(&s, &q(1, 1)).unwrap();
        assert_eq!((r.a, r.q.clone()), (2, q(1, 2)));
        assert!((r.ratio - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!(r.holds());

        let s = LinearFormSpec::new(vec![q(1, 1)], vec![q(1, 2)]).unwrap();
        let r = littlewood_check(&s, &q(1, 1)).unwrap();
        assert_eq!((r.a, r.q.clone(), r.ratio), (1, q(3, 4), 0.75));
        assert!(r.unbiased.is_none());

        let s = LinearFormSpec::unbiased(vec![q(1, 1); 4]).unwrap();
        let r = littlewood_check(&s, &q(1, 1)).unwrap();
        assert_eq!(r.q, q(3, 8));
        assert_eq!(r.unbiased.unwrap().sperner, q(3, 8));

        let s = LinearFormSpec::new(vec![1.0], vec![0.6]).unwrap();
        assert!(matches!(littlewood_check(&s, &1.0), Err(Error::BiasTooLarge(_))));
    }

    #[test]
    fn group_r_examples() {
        let v: Vec<f64> = (0..10).map(|j| 2f64.powi(-j)).collect();
        assert_eq!(qualifying_scales(&v, &2f64.powi(-10)).unwrap(), 10);
        assert_eq!(group_bound_r(&v, &2f64.powi(-10), 8).unwrap(), 2);
        assert_eq!(group_bound_r(&v, &0.75, 8).unwrap(), 0);
        assert_eq!(qualifying_scales(&v, &0.75).unwrap(), 0);
        assert!(group_bound_r(&v, &0.1, 1).is_err());
        // exact scalars see the same boundary: 2^(-j-1) >= alpha is inclusive
        let vr: Vec<BigRational> = v.iter().map(|&x| BigRational::from_float(x).unwrap()).collect();
        assert_eq!(qualifying_scales(&vr, &q(1, 1024)).unwrap(), 10);
        assert_eq!(qualifying_scales(&vr, &q(1, 1023)).unwrap(), 9);
    }

    #[test]
    fn group_check_dyadic_family() {
        let v12: Vec<f64> = (0..12).map(|j| 2f64.powi(-j)).collect();
        let alpha = 2f64.powi(-12);
        let full = group_bound_check(&LinearFormSpec::unbiased(v12.clone()).unwrap(), &alpha, 8).unwrap();
        let prefix = group_bound_check(&LinearFormSpec::unbiased(v12[..2].to_vec()).unwrap(), &alpha, 8).unwrap();
        assert_eq!(full.q, 2f64.powi(-12));
        assert_eq!(prefix.q, 0.25);
        assert!(full.q < prefix.q);
        assert_eq!(prefix.r, 0);
        assert!(prefix.bound_ratio <= 1.0);
    }
}
