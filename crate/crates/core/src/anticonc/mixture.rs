//! The biased form as a mixture of unbiased ones.
//!
//! Each coordinate with `p_i != 0` is zeroed independently with probability
//! `|p_i|`; a zeroed coordinate contributes the constant `v_i sign(p_i)`,
//! a surviving one contributes `v_i x'_i` with `x'_i` a fair sign. The mixture
//! has the law of `X_{v,p}`, which gives a second exact route to its atoms.

use super::atoms::{levy_q, linear_form_atoms, AtomDistribution, LinearFormSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Most biased coordinates the mixture enumeration accepts.
pub const MIXTURE_MAX_BIASED: usize = 16;

struct Component<T> {
    weight: T,
    offset: T,
    surviving: Vec<T>,
}

fn components<T: Scalar>(s: &LinearFormSpec<T>) -> Result<Vec<Component<T>>> {
    let biased: Vec<usize> = (0..s.dim()).filter(|&i| !s.p()[i].is_zero()).collect();
    if biased.len() > MIXTURE_MAX_BIASED {
        return Err(Error::DimensionTooLargeForOracle { n: biased.len(), limit: MIXTURE_MAX_BIASED });
    }
    let mut out = Vec::with_capacity(1 << biased.len());
    for zeroed in 0u32..(1u32 << biased.len()) {
        let mut weight = T::one();
        let mut offset = T::zero();
        let mut surviving = s.v().to_vec();
        for (bit, &i) in biased.iter().enumerate() {
            let pa = s.p()[i].abs();
            if zeroed >> bit & 1 == 1 {
                weight = weight * pa;
                offset = offset + s.v()[i].clone() * s.p()[i].signum();
                surviving[i] = T::zero();
            } else {
                weight = weight * (T::one() - pa);
            }
        }
        if !weight.is_zero() {
            out.push(Component { weight, offset, surviving });
        }
    }
    Ok(out)
}

/// Law of `X_{v,p}` computed through the mixture realization.
pub fn mixture_atoms<T: Scalar>(s: &LinearFormSpec<T>) -> Result<AtomDistribution<T>> {
    let scale = s.l1();
    let mut raw = Vec::new();
    for c in components(s)? {
        let law = linear_form_atoms(&LinearFormSpec::unbiased(c.surviving)?)?;
        for (x, q) in law.atoms() {
            raw.push((x.clone() + c.offset.clone(), q.clone() * c.weight.clone()));
        }
    }
    Ok(AtomDistribution::from_raw(raw, &scale))
}

/// `E[Q(alpha, X_{v', 0})]` over the mixture, an upper bound on `Q(alpha, X_{v,p})`.
pub fn mixture_levy_bound<T: Scalar>(s: &LinearFormSpec<T>, alpha: &T) -> Result<T> {
    let mut acc = T::zero();
    for c in components(s)? {
        let law = linear_form_atoms(&LinearFormSpec::unbiased(c.surviving)?)?;
        acc = acc + levy_q(&law, alpha)? * c.weight;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn mixture_matches_direct_law() {
        let s = LinearFormSpec::new(vec![q(1, 1), q(2, 3), q(-1, 2)], vec![q(1, 2), q(0, 1), q(-1, 3)]).unwrap();
        assert_eq!(mixture_atoms(&s).unwrap(), linear_form_atoms(&s).unwrap());
    }

    #[test]
    fn mixture_bound_dominates() {
        let s = LinearFormSpec::new(vec![q(1, 1); 5], vec![q(1, 2), q(1, 4), q(0, 1), q(-1, 2), q(1, 3)]).unwrap();
        let direct = levy_q(&linear_form_atoms(&s).unwrap(), &q(1, 1)).unwrap();
        assert!(direct <= mixture_levy_bound(&s, &q(1, 1)).unwrap());
    }
}
