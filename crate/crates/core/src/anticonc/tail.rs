use serde::Serialize;

use super::atoms::LinearFormSpec;
use crate::error::{Error, Result};
use crate::par::map_batches;
use crate::rng::RngSpec;
use crate::sampler::fill_mu;

/// `2 exp(-sigma^2 / 2)`.
pub fn hoeffding_bound(sigma: f64) -> f64 {
    2.0 * (-sigma * sigma / 2.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoeffdingReport {
    pub sigma: f64,
    pub samples: u64,
    /// Frequency of `|X - <v,p>| > sigma |v|_2`.
    pub empirical: f64,
    pub std_error: f64,
    pub bound: f64,
    /// `empirical <= bound + 4 std_error`.
    pub ok: bool,
    pub sample_mean: f64,
    pub expected_mean: f64,
    pub mean_std_error: f64,
}

/// Monte Carlo check of the two-sided Hoeffding tail for `X_{v,p}`.
pub fn hoeffding_check(s: &LinearFormSpec<f64>, sigma: f64, samples: u64, rng: &RngSpec) -> Result<HoeffdingReport> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let v = s.v();
    let expected_mean: f64 = v.iter().zip(s.p()).map(|(a, b)| a * b).sum();
    let radius = sigma * v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let parts = map_batches(samples, rng, |spec, len| {
        let mut rng = spec.rng();
        let mut x = vec![0.0; v.len()];
        let (mut hits, mut sum, mut sumsq) = (0u64, 0.0f64, 0.0f64);
        for _ in 0..len {
            fill_mu(s.p(), &mut rng, &mut x);
            let value: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
            if (value - expected_mean).abs() > radius {
                hits += 1;
            }
            sum += value;
            sumsq += value * value;
        }
        (hits, sum, sumsq)
    });
    let (mut hits, mut sum, mut sumsq) = (0u64, 0.0, 0.0);
    for (h, s1, s2) in parts {
        hits += h;
        sum += s1;
        sumsq += s2;
    }
    let nf = samples as f64;
    let empirical = hits as f64 / nf;
    let std_error = (empirical * (1.0 - empirical) / nf).sqrt();
    let sample_mean = sum / nf;
    let variance = (sumsq / nf - sample_mean * sample_mean).max(0.0);
    let bound = hoeffding_bound(sigma);
    Ok(HoeffdingReport {
        sigma,
        samples,
        empirical,
        std_error,
        bound,
        ok: empirical <= bound + 4.0 * std_error,
        sample_mean,
        expected_mean,
        mean_std_error: (variance / nf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        assert!((hoeffding_bound(2.0) - 0.270_670_566_473_225_4).abs() < 1e-15);
    }

    #[test]
    fn flat_unit_form_sigma_three() {
        let v = vec![1.0 / 8.0; 64];
        let s = LinearFormSpec::unbiased(v).unwrap();
        let r = hoeffding_check(&s, 3.0, 100_000, &RngSpec::new(11)).unwrap();
        assert!(r.ok, "{r:?}");
        assert!((r.sample_mean - r.expected_mean).abs() <= 4.0 * r.mean_std_error);
    }

    #[test]
    fn biased_mean_is_linear() {
        let s = LinearFormSpec::new(vec![1.0, -2.0, 0.5], vec![0.5, 0.25, -0.5]).unwrap();
        let r = hoeffding_check(&s, 1.0, 50_000, &RngSpec::new(2)).unwrap();
        assert_eq!(r.expected_mean, 0.5 - 0.5 - 0.25);
        assert!((r.sample_mean - r.expected_mean).abs() <= 4.0 * r.mean_std_error);
    }

    #[test]
    fn rejects_bad_sigma() {
        let s = LinearFormSpec::unbiased(vec![1.0]).unwrap();
        assert!(hoeffding_check(&s, 0.0, 10, &RngSpec::new(0)).is_err());
        assert!(hoeffding_check(&s, f64::NAN, 10, &RngSpec::new(0)).is_err());
    }
}
