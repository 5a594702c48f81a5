use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cube::{offsets_cross, Configuration, CrossingMode, Hyperplane, Plane};
use crate::error::{Error, Result};
use crate::par::map_batches;
use crate::rng::RngSpec;
use crate::sampler::{fill_mu, linf, BiasParams, BiasSampler, EvasiveSampler};

/// Two-sided normal quantile for 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub point_estimate: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub samples: u64,
    pub seed: u64,
    pub target_bound: Option<f64>,
}

impl EstimateReport {
    /// Frequency estimate from `hits` successes.
    pub fn from_proportion(hits: u64, samples: u64, rng: &RngSpec, target_bound: Option<f64>) -> Self {
        let nf = samples as f64;
        let p = hits as f64 / nf;
        let se = (p * (1.0 - p) / nf).sqrt();
        EstimateReport::new(p, se, samples, rng, target_bound)
    }

    /// Mean estimate from the sum and sum of squares of integer observations.
    pub fn from_moments(sum: u64, sumsq: u64, samples: u64, rng: &RngSpec, target_bound: Option<f64>) -> Self {
        let nf = samples as f64;
        let mean = sum as f64 / nf;
        let var = if samples > 1 { ((sumsq as f64 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
        EstimateReport::new(mean, (var / nf).sqrt(), samples, rng, target_bound)
    }

    fn new(point: f64, se: f64, samples: u64, rng: &RngSpec, target_bound: Option<f64>) -> Self {
        EstimateReport {
            point_estimate: point,
            std_error: se,
            ci95: [point - Z95 * se, point + Z95 * se],
            samples,
            seed: rng.seed,
            target_bound,
        }
    }

    pub fn ci_contains(&self, x: f64) -> bool {
        self.ci95[0] <= x && x <= self.ci95[1]
    }

    pub fn ci_width(&self) -> f64 {
        self.ci95[1] - self.ci95[0]
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    Ok(())
}

/// `sqrt(m) (ln n)^2 / n`, the shape of the per-plane crossing bound.
pub fn evasion_shape(n: usize, m: usize) -> f64 {
    (m as f64).sqrt() * (n as f64).ln().powi(2) / n as f64
}

/// `sqrt(m) (ln n)^2`, the shape of the glue-sum bound.
pub fn glue_shape(n: usize, m: usize) -> f64 {
    (m as f64).sqrt() * (n as f64).ln().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvasionReport {
    pub n: usize,
    pub m: usize,
    pub per_plane: Vec<EstimateReport>,
    /// Frequency of crossing at least one plane.
    pub union: EstimateReport,
    pub target_shape: f64,
    /// Largest per-plane estimate divided by `target_shape`.
    pub fitted_constant: f64,
    /// Bias draws rejected by the `|P|_inf <= 1/2` conditioning.
    pub rejections: u64,
}

impl EvasionReport {
    pub fn max_plane_estimate(&self) -> f64 {
        self.per_plane.iter().map(|r| r.point_estimate).fold(0.0, f64::max)
    }
}

#[inline]
fn unit_offset(p: &Plane<f64>, u: &[f64]) -> f64 {
    p.coeffs().iter().zip(u).map(|(a, b)| a * b).sum::<f64>() - p.threshold()
}

/// Empirical crossing frequency of evasive edges against each plane.
pub fn estimate_evasion(c: &Configuration, samples: u64, rng: &RngSpec) -> Result<EvasionReport> {
    estimate_evasion_with(c, samples, rng, BiasParams::default())
}

pub fn estimate_evasion_with(
    c: &Configuration,
    samples: u64,
    rng: &RngSpec,
    params: BiasParams,
) -> Result<EvasionReport> {
    check_samples(samples)?;
    let sampler = EvasiveSampler::from_configuration(c, params)?;
    let planes = c.unit_planes()?;
    let (n, m, mode) = (c.dim(), c.len(), c.mode());
    let parts = map_batches(samples, rng, |spec, len| -> Result<(Vec<u64>, u64, u64)> {
        let mut rng = spec.rng();
        let (mut p, mut u) = (vec![0.0; n], vec![0.0; n]);
        let mut hits = vec![0u64; m];
        let (mut union, mut rejections) = (0u64, 0u64);
        for _ in 0..len {
            rejections += sampler.bias().sample_conditioned_values(&mut rng, &mut p)? as u64;
            fill_mu(&p, &mut rng, &mut u);
            let k = rng.random_range(0..n);
            let mut any = false;
            for (l, plane) in planes.iter().enumerate() {
                let s = unit_offset(plane, &u);
                let s2 = s - 2.0 * u[k] * plane.coeffs()[k];
                if offsets_cross(&s, &s2, plane.zero_tolerance(), mode) {
                    hits[l] += 1;
                    any = true;
                }
            }
            union += any as u64;
        }
        Ok((hits, union, rejections))
    });
    let mut hits = vec![0u64; m];
    let (mut union, mut rejections) = (0u64, 0u64);
    for part in parts {
        let (h, un, rej) = part?;
        hits.iter_mut().zip(&h).for_each(|(a, b)| *a += b);
        union += un;
        rejections += rej;
    }
    let shape = evasion_shape(n, m);
    let per_plane: Vec<EstimateReport> =
        hits.iter().map(|&h| EstimateReport::from_proportion(h, samples, rng, Some(shape))).collect();
    let union = EstimateReport::from_proportion(union, samples, rng, None);
    let mut report = EvasionReport { n, m, per_plane, union, target_shape: shape, fitted_constant: 0.0, rejections };
    report.fitted_constant = report.max_plane_estimate() / shape;
    Ok(report)
}

/// Frequency of `|P|_inf > 1/2` for the unconditioned dyadic bias.
pub fn estimate_linf_tail(c: &Configuration, samples: u64, rng: &RngSpec) -> Result<EstimateReport> {
    check_samples(samples)?;
    let sampler = BiasSampler::from_configuration(c, BiasParams::default())?;
    let n = c.dim();
    let hits: u64 = map_batches(samples, rng, |spec, len| {
        let mut rng = spec.rng();
        let mut p = vec![0.0; n];
        (0..len)
            .filter(|_| {
                sampler.sample_values(&mut rng, &mut p);
                linf(&p) > 0.5
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(EstimateReport::from_proportion(hits, samples, rng, Some(2.0 / n as f64)))
}

/// Monte Carlo estimate of `sum_k Pr[|<v, x> - t| < 2 |v_k|]` for the unit
/// copy `v` of plane `plane_index`, with `x ~ mu_P` and `P` conditioned.
/// Each sample contributes the count of qualifying `k`.
pub fn estimate_glue_sum(
    c: &Configuration,
    plane_index: usize,
    t: f64,
    samples: u64,
    rng: &RngSpec,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    if plane_index >= c.len() {
        return Err(Error::PlaneIndexOutOfRange { index: plane_index, m: c.len() });
    }
    if !t.is_finite() {
        return Err(Error::NonFiniteScalar(t));
    }
    let sampler = BiasSampler::from_configuration(c, BiasParams::default())?;
    let v = c.planes()[plane_index].unit_float()?.coeffs().to_vec();
    let twice_abs: Vec<f64> = v.iter().map(|x| 2.0 * x.abs()).collect();
    let n = c.dim();
    let parts = map_batches(samples, rng, |spec, len| -> Result<(u64, u64)> {
        let mut rng = spec.rng();
        let (mut p, mut x) = (vec![0.0; n], vec![0.0; n]);
        let (mut sum, mut sumsq) = (0u64, 0u64);
        for _ in 0..len {
            sampler.sample_conditioned_values(&mut rng, &mut p)?;
            fill_mu(&p, &mut rng, &mut x);
            let gap = (v.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - t).abs();
            let count = twice_abs.iter().filter(|&&w| gap < w).count() as u64;
            sum += count;
            sumsq += count * count;
        }
        Ok((sum, sumsq))
    });
    let (mut sum, mut sumsq) = (0u64, 0u64);
    for part in parts {
        let (a, b) = part?;
        sum += a;
        sumsq += b;
    }
    Ok(EstimateReport::from_moments(sum, sumsq, samples, rng, Some(glue_shape(n, c.len()))))
}

/// `m` planes with Gaussian directions scaled to unit norm and standard
/// normal thresholds.
pub fn random_unit_configuration(n: usize, m: usize, rng: &RngSpec) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::DimensionZero);
    }
    let mut rng = rng.rng();
    let mut planes = Vec::with_capacity(m);
    while planes.len() < m {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let t: f64 = rng.sample(StandardNormal);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        planes.push(Hyperplane::float(v.iter().map(|x| x / norm).collect(), t)?);
    }
    Configuration::new(n, planes, CrossingMode::Strict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(n: usize, t: f64) -> Configuration {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        Configuration::new(n, vec![Hyperplane::float(v, t).unwrap()], CrossingMode::Strict).unwrap()
    }

    #[test]
    fn single_axis_plane_evasion() {
        let r = estimate_evasion(&e1(8, 0.0), 200_000, &RngSpec::new(3)).unwrap();
        assert!((r.per_plane[0].point_estimate - 0.125).abs() <= 4.0 * r.per_plane[0].std_error);
        assert_eq!(r.union.point_estimate, r.per_plane[0].point_estimate);
        assert_eq!(r.rejections, 0);
        let r = estimate_evasion(&e1(8, 2.0), 10_000, &RngSpec::new(3)).unwrap();
        assert_eq!(r.union.point_estimate, 0.0);
    }

    #[test]
    fn linf_tail_single_plane_is_zero() {
        let r = estimate_linf_tail(&e1(8, 0.0), 10_000, &RngSpec::new(1)).unwrap();
        assert_eq!(r.point_estimate, 0.0);
        assert_eq!(r.target_bound, Some(0.25));
    }

    #[test]
    fn glue_single_plane() {
        let r = estimate_glue_sum(&e1(8, 0.0), 0, 0.0, 5_000, &RngSpec::new(1)).unwrap();
        assert_eq!((r.point_estimate, r.std_error), (1.0, 0.0));
        let r = estimate_glue_sum(&e1(8, 0.0), 0, 5.0, 5_000, &RngSpec::new(1)).unwrap();
        assert_eq!(r.point_estimate, 0.0);
        assert!(matches!(
            estimate_glue_sum(&e1(8, 0.0), 1, 0.0, 10, &RngSpec::new(1)),
            Err(Error::PlaneIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn random_planes_are_unit() {
        let c = random_unit_configuration(16, 4, &RngSpec::new(5)).unwrap();
        for p in c.planes() {
            let Hyperplane::Float(p) = p else { panic!() };
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(c, random_unit_configuration(16, 4, &RngSpec::new(5)).unwrap());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate_linf_tail(&e1(8, 0.0), 0, &RngSpec::new(1)).is_err());
    }
}
