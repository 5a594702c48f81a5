use statrs::distribution::{ChiSquared, ContinuousCDF};

use slicer::anticonc::{hoeffding_bound, hoeffding_check, LinearFormSpec};
use slicer::cube::{Configuration, CrossingMode, Hyperplane};
use slicer::lab::{estimate_evasion, estimate_glue_sum, random_unit_configuration};
use slicer::sampler::{draw_mu, BiasParams, BiasSampler, EvasiveSampler};
use slicer::RngSpec;

fn e1_config(n: usize) -> Configuration {
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    Configuration::new(n, vec![Hyperplane::float(v, 0.0).unwrap()], CrossingMode::Strict).unwrap()
}

/// Upper-tail p-value of Pearson's statistic.
fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((observed.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn single_plane_bias_has_uniform_variance() {
    // P = alpha / (10 sqrt(ln 8)) e_1 with alpha uniform on [-1, 1].
    let sampler = BiasSampler::from_configuration(&e1_config(8), BiasParams::default()).unwrap();
    let mut rng = RngSpec::new(21).rng();
    let samples = 200_000;
    let mut p = vec![0.0; 8];
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for _ in 0..samples {
        sampler.sample_values(&mut rng, &mut p);
        assert!(p[1..].iter().all(|&x| x == 0.0));
        sum += p[0];
        sumsq += p[0] * p[0];
    }
    let n = samples as f64;
    let var = sumsq / n - (sum / n).powi(2);
    let expected = 1.0 / (300.0 * 8f64.ln());
    // Var of a uniform square has relative standard error ~ sqrt(0.8 / n).
    assert!((var / expected - 1.0).abs() < 5.0 * (0.8 / n).sqrt(), "var {var} vs {expected}");
}

#[test]
fn mu_p_coordinate_frequencies() {
    let p = [0.5, -0.5, 0.0, 0.9];
    let mut rng = RngSpec::new(7).rng();
    let samples = 100_000u64;
    let mut plus = [0u64; 4];
    for _ in 0..samples {
        let x = draw_mu(&p, &mut rng).unwrap();
        for (i, c) in plus.iter_mut().enumerate() {
            *c += u64::from(x.is_plus(i));
        }
    }
    for (i, &pi) in p.iter().enumerate() {
        let q = (1.0 + pi) / 2.0;
        let observed = [plus[i], samples - plus[i]];
        let expected = [q * samples as f64, (1.0 - q) * samples as f64];
        assert!(chi_square_p(&observed, &expected) > 1e-4, "coordinate {i}");
        let mean = 2.0 * plus[i] as f64 / samples as f64 - 1.0;
        let se = ((1.0 - pi * pi) / samples as f64).sqrt();
        assert!((mean - pi).abs() < 5.0 * se.max(1e-9));
    }
}

#[test]
fn evasive_axis_is_uniform() {
    let c = random_unit_configuration(6, 2, &RngSpec::new(3)).unwrap();
    let sampler = EvasiveSampler::from_configuration(&c, BiasParams::default()).unwrap();
    let mut rng = RngSpec::new(4).rng();
    let mut counts = [0u64; 6];
    let samples = 60_000;
    for _ in 0..samples {
        counts[sampler.sample_edge(&mut rng).unwrap().axis()] += 1;
    }
    assert!(chi_square_p(&counts, &[samples as f64 / 6.0; 6]) > 1e-4);
}

#[test]
fn single_axis_plane_crossing_rate() {
    // Only edges along axis 0 cross x_1 = 0, and the axis is uniform.
    let r = estimate_evasion(&e1_config(8), 400_000, &RngSpec::new(11)).unwrap();
    let est = &r.per_plane[0];
    assert!((est.point_estimate - 0.125).abs() < 4.0 * est.std_error);
}

#[test]
fn confidence_intervals_shrink_with_samples() {
    let c = random_unit_configuration(16, 3, &RngSpec::new(8)).unwrap();
    let small = estimate_evasion(&c, 10_000, &RngSpec::new(1)).unwrap();
    let large = estimate_evasion(&c, 160_000, &RngSpec::new(1)).unwrap();
    let ratio = small.union.ci_width() / large.union.ci_width();
    assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
}

#[test]
fn glue_sum_for_axis_plane_is_one() {
    let r = estimate_glue_sum(&e1_config(8), 0, 0.0, 50_000, &RngSpec::new(2)).unwrap();
    assert_eq!(r.point_estimate, 1.0);
    assert!(r.ci_contains(1.0));
}

#[test]
fn hoeffding_holds_for_flat_form() {
    let n = 64;
    let v = vec![1.0 / (n as f64).sqrt(); n];
    let p: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.25 } else { -0.25 }).collect();
    let spec = LinearFormSpec::new(v, p).unwrap();
    for sigma in [1.0, 2.0, 3.0] {
        let r = hoeffding_check(&spec, sigma, 100_000, &RngSpec::new(5)).unwrap();
        assert!(r.empirical <= hoeffding_bound(sigma) + 4.0 * r.std_error, "sigma {sigma}");
        assert!((r.sample_mean - r.expected_mean).abs() < 5.0 * r.mean_std_error);
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let c = random_unit_configuration(32, 5, &RngSpec::new(6)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_evasion(&c, 30_000, &RngSpec::new(9)).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}
