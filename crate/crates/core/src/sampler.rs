//! The random bias vector, the product measure `mu_p`, and evasive edges.
//!
//! The dyadic bias is
//!
//! ```text
//!     P = 1 / (c * sqrt(m * log n)) * sum_l sum_{j in J_l} alpha_{l j} 2^j v_l^(j)
//! ```
//!
//! with `alpha_{l j}` independent uniform on `[-1, 1]` and `c = 10` by default.
//! An evasive edge draws `P` conditioned on `|P|_inf <= 1/2` (by rejection),
//! then `U ~ mu_P` and a uniform axis `k`.

use rand::Rng;
use serde::Serialize;

use crate::cube::{Configuration, Edge, Plane, Vertex};
use crate::decomp::binary_decompose;
use crate::error::{Error, Result};
use crate::rng::RngSpec;

/// Largest allowed deviation of a sampler plane's norm from one.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Binary,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Binary => x.log2(),
        }
    }
}

/// Knobs of the dyadic bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasParams {
    /// The constant `c` in the prefactor.
    pub damping: f64,
    pub log_base: LogBase,
    /// Conditioning keeps draws with `|P|_inf <= linf_cap`.
    pub linf_cap: f64,
    pub max_retries: usize,
}

impl Default for BiasParams {
    fn default() -> Self {
        BiasParams { damping: 10.0, log_base: LogBase::Natural, linf_cap: 0.5, max_retries: 1000 }
    }
}

/// One recorded multiplier. `scale` is `None` for the single-scale variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasDraw {
    pub plane: usize,
    pub scale: Option<i32>,
    pub alpha: f64,
}

/// A realization of the bias together with the multipliers that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasVector {
    pub p: Vec<f64>,
    pub draws: Vec<BiasDraw>,
    pub conditioned: bool,
    /// Set by the single-scale variant when some coordinate left `[-1, 1]`
    /// and was clamped.
    pub clamped: bool,
}

impl BiasVector {
    pub fn linf(&self) -> f64 {
        linf(&self.p)
    }
}

pub(crate) fn linf(p: &[f64]) -> f64 {
    p.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Checks that every plane has unit norm and returns the common dimension.
fn check_unit_planes(planes: &[Plane<f64>]) -> Result<usize> {
    let first = planes.first().ok_or(Error::EmptyConfiguration)?;
    let n = first.dim();
    for (index, p) in planes.iter().enumerate() {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        let norm = p.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::UnnormalizedPlane { index, norm });
        }
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    Ok(n)
}

#[derive(Debug, Clone)]
struct BiasTerm {
    plane: usize,
    scale: i32,
    indices: Vec<usize>,
    /// `2^j v_k` for `k` in `K(j)`, each in `(1/2, 1]` in magnitude.
    values: Vec<f64>,
}

/// Draws `alpha` with `alpha ~ U[-1, 1]`.
#[inline]
fn draw_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Repeats `draw` until `accept` holds, at most `1 + max_retries` times.
pub fn rejection_sample<T>(max_retries: usize, mut draw: impl FnMut() -> T, accept: impl Fn(&T) -> bool) -> Result<T> {
    for _ in 0..=max_retries {
        let x = draw();
        if accept(&x) {
            return Ok(x);
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

/// Sampler for the dyadic bias of a fixed set of unit planes.
#[derive(Debug, Clone)]
pub struct BiasSampler {
    n: usize,
    m: usize,
    params: BiasParams,
    prefactor: f64,
    terms: Vec<BiasTerm>,
}

impl BiasSampler {
    pub fn new(planes: &[Plane<f64>], params: BiasParams) -> Result<Self> {
        let n = check_unit_planes(planes)?;
        let m = planes.len();
        let prefactor = 1.0 / (params.damping * (m as f64 * params.log_base.log(n as f64)).sqrt());
        let mut terms = Vec::new();
        for (plane, p) in planes.iter().enumerate() {
            let d = binary_decompose(p.coeffs())?;
            for (&scale, part) in d.parts() {
                let factor = 2f64.powi(scale);
                terms.push(BiasTerm {
                    plane,
                    scale,
                    indices: part.indices.clone(),
                    values: part.values.iter().map(|v| v * factor).collect(),
                });
            }
        }
        Ok(BiasSampler { n, m, params, prefactor, terms })
    }

    /// Normalizes float copies of the configuration's planes first.
    pub fn from_configuration(c: &Configuration, params: BiasParams) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        BiasSampler::new(&c.unit_planes()?, params)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn planes(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> &BiasParams {
        &self.params
    }

    /// `1 / (c sqrt(m log n))`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Total number of multipliers, `sum_l |J_l|`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Writes one unconditioned draw into `out` without recording multipliers.
    pub fn sample_values<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        out.fill(0.0);
        for t in &self.terms {
            let alpha = draw_alpha(rng);
            for (&i, &v) in t.indices.iter().zip(&t.values) {
                out[i] += alpha * v;
            }
        }
        for x in out.iter_mut() {
            *x *= self.prefactor;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BiasVector {
        let mut p = vec![0.0; self.n];
        let mut draws = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let alpha = draw_alpha(rng);
            draws.push(BiasDraw { plane: t.plane, scale: Some(t.scale), alpha });
            for (&i, &v) in t.indices.iter().zip(&t.values) {
                p[i] += alpha * v;
            }
        }
        for x in p.iter_mut() {
            *x *= self.prefactor;
        }
        BiasVector { p, draws, conditioned: false, clamped: false }
    }

    pub fn sample_conditioned<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BiasVector> {
        let cap = self.params.linf_cap;
        let mut b = rejection_sample(self.params.max_retries, || self.sample(rng), |b| b.linf() <= cap)?;
        b.conditioned = true;
        Ok(b)
    }

    /// Conditioned draw into `out`; returns the number of rejected attempts.
    pub fn sample_conditioned_values<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<usize> {
        for attempt in 0..=self.params.max_retries {
            self.sample_values(rng, out);
            if linf(out) <= self.params.linf_cap {
                return Ok(attempt);
            }
        }
        Err(Error::RetriesExhausted { retries: self.params.max_retries })
    }
}

/// Single-scale bias `P = sum_l alpha_l sqrt(n/m) v_l`, clamped to `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct SimpleBiasSampler {
    n: usize,
    scale: f64,
    planes: Vec<Vec<f64>>,
}

impl SimpleBiasSampler {
    pub fn new(planes: &[Plane<f64>]) -> Result<Self> {
        let n = check_unit_planes(planes)?;
        let m = planes.len();
        Ok(SimpleBiasSampler {
            n,
            scale: (n as f64 / m as f64).sqrt(),
            planes: planes.iter().map(|p| p.coeffs().to_vec()).collect(),
        })
    }

    pub fn from_configuration(c: &Configuration) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        SimpleBiasSampler::new(&c.unit_planes()?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BiasVector {
        let mut p = vec![0.0; self.n];
        let mut draws = Vec::with_capacity(self.planes.len());
        for (plane, v) in self.planes.iter().enumerate() {
            let alpha = draw_alpha(rng);
            draws.push(BiasDraw { plane, scale: None, alpha });
            for (x, c) in p.iter_mut().zip(v) {
                *x += alpha * self.scale * c;
            }
        }
        let mut clamped = false;
        for x in p.iter_mut() {
            if x.abs() > 1.0 {
                clamped = true;
                *x = x.clamp(-1.0, 1.0);
            }
        }
        BiasVector { p, draws, conditioned: false, clamped }
    }
}

fn check_bias(p: &[f64]) -> Result<()> {
    match p.iter().position(|x| x.is_nan() || x.abs() > 1.0) {
        Some(index) => Err(Error::BiasOutOfRange { index, value: p[index] }),
        None => Ok(()),
    }
}

/// Fills `out` with `±1` drawn from `mu_p` (no range check).
#[inline]
pub(crate) fn fill_mu<R: Rng + ?Sized>(p: &[f64], rng: &mut R, out: &mut [f64]) {
    for (o, &pi) in out.iter_mut().zip(p) {
        let u: f64 = rng.random();
        *o = if u < (1.0 + pi) / 2.0 { 1.0 } else { -1.0 };
    }
}

/// Draws `z ~ mu_p`: independent coordinates with `Pr[z_i = 1] = (1 + p_i) / 2`.
pub fn draw_mu<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Result<Vertex> {
    check_bias(p)?;
    Ok(Vertex::from_bools(p.iter().map(|&pi| {
        let u: f64 = rng.random();
        u < (1.0 + pi) / 2.0
    })))
}

/// Evasive-edge sampler: conditioned bias, `U ~ mu_P`, uniform axis.
#[derive(Debug, Clone)]
pub struct EvasiveSampler {
    bias: BiasSampler,
}

impl EvasiveSampler {
    pub fn new(bias: BiasSampler) -> Self {
        EvasiveSampler { bias }
    }

    pub fn from_configuration(c: &Configuration, params: BiasParams) -> Result<Self> {
        Ok(EvasiveSampler { bias: BiasSampler::from_configuration(c, params)? })
    }

    pub fn bias(&self) -> &BiasSampler {
        &self.bias
    }

    /// Draws into scratch buffers: `p` receives the bias, `u` the base vertex
    /// as `±1.0`; returns the axis.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, p: &mut [f64], u: &mut [f64]) -> Result<usize> {
        self.bias.sample_conditioned_values(rng, p)?;
        fill_mu(p, rng, u);
        Ok(rng.random_range(0..self.bias.dim()))
    }

    pub fn sample_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Edge> {
        let n = self.bias.dim();
        let (mut p, mut u) = (vec![0.0; n], vec![0.0; n]);
        let k = self.sample_into(rng, &mut p, &mut u)?;
        Edge::new(Vertex::from_bools(u.iter().map(|&x| x > 0.0)), k)
    }
}

pub fn sample_bias(c: &Configuration, rng: &RngSpec) -> Result<BiasVector> {
    Ok(BiasSampler::from_configuration(c, BiasParams::default())?.sample(&mut rng.rng()))
}

pub fn sample_bias_conditioned(c: &Configuration, rng: &RngSpec, max_retries: usize) -> Result<BiasVector> {
    let params = BiasParams { max_retries, ..BiasParams::default() };
    BiasSampler::from_configuration(c, params)?.sample_conditioned(&mut rng.rng())
}

pub fn sample_bias_simple(c: &Configuration, rng: &RngSpec) -> Result<BiasVector> {
    Ok(SimpleBiasSampler::from_configuration(c)?.sample(&mut rng.rng()))
}

pub fn sample_mu(p: &[f64], rng: &RngSpec) -> Result<Vertex> {
    draw_mu(p, &mut rng.rng())
}

pub fn sample_evasive_edge(c: &Configuration, rng: &RngSpec) -> Result<Edge> {
    EvasiveSampler::from_configuration(c, BiasParams::default())?.sample_edge(&mut rng.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{CrossingMode, Hyperplane};

    fn e1_config(n: usize, t: f64) -> Configuration {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        Configuration::new(n, vec![Hyperplane::float(v, t).unwrap()], CrossingMode::Strict).unwrap()
    }

    #[test]
    fn single_axis_plane_bias_is_one_uniform_coordinate() {
        let c = e1_config(8, 0.0);
        let bound = 1.0 / (10.0 * 8f64.ln().sqrt());
        let s = BiasSampler::from_configuration(&c, BiasParams::default()).unwrap();
        assert_eq!(s.term_count(), 1);
        let mut rng = RngSpec::new(1).rng();
        for _ in 0..1000 {
            let b = s.sample(&mut rng);
            assert!(b.p[1..].iter().all(|&x| x == 0.0));
            assert!(b.p[0].abs() <= bound);
            assert_eq!(b.draws.len(), 1);
            assert_eq!(b.p[0], b.draws[0].alpha * bound);
        }
    }

    #[test]
    fn recorded_and_unrecorded_paths_agree() {
        let c = crate::cube::construction(crate::cube::ConstructionKind::MiddleLayers, 6, crate::Arithmetic::Float)
            .unwrap();
        let s = BiasSampler::from_configuration(&c, BiasParams::default()).unwrap();
        let b = s.sample(&mut RngSpec::new(3).rng());
        let mut out = vec![0.0; 6];
        s.sample_values(&mut RngSpec::new(3).rng(), &mut out);
        assert_eq!(b.p, out);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = e1_config(1, 0.0);
        assert_eq!(sample_bias(&c, &RngSpec::new(0)).unwrap_err(), Error::DimensionTooSmall(1));
        let planes = vec![Plane::<f64>::new(vec![1.0, 1.0], 0.0).unwrap()];
        assert!(matches!(
            BiasSampler::new(&planes, BiasParams::default()),
            Err(Error::UnnormalizedPlane { index: 0, .. })
        ));
        let empty = Configuration::new(3, vec![], CrossingMode::Strict).unwrap();
        assert_eq!(sample_bias(&empty, &RngSpec::new(0)).unwrap_err(), Error::EmptyConfiguration);
    }

    #[test]
    fn conditioned_sampler_never_rejects_single_axis_plane() {
        let c = e1_config(8, 0.0);
        let s = BiasSampler::from_configuration(&c, BiasParams { max_retries: 0, ..Default::default() }).unwrap();
        let mut rng = RngSpec::new(9).rng();
        for _ in 0..1000 {
            let b = s.sample_conditioned(&mut rng).unwrap();
            assert!(b.conditioned && b.linf() <= 0.5);
        }
    }

    #[test]
    fn forced_rejection_exhausts_retries() {
        let mut calls = 0;
        let r = rejection_sample(0, || calls += 1, |_| false);
        assert_eq!(r, Err(Error::RetriesExhausted { retries: 0 }));
        assert_eq!(calls, 1);
        let c = e1_config(8, 0.0);
        let params = BiasParams { linf_cap: -1.0, max_retries: 0, ..Default::default() };
        let s = BiasSampler::from_configuration(&c, params).unwrap();
        assert!(matches!(s.sample_conditioned(&mut RngSpec::new(0).rng()), Err(Error::RetriesExhausted { .. })));
    }

    #[test]
    fn simple_variant_on_axes_is_plain_uniform() {
        let c = crate::cube::construction(crate::cube::ConstructionKind::Axis, 5, crate::Arithmetic::Float).unwrap();
        let b = sample_bias_simple(&c, &RngSpec::new(4)).unwrap();
        let alphas: Vec<f64> = b.draws.iter().map(|d| d.alpha).collect();
        assert_eq!(b.p, alphas);
        assert!(!b.clamped);
    }

    #[test]
    fn mu_degenerate_and_invalid_bias() {
        let v = sample_mu(&[1.0; 5], &RngSpec::new(2)).unwrap();
        assert_eq!(v.signs(), vec![1; 5]);
        let v = sample_mu(&[-1.0; 5], &RngSpec::new(2)).unwrap();
        assert_eq!(v.signs(), vec![-1; 5]);
        assert!(matches!(sample_mu(&[0.0, 1.5], &RngSpec::new(2)), Err(Error::BiasOutOfRange { index: 1, .. })));
        assert!(matches!(sample_mu(&[f64::NAN], &RngSpec::new(2)), Err(Error::BiasOutOfRange { .. })));
    }

    #[test]
    fn far_plane_is_never_crossed() {
        let c = e1_config(8, 2.0);
        let s = EvasiveSampler::from_configuration(&c, BiasParams::default()).unwrap();
        let mut rng = RngSpec::new(5).rng();
        for _ in 0..2000 {
            let e = s.sample_edge(&mut rng).unwrap();
            assert!(!c.planes()[0].crosses(&e, CrossingMode::Strict).unwrap());
        }
    }
}
