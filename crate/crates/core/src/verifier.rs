//! Exhaustive verification that a configuration slices every edge of `Q_n`.
//!
//! Vertices are walked in Gray-code order inside fixed-size chunks of the
//! vertex space, so each step flips one coordinate and every plane's offset
//! `<v, u> - t` moves by `±2 v_k`. Exact planes are scaled to integers first
//! (guarded against `i64` overflow, falling back to rationals). Each edge is
//! visited once, from its endpoint with the edge's coordinate equal to `-1`.
//! Chunks are processed in parallel and merged in chunk order, so reports do
//! not depend on the worker count.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::anticonc::binomial;
use crate::cube::{offsets_cross, Configuration, CrossingMode, Edge, EdgeRecord, Hyperplane, Plane, Vertex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const VERIFY_MAX_DIM: usize = 28;
pub const UNSLICED_SAMPLE_LIMIT: usize = 100;
const CHUNK_BITS: usize = 14;
/// Integer kernels require `sum |c| + |t| + 2 max |c|` below this.
const INT_MAGNITUDE_LIMIT: i128 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicingReport {
    pub n: usize,
    pub m: usize,
    pub mode: CrossingMode,
    pub total_edges: u64,
    pub unsliced_count: u64,
    /// The first unsliced edges in `(base mask, axis)` order.
    pub unsliced_sample: Vec<EdgeRecord>,
    pub per_plane_crossings: Vec<u64>,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl SlicingReport {
    pub fn is_complete(&self) -> bool {
        self.unsliced_count == 0
    }
}

/// `ceil(n/2) * C(n, ceil(n/2))`, the most edges one hyperplane can dissect.
pub fn max_crossings_bound(n: u32) -> BigUint {
    let h = n.div_ceil(2) as u64;
    binomial(n as u64, h) * h
}

pub fn max_crossings_bound_u64(n: u32) -> Option<u64> {
    max_crossings_bound(n).to_u64()
}

/// Number of edge-plane tests an exhaustive run performs.
pub fn edge_plane_tests(n: usize, m: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    n as u128 * (1u128 << (n - 1)) * m as u128
}

fn check_dim(c: &Configuration) -> Result<()> {
    if c.dim() > VERIFY_MAX_DIM {
        return Err(Error::DimensionTooLarge { n: c.dim(), limit: VERIFY_MAX_DIM });
    }
    Ok(())
}

/// Clears denominators of an exact plane; `None` if the integers could overflow.
fn integer_plane(p: &Plane<BigRational>) -> Option<(Vec<i64>, i64)> {
    let lcm = p.coeffs().iter().chain(std::iter::once(p.threshold())).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &BigRational| -> Option<i64> { (r.numer() * (&lcm / r.denom())).to_i64() };
    let coeffs: Vec<i64> = p.coeffs().iter().map(scale).collect::<Option<_>>()?;
    let t = scale(p.threshold())?;
    let l1: i128 = coeffs.iter().map(|&c| (c as i128).abs()).sum();
    let max: i128 = coeffs.iter().map(|&c| (c as i128).abs()).max().unwrap_or(0);
    (l1 + (t as i128).abs() + 2 * max < INT_MAGNITUDE_LIMIT).then_some((coeffs, t))
}

#[derive(Default)]
struct ChunkResult {
    counts: Vec<u64>,
    unsliced: u64,
    sample: BTreeSet<(u64, usize)>,
}

impl ChunkResult {
    fn new(m: usize) -> Self {
        ChunkResult { counts: vec![0; m], ..Default::default() }
    }

    fn record_unsliced(&mut self, mask: u64, axis: usize) {
        self.unsliced += 1;
        if self.sample.len() < UNSLICED_SAMPLE_LIMIT {
            self.sample.insert((mask, axis));
        } else if let Some(&last) = self.sample.last() {
            if (mask, axis) < last {
                self.sample.pop_last();
                self.sample.insert((mask, axis));
            }
        }
    }
}

#[inline]
fn int_cross(s1: i64, s2: i64, mode: CrossingMode) -> bool {
    let strict = (s1 < 0 && s2 > 0) || (s1 > 0 && s2 < 0);
    match mode {
        CrossingMode::Strict => strict,
        CrossingMode::Relaxed => strict || ((s1 == 0) != (s2 == 0)),
    }
}

/// Integer kernel over one chunk. `twice` is laid out `[k * m + l] = 2 c_{l,k}`.
fn int_chunk(
    n: usize,
    chunk_bits: usize,
    chunk: u64,
    planes: &[(Vec<i64>, i64)],
    twice: &[i64],
    mode: CrossingMode,
) -> ChunkResult {
    let m = planes.len();
    let mut out = ChunkResult::new(m);
    let mut mask = chunk << chunk_bits;
    let mut s: Vec<i64> = planes
        .iter()
        .map(|(c, t)| {
            let dot: i64 = c.iter().enumerate().map(|(i, &ci)| if mask >> i & 1 == 1 { ci } else { -ci }).sum();
            dot - t
        })
        .collect();
    for step in 0u64..(1u64 << chunk_bits) {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            let row = &twice[bit * m..(bit + 1) * m];
            if mask >> bit & 1 == 1 {
                s.iter_mut().zip(row).for_each(|(x, d)| *x += d);
            } else {
                s.iter_mut().zip(row).for_each(|(x, d)| *x -= d);
            }
        }
        for k in 0..n {
            if mask >> k & 1 == 1 {
                continue;
            }
            let row = &twice[k * m..(k + 1) * m];
            let mut sliced = false;
            for l in 0..m {
                if int_cross(s[l], s[l] + row[l], mode) {
                    out.counts[l] += 1;
                    sliced = true;
                }
            }
            if !sliced {
                out.record_unsliced(mask, k);
            }
        }
    }
    out
}

/// `<v, u> - t` for a mask vertex, summed in coordinate order like [`Plane::offset`].
fn mask_offset<T: Scalar>(p: &Plane<T>, mask: u64) -> T {
    let mut acc = T::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = acc + c.clone();
        } else {
            acc = acc - c.clone();
        }
    }
    acc - p.threshold().clone()
}

fn plane_edge_crosses<T: Scalar>(p: &Plane<T>, s: &T, k: usize, mode: CrossingMode) -> bool {
    let vk = p.coeffs()[k].clone();
    let s2 = s.clone() + vk.clone() + vk;
    offsets_cross(s, &s2, p.zero_tolerance(), mode)
}

enum GenericPlane {
    Exact(Plane<BigRational>),
    Float(Plane<f64>),
}

enum GenericOffset {
    Exact(BigRational),
    Float(f64),
}

/// Fallback kernel for float planes and exact planes too large for `i64`.
fn generic_chunk(n: usize, chunk_bits: usize, chunk: u64, planes: &[GenericPlane], mode: CrossingMode) -> ChunkResult {
    let mut out = ChunkResult::new(planes.len());
    let mut mask = chunk << chunk_bits;
    for step in 0u64..(1u64 << chunk_bits) {
        if step > 0 {
            mask ^= 1 << step.trailing_zeros();
        }
        let offsets: Vec<GenericOffset> = planes
            .iter()
            .map(|p| match p {
                GenericPlane::Exact(p) => GenericOffset::Exact(mask_offset(p, mask)),
                GenericPlane::Float(p) => GenericOffset::Float(mask_offset(p, mask)),
            })
            .collect();
        for k in (0..n).filter(|&k| mask >> k & 1 == 0) {
            let mut sliced = false;
            for (l, (p, s)) in planes.iter().zip(&offsets).enumerate() {
                let crosses = match (p, s) {
                    (GenericPlane::Exact(p), GenericOffset::Exact(s)) => plane_edge_crosses(p, s, k, mode),
                    (GenericPlane::Float(p), GenericOffset::Float(s)) => plane_edge_crosses(p, s, k, mode),
                    _ => unreachable!("offset kind follows plane kind"),
                };
                if crosses {
                    out.counts[l] += 1;
                    sliced = true;
                }
            }
            if !sliced {
                out.record_unsliced(mask, k);
            }
        }
    }
    out
}

fn merge(n: usize, c: &Configuration, parts: Vec<ChunkResult>, started: Instant) -> SlicingReport {
    let m = c.len();
    let mut counts = vec![0u64; m];
    let mut unsliced = 0;
    let mut sample = BTreeSet::new();
    for part in parts {
        counts.iter_mut().zip(&part.counts).for_each(|(a, b)| *a += b);
        unsliced += part.unsliced;
        sample.extend(part.sample);
    }
    let unsliced_sample = sample
        .into_iter()
        .take(UNSLICED_SAMPLE_LIMIT)
        .map(|(mask, axis)| {
            let base = Vertex::from_mask(n, mask).expect("mask within dimension");
            EdgeRecord::from(&Edge::new(base, axis).expect("axis within dimension"))
        })
        .collect();
    SlicingReport {
        n,
        m,
        mode: c.mode(),
        total_edges: n as u64 * (1u64 << (n - 1)),
        unsliced_count: unsliced,
        unsliced_sample,
        per_plane_crossings: counts,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

/// Tests every edge against every plane under the configuration's mode.
///
/// Runs on the current rayon pool; results are identical for any pool size.
pub fn verify_slicing(c: &Configuration) -> Result<SlicingReport> {
    check_dim(c)?;
    let started = Instant::now();
    let n = c.dim();
    let chunk_bits = n.min(CHUNK_BITS);
    let chunks = 1u64 << (n - chunk_bits);
    let mode = c.mode();
    let ints: Option<Vec<(Vec<i64>, i64)>> = c
        .planes()
        .iter()
        .map(|p| match p {
            Hyperplane::Exact(p) => integer_plane(p),
            Hyperplane::Float(_) => None,
        })
        .collect();
    let parts: Vec<ChunkResult> = match ints {
        Some(planes) => {
            let m = planes.len();
            let mut twice = vec![0i64; n * m];
            for (l, (coeffs, _)) in planes.iter().enumerate() {
                for (k, &ck) in coeffs.iter().enumerate() {
                    twice[k * m + l] = 2 * ck;
                }
            }
            (0..chunks).into_par_iter().map(|chunk| int_chunk(n, chunk_bits, chunk, &planes, &twice, mode)).collect()
        }
        None => {
            let planes: Vec<GenericPlane> = c
                .planes()
                .iter()
                .map(|p| match p {
                    Hyperplane::Exact(p) => GenericPlane::Exact(p.clone()),
                    Hyperplane::Float(p) => GenericPlane::Float(p.clone()),
                })
                .collect();
            (0..chunks).into_par_iter().map(|chunk| generic_chunk(n, chunk_bits, chunk, &planes, mode)).collect()
        }
    };
    Ok(merge(n, c, parts, started))
}

/// Reference implementation: a plain double loop over canonical edges and
/// planes through [`Hyperplane::crosses`].
pub fn verify_slicing_naive(c: &Configuration) -> Result<SlicingReport> {
    check_dim(c)?;
    let started = Instant::now();
    let n = c.dim();
    let mut part = ChunkResult::new(c.len());
    for mask in 0u64..(1u64 << n) {
        for k in (0..n).filter(|&k| mask >> k & 1 == 0) {
            let e = Edge::new(Vertex::from_mask(n, mask)?, k)?;
            let mut sliced = false;
            for (l, p) in c.planes().iter().enumerate() {
                if p.crosses(&e, c.mode())? {
                    part.counts[l] += 1;
                    sliced = true;
                }
            }
            if !sliced {
                part.record_unsliced(mask, k);
            }
        }
    }
    Ok(merge(n, c, vec![part], started))
}

/// Number of edges crossing each plane.
pub fn crossing_counts(c: &Configuration) -> Result<Vec<u64>> {
    let report = verify_slicing(c)?;
    debug_assert!(
        c.mode() == CrossingMode::Relaxed
            || report.per_plane_crossings.iter().all(|&x| BigUint::from(x) <= max_crossings_bound(c.dim() as u32)),
        "a plane exceeded the counting bound"
    );
    Ok(report.per_plane_crossings)
}
