use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{Configuration, CrossingMode, Hyperplane};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::verifier::{verify_slicing, SlicingReport};

/// Largest dimension accepted by the search.
pub const SEARCH_MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Coefficients range over `[-coeff_range, coeff_range]` and thresholds
    /// over `[-coeff_range * n, coeff_range * n]`.
    pub coeff_range: i64,
    pub replicas: usize,
    pub mode: CrossingMode,
    pub t_start: f64,
    pub t_end: f64,
    /// Accepted moves without a new best before jumping back to the best state.
    pub stagnation: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            coeff_range: 8,
            replicas: 1,
            mode: CrossingMode::Strict,
            t_start: 2.0,
            t_end: 0.05,
            stagnation: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    #[serde(skip)]
    pub config: Configuration,
    pub coeffs: Vec<Vec<i64>>,
    pub thresholds: Vec<i64>,
    /// Number of edges left unsliced by the best configuration.
    pub objective: u64,
    pub replica: usize,
    pub iterations: u64,
    pub restarts: u64,
    pub report: SlicingReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct IntPlane {
    coeffs: Vec<i64>,
    threshold: i64,
}

/// Edge-incidence tables for `Q_n` with canonical edges packed into bitsets.
struct EdgeTable {
    n: usize,
    /// `(mask, axis)` with bit `axis` of `mask` clear.
    edges: Vec<(u32, usize)>,
    words: usize,
    mode: CrossingMode,
}

impl EdgeTable {
    fn new(n: usize, mode: CrossingMode) -> Self {
        let edges: Vec<(u32, usize)> = (0..1u32 << n)
            .flat_map(|mask| (0..n).filter(move |&k| mask >> k & 1 == 0).map(move |k| (mask, k)))
            .collect();
        let words = edges.len().div_ceil(64);
        EdgeTable { n, edges, words, mode }
    }

    fn crossing_bits(&self, p: &IntPlane) -> Vec<u64> {
        let offsets: Vec<i64> = (0..1u32 << self.n)
            .map(|mask| {
                let dot: i64 = (0..self.n).map(|i| if mask >> i & 1 == 1 { p.coeffs[i] } else { -p.coeffs[i] }).sum();
                dot - p.threshold
            })
            .collect();
        let mut bits = vec![0u64; self.words];
        for (idx, &(mask, k)) in self.edges.iter().enumerate() {
            let (s, s2) = (offsets[mask as usize], offsets[(mask | 1 << k) as usize]);
            let cross = match self.mode {
                CrossingMode::Strict => s.signum() * s2.signum() < 0,
                CrossingMode::Relaxed => s.signum() * s2.signum() < 0 || (s == 0) != (s2 == 0),
            };
            if cross {
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
        bits
    }

    fn unsliced(&self, bits: &[Vec<u64>]) -> u64 {
        let covered: u64 =
            (0..self.words).map(|w| bits.iter().fold(0u64, |acc, b| acc | b[w]).count_ones() as u64).sum();
        self.edges.len() as u64 - covered
    }
}

struct Annealer<'a> {
    table: &'a EdgeTable,
    opts: &'a SearchOptions,
    rng: ChaCha8Rng,
}

impl Annealer<'_> {
    fn random_plane(&mut self) -> IntPlane {
        let r = self.opts.coeff_range;
        let n = self.table.n;
        loop {
            let coeffs: Vec<i64> = (0..n).map(|_| self.rng.random_range(-r..=r)).collect();
            if coeffs.iter().any(|&c| c != 0) {
                let t = self.rng.random_range(-r * n as i64..=r * n as i64);
                return IntPlane { coeffs, threshold: t };
            }
        }
    }

    /// Proposes a modified copy of `p`, or `None` if the move would zero it.
    fn propose(&mut self, p: &IntPlane) -> Option<IntPlane> {
        let r = self.opts.coeff_range;
        let tmax = r * self.table.n as i64;
        let mut q = p.clone();
        let roll: f64 = self.rng.random();
        if roll < 0.6 {
            let k = self.rng.random_range(0..self.table.n);
            let delta = [-2, -1, 1, 2][self.rng.random_range(0..4)];
            q.coeffs[k] = (q.coeffs[k] + delta).clamp(-r, r);
        } else if roll < 0.9 {
            let delta = if self.rng.random::<bool>() { 1 } else { -1 };
            q.threshold = (q.threshold + delta).clamp(-tmax, tmax);
        } else {
            q = self.random_plane();
        }
        (q != *p && q.coeffs.iter().any(|&c| c != 0)).then_some(q)
    }

    fn run(mut self, m: usize, iters: u64) -> (Vec<IntPlane>, u64, u64, u64) {
        let mut planes: Vec<IntPlane> = (0..m).map(|_| self.random_plane()).collect();
        let mut bits: Vec<Vec<u64>> = planes.iter().map(|p| self.table.crossing_bits(p)).collect();
        let mut current = self.table.unsliced(&bits);
        let (mut best, mut best_planes) = (current, planes.clone());
        let (mut stale, mut restarts, mut done) = (0u64, 0u64, 0u64);
        let ratio = self.opts.t_end / self.opts.t_start;
        while done < iters && best > 0 {
            let temp = self.opts.t_start * ratio.powf(done as f64 / iters as f64);
            done += 1;
            let l = self.rng.random_range(0..m);
            let Some(candidate) = self.propose(&planes[l]) else { continue };
            let cand_bits = self.table.crossing_bits(&candidate);
            let old_bits = std::mem::replace(&mut bits[l], cand_bits);
            let next = self.table.unsliced(&bits);
            let delta = next as f64 - current as f64;
            if delta <= 0.0 || self.rng.random::<f64>() < (-delta / temp).exp() {
                planes[l] = candidate;
                current = next;
                if current < best {
                    best = current;
                    best_planes = planes.clone();
                    stale = 0;
                } else {
                    stale += 1;
                }
            } else {
                bits[l] = old_bits;
            }
            if stale >= self.opts.stagnation {
                planes = best_planes.clone();
                bits = planes.iter().map(|p| self.table.crossing_bits(p)).collect();
                current = best;
                stale = 0;
                restarts += 1;
            }
        }
        (best_planes, best, done, restarts)
    }
}

/// Simulated annealing over integer configurations of `m` planes in `Q_n`,
/// minimizing the number of unsliced edges.
pub fn local_search_slicing(n: usize, m: usize, iters: u64, rng: &RngSpec) -> Result<(Configuration, SlicingReport)> {
    let out = local_search_slicing_with(n, m, iters, rng, &SearchOptions::default())?;
    Ok((out.config, out.report))
}

/// Runs `opts.replicas` independent chains in parallel (replica `r` seeded by
/// `rng.child(r)`) and keeps the best, breaking ties by replica index.
pub fn local_search_slicing_with(
    n: usize,
    m: usize,
    iters: u64,
    rng: &RngSpec,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if n == 0 {
        return Err(Error::DimensionZero);
    }
    if n > SEARCH_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, limit: SEARCH_MAX_DIM });
    }
    if m == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if opts.coeff_range < 1 || opts.replicas == 0 {
        return Err(Error::InvalidArgument("coeff_range and replicas must be positive".into()));
    }
    if !(opts.t_start > 0.0 && opts.t_end > 0.0 && opts.t_start.is_finite() && opts.t_end.is_finite()) {
        return Err(Error::InvalidArgument("temperatures must be positive and finite".into()));
    }
    let table = EdgeTable::new(n, opts.mode);
    let runs: Vec<_> = (0..opts.replicas)
        .into_par_iter()
        .map(|r| Annealer { table: &table, opts, rng: rng.child(r as u64).rng() }.run(m, iters))
        .collect();
    let (replica, (planes, objective, iterations, restarts)) =
        runs.into_iter().enumerate().min_by_key(|(i, run)| (run.1, *i)).expect("at least one replica");
    let hyperplanes =
        planes.iter().map(|p| Hyperplane::from_ints(&p.coeffs, p.threshold)).collect::<Result<Vec<_>>>()?;
    let config = Configuration::new(n, hyperplanes, opts.mode)?;
    let report = verify_slicing(&config)?;
    debug_assert_eq!(report.unsliced_count, objective);
    Ok(SearchOutcome {
        config,
        coeffs: planes.iter().map(|p| p.coeffs.clone()).collect(),
        thresholds: planes.iter().map(|p| p.threshold).collect(),
        objective,
        replica,
        iterations,
        restarts,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_slicing_of_q3() {
        let (c, report) = local_search_slicing(3, 3, 10_000, &RngSpec::new(1)).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(report.unsliced_count, 0);
    }

    #[test]
    fn single_plane_in_q2_leaves_two_edges() {
        let (_, report) = local_search_slicing(2, 1, 5_000, &RngSpec::new(2)).unwrap();
        assert_eq!(report.unsliced_count, 2);
    }

    #[test]
    fn objective_matches_verifier() {
        let opts = SearchOptions { replicas: 3, ..Default::default() };
        let out = local_search_slicing_with(5, 2, 2_000, &RngSpec::new(9), &opts).unwrap();
        assert_eq!(out.report.unsliced_count, out.objective);
        let again = local_search_slicing_with(5, 2, 2_000, &RngSpec::new(9), &opts).unwrap();
        assert_eq!((again.coeffs, again.thresholds), (out.coeffs, out.thresholds));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(local_search_slicing(9, 2, 10, &RngSpec::new(0)), Err(Error::DimensionTooLarge { .. })));
        assert!(matches!(local_search_slicing(3, 0, 10, &RngSpec::new(0)), Err(Error::EmptyConfiguration)));
    }
}
