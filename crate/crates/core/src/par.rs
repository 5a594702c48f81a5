//! Deterministic batching over seeded substreams.
//!
//! Work is cut into fixed-size batches, batch `b` draws from
//! `rng.child(b)`, and results come back in batch order. The output depends
//! only on `(samples, rng)`, never on the worker count.

use rayon::prelude::*;

use crate::rng::RngSpec;

/// Samples per batch for Monte Carlo loops.
pub const BATCH_SIZE: u64 = 4096;

/// Runs `f(child_spec, batch_len)` for every batch and returns the results in
/// batch order.
pub fn map_batches<R, F>(samples: u64, rng: &RngSpec, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(RngSpec, u64) -> R + Sync,
{
    let batches = samples.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            f(rng.child(b), len)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_lengths_cover_samples() {
        let lens = map_batches(10_000, &RngSpec::new(0), |_, len| len);
        assert_eq!(lens, vec![4096, 4096, 1808]);
        assert!(map_batches(0, &RngSpec::new(0), |_, len| len).is_empty());
    }
}
