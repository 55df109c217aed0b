//! Shared fixtures for the criterion benchmarks.

use psdeq_core::matcore::generate::{random_pd, random_psd, rng_for};
use psdeq_core::SymMatrix;

/// Well-conditioned `(A, B)` with `A > 0`, `B ⩾ 0`, deterministic in `seed`.
pub fn fixture(dim: usize, seed: u64) -> (SymMatrix, SymMatrix) {
    let mut rng = rng_for(seed, 0);
    let a = random_pd(&mut rng, dim, 0.5, 4.0);
    let b = random_psd(&mut rng, dim, dim);
    (a, b)
}
