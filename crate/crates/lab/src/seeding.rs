//! Per-trial random streams and the ordered parallel map the campaigns run on.
//!
//! Every trial owns a generator derived from `(seed, path)` alone, so the
//! numbers it sees do not depend on which worker runs it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::error::{LabError, LabResult};

/// Generator for the trial addressed by `path` (e.g. `[state, repetition]`).
///
/// Each path element selects a ChaCha stream of the current generator and the
/// next 32 bytes of that stream become the key of the child.
pub fn rng_for(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &k in path {
        rng.set_stream(k);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        rng = ChaCha8Rng::from_seed(key);
    }
    rng
}

/// `(0..n).map(f)` on `workers` threads; results come back in index order.
pub fn par_map<T, F>(workers: usize, n: u64, f: F) -> LabResult<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> LabResult<T> + Sync + Send,
{
    let pool = ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}
