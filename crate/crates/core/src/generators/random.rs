use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// `p` groups of `r` tools and `k` scenarios with costs drawn uniformly from
/// `0..=cost_max`, row by row. Identical arguments give identical instances.
pub fn gen_random(p: usize, r: usize, k: usize, cost_max: u64, seed: u64) -> Result<Instance> {
    if p == 0 || r == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "random instance needs positive p, r, K (got {p}, {r}, {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p * r;
    let costs = (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=cost_max)).collect())
        .collect();
    Instance::with_group_sizes(&vec![r; p], costs)
}
