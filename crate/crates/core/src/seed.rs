//! Seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed plus a fixed stream id, so symbols, channel taps and noise of
//! the same trial are independent yet individually reproducible. Trial seeds
//! are a pure function of `(master_seed, n, k, trial)` and never depend on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the independent per-trial components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Symbols = 1,
    Channel = 2,
    Noise = 3,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one Monte Carlo trial.
pub fn trial_seed(master_seed: u64, n: usize, k: usize, trial: u64) -> u64 {
    [n as u64, k as u64, trial]
        .into_iter()
        .fold(splitmix64(master_seed), |acc, v| splitmix64(acc ^ v))
}
