//! Seeding.
//!
//! Every random stream is a ChaCha8 keystream (counter-based) whose key is
//! derived from a root seed and a path of integer labels. Trials therefore
//! never share state and can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Labels separating the independent streams used inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Samples = 0x5341_4d50,
    Folds = 0x464f_4c44,
    GHat = 0x4748_4154,
    Subsample = 0x5355_4253,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a path of labels.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(parent), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// Seed for one `(n, trial)` cell of a sweep.
pub fn trial_seed(root: u64, n: usize, trial: usize) -> u64 {
    derive_seed(root, &[n as u64, trial as u64])
}

/// Seed for one purpose within a trial.
pub fn purpose_seed(seed: u64, purpose: Purpose) -> u64 {
    derive_seed(seed, &[purpose as u64])
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn purpose_stream(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    stream(purpose_seed(seed, purpose))
}
