//! Seeded random streams.
//!
//! Every stochastic component draws from its own ChaCha stream derived from
//! the trial seed, so adding draws in one component never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent substreams of one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    World = 1,
    Fisheye = 2,
    Rgbd = 3,
    Registration = 4,
    BankSampling = 5,
    Identity = 6,
}

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

/// Stream for an arbitrary sub-key, e.g. one identity profile per participant.
pub fn keyed(seed: u64, which: Stream, key: u64) -> SimRng {
    let mixed = splitmix64(seed ^ splitmix64(key.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    stream(mixed, which)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
