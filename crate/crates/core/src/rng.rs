//! The fixed generator behind every random draw in the crate.
//!
//! xoshiro256** seeded through SplitMix64 (`seed_from_u64`), so a given seed
//! reproduces the same instance and starting point on every platform.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub type BenchRng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> BenchRng {
    BenchRng::seed_from_u64(seed)
}

/// Independent stream for a `(seed, purpose)` pair.
pub fn stream(seed: u64, purpose: u64) -> BenchRng {
    BenchRng::seed_from_u64(seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Stream tags used by the harness.
pub mod purpose {
    pub const START_POINT: u64 = 1;
    pub const OPTIMIZER: u64 = 2;
}
