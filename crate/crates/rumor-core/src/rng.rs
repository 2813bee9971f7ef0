//! Seeded randomness.
//!
//! All stochastic code uses [`Xoshiro256PlusPlus`] seeded through
//! `SeedableRng::seed_from_u64`, so a `(seed, input)` pair always reproduces
//! the same output on every platform.

use rand::{Rng, SeedableRng};
pub use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator used throughout the crate.
pub type SimRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed derived from a master seed and the trial index. Trial `k`
/// gets the same stream regardless of how many trials are run.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix64(mix64(master) ^ mix64(trial.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Exp(rate) sample by inversion.
#[inline]
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -libm::log1p(-u) / rate
}
