//! The single random number generator used everywhere a seed is accepted.
//!
//! ChaCha8 is a counter-based stream cipher generator whose output is
//! specified independently of platform and word size, so seeded runs agree
//! bit-for-bit across machines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in reports next to every seed.
pub const RNG_ALGORITHM: &str = "chacha8";

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub(crate) fn unit_f64(rng: &mut Rng) -> f64 {
    use rand::RngCore;
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` by rejection, independent of `rand`'s range
/// sampling internals.
pub(crate) fn index_below(rng: &mut Rng, n: usize) -> usize {
    use rand::RngCore;
    assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX - n + 1) % n;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return (v % n) as usize;
        }
    }
}
