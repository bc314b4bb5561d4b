//! Derived-seed scheme for reproducible randomized procedures.
//!
//! Every randomized iteration draws its own RNG from
//! `(base_seed, stream, iteration)` through the splitmix64 finalizer, so
//! iterations can be evaluated in any order (or in parallel) and still
//! produce the exact streams of a sequential run.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer (Vigna). Bijective 64-bit mix with good avalanche.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a base seed with a stream tag and an iteration index into one 64-bit
/// seed. Distinct `(stream, iteration)` pairs map to distinct mixes of the
/// base seed.
pub fn derive(base: u64, stream: u64, iteration: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(stream)) ^ iteration)
}

/// RNG for one iteration of one named stream.
pub fn rng_for(base: u64, stream: u64, iteration: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, stream, iteration))
}
