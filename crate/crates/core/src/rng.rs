//! Seeded random streams.
//!
//! Everything random in the crate flows from a `ChaCha8Rng` keyed by a
//! user seed plus a stream index, so results do not depend on thread
//! scheduling or platform.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer, used to derive child seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `±1` from the low bit of the next output word.
pub fn sign(rng: &mut impl RngCore) -> f64 {
    if rng.next_u64() & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Uniform in `(0, 1]` with 53 bits of resolution.
fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

/// Box–Muller pair of independent standard normals.
pub fn normal_pair(rng: &mut impl RngCore) -> (f64, f64) {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Fills `out` with i.i.d. standard normals.
pub fn fill_normal(rng: &mut impl RngCore, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = normal_pair(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = normal_pair(rng).0;
    }
}

/// Complex normal with independent standard normal real and imaginary parts.
pub fn complex_normal(rng: &mut impl RngCore) -> Complex64 {
    let (re, im) = normal_pair(rng);
    Complex64::new(re, im)
}
