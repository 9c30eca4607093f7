//! Random sources shared by every stochastic component.
//!
//! All algorithms draw through [`Sampler`] so tests can substitute scripted
//! values. Production code uses [`ChaCha8Rng`], whose output stream is fixed
//! across platforms and releases, which is what the determinism guarantees of
//! the optimizers and the experiment harness rest on.

use rand::{Rng, RngCore, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub trait Sampler {
    /// Uniform draw in `[0, 1)`.
    fn uniform(&mut self) -> f64;

    /// Standard normal draw.
    fn normal(&mut self) -> f64;

    /// Uniform index in `0..n`; `n` must be positive.
    fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Uniform draw in `[lo, hi)`.
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

impl<R: RngCore> Sampler for R {
    fn uniform(&mut self) -> f64 {
        self.gen::<f64>()
    }

    fn normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }

    fn index(&mut self, n: usize) -> usize {
        self.gen_range(0..n)
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream label (splitmix64 finalizer) so that
/// independent sub-computations get uncorrelated, reproducible streams.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
