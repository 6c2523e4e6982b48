//! Seeded random stream shared by every stochastic choice of a colony.
//!
//! All draws go through three primitives so the consumption order is easy to
//! reproduce outside the engine:
//!
//! * `unit`: `f64` in `[0, 1)`, one `random::<f64>()` call.
//! * `symmetric`: `2 * unit() - 1`, uniform in `[-1, 1)`.
//! * `index`: `random_range(0..n)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    #[inline]
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    #[inline]
    pub fn uniform(&mut self, lower: f64, upper: f64) -> f64 {
        lower + self.unit() * (upper - lower)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
