//! Platform-stable pseudo-random numbers.
//!
//! Every random draw in the crate goes through [`SeededRng`], which is
//! xoshiro256** seeded with SplitMix64 from a 64-bit seed. The derived draws
//! use fixed, documented recipes so another implementation can replay them:
//!
//! * `uniform()`: `(next_u64() >> 11) * 2^-53`, a double in `[0, 1)`.
//! * `below(n)`: `floor(uniform() * n)`.
//! * `normal()`: Box-Muller cosine branch, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`,
//!   consuming two uniforms per call.
//! * `shuffle(v)`: Fisher-Yates from the back, `j = below(i + 1)` for
//!   `i = len-1 .. 1`.
//! * `sample_indices(n, k)`: partial Fisher-Yates over `0..n`, swapping
//!   position `i` with `i + below(n - i)` for `i = 0 .. k-1`.
//! * `for_stream(seed, stream)`: a new generator seeded with
//!   `splitmix64(seed) ^ stream`, for independent sub-streams of one run.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn for_stream(seed: u64, stream: u64) -> Self {
        Self::new(splitmix64(seed) ^ stream)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn shuffle<X>(&mut self, values: &mut [X]) {
        for i in (1..values.len()).rev() {
            let j = self.below(i + 1);
            values.swap(i, j);
        }
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} of {n} without replacement");
        let mut all: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            all.swap(i, j);
        }
        all.truncate(k);
        all
    }
}
