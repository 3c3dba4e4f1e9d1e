//! Counter-addressable Gaussian noise.
//!
//! Each trajectory owns a ChaCha8 stream selected by a key derived from
//! `(global seed, trajectory index)`. Every integration step consumes a fixed
//! number of 32-bit words (normals come from Box-Muller, never rejection), so
//! the noise for `(step, ion, component)` sits at a fixed offset in the stream
//! and a trajectory is independent of how trajectories are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer; used to mix seed components into stream keys.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the trajectory at `(rate_index, run_index)` under `global_seed`.
pub fn trajectory_seed(global_seed: u64, rate_index: usize, run_index: usize) -> u64 {
    mix64(mix64(global_seed ^ mix64(rate_index as u64)) ^ (run_index as u64))
}

#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed));
        rng.set_stream(seed);
        NoiseStream { rng }
    }

    /// Positions the stream at block `block` where each block holds
    /// `pairs_per_block` Box-Muller pairs.
    pub fn seek(&mut self, block: u64, pairs_per_block: u64) {
        // one pair = two u64 = four 32-bit words
        self.rng
            .set_word_pos(u128::from(block) * u128::from(pairs_per_block) * 4);
    }

    #[inline]
    fn open_unit(&mut self) -> f64 {
        // (0, 1]: never zero, so ln is finite
        ((self.rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals.
    #[inline]
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    pub fn uniform(&mut self) -> f64 {
        self.open_unit()
    }
}
