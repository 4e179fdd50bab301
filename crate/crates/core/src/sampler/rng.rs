//! Counter-based random numbers: every draw is a pure function of
//! `(seed, trial, draw)`, so results do not depend on scheduling.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random word number `draw` of trial `trial`.
pub fn draw_u64(seed: u64, trial: u64, draw: u64) -> u64 {
    mix(mix(seed ^ mix(trial.wrapping_mul(GOLDEN))).wrapping_add(draw.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn draw_uniform(seed: u64, trial: u64, draw: u64) -> f64 {
    (draw_u64(seed, trial, draw) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent stream seed from a parent seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix(seed.wrapping_add(mix(label ^ GOLDEN)))
}

/// Sequential splitmix64 stream, for the few places that need an `RngCore`.
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }
}

impl RngCore for SplitMix64 {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(GOLDEN);
        mix(self.0)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
