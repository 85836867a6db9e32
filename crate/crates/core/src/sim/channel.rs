use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Noise standard deviation of unit-energy BPSK at `ebn0_db` for a code of
/// rate `rate`.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!("rate {rate} outside (0, 1]")));
    }
    if !ebn0_db.is_finite() {
        return Err(Error::InvalidArgument(format!("Eb/N0 {ebn0_db} dB is not finite")));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn sigma(&self) -> Result<f64> {
        ebn0_to_sigma(self.ebn0_db, self.rate)
    }
}

/// The generator for one frame: stream `frame` of the ChaCha8 keystream
/// keyed by `seed`. Frames are independent of each other and of the order
/// in which they are simulated.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// BPSK (`0 -> +1`, `1 -> -1`) plus white Gaussian noise.
pub fn transmit<R: Rng + ?Sized>(codeword: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    codeword
        .iter()
        .map(|&b| {
            let n: f64 = StandardNormal.sample(rng);
            1.0 - 2.0 * f64::from(b) + sigma * n
        })
        .collect()
}

/// AWGN channel LLRs `2y / sigma^2`.
pub fn channel_llr(y: &[f64], sigma: f64) -> Vec<f64> {
    let scale = 2.0 / (sigma * sigma);
    y.iter().map(|&v| scale * v).collect()
}
