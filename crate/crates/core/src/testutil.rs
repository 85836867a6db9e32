//! Helpers shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::decoding::{Arithmetic, Float};
use crate::polar::{construct_reliability, Construction, CrcSpec, PolarCode};

pub fn ga_code(len: usize, k: usize, crc_width: usize) -> PolarCode {
    let order = construct_reliability(
        len,
        2.0,
        k as f64 / len as f64,
        &Construction::GaussianApproximation,
    )
    .unwrap();
    let crc = (crc_width > 0).then(|| CrcSpec::default_for_width(crc_width).unwrap());
    PolarCode::new(len, k, order, crc).unwrap()
}

/// Random payload, encoded and sent over BPSK/AWGN. LLRs are snapped to
/// the exact grid the float decoders use, so reference implementations
/// working on raw `f64` see the same values.
pub fn noisy_frame(code: &PolarCode, ebn0_db: f64, seed: u64) -> (Vec<u8>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payload: Vec<u8> = (0..code.payload_len()).map(|_| rng.random_range(0..2)).collect();
    let x = code.encode(&code.place_payload(&payload).unwrap()).unwrap();
    let grid = Float::for_length(code.len());
    let llrs = noisy_llrs(&x, code.rate(), ebn0_db, &mut rng)
        .into_iter()
        .map(|a| grid.load(a))
        .collect();
    (payload, llrs)
}

pub fn noisy_llrs(x: &[u8], rate: f64, ebn0_db: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
    let noise = Normal::new(0.0, sigma).unwrap();
    x.iter()
        .map(|&b| {
            let y = 1.0 - 2.0 * f64::from(b) + noise.sample(rng);
            2.0 * y / (sigma * sigma)
        })
        .collect()
}
