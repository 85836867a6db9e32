//! Polar code construction, frozen-set management, encoding and CRCs.

mod code;
mod construction;
mod crc;

pub use code::{polar_transform, PolarCode};
pub use construction::{
    bhattacharyya_log_z, construct_reliability, gaussian_approximation_means,
    parse_reliability, read_reliability_file, Construction,
};
pub use crc::CrcSpec;

/// Returns `log2(len)` when `len` is a nonzero power of two.
pub fn log2_exact(len: usize) -> crate::Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(crate::Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}
