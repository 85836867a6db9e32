//! Number formats the decoders run on.
//!
//! Both formats store LLRs and metrics as `f64`. [`Float`] snaps channel
//! LLRs onto a dyadic grid fine enough that every later sum is exact, which
//! makes results independent of the order in which penalties are added.
//! [`Fixed`] models saturating two's-complement hardware.

use super::kernels::{f_func, g_func};
use crate::sim::QFormat;

pub trait Arithmetic: Clone + Send + Sync + 'static {
    /// Maps a channel LLR into the decoder's number format.
    fn load(&self, llr: f64) -> f64;

    #[inline]
    fn f(&self, a: f64, b: f64) -> f64 {
        f_func(a, b)
    }

    fn g(&self, a: f64, b: f64, beta_l: u8) -> f64;

    /// Adds a nonnegative penalty to a path metric.
    fn pm_add(&self, pm: f64, penalty: f64) -> f64;
}

/// Exact floating point for codes of a given length.
///
/// Channel LLRs are clamped to `+-LIMIT` and rounded to a multiple of
/// `2^-q`, with `q` chosen so that the largest possible path metric for the
/// code length still fits the 53-bit mantissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float {
    scale: f64,
}

impl Float {
    pub const LIMIT: f64 = 64.0;

    pub fn for_length(len: usize) -> Self {
        let n = len.max(1).trailing_zeros() as i32;
        // |alpha| <= 2^(6+n), pm <= 2^(6+2n); keep 46 - 2n fractional bits
        let frac = (46 - 2 * n).max(0);
        Float {
            scale: 2f64.powi(frac),
        }
    }

    pub fn grid(&self) -> f64 {
        self.scale.recip()
    }
}

impl Arithmetic for Float {
    #[inline]
    fn load(&self, llr: f64) -> f64 {
        let clamped = if llr.is_nan() {
            0.0
        } else {
            llr.clamp(-Self::LIMIT, Self::LIMIT)
        };
        (clamped * self.scale).round() / self.scale
    }

    #[inline]
    fn g(&self, a: f64, b: f64, beta_l: u8) -> f64 {
        g_func(a, b, beta_l)
    }

    #[inline]
    fn pm_add(&self, pm: f64, penalty: f64) -> f64 {
        pm + penalty
    }
}

/// Saturating fixed point: internal LLRs in `internal`, path metrics in
/// the unsigned format `pm`. Channel LLRs are expected to be quantized by
/// the caller; `load` only re-saturates them to the internal range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed {
    pub internal: QFormat,
    pub pm: QFormat,
}

impl Arithmetic for Fixed {
    #[inline]
    fn load(&self, llr: f64) -> f64 {
        self.internal.quantize_signed(llr)
    }

    #[inline]
    fn g(&self, a: f64, b: f64, beta_l: u8) -> f64 {
        self.internal.saturate_signed(g_func(a, b, beta_l))
    }

    #[inline]
    fn pm_add(&self, pm: f64, penalty: f64) -> f64 {
        (pm + penalty).min(self.pm.max_unsigned())
    }
}
