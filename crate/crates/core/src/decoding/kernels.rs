//! The scalar operations every SC-family decoder is built from.
//!
//! All LLRs are `f64`. Positive values favour bit 0. The sign of zero is
//! taken as positive throughout, so a zero LLR decides 0 and costs nothing
//! on either branch of the path-metric update.

use crate::{Error, Result};

/// Hard decision of an LLR: 1 iff strictly negative.
#[inline]
pub fn hard_decision(alpha: f64) -> u8 {
    u8::from(alpha < 0.0)
}

/// Min-sum check-node combination.
#[inline]
pub fn f_func(a: f64, b: f64) -> f64 {
    let magnitude = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -magnitude
    } else {
        magnitude
    }
}

/// Variable-node combination given the partial sum `beta_l` of the left
/// child.
#[inline]
pub fn g_func(a: f64, b: f64, beta_l: u8) -> f64 {
    if beta_l == 0 {
        b + a
    } else {
        b - a
    }
}

/// Partial-sum combination: `(beta_l xor beta_r, beta_r)`.
pub fn combine_beta(beta_l: &[u8], beta_r: &[u8]) -> Result<Vec<u8>> {
    if beta_l.len() != beta_r.len() {
        return Err(Error::LengthMismatch {
            expected: beta_l.len(),
            actual: beta_r.len(),
        });
    }
    Ok(beta_l
        .iter()
        .zip(beta_r)
        .map(|(l, r)| l ^ r)
        .chain(beta_r.iter().copied())
        .collect())
}

/// Leaf estimate: frozen leaves and non-negative LLRs decide 0.
#[inline]
pub fn leaf_decide(alpha: f64, is_frozen: bool) -> u8 {
    if is_frozen {
        0
    } else {
        hard_decision(alpha)
    }
}

/// Path-metric penalty for deciding `bit` against LLR `alpha`.
#[inline]
pub fn penalty(alpha: f64, bit: u8) -> f64 {
    if hard_decision(alpha) == bit {
        0.0
    } else {
        alpha.abs()
    }
}

/// Path-metric update: unchanged when `u_hat` agrees with the sign of
/// `alpha`, otherwise increased by `|alpha|`.
#[inline]
pub fn pm_update(pm: f64, alpha: f64, u_hat: u8) -> f64 {
    pm + penalty(alpha, u_hat)
}
