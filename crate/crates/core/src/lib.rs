//! Channel-coding laboratory for short polar codes.
//!
//! The crate is split along the decoding pipeline:
//!
//! * [`polar`]: construction, frozen sets, encoding and CRC handling.
//! * [`decoding`]: SC kernels, the successive-cancellation decoder and the
//!   list decoding engine shared by every list-based algorithm.
//! * [`fast`]: special-node classification, SSCL / Fast-SSCL, partitioned
//!   SCL and the decoding time-step model.
//! * [`ldpc`]: the quasi-cyclic 802.16e LDPC baseline with a layered
//!   normalized min-sum decoder.
//! * [`sim`]: BPSK/AWGN channel, fixed-point quantization and the seeded
//!   Monte-Carlo FER/BER engine.
//! * [`config`]: the JSON experiment description consumed by the CLI.

pub mod config;
pub mod decoding;
pub mod error;
pub mod fast;
pub mod ldpc;
pub mod polar;
pub mod sim;

pub use error::{Error, Result};

#[cfg(test)]
mod testutil;
