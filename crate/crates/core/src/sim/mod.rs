//! BPSK/AWGN channel, fixed-point quantization and the Monte-Carlo engine.

mod channel;
mod codec;
mod crc_sweep;
mod engine;
mod quant;

pub use channel::{channel_llr, ebn0_to_sigma, frame_rng, transmit, ChannelConfig};
pub use codec::{Codec, FrameDecoder, PolarDecoder};
pub use crc_sweep::{allocations, crc_sweep, write_crc_csv, CrcAllocation, CrcSweepSettings};
pub use engine::{
    ebn0_at_fer, run_point, run_sweep, simulate_frame, write_series_csv, FrameOutcome,
    PointResult, RunLabels, SimResult, StopRule, CSV_HEADER,
};
pub use quant::{QFormat, QuantClass, QuantMode, Quantizer};
