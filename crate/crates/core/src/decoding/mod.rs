//! SC kernels, the successive-cancellation decoder and the list decoding
//! engine.

mod arith;
mod kernels;
mod list;
mod sc;

pub use arith::{Arithmetic, Fixed, Float};
pub use kernels::{
    combine_beta, f_func, g_func, hard_decision, leaf_decide, penalty, pm_update,
};
pub use list::{
    prune_candidates, scl_decode, select_final, split_and_prune, Candidate, DecodeOutput,
    DecodingTree, ListDecoder, NodeOp, PartitionCheck, TraceStep,
};
pub use sc::{sc_decode, ScDecoder};
