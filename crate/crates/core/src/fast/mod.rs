//! Special-node decoders (SSCL, Fast-SSCL), partitioned SCL and the
//! time-step model.

mod partition;
mod schedule;

pub use partition::PartitionPlan;
pub use schedule::{
    classify_tree, count_steps, other_node_cost, ListAlgorithm, NodeClass, NodeSchedule,
    ScheduleNode,
};

use crate::decoding::{
    Arithmetic, DecodeOutput, DecodingTree, Float, ListDecoder, NodeOp,
};
use crate::polar::PolarCode;
use crate::Result;

/// The decoding tree a schedule prescribes: special units become node
/// operations, everything else is traversed leaf by leaf.
pub fn decoding_tree(schedule: &NodeSchedule) -> DecodingTree {
    let mut tree = DecodingTree::full(schedule.stages);
    for node in &schedule.nodes {
        if node.stage == 0 {
            continue;
        }
        let op = match node.class {
            NodeClass::Rate0 => NodeOp::Rate0,
            NodeClass::Rep => NodeOp::Rep,
            NodeClass::Rate1 if schedule.algorithm == ListAlgorithm::FastSscl => NodeOp::Rate1Fast,
            NodeClass::Rate1 => NodeOp::Rate1,
            NodeClass::Spc | NodeClass::Other => NodeOp::Descend,
        };
        tree.set_op(node.stage, node.offset, op);
    }
    tree
}

/// A list decoder of the given flavour with the code's own CRC.
pub fn list_decoder<A: Arithmetic>(
    code: &PolarCode,
    algorithm: ListAlgorithm,
    list_size: usize,
    arith: A,
) -> Result<ListDecoder<A>> {
    let tree = decoding_tree(&classify_tree(code, algorithm, list_size));
    ListDecoder::new(
        code,
        list_size,
        tree,
        code.info_positions()[..code.payload_len()].to_vec(),
        arith,
    )
}

/// Partitioned SCL: list decoding inside each partition, one survivor
/// handed across every partition boundary. The code's own CRC is ignored;
/// the plan's CRCs take its place.
pub fn pscl_decoder<A: Arithmetic>(
    code: &PolarCode,
    plan: &PartitionPlan,
    list_size: usize,
    arith: A,
) -> Result<ListDecoder<A>> {
    plan.check_code(code)?;
    let tree = DecodingTree::full(code.stages()).with_partitions(plan.stage(), plan.checks().to_vec())?;
    ListDecoder::new(code, list_size, tree, plan.payload_positions(), arith)
}

pub fn sscl_decode(code: &PolarCode, channel_llrs: &[f64], list_size: usize) -> Result<DecodeOutput> {
    let arith = Float::for_length(code.len());
    Ok(list_decoder(code, ListAlgorithm::Sscl, list_size, arith)?.decode(channel_llrs))
}

pub fn fast_sscl_decode(
    code: &PolarCode,
    channel_llrs: &[f64],
    list_size: usize,
) -> Result<DecodeOutput> {
    let arith = Float::for_length(code.len());
    Ok(list_decoder(code, ListAlgorithm::FastSscl, list_size, arith)?.decode(channel_llrs))
}

pub fn pscl_decode(
    code: &PolarCode,
    channel_llrs: &[f64],
    plan: &PartitionPlan,
    list_size: usize,
) -> Result<DecodeOutput> {
    let arith = Float::for_length(code.len());
    Ok(pscl_decoder(code, plan, list_size, arith)?.decode(channel_llrs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoding::{sc_decode, scl_decode};
    use crate::polar::CrcSpec;
    use crate::testutil::{ga_code, noisy_frame};

    fn decoders(code: &PolarCode, list_size: usize) -> [ListDecoder; 3] {
        [ListAlgorithm::Scl, ListAlgorithm::Sscl, ListAlgorithm::FastSscl]
            .map(|a| list_decoder(code, a, list_size, Float::for_length(code.len())).unwrap())
    }

    #[test]
    fn special_decoders_match_scl() {
        for (len, k, crc) in [(64, 32, 4), (128, 80, 8), (256, 128, 8)] {
            let code = ga_code(len, k, crc);
            for list_size in [1, 2, 4, 8] {
                let [mut scl, mut sscl, mut fast] = decoders(&code, list_size);
                for seed in 0..300 {
                    let (_, llrs) = noisy_frame(&code, 1.5, seed);
                    let reference = scl.decode(&llrs);
                    let a = sscl.decode(&llrs);
                    let b = fast.decode(&llrs);
                    assert_eq!(reference, a, "sscl N={len} L={list_size} seed={seed}");
                    assert_eq!(reference, b, "fast N={len} L={list_size} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn rate_zero_node_penalty() {
        // rate-0 left half, rate-1 right half
        let mask: Vec<bool> = (0..8).map(|i| i < 4).collect();
        let code = PolarCode::from_frozen_mask(mask, None).unwrap();
        let schedule = classify_tree(&code, ListAlgorithm::Sscl, 2);
        assert_eq!(schedule.nodes[0].class, NodeClass::Rate0);
        // node LLRs are f(a_i, a_{i+4}); pick the right half large and positive
        let llrs = [1.0, -2.0, 3.0, -4.0, 8.0, 8.0, 8.0, 8.0];
        let out = sscl_decode(&code, &llrs, 2).unwrap();
        assert_eq!(out.pm, 6.0);
        assert_eq!(out, scl_decode(&code, &llrs, 2).unwrap());
    }

    #[test]
    fn fast_list_of_one_is_hard_decision() {
        let code = ga_code(64, 64, 0);
        let (_, llrs) = noisy_frame(&code, 0.0, 3);
        let out = fast_sscl_decode(&code, &llrs, 1).unwrap();
        assert_eq!(out.u_hat, sc_decode(&code, &llrs));
        assert_eq!(out.pm, 0.0);
    }

    #[test]
    fn noiseless_frames_decode_exactly() {
        let code = ga_code(256, 128, 8);
        let payload: Vec<u8> = (0..120).map(|i| (i % 7 < 3) as u8).collect();
        let x = code.encode(&code.place_payload(&payload).unwrap()).unwrap();
        let llrs: Vec<f64> = x.iter().map(|&b| 4.0 - 8.0 * f64::from(b)).collect();
        for list_size in [1, 2, 8] {
            for out in [
                sscl_decode(&code, &llrs, list_size).unwrap(),
                fast_sscl_decode(&code, &llrs, list_size).unwrap(),
            ] {
                assert_eq!(out.payload, payload);
                assert_eq!(out.pm, 0.0);
                assert!(out.crc_ok);
            }
        }
    }

    #[test]
    fn single_partition_is_scl() {
        let code = ga_code(128, 64, 8);
        let plain = ga_code(128, 64, 0);
        let plan = PartitionPlan::with_widths(&plain, &[8]).unwrap();
        for seed in 0..200 {
            let (_, llrs) = noisy_frame(&code, 1.0, seed);
            let a = pscl_decode(&plain, &llrs, &plan, 4).unwrap();
            let b = scl_decode(&code, &llrs, 4).unwrap();
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn one_leaf_partitions_are_sc() {
        let code = ga_code(64, 32, 0);
        let plan = PartitionPlan::with_widths(&code, &[0; 64]).unwrap();
        for seed in 0..1000 {
            let (_, llrs) = noisy_frame(&code, 0.5, seed);
            let out = pscl_decode(&code, &llrs, &plan, 8).unwrap();
            assert_eq!(out.u_hat, sc_decode(&code, &llrs), "seed {seed}");
        }
    }

    #[test]
    fn partitioned_round_trip_and_crc_status() {
        let code = ga_code(256, 128, 0);
        let plan = PartitionPlan::new(
            &code,
            vec![Some(CrcSpec::default_for_width(8).unwrap()); 2],
        )
        .unwrap();
        let payload: Vec<u8> = (0..plan.payload_len()).map(|i| (i % 3 == 2) as u8).collect();
        let x = code.encode(&plan.place_payload(&code, &payload).unwrap()).unwrap();
        let llrs: Vec<f64> = x.iter().map(|&b| 3.0 - 6.0 * f64::from(b)).collect();
        let mut dec = pscl_decoder(&code, &plan, 2, Float::for_length(256)).unwrap();
        let out = dec.decode(&llrs);
        assert_eq!(out.payload, payload);
        assert!(out.crc_ok);
        assert_eq!(dec.partition_status(), &[true, true]);
    }

    #[test]
    fn plan_code_mismatch_is_an_error() {
        let code = ga_code(64, 32, 0);
        let other = ga_code(64, 33, 0);
        let plan = PartitionPlan::with_widths(&code, &[4, 4]).unwrap();
        assert!(pscl_decoder(&other, &plan, 2, Float::for_length(64)).is_err());
    }
}
