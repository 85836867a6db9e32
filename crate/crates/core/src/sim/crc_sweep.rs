use std::io::Write;

use serde::Serialize;

use super::channel::ChannelConfig;
use super::codec::{Codec, PolarDecoder};
use super::engine::{run_point, PointResult, StopRule};
use super::quant::Quantizer;
use crate::fast::PartitionPlan;
use crate::polar::PolarCode;
use crate::{Error, Result};

/// Settings shared by every allocation of a CRC sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrcSweepSettings {
    pub partitions: usize,
    pub list_size: usize,
    pub target_ebn0_db: f64,
    pub seed: u64,
    pub stop: StopRule,
    pub quantizer: Quantizer,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrcAllocation {
    /// Requested CRC width per partition.
    pub widths: Vec<usize>,
    /// Widths actually in force after starved partitions dropped theirs.
    pub effective: Vec<usize>,
    pub point: PointResult,
}

impl CrcAllocation {
    pub fn total_bits(&self) -> usize {
        self.effective.iter().sum()
    }
}

/// Every per-partition tuple over `lengths`: symmetric allocations first,
/// then the rest in lexicographic order.
pub fn allocations(lengths: &[usize], partitions: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..partitions {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                lengths.iter().map(move |&l| {
                    let mut t = prefix.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    let (mut symmetric, rest): (Vec<_>, Vec<_>) =
        all.into_iter().partition(|t| t.windows(2).all(|w| w[0] == w[1]));
    symmetric.extend(rest);
    symmetric
}

/// Simulates PSCL on `code` (which must carry no CRC) for every CRC
/// allocation and ranks them by FER, ties broken toward fewer CRC bits.
pub fn crc_sweep(code: &PolarCode, crc_lengths: &[usize], settings: &CrcSweepSettings) -> Result<Vec<CrcAllocation>> {
    if crc_lengths.is_empty() {
        return Err(Error::config("crc_lengths", "must not be empty"));
    }
    if let Some(l) = crc_lengths.iter().find(|&&l| l % 4 != 0) {
        return Err(Error::config("crc_lengths", format!("{l} is not a multiple of four")));
    }
    let mut lengths = crc_lengths.to_vec();
    lengths.sort_unstable();
    lengths.dedup();
    let channel = ChannelConfig {
        ebn0_db: settings.target_ebn0_db,
        rate: code.rate(),
        seed: settings.seed,
    };
    let mut ranked = Vec::new();
    for widths in allocations(&lengths, settings.partitions) {
        let plan = PartitionPlan::with_widths(code, &widths)?;
        if plan.payload_len() == 0 {
            log::warn!("allocation {widths:?} leaves no payload, skipped");
            continue;
        }
        let effective = plan.crc_widths();
        let codec = Codec::polar(
            code.clone(),
            PolarDecoder::Pscl {
                list_size: settings.list_size,
                plan,
            },
            settings.quantizer,
        )?;
        let point = run_point(&codec, channel, settings.stop, settings.workers)?;
        log::info!("CRC {widths:?}: FER {:.3e} over {} frames", point.fer(), point.frames);
        ranked.push(CrcAllocation {
            widths,
            effective,
            point,
        });
    }
    ranked.sort_by(|a, b| {
        a.point
            .fer()
            .total_cmp(&b.point.fer())
            .then(a.total_bits().cmp(&b.total_bits()))
    });
    Ok(ranked)
}

fn join(widths: &[usize]) -> String {
    let parts: Vec<String> = widths.iter().map(|w| w.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Ranked allocations as CSV.
pub fn write_crc_csv<W: Write>(ranked: &[CrcAllocation], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rank",
        "crc",
        "effective_crc",
        "total_crc_bits",
        "ebn0_db",
        "frames",
        "frame_errors",
        "fer",
    ])?;
    for (rank, a) in ranked.iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            join(&a.widths),
            join(&a.effective),
            a.total_bits().to_string(),
            format!("{:?}", a.point.ebn0_db),
            a.point.frames.to_string(),
            a.point.frame_errors.to_string(),
            a.point.fer().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
