use crate::decoding::PartitionCheck;
use crate::polar::{log2_exact, CrcSpec, PolarCode};
use crate::{Error, Result};

/// Split of a polar code into `P` equal subtrees, each list-decoded with its
/// own CRC.
///
/// The CRC of partition `p` occupies the last `c_p` information positions of
/// that partition and protects the information bits before it. A partition
/// with fewer than `c_p + 1` information positions carries no CRC.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    len: usize,
    stage: u32,
    checks: Vec<PartitionCheck>,
    requested: Vec<Option<CrcSpec>>,
}

impl PartitionPlan {
    /// Builds a plan for `code` with one CRC (or none) per partition.
    pub fn new(code: &PolarCode, crcs: Vec<Option<CrcSpec>>) -> Result<Self> {
        let len = code.len();
        let parts = crcs.len();
        if parts == 0 || !parts.is_power_of_two() || parts > len {
            return Err(Error::Partition(format!(
                "partition count {parts} must be a power of two dividing N = {len}"
            )));
        }
        let part_len = len / parts;
        let stage = log2_exact(part_len)?;
        let mut checks = Vec::with_capacity(parts);
        for (p, crc) in crcs.iter().enumerate() {
            let start = p * part_len;
            let info: Vec<usize> = (start..start + part_len)
                .filter(|&i| !code.is_frozen(i))
                .map(|i| i - start)
                .collect();
            let crc = match crc {
                Some(c) if info.len() <= c.width() => {
                    log::warn!(
                        "partition {p} has {} information bits, dropping its {}-bit CRC",
                        info.len(),
                        c.width()
                    );
                    None
                }
                other => *other,
            };
            checks.push(PartitionCheck { info, crc });
        }
        Ok(PartitionPlan {
            len,
            stage,
            checks,
            requested: crcs,
        })
    }

    /// Plan with a default-polynomial CRC of the given width per partition;
    /// width 0 means no CRC.
    pub fn with_widths(code: &PolarCode, widths: &[usize]) -> Result<Self> {
        let crcs = widths
            .iter()
            .map(|&w| (w > 0).then(|| CrcSpec::default_for_width(w)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Self::new(code, crcs)
    }

    pub fn partitions(&self) -> usize {
        self.checks.len()
    }

    pub fn partition_len(&self) -> usize {
        1 << self.stage
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn checks(&self) -> &[PartitionCheck] {
        &self.checks
    }

    /// CRCs as requested, before any were dropped.
    pub fn requested_crcs(&self) -> &[Option<CrcSpec>] {
        &self.requested
    }

    /// Widths of the CRCs actually in force.
    pub fn crc_widths(&self) -> Vec<usize> {
        self.checks
            .iter()
            .map(|c| c.crc.map_or(0, |crc| crc.width()))
            .collect()
    }

    /// `u` indices carrying payload bits, in payload order.
    pub fn payload_positions(&self) -> Vec<usize> {
        let part_len = self.partition_len();
        self.checks
            .iter()
            .enumerate()
            .flat_map(|(p, check)| {
                let data = check.info.len() - check.crc.map_or(0, |c| c.width());
                check.info[..data].iter().map(move |&i| p * part_len + i)
            })
            .collect()
    }

    pub fn payload_len(&self) -> usize {
        self.checks
            .iter()
            .map(|c| c.info.len() - c.crc.map_or(0, |crc| crc.width()))
            .sum()
    }

    pub fn check_code(&self, code: &PolarCode) -> Result<()> {
        let matches = code.len() == self.len
            && self.checks.iter().enumerate().all(|(p, check)| {
                let start = p * self.partition_len();
                let info: Vec<usize> = (start..start + self.partition_len())
                    .filter(|&i| !code.is_frozen(i))
                    .map(|i| i - start)
                    .collect();
                info == check.info
            });
        if matches {
            Ok(())
        } else {
            Err(Error::Partition("plan was built for a different code".into()))
        }
    }

    /// Writes the payload and every partition's CRC onto `u`.
    pub fn place_payload(&self, code: &PolarCode, payload: &[u8]) -> Result<Vec<u8>> {
        self.check_code(code)?;
        if payload.len() != self.payload_len() {
            return Err(Error::LengthMismatch {
                expected: self.payload_len(),
                actual: payload.len(),
            });
        }
        let part_len = self.partition_len();
        let mut u = vec![0u8; self.len];
        let mut bits = payload.iter().copied();
        for (p, check) in self.checks.iter().enumerate() {
            let width = check.crc.map_or(0, |c| c.width());
            let data_len = check.info.len() - width;
            let data: Vec<u8> = bits.by_ref().take(data_len).collect();
            let parity = check.crc.map(|c| c.compute(&data)).unwrap_or_default();
            for (&i, &b) in check.info.iter().zip(data.iter().chain(&parity)) {
                u[p * part_len + i] = b;
            }
        }
        Ok(u)
    }

    pub fn extract_payload(&self, u: &[u8]) -> Vec<u8> {
        self.payload_positions().iter().map(|&i| u[i]).collect()
    }
}
