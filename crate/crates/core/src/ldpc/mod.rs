//! Quasi-cyclic LDPC baseline: the 802.16e N=576 codes and a layered
//! normalized min-sum decoder.

mod decoder;

pub use decoder::{nms_layered_decode, syndrome_check, CheckState, LdpcOutput, NmsDecoder};

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default normalization factor of the check-node update.
pub const DEFAULT_NORM: f64 = 0.75;

/// Expansion factor of the shipped base matrices.
pub const SHIPPED_Z: usize = 24;

const R12_A: &str = include_str!("../../data/wimax_r12_a.txt");
const R23_A: &str = include_str!("../../data/wimax_r23_a.txt");
const R23_B: &str = include_str!("../../data/wimax_r23_b.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LdpcRate {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "2/3")]
    TwoThirds,
}

impl LdpcRate {
    pub fn as_str(self) -> &'static str {
        match self {
            LdpcRate::Half => "1/2",
            LdpcRate::TwoThirds => "2/3",
        }
    }
}

impl FromStr for LdpcRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1/2" => Ok(LdpcRate::Half),
            "2/3" => Ok(LdpcRate::TwoThirds),
            _ => Err(Error::BaseMatrix(format!("unknown rate {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    #[default]
    A,
    B,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Variant::A),
            "B" => Ok(Variant::B),
            _ => Err(Error::BaseMatrix(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

/// Parity-check matrix expanded from a base matrix of circulant shifts.
///
/// Row block `i` of the base matrix becomes layer `i`; the rows of one
/// layer never share a variable. The information part is the first `N - M`
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpcCode {
    base: Vec<Vec<i32>>,
    z: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
}

impl LdpcCode {
    /// Expands `base` (−1 for a zero block, `s ≥ 0` for the identity shifted
    /// right by `s`) with expansion factor `z`.
    pub fn from_base(base: Vec<Vec<i32>>, z: usize) -> Result<Self> {
        let n_b = base.first().map_or(0, Vec::len);
        if z == 0 || base.is_empty() || n_b == 0 || base.iter().any(|r| r.len() != n_b) {
            return Err(Error::BaseMatrix("base matrix must be a nonempty rectangle".into()));
        }
        if base.len() >= n_b {
            return Err(Error::BaseMatrix("base matrix needs more columns than rows".into()));
        }
        if let Some(&s) = base.iter().flatten().find(|&&s| s < -1 || s >= z as i32) {
            return Err(Error::BaseMatrix(format!("shift {s} outside -1..{z}")));
        }
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        for block in &base {
            for t in 0..z {
                for (j, &s) in block.iter().enumerate() {
                    if s >= 0 {
                        cols.push(j * z + (t + s as usize) % z);
                    }
                }
                row_start.push(cols.len());
            }
        }
        let mut degree = vec![0usize; n_b * z];
        for &c in &cols {
            degree[c] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(Error::BaseMatrix(format!("variable {v} is in no check")));
        }
        Ok(LdpcCode { base, z, row_start, cols })
    }

    /// Parses the text format: a header `z=.. rate=.. variant=..` followed by
    /// one whitespace-separated row of shifts per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::BaseMatrix("empty base matrix file".into()))?;
        let z = header
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix("z="))
            .ok_or_else(|| Error::BaseMatrix(format!("header {header:?} lacks z=")))?
            .parse::<usize>()
            .map_err(|e| Error::BaseMatrix(format!("bad z: {e}")))?;
        let base = lines
            .map(|line| {
                line.split_whitespace()
                    .map(|v| v.parse::<i32>().map_err(|e| Error::BaseMatrix(format!("{v:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_base(base, z)
    }

    /// Code length `N`.
    pub fn len(&self) -> usize {
        self.base[0].len() * self.z
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of parity checks `M`.
    pub fn checks(&self) -> usize {
        self.base.len() * self.z
    }

    /// Information length `N - M` (the shipped matrices have full rank).
    pub fn info_len(&self) -> usize {
        self.len() - self.checks()
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.len() as f64
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn base_matrix(&self) -> &[Vec<i32>] {
        &self.base
    }

    /// Variables in check `row`.
    pub fn row(&self, row: usize) -> &[usize] {
        &self.cols[self.row_start[row]..self.row_start[row + 1]]
    }

    /// Check rows of each layer, in processing order.
    pub fn layers(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.base.len()).map(|b| b * self.z..(b + 1) * self.z)
    }

    fn edges(&self, row: usize) -> Range<usize> {
        self.row_start[row]..self.row_start[row + 1]
    }

    fn edge_count(&self) -> usize {
        self.cols.len()
    }
}

/// Loads a shipped 802.16e base matrix.
pub fn load_base_matrix(rate: LdpcRate, variant: Variant, z: usize) -> Result<LdpcCode> {
    if z != SHIPPED_Z {
        return Err(Error::BaseMatrix(format!("only z = {SHIPPED_Z} is shipped, got {z}")));
    }
    let text = match (rate, variant) {
        (LdpcRate::Half, Variant::A) => R12_A,
        (LdpcRate::TwoThirds, Variant::A) => R23_A,
        (LdpcRate::TwoThirds, Variant::B) => R23_B,
        (LdpcRate::Half, Variant::B) => {
            return Err(Error::BaseMatrix("rate 1/2 has no variant B".into()));
        }
    };
    LdpcCode::parse(text)
}
