use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{channel_llr, frame_rng, transmit, ChannelConfig};
use super::codec::{Codec, FrameDecoder};
use super::quant::QuantMode;
use crate::{Error, Result};

/// When to stop simulating one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopRule {
    #[serde(rename = "min_errors")]
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_frame_errors: 100,
            max_frames: 10_000_000,
        }
    }
}

impl StopRule {
    pub fn new(min_frame_errors: u64, max_frames: u64) -> Self {
        StopRule {
            min_frame_errors,
            max_frames,
        }
    }
}

/// Counters of one simulated `Eb/N0` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResult {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    /// Payload bits per frame.
    pub payload_len: usize,
    pub wall_time: Duration,
}

impl PointResult {
    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.payload_len as u64)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One decoded frame: was it wrong, and in how many payload bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub frame_error: bool,
    pub bit_errors: u64,
}

/// Runs frame `frame` of the stream keyed by `seed`.
pub fn simulate_frame(
    codec: &Codec,
    decoder: &mut dyn FrameDecoder,
    sigma: f64,
    seed: u64,
    frame: u64,
) -> FrameOutcome {
    let mut rng = frame_rng(seed, frame);
    let (payload, x) = codec.source(&mut rng);
    let y = transmit(&x, sigma, &mut rng);
    let estimate = decoder.decode_payload(&channel_llr(&y, sigma));
    let bit_errors = payload.iter().zip(&estimate).filter(|(a, b)| a != b).count() as u64;
    FrameOutcome {
        frame_error: bit_errors > 0,
        bit_errors,
    }
}

const FIRST_BATCH: u64 = 64;
const MAX_BATCH: u64 = 16_384;

/// Simulates one point until `stop.min_frame_errors` frame errors or
/// `stop.max_frames` frames, whichever comes first.
///
/// Frames are processed in batches of a fixed, growing size; within a batch
/// the counters are cut at the exact frame where the error target is hit.
/// Counts therefore depend only on the seed, never on `workers`.
pub fn run_point(codec: &Codec, channel: ChannelConfig, stop: StopRule, workers: usize) -> Result<PointResult> {
    if stop.min_frame_errors == 0 {
        return Err(Error::config("stop.min_errors", "must be at least 1"));
    }
    if stop.max_frames == 0 {
        return Err(Error::config("stop.max_frames", "must be at least 1"));
    }
    let sigma = channel.sigma()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let started = Instant::now();
    let mut result = PointResult {
        ebn0_db: channel.ebn0_db,
        frames: 0,
        frame_errors: 0,
        bit_errors: 0,
        payload_len: codec.payload_len(),
        wall_time: Duration::ZERO,
    };
    let mut batch = FIRST_BATCH;
    while result.frames < stop.max_frames && result.frame_errors < stop.min_frame_errors {
        let start = result.frames;
        let end = (start + batch).min(stop.max_frames);
        let outcomes: Vec<FrameOutcome> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(
                    || codec.decoder(),
                    |decoder, frame| simulate_frame(codec, decoder.as_mut(), sigma, channel.seed, frame),
                )
                .collect()
        });
        for outcome in outcomes {
            result.frames += 1;
            result.bit_errors += outcome.bit_errors;
            if outcome.frame_error {
                result.frame_errors += 1;
                if result.frame_errors == stop.min_frame_errors {
                    break;
                }
            }
        }
        batch = (batch * 2).min(MAX_BATCH);
    }
    result.wall_time = started.elapsed();
    Ok(result)
}

/// Identifies a run in result files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunLabels {
    pub decoder: String,
    pub code: String,
    pub list_size: Option<usize>,
    pub partitions: Option<usize>,
    pub iterations: Option<usize>,
    pub quant: QuantMode,
}

impl RunLabels {
    pub fn of(codec: &Codec) -> Self {
        RunLabels {
            decoder: codec.decoder_name().into(),
            code: codec.code_name(),
            list_size: codec.list_size(),
            partitions: codec.partitions(),
            iterations: codec.iterations(),
            quant: codec.quant_mode(),
        }
    }
}

/// An SNR sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub labels: RunLabels,
    pub seed: u64,
    pub points: Vec<PointResult>,
}

pub const CSV_HEADER: [&str; 13] = [
    "ebn0_db",
    "frames",
    "frame_errors",
    "bit_errors",
    "fer",
    "ber",
    "seed",
    "decoder",
    "code",
    "L",
    "P",
    "T",
    "quant",
];

impl SimResult {
    fn rows(&self) -> impl Iterator<Item = [String; 13]> + '_ {
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        self.points.iter().map(move |p| {
            [
                format!("{:?}", p.ebn0_db),
                p.frames.to_string(),
                p.frame_errors.to_string(),
                p.bit_errors.to_string(),
                p.fer().to_string(),
                p.ber().to_string(),
                self.seed.to_string(),
                self.labels.decoder.clone(),
                self.labels.code.clone(),
                opt(self.labels.list_size),
                opt(self.labels.partitions),
                opt(self.labels.iterations),
                self.labels.quant.as_str().to_string(),
            ]
        })
    }

    /// One row per point. Wall time is left out so that reruns are
    /// byte-identical.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in self.rows() {
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Interpolated `Eb/N0` (dB) where the FER curve crosses `target`, in
    /// log-FER over linear dB. `None` if the sweep never brackets it.
    pub fn ebn0_at_fer(&self, target: f64) -> Option<f64> {
        ebn0_at_fer(&self.points, target)
    }
}

pub fn ebn0_at_fer(points: &[PointResult], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let (fa, fb) = (a.fer(), b.fer());
        if fa >= target && fb <= target && fa > fb {
            if fb == 0.0 {
                return Some(b.ebn0_db);
            }
            let t = (fa.ln() - target.ln()) / (fa.ln() - fb.ln());
            Some(a.ebn0_db + t * (b.ebn0_db - a.ebn0_db))
        } else {
            None
        }
    })
}

/// Several sweeps in one table with a leading `series` column.
pub fn write_series_csv<W: Write>(series: &[(String, &SimResult)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["series"];
    header.extend(CSV_HEADER);
    w.write_record(&header)?;
    for (name, result) in series {
        for row in result.rows() {
            w.write_record(std::iter::once(name.as_str()).chain(row.iter().map(String::as_str)))?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Runs one point per entry of `ebn0_list` (ascending) with the same seed.
pub fn run_sweep(
    codec: &Codec,
    ebn0_list: &[f64],
    seed: u64,
    stop: StopRule,
    workers: usize,
) -> Result<SimResult> {
    if ebn0_list.is_empty() {
        return Err(Error::config("channel.ebn0_list", "must not be empty"));
    }
    if ebn0_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("channel.ebn0_list", "must be strictly ascending"));
    }
    let points = ebn0_list
        .iter()
        .map(|&ebn0_db| {
            let channel = ChannelConfig {
                ebn0_db,
                rate: codec.rate(),
                seed,
            };
            let point = run_point(codec, channel, stop, workers)?;
            log::info!(
                "{} {} dB: {} frames, {} errors, FER {:.3e}",
                codec.series_name(),
                ebn0_db,
                point.frames,
                point.frame_errors,
                point.fer()
            );
            Ok(point)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimResult {
        labels: RunLabels::of(codec),
        seed,
        points,
    })
}
