use rand::Rng;

use super::quant::{QuantMode, Quantizer};
use crate::decoding::{Arithmetic, Fixed, Float, ListDecoder, ScDecoder};
use crate::fast::{list_decoder, pscl_decoder, ListAlgorithm, PartitionPlan};
use crate::ldpc::{LdpcCode, NmsDecoder};
use crate::polar::PolarCode;
use crate::{Error, Result};

/// How a polar code is decoded.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarDecoder {
    Sc,
    List {
        algorithm: ListAlgorithm,
        list_size: usize,
    },
    /// Partitioned SCL; the code must carry no CRC of its own.
    Pscl {
        list_size: usize,
        plan: PartitionPlan,
    },
}

#[derive(Debug, Clone)]
enum Kind {
    Uncoded {
        len: usize,
    },
    Polar {
        code: PolarCode,
        decoder: PolarDecoder,
    },
    Ldpc {
        code: LdpcCode,
        iterations: usize,
        norm: f64,
    },
}

/// A code together with its decoder and number format: everything the
/// Monte-Carlo engine needs to run frames.
#[derive(Debug, Clone)]
pub struct Codec {
    kind: Kind,
    quantizer: Quantizer,
}

/// Per-worker decoding state. Returns the payload estimate of one frame.
pub trait FrameDecoder: Send {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8>;
}

impl Codec {
    /// Uncoded BPSK with hard decisions, for harness calibration.
    pub fn uncoded(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("uncoded frame length must be positive".into()));
        }
        Ok(Codec {
            kind: Kind::Uncoded { len },
            quantizer: Quantizer::default(),
        })
    }

    pub fn polar(code: PolarCode, decoder: PolarDecoder, quantizer: Quantizer) -> Result<Self> {
        match &decoder {
            PolarDecoder::Sc => {}
            PolarDecoder::List { list_size, .. } if *list_size == 0 => {
                return Err(Error::InvalidArgument("list size must be at least 1".into()));
            }
            PolarDecoder::List { .. } => {}
            PolarDecoder::Pscl { plan, list_size } => {
                if code.crc().is_some() {
                    return Err(Error::InvalidArgument(
                        "PSCL takes its CRCs from the partition plan; the code must have none".into(),
                    ));
                }
                if *list_size == 0 {
                    return Err(Error::InvalidArgument("list size must be at least 1".into()));
                }
                plan.check_code(&code)?;
            }
        }
        let codec = Codec {
            kind: Kind::Polar { code, decoder },
            quantizer,
        };
        codec.try_decoder()?;
        Ok(codec)
    }

    pub fn ldpc(code: LdpcCode, iterations: usize, norm: f64, quantizer: Quantizer) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidArgument("LDPC needs at least one iteration".into()));
        }
        if !(norm > 0.0 && norm <= 1.0) {
            return Err(Error::InvalidArgument(format!("normalization {norm} outside (0, 1]")));
        }
        Ok(Codec {
            kind: Kind::Ldpc {
                code,
                iterations,
                norm,
            },
            quantizer,
        })
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            Kind::Uncoded { len } => *len,
            Kind::Polar { code, .. } => code.len(),
            Kind::Ldpc { code, .. } => code.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nominal rate used for Eb accounting; CRC bits count as information.
    pub fn rate(&self) -> f64 {
        match &self.kind {
            Kind::Uncoded { .. } => 1.0,
            Kind::Polar { code, .. } => code.rate(),
            Kind::Ldpc { code, .. } => code.rate(),
        }
    }

    /// Bits compared when counting errors.
    pub fn payload_len(&self) -> usize {
        match &self.kind {
            Kind::Uncoded { len } => *len,
            Kind::Polar {
                decoder: PolarDecoder::Pscl { plan, .. },
                ..
            } => plan.payload_len(),
            Kind::Polar { code, .. } => code.payload_len(),
            Kind::Ldpc { code, .. } => code.info_len(),
        }
    }

    /// The polar code and decoder, for polar codecs.
    pub fn polar_parts(&self) -> Option<(&PolarCode, &PolarDecoder)> {
        match &self.kind {
            Kind::Polar { code, decoder } => Some((code, decoder)),
            _ => None,
        }
    }

    /// The LDPC code, iteration limit and normalization, for LDPC codecs.
    pub fn ldpc_parts(&self) -> Option<(&LdpcCode, usize, f64)> {
        match &self.kind {
            Kind::Ldpc {
                code,
                iterations,
                norm,
            } => Some((code, *iterations, *norm)),
            _ => None,
        }
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn quant_mode(&self) -> QuantMode {
        self.quantizer.mode
    }

    pub fn list_size(&self) -> Option<usize> {
        match &self.kind {
            Kind::Polar {
                decoder: PolarDecoder::List { list_size, .. } | PolarDecoder::Pscl { list_size, .. },
                ..
            } => Some(*list_size),
            _ => None,
        }
    }

    pub fn partitions(&self) -> Option<usize> {
        match &self.kind {
            Kind::Polar {
                decoder: PolarDecoder::Pscl { plan, .. },
                ..
            } => Some(plan.partitions()),
            _ => None,
        }
    }

    pub fn iterations(&self) -> Option<usize> {
        match &self.kind {
            Kind::Ldpc { iterations, .. } => Some(*iterations),
            _ => None,
        }
    }

    /// Short decoder tag for result files.
    pub fn decoder_name(&self) -> &'static str {
        match &self.kind {
            Kind::Uncoded { .. } => "uncoded",
            Kind::Polar { decoder, .. } => match decoder {
                PolarDecoder::Sc => "sc",
                PolarDecoder::List { algorithm, .. } => algorithm.as_str(),
                PolarDecoder::Pscl { .. } => "pscl",
            },
            Kind::Ldpc { .. } => "ldpc_nms",
        }
    }

    /// Code tag for result files, e.g. `PC(512,256)` or `LDPC(576,288)`.
    pub fn code_name(&self) -> String {
        match &self.kind {
            Kind::Uncoded { len } => format!("BPSK({len})"),
            Kind::Polar { code, .. } => format!("PC({},{})", code.len(), code.k()),
            Kind::Ldpc { code, .. } => format!("LDPC({},{})", code.len(), code.info_len()),
        }
    }

    /// Legend label, e.g. `SCL2-CRC8`, `PSCL(2,2)-CRC(8,8)` or `LDPC-T20`.
    pub fn series_name(&self) -> String {
        match &self.kind {
            Kind::Uncoded { .. } => "BPSK".into(),
            Kind::Polar { code, decoder } => {
                let crc = match code.crc_width() {
                    0 => String::new(),
                    w => format!("-CRC{w}"),
                };
                match decoder {
                    PolarDecoder::Sc => format!("SC{crc}"),
                    PolarDecoder::List {
                        algorithm,
                        list_size,
                    } => {
                        let name = match algorithm {
                            ListAlgorithm::Scl => "SCL",
                            ListAlgorithm::Sscl => "SSCL",
                            ListAlgorithm::FastSscl => "Fast-SSCL",
                        };
                        format!("{name}{list_size}{crc}")
                    }
                    PolarDecoder::Pscl { list_size, plan } => {
                        let widths: Vec<String> =
                            plan.crc_widths().iter().map(|w| w.to_string()).collect();
                        format!(
                            "PSCL({},{})-CRC({})",
                            plan.partitions(),
                            list_size,
                            widths.join(",")
                        )
                    }
                }
            }
            Kind::Ldpc { iterations, .. } => format!("LDPC-T{iterations}"),
        }
    }

    /// Draws the payload of one frame and encodes it. LDPC frames carry
    /// the all-zero codeword; the noise is what varies.
    pub fn source<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<u8>, Vec<u8>) {
        let random = |n: usize, rng: &mut R| (0..n).map(|_| rng.random_range(0..2u8)).collect::<Vec<u8>>();
        match &self.kind {
            Kind::Uncoded { len } => {
                let bits = random(*len, rng);
                (bits.clone(), bits)
            }
            Kind::Polar { code, decoder } => {
                let payload = random(self.payload_len(), rng);
                let u = match decoder {
                    PolarDecoder::Pscl { plan, .. } => plan.place_payload(code, &payload),
                    _ => code.place_payload(&payload),
                }
                .expect("payload length matches the codec");
                let x = code.encode(&u).expect("placed payload respects the frozen set");
                (payload, x)
            }
            Kind::Ldpc { code, .. } => (vec![0; code.info_len()], vec![0; code.len()]),
        }
    }

    /// Fresh decoder state for one worker.
    pub fn decoder(&self) -> Box<dyn FrameDecoder> {
        self.try_decoder().expect("codec was validated at construction")
    }

    fn try_decoder(&self) -> Result<Box<dyn FrameDecoder>> {
        let inner: Box<dyn FrameDecoder> = match &self.kind {
            Kind::Uncoded { .. } => Box::new(HardDecision),
            Kind::Polar { code, decoder } => match self.quantizer.mode {
                QuantMode::Float => polar_decoder(code, decoder, Float::for_length(code.len()))?,
                QuantMode::Fixed => polar_decoder(
                    code,
                    decoder,
                    Fixed {
                        internal: self.quantizer.internal,
                        pm: self.quantizer.pm,
                    },
                )?,
            },
            Kind::Ldpc {
                code,
                iterations,
                norm,
            } => Box::new(LdpcFrame {
                info_len: code.info_len(),
                decoder: NmsDecoder::new(code, *iterations, *norm),
            }),
        };
        Ok(if self.quantizer.is_fixed() {
            Box::new(Quantized {
                quantizer: self.quantizer,
                buffer: Vec::new(),
                inner,
            })
        } else {
            inner
        })
    }
}

fn polar_decoder<A: Arithmetic>(
    code: &PolarCode,
    decoder: &PolarDecoder,
    arith: A,
) -> Result<Box<dyn FrameDecoder>> {
    Ok(match decoder {
        PolarDecoder::Sc => Box::new(ScFrame {
            code: code.clone(),
            decoder: ScDecoder::with_arithmetic(code, arith),
        }),
        PolarDecoder::List {
            algorithm,
            list_size,
        } => Box::new(list_decoder(code, *algorithm, *list_size, arith)?),
        PolarDecoder::Pscl { list_size, plan } => {
            Box::new(pscl_decoder(code, plan, *list_size, arith)?)
        }
    })
}

struct HardDecision;

impl FrameDecoder for HardDecision {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8> {
        channel_llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}

struct ScFrame<A: Arithmetic> {
    code: PolarCode,
    decoder: ScDecoder<A>,
}

impl<A: Arithmetic> FrameDecoder for ScFrame<A> {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8> {
        let u = self.decoder.decode(channel_llrs);
        self.code.extract_payload(u)
    }
}

impl<A: Arithmetic> FrameDecoder for ListDecoder<A> {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8> {
        self.decode(channel_llrs).payload
    }
}

struct LdpcFrame {
    info_len: usize,
    decoder: NmsDecoder,
}

impl FrameDecoder for LdpcFrame {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8> {
        let mut bits = self.decoder.decode(channel_llrs).bits;
        bits.truncate(self.info_len);
        bits
    }
}

/// Scales and quantizes channel LLRs before handing them on.
struct Quantized {
    quantizer: Quantizer,
    buffer: Vec<f64>,
    inner: Box<dyn FrameDecoder>,
}

impl FrameDecoder for Quantized {
    fn decode_payload(&mut self, channel_llrs: &[f64]) -> Vec<u8> {
        self.buffer.clear();
        self.buffer.extend_from_slice(channel_llrs);
        self.quantizer.channel_llrs(&mut self.buffer);
        self.inner.decode_payload(&self.buffer)
    }
}
