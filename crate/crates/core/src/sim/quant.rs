use serde::{Deserialize, Serialize};

/// A fixed-point format with `total_bits` bits of which `frac_bits` are
/// fractional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFormat {
    pub total_bits: u32,
    pub frac_bits: u32,
}

impl QFormat {
    pub const fn new(total_bits: u32, frac_bits: u32) -> Self {
        QFormat {
            total_bits,
            frac_bits,
        }
    }

    pub fn step(&self) -> f64 {
        2f64.powi(-(self.frac_bits as i32))
    }

    /// Largest magnitude of the symmetric signed range.
    pub fn max_signed(&self) -> f64 {
        ((1u64 << (self.total_bits - 1)) - 1) as f64 * self.step()
    }

    pub fn max_unsigned(&self) -> f64 {
        ((1u64 << self.total_bits) - 1) as f64 * self.step()
    }

    #[inline]
    pub fn saturate_signed(&self, x: f64) -> f64 {
        let m = self.max_signed();
        x.clamp(-m, m)
    }

    /// Round half away from zero onto the grid, then saturate.
    #[inline]
    pub fn quantize_signed(&self, x: f64) -> f64 {
        let scale = 2f64.powi(self.frac_bits as i32);
        self.saturate_signed((x * scale).round() / scale)
    }

    #[inline]
    pub fn quantize_unsigned(&self, x: f64) -> f64 {
        let scale = 2f64.powi(self.frac_bits as i32);
        ((x * scale).round() / scale).clamp(0.0, self.max_unsigned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuantMode {
    #[default]
    Float,
    Fixed,
}

impl QuantMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuantMode::Float => "float",
            QuantMode::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantClass {
    ChannelLlr,
    InternalLlr,
    PathMetric,
}

/// Per-class formats plus the gain applied to channel LLRs before they are
/// quantized. Min-sum decoding is invariant to a common positive scale, so
/// the gain trades channel resolution against saturation of the internal
/// LLRs and, above all, headroom under the 8-bit path-metric ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quantizer {
    pub mode: QuantMode,
    pub channel: QFormat,
    pub internal: QFormat,
    pub pm: QFormat,
    pub channel_gain: f64,
}

impl Default for Quantizer {
    fn default() -> Self {
        Quantizer {
            mode: QuantMode::Float,
            channel: QFormat::new(4, 2),
            internal: QFormat::new(6, 2),
            pm: QFormat::new(8, 2),
            channel_gain: Self::DEFAULT_CHANNEL_GAIN,
        }
    }
}

impl Quantizer {
    pub const DEFAULT_CHANNEL_GAIN: f64 = 0.25;

    pub fn fixed() -> Self {
        Quantizer {
            mode: QuantMode::Fixed,
            ..Self::default()
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.mode == QuantMode::Fixed
    }

    /// Identity in float mode; grid rounding and saturation in fixed mode.
    pub fn quantize(&self, value: f64, class: QuantClass) -> f64 {
        if !self.is_fixed() {
            return value;
        }
        match class {
            QuantClass::ChannelLlr => self.channel.quantize_signed(value),
            QuantClass::InternalLlr => self.internal.quantize_signed(value),
            QuantClass::PathMetric => self.pm.quantize_unsigned(value),
        }
    }

    pub fn quantize_slice(&self, values: &mut [f64], class: QuantClass) {
        for v in values {
            *v = self.quantize(*v, class);
        }
    }

    /// Channel LLRs as the decoder sees them: scaled by the gain and
    /// quantized in fixed mode, untouched otherwise.
    pub fn channel_llrs(&self, llrs: &mut [f64]) {
        if self.is_fixed() {
            for v in llrs {
                *v = self.channel.quantize_signed(*v * self.channel_gain);
            }
        }
    }
}
