//! JSON experiment descriptions.
//!
//! A config names a code, a decoder, the channel points, the stopping rule
//! and the number format. [`ExperimentConfig::normalized`] validates it and
//! fills every default, and the canonical JSON of the normalized form is
//! what [`ExperimentConfig::fingerprint`] hashes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fast::{ListAlgorithm, PartitionPlan};
use crate::ldpc::{load_base_matrix, LdpcRate, Variant, DEFAULT_NORM, SHIPPED_Z};
use crate::polar::{construct_reliability, Construction, CrcSpec, PolarCode};
use crate::sim::{Codec, PolarDecoder, Quantizer, StopRule};
use crate::{Error, Result};

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "POLARLAB_SEED";

pub const DEFAULT_DESIGN_EBN0_DB: f64 = 2.0;
pub const DEFAULT_LDPC_ITERATIONS: usize = 20;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFamily {
    #[default]
    Polar,
    Ldpc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    #[default]
    Ga,
    Bhattacharyya,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrcConfig {
    pub width: usize,
    /// Generator without the leading term; the width's default if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<u64>,
}

impl CrcConfig {
    fn spec(&self, field: &str) -> Result<CrcSpec> {
        let default = CrcSpec::default_for_width(self.width);
        let poly = match self.poly {
            Some(p) => p,
            None => default.map_err(|e| Error::config(field, e.to_string()))?.poly(),
        };
        CrcSpec::new(self.width, poly, self.init.unwrap_or(0)).map_err(|e| Error::config(field, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    #[serde(default)]
    pub family: CodeFamily,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_ebn0_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc: Option<CrcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<LdpcRate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sc,
    Scl,
    Sscl,
    FastSscl,
    Pscl,
    LdpcNms,
}

impl Algorithm {
    fn list(self) -> Option<ListAlgorithm> {
        match self {
            Algorithm::Scl => Some(ListAlgorithm::Scl),
            Algorithm::Sscl => Some(ListAlgorithm::Sscl),
            Algorithm::FastSscl => Some(ListAlgorithm::FastSscl),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub list_size: Option<usize>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<usize>,
    /// CRC width per partition, default polynomials; 0 for none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_crcs: Option<Vec<usize>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub ebn0_list: Vec<f64>,
    pub seed: u64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection {
            ebn0_list: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeConfig,
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub quantizer: Quantizer,
}

fn field_error(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        e @ Error::Config { .. } => e,
        e => Error::config(field, e.to_string()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    /// Reads, validates and normalizes a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)?.normalized()
    }

    /// Replaces the seed with `POLARLAB_SEED` when that is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.channel.seed = v
                .trim()
                .parse()
                .map_err(|e| Error::config(SEED_ENV, format!("{v:?}: {e}")))?;
        }
        Ok(())
    }

    /// Checks every field and fills the defaults that apply to the chosen
    /// code family and algorithm. Fields that do not apply are rejected.
    pub fn normalized(&self) -> Result<Self> {
        let mut cfg = self.clone();
        match cfg.code.family {
            CodeFamily::Polar => cfg.normalize_polar()?,
            CodeFamily::Ldpc => cfg.normalize_ldpc()?,
        }
        if cfg.channel.ebn0_list.is_empty() {
            return Err(Error::config("channel.ebn0_list", "must not be empty"));
        }
        if cfg.channel.ebn0_list.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("channel.ebn0_list", "values must be finite"));
        }
        if cfg.channel.ebn0_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("channel.ebn0_list", "must be strictly ascending"));
        }
        if cfg.stop.min_frame_errors == 0 {
            return Err(Error::config("stop.min_errors", "must be at least 1"));
        }
        if cfg.stop.max_frames == 0 {
            return Err(Error::config("stop.max_frames", "must be at least 1"));
        }
        let q = &cfg.quantizer;
        for (name, f) in [("channel", q.channel), ("internal", q.internal), ("pm", q.pm)] {
            if !(2..=32).contains(&f.total_bits) || f.frac_bits >= f.total_bits {
                return Err(Error::config(
                    format!("quantizer.{name}"),
                    "needs 2..=32 total bits and fewer fractional bits",
                ));
            }
        }
        if !(q.channel_gain > 0.0 && q.channel_gain.is_finite()) {
            return Err(Error::config("quantizer.channel_gain", "must be positive"));
        }
        Ok(cfg)
    }

    fn normalize_polar(&mut self) -> Result<()> {
        let code = &mut self.code;
        let n = code.n.ok_or_else(|| Error::config("code.N", "required for polar codes"))?;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::config("code.N", format!("{n} is not a power of two above 1")));
        }
        let k = code.k.ok_or_else(|| Error::config("code.K", "required for polar codes"))?;
        if k == 0 || k > n {
            return Err(Error::config("code.K", format!("{k} outside 1..={n}")));
        }
        if code.rate.is_some() || code.variant.is_some() {
            return Err(Error::config("code", "rate/variant apply to LDPC codes only"));
        }
        let construction = *code.construction.get_or_insert_default();
        match construction {
            ConstructionKind::File => {
                if code.reliability_file.is_none() {
                    return Err(Error::config("code.reliability_file", "required for construction \"file\""));
                }
                code.design_ebn0_db = None;
            }
            _ => {
                if code.reliability_file.is_some() {
                    return Err(Error::config("code.reliability_file", "only used with construction \"file\""));
                }
                let d = *code.design_ebn0_db.get_or_insert(DEFAULT_DESIGN_EBN0_DB);
                if !d.is_finite() {
                    return Err(Error::config("code.design_ebn0_db", "must be finite"));
                }
            }
        }
        if let Some(crc) = &mut code.crc {
            let spec = crc.spec("code.crc")?;
            crc.poly = Some(spec.poly());
            crc.init = Some(spec.init());
            if k <= crc.width {
                return Err(Error::config("code.K", format!("{k} leaves no payload beside a {}-bit CRC", crc.width)));
            }
        }

        let dec = &mut self.decoder;
        if dec.iterations.is_some() || dec.norm.is_some() {
            return Err(Error::config("decoder", "T/norm apply to LDPC decoding only"));
        }
        match dec.algorithm {
            Algorithm::LdpcNms => {
                return Err(Error::config("decoder.algorithm", "ldpc_nms needs an LDPC code"));
            }
            Algorithm::Sc => {
                if dec.list_size.is_some_and(|l| l != 1) {
                    return Err(Error::config("decoder.L", "SC has list size 1"));
                }
                dec.list_size = None;
            }
            _ => {
                let l = dec.list_size.ok_or_else(|| Error::config("decoder.L", "required for list decoding"))?;
                if l == 0 {
                    return Err(Error::config("decoder.L", "must be at least 1"));
                }
            }
        }
        if dec.algorithm == Algorithm::Pscl {
            let p = dec.partitions.ok_or_else(|| Error::config("decoder.P", "required for pscl"))?;
            if p == 0 || !p.is_power_of_two() || p > n {
                return Err(Error::config("decoder.P", format!("{p} must be a power of two dividing N = {n}")));
            }
            if code.crc.is_some() {
                return Err(Error::config("code.crc", "pscl takes its CRCs from decoder.partition_crcs"));
            }
            let crcs = dec.partition_crcs.get_or_insert_with(|| vec![0; p]);
            if crcs.len() != p {
                return Err(Error::config(
                    "decoder.partition_crcs",
                    format!("{} entries for {p} partitions", crcs.len()),
                ));
            }
            for &w in crcs.iter() {
                if w > 0 {
                    CrcSpec::default_for_width(w).map_err(|e| Error::config("decoder.partition_crcs", e.to_string()))?;
                }
            }
        } else if dec.partitions.is_some() || dec.partition_crcs.is_some() {
            return Err(Error::config("decoder.P", "only used by pscl"));
        }
        Ok(())
    }

    fn normalize_ldpc(&mut self) -> Result<()> {
        let code = &mut self.code;
        if code.construction.is_some()
            || code.design_ebn0_db.is_some()
            || code.reliability_file.is_some()
            || code.crc.is_some()
            || code.k.is_some()
        {
            return Err(Error::config("code", "K/construction/CRC fields apply to polar codes only"));
        }
        match code.n {
            None | Some(576) => code.n = Some(SHIPPED_Z * 24),
            Some(n) => return Err(Error::config("code.N", format!("LDPC codes have N = 576, not {n}"))),
        }
        let rate = *code.rate.get_or_insert(LdpcRate::Half);
        let variant = *code.variant.get_or_insert_default();
        if rate == LdpcRate::Half && variant == Variant::B {
            return Err(Error::config("code.variant", "rate 1/2 has only variant A"));
        }
        let dec = &mut self.decoder;
        if dec.algorithm != Algorithm::LdpcNms {
            return Err(Error::config("decoder.algorithm", "LDPC codes are decoded with ldpc_nms"));
        }
        if dec.list_size.is_some() || dec.partitions.is_some() || dec.partition_crcs.is_some() {
            return Err(Error::config("decoder", "L/P apply to polar decoding only"));
        }
        if *dec.iterations.get_or_insert(DEFAULT_LDPC_ITERATIONS) == 0 {
            return Err(Error::config("decoder.T", "must be at least 1"));
        }
        let norm = *dec.norm.get_or_insert(DEFAULT_NORM);
        if !(norm > 0.0 && norm <= 1.0) {
            return Err(Error::config("decoder.norm", format!("{norm} outside (0, 1]")));
        }
        Ok(())
    }

    /// Compact JSON of the config, fields in declaration order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The polar code described by a normalized config.
    pub fn polar_code(&self) -> Result<PolarCode> {
        let code = &self.code;
        let (n, k) = match (code.family, code.n, code.k) {
            (CodeFamily::Polar, Some(n), Some(k)) => (n, k),
            _ => return Err(Error::config("code", "not a normalized polar code")),
        };
        let method = match code.construction.unwrap_or_default() {
            ConstructionKind::Ga => Construction::GaussianApproximation,
            ConstructionKind::Bhattacharyya => Construction::Bhattacharyya,
            ConstructionKind::File => Construction::FromFile(
                code.reliability_file
                    .clone()
                    .ok_or_else(|| Error::config("code.reliability_file", "missing"))?,
            ),
        };
        let design = code.design_ebn0_db.unwrap_or(DEFAULT_DESIGN_EBN0_DB);
        let order = construct_reliability(n, design, k as f64 / n as f64, &method).map_err(field_error("code"))?;
        let crc = code.crc.as_ref().map(|c| c.spec("code.crc")).transpose()?;
        PolarCode::new(n, k, order, crc).map_err(field_error("code"))
    }

    /// Code, decoder and quantizer of a normalized config.
    pub fn codec(&self) -> Result<Codec> {
        let dec = &self.decoder;
        if self.code.family == CodeFamily::Ldpc {
            let rate = self.code.rate.unwrap_or(LdpcRate::Half);
            let code = load_base_matrix(rate, self.code.variant.unwrap_or_default(), SHIPPED_Z)
                .map_err(field_error("code"))?;
            return Codec::ldpc(
                code,
                dec.iterations.unwrap_or(DEFAULT_LDPC_ITERATIONS),
                dec.norm.unwrap_or(DEFAULT_NORM),
                self.quantizer,
            )
            .map_err(field_error("decoder"));
        }
        let code = self.polar_code()?;
        let list_size = dec.list_size.unwrap_or(1);
        let decoder = match dec.algorithm {
            Algorithm::Sc => PolarDecoder::Sc,
            Algorithm::Pscl => {
                let widths = dec.partition_crcs.clone().unwrap_or_default();
                let plan = PartitionPlan::with_widths(&code, &widths).map_err(field_error("decoder.P"))?;
                if plan.payload_len() == 0 {
                    return Err(Error::config("decoder.partition_crcs", "CRCs leave no payload"));
                }
                PolarDecoder::Pscl { list_size, plan }
            }
            Algorithm::LdpcNms => return Err(Error::config("decoder.algorithm", "ldpc_nms needs an LDPC code")),
            other => PolarDecoder::List {
                algorithm: other.list().expect("list algorithm"),
                list_size,
            },
        };
        Codec::polar(code, decoder, self.quantizer).map_err(field_error("decoder"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_json(text)?.normalized()
    }

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn minimal_config_is_fully_defaulted() {
        let cfg = parse(r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"scl","L":4}}"#).unwrap();
        assert_eq!(cfg.code.construction, Some(ConstructionKind::Ga));
        assert_eq!(cfg.code.design_ebn0_db, Some(2.0));
        assert_eq!(cfg.stop, StopRule::default());
        assert_eq!(cfg.channel.seed, DEFAULT_SEED);
        assert_eq!(
            cfg.canonical_json(),
            concat!(
                r#"{"code":{"family":"polar","N":256,"K":128,"construction":"ga","design_ebn0_db":2.0},"#,
                r#""decoder":{"algorithm":"scl","L":4},"channel":{"ebn0_list":[1.0,1.5,2.0,2.5,3.0],"seed":1},"#,
                r#""stop":{"min_errors":100,"max_frames":10000000},"quantizer":{"mode":"float","#,
                r#""channel":{"total_bits":4,"frac_bits":2},"internal":{"total_bits":6,"frac_bits":2},"#,
                r#""pm":{"total_bits":8,"frac_bits":2},"channel_gain":0.25}}"#
            )
        );
        // normalizing twice changes nothing
        assert_eq!(cfg.normalized().unwrap(), cfg);
        assert_eq!(cfg.fingerprint().len(), 64);
    }

    #[test]
    fn crc_defaults_are_filled() {
        let cfg = parse(r#"{"code":{"N":64,"K":32,"crc":{"width":8}},"decoder":{"algorithm":"sc"}}"#).unwrap();
        assert_eq!(
            cfg.code.crc,
            Some(CrcConfig {
                width: 8,
                poly: Some(0x07),
                init: Some(0)
            })
        );
        assert_eq!(cfg.codec().unwrap().series_name(), "SC-CRC8");
    }

    #[test]
    fn ldpc_defaults() {
        let cfg = parse(r#"{"code":{"family":"ldpc"},"decoder":{"algorithm":"ldpc_nms"}}"#).unwrap();
        assert_eq!(cfg.code.rate, Some(LdpcRate::Half));
        assert_eq!(cfg.code.variant, Some(Variant::A));
        assert_eq!(cfg.decoder.iterations, Some(20));
        assert_eq!(cfg.decoder.norm, Some(0.75));
        assert_eq!(cfg.codec().unwrap().series_name(), "LDPC-T20");
    }

    #[test]
    fn field_named_errors() {
        let cases = [
            (r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"scl","L":0}}"#, "decoder.L"),
            (r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"pscl","L":2,"P":3}}"#, "decoder.P"),
            (r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"pscl","L":2,"P":512}}"#, "decoder.P"),
            (r#"{"code":{"N":200,"K":128},"decoder":{"algorithm":"sc"}}"#, "code.N"),
            (r#"{"code":{"N":256,"K":300},"decoder":{"algorithm":"sc"}}"#, "code.K"),
            (r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"scl"}}"#, "decoder.L"),
            (r#"{"code":{"N":256,"K":128},"decoder":{"algorithm":"ldpc_nms"}}"#, "decoder.algorithm"),
            (r#"{"code":{"family":"ldpc"},"decoder":{"algorithm":"ldpc_nms","T":0}}"#, "decoder.T"),
            (r#"{"code":{"family":"ldpc","rate":"1/2","variant":"B"},"decoder":{"algorithm":"ldpc_nms"}}"#, "code.variant"),
            (r#"{"code":{"N":64,"K":32},"decoder":{"algorithm":"sc"},"channel":{"ebn0_list":[2.0,1.0]}}"#, "channel.ebn0_list"),
            (r#"{"code":{"N":64,"K":32},"decoder":{"algorithm":"sc"},"stop":{"min_errors":0}}"#, "stop.min_errors"),
            (r#"{"code":{"N":64,"K":32,"crc":{"width":6}},"decoder":{"algorithm":"sc"}}"#, "code.crc"),
            (r#"{"code":{"N":64,"K":32},"decoder":{"algorithm":"sc"},"bogus":1}"#, "config"),
            (r#"{"code":{"N":64,"K":32,"colour":"red"},"decoder":{"algorithm":"sc"}}"#, "config"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(parse(text).unwrap_err()), field, "{text}");
        }
    }

    #[test]
    fn pscl_codec() {
        let cfg = parse(
            r#"{"code":{"N":512,"K":256},"decoder":{"algorithm":"pscl","L":2,"P":2,"partition_crcs":[8,8]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.codec().unwrap().series_name(), "PSCL(2,2)-CRC(8,8)");
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = parse(r#"{"code":{"N":64,"K":32},"decoder":{"algorithm":"sc"}}"#).unwrap();
        let b = parse(r#"{"decoder":{"algorithm":"sc"},"code":{"K":32,"N":64}}"#).unwrap();
        let c = parse(r#"{"code":{"N":64,"K":33},"decoder":{"algorithm":"sc"}}"#).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
