use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A CRC generator over GF(2).
///
/// `poly` holds the generator without its implicit leading `x^width` term,
/// so CRC-8 `x^8 + x^2 + x + 1` is stored as `0x07`. The shift register is
/// loaded with `init` before the message is clocked in, most significant
/// bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrcSpec {
    width: usize,
    poly: u64,
    init: u64,
}

impl CrcSpec {
    pub const MAX_WIDTH: usize = 32;

    pub fn new(width: usize, poly: u64, init: u64) -> Result<Self> {
        if width == 0 || width % 4 != 0 || width > Self::MAX_WIDTH {
            return Err(Error::InvalidCrc(format!(
                "width {width} must be a nonzero multiple of four not above {}",
                Self::MAX_WIDTH
            )));
        }
        let mask = Self::mask_for(width);
        if poly & !mask != 0 || init & !mask != 0 {
            return Err(Error::InvalidCrc(format!(
                "polynomial {poly:#x} or initial value {init:#x} wider than {width} bits"
            )));
        }
        if poly & 1 == 0 {
            return Err(Error::InvalidCrc(format!(
                "polynomial {poly:#x} must have its constant term set"
            )));
        }
        Ok(CrcSpec { width, poly, init })
    }

    /// The default generator for a given width, with a zero initial value.
    ///
    /// CRC-4 is `x^4 + x + 1` and CRC-8 is `x^8 + x^2 + x + 1`; the wider
    /// entries are the usual CRC-12, CRC-16-CCITT, CRC-24A and CRC-32
    /// generators.
    pub fn default_for_width(width: usize) -> Result<Self> {
        let poly = match width {
            4 => 0x3,
            8 => 0x07,
            12 => 0x80F,
            16 => 0x1021,
            24 => 0x86_4CFB,
            32 => 0x04C1_1DB7,
            _ => {
                return Err(Error::InvalidCrc(format!(
                    "no default polynomial for width {width}"
                )))
            }
        };
        Self::new(width, poly, 0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn init(&self) -> u64 {
        self.init
    }

    fn mask_for(width: usize) -> u64 {
        (1u64 << width) - 1
    }

    /// Remainder of `message * x^width` modulo the generator, register
    /// preloaded with the initial value. Bits are returned MSB first.
    pub fn compute(&self, message: &[u8]) -> Vec<u8> {
        let reg = self.register(message);
        (0..self.width)
            .rev()
            .map(|i| ((reg >> i) & 1) as u8)
            .collect()
    }

    fn register(&self, message: &[u8]) -> u64 {
        let mask = Self::mask_for(self.width);
        let top = self.width - 1;
        let mut reg = self.init;
        for &bit in message {
            let feedback = ((reg >> top) & 1) ^ u64::from(bit & 1);
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= self.poly;
            }
        }
        reg
    }

    /// True iff the trailing `width` bits equal the CRC of the prefix.
    pub fn check(&self, message_with_crc: &[u8]) -> Result<bool> {
        if message_with_crc.len() < self.width {
            return Err(Error::LengthMismatch {
                expected: self.width,
                actual: message_with_crc.len(),
            });
        }
        let split = message_with_crc.len() - self.width;
        let (message, tail) = message_with_crc.split_at(split);
        let reg = self.register(message);
        Ok(tail
            .iter()
            .enumerate()
            .all(|(i, &b)| ((reg >> (self.width - 1 - i)) & 1) as u8 == (b & 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain long division of `message * x^w` by the full generator.
    fn long_division(message: &[u8], width: usize, poly: u64) -> Vec<u8> {
        let full: Vec<u8> = std::iter::once(1)
            .chain((0..width).rev().map(|i| ((poly >> i) & 1) as u8))
            .collect();
        let mut dividend: Vec<u8> = message.to_vec();
        dividend.extend(std::iter::repeat(0).take(width));
        for i in 0..message.len() {
            if dividend[i] == 1 {
                for (j, &g) in full.iter().enumerate() {
                    dividend[i + j] ^= g;
                }
            }
        }
        dividend[message.len()..].to_vec()
    }

    #[test]
    fn zero_message_has_zero_crc() {
        let crc = CrcSpec::default_for_width(8).unwrap();
        assert_eq!(crc.compute(&[0; 20]), vec![0; 8]);
        let mut framed = vec![0u8; 20];
        framed.extend(crc.compute(&[0; 20]));
        assert!(crc.check(&framed).unwrap());
    }

    #[test]
    fn generator_divides_itself() {
        let crc = CrcSpec::default_for_width(8).unwrap();
        // x^8 + x^2 + x + 1
        let generator = [1, 0, 0, 0, 0, 0, 1, 1, 1];
        assert_eq!(crc.compute(&generator), vec![0; 8]);
    }

    #[test]
    fn crc8_matches_long_division() {
        let crc = CrcSpec::default_for_width(8).unwrap();
        let msg = [1, 1, 0, 1, 0, 0, 1, 0];
        let expected = long_division(&msg, 8, 0x07);
        assert_eq!(crc.compute(&msg), expected);
        // frozen from the division oracle: 0xD2 * x^8 mod (x^8+x^2+x+1)
        assert_eq!(expected, vec![0, 0, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn every_single_flip_is_detected() {
        let crc = CrcSpec::default_for_width(8).unwrap();
        let msg: Vec<u8> = (0..32).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let mut framed = msg.clone();
        framed.extend(crc.compute(&msg));
        assert!(crc.check(&framed).unwrap());
        for i in 0..framed.len() {
            let mut flipped = framed.clone();
            flipped[i] ^= 1;
            assert!(!crc.check(&flipped).unwrap(), "flip at {i} undetected");
        }
    }

    #[test]
    fn nonzero_init_changes_remainder() {
        let plain = CrcSpec::new(8, 0x07, 0).unwrap();
        let seeded = CrcSpec::new(8, 0x07, 0xFF).unwrap();
        assert_ne!(plain.compute(&[0; 8]), seeded.compute(&[0; 8]));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CrcSpec::new(6, 0x3, 0).is_err());
        assert!(CrcSpec::new(8, 0x06, 0).is_err());
        assert!(CrcSpec::new(4, 0x13, 0).is_err());
        assert!(CrcSpec::new(8, 0x07, 0).unwrap().check(&[1, 0]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn appended_crc_always_checks(msg in proptest::collection::vec(0u8..2, 0..200), w in 1usize..5usize) {
            let crc = CrcSpec::default_for_width(w * 4).unwrap();
            let mut framed = msg.clone();
            framed.extend(crc.compute(&msg));
            proptest::prop_assert!(crc.check(&framed).unwrap());
            proptest::prop_assert_eq!(crc.compute(&msg), long_division(&msg, w * 4, crc.poly()));
        }
    }
}
