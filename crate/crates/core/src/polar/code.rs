use super::construction::validate_permutation;
use super::{log2_exact, CrcSpec};
use crate::{Error, Result};

/// A polar code `PC(N, K)` with an optional outer CRC.
///
/// `K` counts every non-frozen position, so the CRC bits live inside `K`
/// and the payload is `K - crc.width` bits long.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    stages: u32,
    k: usize,
    frozen: Vec<bool>,
    reliability: Vec<usize>,
    info_positions: Vec<usize>,
    crc: Option<CrcSpec>,
}

impl PolarCode {
    /// Freezes the `N - K` least reliable indices of `reliability`.
    pub fn new(
        len: usize,
        k: usize,
        reliability: Vec<usize>,
        crc: Option<CrcSpec>,
    ) -> Result<Self> {
        let stages = log2_exact(len)?;
        validate_permutation(&reliability, len)?;
        let crc_width = crc.map_or(0, |c| c.width());
        if k == 0 || k > len || k <= crc_width {
            return Err(Error::InvalidRate {
                n: len,
                k,
                crc_width,
            });
        }
        let mut frozen = vec![false; len];
        for &i in &reliability[..len - k] {
            frozen[i] = true;
        }
        let info_positions = (0..len).filter(|&i| !frozen[i]).collect();
        Ok(PolarCode {
            stages,
            k,
            frozen,
            reliability,
            info_positions,
            crc,
        })
    }

    /// Builds a code from an explicit frozen mask. The reliability order is
    /// synthesized as frozen indices first, then information indices, each
    /// in ascending order.
    pub fn from_frozen_mask(frozen: Vec<bool>, crc: Option<CrcSpec>) -> Result<Self> {
        let len = frozen.len();
        let order: Vec<usize> = (0..len)
            .filter(|&i| frozen[i])
            .chain((0..len).filter(|&i| !frozen[i]))
            .collect();
        let k = frozen.iter().filter(|&&f| !f).count();
        Self::new(len, k, order, crc)
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn stages(&self) -> u32 {
        self.stages
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len() as f64
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn reliability(&self) -> &[usize] {
        &self.reliability
    }

    /// Non-frozen indices in ascending natural order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn crc_width(&self) -> usize {
        self.crc.map_or(0, |c| c.width())
    }

    pub fn payload_len(&self) -> usize {
        self.k - self.crc_width()
    }

    /// Same frozen set, different CRC.
    pub fn with_crc(&self, crc: Option<CrcSpec>) -> Result<Self> {
        Self::new(self.len(), self.k, self.reliability.clone(), crc)
    }

    /// `x = u G^{(x)n}` over GF(2). Frozen positions of `u` must be zero.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: u.len(),
            });
        }
        if let Some(i) = (0..u.len()).find(|&i| self.frozen[i] && u[i] != 0) {
            return Err(Error::FrozenViolation(i));
        }
        let mut x = u.to_vec();
        polar_transform(&mut x);
        Ok(x)
    }

    /// Writes `payload || crc(payload)` onto the information positions in
    /// ascending index order; frozen positions stay zero.
    pub fn place_payload(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.payload_len() {
            return Err(Error::LengthMismatch {
                expected: self.payload_len(),
                actual: payload.len(),
            });
        }
        let mut u = vec![0u8; self.len()];
        let crc_bits = self.crc.map(|c| c.compute(payload)).unwrap_or_default();
        for (&pos, &bit) in self
            .info_positions
            .iter()
            .zip(payload.iter().chain(crc_bits.iter()))
        {
            u[pos] = bit;
        }
        Ok(u)
    }

    /// The `K` information-position bits of `u` (payload followed by CRC).
    pub fn info_bits(&self, u: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&i| u[i]).collect()
    }

    /// The payload part of `u`, without CRC bits.
    pub fn extract_payload(&self, u: &[u8]) -> Vec<u8> {
        self.info_positions[..self.payload_len()]
            .iter()
            .map(|&i| u[i])
            .collect()
    }

    /// Whether the information bits of `u` pass the CRC (true when the code
    /// has none).
    pub fn crc_passes(&self, u: &[u8]) -> bool {
        match &self.crc {
            None => true,
            Some(crc) => crc.check(&self.info_bits(u)).unwrap_or(false),
        }
    }
}

/// In-place butterfly computing `v G^{(x)n}` with `G = [[1,0],[1,1]]`,
/// natural index order. The transform is its own inverse.
pub fn polar_transform(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let len = bits.len();
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1_code(crc: Option<CrcSpec>, k: usize) -> PolarCode {
        PolarCode::new(8, k, vec![0, 1, 2, 4, 3, 5, 6, 7], crc).unwrap()
    }

    /// Dense `G^{(x)n}` by repeated Kronecker products.
    fn kronecker(n: u32) -> Vec<Vec<u8>> {
        let mut g = vec![vec![1u8]];
        for _ in 0..n {
            let m = g.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for (r, row) in g.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    // [[G, 0], [G, G]]
                    next[r][c] = v;
                    next[m + r][c] = v;
                    next[m + r][m + c] = v;
                }
            }
            g = next;
        }
        g
    }

    fn dense_encode(u: &[u8]) -> Vec<u8> {
        let g = kronecker(u.len().trailing_zeros());
        (0..u.len())
            .map(|c| (0..u.len()).fold(0, |acc, r| acc ^ (u[r] & g[r][c])))
            .collect()
    }

    #[test]
    fn fig1_frozen_set() {
        let code = fig1_code(None, 4);
        let frozen: Vec<usize> = (0..8).filter(|&i| code.is_frozen(i)).collect();
        assert_eq!(frozen, vec![0, 1, 2, 4]);
        assert_eq!(code.info_positions(), &[3, 5, 6, 7]);
    }

    #[test]
    fn extreme_rates() {
        let full = fig1_code(None, 8);
        assert!(full.frozen().iter().all(|&f| !f));
        let single = PolarCode::new(8, 1, vec![5, 0, 1, 2, 4, 3, 7, 6], None).unwrap();
        assert_eq!(single.info_positions(), &[6]);
    }

    #[test]
    fn rejects_rate_below_crc() {
        let crc = CrcSpec::default_for_width(8).unwrap();
        let order: Vec<usize> = (0..16).collect();
        assert!(PolarCode::new(16, 8, order.clone(), Some(crc)).is_err());
        assert!(PolarCode::new(16, 9, order.clone(), Some(crc)).is_ok());
        assert!(PolarCode::new(16, 0, order.clone(), None).is_err());
        assert!(PolarCode::new(16, 17, order, None).is_err());
        assert!(PolarCode::new(12, 4, (0..12).collect(), None).is_err());
    }

    #[test]
    fn all_zero_encodes_to_zero() {
        let code = fig1_code(None, 4);
        assert_eq!(code.encode(&[0; 8]).unwrap(), vec![0; 8]);
    }

    #[test]
    fn unit_vector_encodes_to_generator_row() {
        let code = fig1_code(None, 4);
        let u = [0, 0, 0, 1, 0, 0, 0, 0];
        let g = kronecker(3);
        assert_eq!(code.encode(&u).unwrap(), g[3]);
        assert_eq!(g[3], vec![1, 1, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn frozen_violation_is_rejected() {
        let code = fig1_code(None, 4);
        assert!(matches!(
            code.encode(&[0, 1, 0, 0, 0, 0, 0, 0]),
            Err(Error::FrozenViolation(1))
        ));
    }

    #[test]
    fn transform_is_an_involution_exhaustively() {
        for len in [2usize, 4, 8, 16] {
            for word in 0..(1u32 << len) {
                let u: Vec<u8> = (0..len).map(|i| ((word >> i) & 1) as u8).collect();
                let mut x = u.clone();
                polar_transform(&mut x);
                assert_eq!(x, dense_encode(&u));
                polar_transform(&mut x);
                assert_eq!(x, u);
            }
        }
    }

    #[test]
    fn payload_lands_on_info_positions() {
        let code = fig1_code(None, 4);
        assert_eq!(
            code.place_payload(&[1, 0, 1, 1]).unwrap(),
            vec![0, 0, 0, 1, 0, 0, 1, 1]
        );
        assert!(code.place_payload(&[1, 0, 1]).is_err());
    }

    #[test]
    fn zero_payload_gives_zero_u() {
        let crc = CrcSpec::default_for_width(4).unwrap();
        let order: Vec<usize> = (0..16).collect();
        let code = PolarCode::new(16, 12, order, Some(crc)).unwrap();
        assert_eq!(code.place_payload(&[0; 8]).unwrap(), vec![0; 16]);
    }

    #[test]
    fn crc4_payload_placement_checks_by_division() {
        let crc = CrcSpec::default_for_width(4).unwrap();
        let order = crate::polar::construct_reliability(
            16,
            2.0,
            0.75,
            &crate::polar::Construction::GaussianApproximation,
        )
        .unwrap();
        let code = PolarCode::new(16, 12, order, Some(crc)).unwrap();
        let payload = [1, 0, 1, 1, 0, 0, 1, 0];
        let u = code.place_payload(&payload).unwrap();
        let info = code.info_bits(&u);
        assert_eq!(&info[..8], &payload);
        // remainder of (payload || crc) * 1 by x^4 + x + 1 must vanish
        let generator = [1u8, 0, 0, 1, 1];
        let mut rem = info.clone();
        for i in 0..8 {
            if rem[i] == 1 {
                for (j, &g) in generator.iter().enumerate() {
                    rem[i + j] ^= g;
                }
            }
        }
        assert!(rem.iter().all(|&b| b == 0));
        assert!(code.crc_passes(&u));
        assert_eq!(code.extract_payload(&u), payload);
    }

    proptest! {
        #[test]
        fn transform_is_linear(a in prop::collection::vec(0u8..2, 64), b in prop::collection::vec(0u8..2, 64)) {
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let (mut ta, mut tb, mut ts) = (a.clone(), b.clone(), sum);
            polar_transform(&mut ta);
            polar_transform(&mut tb);
            polar_transform(&mut ts);
            let expected: Vec<u8> = ta.iter().zip(&tb).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(ts, expected);
        }

        #[test]
        fn transform_involution_long(a in prop::collection::vec(0u8..2, 512)) {
            let mut x = a.clone();
            polar_transform(&mut x);
            polar_transform(&mut x);
            prop_assert_eq!(x, a);
        }

        #[test]
        fn frozen_mask_matches_reliability_partition(seed in any::<u64>(), k in 1usize..=64) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..64).collect();
            order.shuffle(&mut rng);
            let code = PolarCode::new(64, k, order.clone(), None).unwrap();
            prop_assert_eq!(code.frozen().iter().filter(|&&f| f).count(), 64 - k);
            for (rank, &i) in order.iter().enumerate() {
                prop_assert_eq!(code.is_frozen(i), rank < 64 - k);
            }
        }

        #[test]
        fn placed_payload_passes_crc(payload in prop::collection::vec(0u8..2, 24)) {
            let crc = CrcSpec::default_for_width(8).unwrap();
            let code = PolarCode::new(64, 32, (0..64).collect(), Some(crc)).unwrap();
            let u = code.place_payload(&payload).unwrap();
            prop_assert!(code.crc_passes(&u));
            prop_assert_eq!(code.extract_payload(&u), payload);
        }
    }
}
