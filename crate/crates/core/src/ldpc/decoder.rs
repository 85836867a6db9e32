use super::LdpcCode;

/// Compressed check-to-variable messages of one check row: the two
/// smallest incoming magnitudes, where the smallest came from, and the
/// sign product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckState {
    pub min1: f64,
    pub min2: f64,
    /// Edge index within the row that supplied `min1`.
    pub min1_pos: usize,
    /// Product of incoming signs, `+1.0` or `-1.0`.
    pub sign: f64,
}

impl Default for CheckState {
    fn default() -> Self {
        CheckState {
            min1: 0.0,
            min2: 0.0,
            min1_pos: 0,
            sign: 1.0,
        }
    }
}

impl CheckState {
    /// Summarises the variable-to-check messages of one row.
    pub fn from_messages(msgs: &[f64]) -> Self {
        let mut st = CheckState {
            min1: f64::INFINITY,
            min2: f64::INFINITY,
            min1_pos: 0,
            sign: 1.0,
        };
        for (i, &m) in msgs.iter().enumerate() {
            let a = m.abs();
            if m < 0.0 {
                st.sign = -st.sign;
            }
            if a < st.min1 {
                st.min2 = st.min1;
                st.min1 = a;
                st.min1_pos = i;
            } else if a < st.min2 {
                st.min2 = a;
            }
        }
        st
    }

    /// Outgoing message on edge `pos` whose incoming message had sign
    /// `incoming_negative`, scaled by `norm`.
    pub fn message(&self, pos: usize, incoming_negative: bool, norm: f64) -> f64 {
        let magnitude = if pos == self.min1_pos { self.min2 } else { self.min1 };
        let sign = if incoming_negative { -self.sign } else { self.sign };
        if magnitude.is_finite() {
            sign * norm * magnitude
        } else {
            // degree-one check: no other edge to hear from
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdpcOutput {
    /// Hard decision on the whole codeword.
    pub bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
}

impl LdpcOutput {
    pub fn info_bits<'a>(&'a self, code: &LdpcCode) -> &'a [u8] {
        &self.bits[..code.info_len()]
    }
}

/// Reusable layered normalized min-sum decoder.
#[derive(Debug, Clone)]
pub struct NmsDecoder {
    code: LdpcCode,
    max_iterations: usize,
    norm: f64,
    early_stop: bool,
    posterior: Vec<f64>,
    states: Vec<CheckState>,
    negative: Vec<bool>,
    scratch: Vec<f64>,
}

impl NmsDecoder {
    /// Panics unless `max_iterations ≥ 1` and `0 < norm ≤ 1`.
    pub fn new(code: &LdpcCode, max_iterations: usize, norm: f64) -> Self {
        assert!(max_iterations >= 1, "at least one iteration");
        assert!(norm > 0.0 && norm <= 1.0, "normalization {norm} outside (0, 1]");
        NmsDecoder {
            code: code.clone(),
            max_iterations,
            norm,
            early_stop: true,
            posterior: vec![0.0; code.len()],
            states: vec![CheckState::default(); code.checks()],
            negative: vec![false; code.edge_count()],
            scratch: Vec::new(),
        }
    }

    /// Disables the syndrome check between iterations.
    pub fn without_early_stop(mut self) -> Self {
        self.early_stop = false;
        self
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    /// A-posteriori LLRs after the last decode.
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    pub fn decode(&mut self, channel_llrs: &[f64]) -> LdpcOutput {
        assert_eq!(channel_llrs.len(), self.code.len(), "LLR count");
        self.posterior.copy_from_slice(channel_llrs);
        self.states.fill(CheckState::default());
        self.negative.fill(false);

        let mut bits = vec![0u8; self.code.len()];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iterations {
            iterations += 1;
            // layers in natural row-block order
            for row in 0..self.code.checks() {
                self.update_row(row);
            }
            if self.early_stop || iterations == self.max_iterations {
                for (b, &l) in bits.iter_mut().zip(&self.posterior) {
                    *b = u8::from(l < 0.0);
                }
                converged = syndrome_check(&self.code, &bits);
                if converged && self.early_stop {
                    break;
                }
            }
        }
        LdpcOutput {
            bits,
            iterations,
            converged,
        }
    }

    fn update_row(&mut self, row: usize) {
        let edges = self.code.edges(row);
        let vars = &self.code.cols[edges.clone()];
        let old = self.states[row];
        self.scratch.clear();
        for (pos, (&v, &neg)) in vars.iter().zip(&self.negative[edges.clone()]).enumerate() {
            self.scratch.push(self.posterior[v] - old.message(pos, neg, self.norm));
        }
        let new = CheckState::from_messages(&self.scratch);
        for (pos, ((&v, neg), &t)) in vars
            .iter()
            .zip(&mut self.negative[edges])
            .zip(&self.scratch)
            .enumerate()
        {
            *neg = t < 0.0;
            self.posterior[v] = t + new.message(pos, *neg, self.norm);
        }
        self.states[row] = new;
    }
}

/// One-shot decode; see [`NmsDecoder`].
pub fn nms_layered_decode(
    code: &LdpcCode,
    channel_llrs: &[f64],
    max_iterations: usize,
    norm: f64,
) -> LdpcOutput {
    NmsDecoder::new(code, max_iterations, norm).decode(channel_llrs)
}

/// True iff every parity check is satisfied by `bits`.
pub fn syndrome_check(code: &LdpcCode, bits: &[u8]) -> bool {
    assert_eq!(bits.len(), code.len(), "bit count");
    (0..code.checks()).all(|r| code.row(r).iter().fold(0u8, |acc, &v| acc ^ bits[v]) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{load_base_matrix, LdpcRate, Variant, DEFAULT_NORM};
    use crate::testutil::noisy_llrs;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent flooding min-sum: all check messages from the same
    /// variable-to-check snapshot.
    fn flooding(code: &LdpcCode, llrs: &[f64], iterations: usize, norm: f64) -> Vec<f64> {
        let rows: Vec<&[usize]> = (0..code.checks()).map(|r| code.row(r)).collect();
        let mut c2v: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        let mut posterior = llrs.to_vec();
        for _ in 0..iterations {
            let v2c: Vec<Vec<f64>> = rows
                .iter()
                .zip(&c2v)
                .map(|(r, m)| r.iter().zip(m).map(|(&v, &c)| posterior[v] - c).collect())
                .collect();
            for (r, incoming) in v2c.iter().enumerate() {
                for i in 0..incoming.len() {
                    let others = incoming.iter().enumerate().filter(|&(j, _)| j != i);
                    let sign: f64 = others.clone().map(|(_, &m)| if m < 0.0 { -1.0 } else { 1.0 }).product();
                    let magnitude = others.map(|(_, m)| m.abs()).fold(f64::INFINITY, f64::min);
                    c2v[r][i] = if magnitude.is_finite() { norm * sign * magnitude } else { 0.0 };
                }
            }
            posterior = llrs.to_vec();
            for (r, row) in rows.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    posterior[v] += c2v[r][i];
                }
            }
        }
        posterior
    }

    /// 6 x 12 toy code whose checks share no variables, one layer per row.
    fn toy() -> LdpcCode {
        let groups: [&[usize]; 6] = [&[0, 1, 2], &[3, 4, 5, 6], &[7, 8], &[9], &[10], &[11]];
        let base = groups
            .iter()
            .map(|g| (0..12).map(|c| if g.contains(&c) { 0 } else { -1 }).collect())
            .collect();
        LdpcCode::from_base(base, 1).unwrap()
    }

    #[test]
    fn toy_layered_equals_flooding() {
        let code = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            // dyadic grid keeps both schedules' arithmetic exact
            let llrs: Vec<f64> = noisy_llrs(&[0; 12], 0.5, 0.0, &mut rng)
                .into_iter()
                .map(|l| (l * 16.0).round() / 16.0)
                .collect();
            for t in 1..=3 {
                let mut dec = NmsDecoder::new(&code, t, DEFAULT_NORM).without_early_stop();
                dec.decode(&llrs);
                assert_eq!(dec.posterior(), flooding(&code, &llrs, t, DEFAULT_NORM).as_slice());
            }
        }
    }

    #[test]
    fn noiseless_codeword_converges_at_once() {
        let code = load_base_matrix(LdpcRate::Half, Variant::A, 24).unwrap();
        let out = nms_layered_decode(&code, &vec![4.0; 576], 20, DEFAULT_NORM);
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert!(out.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn single_flip_is_corrected_like_flooding() {
        let code = load_base_matrix(LdpcRate::TwoThirds, Variant::A, 24).unwrap();
        for v in [0, 100, 383, 500] {
            let mut llrs = vec![6.0; 576];
            llrs[v] = -6.0;
            let out = nms_layered_decode(&code, &llrs, 5, DEFAULT_NORM);
            assert!(out.converged, "variable {v}");
            assert!(out.bits.iter().all(|&b| b == 0));
            assert!(flooding(&code, &llrs, 5, DEFAULT_NORM).iter().all(|&l| l > 0.0));
        }
    }

    #[test]
    fn syndrome_examples() {
        let code = load_base_matrix(LdpcRate::Half, Variant::A, 24).unwrap();
        let mut bits = vec![0u8; 576];
        assert!(syndrome_check(&code, &bits));
        bits[17] = 1;
        assert!(!syndrome_check(&code, &bits));
    }

    #[test]
    fn early_stop_keeps_the_converged_word() {
        let code = load_base_matrix(LdpcRate::Half, Variant::A, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut early = NmsDecoder::new(&code, 20, DEFAULT_NORM);
        let mut full = NmsDecoder::new(&code, 20, DEFAULT_NORM).without_early_stop();
        let mut converged = 0;
        for _ in 0..100 {
            let llrs = noisy_llrs(&[0; 576], 0.5, 2.0, &mut rng);
            let a = early.decode(&llrs);
            if a.converged {
                converged += 1;
                assert_eq!(a.bits, full.decode(&llrs).bits);
            }
        }
        assert!(converged > 90);
    }

    proptest! {
        #[test]
        fn compressed_messages_match_brute_force(
            msgs in prop::collection::vec(-20.0f64..20.0, 2..12),
            norm in 0.1f64..1.0,
        ) {
            let st = CheckState::from_messages(&msgs);
            prop_assert!(st.min1 <= st.min2);
            for (i, &m) in msgs.iter().enumerate() {
                let others = msgs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x);
                let sign: f64 = others.clone().map(|x| if x < 0.0 { -1.0 } else { 1.0 }).product();
                let magnitude = others.map(f64::abs).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(st.message(i, m < 0.0, norm), norm * sign * magnitude);
            }
        }
    }
}
