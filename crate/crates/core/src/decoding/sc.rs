use super::arith::{Arithmetic, Float};
use super::kernels::leaf_decide;
use crate::polar::PolarCode;

/// Plain successive-cancellation decoder with one LLR buffer per stage.
#[derive(Debug, Clone)]
pub struct ScDecoder<A: Arithmetic = Float> {
    frozen: Vec<bool>,
    arith: A,
    alpha: Vec<Vec<f64>>,
    u_hat: Vec<u8>,
    x_hat: Vec<u8>,
}

impl ScDecoder<Float> {
    pub fn new(code: &PolarCode) -> Self {
        Self::with_arithmetic(code, Float::for_length(code.len()))
    }
}

impl<A: Arithmetic> ScDecoder<A> {
    pub fn with_arithmetic(code: &PolarCode, arith: A) -> Self {
        let n = code.stages() as usize;
        ScDecoder {
            frozen: code.frozen().to_vec(),
            arith,
            alpha: (0..=n).map(|s| vec![0.0; 1 << s]).collect(),
            u_hat: vec![0; code.len()],
            x_hat: vec![0; code.len()],
        }
    }

    /// Decodes one frame and returns the estimated `u` vector.
    ///
    /// Panics if `channel_llrs` does not have the code length.
    pub fn decode(&mut self, channel_llrs: &[f64]) -> &[u8] {
        let n = self.alpha.len() - 1;
        assert_eq!(channel_llrs.len(), 1 << n, "channel LLR count");
        for (dst, &src) in self.alpha[n].iter_mut().zip(channel_llrs) {
            *dst = self.arith.load(src);
        }
        let mut x_hat = std::mem::take(&mut self.x_hat);
        self.node(n, 0, &mut x_hat);
        self.x_hat = x_hat;
        &self.u_hat
    }

    /// Re-encoded estimate of the last decoded frame.
    pub fn codeword(&self) -> &[u8] {
        &self.x_hat
    }

    fn node(&mut self, s: usize, offset: usize, beta: &mut [u8]) {
        if s == 0 {
            let bit = leaf_decide(self.alpha[0][0], self.frozen[offset]);
            self.u_hat[offset] = bit;
            beta[0] = bit;
            return;
        }
        let h = 1 << (s - 1);
        {
            let (lo, hi) = self.alpha.split_at_mut(s);
            let (src, dst) = (&hi[0], &mut lo[s - 1]);
            for i in 0..h {
                dst[i] = self.arith.f(src[i], src[i + h]);
            }
        }
        let (beta_l, beta_r) = beta.split_at_mut(h);
        self.node(s - 1, offset, beta_l);
        {
            let (lo, hi) = self.alpha.split_at_mut(s);
            let (src, dst) = (&hi[0], &mut lo[s - 1]);
            for i in 0..h {
                dst[i] = self.arith.g(src[i], src[i + h], beta_l[i]);
            }
        }
        self.node(s - 1, offset + h, beta_r);
        for (l, r) in beta_l.iter_mut().zip(beta_r.iter()) {
            *l ^= *r;
        }
    }
}

/// One-shot SC decode in exact floating point.
pub fn sc_decode(code: &PolarCode, channel_llrs: &[f64]) -> Vec<u8> {
    ScDecoder::new(code).decode(channel_llrs).to_vec()
}
