use super::{boxplus, clamp_llr, hard_decision, DecodeResult, Decoder, LLR_CLAMP};
use crate::polar::{butterfly_transform, PolarCode};
use crate::{Error, Result};

/// Stage-scheduled BP on the polar encoding graph.
///
/// `left[s]` holds messages travelling toward the message side at stage `s`
/// and `right[s]` those travelling toward the channel. One iteration is a
/// forward sweep over layers `1..=n` updating `right`, then a backward sweep
/// `n..=1` updating `left`. Decoding stops once the hard decisions satisfy
/// `x̂ = û·G`.
#[derive(Debug, Clone)]
pub struct ArikanDecoder {
    code: PolarCode,
    max_iters: usize,
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
    u_hat: Vec<u8>,
    x_hat: Vec<u8>,
    reencoded: Vec<u8>,
}

impl ArikanDecoder {
    pub fn new(code: &PolarCode, max_iters: usize) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        let big_n = code.block_len();
        let stages = code.stages() as usize + 1;
        Ok(ArikanDecoder {
            code: code.clone(),
            max_iters,
            left: vec![vec![0.0; big_n]; stages],
            right: vec![vec![0.0; big_n]; stages],
            u_hat: vec![0; big_n],
            x_hat: vec![0; big_n],
            reencoded: vec![0; big_n],
        })
    }

    /// CN activations per full iteration: every butterfly's two checks, once
    /// per sweep.
    pub fn activations_per_iteration(&self) -> u64 {
        2 * (self.code.block_len() * self.code.stages() as usize) as u64
    }

    /// Messages per full iteration: both directions of all `5·N·n/2` edges.
    pub fn messages_per_iteration(&self) -> u64 {
        5 * (self.code.block_len() * self.code.stages() as usize) as u64
    }

    fn forward_layer(&mut self, layer: usize) {
        let stride = 1 << (layer - 1);
        let (lo, hi) = self.right.split_at_mut(layer);
        let (r_in, r_out) = (&lo[layer - 1], &mut hi[0]);
        let l_out = &self.left[layer];
        for i in (0..r_in.len()).filter(|i| i & stride == 0) {
            let j = i + stride;
            r_out[i] = boxplus(r_in[i], clamp_llr(l_out[j] + r_in[j]));
            r_out[j] = clamp_llr(boxplus(r_in[i], l_out[i]) + r_in[j]);
        }
    }

    fn backward_layer(&mut self, layer: usize) {
        let stride = 1 << (layer - 1);
        let (lo, hi) = self.left.split_at_mut(layer);
        let (l_in, l_out) = (&mut lo[layer - 1], &hi[0]);
        let r_in = &self.right[layer - 1];
        for i in (0..l_in.len()).filter(|i| i & stride == 0) {
            let j = i + stride;
            l_in[i] = boxplus(l_out[i], clamp_llr(l_out[j] + r_in[j]));
            l_in[j] = clamp_llr(boxplus(r_in[i], l_out[i]) + l_out[j]);
        }
    }

    fn decisions_consistent(&mut self) -> bool {
        let n = self.code.stages() as usize;
        for i in 0..self.code.block_len() {
            self.u_hat[i] = if self.code.is_frozen(i) {
                0
            } else {
                hard_decision(self.left[0][i] + self.right[0][i])
            };
            self.x_hat[i] = hard_decision(self.left[n][i] + self.right[n][i]);
        }
        self.reencoded.copy_from_slice(&self.u_hat);
        butterfly_transform(&mut self.reencoded);
        self.reencoded == self.x_hat
    }
}

impl Decoder for ArikanDecoder {
    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        let big_n = self.code.block_len();
        if llr.len() != big_n {
            return Err(Error::param(format!("{} channel LLRs for N = {big_n}", llr.len())));
        }
        let n = self.code.stages() as usize;
        for s in 0..=n {
            self.left[s].fill(0.0);
            self.right[s].fill(0.0);
        }
        for (i, &l) in llr.iter().enumerate() {
            if self.code.is_frozen(i) {
                self.right[0][i] = LLR_CLAMP;
            }
            self.left[n][i] = clamp_llr(l);
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            iterations += 1;
            for layer in 1..=n {
                self.forward_layer(layer);
            }
            for layer in (1..=n).rev() {
                self.backward_layer(layer);
            }
            if self.decisions_consistent() {
                converged = true;
                break;
            }
        }

        let hard_bits = (0..=n)
            .flat_map(|s| (0..big_n).map(move |i| (s, i)))
            .map(|(s, i)| {
                if s == 0 && self.code.is_frozen(i) {
                    0
                } else {
                    hard_decision(self.left[s][i] + self.right[s][i])
                }
            })
            .collect();
        let codeword_bits = self.x_hat.clone();
        let info_bits = self.code.info_set().iter().map(|&i| codeword_bits[i]).collect();
        Ok(DecodeResult {
            hard_bits,
            info_bits,
            codeword_bits,
            iterations,
            converged,
            cn_activations: iterations as u64 * self.activations_per_iteration(),
            messages_passed: iterations as u64 * self.messages_per_iteration(),
        })
    }

    fn sync_steps_per_iteration(&self) -> usize {
        2 * self.code.stages() as usize
    }

    fn boxed_clone(&self) -> Box<dyn Decoder> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn llr_of(x: &[u8], mag: f64) -> Vec<f64> {
        x.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn noiseless_zero() {
        let code = PolarCode::construct(64, 32, 0.6).unwrap();
        let mut dec = ArikanDecoder::new(&code, 200).unwrap();
        let r = dec.decode(&[20.0; 64]).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.codeword_bits.iter().all(|&b| b == 0));
        assert_eq!(r.hard_bits.len(), 64 * 7);
        assert_eq!(r.cn_activations, 2 * 64 * 6);
        assert_eq!(r.messages_passed, 5 * 64 * 6);
    }

    #[test]
    fn p84_all_codewords() {
        let code = PolarCode::construct(8, 4, 0.6).unwrap();
        let mut dec = ArikanDecoder::new(&code, 50).unwrap();
        for m in 0..16u8 {
            let info: Vec<u8> = (0..4).map(|b| (m >> b) & 1).collect();
            let x = code.encode_systematic(&info).unwrap();
            let r = dec.decode(&llr_of(&x, 20.0)).unwrap();
            assert!(r.converged);
            assert_eq!(r.codeword_bits, x);
            assert_eq!(r.info_bits, info);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let code = PolarCode::construct(8, 4, 0.6).unwrap();
        assert!(ArikanDecoder::new(&code, 0).is_err());
        let mut dec = ArikanDecoder::new(&code, 5).unwrap();
        assert!(dec.decode(&[1.0; 7]).is_err());
    }

    #[test]
    fn rate_one_symmetry() {
        let code = PolarCode::construct(16, 16, 0.6).unwrap();
        let mut dec = ArikanDecoder::new(&code, 20).unwrap();
        let llr: Vec<f64> = (0..16).map(|i| ((i * 7 % 11) as f64 - 5.0) * 0.9 + 0.3).collect();
        let neg: Vec<f64> = llr.iter().map(|l| -l).collect();
        let a = dec.decode(&llr).unwrap();
        let b = dec.decode(&neg).unwrap();
        for (x, y) in a.codeword_bits.iter().zip(&b.codeword_bits) {
            assert_eq!(x ^ y, 1);
        }
    }
}
