//! Message-passing kernels and the two belief-propagation decoders.
//!
//! LLRs are `log(P(0)/P(1))`; a positive value favors bit 0, and a total of
//! exactly zero decides 0. All messages are clamped to `±LLR_CLAMP`, which
//! also stands in for the infinite prior of a frozen bit.

mod arikan;
mod spa;

pub use arikan::ArikanDecoder;
pub use spa::SpaDecoder;

use crate::{Error, Result};

/// Magnitude cap on every message; a prior at the cap is a known bit.
pub const LLR_CLAMP: f64 = 30.0;

/// Lower clamp on the argument of [`phi`].
pub const PHI_MIN: f64 = 1e-12;

/// `φ(x) = -ln(tanh(x/2))`, its own inverse on `(0, ∞)`.
///
/// Evaluated as `ln((1 + e^-x) / (1 - e^-x))` in whichever arrangement keeps
/// full relative precision at both ends.
#[inline]
pub fn phi(x: f64) -> f64 {
    let x = x.max(PHI_MIN);
    if x > 1.0 {
        let e = (-x).exp();
        (2.0 * e / (1.0 - e)).ln_1p()
    } else {
        let d = -(-x).exp_m1();
        ((2.0 - d) / d).ln()
    }
}

/// Check-node output from the messages of all *other* neighbors:
/// `∏ sign(x) · φ(Σ φ(|x|))`.
pub fn cn_update(incoming: &[f64]) -> Result<f64> {
    if incoming.is_empty() {
        return Err(Error::Contract("check update needs at least one input".into()));
    }
    let mut negative = false;
    let mut sum = 0.0;
    for &x in incoming {
        negative ^= x < 0.0;
        sum += phi(x.abs());
    }
    let mag = phi(sum).min(LLR_CLAMP);
    Ok(if negative { -mag } else { mag })
}

/// Variable-node output: `l_init + Σ incoming_other`, clamped. A prior at the
/// clamp is returned unchanged.
pub fn vn_update(l_init: f64, incoming_other: &[f64]) -> f64 {
    if l_init.abs() >= LLR_CLAMP {
        return LLR_CLAMP.copysign(l_init);
    }
    clamp_llr(l_init + incoming_other.iter().sum::<f64>())
}

/// Two-input check update, the butterfly kernel. Same value as the φ form,
/// in the correction-term arrangement that needs two exponentials.
#[inline]
pub(crate) fn boxplus(a: f64, b: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    let mag = (x.min(y) + (-(x + y)).exp().ln_1p() - (-(x - y).abs()).exp().ln_1p()).clamp(0.0, LLR_CLAMP);
    if (a < 0.0) != (b < 0.0) {
        -mag
    } else {
        mag
    }
}

#[inline]
pub(crate) fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

#[inline]
pub(crate) fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

/// Outcome of decoding one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Decision for every variable node the decoder tracks.
    pub hard_bits: Vec<u8>,
    /// Information bits, read from the systematic positions.
    pub info_bits: Vec<u8>,
    /// All `N` codeword positions.
    pub codeword_bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
    pub cn_activations: u64,
    pub messages_passed: u64,
}

/// A frame decoder holding its own scratch state.
pub trait Decoder: Send + Sync {
    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult>;

    /// Synchronization steps per iteration (latency model).
    fn sync_steps_per_iteration(&self) -> usize;

    fn boxed_clone(&self) -> Box<dyn Decoder>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        for x in [0.1, 1.0, 5.0] {
            assert!((phi(phi(x)) - x).abs() < 1e-9);
        }
        // -ln(tanh(1))
        assert!((phi(2.0) - 0.272_341_5).abs() < 1e-6);
        assert!((phi(2.0) + (1.0f64).tanh().ln()).abs() < 1e-15);
        assert!(phi(0.0) > 25.0);
        assert!(phi(0.0).is_finite());
        assert!(phi(100.0) < 1e-40);
    }

    #[test]
    fn cn_values() {
        let reference = 2.0 * ((1.0f64).tanh() * (1.5f64).tanh()).atanh();
        let got = cn_update(&[2.0, 3.0]).unwrap();
        assert!((got - reference).abs() < 1e-12);
        assert!((got - 1.693_45).abs() < 1e-5);
        assert!((cn_update(&[-2.0, 3.0]).unwrap() + reference).abs() < 1e-12);
        assert!(cn_update(&[0.0, 4.0, -7.0]).unwrap().abs() < 1e-9);
        assert!(cn_update(&[]).is_err());
        assert_eq!(cn_update(&[LLR_CLAMP]).unwrap(), phi(phi(LLR_CLAMP)).min(LLR_CLAMP));
        assert!((boxplus(2.0, -3.0) + reference).abs() < 1e-12);
        for (a, b) in [(0.0, 5.0), (1e-8, -1e-8), (15.0, 16.0), (0.3, 0.3), (-12.0, 0.7)] {
            let want = cn_update(&[a, b]).unwrap();
            assert!((boxplus(a, b) - want).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn vn_values() {
        assert_eq!(vn_update(1.0, &[0.5]), 1.5);
        assert_eq!(vn_update(LLR_CLAMP, &[-12.0, 3.0]), LLR_CLAMP);
        assert_eq!(vn_update(0.0, &[]), 0.0);
        assert_eq!(vn_update(10.0, &[25.0]), LLR_CLAMP);
    }

    #[test]
    fn zero_decides_zero() {
        assert_eq!(hard_decision(0.0), 0);
        assert_eq!(hard_decision(-0.0), 0);
        assert_eq!(hard_decision(-1e-300), 1);
    }
}
