//! BPSK over AWGN.

use rand::Rng;
use rand_distr::StandardNormal;

/// Noise variance for unit-energy BPSK at the given Eb/N0 and code rate:
/// `σ² = 1 / (2·R·Eb/N0)`.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// Maps bits to `1 - 2b`, adds white Gaussian noise and returns the channel
/// LLRs `2y/σ²`.
pub fn awgn_llr<R: Rng + ?Sized>(tx_bits: &[u8], ebn0_db: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(tx_bits.len());
    awgn_llr_into(tx_bits, ebn0_db, rate, rng, &mut out);
    out
}

pub fn awgn_llr_into<R: Rng + ?Sized>(tx_bits: &[u8], ebn0_db: f64, rate: f64, rng: &mut R, out: &mut Vec<f64>) {
    assert!(rate > 0.0, "code rate must be positive");
    let var = noise_variance(ebn0_db, rate);
    let sigma = var.sqrt();
    out.clear();
    out.extend(tx_bits.iter().map(|&b| {
        let s = 1.0 - 2.0 * (b & 1) as f64;
        let n: f64 = rng.sample(StandardNormal);
        2.0 * (s + sigma * n) / var
    }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_limit_keeps_signs() {
        let bits = [0u8, 1, 1, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let llr = awgn_llr(&bits, 200.0, 0.5, &mut rng);
        for (b, l) in bits.iter().zip(&llr) {
            assert_eq!(*b == 0, *l > 0.0);
        }
    }

    #[test]
    fn mean_llr_matches_analytic() {
        // E[LLR | b = 0] = 2/σ², sd = 2/σ; the sample mean of 1e5 draws lies
        // within 3 standard errors.
        let (ebn0, rate) = (1.0, 0.5);
        let var = noise_variance(ebn0, rate);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let llr = awgn_llr(&vec![0u8; 100_000], ebn0, rate, &mut rng);
        let mean = llr.iter().sum::<f64>() / llr.len() as f64;
        let se = (2.0 / var.sqrt()) / (llr.len() as f64).sqrt();
        assert!((mean - 2.0 / var).abs() < 3.0 * se, "mean {mean} vs {}", 2.0 / var);
    }

    #[test]
    fn seeded_repeatable() {
        let bits = vec![0u8; 64];
        let a = awgn_llr(&bits, 2.0, 0.5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = awgn_llr(&bits, 2.0, 0.5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
