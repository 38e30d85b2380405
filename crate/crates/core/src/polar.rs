//! Polar code construction and encoding.
//!
//! The generator matrix is `G = F^{⊗n}` with `F = [[1,0],[1,1]]` and no
//! bit-reversal permutation. Bit-channel reliabilities come from the
//! Bhattacharyya recursion started at `z0 = exp(-Es/N0)`, where the design SNR
//! is read as Es/N0 in dB.
//!
//! Positions are 0-based internally. [`PolarCode::info_set_one_based`] gives
//! the 1-based view used in every file format and CLI output.

use sha2::{Digest, Sha256};

use crate::{Error, Gf2Matrix, Result};

/// Default design SNR (dB) for code construction.
pub const DEFAULT_DESIGN_SNR_DB: f64 = 0.6;

/// Bhattacharyya parameters of the `N` synthesized bit channels.
#[derive(Debug, Clone, PartialEq)]
pub struct BhattacharyyaProfile {
    pub z: Vec<f64>,
}

impl BhattacharyyaProfile {
    /// Expands `z0` through `n` polarization levels.
    ///
    /// Index `i` reads its bits from most to least significant: a 0 takes the
    /// degraded branch `2z - z²`, a 1 the upgraded branch `z²`.
    pub fn expand(z0: f64, n: u32) -> Result<Self> {
        let mut z = vec![z0];
        for _ in 0..n {
            let mut next = Vec::with_capacity(z.len() * 2);
            for &zi in &z {
                let (minus, plus) = evolve_bhattacharyya(zi)?;
                next.push(minus);
                next.push(plus);
            }
            z = next;
        }
        Ok(BhattacharyyaProfile { z })
    }
}

/// One polarization step: `(2z - z², z²)`.
pub fn evolve_bhattacharyya(z: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "Bhattacharyya parameter {z} outside [0, 1]"
        )));
    }
    let minus = (2.0 * z - z * z).clamp(0.0, 1.0);
    Ok((minus, z * z))
}

/// A polar code `P(N, k)` with its information set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    n: u32,
    info: Vec<usize>,
    frozen_mask: Vec<bool>,
    design_snr_db: f64,
    profile: Option<BhattacharyyaProfile>,
}

impl PolarCode {
    /// Constructs `P(N, k)` by picking the `k` bit channels with the smallest
    /// Bhattacharyya parameter. Ties go to the lower index.
    pub fn construct(block_len: usize, k: usize, design_snr_db: f64) -> Result<Self> {
        let n = log2_exact(block_len)?;
        if k < 1 || k > block_len {
            return Err(Error::param(format!("k must satisfy 1 <= k <= N, got k = {k}")));
        }
        if !design_snr_db.is_finite() {
            return Err(Error::param("design SNR must be finite"));
        }
        let z0 = (-(10f64.powf(design_snr_db / 10.0))).exp();
        let profile = BhattacharyyaProfile::expand(z0, n)?;
        let mut order: Vec<usize> = (0..block_len).collect();
        order.sort_by(|&a, &b| profile.z[a].total_cmp(&profile.z[b]).then(a.cmp(&b)));
        let mut info = order[..k].to_vec();
        info.sort_unstable();
        let mut code = Self::from_info_set(block_len, &info)?;
        code.design_snr_db = design_snr_db;
        code.profile = Some(profile);
        Ok(code)
    }

    /// Builds a code from an explicit 0-based information set.
    pub fn from_info_set(block_len: usize, info: &[usize]) -> Result<Self> {
        let n = log2_exact(block_len)?;
        if info.is_empty() {
            return Err(Error::param("information set is empty"));
        }
        let mut frozen_mask = vec![true; block_len];
        for &i in info {
            if i >= block_len {
                return Err(Error::param(format!("information index {} outside [1, {block_len}]", i + 1)));
            }
            if !frozen_mask[i] {
                return Err(Error::param(format!("duplicate information index {}", i + 1)));
            }
            frozen_mask[i] = false;
        }
        let mut info = info.to_vec();
        info.sort_unstable();
        Ok(PolarCode {
            n,
            info,
            frozen_mask,
            design_snr_db: f64::NAN,
            profile: None,
        })
    }

    /// Same as [`from_info_set`](Self::from_info_set) with 1-based indices.
    pub fn from_info_set_one_based(block_len: usize, info: &[usize]) -> Result<Self> {
        let zero_based = info
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or_else(|| Error::param("information indices are 1-based"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_info_set(block_len, &zero_based)
    }

    pub fn block_len(&self) -> usize {
        self.frozen_mask.len()
    }

    pub fn info_len(&self) -> usize {
        self.info.len()
    }

    /// `log2(N)`.
    pub fn stages(&self) -> u32 {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.block_len() as f64
    }

    /// NaN when the code was built from an explicit information set.
    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }

    pub fn profile(&self) -> Option<&BhattacharyyaProfile> {
        self.profile.as_ref()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn info_set_one_based(&self) -> Vec<usize> {
        self.info.iter().map(|i| i + 1).collect()
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len()).filter(|&i| self.frozen_mask[i]).collect()
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen_mask[i]
    }

    /// SHA-256 over `N`, `k` and the information set.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.block_len() as u64).to_le_bytes());
        h.update((self.info_len() as u64).to_le_bytes());
        for &i in &self.info {
            h.update((i as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// `x = u·G`. Frozen positions of `u` must be zero.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        self.check_message(u)?;
        let mut x = u.to_vec();
        butterfly_transform(&mut x);
        Ok(x)
    }

    /// All `n + 1` stage vectors of the encoding graph; stage 0 is `u`,
    /// stage `n` is the codeword.
    pub fn encode_extended(&self, u: &[u8]) -> Result<ExtendedCodeword> {
        self.check_message(u)?;
        let big_n = self.block_len();
        let mut stages = Vec::with_capacity(self.n as usize + 1);
        stages.push(u.to_vec());
        for s in 1..=self.n {
            let mut next = stages[s as usize - 1].clone();
            butterfly_layer(&mut next, 1 << (s - 1));
            stages.push(next);
        }
        debug_assert!(stages.iter().all(|st| st.len() == big_n));
        Ok(ExtendedCodeword { stages })
    }

    /// Systematic encoding: the returned codeword carries `info` verbatim on
    /// the information set.
    pub fn encode_systematic(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_len() {
            return Err(Error::param(format!(
                "expected {} information bits, got {}",
                self.info_len(),
                info.len()
            )));
        }
        // Encode, clear the frozen part, encode again. Exact whenever the
        // information set is domination-contiguous.
        let mut w = vec![0u8; self.block_len()];
        for (&pos, &b) in self.info.iter().zip(info) {
            w[pos] = b & 1;
        }
        butterfly_transform(&mut w);
        for (wi, &f) in w.iter_mut().zip(&self.frozen_mask) {
            if f {
                *wi = 0;
            }
        }
        butterfly_transform(&mut w);
        if self.info.iter().zip(info).all(|(&pos, &b)| w[pos] == b & 1) {
            return Ok(w);
        }
        let u = self.solve_systematic(info);
        self.encode(&u)
    }

    /// Solves `u_A · G_AA = info` by back substitution; `G_AA` is unit
    /// lower-triangular because `G[r][c] = 1` iff the bits of `c` are a
    /// subset of the bits of `r`.
    fn solve_systematic(&self, info: &[u8]) -> Vec<u8> {
        let mut u = vec![0u8; self.block_len()];
        for (slot, &c) in self.info.iter().enumerate().rev() {
            let mut acc = info[slot] & 1;
            for &r in &self.info[slot + 1..] {
                if r & c == c {
                    acc ^= u[r];
                }
            }
            u[c] = acc;
        }
        u
    }

    /// Recovers the message `u = x·G` (G is an involution).
    pub fn message_from_codeword(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.block_len() {
            return Err(Error::param(format!(
                "codeword of length {} for N = {}",
                x.len(),
                self.block_len()
            )));
        }
        let mut u = x.to_vec();
        butterfly_transform(&mut u);
        Ok(u)
    }

    /// Information bits under non-systematic operation: `(x·G)_A`.
    pub fn nonsystematic_info(&self, x: &[u8]) -> Result<Vec<u8>> {
        let u = self.message_from_codeword(x)?;
        Ok(self.info.iter().map(|&i| u[i]).collect())
    }

    /// `(N - k) × N` parity-check matrix whose rows are the columns of `G`
    /// at the frozen indices.
    pub fn dense_parity_matrix(&self) -> Gf2Matrix {
        let frozen = self.frozen_set();
        let big_n = self.block_len();
        let mut h = Gf2Matrix::zeros(frozen.len(), big_n);
        for (row, &f) in frozen.iter().enumerate() {
            for c in 0..big_n {
                if c & f == f {
                    h.set(row, c, true);
                }
            }
        }
        h
    }

    fn check_message(&self, u: &[u8]) -> Result<()> {
        if u.len() != self.block_len() {
            return Err(Error::param(format!(
                "message of length {} for N = {}",
                u.len(),
                self.block_len()
            )));
        }
        if let Some(i) = (0..u.len()).find(|&i| self.frozen_mask[i] && u[i] != 0) {
            return Err(Error::Contract(format!("frozen position {} carries a 1", i + 1)));
        }
        Ok(())
    }
}

/// The assignment of every stage value of the encoding graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedCodeword {
    pub stages: Vec<Vec<u8>>,
}

impl ExtendedCodeword {
    pub fn message(&self) -> &[u8] {
        &self.stages[0]
    }

    pub fn codeword(&self) -> &[u8] {
        self.stages.last().expect("at least one stage")
    }

    /// Flattened stage-major, matching variable-node ids of
    /// [`build_encoding_graph`](crate::graph::build_encoding_graph).
    pub fn flatten(&self) -> Vec<u8> {
        self.stages.concat()
    }
}

/// `F^{⊗n}` as an explicit matrix.
pub fn generator_matrix(n: u32) -> Gf2Matrix {
    let kernel = Gf2Matrix::from_rows(&[[1u8, 0], [1, 1]]).expect("kernel");
    let mut g = Gf2Matrix::identity(1);
    for _ in 0..n {
        g = g.kron(&kernel);
    }
    g
}

/// One encoding layer: `v[i] ^= v[i + stride]` over every butterfly.
pub(crate) fn butterfly_layer(v: &mut [u8], stride: usize) {
    let len = v.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            v[i] ^= v[i + stride];
        }
        base += 2 * stride;
    }
}

/// In-place `v ← v·G`.
pub fn butterfly_transform(v: &mut [u8]) {
    let mut stride = 1;
    while stride < v.len() {
        butterfly_layer(v, stride);
        stride *= 2;
    }
}

fn log2_exact(block_len: usize) -> Result<u32> {
    if block_len == 0 || !block_len.is_power_of_two() {
        return Err(Error::param(format!("N must be a power of 2, got {block_len}")));
    }
    Ok(block_len.trailing_zeros())
}
