//! Monte-Carlo BER harness and per-frame complexity counters.
//!
//! Frame `f` of sweep point `p` draws all of its randomness from a ChaCha8
//! stream keyed by `(seed, p)` at word offset `f << 32`, so a frame's outcome
//! depends only on its coordinates. Frames run in fixed-size batches on a
//! rayon pool and are folded back in frame order, stopping at exactly the
//! frame that meets the stop rule; results are identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::awgn_llr_into;
use crate::decoder::{ArikanDecoder, Decoder, SpaDecoder};
use crate::graph::{build_encoding_graph, FactorGraph, SparseParityMatrix};
use crate::polar::{PolarCode, DEFAULT_DESIGN_SNR_DB};
use crate::pruner::prune;
use crate::{Error, Result};

const BATCH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Stage-scheduled BP on the encoding graph.
    Arikan,
    /// Flooding SPA on the pruned graph.
    SpaPruned,
    /// Flooding SPA on the dense parity-check matrix.
    SpaDense,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 3] = [DecoderKind::Arikan, DecoderKind::SpaPruned, DecoderKind::SpaDense];

    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Arikan => "arikan",
            DecoderKind::SpaPruned => "spa-pruned",
            DecoderKind::SpaDense => "spa-dense",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown decoder {s:?} (expected arikan, spa-pruned or spa-dense)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub block_len: usize,
    pub k: usize,
    pub design_snr_db: f64,
    pub decoder: DecoderKind,
    pub ebn0_db: Vec<f64>,
    pub max_iters: usize,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub seed: u64,
    /// Thread count; 0 picks one per core. Never affects results.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(block_len: usize, k: usize, decoder: DecoderKind, ebn0_db: Vec<f64>) -> Self {
        SimConfig {
            block_len,
            k,
            design_snr_db: DEFAULT_DESIGN_SNR_DB,
            decoder,
            ebn0_db,
            max_iters: 200,
            max_frames: 1_000_000,
            min_frame_errors: 100,
            seed: 0,
            workers: 0,
        }
    }

    /// Every problem with the config, in field order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.block_len.is_power_of_two() || self.block_len < 2 {
            out.push(format!("N must be a power of 2, got {}", self.block_len));
        }
        if self.k == 0 || self.k > self.block_len {
            out.push(format!("k must be in 1..=N, got {}", self.k));
        }
        if !self.design_snr_db.is_finite() {
            out.push("design SNR must be finite".into());
        }
        if self.ebn0_db.is_empty() {
            out.push("Eb/N0 list is empty".into());
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            out.push("Eb/N0 values must be finite".into());
        }
        if self.max_iters == 0 {
            out.push("max_iters must be at least 1".into());
        }
        if self.max_frames == 0 {
            out.push("max_frames must be at least 1".into());
        }
        if self.min_frame_errors == 0 {
            out.push("min_frame_errors must be at least 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(problems.join("; ")))
        }
    }
}

/// Error counts at one Eb/N0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Information-bit error rate.
    pub ber: f64,
    pub fer: f64,
}

/// Per-frame averages of the decoder counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub i_avg: f64,
    pub c_ac: f64,
    pub m_cv: f64,
    pub s_syn: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub ber: BerPoint,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    bit_errors: u64,
    iterations: u64,
    cn_activations: u64,
    messages: u64,
}

#[derive(Debug, Default)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
    cn_activations: u64,
    messages: u64,
}

impl Tally {
    fn add(&mut self, f: &FrameOutcome) {
        self.frames += 1;
        self.bit_errors += f.bit_errors;
        self.frame_errors += (f.bit_errors > 0) as u64;
        self.iterations += f.iterations;
        self.cn_activations += f.cn_activations;
        self.messages += f.messages;
    }

    fn finish(&self, ebn0_db: f64, k: usize, sync_steps: usize) -> PointResult {
        let frames = self.frames as f64;
        let i_avg = self.iterations as f64 / frames;
        PointResult {
            ber: BerPoint {
                ebn0_db,
                frames: self.frames,
                bit_errors: self.bit_errors,
                frame_errors: self.frame_errors,
                ber: self.bit_errors as f64 / (frames * k as f64),
                fer: self.frame_errors as f64 / frames,
            },
            metrics: MetricsReport {
                i_avg,
                c_ac: self.cn_activations as f64 / frames,
                m_cv: self.messages as f64 / frames,
                s_syn: i_avg * sync_steps as f64,
            },
        }
    }
}

/// Builds the code and a decoder prototype for `config`.
pub fn build_decoder(config: &SimConfig) -> Result<(PolarCode, Box<dyn Decoder>)> {
    let code = PolarCode::construct(config.block_len, config.k, config.design_snr_db)?;
    let decoder: Box<dyn Decoder> = match config.decoder {
        DecoderKind::Arikan => Box::new(ArikanDecoder::new(&code, config.max_iters)?),
        DecoderKind::SpaPruned => {
            let (graph, report) = prune(build_encoding_graph(&code));
            Box::new(SpaDecoder::new(&graph, &code, &report.pinned(), config.max_iters)?)
        }
        DecoderKind::SpaDense => {
            let h = SparseParityMatrix::from_dense(&code.dense_parity_matrix());
            Box::new(SpaDecoder::new(&FactorGraph::from_parity_matrix(&h), &code, &[], config.max_iters)?)
        }
    };
    Ok((code, decoder))
}

struct Worker {
    decoder: Box<dyn Decoder>,
    info: Vec<u8>,
    llr: Vec<f64>,
}

fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point as u64);
    rng.set_word_pos((frame as u128) << 32);
    rng
}

fn run_frame(w: &mut Worker, code: &PolarCode, ebn0_db: f64, mut rng: ChaCha8Rng) -> Result<FrameOutcome> {
    for b in w.info.iter_mut() {
        *b = rng.gen::<bool>() as u8;
    }
    let x = code.encode_systematic(&w.info)?;
    awgn_llr_into(&x, ebn0_db, code.rate(), &mut rng, &mut w.llr);
    let r = w.decoder.decode(&w.llr)?;
    let bit_errors = r.info_bits.iter().zip(&w.info).filter(|(a, b)| a != b).count() as u64;
    Ok(FrameOutcome {
        bit_errors,
        iterations: r.iterations as u64,
        cn_activations: r.cn_activations,
        messages: r.messages_passed,
    })
}

/// Runs the whole sweep. Each point stops after `min_frame_errors` frame
/// errors or `max_frames` frames, whichever comes first.
pub fn run_ber(config: &SimConfig) -> Result<Vec<PointResult>> {
    config.validate()?;
    let (code, proto) = build_decoder(config)?;
    let sync_steps = proto.sync_steps_per_iteration();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    let new_worker = || Worker {
        decoder: proto.boxed_clone(),
        info: vec![0; code.info_len()],
        llr: Vec::with_capacity(code.block_len()),
    };

    let mut out = Vec::with_capacity(config.ebn0_db.len());
    for (p, &ebn0) in config.ebn0_db.iter().enumerate() {
        let mut tally = Tally::default();
        'point: while tally.frames < config.max_frames {
            let start = tally.frames;
            let end = (start + BATCH as u64).min(config.max_frames);
            let batch: Vec<Result<FrameOutcome>> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map_init(new_worker, |w, f| run_frame(w, &code, ebn0, frame_rng(config.seed, p, f)))
                    .collect()
            });
            for outcome in batch {
                tally.add(&outcome?);
                if tally.frame_errors >= config.min_frame_errors {
                    break 'point;
                }
            }
        }
        out.push(tally.finish(ebn0, code.info_len(), sync_steps));
    }
    Ok(out)
}

/// Parses `start:step:stop` (stop included within 1e-9) or a single value.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::param(format!("bad sweep value {p:?} in {text:?}"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [start, step, stop] => {
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(Error::param(format!("sweep {text:?} needs step > 0 and stop >= start")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(Error::param(format!("sweep {text:?} is not start:step:stop"))),
    }
}

pub const CSV_HEADER: &str = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,i_avg,c_ac,m_cv,s_syn";

pub fn to_csv(results: &[PointResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in results {
        let (b, m) = (&r.ber, &r.metrics);
        s.push_str(&format!(
            "{},{},{},{},{:e},{:e},{},{},{},{}\n",
            b.ebn0_db, b.frames, b.bit_errors, b.frame_errors, b.ber, b.fer, m.i_avg, m.c_ac, m.m_cv, m.s_syn
        ));
    }
    s
}

/// Eb/N0 where the BER curve crosses `target`, by linear interpolation of
/// `log10(BER)` between the first bracketing pair of points.
pub fn snr_at_ber(points: &[BerPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.ber >= target && b.ber <= target && a.ber > 0.0 {
            if b.ber == 0.0 {
                return Some(b.ebn0_db);
            }
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            if la == lb {
                return Some(a.ebn0_db);
            }
            Some(a.ebn0_db + (la - lt) / (la - lb) * (b.ebn0_db - a.ebn0_db))
        } else {
            None
        }
    })
}

/// Counter averages interpolated at Eb/N0 `x` (clamped to the swept range).
pub fn metrics_at(results: &[PointResult], x: f64) -> Option<MetricsReport> {
    let first = results.first()?;
    if x <= first.ber.ebn0_db {
        return Some(first.metrics);
    }
    for w in results.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if x <= b.ber.ebn0_db {
            let t = (x - a.ber.ebn0_db) / (b.ber.ebn0_db - a.ber.ebn0_db);
            let lerp = |p: f64, q: f64| p + t * (q - p);
            return Some(MetricsReport {
                i_avg: lerp(a.metrics.i_avg, b.metrics.i_avg),
                c_ac: lerp(a.metrics.c_ac, b.metrics.c_ac),
                m_cv: lerp(a.metrics.m_cv, b.metrics.m_cv),
                s_syn: lerp(a.metrics.s_syn, b.metrics.s_syn),
            });
        }
    }
    results.last().map(|r| r.metrics)
}
