use std::collections::BTreeSet;

use super::{clamp_llr, hard_decision, phi, DecodeResult, Decoder, LLR_CLAMP};
use crate::graph::{FactorGraph, VnKind};
use crate::polar::PolarCode;
use crate::{Error, Result};

/// Where the decoder reads each codeword position from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PositionSource {
    /// Total LLR of this variable (compact index).
    Variable(usize),
    /// Forced to zero by the graph structure.
    Pinned,
    /// Not constrained by any check: the channel decides.
    Channel,
}

/// Flooding sum-product decoder over an arbitrary typed factor graph.
///
/// Channel variables start from the channel LLR of their position, hidden
/// ones from 0 and frozen ones from `+LLR_CLAMP`. Each iteration updates all
/// checks, then all variables, then stops early if the hard decisions
/// satisfy every check.
#[derive(Debug, Clone)]
pub struct SpaDecoder {
    max_iters: usize,
    info_set: Vec<usize>,
    // CSR over checks: edges of check c are cn_start[c]..cn_start[c+1].
    cn_start: Vec<usize>,
    edge_vn: Vec<usize>,
    // Edge ids grouped by variable.
    vn_start: Vec<usize>,
    vn_edges: Vec<usize>,
    vn_kinds: Vec<VnKind>,
    sources: Vec<PositionSource>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    prior: Vec<f64>,
    scratch: Vec<f64>,
}

impl SpaDecoder {
    /// `pinned` lists 0-based positions forced to zero during pruning.
    pub fn new(graph: &FactorGraph, code: &PolarCode, pinned: &[usize], max_iters: usize) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        let big_n = code.block_len();
        let m = graph.to_parity_matrix();
        let mut sources = vec![PositionSource::Channel; big_n];
        let mut seen = BTreeSet::new();
        for (j, kind) in m.col_kinds().iter().enumerate() {
            if let VnKind::Channel(p) = *kind {
                if p >= big_n {
                    return Err(Error::Graph(format!("channel position {} outside 1..={big_n}", p + 1)));
                }
                if !seen.insert(p) {
                    return Err(Error::Graph(format!("channel position {} mapped twice", p + 1)));
                }
                sources[p] = PositionSource::Variable(j);
            }
        }
        for &p in pinned {
            match sources.get(p) {
                Some(PositionSource::Channel) => sources[p] = PositionSource::Pinned,
                Some(_) => {
                    return Err(Error::Graph(format!("pinned position {} is still on the graph", p + 1)))
                }
                None => return Err(Error::Graph(format!("pinned position {} outside 1..={big_n}", p + 1))),
            }
        }

        let mut cn_start = Vec::with_capacity(m.rows() + 1);
        let mut edge_vn = Vec::with_capacity(m.num_edges());
        cn_start.push(0);
        for row in m.row_lists() {
            edge_vn.extend_from_slice(row);
            cn_start.push(edge_vn.len());
        }
        let mut per_vn: Vec<Vec<usize>> = vec![Vec::new(); m.cols()];
        for (e, &v) in edge_vn.iter().enumerate() {
            per_vn[v].push(e);
        }
        let mut vn_start = Vec::with_capacity(m.cols() + 1);
        let mut vn_edges = Vec::with_capacity(edge_vn.len());
        vn_start.push(0);
        for list in per_vn {
            vn_edges.extend(list);
            vn_start.push(vn_edges.len());
        }
        let max_deg = cn_start.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        let edges = edge_vn.len();
        Ok(SpaDecoder {
            max_iters,
            info_set: code.info_set().to_vec(),
            cn_start,
            edge_vn,
            vn_start,
            vn_edges,
            vn_kinds: m.col_kinds().to_vec(),
            sources,
            v2c: vec![0.0; edges],
            c2v: vec![0.0; edges],
            total: vec![0.0; m.cols()],
            prior: vec![0.0; m.cols()],
            scratch: vec![0.0; 2 * max_deg + 1],
        })
    }

    pub fn num_checks(&self) -> usize {
        self.cn_start.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_vn.len()
    }

    fn update_checks(&mut self) {
        for c in 0..self.num_checks() {
            let (start, end) = (self.cn_start[c], self.cn_start[c + 1]);
            let deg = end - start;
            let (phis, suffix) = self.scratch.split_at_mut(deg);
            // suffix[k] = Σ φ(|x|) over edges k.. of this check
            suffix[deg] = 0.0;
            let mut negatives = 0u32;
            for k in (0..deg).rev() {
                let x = self.v2c[start + k];
                negatives += (x < 0.0) as u32;
                phis[k] = phi(x.abs());
                suffix[k] = suffix[k + 1] + phis[k];
            }
            let mut prefix = 0.0;
            for k in 0..deg {
                let x = self.v2c[start + k];
                let mag = phi(prefix + suffix[k + 1]).min(LLR_CLAMP);
                let negative = (negatives - (x < 0.0) as u32) % 2 == 1;
                self.c2v[start + k] = if negative { -mag } else { mag };
                prefix += phis[k];
            }
        }
    }

    fn update_variables(&mut self) {
        for v in 0..self.total.len() {
            let edges = &self.vn_edges[self.vn_start[v]..self.vn_start[v + 1]];
            let prior = self.prior[v];
            if prior.abs() >= LLR_CLAMP {
                self.total[v] = prior;
                for &e in edges {
                    self.v2c[e] = prior;
                }
                continue;
            }
            let sum: f64 = prior + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
            self.total[v] = sum;
            for &e in edges {
                self.v2c[e] = clamp_llr(sum - self.c2v[e]);
            }
        }
    }

    fn checks_satisfied(&self) -> bool {
        (0..self.num_checks()).all(|c| {
            self.edge_vn[self.cn_start[c]..self.cn_start[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ hard_decision(self.total[v]))
                == 0
        })
    }
}

impl Decoder for SpaDecoder {
    fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        if llr.len() != self.sources.len() {
            return Err(Error::param(format!(
                "{} channel LLRs for N = {}",
                llr.len(),
                self.sources.len()
            )));
        }
        for (v, kind) in self.vn_kinds.iter().enumerate() {
            self.prior[v] = match *kind {
                VnKind::Channel(p) => clamp_llr(llr[p]),
                VnKind::Hidden => 0.0,
                VnKind::Frozen => LLR_CLAMP,
            };
        }
        self.total.copy_from_slice(&self.prior);
        for v in 0..self.total.len() {
            for &e in &self.vn_edges[self.vn_start[v]..self.vn_start[v + 1]] {
                self.v2c[e] = self.prior[v];
            }
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            iterations += 1;
            self.update_checks();
            self.update_variables();
            if self.checks_satisfied() {
                converged = true;
                break;
            }
        }

        let hard_bits: Vec<u8> = self.total.iter().map(|&t| hard_decision(t)).collect();
        let codeword_bits: Vec<u8> = self
            .sources
            .iter()
            .zip(llr)
            .map(|(src, &l)| match *src {
                PositionSource::Variable(v) => hard_bits[v],
                PositionSource::Pinned => 0,
                PositionSource::Channel => hard_decision(l),
            })
            .collect();
        let info_bits = self.info_set.iter().map(|&i| codeword_bits[i]).collect();
        let per_iter_messages = 2 * self.num_edges() as u64;
        Ok(DecodeResult {
            hard_bits,
            info_bits,
            codeword_bits,
            iterations,
            converged,
            cn_activations: iterations as u64 * self.num_checks() as u64,
            messages_passed: iterations as u64 * per_iter_messages,
        })
    }

    fn sync_steps_per_iteration(&self) -> usize {
        2
    }

    fn boxed_clone(&self) -> Box<dyn Decoder> {
        Box::new(self.clone())
    }
}
