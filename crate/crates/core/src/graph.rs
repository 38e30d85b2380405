//! Typed bipartite factor graphs and their sparse parity-check view.
//!
//! Node ids are stable: deleting a node leaves a tombstone and the id is
//! never reused, so a pruned graph can always be traced back to positions in
//! the encoding graph. Exporting to a [`SparseParityMatrix`] compacts the live
//! nodes in ascending id order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::polar::PolarCode;
use crate::{Error, Result};

/// Variable-node type. Channel positions are 0-based internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VnKind {
    /// Observed codeword position.
    Channel(usize),
    /// Internal stage value with no prior.
    Hidden,
    /// Known-zero input bit.
    Frozen,
}

impl VnKind {
    pub fn is_hidden(self) -> bool {
        matches!(self, VnKind::Hidden)
    }

    pub fn channel_position(self) -> Option<usize> {
        match self {
            VnKind::Channel(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for VnKind {
    /// Sidecar notation: `C <1-based pos>`, `H`, `F`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VnKind::Channel(p) => write!(f, "C {}", p + 1),
            VnKind::Hidden => f.write_str("H"),
            VnKind::Frozen => f.write_str("F"),
        }
    }
}

/// Rows (checks), columns (variables) and edges of a graph or matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub rows: usize,
    pub cols: usize,
    pub edges: usize,
}

impl Dims {
    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            0.0
        } else {
            self.edges as f64 / (self.rows as f64 * self.cols as f64)
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorGraph {
    vn_kinds: Vec<Option<VnKind>>,
    vn_adj: Vec<BTreeSet<usize>>,
    cn_adj: Vec<Option<BTreeSet<usize>>>,
    live_vns: usize,
    live_cns: usize,
    edges: usize,
}

impl FactorGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vn(&mut self, kind: VnKind) -> usize {
        self.vn_kinds.push(Some(kind));
        self.vn_adj.push(BTreeSet::new());
        self.live_vns += 1;
        self.vn_kinds.len() - 1
    }

    /// Adds a check over `vns`. Repeated ids cancel in pairs.
    pub fn add_cn(&mut self, vns: &[usize]) -> Result<usize> {
        let id = self.cn_adj.len();
        self.cn_adj.push(Some(BTreeSet::new()));
        self.live_cns += 1;
        for &v in vns {
            self.toggle_edge(v, id)?;
        }
        Ok(id)
    }

    /// Adds the edge if absent, removes it if present (GF(2) addition).
    pub fn toggle_edge(&mut self, vn: usize, cn: usize) -> Result<()> {
        if !self.has_vn(vn) {
            return Err(Error::Graph(format!("variable node {vn} does not exist")));
        }
        let row = self
            .cn_adj
            .get_mut(cn)
            .and_then(Option::as_mut)
            .ok_or_else(|| Error::Graph(format!("check node {cn} does not exist")))?;
        if row.insert(vn) {
            self.vn_adj[vn].insert(cn);
            self.edges += 1;
        } else {
            row.remove(&vn);
            self.vn_adj[vn].remove(&cn);
            self.edges -= 1;
        }
        Ok(())
    }

    pub fn remove_vn(&mut self, vn: usize) {
        if !self.has_vn(vn) {
            return;
        }
        for cn in std::mem::take(&mut self.vn_adj[vn]) {
            if let Some(row) = self.cn_adj[cn].as_mut() {
                row.remove(&vn);
            }
            self.edges -= 1;
        }
        self.vn_kinds[vn] = None;
        self.live_vns -= 1;
    }

    pub fn remove_cn(&mut self, cn: usize) {
        let Some(row) = self.cn_adj.get_mut(cn).and_then(Option::take) else {
            return;
        };
        for vn in row {
            self.vn_adj[vn].remove(&cn);
            self.edges -= 1;
        }
        self.live_cns -= 1;
    }

    pub fn has_vn(&self, vn: usize) -> bool {
        matches!(self.vn_kinds.get(vn), Some(Some(_)))
    }

    pub fn has_cn(&self, cn: usize) -> bool {
        matches!(self.cn_adj.get(cn), Some(Some(_)))
    }

    pub fn vn_kind(&self, vn: usize) -> Option<VnKind> {
        self.vn_kinds.get(vn).copied().flatten()
    }

    pub fn set_vn_kind(&mut self, vn: usize, kind: VnKind) {
        if let Some(slot @ Some(_)) = self.vn_kinds.get_mut(vn) {
            *slot = Some(kind);
        }
    }

    /// Checks attached to `vn` (empty for dead ids).
    pub fn vn_neighbors(&self, vn: usize) -> &BTreeSet<usize> {
        static EMPTY: BTreeSet<usize> = BTreeSet::new();
        if self.has_vn(vn) {
            &self.vn_adj[vn]
        } else {
            &EMPTY
        }
    }

    /// Variables attached to `cn` (empty for dead ids).
    pub fn cn_neighbors(&self, cn: usize) -> &BTreeSet<usize> {
        static EMPTY: BTreeSet<usize> = BTreeSet::new();
        self.cn_adj.get(cn).and_then(Option::as_ref).unwrap_or(&EMPTY)
    }

    pub fn vn_degree(&self, vn: usize) -> usize {
        self.vn_neighbors(vn).len()
    }

    pub fn cn_degree(&self, cn: usize) -> usize {
        self.cn_neighbors(cn).len()
    }

    /// Live variable ids, ascending.
    pub fn vn_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vn_kinds.len()).filter(|&v| self.vn_kinds[v].is_some())
    }

    /// Live check ids, ascending.
    pub fn cn_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cn_adj.len()).filter(|&c| self.cn_adj[c].is_some())
    }

    /// One past the largest variable id ever allocated.
    pub fn vn_id_bound(&self) -> usize {
        self.vn_kinds.len()
    }

    pub fn num_vns(&self) -> usize {
        self.live_vns
    }

    pub fn num_cns(&self) -> usize {
        self.live_cns
    }

    pub fn num_edges(&self) -> usize {
        self.edges
    }

    pub fn dims(&self) -> Dims {
        Dims {
            rows: self.live_cns,
            cols: self.live_vns,
            edges: self.edges,
        }
    }

    /// True iff every check's incident bits XOR to zero. `assignment` is
    /// indexed by variable id and must cover every live variable.
    pub fn extended_codeword_satisfies(&self, assignment: &[u8]) -> Result<bool> {
        if let Some(v) = self.vn_ids().find(|&v| v >= assignment.len()) {
            return Err(Error::param(format!("no value assigned to variable node {v}")));
        }
        Ok(self.cn_ids().all(|c| {
            self.cn_neighbors(c)
                .iter()
                .fold(0u8, |acc, &v| acc ^ (assignment[v] & 1))
                == 0
        }))
    }

    /// Compacted incidence matrix: rows are live checks, columns live
    /// variables, both in ascending id order.
    pub fn to_parity_matrix(&self) -> SparseParityMatrix {
        let mut col_index = vec![usize::MAX; self.vn_kinds.len()];
        let mut col_kinds = Vec::with_capacity(self.live_vns);
        for (j, v) in self.vn_ids().enumerate() {
            col_index[v] = j;
            col_kinds.push(self.vn_kinds[v].expect("live"));
        }
        let rows: Vec<Vec<usize>> = self
            .cn_ids()
            .map(|c| {
                let mut r: Vec<usize> = self.cn_neighbors(c).iter().map(|&v| col_index[v]).collect();
                r.sort_unstable();
                r
            })
            .collect();
        SparseParityMatrix::from_row_lists(col_kinds.len(), rows, col_kinds)
            .expect("graph incidence is consistent")
    }

    /// Graph whose variable ids are the matrix columns and check ids its rows.
    pub fn from_parity_matrix(m: &SparseParityMatrix) -> FactorGraph {
        let mut g = FactorGraph::new();
        for &kind in &m.col_kinds {
            g.add_vn(kind);
        }
        for row in &m.row_adj {
            g.add_cn(row).expect("columns exist");
        }
        g
    }

    /// Channel positions carried by live variables, with their variable ids.
    pub fn channel_positions(&self) -> BTreeMap<usize, usize> {
        self.vn_ids()
            .filter_map(|v| self.vn_kinds[v].and_then(VnKind::channel_position).map(|p| (p, v)))
            .collect()
    }
}

/// Encoding factor graph of a polar code.
///
/// Variable `s·N + i` is position `i` of stage `s`; stage 0 is the message
/// `u`, stage `n` the codeword. Layer `s` (between stages `s-1` and `s`) pairs
/// positions `(i, i + 2^(s-1))`. Each butterfly with inputs `(u1, u2)` and
/// outputs `(x1, x2)` contributes the checks `{u1, u2, x1}` and `{u2, x2}`,
/// in that order.
pub fn build_encoding_graph(code: &PolarCode) -> FactorGraph {
    let big_n = code.block_len();
    let n = code.stages() as usize;
    let mut g = FactorGraph::new();
    for stage in 0..=n {
        for i in 0..big_n {
            let kind = if stage == n {
                VnKind::Channel(i)
            } else if stage == 0 && code.is_frozen(i) {
                VnKind::Frozen
            } else {
                VnKind::Hidden
            };
            g.add_vn(kind);
        }
    }
    for layer in 1..=n {
        let stride = 1 << (layer - 1);
        let left = (layer - 1) * big_n;
        let right = layer * big_n;
        for i in (0..big_n).filter(|i| i & stride == 0) {
            let j = i + stride;
            g.add_cn(&[left + i, left + j, right + i]).expect("fresh ids");
            g.add_cn(&[left + j, right + j]).expect("fresh ids");
        }
    }
    g
}

/// Sparse GF(2) parity-check matrix with a kind annotation per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityMatrix {
    rows: usize,
    cols: usize,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
    col_kinds: Vec<VnKind>,
}

impl SparseParityMatrix {
    /// Builds from per-row column lists. Lists are sorted; duplicates rejected.
    pub fn from_row_lists(
        cols: usize,
        mut row_adj: Vec<Vec<usize>>,
        col_kinds: Vec<VnKind>,
    ) -> Result<Self> {
        if col_kinds.len() != cols {
            return Err(Error::param(format!(
                "{} column kinds for {cols} columns",
                col_kinds.len()
            )));
        }
        let mut col_adj = vec![Vec::new(); cols];
        for (r, row) in row_adj.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("row {} repeats a column", r + 1)));
            }
            for &c in row.iter() {
                if c >= cols {
                    return Err(Error::param(format!("row {} references column {}", r + 1, c + 1)));
                }
                col_adj[c].push(r);
            }
        }
        Ok(SparseParityMatrix {
            rows: row_adj.len(),
            cols,
            row_adj,
            col_adj,
            col_kinds,
        })
    }

    /// Sparse copy of a dense matrix; every column becomes the channel
    /// position of the same index.
    pub fn from_dense(m: &crate::Gf2Matrix) -> Self {
        let rows = (0..m.rows())
            .map(|r| (0..m.cols()).filter(|&c| m.get(r, c)).collect())
            .collect();
        let kinds = (0..m.cols()).map(VnKind::Channel).collect();
        Self::from_row_lists(m.cols(), rows, kinds).expect("dense matrix is consistent")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_adj[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_adj[c]
    }

    pub fn row_lists(&self) -> &[Vec<usize>] {
        &self.row_adj
    }

    pub fn col_lists(&self) -> &[Vec<usize>] {
        &self.col_adj
    }

    pub fn col_kinds(&self) -> &[VnKind] {
        &self.col_kinds
    }

    pub fn with_col_kinds(mut self, kinds: Vec<VnKind>) -> Result<Self> {
        if kinds.len() != self.cols {
            return Err(Error::param(format!(
                "{} column kinds for {} columns",
                kinds.len(),
                self.cols
            )));
        }
        self.col_kinds = kinds;
        Ok(self)
    }

    pub fn num_edges(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    pub fn dims(&self) -> Dims {
        Dims {
            rows: self.rows,
            cols: self.cols,
            edges: self.num_edges(),
        }
    }

    pub fn density(&self) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::param("density of an empty matrix"));
        }
        Ok(self.dims().density())
    }

    /// Edge-perspective degree distributions.
    pub fn degree_profile(&self) -> Result<DegreeProfile> {
        let edges = self.num_edges();
        if edges == 0 {
            return Err(Error::param("degree profile of a matrix without edges"));
        }
        let fractions = |lists: &[Vec<usize>]| {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for l in lists.iter().filter(|l| !l.is_empty()) {
                *counts.entry(l.len()).or_default() += l.len();
            }
            counts
                .into_iter()
                .map(|(d, e)| (d, e as f64 / edges as f64))
                .collect()
        };
        Ok(DegreeProfile {
            lambda: fractions(&self.col_adj),
            rho: fractions(&self.row_adj),
        })
    }
}

/// Fraction of edges attached to nodes of each degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// Variable side.
    pub lambda: BTreeMap<usize, f64>,
    /// Check side.
    pub rho: BTreeMap<usize, f64>,
}

impl DegreeProfile {
    /// `λ(Z) = Σ λ_d Z^{d-1}`, so degree-1 variables form the constant term.
    pub fn lambda_polynomial(&self) -> String {
        polynomial(&self.lambda)
    }

    /// `ρ(Z) = Σ ρ_d Z^{d-1}`.
    pub fn rho_polynomial(&self) -> String {
        polynomial(&self.rho)
    }
}

fn polynomial(dist: &BTreeMap<usize, f64>) -> String {
    let terms: Vec<String> = dist
        .iter()
        .filter_map(|(&d, &f)| {
            let coeff = format_coeff(f);
            if coeff == "0" {
                return None;
            }
            Some(match d - 1 {
                0 => coeff,
                1 => format!("{coeff}Z"),
                e => format!("{coeff}Z{}", superscript(e)),
            })
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn format_coeff(f: f64) -> String {
    let s = format!("{f:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn superscript(e: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    e.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p84() -> PolarCode {
        PolarCode::construct(8, 4, 0.6).unwrap()
    }

    #[test]
    fn encoding_graph_sizes() {
        let g = build_encoding_graph(&p84());
        assert_eq!((g.num_vns(), g.num_cns(), g.num_edges()), (32, 24, 60));
        let g = build_encoding_graph(&PolarCode::construct(2, 1, 0.6).unwrap());
        assert_eq!((g.num_vns(), g.num_cns()), (4, 2));
        let m = build_encoding_graph(&p84()).to_parity_matrix();
        assert_eq!((m.rows(), m.cols()), (24, 32));
        let kinds = m.col_kinds();
        assert_eq!(kinds.iter().filter(|k| k.channel_position().is_some()).count(), 8);
        assert_eq!(kinds.iter().filter(|k| **k == VnKind::Frozen).count(), 4);
    }

    #[test]
    fn empty_graph() {
        let m = FactorGraph::new().to_parity_matrix();
        assert_eq!((m.rows(), m.cols()), (0, 0));
        assert!(m.density().is_err());
        assert!(m.degree_profile().is_err());
    }

    #[test]
    fn tiny_profile() {
        let mut g = FactorGraph::new();
        let a = g.add_vn(VnKind::Hidden);
        let b = g.add_vn(VnKind::Hidden);
        g.add_cn(&[a, b]).unwrap();
        let p = g.to_parity_matrix().degree_profile().unwrap();
        assert_eq!(p.lambda, BTreeMap::from([(1, 1.0)]));
        assert_eq!(p.rho, BTreeMap::from([(2, 1.0)]));
    }

    #[test]
    fn polynomial_notation() {
        let g = build_encoding_graph(&PolarCode::construct(256, 128, 0.6).unwrap());
        let p = g.to_parity_matrix().degree_profile().unwrap();
        assert_eq!(p.lambda_polynomial(), "0.075 + 0.4Z + 0.525Z²");
        assert_eq!(p.rho_polynomial(), "0.4Z + 0.6Z²");
        let dist = BTreeMap::from([(16, 0.5), (2, 0.5)]);
        assert_eq!(polynomial(&dist), "0.5Z + 0.5Z¹⁵");
    }

    #[test]
    fn toggle_cancels() {
        let mut g = FactorGraph::new();
        let a = g.add_vn(VnKind::Hidden);
        let c = g.add_cn(&[a, a]).unwrap();
        assert_eq!(g.cn_degree(c), 0);
        assert_eq!(g.num_edges(), 0);
        assert!(g.toggle_edge(7, c).is_err());
        assert!(g.toggle_edge(a, 9).is_err());
    }

    #[test]
    fn satisfaction_checks() {
        let code = p84();
        let g = build_encoding_graph(&code);
        assert!(g.extended_codeword_satisfies(&[0; 32]).unwrap());
        assert!(g.extended_codeword_satisfies(&[0; 31]).is_err());
        let ext = code.encode_extended(&[0, 0, 0, 1, 0, 1, 1, 0]).unwrap().flatten();
        assert!(g.extended_codeword_satisfies(&ext).unwrap());
        let mut broken = ext.clone();
        broken[8 + 3] ^= 1;
        assert!(!g.extended_codeword_satisfies(&broken).unwrap());
    }

    #[test]
    fn removal_keeps_counts() {
        let mut g = build_encoding_graph(&p84());
        g.remove_vn(0);
        g.remove_vn(0);
        g.remove_cn(5);
        let m = g.to_parity_matrix();
        assert_eq!(m.dims(), g.dims());
        assert!(!g.has_vn(0) && !g.has_cn(5));
        assert_eq!(g.vn_degree(0), 0);
    }
}
