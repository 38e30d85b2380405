//! Reduction of the polar encoding graph to a compact LDPC-like graph.
//!
//! Every rule follows from the check and variable update equations:
//!
//! | pass | pattern | action |
//! |---|---|---|
//! | [`remove_frozen_vn`] | frozen VN | delete (its message is +∞) |
//! | [`prune_degree1_cn`] | degree-1 CN | delete CN and its VN (forced to 0) |
//! | [`condense_degree1_vnch`] | degree-2 CN on a degree-1 channel VN and a hidden VN | delete both, hidden VN takes the channel position |
//! | [`prune_degree1_vnh`] | degree-1 hidden VN | delete it with its CN (that CN only ever emits 0) |
//! | [`condense_degree2_vnh`] | degree-2 hidden VN | delete it, add its two CNs (GF(2) row sum) |
//! | [`condense_degree2_cn`] | degree-2 CN on two hidden VNs | delete it, merge the VNs (GF(2) column sum) |
//!
//! Each pass snapshots its eligible nodes in ascending id order and rechecks
//! the pattern before acting, so a node changed earlier in the same pass is
//! skipped. Nodes left with degree 0 are dropped at the end of every pass.
//! Surviving nodes keep their ids; merges keep the lower id.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Dims, FactorGraph, VnKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pass {
    RemoveFrozenVn,
    PruneDegree1Cn,
    CondenseDegree1Vnch,
    PruneDegree1Vnh,
    CondenseDegree2Vnh,
    CondenseDegree2Cn,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::RemoveFrozenVn => "remove_frozen_vn",
            Pass::PruneDegree1Cn => "prune_degree1_cn",
            Pass::CondenseDegree1Vnch => "condense_degree1_vnch",
            Pass::PruneDegree1Vnh => "prune_degree1_vnh",
            Pass::CondenseDegree2Vnh => "condense_degree2_vnh",
            Pass::CondenseDegree2Cn => "condense_degree2_cn",
        })
    }
}

/// Order of the passes inside one round of [`prune`].
pub const ROUND_ORDER: [Pass; 5] = [
    Pass::PruneDegree1Cn,
    Pass::CondenseDegree1Vnch,
    Pass::PruneDegree1Vnh,
    Pass::CondenseDegree2Vnh,
    Pass::CondenseDegree2Cn,
];

/// What one pass did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassStats {
    pub pass: Pass,
    /// 0 for the frozen removal, 1.. for the fixpoint rounds.
    pub round: usize,
    /// Number of times the rule fired.
    pub applied: usize,
    pub vns_removed: usize,
    pub cns_removed: usize,
    pub edges_removed: usize,
    /// 1-based channel positions forced to zero by a degree-1 check.
    pub pinned: Vec<usize>,
    /// 1-based channel positions whose variable lost every check.
    pub released: Vec<usize>,
}

impl PassStats {
    fn new(pass: Pass) -> Self {
        PassStats {
            pass,
            round: 0,
            applied: 0,
            vns_removed: 0,
            cns_removed: 0,
            edges_removed: 0,
            pinned: Vec::new(),
            released: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimsReport {
    pub rows: usize,
    pub cols: usize,
    pub edges: usize,
    pub density: f64,
}

impl From<Dims> for DimsReport {
    fn from(d: Dims) -> Self {
        DimsReport {
            rows: d.rows,
            cols: d.cols,
            edges: d.edges,
            density: d.density(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub initial: DimsReport,
    #[serde(rename = "final")]
    pub final_dims: DimsReport,
    /// Fixpoint rounds executed, including the last one that changed nothing.
    pub rounds: usize,
    pub pass_order: Vec<Pass>,
    pub passes: Vec<PassStats>,
    /// 1-based, ascending.
    pub pinned_positions: Vec<usize>,
    /// 1-based, ascending.
    pub released_positions: Vec<usize>,
}

impl PruneReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// 0-based pinned positions.
    pub fn pinned(&self) -> Vec<usize> {
        self.pinned_positions.iter().map(|p| p - 1).collect()
    }
}

/// Runs the frozen removal once, then the five rules in [`ROUND_ORDER`] until
/// `(rows, cols, edges)` stops changing.
pub fn prune(mut g: FactorGraph) -> (FactorGraph, PruneReport) {
    let initial = g.dims();
    let mut passes = vec![remove_frozen_vn(&mut g)];
    let mut rounds = 0;
    loop {
        rounds += 1;
        let before = g.dims();
        for pass in ROUND_ORDER {
            let mut stats = run_pass(&mut g, pass);
            stats.round = rounds;
            passes.push(stats);
        }
        if g.dims() == before {
            break;
        }
    }
    let mut pinned: Vec<usize> = passes.iter().flat_map(|p| p.pinned.iter().copied()).collect();
    let mut released: Vec<usize> = passes.iter().flat_map(|p| p.released.iter().copied()).collect();
    pinned.sort_unstable();
    released.sort_unstable();
    let report = PruneReport {
        initial: initial.into(),
        final_dims: g.dims().into(),
        rounds,
        pass_order: ROUND_ORDER.to_vec(),
        passes,
        pinned_positions: pinned,
        released_positions: released,
    };
    (g, report)
}

pub fn run_pass(g: &mut FactorGraph, pass: Pass) -> PassStats {
    match pass {
        Pass::RemoveFrozenVn => remove_frozen_vn(g),
        Pass::PruneDegree1Cn => prune_degree1_cn(g),
        Pass::CondenseDegree1Vnch => condense_degree1_vnch(g),
        Pass::PruneDegree1Vnh => prune_degree1_vnh(g),
        Pass::CondenseDegree2Vnh => condense_degree2_vnh(g),
        Pass::CondenseDegree2Cn => condense_degree2_cn(g),
    }
}

/// Wraps a pass body with dimension bookkeeping and degree-0 cleanup.
fn tracked(g: &mut FactorGraph, pass: Pass, body: impl FnOnce(&mut FactorGraph, &mut PassStats)) -> PassStats {
    let before = g.dims();
    let mut stats = PassStats::new(pass);
    body(g, &mut stats);
    drop_isolated(g, &mut stats);
    let after = g.dims();
    stats.vns_removed = before.cols - after.cols;
    stats.cns_removed = before.rows - after.rows;
    stats.edges_removed = before.edges - after.edges;
    stats
}

fn drop_isolated(g: &mut FactorGraph, stats: &mut PassStats) {
    let empty_cns: Vec<usize> = g.cn_ids().filter(|&c| g.cn_degree(c) == 0).collect();
    for c in empty_cns {
        g.remove_cn(c);
    }
    let empty_vns: Vec<usize> = g.vn_ids().filter(|&v| g.vn_degree(v) == 0).collect();
    for v in empty_vns {
        if let Some(VnKind::Channel(p)) = g.vn_kind(v) {
            stats.released.push(p + 1);
        }
        g.remove_vn(v);
    }
}

fn is_hidden(g: &FactorGraph, v: usize) -> bool {
    g.vn_kind(v).is_some_and(VnKind::is_hidden)
}

fn is_channel(g: &FactorGraph, v: usize) -> bool {
    g.vn_kind(v).and_then(VnKind::channel_position).is_some()
}

pub fn remove_frozen_vn(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::RemoveFrozenVn, |g, stats| {
        let frozen: Vec<usize> = g.vn_ids().filter(|&v| g.vn_kind(v) == Some(VnKind::Frozen)).collect();
        for v in frozen {
            g.remove_vn(v);
            stats.applied += 1;
        }
    })
}

pub fn prune_degree1_cn(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::PruneDegree1Cn, |g, stats| {
        let eligible: Vec<usize> = g.cn_ids().filter(|&c| g.cn_degree(c) == 1).collect();
        for c in eligible {
            if g.cn_degree(c) != 1 {
                continue;
            }
            let v = *g.cn_neighbors(c).first().expect("degree 1");
            if let Some(VnKind::Channel(p)) = g.vn_kind(v) {
                stats.pinned.push(p + 1);
            }
            g.remove_cn(c);
            g.remove_vn(v);
            stats.applied += 1;
        }
    })
}

pub fn condense_degree1_vnch(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::CondenseDegree1Vnch, |g, stats| {
        let eligible: Vec<usize> = g.cn_ids().filter(|&c| g.cn_degree(c) == 2).collect();
        for c in eligible {
            if g.cn_degree(c) != 2 {
                continue;
            }
            let pair: Vec<usize> = g.cn_neighbors(c).iter().copied().collect();
            let (a, b) = (pair[0], pair[1]);
            let matched = [(a, b), (b, a)]
                .into_iter()
                .find(|&(ch, h)| is_channel(g, ch) && g.vn_degree(ch) == 1 && is_hidden(g, h));
            if let Some((ch, h)) = matched {
                let kind = g.vn_kind(ch).expect("live");
                g.remove_cn(c);
                g.remove_vn(ch);
                g.set_vn_kind(h, kind);
                stats.applied += 1;
            }
        }
    })
}

pub fn prune_degree1_vnh(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::PruneDegree1Vnh, |g, stats| {
        let eligible: Vec<usize> = g.vn_ids().filter(|&v| is_hidden(g, v) && g.vn_degree(v) == 1).collect();
        for v in eligible {
            if !is_hidden(g, v) || g.vn_degree(v) != 1 {
                continue;
            }
            let c = *g.vn_neighbors(v).first().expect("degree 1");
            g.remove_cn(c);
            g.remove_vn(v);
            stats.applied += 1;
        }
    })
}

pub fn condense_degree2_vnh(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::CondenseDegree2Vnh, |g, stats| {
        let eligible: Vec<usize> = g.vn_ids().filter(|&v| is_hidden(g, v) && g.vn_degree(v) == 2).collect();
        for v in eligible {
            if !is_hidden(g, v) || g.vn_degree(v) != 2 {
                continue;
            }
            let pair: Vec<usize> = g.vn_neighbors(v).iter().copied().collect();
            let (keep, gone) = (pair[0], pair[1]);
            g.remove_vn(v);
            let moved: Vec<usize> = g.cn_neighbors(gone).iter().copied().collect();
            g.remove_cn(gone);
            for u in moved {
                g.toggle_edge(u, keep).expect("live nodes");
            }
            stats.applied += 1;
        }
    })
}

pub fn condense_degree2_cn(g: &mut FactorGraph) -> PassStats {
    tracked(g, Pass::CondenseDegree2Cn, |g, stats| {
        let eligible: Vec<usize> = g.cn_ids().filter(|&c| g.cn_degree(c) == 2).collect();
        for c in eligible {
            if g.cn_degree(c) != 2 {
                continue;
            }
            let pair: Vec<usize> = g.cn_neighbors(c).iter().copied().collect();
            let (keep, gone) = (pair[0], pair[1]);
            if !is_hidden(g, keep) || !is_hidden(g, gone) {
                continue;
            }
            g.remove_cn(c);
            let moved: BTreeSet<usize> = g.vn_neighbors(gone).clone();
            g.remove_vn(gone);
            for d in moved {
                g.toggle_edge(keep, d).expect("live nodes");
            }
            stats.applied += 1;
        }
    })
}
