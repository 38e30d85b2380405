//! Polar codes viewed as LDPC-like codes.
//!
//! The encoding factor graph of a polar code is a large but sparse bipartite
//! graph of typed variable nodes and parity checks. Repeatedly applying a small
//! set of local reduction rules shrinks it to a compact parity-check matrix
//! over an *extended* codeword that a plain flooding sum-product decoder can
//! work on.
//!
//! Layout:
//! - [`polar`]: Bhattacharyya construction, generator matrix, encoders, dense H.
//! - [`graph`]: typed factor graph, sparse matrix view, degree profiles.
//! - [`alist`]: ALIST and column-kind sidecar I/O.
//! - [`pruner`]: the reduction rules and the fixpoint driver.
//! - [`decoder`]: check/variable kernels, stage-scheduled BP, flooding SPA.
//! - [`channel`] and [`sim`]: BPSK/AWGN front end and the Monte-Carlo harness.

pub mod alist;
pub mod channel;
pub mod decoder;
mod error;
pub mod gf2;
pub mod graph;
pub mod polar;
pub mod pruner;
pub mod sim;

pub use error::{Error, Result};
pub use gf2::Gf2Matrix;
pub use graph::{DegreeProfile, Dims, FactorGraph, SparseParityMatrix, VnKind};
pub use polar::PolarCode;
pub use pruner::{prune, PruneReport};
