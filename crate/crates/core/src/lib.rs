//! Finite-time convergent communication topologies for decentralized
//! averaging and learning.
//!
//! - [`graph`]: edge lists, graph sequences, mixing matrices, validation.
//! - [`factor`]: factorizations and digit expansions used by the builders.
//! - [`builders`]: Base-(k+1), Simple Base-(k+1), k-peer hyper-hypercube and
//!   the ring / torus / exponential baselines.
//! - [`consensus`]: gossip simulation, finite-time checks, consensus rates.
//! - [`dsgd`]: decentralized SGD on synthetic quadratics.
//! - [`io`]: JSON sequence files and DOT export.

pub mod builders;
pub mod consensus;
pub mod dsgd;
pub mod factor;
pub mod graph;
pub mod io;

pub use builders::{BuildError, Family};
pub use graph::{
    apply_mix, consensus_error, to_mixing_matrix, validate_sequence, Edge, EdgeList, GraphError,
    GraphSequence, MixingMatrix, NodeMatrix, ValidationReport, Violation, Weight,
};
