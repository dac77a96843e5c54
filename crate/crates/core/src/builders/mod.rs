//! Topology builders: the finite-time families and the classic baselines.
//!
//! Every builder returns a [`GraphSequence`] on nodes `1..=n` whose graphs
//! have already been checked against the declared degree cap.

mod base;
mod baselines;
mod hyper;
mod simple;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::factor::FactorError;
use crate::graph::{Edge, EdgeList, GraphError, GraphSequence};

pub use base::{base_graph, base_graph_on};
pub use baselines::{
    exponential, one_peer_exponential, one_peer_hypercube, ring, square_grid, torus,
};
pub use hyper::{hyper_hypercube, hyper_hypercube_on};
pub use simple::{simple_base, simple_base_on};

/// Edge set of one round before it is wrapped into an [`EdgeList`].
pub type Round = Vec<Edge>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("k={k} outside [1, n-1] for n={n}")]
    BadK { n: usize, k: usize },
    #[error("{family} needs n >= {min}, got {n}")]
    BadN {
        family: &'static str,
        n: usize,
        min: usize,
    },
    #[error("n={0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error(
        "no torus grid rows x cols = n with rows, cols >= 2 (n={n}, rows={rows}, cols={cols})"
    )]
    BadGrid { n: usize, rows: usize, cols: usize },
    #[error("round {round}: node {node} has degree {degree} > k={k}")]
    DegreeCap {
        round: usize,
        node: usize,
        degree: usize,
        k: usize,
    },
    #[error("round {round}: no isolated node left in a target block")]
    NoIsolatedNode { round: usize },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl BuildError {
    pub fn kind(&self) -> &'static str {
        match self {
            BuildError::Factor(FactorError::RoughFactor { .. }) => "RoughFactor",
            BuildError::Factor(FactorError::NonPositive { .. }) => "NonPositive",
            BuildError::BadK { .. } => "BadK",
            BuildError::BadN { .. } => "BadN",
            BuildError::NonPowerOfTwo(_) => "NonPowerOfTwo",
            BuildError::BadGrid { .. } => "BadGrid",
            BuildError::DegreeCap { .. } => "DegreeCap",
            BuildError::NoIsolatedNode { .. } => "NoIsolatedNode",
            BuildError::UnknownFamily(_) => "UnknownFamily",
            BuildError::Graph(e) => e.kind(),
        }
    }
}

/// Wraps undirected rounds into a sequence, enforcing the degree cap.
pub(crate) fn assemble(
    n: usize,
    k: usize,
    rounds: Vec<Round>,
    tag: String,
) -> Result<GraphSequence, BuildError> {
    let mut graphs = Vec::with_capacity(rounds.len());
    for (ri, round) in rounds.into_iter().enumerate() {
        let g = EdgeList::new(n, false, round)?;
        if let Some((node, &degree)) = g.degrees().iter().enumerate().find(|(_, d)| **d > k) {
            return Err(BuildError::DegreeCap {
                round: ri + 1,
                node: node + 1,
                degree,
                k,
            });
        }
        graphs.push(g);
    }
    Ok(GraphSequence::new(n, k, graphs, tag)?)
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<(), BuildError> {
    if n > 1 && (k == 0 || k >= n) {
        return Err(BuildError::BadK { n, k });
    }
    Ok(())
}

/// A topology family together with its parameters; `Display`/`FromStr`
/// use the builder tags written into sequence files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ring,
    /// `None` picks the most square grid for the requested `n`.
    Torus(Option<(usize, usize)>),
    Exp,
    OnePeerExp,
    OnePeerHypercube,
    HyperHypercube {
        k: usize,
    },
    SimpleBase {
        k: usize,
    },
    Base {
        k: usize,
    },
}

impl Family {
    /// Family from a CLI-style name plus optional degree and grid.
    pub fn from_parts(
        name: &str,
        k: Option<usize>,
        grid: Option<(usize, usize)>,
    ) -> Result<Family, BuildError> {
        let need_k = || k.ok_or_else(|| BuildError::UnknownFamily(format!("{name} requires k")));
        Ok(match name {
            "ring" => Family::Ring,
            "torus" => Family::Torus(grid),
            "exp" => Family::Exp,
            "1peer-exp" => Family::OnePeerExp,
            "1peer-hypercube" => Family::OnePeerHypercube,
            "hhc" => Family::HyperHypercube { k: need_k()? },
            "simple-base" => Family::SimpleBase { k: need_k()? },
            "base" => Family::Base { k: need_k()? },
            other => return Err(BuildError::UnknownFamily(other.to_string())),
        })
    }

    /// Maximum degree parameter, if the family takes one.
    pub fn k(&self) -> Option<usize> {
        match *self {
            Family::HyperHypercube { k } | Family::SimpleBase { k } | Family::Base { k } => Some(k),
            _ => None,
        }
    }

    /// Whether the family is a single static graph.
    pub fn is_static(&self) -> bool {
        matches!(self, Family::Ring | Family::Torus(_) | Family::Exp)
    }

    pub fn build(&self, n: usize) -> Result<GraphSequence, BuildError> {
        match *self {
            Family::Ring => ring(n),
            Family::Torus(Some((rows, cols))) => torus(n, rows, cols),
            Family::Torus(None) => {
                let (rows, cols) = square_grid(n)?;
                torus(n, rows, cols)
            }
            Family::Exp => exponential(n),
            Family::OnePeerExp => one_peer_exponential(n),
            Family::OnePeerHypercube => one_peer_hypercube(n),
            Family::HyperHypercube { k } => hyper_hypercube(n, k),
            Family::SimpleBase { k } => simple_base(n, k),
            Family::Base { k } => base_graph(n, k),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Ring => write!(f, "ring"),
            Family::Torus(Some((r, c))) => write!(f, "torus:{r}x{c}"),
            Family::Torus(None) => write!(f, "torus"),
            Family::Exp => write!(f, "exp"),
            Family::OnePeerExp => write!(f, "1peer-exp"),
            Family::OnePeerHypercube => write!(f, "1peer-hypercube"),
            Family::HyperHypercube { k } => write!(f, "hhc:k={k}"),
            Family::SimpleBase { k } => write!(f, "simple-base:k={k}"),
            Family::Base { k } => write!(f, "base:k={k}"),
        }
    }
}

impl FromStr for Family {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || BuildError::UnknownFamily(s.to_string());
        if let Some(grid) = s.strip_prefix("torus:") {
            let (r, c) = grid.split_once('x').ok_or_else(unknown)?;
            let r = r.parse().map_err(|_| unknown())?;
            let c = c.parse().map_err(|_| unknown())?;
            return Ok(Family::Torus(Some((r, c))));
        }
        if let Some((name, k)) = s.split_once(":k=") {
            let k = k.parse().map_err(|_| unknown())?;
            return match name {
                "hhc" | "simple-base" | "base" => Family::from_parts(name, Some(k), None),
                _ => Err(unknown()),
            };
        }
        match s {
            "ring" | "torus" | "exp" | "1peer-exp" | "1peer-hypercube" => {
                Family::from_parts(s, None, None)
            }
            _ => Err(unknown()),
        }
    }
}
