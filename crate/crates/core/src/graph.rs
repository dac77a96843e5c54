//! Weighted graph sequences, mixing matrices and node parameter matrices.
//!
//! Node indices are 1-based everywhere in the public data model. Self-loops
//! are never stored: the diagonal of a [`MixingMatrix`] is recomputed from the
//! edge weights so that every row and column sums to one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, ToPrimitive, Zero};
use thiserror::Error;

/// Slack allowed on row/column sums and on the recomputed self-loop weight.
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node index {index} outside 1..={n}")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0} (self-loops are implicit)")]
    SelfLoop(usize),
    #[error("node {node} has incident weight {sum} > 1")]
    IncidentWeightOverflow { node: usize, sum: f64 },
    #[error("directed graph cannot be balanced at node {node}: out-weight {out_weight}, in-weight {in_weight}")]
    DirectedImbalance {
        node: usize,
        out_weight: f64,
        in_weight: f64,
    },
    #[error("expected {expected} columns, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("graph {index} has {actual} nodes, sequence has {expected}")]
    NodeCountMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("invalid weight {0:?}")]
    BadWeight(String),
}

impl GraphError {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphError::NodeOutOfRange { .. } => "NodeOutOfRange",
            GraphError::SelfLoop(_) => "SelfLoop",
            GraphError::IncidentWeightOverflow { .. } => "IncidentWeightOverflow",
            GraphError::DirectedImbalance { .. } => "DirectedImbalance",
            GraphError::DimensionMismatch { .. } => "DimensionMismatch",
            GraphError::NodeCountMismatch { .. } => "NodeCountMismatch",
            GraphError::BadWeight(_) => "BadWeight",
        }
    }
}

/// Exact edge weight, serialized as `"num/den"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Ratio<u64>);

impl Weight {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Weight(Ratio::new(num, den))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_unit_interval(self) -> bool {
        !self.0.is_zero() && self.0 <= Ratio::from_integer(1)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Weight {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadWeight(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: u64 = num.parse().map_err(|_| bad())?;
        let den: u64 = den.parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Weight::new(num, den))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
}

impl Edge {
    pub fn new(u: usize, v: usize, weight: Weight) -> Self {
        Edge { u, v, weight }
    }
}

/// One communication round: a weighted graph on nodes `1..=n`.
///
/// Construction only rejects structural problems (indices out of range,
/// explicit self-loops). Weight range, duplicates and degree caps are
/// reported by [`validate_sequence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
}

impl EdgeList {
    pub fn new(n: usize, directed: bool, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut edges = edges;
        for e in edges.iter_mut() {
            for index in [e.u, e.v] {
                if index == 0 || index > n {
                    return Err(GraphError::NodeOutOfRange { index, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if !directed && e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort();
        Ok(EdgeList { n, directed, edges })
    }

    pub fn empty(n: usize, directed: bool) -> Self {
        EdgeList {
            n,
            directed,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Per-node degree (index 0 is node 1). Directed graphs count
    /// `max(out, in)`, i.e. the number of peers a node talks to in one
    /// direction.
    pub fn degrees(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        let mut inc = vec![0usize; self.n];
        for e in &self.edges {
            out[e.u - 1] += 1;
            inc[e.v - 1] += 1;
        }
        if self.directed {
            out.iter().zip(&inc).map(|(a, b)| *a.max(b)).collect()
        } else {
            out.iter().zip(&inc).map(|(a, b)| a + b).collect()
        }
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Number of parameter messages exchanged in this round.
    pub fn message_count(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            2 * self.edges.len()
        }
    }

    pub fn to_mixing_matrix(&self) -> Result<MixingMatrix, GraphError> {
        to_mixing_matrix(self)
    }
}

/// An ordered list of graphs over a fixed node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSequence {
    n: usize,
    k: usize,
    graphs: Vec<EdgeList>,
    builder_tag: String,
}

impl GraphSequence {
    pub fn new(
        n: usize,
        k: usize,
        graphs: Vec<EdgeList>,
        builder_tag: impl Into<String>,
    ) -> Result<Self, GraphError> {
        for (index, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(GraphError::NodeCountMismatch {
                    index,
                    expected: n,
                    actual: g.n(),
                });
            }
        }
        Ok(GraphSequence {
            n,
            k,
            graphs,
            builder_tag: builder_tag.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graphs(&self) -> &[EdgeList] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn builder_tag(&self) -> &str {
        &self.builder_tag
    }

    pub fn max_degree(&self) -> usize {
        self.graphs
            .iter()
            .map(EdgeList::max_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn mixing_matrices(&self) -> Result<Vec<MixingMatrix>, GraphError> {
        self.graphs.iter().map(to_mixing_matrix).collect()
    }

    /// The same rounds concatenated `times` times.
    pub fn cycled(&self, times: usize) -> GraphSequence {
        let graphs = (0..times)
            .flat_map(|_| self.graphs.iter().cloned())
            .collect();
        GraphSequence {
            n: self.n,
            k: self.k,
            graphs,
            builder_tag: self.builder_tag.clone(),
        }
    }
}

/// Sparse doubly stochastic matrix, rows stored as `(column, weight)` with
/// 0-based columns and the diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl MixingMatrix {
    pub fn identity(n: usize) -> Self {
        MixingMatrix {
            n,
            rows: (0..n).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Entry `(i, j)` with 0-based indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, w)| *w)
            .unwrap_or(0.0)
    }

    pub fn off_diagonal_nnz(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|(c, w)| *c != i && *w != 0.0).count())
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                dense[i][j] += w;
            }
        }
        dense
    }

    /// Largest deviation of any row or column sum from one.
    pub fn stochastic_residual(&self) -> (f64, f64) {
        let mut col = vec![0.0; self.n];
        let mut row_res: f64 = 0.0;
        for row in &self.rows {
            let s: f64 = row.iter().map(|(_, w)| w).sum();
            row_res = row_res.max((s - 1.0).abs());
            for &(j, w) in row {
                col[j] += w;
            }
        }
        let col_res = col.iter().fold(0.0f64, |m, s| m.max((s - 1.0).abs()));
        (row_res, col_res)
    }

    /// `y W` for a row vector `y`.
    pub fn left_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, row) in self.rows.iter().enumerate() {
            let yj = y[j];
            for &(i, w) in row {
                out[i] += w * yj;
            }
        }
        out
    }

    /// `W z` for a column vector `z`.
    pub fn right_mul(&self, z: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * z[j]).sum())
            .collect()
    }
}

fn ratio_sum(weights: &[Weight]) -> Option<Ratio<u64>> {
    weights
        .iter()
        .try_fold(Ratio::zero(), |acc: Ratio<u64>, w| {
            acc.checked_add(&w.ratio())
        })
}

/// `1 - sum(weights)`, exact when the rational sum does not overflow.
fn slack(weights: &[Weight]) -> f64 {
    match ratio_sum(weights) {
        Some(s) => {
            let one = Ratio::from_integer(1u64);
            if s <= one {
                (one - s).to_f64().unwrap_or(0.0)
            } else {
                -((s - one).to_f64().unwrap_or(f64::INFINITY))
            }
        }
        None => 1.0 - weights.iter().map(|w| w.to_f64()).sum::<f64>(),
    }
}

/// Builds the doubly stochastic matrix of one graph; self-loops fill the
/// slack of each row.
pub fn to_mixing_matrix(g: &EdgeList) -> Result<MixingMatrix, GraphError> {
    let n = g.n();
    let mut out_w: Vec<Vec<Weight>> = vec![Vec::new(); n];
    let mut in_w: Vec<Vec<Weight>> = vec![Vec::new(); n];
    let mut entries: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in g.edges() {
        let (u, v) = (e.u - 1, e.v - 1);
        let w = e.weight.to_f64();
        *entries[u].entry(v).or_insert(0.0) += w;
        out_w[u].push(e.weight);
        in_w[v].push(e.weight);
        if !g.is_directed() {
            *entries[v].entry(u).or_insert(0.0) += w;
            out_w[v].push(e.weight);
            in_w[u].push(e.weight);
        }
    }
    for i in 0..n {
        let row_slack = slack(&out_w[i]);
        if row_slack < -STOCHASTIC_TOL {
            let sum = 1.0 - row_slack;
            return Err(if g.is_directed() {
                GraphError::DirectedImbalance {
                    node: i + 1,
                    out_weight: sum,
                    in_weight: 1.0 - slack(&in_w[i]),
                }
            } else {
                GraphError::IncidentWeightOverflow { node: i + 1, sum }
            });
        }
        if g.is_directed() {
            let col_slack = slack(&in_w[i]);
            if (row_slack - col_slack).abs() > STOCHASTIC_TOL || col_slack < -STOCHASTIC_TOL {
                return Err(GraphError::DirectedImbalance {
                    node: i + 1,
                    out_weight: 1.0 - row_slack,
                    in_weight: 1.0 - col_slack,
                });
            }
        }
        let diag = row_slack.max(0.0);
        if diag > 0.0 {
            entries[i].insert(i, diag);
        }
    }
    let rows = entries
        .into_iter()
        .map(|m| m.into_iter().collect())
        .collect();
    Ok(MixingMatrix { n, rows })
}

/// `d x n` matrix whose column `i` is node `i + 1`'s parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMatrix {
    d: usize,
    n: usize,
    data: Vec<f64>,
}

impl NodeMatrix {
    pub fn zeros(d: usize, n: usize) -> Self {
        NodeMatrix {
            d,
            n,
            data: vec![0.0; d * n],
        }
    }

    pub fn from_columns(columns: Vec<Vec<f64>>) -> Self {
        let n = columns.len();
        let d = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == d), "ragged columns");
        NodeMatrix {
            d,
            n,
            data: columns.into_iter().flatten().collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn column_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.d.max(1)).take(self.n)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for col in self.columns() {
            for (m, x) in mean.iter_mut().zip(col) {
                *m += x;
            }
        }
        let n = self.n as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }
}

/// `X W`: column `i` of the result is `sum_j W[j][i] x_j`.
pub fn apply_mix(w: &MixingMatrix, x: &NodeMatrix) -> Result<NodeMatrix, GraphError> {
    if x.n() != w.n() {
        return Err(GraphError::DimensionMismatch {
            expected: w.n(),
            actual: x.n(),
        });
    }
    let d = x.d();
    let mut out = NodeMatrix::zeros(d, x.n());
    for (j, row) in w.rows().iter().enumerate() {
        let xj = x.column(j);
        for &(i, wij) in row {
            let dst = out.column_mut(i);
            for (o, v) in dst.iter_mut().zip(xj) {
                *o += wij * v;
            }
        }
    }
    Ok(out)
}

/// `(1/n) sum_i ||x_i - mean||^2`.
pub fn consensus_error(x: &NodeMatrix) -> f64 {
    if x.n() == 0 {
        return 0.0;
    }
    let mean = x.mean();
    let total: f64 = x
        .columns()
        .map(|c| {
            c.iter()
                .zip(&mean)
                .map(|(a, m)| (a - m) * (a - m))
                .sum::<f64>()
        })
        .sum();
    total / x.n() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DegreeViolation {
        graph: usize,
        node: usize,
        degree: usize,
        cap: usize,
    },
    WeightRange {
        graph: usize,
        u: usize,
        v: usize,
        weight: Weight,
    },
    DuplicateEdge {
        graph: usize,
        u: usize,
        v: usize,
    },
    NodeCount {
        graph: usize,
        n: usize,
    },
    NotDoublyStochastic {
        graph: usize,
        row_residual: f64,
        column_residual: f64,
    },
    Mixing {
        graph: usize,
        error: GraphError,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // graph indices are shown 1-based like nodes
        match self {
            Violation::DegreeViolation {
                graph,
                node,
                degree,
                cap,
            } => write!(
                f,
                "graph {}: node {node} has degree {degree} > k={cap}",
                graph + 1
            ),
            Violation::WeightRange {
                graph,
                u,
                v,
                weight,
            } => {
                write!(
                    f,
                    "graph {}: edge ({u},{v}) weight {weight} outside (0,1]",
                    graph + 1
                )
            }
            Violation::DuplicateEdge { graph, u, v } => {
                write!(f, "graph {}: duplicate edge ({u},{v})", graph + 1)
            }
            Violation::NodeCount { graph, n } => {
                write!(
                    f,
                    "graph {}: node count {n} differs from the sequence",
                    graph + 1
                )
            }
            Violation::NotDoublyStochastic {
                graph,
                row_residual,
                column_residual,
            } => write!(
                f,
                "graph {}: row residual {row_residual:e}, column residual {column_residual:e}",
                graph + 1
            ),
            Violation::Mixing { graph, error } => write!(f, "graph {}: {error}", graph + 1),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every graph-level invariant; problems are collected, not raised.
pub fn validate_sequence(seq: &GraphSequence) -> ValidationReport {
    let mut violations = Vec::new();
    for (gi, g) in seq.graphs().iter().enumerate() {
        if g.n() != seq.n() {
            violations.push(Violation::NodeCount {
                graph: gi,
                n: g.n(),
            });
        }
        for pair in g.edges().windows(2) {
            if (pair[0].u, pair[0].v) == (pair[1].u, pair[1].v) {
                violations.push(Violation::DuplicateEdge {
                    graph: gi,
                    u: pair[0].u,
                    v: pair[0].v,
                });
            }
        }
        for e in g.edges() {
            if !e.weight.is_unit_interval() {
                violations.push(Violation::WeightRange {
                    graph: gi,
                    u: e.u,
                    v: e.v,
                    weight: e.weight,
                });
            }
        }
        for (i, deg) in g.degrees().into_iter().enumerate() {
            if deg > seq.k() {
                violations.push(Violation::DegreeViolation {
                    graph: gi,
                    node: i + 1,
                    degree: deg,
                    cap: seq.k(),
                });
            }
        }
        match to_mixing_matrix(g) {
            Ok(w) => {
                let (row_residual, column_residual) = w.stochastic_residual();
                if row_residual > STOCHASTIC_TOL || column_residual > STOCHASTIC_TOL {
                    violations.push(Violation::NotDoublyStochastic {
                        graph: gi,
                        row_residual,
                        column_residual,
                    });
                }
            }
            Err(error) => violations.push(Violation::Mixing { graph: gi, error }),
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Weight {
        Weight::new(1, 2)
    }

    fn undirected(n: usize, edges: &[(usize, usize, Weight)]) -> EdgeList {
        EdgeList::new(
            n,
            false,
            edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_node_average() {
        let w = to_mixing_matrix(&undirected(2, &[(1, 2, half())])).unwrap();
        assert_eq!(w.to_dense(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn three_pairs_block_diagonal() {
        let g = undirected(6, &[(1, 2, half()), (3, 4, half()), (5, 6, half())]);
        let dense = to_mixing_matrix(&g).unwrap().to_dense();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i / 2 == j / 2 { 0.5 } else { 0.0 };
                assert_eq!(dense[i][j], expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn isolated_nodes_give_identity() {
        let w = to_mixing_matrix(&EdgeList::empty(3, false)).unwrap();
        assert_eq!(w, MixingMatrix::identity(3));
    }

    #[test]
    fn overflow_is_rejected() {
        let g = undirected(3, &[(1, 2, Weight::new(2, 3)), (1, 3, Weight::new(1, 2))]);
        assert!(matches!(
            to_mixing_matrix(&g),
            Err(GraphError::IncidentWeightOverflow { node: 1, .. })
        ));
    }

    #[test]
    fn unbalanced_directed_is_rejected() {
        let g = EdgeList::new(3, true, vec![Edge::new(1, 2, half())]).unwrap();
        assert!(matches!(
            to_mixing_matrix(&g),
            Err(GraphError::DirectedImbalance { .. })
        ));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            EdgeList::new(2, false, vec![Edge::new(1, 3, half())]),
            Err(GraphError::NodeOutOfRange { index: 3, n: 2 })
        );
        assert_eq!(
            EdgeList::new(2, false, vec![Edge::new(2, 2, half())]),
            Err(GraphError::SelfLoop(2))
        );
    }

    #[test]
    fn undirected_edges_are_canonical() {
        let g = undirected(3, &[(3, 1, half()), (2, 1, half())]);
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("4/5".parse::<Weight>().unwrap(), Weight::new(4, 5));
        assert_eq!("1".parse::<Weight>().unwrap(), Weight::new(1, 1));
        assert_eq!(Weight::new(2, 4).to_string(), "1/2");
        assert!("1/0".parse::<Weight>().is_err());
        assert!("x/2".parse::<Weight>().is_err());
    }

    #[test]
    fn apply_mix_examples() {
        let x = NodeMatrix::from_columns(vec![vec![1.0, -2.0], vec![3.0, 0.5], vec![0.0, 4.0]]);
        assert_eq!(apply_mix(&MixingMatrix::identity(3), &x).unwrap(), x);

        let w = to_mixing_matrix(&undirected(2, &[(1, 2, half())])).unwrap();
        let x = NodeMatrix::from_columns(vec![vec![0.0], vec![2.0]]);
        let y = apply_mix(&w, &x).unwrap();
        assert_eq!(y.column(0), &[1.0]);
        assert_eq!(y.column(1), &[1.0]);

        let third = Weight::new(1, 3);
        let complete = undirected(3, &[(1, 2, third), (1, 3, third), (2, 3, third)]);
        let w = to_mixing_matrix(&complete).unwrap();
        let x = NodeMatrix::from_columns(vec![vec![3.0], vec![6.0], vec![0.0]]);
        let y = apply_mix(&w, &x).unwrap();
        for c in y.columns() {
            assert!((c[0] - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn apply_mix_dimension_mismatch() {
        let x = NodeMatrix::zeros(1, 4);
        assert!(matches!(
            apply_mix(&MixingMatrix::identity(3), &x),
            Err(GraphError::DimensionMismatch {
                expected: 3,
                actual: 4
            })
        ));
    }

    #[test]
    fn consensus_error_examples() {
        let same = NodeMatrix::from_columns(vec![vec![1.5, 2.0]; 4]);
        assert_eq!(consensus_error(&same), 0.0);
        let two = NodeMatrix::from_columns(vec![vec![0.0], vec![2.0]]);
        assert_eq!(consensus_error(&two), 1.0);
        let four = NodeMatrix::from_columns(vec![vec![0.0], vec![0.0], vec![2.0], vec![2.0]]);
        assert_eq!(consensus_error(&four), 1.0);
    }

    #[test]
    fn validation_flags_degree_and_weight() {
        let star = undirected(3, &[(1, 2, Weight::new(1, 3)), (1, 3, Weight::new(1, 3))]);
        let seq = GraphSequence::new(3, 1, vec![star], "hand").unwrap();
        let report = validate_sequence(&seq);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::DegreeViolation {
                node: 1,
                degree: 2,
                cap: 1,
                ..
            }
        ));

        let heavy = undirected(2, &[(1, 2, Weight::new(3, 2))]);
        let seq = GraphSequence::new(2, 1, vec![heavy], "hand").unwrap();
        let report = validate_sequence(&seq);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::WeightRange { .. })));
        assert_eq!(
            report
                .violations
                .iter()
                .filter(|v| matches!(v, Violation::WeightRange { .. }))
                .count(),
            1
        );
    }

    #[test]
    fn validation_flags_duplicates() {
        let g = undirected(2, &[(1, 2, Weight::new(1, 4)), (2, 1, Weight::new(1, 4))]);
        let seq = GraphSequence::new(2, 2, vec![g], "hand").unwrap();
        let report = validate_sequence(&seq);
        assert_eq!(
            report.violations,
            vec![Violation::DuplicateEdge {
                graph: 0,
                u: 1,
                v: 2
            }]
        );
    }

    #[test]
    fn sequence_rejects_mismatched_graphs() {
        let err = GraphSequence::new(3, 1, vec![EdgeList::empty(2, false)], "x").unwrap_err();
        assert_eq!(err.kind(), "NodeCountMismatch");
    }
}
