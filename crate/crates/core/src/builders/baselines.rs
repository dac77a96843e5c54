//! Ring, torus and the exponential-graph families.

use crate::graph::{Edge, EdgeList, GraphSequence, Weight};

use super::{assemble, BuildError};

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

/// Static ring, each node linked to both neighbours at weight 1/3.
pub fn ring(n: usize) -> Result<GraphSequence, BuildError> {
    if n < 3 {
        return Err(BuildError::BadN {
            family: "ring",
            n,
            min: 3,
        });
    }
    let w = Weight::new(1, 3);
    let edges = (1..=n).map(|i| Edge::new(i, i % n + 1, w)).collect();
    assemble(n, 2, vec![edges], "ring".to_string())
}

/// Most square factor pair `rows <= cols` of `n` with both sides >= 2.
pub fn square_grid(n: usize) -> Result<(usize, usize), BuildError> {
    let mut best = None;
    let mut r = 2;
    while r * r <= n {
        if n.is_multiple_of(r) {
            best = Some((r, n / r));
        }
        r += 1;
    }
    best.ok_or(BuildError::BadGrid {
        n,
        rows: 0,
        cols: 0,
    })
}

/// Static 2-D torus with 4-neighbour wraparound at weight 1/5.
pub fn torus(n: usize, rows: usize, cols: usize) -> Result<GraphSequence, BuildError> {
    if rows < 2 || cols < 2 || rows * cols != n {
        return Err(BuildError::BadGrid { n, rows, cols });
    }
    let w = Weight::new(1, 5);
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut pairs = Vec::with_capacity(2 * n);
    for r in 0..rows {
        for c in 0..cols {
            for other in [id(r, (c + 1) % cols), id((r + 1) % rows, c)] {
                let me = id(r, c);
                pairs.push((me.min(other), me.max(other)));
            }
        }
    }
    // a side of length 2 wraps onto the same neighbour
    pairs.sort_unstable();
    pairs.dedup();
    let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, v, w)).collect();
    let k = if rows > 2 && cols > 2 {
        4
    } else if rows == 2 && cols == 2 {
        2
    } else {
        3
    };
    assemble(n, k, vec![edges], format!("torus:{rows}x{cols}"))
}

fn check_exp_n(family: &'static str, n: usize) -> Result<(), BuildError> {
    if n < 2 {
        return Err(BuildError::BadN { family, n, min: 2 });
    }
    Ok(())
}

fn directed_sequence(
    n: usize,
    k: usize,
    rounds: Vec<Vec<Edge>>,
    tag: &str,
) -> Result<GraphSequence, BuildError> {
    let graphs = rounds
        .into_iter()
        .map(|edges| EdgeList::new(n, true, edges))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GraphSequence::new(n, k, graphs, tag)?)
}

/// Static exponential graph: node `i` sends to `i + 2^j (mod n)` for
/// `j < ceil(log2 n)`, all at weight `1/(out-degree + 1)`.
pub fn exponential(n: usize) -> Result<GraphSequence, BuildError> {
    check_exp_n("exp", n)?;
    let hops = ceil_log2(n);
    let w = Weight::new(1, hops as u64 + 1);
    let edges = (0..n)
        .flat_map(|i| (0..hops).map(move |j| Edge::new(i + 1, (i + (1 << j)) % n + 1, w)))
        .collect();
    directed_sequence(n, hops as usize, vec![edges], "exp")
}

/// One-peer exponential graph: round `t` links `i -> i + 2^t (mod n)` at 1/2.
pub fn one_peer_exponential(n: usize) -> Result<GraphSequence, BuildError> {
    check_exp_n("1peer-exp", n)?;
    let w = Weight::new(1, 2);
    let rounds = (0..ceil_log2(n))
        .map(|t| {
            (0..n)
                .map(|i| Edge::new(i + 1, (i + (1 << t)) % n + 1, w))
                .collect()
        })
        .collect();
    directed_sequence(n, 1, rounds, "1peer-exp")
}

/// One-peer hypercube: perfect matchings along each hypercube dimension.
pub fn one_peer_hypercube(n: usize) -> Result<GraphSequence, BuildError> {
    if !n.is_power_of_two() {
        return Err(BuildError::NonPowerOfTwo(n));
    }
    let w = Weight::new(1, 2);
    let rounds = (0..n.trailing_zeros())
        .map(|t| {
            (0..n)
                .filter(|i| i & (1 << t) == 0)
                .map(|i| Edge::new(i + 1, (i | (1 << t)) + 1, w))
                .collect()
        })
        .collect();
    assemble(n, 1, rounds, "1peer-hypercube".to_string())
}
