use crate::factor::min_factorization;
use crate::graph::{Edge, GraphSequence, Weight};

use super::{assemble, BuildError, Round};

/// k-peer hyper-hypercube on nodes `1..=n`.
pub fn hyper_hypercube(n: usize, k: usize) -> Result<GraphSequence, BuildError> {
    let nodes: Vec<usize> = (1..=n).collect();
    let rounds = hyper_hypercube_on(&nodes, k)?;
    assemble(n, k, rounds, format!("hhc:k={k}"))
}

/// Hyper-hypercube rounds over an ordered node set.
///
/// With factors `n_1 <= ... <= n_L`, round `l` joins the nodes whose
/// mixed-radix positions differ only in digit `l` (stride
/// `n_1 * ... * n_{l-1}`) into cliques of size `n_l` at weight `1/n_l`.
/// After round `l`, every contiguous block of `n_1 * ... * n_l` nodes holds
/// its own average.
pub fn hyper_hypercube_on(nodes: &[usize], k: usize) -> Result<Vec<Round>, BuildError> {
    let n = nodes.len();
    if n <= 1 {
        return Ok(Vec::new());
    }
    let mut factors = min_factorization(n as u64, k as u64)?.factors;
    factors.reverse();
    let mut rounds = Vec::with_capacity(factors.len());
    let mut stride = 1usize;
    for f in factors {
        let f = f as usize;
        let weight = Weight::new(1, f as u64);
        let mut round = Vec::with_capacity(n * (f - 1) / 2);
        for block in (0..n).step_by(stride * f) {
            for offset in 0..stride {
                let members: Vec<usize> =
                    (0..f).map(|r| nodes[block + r * stride + offset]).collect();
                for (i, &a) in members.iter().enumerate() {
                    for &b in &members[i + 1..] {
                        round.push(Edge::new(a, b, weight));
                    }
                }
            }
        }
        rounds.push(round);
        stride *= f;
    }
    Ok(rounds)
}
