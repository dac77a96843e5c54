use crate::factor::pq_split;
use crate::graph::GraphSequence;

use super::hyper::hyper_hypercube_on;
use super::simple::simple_base_on;
use super::{assemble, check_k, BuildError, Round};

/// Base-(k+1) sequence on nodes `1..=n`.
pub fn base_graph(n: usize, k: usize) -> Result<GraphSequence, BuildError> {
    let nodes: Vec<usize> = (1..=n).collect();
    let rounds = base_graph_on(&nodes, k)?;
    assemble(n, k, rounds, format!("base:k={k}"))
}

fn merge_parallel(schedules: &[Vec<Round>]) -> Vec<Round> {
    let len = schedules.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|m| {
            schedules
                .iter()
                .filter_map(|s| s.get(m))
                .flatten()
                .copied()
                .collect()
        })
        .collect()
}

/// Base-(k+1) rounds over an ordered node set.
///
/// Splits `n = p * q` (`p` the (k+1)-smooth part), averages the `p`
/// contiguous groups of size `q` in parallel with the simple construction,
/// then finishes with hyper-hypercubes over the `q` transversals. Falls back
/// to the simple construction on the whole set when that is strictly shorter.
pub fn base_graph_on(nodes: &[usize], k: usize) -> Result<Vec<Round>, BuildError> {
    let n = nodes.len();
    if n <= 1 {
        return Ok(Vec::new());
    }
    check_k(n, k)?;
    let simple = simple_base_on(nodes, k)?;

    let split = pq_split(n as u64, k as u64);
    let q = split.q as usize;
    let groups: Vec<&[usize]> = nodes.chunks(q).collect();
    let inner = groups
        .iter()
        .map(|g| simple_base_on(g, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut composite = merge_parallel(&inner);

    let transversals = (0..q)
        .map(|t| {
            let members: Vec<usize> = groups.iter().map(|g| g[t]).collect();
            hyper_hypercube_on(&members, k)
        })
        .collect::<Result<Vec<_>, _>>()?;
    composite.extend(merge_parallel(&transversals));

    Ok(if simple.len() < composite.len() {
        simple
    } else {
        composite
    })
}
