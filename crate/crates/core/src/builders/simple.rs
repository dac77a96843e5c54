use std::collections::HashSet;

use crate::factor::{base_digits, is_smooth};
use crate::graph::{Edge, GraphSequence, Weight};

use super::hyper::hyper_hypercube_on;
use super::{assemble, check_k, BuildError, Round};

/// Simple Base-(k+1) sequence on nodes `1..=n`.
pub fn simple_base(n: usize, k: usize) -> Result<GraphSequence, BuildError> {
    let nodes: Vec<usize> = (1..=n).collect();
    let rounds = simple_base_on(&nodes, k)?;
    assemble(n, k, rounds, format!("simple-base:k={k}"))
}

struct Block<'a> {
    nodes: &'a [usize],
    coeff: usize,
    exponent: u32,
    subs: Vec<&'a [usize]>,
    hyper: Vec<Round>,
    sub_hyper: Vec<Vec<Round>>,
}

/// Per-round bookkeeping of which nodes already have an edge.
struct RoundBuilder {
    edges: Round,
    busy: HashSet<usize>,
}

impl RoundBuilder {
    fn new() -> Self {
        RoundBuilder {
            edges: Vec::new(),
            busy: HashSet::new(),
        }
    }

    fn push(&mut self, e: Edge) {
        self.busy.insert(e.u);
        self.busy.insert(e.v);
        self.edges.push(e);
    }

    /// Adds round `index` (cyclically) of a schedule; empty schedules add nothing.
    fn replay(&mut self, schedule: &[Round], index: usize) {
        if schedule.is_empty() {
            return;
        }
        for &e in &schedule[index % schedule.len()] {
            self.push(e);
        }
    }

    fn is_isolated(&self, node: usize) -> bool {
        !self.busy.contains(&node)
    }
}

/// Simple Base-(k+1) rounds over an ordered node set.
pub fn simple_base_on(nodes: &[usize], k: usize) -> Result<Vec<Round>, BuildError> {
    let n = nodes.len();
    if n <= 1 {
        return Ok(Vec::new());
    }
    check_k(n, k)?;
    if is_smooth(n as u64, k as u64) {
        return hyper_hypercube_on(nodes, k);
    }

    let digits = base_digits(n as u64, k as u64);
    let mut blocks = Vec::with_capacity(digits.terms.len());
    let mut start = 0;
    for &(coeff, exponent) in &digits.terms {
        let sub_len = (k + 1).pow(exponent);
        let len = coeff as usize * sub_len;
        let block_nodes = &nodes[start..start + len];
        start += len;
        let subs: Vec<&[usize]> = block_nodes.chunks(sub_len).collect();
        let sub_hyper = subs
            .iter()
            .map(|s| hyper_hypercube_on(s, k))
            .collect::<Result<Vec<_>, _>>()?;
        blocks.push(Block {
            nodes: block_nodes,
            coeff: coeff as usize,
            exponent,
            subs,
            hyper: hyper_hypercube_on(block_nodes, k)?,
            sub_hyper,
        });
    }

    let levels = blocks.len();
    // suffix[j] = |V_j| + ... + |V_L|
    let mut suffix = vec![0usize; levels + 1];
    for j in (0..levels).rev() {
        suffix[j] = suffix[j + 1] + blocks[j].nodes.len();
    }
    let m1 = blocks[0].hyper.len();
    let target = blocks[0].sub_hyper[0].len();
    let mut replays = vec![0usize; levels];
    let mut rounds = Vec::new();
    let mut m = 0usize;

    while replays[0] < target {
        m += 1;
        let mut round = RoundBuilder::new();
        for l in (1..=levels).rev() {
            let block = &blocks[l - 1];
            if m <= m1 {
                round.replay(&block.hyper, m - 1);
            } else if m < m1 + l {
                // every node of V_l links to one isolated node in each V_{j,a}
                let j = m - m1;
                let dest = &blocks[j - 1];
                let weight =
                    Weight::new(dest.nodes.len() as u64, (dest.coeff * suffix[j - 1]) as u64);
                for &v in block.nodes {
                    for sub in &dest.subs {
                        let u = sub
                            .iter()
                            .rev()
                            .copied()
                            .find(|&u| round.is_isolated(u))
                            .ok_or(BuildError::NoIsolatedNode { round: m })?;
                        round.push(Edge::new(v, u, weight));
                    }
                }
            } else if m == m1 + l && l != levels {
                loop {
                    let isolated: Vec<usize> = block
                        .nodes
                        .iter()
                        .copied()
                        .filter(|&u| round.is_isolated(u))
                        .collect();
                    if isolated.len() < 2 {
                        break;
                    }
                    let clique = &isolated[..isolated.len().min(k + 1)];
                    let weight = Weight::new(1, clique.len() as u64);
                    for (i, &a) in clique.iter().enumerate() {
                        for &b in &clique[i + 1..] {
                            round.push(Edge::new(a, b, weight));
                        }
                    }
                }
            } else {
                replays[l - 1] += 1;
                let b = replays[l - 1];
                if block.exponent != 0 {
                    for schedule in &block.sub_hyper {
                        round.replay(schedule, b - 1);
                    }
                } else {
                    round.replay(&block.hyper, b - 1);
                }
            }
        }
        rounds.push(round.edges);
    }
    Ok(rounds)
}
