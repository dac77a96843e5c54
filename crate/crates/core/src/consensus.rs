//! Gossip averaging over graph sequences, finite-time verification and
//! spectral consensus-rate estimation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::builders::{BuildError, Family};
use crate::graph::{
    apply_mix, consensus_error, GraphError, GraphSequence, MixingMatrix, NodeMatrix,
};

/// Default squared-error ratio that counts as exact consensus.
pub const FINITE_TIME_TOL: f64 = 1e-18;
/// Default residual tolerance for the power iteration.
pub const RATE_TOL: f64 = 1e-10;
pub const RATE_MAX_ITERS: usize = 200_000;
/// Probe dimension and seed used by [`verify_finite_time`].
pub const PROBE_DIM: usize = 8;
pub const PROBE_SEED: u64 = 0x5EED;
/// Largest `n` for which [`product_deviation`] forms dense products.
pub const EXACT_CHECK_MAX_N: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConsensusError {
    #[error("cannot run {iters} iterations over an empty sequence")]
    EmptySequence { iters: usize },
    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations (beta ~ {beta})")]
    NoConvergence {
        beta: f64,
        iterations: usize,
        residual: f64,
    },
    #[error("dense product check limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

impl ConsensusError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConsensusError::EmptySequence { .. } => "EmptySequence",
            ConsensusError::NoConvergence { .. } => "NoConvergence",
            ConsensusError::TooLarge { .. } => "TooLarge",
            ConsensusError::Graph(e) => e.kind(),
            ConsensusError::Build(e) => e.kind(),
        }
    }
}

/// `d x n` matrix of i.i.d. standard normal entries.
pub fn random_node_matrix(d: usize, n: usize, seed: u64) -> NodeMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (0..n)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    NodeMatrix::from_columns(columns)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GossipTrace {
    /// Consensus error before mixing (index 0) and after every step.
    pub errors: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
}

impl GossipTrace {
    /// `iter,error` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,error\n");
        for (i, e) in self.errors.iter().enumerate() {
            out.push_str(&format!("{i},{e:.16e}\n"));
        }
        out
    }
}

/// Gossip averaging from a seeded Gaussian start; step `r` mixes with graph
/// `r mod m`.
pub fn run_gossip(
    seq: &GraphSequence,
    d: usize,
    iters: usize,
    seed: u64,
) -> Result<GossipTrace, ConsensusError> {
    if seq.is_empty() && iters > 0 {
        return Err(ConsensusError::EmptySequence { iters });
    }
    let mixers = seq.mixing_matrices()?;
    let mut x = random_node_matrix(d, seq.n(), seed);
    let mut errors = Vec::with_capacity(iters + 1);
    errors.push(consensus_error(&x));
    for r in 0..iters {
        x = apply_mix(&mixers[r % mixers.len()], &x)?;
        errors.push(consensus_error(&x));
    }
    Ok(GossipTrace {
        errors,
        iterations: iters,
        seed,
    })
}

/// Smallest prefix length whose product averages a random probe to within
/// `tol` (squared error ratio); `None` if the whole sequence falls short.
///
/// A random probe only misses a non-averaging product on a measure-zero set
/// of starting points; [`product_deviation`] is the exact check.
pub fn verify_finite_time(seq: &GraphSequence, tol: f64) -> Option<usize> {
    verify_finite_time_with(seq, tol, PROBE_DIM, PROBE_SEED)
}

pub fn verify_finite_time_with(
    seq: &GraphSequence,
    tol: f64,
    d: usize,
    seed: u64,
) -> Option<usize> {
    let mixers = seq.mixing_matrices().ok()?;
    let mut x = random_node_matrix(d, seq.n(), seed);
    let initial = consensus_error(&x);
    if initial == 0.0 {
        return Some(0);
    }
    for (m, w) in mixers.iter().enumerate() {
        x = apply_mix(w, &x).ok()?;
        if consensus_error(&x) <= tol * initial {
            return Some(m + 1);
        }
    }
    None
}

/// Dense product `W^(1) ... W^(m)` (row-major).
pub fn sequence_product(seq: &GraphSequence) -> Result<Vec<Vec<f64>>, ConsensusError> {
    let n = seq.n();
    if n > EXACT_CHECK_MAX_N {
        return Err(ConsensusError::TooLarge {
            n,
            max: EXACT_CHECK_MAX_N,
        });
    }
    let mut prod: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for w in seq.mixing_matrices()? {
        // each row of the running product is a row vector times W
        prod = prod.iter().map(|row| w.left_mul(row)).collect();
    }
    Ok(prod)
}

/// Largest entrywise distance of the sequence product from `(1/n) 1 1^T`.
pub fn product_deviation(seq: &GraphSequence) -> Result<f64, ConsensusError> {
    let target = 1.0 / seq.n() as f64;
    Ok(sequence_product(seq)?
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max((v - target).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub beta: f64,
    pub iterations_used: usize,
    pub residual: f64,
}

fn project_out_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Consensus rate of one mixing matrix: the spectral norm of `W` on the
/// complement of the all-ones vector, by power iteration on
/// `P W W^T P` with `P` the mean-removing projector.
pub fn consensus_rate(
    w: &MixingMatrix,
    tol: f64,
    max_iters: usize,
) -> Result<RateEstimate, ConsensusError> {
    let n = w.n();
    if n <= 1 {
        return Ok(RateEstimate {
            beta: 0.0,
            iterations_used: 0,
            residual: 0.0,
        });
    }
    let apply = |v: &[f64]| {
        let mut z = v.to_vec();
        project_out_mean(&mut z);
        let mut out = w.right_mul(&w.left_mul(&z));
        project_out_mean(&mut out);
        out
    };
    let mut v: Vec<f64> = random_node_matrix(1, n, PROBE_SEED)
        .columns()
        .flatten()
        .copied()
        .collect();
    project_out_mean(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        let mv = apply(&v);
        lambda = v.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>();
        residual = norm(
            &mv.iter()
                .zip(&v)
                .map(|(a, b)| a - lambda * b)
                .collect::<Vec<_>>(),
        );
        let nm = norm(&mv);
        if residual <= tol || nm == 0.0 {
            return Ok(RateEstimate {
                beta: lambda.max(0.0).sqrt(),
                iterations_used: it,
                residual,
            });
        }
        v = mv.into_iter().map(|x| x / nm).collect();
    }
    Err(ConsensusError::NoConvergence {
        beta: lambda.max(0.0).sqrt(),
        iterations: max_iters,
        residual,
    })
}

/// One row of [`sequence_rate_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub length: usize,
    pub max_degree: usize,
    pub finite_time: bool,
    /// Only for single-graph families.
    pub beta: Option<f64>,
    pub error: Option<String>,
}

pub const RATE_TABLE_HEADER: &str = "family,n,k,length,max_degree,finite_time,beta";

impl RateRow {
    pub fn to_csv_line(&self) -> String {
        if self.error.is_some() {
            return format!("{},{},{},,,error,", self.family, self.n, self.k);
        }
        let beta = self.beta.map(|b| format!("{b:.16e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.family, self.n, self.k, self.length, self.max_degree, self.finite_time, beta
        )
    }
}

pub fn rate_table_csv(rows: &[RateRow]) -> String {
    let mut out = format!("{RATE_TABLE_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// FNV-1a over `"{family}|{n}|{k}"`; gives each table row its own probe stream.
pub fn row_seed(family: &str, n: usize, k: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{family}|{n}|{k}").bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn rate_row(family: Family, n: usize) -> RateRow {
    let tag = family.to_string();
    let k_hint = family.k().unwrap_or(0);
    let fail = |e: ConsensusError| RateRow {
        family: tag.clone(),
        n,
        k: k_hint,
        length: 0,
        max_degree: 0,
        finite_time: false,
        beta: None,
        error: Some(format!("{}: {e}", e.kind())),
    };
    let seq = match family.build(n) {
        Ok(s) => s,
        Err(e) => return fail(e.into()),
    };
    let seed = row_seed(&tag, n, seq.k());
    let finite_time = verify_finite_time_with(&seq, FINITE_TIME_TOL, PROBE_DIM, seed).is_some();
    let beta = if seq.len() == 1 {
        let w = match seq.graphs()[0].to_mixing_matrix() {
            Ok(w) => w,
            Err(e) => return fail(e.into()),
        };
        match consensus_rate(&w, RATE_TOL, RATE_MAX_ITERS) {
            Ok(r) => Some(r.beta),
            Err(e) => return fail(e),
        }
    } else {
        None
    };
    RateRow {
        family: tag,
        n,
        k: seq.k(),
        length: seq.len(),
        max_degree: seq.max_degree(),
        finite_time,
        beta,
        error: None,
    }
}

/// Evaluates every (family, n, k) cell. Families that take a degree are
/// expanded over `k_values`; the others ignore it. Rows come back in input
/// order whatever the thread count.
pub fn sequence_rate_table(
    families: &[Family],
    n_values: &[usize],
    k_values: &[usize],
) -> Vec<RateRow> {
    let mut cells = Vec::new();
    for fam in families {
        let variants: Vec<Family> = match fam {
            Family::HyperHypercube { .. } if !k_values.is_empty() => k_values
                .iter()
                .map(|&k| Family::HyperHypercube { k })
                .collect(),
            Family::SimpleBase { .. } if !k_values.is_empty() => {
                k_values.iter().map(|&k| Family::SimpleBase { k }).collect()
            }
            Family::Base { .. } if !k_values.is_empty() => {
                k_values.iter().map(|&k| Family::Base { k }).collect()
            }
            other => vec![*other],
        };
        for v in variants {
            for &n in n_values {
                cells.push((v, n));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(fam, n)| rate_row(fam, n))
        .collect()
}
