//! Integer decompositions that drive the topology builders.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("{n} has a prime factor larger than k+1={}", k + 1)]
    RoughFactor { n: u64, k: u64 },
    #[error("n and k must be positive (n={n}, k={k})")]
    NonPositive { n: u64, k: u64 },
}

/// `n = n_1 * ... * n_L` with every factor in `2..=k+1` and `L` minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorDecomposition {
    pub n: u64,
    pub k: u64,
    /// Sorted descending; among minimal-length factorizations this is the
    /// lexicographically largest.
    pub factors: Vec<u64>,
}

/// Base-`(k+1)` expansion `n = sum a_l (k+1)^{p_l}` with zero digits dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseDigits {
    pub n: u64,
    pub k: u64,
    /// `(a_l, p_l)` with strictly decreasing exponents.
    pub terms: Vec<(u64, u32)>,
}

impl BaseDigits {
    /// Size of each block `a_l (k+1)^{p_l}`.
    pub fn block_sizes(&self) -> Vec<u64> {
        self.terms
            .iter()
            .map(|&(a, p)| a * (self.k + 1).pow(p))
            .collect()
    }
}

/// `n = p * q` where `p` is the `(k+1)`-smooth part of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PqSplit {
    pub n: u64,
    pub k: u64,
    pub p: u64,
    pub q: u64,
}

pub fn pq_split(n: u64, k: u64) -> PqSplit {
    let mut q = n;
    let mut p = 1;
    for m in 2..=k.saturating_add(1) {
        if q == 1 {
            break;
        }
        while q.is_multiple_of(m) {
            q /= m;
            p *= m;
        }
    }
    PqSplit { n, k, p, q }
}

/// True when every prime factor of `n` is at most `k+1`.
pub fn is_smooth(n: u64, k: u64) -> bool {
    pq_split(n, k).q == 1
}

pub fn min_factorization(n: u64, k: u64) -> Result<FactorDecomposition, FactorError> {
    if n == 0 || k == 0 {
        return Err(FactorError::NonPositive { n, k });
    }
    if !is_smooth(n, k) {
        return Err(FactorError::RoughFactor { n, k });
    }
    let mut memo = HashMap::new();
    let factors = best_factors(n, k + 1, &mut memo);
    Ok(FactorDecomposition { n, k, factors })
}

// Ordering: fewer factors first, then lexicographically larger.
fn better(a: &[u64], b: &[u64]) -> bool {
    a.len() < b.len() || (a.len() == b.len() && a > b)
}

fn best_factors(n: u64, max_factor: u64, memo: &mut HashMap<u64, Vec<u64>>) -> Vec<u64> {
    if n == 1 {
        return Vec::new();
    }
    if let Some(hit) = memo.get(&n) {
        return hit.clone();
    }
    let mut best: Option<Vec<u64>> = None;
    for f in (2..=max_factor.min(n)).rev() {
        if !n.is_multiple_of(f) || !is_smooth(n / f, max_factor - 1) {
            continue;
        }
        let mut cand = best_factors(n / f, max_factor, memo);
        cand.push(f);
        cand.sort_unstable_by(|a, b| b.cmp(a));
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let best = best.expect("smooth n always factors");
    memo.insert(n, best.clone());
    best
}

pub fn base_digits(n: u64, k: u64) -> BaseDigits {
    let base = k + 1;
    let mut terms = Vec::new();
    let mut rest = n;
    let mut p = 0u32;
    while rest > 0 {
        let a = rest % base;
        if a != 0 {
            terms.push((a, p));
        }
        rest /= base;
        p += 1;
    }
    terms.reverse();
    BaseDigits { n, k, terms }
}
