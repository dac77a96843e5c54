//! Decentralized SGD on synthetic quadratic problems.
//!
//! Node `i` holds `f_i(x) = 1/2 x^T A_i x - b_i^T x` and sees gradients with
//! additive isotropic Gaussian noise. One round is a local (optionally
//! heavy-ball) gradient step followed by mixing with the round's matrix,
//! cycling through the sequence with period `m`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{BuildError, Family};
use crate::graph::{
    apply_mix, consensus_error, GraphError, GraphSequence, MixingMatrix, NodeMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DsgdError {
    #[error("need 0 < mu <= l_smooth, got mu={mu}, l_smooth={l_smooth}")]
    BadSpectrum { mu: f64, l_smooth: f64 },
    #[error("invalid problem: {0}")]
    BadProblem(String),
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error("problem has {problem} nodes, topology has {topology}")]
    DimensionMismatch { problem: usize, topology: usize },
    #[error("cannot run over an empty sequence")]
    EmptySequence,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

impl DsgdError {
    pub fn kind(&self) -> &'static str {
        match self {
            DsgdError::BadSpectrum { .. } => "BadSpectrum",
            DsgdError::BadProblem(_) => "BadProblem",
            DsgdError::BadConfig(_) => "BadConfig",
            DsgdError::DimensionMismatch { .. } => "DimensionMismatch",
            DsgdError::EmptySequence => "EmptySequence",
            DsgdError::Graph(e) => e.kind(),
            DsgdError::Build(e) => e.kind(),
        }
    }
}

/// Generator parameters for [`make_problem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub d: usize,
    pub zeta_scale: f64,
    pub sigma: f64,
    pub mu: f64,
    pub l_smooth: f64,
    pub seed: u64,
    /// All nodes share one curvature matrix (only the offsets differ).
    #[serde(default)]
    pub shared_curvature: bool,
}

impl ProblemSpec {
    pub fn new(n: usize, d: usize) -> Self {
        ProblemSpec {
            n,
            d,
            zeta_scale: 0.0,
            sigma: 0.0,
            mu: 1.0,
            l_smooth: 1.0,
            seed: 0,
            shared_curvature: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProblem {
    pub spec: ProblemSpec,
    /// Row-major `d x d` matrices `A_i`.
    pub curvatures: Vec<Vec<f64>>,
    pub offsets: Vec<Vec<f64>>,
    /// Global minimizer `x*` of `f = (1/n) sum f_i`.
    pub optimum: Vec<f64>,
    pub optimal_value: f64,
    /// `max_i ||grad f_i(x*)||`.
    pub heterogeneity: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

fn mat_vec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|r| dot(&m[r * d..(r + 1) * d], x)).collect()
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        // two Gram-Schmidt passes for orthogonality at machine precision
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm_sq(&v).sqrt();
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    basis
}

fn random_spd(d: usize, mu: f64, l_smooth: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let q = random_orthogonal(d, rng);
    let mut eig: Vec<f64> = if mu < l_smooth {
        let band = Uniform::new_inclusive(mu, l_smooth).expect("valid band");
        (0..d).map(|_| band.sample(rng)).collect()
    } else {
        vec![mu; d]
    };
    // pin the band edges so the smoothness constant is attained
    eig[0] = mu;
    if d > 1 {
        eig[d - 1] = l_smooth;
    }
    let mut a = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..d {
            a[r * d + c] = (0..d).map(|t| q[t][r] * eig[t] * q[t][c]).sum();
        }
    }
    for r in 0..d {
        for c in r + 1..d {
            let s = 0.5 * (a[r * d + c] + a[c * d + r]);
            a[r * d + c] = s;
            a[c * d + r] = s;
        }
    }
    a
}

/// Random heterogeneous quadratic with a known global optimum.
///
/// `b_i = A_i x* - zeta_scale c_i` with zero-sum `c_i`, so
/// `grad f_i(x*) = zeta_scale c_i` sums to zero and `x*` minimizes `f`.
pub fn make_problem(spec: &ProblemSpec) -> Result<QuadraticProblem, DsgdError> {
    let ProblemSpec {
        n,
        d,
        zeta_scale,
        sigma,
        mu,
        l_smooth,
        seed,
        shared_curvature,
    } = *spec;
    if !(mu > 0.0 && mu <= l_smooth && l_smooth.is_finite()) {
        return Err(DsgdError::BadSpectrum { mu, l_smooth });
    }
    if n == 0 || d == 0 {
        return Err(DsgdError::BadProblem(format!(
            "n={n}, d={d} must be positive"
        )));
    }
    if !(zeta_scale >= 0.0 && sigma >= 0.0) {
        return Err(DsgdError::BadProblem(format!(
            "zeta_scale={zeta_scale}, sigma={sigma} must be nonnegative"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curvatures: Vec<Vec<f64>> = if shared_curvature {
        vec![random_spd(d, mu, l_smooth, &mut rng); n]
    } else {
        (0..n)
            .map(|_| random_spd(d, mu, l_smooth, &mut rng))
            .collect()
    };
    let optimum: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut shifts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    for t in 0..d {
        let mean = shifts.iter().map(|s| s[t]).sum::<f64>() / n as f64;
        shifts.iter_mut().for_each(|s| s[t] -= mean);
    }
    let offsets: Vec<Vec<f64>> = curvatures
        .iter()
        .zip(&shifts)
        .map(|(a, c)| {
            mat_vec(a, &optimum)
                .iter()
                .zip(c)
                .map(|(ax, ci)| ax - zeta_scale * ci)
                .collect()
        })
        .collect();
    let mut problem = QuadraticProblem {
        spec: *spec,
        curvatures,
        offsets,
        optimum,
        optimal_value: 0.0,
        heterogeneity: 0.0,
    };
    problem.optimal_value = problem.objective(&problem.optimum);
    problem.heterogeneity = (0..n)
        .map(|i| norm_sq(&problem.local_grad(i, &problem.optimum)).sqrt())
        .fold(0.0, f64::max);
    Ok(problem)
}

impl QuadraticProblem {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn sigma(&self) -> f64 {
        self.spec.sigma
    }

    pub fn local_objective(&self, i: usize, x: &[f64]) -> f64 {
        0.5 * dot(x, &mat_vec(&self.curvatures[i], x)) - dot(&self.offsets[i], x)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| self.local_objective(i, x))
            .sum::<f64>()
            / self.n() as f64
    }

    /// Exact `grad f_i(x) = A_i x - b_i`.
    pub fn local_grad(&self, i: usize, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.curvatures[i], x)
            .iter()
            .zip(&self.offsets[i])
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.d()];
        for i in 0..self.n() {
            g.iter_mut()
                .zip(self.local_grad(i, x))
                .for_each(|(a, b)| *a += b);
        }
        g.iter_mut().for_each(|a| *a /= self.n() as f64);
        g
    }

    /// `grad F_i(x; xi)`: exact gradient plus `N(0, sigma^2)` per coordinate.
    pub fn stochastic_grad(&self, i: usize, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let sigma = self.sigma();
        let mut g = self.local_grad(i, x);
        if sigma > 0.0 {
            for v in g.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *v += sigma * z;
            }
        }
        g
    }

    /// `max_i ||grad f_i(x) - grad f(x)||`.
    pub fn heterogeneity_at(&self, x: &[f64]) -> f64 {
        let g = self.grad(x);
        (0..self.n())
            .map(|i| {
                let gi = self.local_grad(i, x);
                gi.iter()
                    .zip(&g)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsgdConfig {
    pub eta: f64,
    pub rounds: usize,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default)]
    pub seed: u64,
}

impl DsgdConfig {
    fn check(&self) -> Result<(), DsgdError> {
        // eta = 0 is allowed: it reduces the update to plain gossip
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(DsgdError::BadConfig(format!(
                "eta={} must be >= 0",
                self.eta
            )));
        }
        if self.rounds == 0 {
            return Err(DsgdError::BadConfig("rounds must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(DsgdError::BadConfig(format!(
                "momentum={} outside [0,1)",
                self.momentum
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub grad_norm_sq: Vec<f64>,
    pub consensus_error: Vec<f64>,
    pub suboptimality: Vec<f64>,
    /// `max_i ||grad f_i(x_bar) - grad f(x_bar)||` along the trajectory.
    pub heterogeneity: Vec<f64>,
}

pub const TRACE_HEADER: &str = "round,grad_norm_sq,consensus_error,suboptimality";

impl TrainingTrace {
    pub fn rounds(&self) -> usize {
        self.grad_norm_sq.len().saturating_sub(1)
    }

    /// Mean consensus error over rounds `1..=R`.
    pub fn mean_consensus_error(&self) -> f64 {
        let tail = &self.consensus_error[1.min(self.consensus_error.len())..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().sum::<f64>() / tail.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{TRACE_HEADER}\n");
        for r in 0..self.grad_norm_sq.len() {
            out.push_str(&format!(
                "{r},{:.16e},{:.16e},{:.16e}\n",
                self.grad_norm_sq[r], self.consensus_error[r], self.suboptimality[r]
            ));
        }
        out
    }

    fn record(&mut self, problem: &QuadraticProblem, x: &NodeMatrix) {
        let mean = x.mean();
        self.grad_norm_sq.push(norm_sq(&problem.grad(&mean)));
        self.consensus_error.push(consensus_error(x));
        self.suboptimality
            .push(problem.objective(&mean) - problem.optimal_value);
        self.heterogeneity.push(problem.heterogeneity_at(&mean));
    }
}

/// What one round did, for checking the update rule from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Stochastic gradients used by every node this round.
    pub gradients: NodeMatrix,
    /// Parameters after the local step, before mixing.
    pub pre_mix: NodeMatrix,
}

/// Stateful DSGD run; [`dsgd_run`] drives it for `cfg.rounds` rounds.
pub struct Simulation<'a> {
    problem: &'a QuadraticProblem,
    mixers: Vec<MixingMatrix>,
    cfg: DsgdConfig,
    params: NodeMatrix,
    velocity: NodeMatrix,
    rng: ChaCha8Rng,
    round: usize,
}

impl<'a> Simulation<'a> {
    /// Every node starts at the zero vector.
    pub fn new(
        problem: &'a QuadraticProblem,
        seq: &GraphSequence,
        cfg: DsgdConfig,
    ) -> Result<Self, DsgdError> {
        let start = NodeMatrix::zeros(problem.d(), problem.n());
        Self::with_initial(problem, seq, cfg, start)
    }

    pub fn with_initial(
        problem: &'a QuadraticProblem,
        seq: &GraphSequence,
        cfg: DsgdConfig,
        start: NodeMatrix,
    ) -> Result<Self, DsgdError> {
        cfg.check()?;
        if seq.n() != problem.n() {
            return Err(DsgdError::DimensionMismatch {
                problem: problem.n(),
                topology: seq.n(),
            });
        }
        if start.n() != problem.n() || start.d() != problem.d() {
            return Err(DsgdError::BadProblem(format!(
                "initial parameters are {}x{}, expected {}x{}",
                start.d(),
                start.n(),
                problem.d(),
                problem.n()
            )));
        }
        if seq.is_empty() {
            return Err(DsgdError::EmptySequence);
        }
        Ok(Simulation {
            problem,
            mixers: seq.mixing_matrices()?,
            cfg,
            velocity: NodeMatrix::zeros(problem.d(), problem.n()),
            params: start,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            round: 0,
        })
    }

    pub fn params(&self) -> &NodeMatrix {
        &self.params
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn step(&mut self) -> Result<StepRecord, DsgdError> {
        let (d, n) = (self.problem.d(), self.problem.n());
        let mut gradients = NodeMatrix::zeros(d, n);
        let mut pre_mix = self.params.clone();
        for j in 0..n {
            let g = self
                .problem
                .stochastic_grad(j, self.params.column(j), &mut self.rng);
            gradients.column_mut(j).copy_from_slice(&g);
            let vel = self.velocity.column_mut(j);
            for (v, gi) in vel.iter_mut().zip(&g) {
                *v = self.cfg.momentum * *v + gi;
            }
            for (x, v) in pre_mix.column_mut(j).iter_mut().zip(vel.iter()) {
                *x -= self.cfg.eta * v;
            }
        }
        let w = &self.mixers[self.round % self.mixers.len()];
        self.params = apply_mix(w, &pre_mix)?;
        self.round += 1;
        Ok(StepRecord { gradients, pre_mix })
    }
}

pub fn dsgd_run(
    problem: &QuadraticProblem,
    seq: &GraphSequence,
    cfg: &DsgdConfig,
) -> Result<TrainingTrace, DsgdError> {
    let mut sim = Simulation::new(problem, seq, *cfg)?;
    let mut trace = TrainingTrace::default();
    trace.record(problem, sim.params());
    for _ in 0..cfg.rounds {
        sim.step()?;
        trace.record(problem, sim.params());
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: String,
    /// Sequence length, i.e. rounds for one pass through the topology.
    pub length: usize,
    pub final_grad_norm_sq: f64,
    pub mean_consensus_error: f64,
    /// Parameter messages sent over all rounds.
    pub comm_cost: usize,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str = "family,length,final_grad_norm_sq,mean_consensus_error,comm_cost";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        if self.error.is_some() {
            return format!("{},,,,", self.family);
        }
        format!(
            "{},{},{:.16e},{:.16e},{}",
            self.family,
            self.length,
            self.final_grad_norm_sq,
            self.mean_consensus_error,
            self.comm_cost
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

fn sweep_row(problem: &QuadraticProblem, family: Family, cfg: &DsgdConfig) -> SweepRow {
    let run = || -> Result<SweepRow, DsgdError> {
        let seq = family.build(problem.n())?;
        let trace = dsgd_run(problem, &seq, cfg)?;
        let comm_cost = (0..cfg.rounds)
            .map(|r| seq.graphs()[r % seq.len()].message_count())
            .sum();
        Ok(SweepRow {
            family: family.to_string(),
            length: seq.len(),
            final_grad_norm_sq: *trace.grad_norm_sq.last().expect("non-empty trace"),
            mean_consensus_error: trace.mean_consensus_error(),
            comm_cost,
            error: None,
        })
    };
    run().unwrap_or_else(|e| SweepRow {
        family: family.to_string(),
        length: 0,
        final_grad_norm_sq: f64::NAN,
        mean_consensus_error: f64::NAN,
        comm_cost: 0,
        error: Some(format!("{}: {e}", e.kind())),
    })
}

/// Runs every family with the same problem and noise seed.
pub fn topology_sweep(
    problem: &QuadraticProblem,
    families: &[Family],
    cfg: &DsgdConfig,
) -> Vec<SweepRow> {
    families
        .par_iter()
        .map(|&f| sweep_row(problem, f, cfg))
        .collect()
}
