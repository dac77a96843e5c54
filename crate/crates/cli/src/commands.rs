use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use finitemix_core::consensus::{
    consensus_rate, product_deviation, run_gossip, verify_finite_time, EXACT_CHECK_MAX_N,
};
use finitemix_core::dsgd::{dsgd_run, make_problem, DsgdConfig, ProblemSpec, QuadraticProblem};
use finitemix_core::io::{to_dot, to_json};
use finitemix_core::{validate_sequence, Family, GraphSequence};

use crate::error::CliError;
use crate::output::{emit, load_sequence, read_text};
use crate::TopologyArgs;

/// Largest product deviation still counted as exact averaging.
const PRODUCT_TOL: f64 = 1e-12;

pub fn family(
    name: &str,
    k: Option<usize>,
    grid: Option<(usize, usize)>,
) -> Result<Family, CliError> {
    if name.contains(':') {
        return Ok(name.parse()?);
    }
    Ok(Family::from_parts(name, k, grid)?)
}

fn build_topology(t: &TopologyArgs) -> Result<GraphSequence, CliError> {
    let grid = t.rows.zip(t.cols);
    Ok(family(&t.family, t.k, grid)?.build(t.n)?)
}

pub fn build(topo: &TopologyArgs, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let seq = build_topology(topo)?;
    emit(out, &to_json(&seq))?;
    let mut summary = format!(
        "builder={} n={} length={} max_degree={}",
        seq.builder_tag(),
        seq.n(),
        seq.len(),
        seq.max_degree()
    );
    if seq.builder_tag().starts_with("base:") || seq.builder_tag().starts_with("simple-base:") {
        let bound = 2.0 * (seq.n() as f64).ln() / ((seq.k() + 1) as f64).ln() + 2.0;
        summary.push_str(&format!(" length_bound={bound:.4}"));
    }
    eprintln!("{summary}");
    Ok(ExitCode::SUCCESS)
}

pub fn verify(input: &Path, tol: f64) -> Result<ExitCode, CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    let seq = load_sequence(input)?;
    let report = validate_sequence(&seq);
    println!(
        "builder={} n={} k={} length={}",
        seq.builder_tag(),
        seq.n(),
        seq.k(),
        seq.len()
    );
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!("valid={}", report.is_empty());
    let mut finite = false;
    if report.is_empty() {
        let probe = verify_finite_time(&seq, tol);
        finite = probe.is_some();
        match probe {
            Some(m) => println!("finite_time=true m={m}"),
            None => println!("finite_time=false"),
        }
        if seq.n() <= EXACT_CHECK_MAX_N {
            let dev = product_deviation(&seq)?;
            println!("product_deviation={dev:.16e}");
            finite &= dev <= PRODUCT_TOL;
        }
    }
    Ok(if report.is_empty() && finite {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn rate(topo: &TopologyArgs, tol: f64, max_iters: usize) -> Result<ExitCode, CliError> {
    let seq = build_topology(topo)?;
    let mixers = seq
        .mixing_matrices()
        .map_err(finitemix_core::consensus::ConsensusError::from)?;
    if let [w] = mixers.as_slice() {
        let est = consensus_rate(w, tol, max_iters)?;
        println!("beta={:.17}", est.beta);
        eprintln!(
            "iterations={} residual={:e}",
            est.iterations_used, est.residual
        );
    } else {
        for (i, w) in mixers.iter().enumerate() {
            let est = consensus_rate(w, tol, max_iters)?;
            println!("round={} beta={:.17}", i + 1, est.beta);
        }
        match verify_finite_time(&seq, finitemix_core::consensus::FINITE_TIME_TOL) {
            Some(m) => println!("finite_time=true m={m}"),
            None => println!("finite_time=false"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct GossipArgs {
    /// Sequence file to use instead of building one
    #[arg(long, conflicts_with_all = ["family", "n", "k", "rows", "cols"])]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    family: Option<String>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, requires = "cols")]
    rows: Option<usize>,
    #[arg(long, requires = "rows")]
    cols: Option<usize>,
    /// Mixing steps; defaults to the sequence length
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter dimension per node
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn gossip(args: &GossipArgs) -> Result<ExitCode, CliError> {
    let seq = match (&args.input, &args.family, args.n) {
        (Some(path), _, _) => load_sequence(path)?,
        (None, Some(name), Some(n)) => build_topology(&TopologyArgs {
            family: name.clone(),
            n,
            k: args.k,
            rows: args.rows,
            cols: args.cols,
        })?,
        _ => return Err(CliError::Usage("need --input or --family and --n".into())),
    };
    if args.d == 0 {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    let iters = args.iters.unwrap_or(seq.len());
    let trace = run_gossip(&seq, args.d, iters, args.seed)?;
    emit(args.out.as_deref(), &trace.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct DsgdArgs {
    /// Problem file written by --save-problem
    #[arg(long, conflicts_with_all = ["n", "d", "zeta", "sigma", "mu", "l_smooth", "problem_seed", "shared_curvature"])]
    problem: Option<PathBuf>,
    #[arg(long, required_unless_present = "problem")]
    n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// Heterogeneity scale of the per-node optima
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    /// Gradient noise standard deviation per coordinate
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 2.0)]
    l_smooth: f64,
    #[arg(long, default_value_t = 0)]
    problem_seed: u64,
    /// Give every node the same curvature matrix
    #[arg(long)]
    shared_curvature: bool,
    #[arg(long)]
    save_problem: Option<PathBuf>,
    #[arg(long)]
    family: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, requires = "cols")]
    rows: Option<usize>,
    #[arg(long, requires = "rows")]
    cols: Option<usize>,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    rounds: usize,
    #[arg(long, default_value_t = 0.0)]
    momentum: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn load_problem(path: &Path) -> Result<QuadraticProblem, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn problem_json(problem: &QuadraticProblem) -> String {
    let mut s = serde_json::to_string(problem).expect("problem serializes");
    s.push('\n');
    s
}

pub fn dsgd(args: &DsgdArgs) -> Result<ExitCode, CliError> {
    let problem = match (&args.problem, args.n) {
        (Some(path), _) => load_problem(path)?,
        (None, Some(n)) => make_problem(&ProblemSpec {
            n,
            d: args.d,
            zeta_scale: args.zeta,
            sigma: args.sigma,
            mu: args.mu,
            l_smooth: args.l_smooth,
            seed: args.problem_seed,
            shared_curvature: args.shared_curvature,
        })?,
        (None, None) => return Err(CliError::Usage("need --problem or --n".into())),
    };
    let seq = build_topology(&TopologyArgs {
        family: args.family.clone(),
        n: problem.n(),
        k: args.k,
        rows: args.rows,
        cols: args.cols,
    })?;
    let cfg = DsgdConfig {
        eta: args.eta,
        rounds: args.rounds,
        momentum: args.momentum,
        seed: args.seed,
    };
    let trace = dsgd_run(&problem, &seq, &cfg)?;
    if let Some(path) = &args.save_problem {
        emit(Some(path), &problem_json(&problem))?;
    }
    emit(args.out.as_deref(), &trace.to_csv())?;
    eprintln!(
        "heterogeneity_at_optimum={:e} final_grad_norm_sq={:e}",
        problem.heterogeneity,
        trace.grad_norm_sq.last().copied().unwrap_or(f64::NAN)
    );
    Ok(ExitCode::SUCCESS)
}

pub fn export_dot(input: &Path, outdir: &Path) -> Result<ExitCode, CliError> {
    let seq = load_sequence(input)?;
    fs::create_dir_all(outdir).map_err(|e| CliError::io(outdir, e))?;
    for (i, doc) in to_dot(&seq).iter().enumerate() {
        emit(Some(&outdir.join(format!("round_{}.dot", i + 1))), doc)?;
    }
    eprintln!("wrote {} files to {}", seq.len(), outdir.display());
    Ok(ExitCode::SUCCESS)
}
