use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod output;
mod sweep;

use error::CliError;

/// Finite-time consensus topologies: build, verify and simulate.
#[derive(Parser)]
#[command(name = "finitemix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Topology selection shared by several subcommands.
#[derive(Args, Clone)]
pub struct TopologyArgs {
    /// ring, torus, exp, 1peer-exp, 1peer-hypercube, hhc, simple-base, base,
    /// or a full builder tag such as base:k=2
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, requires = "cols")]
    pub rows: Option<usize>,
    #[arg(long, requires = "rows")]
    pub cols: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a topology and write it as a JSON sequence file.
    Build {
        #[command(flatten)]
        topo: TopologyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a sequence file and check finite-time convergence.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = finitemix_core::consensus::FINITE_TIME_TOL)]
        tol: f64,
    },
    /// Consensus rate of a topology.
    Rate {
        #[command(flatten)]
        topo: TopologyArgs,
        #[arg(long, default_value_t = finitemix_core::consensus::RATE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = finitemix_core::consensus::RATE_MAX_ITERS)]
        max_iters: usize,
    },
    /// Gossip averaging from a random start; writes `iter,error` CSV.
    Gossip(commands::GossipArgs),
    /// Decentralized SGD on a synthetic quadratic; writes a per-round CSV.
    Dsgd(commands::DsgdArgs),
    /// Run a rate-table or DSGD sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one DOT file per graph of a sequence file.
    ExportDot {
        input: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Build { topo, out } => commands::build(&topo, out.as_deref()),
        Command::Verify { input, tol } => commands::verify(&input, tol),
        Command::Rate {
            topo,
            tol,
            max_iters,
        } => commands::rate(&topo, tol, max_iters),
        Command::Gossip(args) => commands::gossip(&args),
        Command::Dsgd(args) => commands::dsgd(&args),
        Command::Sweep { config, out } => sweep::run(&config, out.as_deref()),
        Command::ExportDot { input, outdir } => commands::export_dot(&input, &outdir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let body = text.split("\n\nUsage").next().unwrap_or(&text);
            let msg = body.split_whitespace().collect::<Vec<_>>().join(" ");
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg);
            eprintln!("error: Usage: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
