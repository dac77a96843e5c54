//! JSON-configured sweeps.
//!
//! ```json
//! {"kind": "rate_table", "families": ["ring", "exp", "base"], "n": [8, 16], "k": [1, 2]}
//! {"kind": "dsgd", "problem": {"n": 25, "d": 10, "zeta_scale": 1.0, "sigma": 0.1,
//!  "mu": 0.5, "l_smooth": 2.0, "seed": 0}, "families": ["ring", "base:k=1"],
//!  "eta": 0.05, "rounds": 300}
//! ```

use std::env;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use finitemix_core::consensus::{rate_table_csv, sequence_rate_table};
use finitemix_core::dsgd::{make_problem, sweep_csv, topology_sweep, DsgdConfig, ProblemSpec};
use finitemix_core::Family;
use serde::Deserialize;

use crate::commands::{family, load_problem};
use crate::error::CliError;
use crate::output::{emit, read_text};

pub const THREADS_ENV: &str = "FINITEMIX_THREADS";

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SweepConfig {
    RateTable {
        families: Vec<String>,
        n: Vec<usize>,
        #[serde(default)]
        k: Vec<usize>,
    },
    Dsgd {
        #[serde(default)]
        problem: Option<ProblemSpec>,
        /// Relative to the config file.
        #[serde(default)]
        problem_file: Option<PathBuf>,
        families: Vec<String>,
        eta: f64,
        rounds: usize,
        #[serde(default)]
        momentum: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn families(names: &[String], k: Option<usize>) -> Result<Vec<Family>, CliError> {
    names.iter().map(|s| family(s, k, None)).collect()
}

fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = env::var(THREADS_ENV) {
        let threads: usize = v.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            CliError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer"))
        })?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

pub fn run(config: &Path, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let text = read_text(config)?;
    let cfg: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
    let pool = pool()?;
    let csv = match cfg {
        SweepConfig::RateTable {
            families: names,
            n,
            k,
        } => {
            let fams = families(&names, k.first().copied())?;
            rate_table_csv(&pool.install(|| sequence_rate_table(&fams, &n, &k)))
        }
        SweepConfig::Dsgd {
            problem,
            problem_file,
            families: names,
            eta,
            rounds,
            momentum,
            seed,
        } => {
            let problem = match (problem, problem_file) {
                (Some(spec), None) => make_problem(&spec)?,
                (None, Some(file)) => {
                    let base = config.parent().unwrap_or(Path::new("."));
                    load_problem(&base.join(file))?
                }
                _ => {
                    return Err(CliError::Config(
                        "dsgd sweep needs exactly one of problem, problem_file".into(),
                    ))
                }
            };
            let fams = families(&names, None)?;
            let dsgd = DsgdConfig {
                eta,
                rounds,
                momentum,
                seed,
            };
            sweep_csv(&pool.install(|| topology_sweep(&problem, &fams, &dsgd)))
        }
    };
    emit(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}
