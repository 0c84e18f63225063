//! Command-line front end.
//!
//! ```text
//! substream run        --graph PATH|SPEC --objective NAME --algo NAME --k 10,50 [...]
//! substream sweep      --k 10,100 --eps 0.1,0.2 --algo quickstream,ltl,sieve [...]
//! substream verify     [--max-n 16]
//! substream lowerbound [--n 100 --c 2 --budget 5,10,20 --trials 2000]
//! ```
//!
//! `run` and `sweep` also accept `--config FILE`, a file of `key = value`
//! lines whose keys are the long flag names (`graph`, `objective`, `algo`,
//! `k`, `c`, `eps`, `b`, `trials`, `order`, `seed`, `reps`, `out`, `lazy`).
//! Blank lines and lines starting with `#` are ignored. Flags given on the
//! command line take precedence over the file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::experiment::{sweep_configs, AlgoId, Dataset, ExperimentConfig, ResultRecord, Session};
use crate::harness::lowerbound::{binomial_sigma, hit_bound, lower_bound_sweep, ProbeMode};
use crate::harness::report::{write_csv, write_records};
use crate::harness::verify::verify_all;
use crate::harness::{Execution, OrderMode};
use crate::nonmonotone::DEFAULT_B;
use crate::oracle::ObjectiveKind;

#[derive(Parser, Debug)]
#[command(name = "substream", version, about = "Streaming submodular maximization experiments")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm (for each listed k) plus the greedy baseline.
    Run(RunArgs),
    /// Cartesian sweep over k, eps and algorithm lists.
    Sweep(SweepArgs),
    /// Brute-force ratio campaigns with trace audits.
    Verify(VerifyArgs),
    /// Planted-element query lower-bound experiment.
    Lowerbound(LowerArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Edge-list path or synthetic spec (ba:N:M:SEED, er:N:P:SEED, weights:N:SEED).
    #[arg(long, default_value = "ba:4039:22:0")]
    graph: String,
    #[arg(long, default_value = "coverage")]
    objective: ObjectiveKind,
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, required = true)]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    c: usize,
    #[arg(long, default_value_t = DEFAULT_B)]
    b: f64,
    /// Samples for the random baseline (default n).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value = "file")]
    order: OrderMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    lazy: bool,
    /// Key-value config file (read before the other flags).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "quickstream")]
    algo: AlgoId,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, required = true)]
    algo: Vec<AlgoId>,
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, default_value = "0.1")]
    eps: Vec<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Largest brute-forced ground set.
    #[arg(long, default_value_t = 16)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct LowerArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    /// Query budgets; all share the same trials.
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, default_value = "5,10,20")]
    budget: Vec<i64>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random")]
    probe: ProbeMode,
    #[arg(long)]
    sequential: bool,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

/// Turns `key = value` lines into `--key value` arguments.
pub fn config_args(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key == "config" {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("invalid key `{key}`"),
            });
        }
        out.push(format!("--{key}"));
        out.push(value.trim().to_string());
    }
    Ok(out)
}

/// Splices the contents of `--config FILE` in right after the subcommand,
/// so explicit flags (which come later) override it.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let extra = config_args(&text)?;
    let mut out = args;
    let at = 2.min(out.len());
    out.splice(at..at, extra.into_iter().map(OsString::from));
    Ok(out)
}

fn base_config(c: &Common, algo: AlgoId, k: usize, eps: f64) -> Result<ExperimentConfig> {
    let dataset: Dataset = c.graph.parse()?;
    Ok(ExperimentConfig {
        c: c.c,
        eps,
        b: c.b,
        trials: c.trials,
        order: c.order,
        lazy: c.lazy,
        reps: c.reps,
        seed: c.seed,
        ..ExperimentConfig::new(dataset, c.objective, algo, k)
    })
}

fn emit(records: &[ResultRecord], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_csv(records, path),
        None => write_records(records, std::io::stdout().lock()),
    }
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Run(a) => {
            let base = base_config(&a.common, a.algo, a.common.k[0], a.eps)?;
            let configs = sweep_configs(&base, &a.common.k, &[a.eps], &[a.algo]);
            let rows = Session::new(execution(a.common.sequential)).run_sweep(&configs)?;
            emit(&rows, a.common.out.as_deref())?;
            Ok(0)
        }
        Command::Sweep(a) => {
            let base = base_config(&a.common, a.algo[0], a.common.k[0], a.eps[0])?;
            let configs = sweep_configs(&base, &a.common.k, &a.eps, &a.algo);
            let rows = Session::new(execution(a.common.sequential)).run_sweep(&configs)?;
            emit(&rows, a.common.out.as_deref())?;
            Ok(0)
        }
        Command::Verify(a) => {
            let reports = verify_all(a.max_n, a.seed, execution(a.sequential))?;
            let mut all = true;
            let mut stdout = std::io::stdout().lock();
            for r in &reports {
                all &= r.passed();
                let _ = writeln!(stdout, "{}", r.summary());
                for line in r.failures.iter().chain(&r.violations).take(5) {
                    let _ = writeln!(stdout, "  {line}");
                }
            }
            Ok(if all { 0 } else { 1 })
        }
        Command::Lowerbound(a) => {
            if let Some(b) = a.budget.iter().find(|&&b| b < 0) {
                return Err(Error::validation(format!("budget must be non-negative (got {b})")));
            }
            let budgets: Vec<u64> = a.budget.iter().map(|&b| b as u64).collect();
            let freqs = lower_bound_sweep(a.n, a.c, &budgets, a.trials, a.seed, a.probe, execution(a.sequential))?;
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "budget,frequency,bound,bound_3sigma");
            for (&b, f) in budgets.iter().zip(freqs) {
                let p = hit_bound(a.n, a.c, b);
                let _ = writeln!(stdout, "{b},{f},{p},{}", p + 3.0 * binomial_sigma(p, a.trials));
            }
            Ok(0)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Validation and usage errors give 1, IO errors give 2.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString>>) -> i32 {
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = expand_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => run_command(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            Ok(code)
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
