//! Batch runner for the Kolmogorov diffusion verification harness.

pub mod config;
pub mod output;
pub mod plot;
pub mod run;

use clap::{Args, Parser, Subcommand};
use config::Kind;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "kolmo", version, about = "Simulate Kolmogorov diffusions and verify functional inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact or path samples with moment summaries.
    Simulate(RunArgs),
    /// Heat kernel density on a grid.
    Kernel(RunArgs),
    /// Wang-type Harnack inequality checks.
    VerifyWang(RunArgs),
    /// Reverse log-Sobolev inequality checks.
    VerifyRlsi(RunArgs),
    /// Density-ratio norms against the displayed bounds.
    VerifyRn(RunArgs),
    /// Finite-rank approximation study.
    Convergence(RunArgs),
    /// Runs a list of experiment documents.
    Sweep(RunArgs),
    /// Turns report CSVs into gnuplot column files.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment document (TOML), or a manifest JSON to replay.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the document seed; KOLMO_SEED is read only when this is absent.
    #[arg(long, env = "KOLMO_SEED")]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Report CSV files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum)]
    kind: plot::PlotKind,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Parses arguments, runs, and returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = match cli.command {
        Command::Plotdata(p) => {
            return match plot::emit_plotdata(&p.files, p.kind, &p.out) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    1
                }
            };
        }
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Kernel(a) => (Kind::Kernel, a),
        Command::VerifyWang(a) => (Kind::VerifyWang, a),
        Command::VerifyRlsi(a) => (Kind::VerifyRlsi, a),
        Command::VerifyRn(a) => (Kind::VerifyRn, a),
        Command::Convergence(a) => (Kind::Convergence, a),
        Command::Sweep(a) => (Kind::Sweep, a),
    };
    match execute(kind, &args) {
        Ok(summary) => {
            let c = summary.counts;
            println!(
                "{} {}: {} rows, {} holds, {} violated, {} inconclusive, status {}",
                summary.kind.name(),
                summary.name,
                c.rows,
                c.holds,
                c.violated,
                c.inconclusive,
                summary.status
            );
            summary.status
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(kind: Kind, args: &RunArgs) -> anyhow::Result<run::RunSummary> {
    let loaded = config::load(&args.config)?;
    let opts = run::RunOptions { seed: args.seed, workers: args.workers.map(usize::from), out: args.out.clone() };
    match opts.workers {
        None => run::run(kind, &loaded, &opts),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| run::run(kind, &loaded, &opts))
        }
    }
}
