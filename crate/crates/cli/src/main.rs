//! `noma-outage`: validation runs, parameter sweeps and NOMA-gain tables.
//!
//! Exit status: 0 on success, 2 for configuration or usage errors, 3 when a
//! validation row breaches its tolerance, 4 when a series or quadrature
//! fails to converge.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noma_core::sweep::{self, Config, Engine};
use noma_core::Error;

#[derive(Parser)]
#[command(name = "noma-outage", version, about = "Outage analysis of two-user NOMA/OMA links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the uplink near-user series with Monte Carlo on an alpha grid.
    Validate(RunArgs),
    /// Evaluate the sweep block of a configuration.
    Sweep(RunArgs),
    /// NOMA and OMA outage of every link at the base parameters.
    Gain(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Monte-Carlo samples per estimate.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    MonteCarlo,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::MonteCarlo => Engine::MonteCarlo,
            EngineArg::Both => Engine::Both,
        }
    }
}

enum Failure {
    Core(Error),
    Tolerance(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Truncation { .. } | Error::Quadrature { .. } => 4,
        _ => 2,
    }
}

fn load(args: &RunArgs) -> Result<Config, Error> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(e) = args.engine {
        cfg.engine = e.into();
    }
    if let Some(n) = args.samples {
        cfg.monte_carlo.n_samples = n;
    }
    if let Some(s) = args.seed {
        cfg.monte_carlo.base_seed = s;
    }
    if let Some(w) = args.workers {
        cfg.monte_carlo.n_workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(args) => {
            let cfg = load(&args)?;
            let rows = sweep::run_validate(&cfg)?;
            sweep::write_validate_csv(output(args.out.as_deref())?, &rows)?;
            let bad: Vec<_> = rows.iter().filter(|r| !r.pass()).collect();
            for r in &bad {
                eprintln!(
                    "tolerance breach at alpha1={} alpha2={}: analytic={} mc={} |diff|={} allowed={}",
                    r.alpha1,
                    r.alpha2,
                    r.analytic,
                    r.mc,
                    r.abs_diff(),
                    r.allowed
                );
            }
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Tolerance(bad.len()))
            }
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            let rows = sweep::run_sweep(&cfg)?;
            let variable = cfg
                .sweep
                .as_ref()
                .map(|s| s.variable)
                .expect("run_sweep checked the block");
            sweep::write_sweep_csv(output(args.out.as_deref())?, variable, &rows)?;
            Ok(())
        }
        Command::Gain(args) => {
            let cfg = load(&args)?;
            let rows = sweep::run_gain(&cfg)?;
            sweep::write_gain_csv(output(args.out.as_deref())?, &rows)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(n)) => {
            eprintln!("error: {n} validation row(s) outside tolerance");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
