use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use waylimit::commands::{self, CoherentArgs, Outcome, ReportFormat, SweepArgs};
use waylimit_core::optimizer::ProbeFamily;

#[derive(Parser)]
#[command(name = "waylimit", version, about = "Measurement noise under conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Family {
    SpinLadder,
    Oscillator,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate noise and every bound of a model at one object state.
    Verify {
        /// Model JSON file.
        model: PathBuf,
        /// Named spin-1/2 state (alpha_y, ...) or a JSON array of [re, im] pairs.
        #[arg(long)]
        state: String,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Best achievable error against the bound over a range of probe sizes.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
    },
    /// Search conservative interactions as configured by a JSON file.
    Optimize {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in model (swap, trivial, yw-sample).
    Demo { name: String },
    /// Variance of the two-mode record observable over coherent probes.
    Coherent {
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0])]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("WAYLIMIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("WAYLIMIT_THREADS: expected a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("WAYLIMIT_THREADS")
}

fn with_output<F>(out: Option<&Path>, f: F) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Write) -> Result<Outcome>,
{
    match out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            let mut w = BufWriter::new(file);
            let outcome = f(&mut w)?;
            w.flush().with_context(|| format!("cannot write {}", path.display()))?;
            Ok(outcome)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let outcome = f(&mut lock)?;
            lock.flush()?;
            Ok(outcome)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Verify {
            model,
            state,
            json: _,
            csv,
        } => {
            let format = if csv { ReportFormat::Csv } else { ReportFormat::Json };
            with_output(None, |w| commands::verify(&model, &state, format, w))
        }
        Command::Sweep {
            family,
            sizes,
            out,
            seed,
            restarts,
            max_iters,
        } => {
            let args = SweepArgs {
                family: match family {
                    Family::SpinLadder => ProbeFamily::SpinLadder,
                    Family::Oscillator => ProbeFamily::Oscillator,
                },
                sizes,
                seed,
                restarts,
                max_iters,
            };
            with_output(out.as_deref(), |w| commands::sweep(&args, w))
        }
        Command::Optimize { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read {}", config.display()))?;
            with_output(out.as_deref(), |w| commands::optimize(&text, w))
        }
        Command::Demo { name } => with_output(None, |w| {
            commands::demo(&name, w)?;
            Ok(Outcome {
                status: commands::Status::Clean,
                warnings: Vec::new(),
            })
        }),
        Command::Coherent {
            n_max,
            grid,
            seed,
            out,
        } => {
            let args = CoherentArgs { n_max, grid, seed };
            with_output(out.as_deref(), |w| commands::coherent(&args, w))
        }
    }
}
