//! `rabi`: spectra, flows, method comparisons and invariant checks for the
//! quantum Rabi model, written as CSV or JSON tables.
//!
//! Exit status: 0 success, 1 I/O failure, 2 usage error, 3 non-convergence,
//! 4 invariant failure.

mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::{ModelParams, Parity};

use commands::{Failure, Method, RunConfig};

#[derive(Parser)]
#[command(name = "rabi", version, about = "Parity-resolved Rabi model spectra from orthogonal polynomial zeros")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest `--count` eigenvalues of one parity.
    Spectrum(Common),
    /// Zeros of the degree-n polynomial against n for `--level` onwards.
    Flow(Common),
    /// The spectrum against an independent method.
    Compare {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Invariant suite at one (kappa, delta), both parities.
    Check(Common),
    /// Bargmann-space coefficients of the eigenstate at `--level`.
    Eigenfunction(Common),
}

#[derive(Args)]
struct Common {
    /// Coupling g / omega_c.
    #[arg(long, default_value_t = 0.2)]
    kappa: f64,
    /// Half level splitting omega_0 / (2 omega_c).
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    /// `+` or `-`.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    parity: Parity,
    /// Levels (spectrum, compare, flow), degree (check) or coefficient cutoff
    /// (eigenfunction).
    #[arg(long)]
    count: Option<usize>,
    /// 0-based level for flow and eigenfunction.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// Absolute tolerance on each eigenvalue.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Degree range `a..b`, inclusive of `b`.
    #[arg(long, value_parser = commands::parse_degrees)]
    degrees: Option<std::ops::RangeInclusive<usize>>,
    /// Plain doubles instead of the exponent-scaled recurrence.
    #[arg(long)]
    unscaled: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Braak,
    Schweber,
    Jc,
    Oracle,
    Dense,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Braak => Method::Braak,
            MethodArg::Schweber => Method::Schweber,
            MethodArg::Jc => Method::Jc,
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Dense => Method::Dense,
        }
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig, Failure> {
        if !(self.tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.count == Some(0) {
            return Err(Failure::Usage("--count must be at least 1".into()));
        }
        Ok(RunConfig {
            params: ModelParams::new(self.kappa, self.delta, self.parity)?,
            count: self.count,
            level: self.level,
            tol: self.tol,
            degrees: self.degrees.clone(),
            unscaled: self.unscaled,
        })
    }
}

fn emit(table: &table::Table, common: &Common) -> Result<(), Failure> {
    let text = match common.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(Failure::Io)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (common, outcome) = match &cli.command {
        Command::Spectrum(c) => (c, commands::run_spectrum(&c.config()?)),
        Command::Flow(c) => (c, commands::run_flow(&c.config()?)),
        Command::Compare { method, common } => (common, commands::run_compare(&common.config()?, (*method).into())),
        Command::Check(c) => (c, commands::run_check(&c.config()?)),
        Command::Eigenfunction(c) => (c, commands::run_eigenfunction(&c.config()?)),
    };
    match outcome {
        Ok(t) => emit(&t, common),
        Err(Failure::Invariant(t)) => {
            emit(&t, common)?;
            Err(Failure::Invariant(t))
        }
        Err(other) => Err(other),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("rabi: usage: {m}"),
                Failure::NonConvergence(m) => eprintln!("rabi: {m}"),
                Failure::Invariant(_) => eprintln!("rabi: invariant check failed"),
                Failure::Io(m) => eprintln!("rabi: cannot write output: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
