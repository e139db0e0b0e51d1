//! `gbo`: command-line surface of the laboratory.
//!
//! Every subcommand reads a [`RunConfig`] (file, `--set key=value` and the
//! named flags, in that order of precedence), runs one experiment and writes
//! a report as NDJSON or CSV. Exit codes: 0 success, 1 invalid input or
//! domain error, 2 numerical failure (the report is still written), 64
//! unknown subcommand.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use gbo_core::io::{parse_config, ReportFormat, RunConfig};
use gbo_core::Error;

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "gbo", version, about = "Pseudospectral laboratory for generalized Benjamin-Ono equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all subcommands. Named flags override `--set`, which
/// overrides the config file.
#[derive(Debug, Clone, Args)]
pub(crate) struct Common {
    /// Config file: `key=value` lines or a flat JSON object.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    k: Option<String>,
    /// Sobolev index or `auto`.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    period: Option<String>,
    /// Time horizon.
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "J")]
    gap: Option<String>,
    #[arg(long = "Jsim")]
    sim: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Input snapshot (GBF1 field or GBT1 trajectory).
    #[arg(long)]
    input: Option<String>,
    /// Output snapshot path.
    #[arg(long)]
    output: Option<String>,
    /// Report format.
    #[arg(long, default_value = "ndjson")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads; `GBO_WORKERS` takes precedence.
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p)?,
            None => String::new(),
        };
        let mut cfg = parse_config(&text)?;
        for kv in &self.sets {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config { key: kv.clone(), constraint: "expected KEY=VALUE".into() })?;
            cfg.set(key.trim(), value)?;
        }
        let named = [
            ("k", &self.k),
            ("s", &self.s),
            ("n", &self.n),
            ("period", &self.period),
            ("T", &self.horizon),
            ("dt", &self.dt),
            ("stride", &self.stride),
            ("eps", &self.eps),
            ("J", &self.gap),
            ("Jsim", &self.sim),
            ("seed", &self.seed),
            ("input", &self.input),
            ("output", &self.output),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn workers(&self) -> Option<usize> {
        std::env::var("GBO_WORKERS").ok().and_then(|v| v.trim().parse().ok()).or(self.workers).filter(|&w| w > 0)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the equation and record conservation diagnostics.
    Simulate(commands::SimulateArgs),
    /// Picard iteration of the integral equation.
    Picard(commands::PicardArgs),
    /// Empirical ratios for one linear estimate.
    Verify(commands::VerifyArgs),
    /// Evaluate norms of a trajectory.
    Norms(commands::NormsArgs),
    /// Manufactured-solution check of the gauge conjugation.
    GaugeCheck(commands::GaugeArgs),
    /// Paraproduct split and telescoping identities on seeded data.
    ParaproductCheck(commands::ParaproductArgs),
    /// Scaling law of homogeneous Sobolev norms.
    ScalingCheck(commands::ScalingArgs),
    /// Littlewood-Paley block energies of a field.
    LpEnergies(commands::LpArgs),
    /// Write seeded initial data as a GBF1 snapshot.
    MakeData(commands::MakeDataArgs),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) => &a.common,
            Command::Picard(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Norms(a) => &a.common,
            Command::GaugeCheck(a) => &a.common,
            Command::ParaproductCheck(a) => &a.common,
            Command::ScalingCheck(a) => &a.common,
            Command::LpEnergies(a) => &a.common,
            Command::MakeData(a) => &a.common,
        }
    }

    fn execute(&self, cfg: &RunConfig) -> Result<Outcome, Error> {
        match self {
            Command::Simulate(a) => commands::simulate(a, cfg),
            Command::Picard(a) => commands::picard(a, cfg),
            Command::Verify(a) => commands::verify(a, cfg),
            Command::Norms(a) => commands::norms(a, cfg),
            Command::GaugeCheck(a) => commands::gauge_check(a, cfg),
            Command::ParaproductCheck(a) => commands::paraproduct_check(a, cfg),
            Command::ScalingCheck(a) => commands::scaling_check(a, cfg),
            Command::LpEnergies(a) => commands::lp_energies(a, cfg),
            Command::MakeData(a) => commands::make_data(a, cfg),
        }
    }
}

/// What a finished command hands back.
pub(crate) struct Outcome {
    pub report: gbo_core::io::Report,
    /// Numerical failure: the report is written and the exit code is 2.
    pub failed: bool,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical_failure() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parse `argv` (including the program name), run, and write the report to
/// `out` (unless `--report` is given) and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => EXIT_USAGE,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INVALID,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let common = cli.command.common().clone();
    let format: ReportFormat = match common.format.parse() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let cfg = match common.resolve() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };

    let result = match common.workers() {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| cli.command.execute(&cfg)),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start {w} workers: {e}");
                return EXIT_INVALID;
            }
        },
        None => cli.command.execute(&cfg),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let bytes = match outcome.report.emit(format) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let written = match &common.report {
        Some(p) => std::fs::write(p, &bytes),
        None => out.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_INVALID;
    }
    if outcome.failed {
        let _ = writeln!(err, "numerical failure; see report summary");
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

/// Run with the process's stdout and stderr.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}
