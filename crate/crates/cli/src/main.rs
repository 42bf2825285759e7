use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod report;
mod spec;

use config::{CheckSystemArgs, CommandConfig, MulArgs, NormArgs, RegrepArgs, RunConfig, TransferArgs};
use error::{read_file, CliError};

/// Crossed products of finite-dimensional C*-algebras by lexicographically
/// ordered Z^k semigroups of endomorphisms.
///
/// Exit status: 0 when every requested check passes, 1 when a mathematical
/// check fails or a computation is refused, 2 on configuration or I/O errors.
#[derive(Parser, Debug)]
#[command(name = "xprod", version)]
struct Cli {
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Seed for every sampled check [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance for the system [default: 1e-9].
    #[arg(long, global = true, env = "XPROD_TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the built-in systems and their expected verdicts.
    Fixtures,
    /// Decide fine representability and print the witness if it fails.
    CheckSystem(CheckSystemArgs),
    /// Synthesize and verify the transfer operator L_x.
    Transfer(TransferArgs),
    /// Multiply two crossed-product elements.
    Mul(MulArgs),
    /// Certified bracket for the C*-norm of an element.
    Norm(NormArgs),
    /// Build a truncated regular representation and check it.
    Regrep(RegrepArgs),
    /// Run the invariant suite over all fixtures.
    Selftest,
    /// Run a command described by a JSON config file.
    Run {
        #[arg(value_name = "CONFIG")]
        config: PathBuf,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let command = match &cli.command {
        Cmd::Fixtures => CommandConfig::Fixtures,
        Cmd::CheckSystem(a) => CommandConfig::CheckSystem(a.clone()),
        Cmd::Transfer(a) => CommandConfig::Transfer(a.clone()),
        Cmd::Mul(a) => CommandConfig::Mul(a.clone()),
        Cmd::Norm(a) => CommandConfig::Norm(a.clone()),
        Cmd::Regrep(a) => CommandConfig::Regrep(a.clone()),
        Cmd::Selftest => CommandConfig::Selftest,
        Cmd::Run { config } => {
            let text = read_file(config)?;
            let mut cfg: RunConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if cli.tol.is_some() {
                cfg.tol = cli.tol;
            }
            return check(cfg);
        }
    };
    check(RunConfig {
        command,
        seed: cli.seed.unwrap_or(0),
        tol: cli.tol,
    })
}

fn check(cfg: RunConfig) -> Result<RunConfig, CliError> {
    if let Some(t) = cfg.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
        }
    }
    if let Some(src) = cfg.command.source() {
        if src.fixture.is_some() == src.system.is_some() {
            return Err(CliError::Config("exactly one of fixture and system is required".into()));
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("xprod: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let (report, err) = commands::run(&cfg);
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("xprod: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let text = if cli.json {
        report.to_json() + "\n"
    } else {
        report.render()
    };
    // a closed pipe (`xprod ... | head`) is not an error
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if let Some(e) = err {
        eprintln!("xprod: {e}");
        return ExitCode::from(e.exit_code());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
