mod args;
mod commands;
mod manifest;
mod oracle;
mod targets;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input files: exit 2.
    Usage(String),
    /// The fit stopped short of its criterion: exit 3.
    NotConverged(String),
    /// An oracle comparison exceeded its tolerance: exit 4.
    OracleFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::OracleFailed(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
            CliError::OracleFailed(m) => write!(f, "oracle check failed: {m}"),
        }
    }
}

impl From<shellfield_core::Error> for CliError {
    fn from(e: shellfield_core::Error) -> Self {
        match e {
            shellfield_core::Error::Divergence { message, .. } => CliError::NotConverged(message),
            shellfield_core::Error::Lookup(names) => {
                CliError::Usage(format!("unknown name(s): {names}"))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("SHELLFIELD_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "SHELLFIELD_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Image(a) => commands::image(a),
        Command::Oracle(a) => oracle::run(a.check),
        Command::Tables(a) => commands::tables(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
