//! Command-line front end: build maps, run checks and planners, and write
//! CSV, JSON and SVG artifacts.
//!
//! Exit codes: 0 on success, 1 on a failed verification or an I/O error
//! (any report is still written), 2 on a usage error.

pub mod args;
pub mod commands;
pub mod config;
pub mod figures;
pub mod output;

use std::io;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SPIRALEMB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {0}: {1}")]
    Io(String, #[source] io::Error),
    #[error(transparent)]
    Core(#[from] spiralemb::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(spiralemb::Error::Usage(_) | spiralemb::Error::Parameter(_)) => EXIT_USAGE,
            _ => EXIT_FAILED,
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Spiral(a) => commands::spiral(a),
        Command::DoubleSpiral(a) => commands::double_spiral(a),
        Command::Flow(a) => commands::flow(a),
        Command::ChainVerify(a) => commands::chain_verify(a),
        Command::Verify(a) => commands::verify(a),
        Command::Plan(a) => commands::plan(a),
        Command::Figure(a) => figure(a),
    }
}

fn figure(a: &args::FigureArgs) -> Result<bool, CliError> {
    let r = figures::render(a)?;
    let io_err = |p: &std::path::Path| {
        let name = p.display().to_string();
        move |e| CliError::Io(name, e)
    };
    std::fs::write(&a.out, r.figure.render()).map_err(io_err(&a.out))?;
    if let Some(csv) = &a.csv {
        std::fs::write(csv, output::to_csv(&r.rows)).map_err(io_err(csv))?;
    }
    println!("{}", output::to_json_line(&r.summary)?);
    Ok(true)
}

#[cfg(feature = "parallel")]
fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn in_pool<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    Ok(f())
}

fn try_run(mut argv: Vec<String>) -> Result<bool, CliError> {
    if let Some(path) = config::take_config(&mut argv)? {
        config::apply(&mut argv, &path)?;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(true);
        }
        Err(e) => {
            let _ = e.print();
            return Err(CliError::Usage("invalid arguments".into()));
        }
    };
    let threads = threads_from_env()?;
    in_pool(threads, || dispatch(&cli))?
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    match try_run(argv) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("verification failed");
            EXIT_FAILED
        }
        Err(e) => {
            if !matches!(&e, CliError::Usage(m) if m == "invalid arguments") {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}
