//! `qls-sat`: depth-optimal qubit layout synthesis from the command line.

mod check;
mod map;
mod oracle;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qls_core::circuit::{parse_qasm, Circuit};
use qls_core::coupling::{builtin_platform, parse_coupling, CouplingMap};

#[derive(Parser)]
#[command(
    name = "qls-sat",
    version,
    about = "Depth-optimal qubit layout synthesis with incremental SAT"
)]
struct Cli {
    /// Log more (-v info, -vv debug, -vvv trace). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map circuits onto a platform with optimal depth or CX-depth.
    Map(map::MapArgs),
    /// Exhaustive reference optimum for tiny circuits.
    Oracle(oracle::OracleArgs),
    /// Check a mapped circuit against its input.
    Check(check::CheckArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct PlatformArgs {
    /// Built-in platform: tenerife, melbourne, guadalupe, tokyo, cambridge,
    /// sycamore, aspen-m, or line-N, cycle-N, star-N, grid-RxC.
    #[arg(long)]
    platform: Option<String>,
    /// Edge-list file: `n <count>` then one `a b` pair per line.
    #[arg(long)]
    coupling: Option<PathBuf>,
}

impl PlatformArgs {
    pub fn load(&self) -> Result<CouplingMap, Failure> {
        match (&self.platform, &self.coupling) {
            (Some(name), _) => builtin_platform(name).or_exit(Exit::Invalid),
            (None, Some(path)) => {
                let text = read(path)?;
                parse_coupling(&text)
                    .with_context(|| format!("reading {}", path.display()))
                    .or_exit(Exit::Invalid)
            }
            (None, None) => unreachable!("clap requires one platform source"),
        }
    }

    pub fn label(&self) -> String {
        match (&self.platform, &self.coupling) {
            (Some(name), _) => name.clone(),
            (None, Some(path)) => path.display().to_string(),
            (None, None) => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Invalid = 1,
    Timeout = 2,
    Internal = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub error: anyhow::Error,
}

pub trait OrExit<T> {
    fn or_exit(self, exit: Exit) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, exit: Exit) -> Result<T, Failure> {
        self.map_err(|e| Failure { exit, error: e.into() })
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .or_exit(Exit::Invalid)
}

pub fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_qasm(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
        .or_exit(Exit::Invalid)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .or_exit(Exit::Invalid),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout")
            .or_exit(Exit::Invalid),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Invalid as u8 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match &cli.command {
        Command::Map(args) => map::run(args),
        Command::Oracle(args) => oracle::run(args),
        Command::Check(args) => check::run(args),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.exit as u8)
        }
    }
}
