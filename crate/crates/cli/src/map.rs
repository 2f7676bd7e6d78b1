use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::Args;
use qls_core::circuit::emit_qasm;
use qls_core::coupling::CouplingMap;
use qls_core::encoder::{EncodeError, EncoderOptions, Goal};
use qls_core::extract::SwapStyle;
use qls_core::{par, synthesize, Report, SynthesisError, SynthesisOptions};

use crate::{read_circuit, write_out, Exit, Failure, OrExit, PlatformArgs};

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Input OPENQASM 2.0 files. More than one input needs --out-dir.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Optimization goal: depth or cx-depth.
    #[arg(long, default_value = "depth")]
    goal: Goal,
    /// Lower the SWAP count at the optimal makespan.
    #[arg(long)]
    minimize_swaps: bool,
    /// Forbid SWAPs with an unoccupied endpoint.
    #[arg(long)]
    no_ancillary: bool,
    /// How SWAPs are written: three-cx or swap-gate.
    #[arg(long, default_value = "three-cx")]
    swap_style: SwapStyle,
    /// Wall-clock limit per instance, in seconds.
    #[arg(long, value_parser = parse_timeout)]
    timeout: Option<Duration>,
    /// Mapped circuit (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// JSON report (default: stderr).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the final CNF in DIMACS format. A directory in batch mode.
    #[arg(long)]
    dump_cnf: Option<PathBuf>,
    /// Batch mode: write `<stem>.mapped.qasm` and `<stem>.json` per input here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Instances solved in parallel in batch mode (0: one per core).
    #[arg(short, long, default_value_t = 1)]
    jobs: usize,
}

fn parse_timeout(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if secs.is_finite() && secs > 0.0 {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err("timeout must be a positive number of seconds".into())
    }
}

struct Job {
    input: PathBuf,
    output: Option<PathBuf>,
    report: Option<PathBuf>,
    cnf: Option<PathBuf>,
}

pub fn run(args: &MapArgs) -> Result<Exit, Failure> {
    let coupling = args.platform.load()?;
    let options = SynthesisOptions {
        encoder: EncoderOptions {
            goal: args.goal,
            ancillary: !args.no_ancillary,
            minimize_swaps: args.minimize_swaps,
            timeout: args.timeout,
            record_cnf: args.dump_cnf.is_some(),
            ..EncoderOptions::default()
        },
        swap_style: args.swap_style,
    };
    let jobs = plan(args)?;
    let header = format!(
        "qls-sat map: goal {}, platform {}",
        args.goal.as_str(),
        args.platform.label()
    );
    if args.out_dir.is_none() {
        return run_job(&jobs[0], &coupling, &options, &header);
    }
    let results = par::with_jobs(args.jobs, || {
        par::map(&jobs, |job| run_job(job, &coupling, &options, &header))
    });
    let mut worst = Exit::Ok;
    for (job, result) in jobs.iter().zip(results) {
        let exit = match result {
            Ok(exit) => exit,
            Err(f) => {
                eprintln!("{}: error: {:#}", job.input.display(), f.error);
                f.exit
            }
        };
        let status = match exit {
            Exit::Ok => "ok",
            Exit::Timeout => "timeout",
            Exit::Invalid => "invalid input",
            Exit::Internal => "internal error",
        };
        eprintln!("{}: {status}", job.input.display());
        worst = worst.max(exit);
    }
    Ok(worst)
}

fn plan(args: &MapArgs) -> Result<Vec<Job>, Failure> {
    let Some(dir) = &args.out_dir else {
        if args.inputs.len() > 1 {
            return Err(anyhow!("several inputs need --out-dir")).or_exit(Exit::Invalid);
        }
        return Ok(vec![Job {
            input: args.inputs[0].clone(),
            output: args.output.clone(),
            report: args.report.clone(),
            cnf: args.dump_cnf.clone(),
        }]);
    };
    if args.output.is_some() || args.report.is_some() {
        return Err(anyhow!("--output and --report cannot be combined with --out-dir")).or_exit(Exit::Invalid);
    }
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .or_exit(Exit::Invalid)?;
    if let Some(cnf_dir) = &args.dump_cnf {
        fs::create_dir_all(cnf_dir)
            .with_context(|| format!("creating {}", cnf_dir.display()))
            .or_exit(Exit::Invalid)?;
    }
    Ok(args
        .inputs
        .iter()
        .map(|input| {
            let stem = input.file_stem().unwrap_or(input.as_os_str());
            let named = |d: &Path, ext: &str| d.join(format!("{}.{ext}", stem.to_string_lossy()));
            Job {
                input: input.clone(),
                output: Some(named(dir, "mapped.qasm")),
                report: Some(named(dir, "json")),
                cnf: args.dump_cnf.as_deref().map(|d| named(d, "cnf")),
            }
        })
        .collect())
}

fn write_report(path: Option<&Path>, report: &Report) -> Result<(), Failure> {
    let json = report.to_json() + "\n";
    match path {
        Some(_) => write_out(path, &json),
        None => {
            eprint!("{json}");
            Ok(())
        }
    }
}

fn run_job(job: &Job, coupling: &CouplingMap, options: &SynthesisOptions, header: &str) -> Result<Exit, Failure> {
    let start = Instant::now();
    let circuit = read_circuit(&job.input)?;
    let goal = options.encoder.goal;
    match synthesize(&circuit, coupling, options) {
        Ok(s) => {
            let mapping: Vec<String> = s.initial_mapping.iter().map(ToString::to_string).collect();
            let comment = format!(
                "{header}\ninitial_mapping: {}\ndepth {}, cx-depth {}, swaps {}",
                mapping.join(" "),
                s.metrics.depth,
                s.metrics.cx_depth,
                s.metrics.swap_count
            );
            write_out(job.output.as_deref(), &emit_qasm(&s.output, &comment))?;
            write_report(job.report.as_deref(), &Report::success(&s))?;
            if let (Some(path), Some(cnf)) = (&job.cnf, &s.dimacs) {
                write_out(Some(path), cnf)?;
            }
            Ok(Exit::Ok)
        }
        Err(SynthesisError::Encode(e)) => match e.bound_reached() {
            Some(bound) => {
                log::warn!("{}: {e}", job.input.display());
                write_report(job.report.as_deref(), &Report::timeout(goal, bound, start.elapsed()))?;
                Ok(Exit::Timeout)
            }
            None if matches!(e, EncodeError::Sat(_)) => Err(e).or_exit(Exit::Internal),
            None => Err(e).or_exit(Exit::Invalid),
        },
        Err(e) => Err(e).or_exit(Exit::Internal),
    }
}
