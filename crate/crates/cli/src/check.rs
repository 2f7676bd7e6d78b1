use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use qls_core::circuit::{parse_qasm_with, ParseOptions};
use qls_core::extract::{validate, Metrics};
use qls_core::Report;
use serde_json::json;

use crate::{read, read_circuit, Exit, Failure, OrExit, PlatformArgs};

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// The original circuit.
    input: PathBuf,
    /// The mapped circuit, over physical qubits.
    output: PathBuf,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Physical qubit of each logical qubit at the start, comma separated.
    #[arg(long, value_delimiter = ',')]
    initial_mapping: Option<Vec<usize>>,
    /// A `map` report; its metrics are checked and its mapping is used when
    /// --initial-mapping is absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Reads the `// initial_mapping: ...` comment that `map` writes.
fn header_mapping(text: &str) -> Option<Vec<usize>> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("//"))
        .filter_map(|l| l.trim().strip_prefix("initial_mapping:"))
        .map(|rest| {
            rest.split_whitespace()
                .map(str::parse)
                .collect::<Result<Vec<usize>, _>>()
        })
        .next()?
        .ok()
}

pub fn run(args: &CheckArgs) -> Result<Exit, Failure> {
    let coupling = args.platform.load()?;
    let input = read_circuit(&args.input)?;
    let out_text = read(&args.output)?;
    let output = parse_qasm_with(&out_text, ParseOptions { allow_swap: true })
        .with_context(|| format!("parsing {}", args.output.display()))
        .or_exit(Exit::Invalid)?
        .circuit;
    let report: Option<Report> = match &args.report {
        Some(path) => Some(
            serde_json::from_str(&read(path)?)
                .with_context(|| format!("reading report {}", path.display()))
                .or_exit(Exit::Invalid)?,
        ),
        None => None,
    };
    let mapping = args
        .initial_mapping
        .clone()
        .or_else(|| report.as_ref().and_then(|r| r.initial_mapping.clone()))
        .or_else(|| header_mapping(&out_text))
        .ok_or_else(|| anyhow!("no initial mapping: pass --initial-mapping or --report"))
        .or_exit(Exit::Invalid)?;
    let reported = report.as_ref().and_then(|r| {
        Some(Metrics {
            depth: r.depth?,
            cx_depth: r.cx_depth?,
            swap_count: r.swap_count?,
            cx_count: r.cx_count?,
        })
    });
    let result = validate(&input, &coupling, &output, &mapping, reported.as_ref());
    let diagnostics: Vec<_> = result
        .diagnostics
        .iter()
        .map(|d| json!({ "kind": d.kind(), "message": d.to_string() }))
        .collect();
    let out = json!({
        "status": if result.is_pass() { "pass" } else { "fail" },
        "diagnostics": diagnostics,
        "metrics": result.recomputed,
        "final_mapping": result.final_mapping,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json value serializes"));
    Ok(if result.is_pass() { Exit::Ok } else { Exit::Internal })
}
