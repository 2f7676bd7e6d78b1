use std::path::PathBuf;

use clap::Args;
use qls_core::encoder::Goal;
use qls_core::oracle::{min_swaps_at_makespan, optimal_depth_bruteforce};
use serde_json::json;

use crate::{read_circuit, Exit, Failure, OrExit, PlatformArgs};

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Input OPENQASM 2.0 file.
    input: PathBuf,
    #[command(flatten)]
    platform: PlatformArgs,
    /// Optimization goal: depth or cx-depth.
    #[arg(long, default_value = "depth")]
    goal: Goal,
    /// Largest makespan tried before giving up.
    #[arg(long, default_value_t = 40)]
    max_depth: usize,
    /// Also compute the fewest SWAPs at the optimal makespan.
    #[arg(long)]
    min_swaps: bool,
}

/// Prints `{goal, makespan, min_swaps}`; exits 2 when no schedule fits within
/// `--max-depth`.
pub fn run(args: &OracleArgs) -> Result<Exit, Failure> {
    let coupling = args.platform.load()?;
    let circuit = read_circuit(&args.input)?;
    let makespan = optimal_depth_bruteforce(&circuit, &coupling, args.goal, args.max_depth).or_exit(Exit::Invalid)?;
    let min_swaps = match (makespan, args.min_swaps) {
        (Some(t), true) => min_swaps_at_makespan(&circuit, &coupling, args.goal, t).or_exit(Exit::Invalid)?,
        _ => None,
    };
    let out = json!({
        "goal": args.goal,
        "makespan": makespan,
        "min_swaps": min_swaps,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json value serializes"));
    Ok(if makespan.is_some() { Exit::Ok } else { Exit::Timeout })
}
