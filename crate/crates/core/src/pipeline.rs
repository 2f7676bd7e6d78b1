//! End-to-end synthesis: encode, solve, decode, emit, validate.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{self, Circuit};
use crate::coupling::CouplingMap;
use crate::encoder::{self, EncodeError, EncoderOptions, Goal};
use crate::extract::{self, DecodeError, Metrics, SwapStyle, ValidationReport};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SynthesisOptions {
    pub encoder: EncoderOptions,
    pub swap_style: SwapStyle,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub goal: Goal,
    /// Circuit over physical qubits.
    pub output: Circuit,
    pub initial_mapping: Vec<usize>,
    pub final_mapping: Vec<usize>,
    pub makespan: usize,
    pub metrics: Metrics,
    /// SWAP count before minimization.
    pub initial_swaps: usize,
    /// Set when minimization ran: whether the final count was refuted at
    /// one less.
    pub swaps_minimal: Option<bool>,
    pub validation: ValidationReport,
    pub time_total: Duration,
    pub time_solve: Duration,
    pub dimacs: Option<String>,
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("decoding failed: {0}")]
    Decode(#[from] DecodeError),
    #[error("output failed validation: {}", .0.diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Validation(Box<ValidationReport>),
}

pub fn synthesize(
    input: &Circuit,
    coupling: &CouplingMap,
    options: &SynthesisOptions,
) -> Result<Synthesis, SynthesisError> {
    let start = Instant::now();
    let goal = options.encoder.goal;
    let (encoded, anchors) = match goal {
        Goal::Depth => (input.clone(), Vec::new()),
        Goal::CxDepth => circuit::strip_unary(input),
    };
    let mut solved = encoder::solve_optimal(&encoded, coupling, &options.encoder)?;
    let initial_swaps = solved.state.swap_count(&solved.model);
    let (model, swaps_minimal) = if options.encoder.minimize_swaps {
        let min = encoder::minimize_swaps(&mut solved.state, solved.model)?;
        log::info!(
            "swap count {} -> {} (minimal: {})",
            min.initial_swaps,
            min.swaps,
            min.proven_minimal
        );
        (min.model, Some(min.proven_minimal))
    } else {
        (solved.model, None)
    };
    let mapped = extract::decode_model(&solved.state, &model)?;
    let output = match goal {
        Goal::Depth => extract::emit_mapped_circuit(&mapped, options.swap_style),
        Goal::CxDepth => extract::reinsert_unary(&mapped, &anchors, options.swap_style)?,
    };
    let metrics = Metrics::measure(&output, mapped.swap_count());
    let validation = extract::validate(input, coupling, &output, &mapped.initial_mapping, Some(&metrics));
    if !validation.is_pass() {
        return Err(SynthesisError::Validation(Box::new(validation)));
    }
    let dimacs = options.encoder.record_cnf.then(|| {
        let mut buf = Vec::new();
        solved
            .state
            .write_dimacs(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("DIMACS is ASCII")
    });
    Ok(Synthesis {
        goal,
        output,
        initial_mapping: mapped.initial_mapping,
        final_mapping: mapped.final_mapping,
        makespan: solved.makespan,
        metrics,
        initial_swaps,
        swaps_minimal,
        validation,
        time_total: start.elapsed(),
        time_solve: solved.state.solve_time(),
        dimacs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
}

/// The JSON report. Every key is always present; fields that do not apply
/// to a status are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub goal: Goal,
    pub status: Status,
    pub makespan: Option<usize>,
    pub depth: Option<usize>,
    pub cx_depth: Option<usize>,
    pub swap_count: Option<usize>,
    pub cx_count: Option<usize>,
    pub initial_mapping: Option<Vec<usize>>,
    pub time_total_s: f64,
    pub time_solve_s: f64,
    /// Least makespan not yet refuted when the run stopped early.
    pub lower_bound: Option<usize>,
    pub swaps_minimal: Option<bool>,
}

impl Report {
    pub fn success(s: &Synthesis) -> Self {
        Report {
            goal: s.goal,
            status: Status::Ok,
            makespan: Some(s.makespan),
            depth: Some(s.metrics.depth),
            cx_depth: Some(s.metrics.cx_depth),
            swap_count: Some(s.metrics.swap_count),
            cx_count: Some(s.metrics.cx_count),
            initial_mapping: Some(s.initial_mapping.clone()),
            time_total_s: s.time_total.as_secs_f64(),
            time_solve_s: s.time_solve.as_secs_f64(),
            lower_bound: None,
            swaps_minimal: s.swaps_minimal,
        }
    }

    pub fn timeout(goal: Goal, lower_bound: usize, elapsed: Duration) -> Self {
        Report {
            goal,
            status: Status::Timeout,
            makespan: None,
            depth: None,
            cx_depth: None,
            swap_count: None,
            cx_count: None,
            initial_mapping: None,
            time_total_s: elapsed.as_secs_f64(),
            time_solve_s: elapsed.as_secs_f64(),
            lower_bound: Some(lower_bound),
            swaps_minimal: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
