use std::fmt;

use serde::Serialize;

use super::Metrics;
use crate::circuit::{Circuit, Gate, Operands};
use crate::coupling::CouplingMap;

const SEARCH_LIMIT: usize = 1_000_000;

/// One failed check, pointing at the first offending output gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    BadOutput {
        reason: String,
    },
    BadInitialMapping {
        reason: String,
    },
    /// A two-qubit output gate on a pair that is not a coupling edge.
    Connectivity {
        index: usize,
        a: usize,
        b: usize,
    },
    /// A non-SWAP gate on a wire with no logical occupant.
    AncillaGate {
        index: usize,
    },
    /// An output gate that matches no pending input gate.
    UnknownGate {
        index: usize,
    },
    /// An output gate that matches input gate `gate`, which is not yet due.
    OrderViolation {
        index: usize,
        gate: usize,
    },
    /// Input gates never produced; `first` is the lowest such id.
    MissingGates {
        count: usize,
        first: usize,
    },
    MetricMismatch {
        field: &'static str,
        reported: usize,
        actual: usize,
    },
    SearchLimit,
}

impl Diagnostic {
    pub fn kind(&self) -> &'static str {
        match self {
            Diagnostic::BadOutput { .. } => "bad_output",
            Diagnostic::BadInitialMapping { .. } => "bad_initial_mapping",
            Diagnostic::Connectivity { .. } => "connectivity",
            Diagnostic::AncillaGate { .. } => "ancilla_gate",
            Diagnostic::UnknownGate { .. } => "unknown_gate",
            Diagnostic::OrderViolation { .. } => "order_violation",
            Diagnostic::MissingGates { .. } => "missing_gates",
            Diagnostic::MetricMismatch { .. } => "metric_mismatch",
            Diagnostic::SearchLimit => "search_limit",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::BadOutput { reason } => write!(f, "bad output circuit: {reason}"),
            Diagnostic::BadInitialMapping { reason } => write!(f, "bad initial mapping: {reason}"),
            Diagnostic::Connectivity { index, a, b } => {
                write!(f, "connectivity: output gate {index} acts on ({a}, {b}), not an edge")
            }
            Diagnostic::AncillaGate { index } => {
                write!(f, "output gate {index} acts on a wire without a logical qubit")
            }
            Diagnostic::UnknownGate { index } => {
                write!(f, "output gate {index} matches no pending input gate")
            }
            Diagnostic::OrderViolation { index, gate } => {
                write!(
                    f,
                    "order: output gate {index} applies input gate {gate} before its predecessors"
                )
            }
            Diagnostic::MissingGates { count, first } => {
                write!(f, "{count} input gates missing from the output (first: {first})")
            }
            Diagnostic::MetricMismatch {
                field,
                reported,
                actual,
            } => {
                write!(f, "metric {field}: reported {reported}, recomputed {actual}")
            }
            Diagnostic::SearchLimit => write!(f, "SWAP pattern search exceeded its limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    /// Metrics of the output, when the relabeling simulation succeeded.
    pub recomputed: Option<Metrics>,
    /// Logical-to-physical placement after the last output gate.
    pub final_mapping: Option<Vec<usize>>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn first(&self) -> Option<&Diagnostic> {
        self.diagnostics.first()
    }
}

#[derive(Clone)]
struct Sim {
    i: usize,
    occupant: Vec<Option<usize>>,
    next: Vec<usize>,
    consumed: Vec<bool>,
    swaps: usize,
}

struct Checker<'a> {
    input: &'a Circuit,
    output: &'a Circuit,
    /// Input gate ids on each logical qubit, in order.
    seq: Vec<Vec<usize>>,
}

enum Step {
    Continue,
    Fail(Diagnostic),
}

impl Checker<'_> {
    fn due(&self, sim: &Sim, q: usize) -> Option<usize> {
        self.seq[q].get(sim.next[q]).copied()
    }

    fn is_done(&self, sim: &Sim, g: usize) -> bool {
        let q = self.input.gate(g).qubits()[0];
        let pos = self.seq[q]
            .iter()
            .position(|&x| x == g)
            .expect("gate listed on its qubit");
        pos < sim.next[q]
    }

    fn advance(&self, sim: &mut Sim, g: usize) {
        for q in self.input.gate(g).qubits() {
            sim.next[q] += 1;
        }
    }

    /// The output gate at `sim.i` with wires translated to logical qubits.
    fn logical(&self, sim: &Sim, out: &Gate) -> Option<Operands> {
        let occ = |w: usize| sim.occupant[w];
        Some(match out.operands {
            Operands::Unary(w) => Operands::Unary(occ(w)?),
            Operands::Cx { control, target } => Operands::Cx {
                control: occ(control)?,
                target: occ(target)?,
            },
            Operands::Swap(a, b) => Operands::Swap(occ(a)?, occ(b)?),
        })
    }

    fn matches(out: &Gate, ops: Operands, inp: &Gate) -> bool {
        inp.operands == ops && inp.name == out.name && inp.params == out.params
    }

    fn try_apply(&self, sim: &Sim, out: &Gate) -> Option<usize> {
        let ops = self.logical(sim, out)?;
        let q = match ops {
            Operands::Unary(q) | Operands::Cx { control: q, .. } => q,
            Operands::Swap(..) => return None,
        };
        let g = self.due(sim, q)?;
        let inp = self.input.gate(g);
        let ready = inp.qubits().iter().all(|&x| self.due(sim, x) == Some(g));
        (ready && Self::matches(out, ops, inp)).then_some(g)
    }

    fn classify(&self, sim: &Sim, out: &Gate) -> Diagnostic {
        let index = sim.i;
        let Some(ops) = self.logical(sim, out) else {
            return Diagnostic::AncillaGate { index };
        };
        let pending = self
            .input
            .gates()
            .iter()
            .find(|g| !self.is_done(sim, g.id) && Self::matches(out, ops, g));
        match pending {
            Some(g) => Diagnostic::OrderViolation { index, gate: g.id },
            None => Diagnostic::UnknownGate { index },
        }
    }

    fn next_on(&self, sim: &Sim, from: usize, a: usize, b: usize) -> Option<usize> {
        (from..self.output.len()).find(|&j| {
            !sim.consumed[j] && {
                let g = self.output.gate(j);
                g.acts_on(a) || g.acts_on(b)
            }
        })
    }

    /// Indices of the two CX gates completing a SWAP that starts with
    /// `cx a,b` at `sim.i`.
    fn swap_pattern(&self, sim: &Sim, a: usize, b: usize) -> Option<(usize, usize)> {
        let is = |j: usize, c: usize, t: usize| {
            let g = self.output.gate(j);
            g.name == "cx" && g.operands == Operands::Cx { control: c, target: t }
        };
        let j = self.next_on(sim, sim.i + 1, a, b)?;
        if !is(j, b, a) {
            return None;
        }
        let k = self.next_on(sim, j + 1, a, b)?;
        is(k, a, b).then_some((j, k))
    }

    /// Executes output gate `sim.i`, pushing an alternative interpretation
    /// onto `stack` when one exists.
    fn step(&self, sim: &mut Sim, stack: &mut Vec<Sim>) -> Step {
        let out = self.output.gate(sim.i);
        match out.operands {
            Operands::Swap(a, b) => {
                sim.occupant.swap(a, b);
                sim.swaps += 1;
            }
            Operands::Unary(_) => match self.try_apply(sim, out) {
                Some(g) => self.advance(sim, g),
                None => return Step::Fail(self.classify(sim, out)),
            },
            Operands::Cx { control, target } => {
                let applied = self.try_apply(sim, out);
                let pattern = (out.name == "cx")
                    .then(|| self.swap_pattern(sim, control, target))
                    .flatten();
                if let Some((j, k)) = pattern {
                    let mut alt = sim.clone();
                    alt.consumed[j] = true;
                    alt.consumed[k] = true;
                    alt.occupant.swap(control, target);
                    alt.swaps += 1;
                    alt.i += 1;
                    if applied.is_none() {
                        *sim = alt;
                        return Step::Continue;
                    }
                    stack.push(alt);
                }
                match applied {
                    Some(g) => self.advance(sim, g),
                    None => return Step::Fail(self.classify(sim, out)),
                }
            }
        }
        sim.i += 1;
        Step::Continue
    }

    fn run(&self, start: Sim) -> Result<Sim, Diagnostic> {
        let mut stack = vec![start];
        let mut worst: Option<(usize, Diagnostic)> = None;
        let mut visited = 0usize;
        while let Some(mut sim) = stack.pop() {
            let failure = loop {
                visited += 1;
                if visited > SEARCH_LIMIT {
                    return Err(Diagnostic::SearchLimit);
                }
                while sim.i < self.output.len() && sim.consumed[sim.i] {
                    sim.i += 1;
                }
                if sim.i == self.output.len() {
                    let missing: Vec<usize> = (0..self.input.len()).filter(|&g| !self.is_done(&sim, g)).collect();
                    if missing.is_empty() {
                        return Ok(sim);
                    }
                    break Diagnostic::MissingGates {
                        count: missing.len(),
                        first: missing[0],
                    };
                }
                if let Step::Fail(d) = self.step(&mut sim, &mut stack) {
                    break d;
                }
            };
            if worst.as_ref().is_none_or(|(i, _)| sim.i > *i) {
                worst = Some((sim.i, failure));
            }
        }
        Err(worst.expect("at least one branch ran").1)
    }
}

/// Checks that `output`, run from `initial_mapping`, is a legal routing of
/// `input` on `coupling`: every two-qubit gate sits on an edge, and tracking
/// logical occupants through SWAPs (explicit or as three CX gates) replays
/// each input gate once, in dependency order. Reported metrics, if given,
/// must match the recomputed ones.
pub fn validate(
    input: &Circuit,
    coupling: &CouplingMap,
    output: &Circuit,
    initial_mapping: &[usize],
    reported: Option<&Metrics>,
) -> ValidationReport {
    let mut report = ValidationReport {
        diagnostics: Vec::new(),
        recomputed: None,
        final_mapping: None,
    };
    let np = coupling.num_physical();
    if output.num_qubits() > np {
        report.diagnostics.push(Diagnostic::BadOutput {
            reason: format!("{} wires on a {np}-qubit platform", output.num_qubits()),
        });
        return report;
    }
    if input.gates().iter().any(|g| matches!(g.operands, Operands::Swap(..))) {
        report.diagnostics.push(Diagnostic::BadOutput {
            reason: "input circuit contains swap gates".into(),
        });
        return report;
    }
    let mut occupant = vec![None; output.num_qubits()];
    let mapping_error = if initial_mapping.len() != input.num_qubits() {
        Some(format!(
            "{} entries for {} logical qubits",
            initial_mapping.len(),
            input.num_qubits()
        ))
    } else {
        initial_mapping.iter().enumerate().find_map(|(q, &p)| {
            if p >= output.num_qubits() {
                Some(format!("qubit {q} placed on missing wire {p}"))
            } else if occupant[p].replace(q).is_some() {
                Some(format!("wire {p} assigned twice"))
            } else {
                None
            }
        })
    };
    if let Some(reason) = mapping_error {
        report.diagnostics.push(Diagnostic::BadInitialMapping { reason });
        return report;
    }

    if let Some((index, a, b)) = output.gates().iter().find_map(|g| match g.operands {
        Operands::Cx { control: a, target: b } | Operands::Swap(a, b) if !coupling.is_edge(a, b) => Some((g.id, a, b)),
        _ => None,
    }) {
        report.diagnostics.push(Diagnostic::Connectivity { index, a, b });
    }

    let mut seq = vec![Vec::new(); input.num_qubits()];
    for g in input.gates() {
        for q in g.qubits() {
            seq[q].push(g.id);
        }
    }
    let checker = Checker { input, output, seq };
    let start = Sim {
        i: 0,
        occupant,
        next: vec![0; input.num_qubits()],
        consumed: vec![false; output.len()],
        swaps: 0,
    };
    match checker.run(start) {
        Ok(sim) => {
            let mut fin = vec![0; input.num_qubits()];
            for (w, q) in sim.occupant.iter().enumerate() {
                if let Some(q) = q {
                    fin[*q] = w;
                }
            }
            report.final_mapping = Some(fin);
            let actual = Metrics::measure(output, sim.swaps);
            if let Some(rep) = reported {
                let fields = [
                    ("depth", rep.depth, actual.depth),
                    ("cx_depth", rep.cx_depth, actual.cx_depth),
                    ("swap_count", rep.swap_count, actual.swap_count),
                    ("cx_count", rep.cx_count, actual.cx_count),
                ];
                for (field, reported, actual) in fields {
                    if reported != actual {
                        report.diagnostics.push(Diagnostic::MetricMismatch {
                            field,
                            reported,
                            actual,
                        });
                    }
                }
            }
            report.recomputed = Some(actual);
        }
        Err(d) => report.diagnostics.push(d),
    }
    report
}
