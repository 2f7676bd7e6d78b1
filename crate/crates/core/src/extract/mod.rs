//! Turning models into mapped circuits, and checking mapped circuits.

mod validate;

pub use validate::{validate, Diagnostic, ValidationReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{self, Circuit, Gate, Operands, UnaryAnchor};
use crate::encoder::EncodingState;
use crate::satcore::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapStyle {
    /// One `swap` gate per SWAP.
    SwapGate,
    /// `cx p,p'; cx p',p; cx p,p'`.
    #[default]
    ThreeCx,
}

impl std::str::FromStr for SwapStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "swap-gate" | "swap" => Ok(SwapStyle::SwapGate),
            "three-cx" | "cx" => Ok(SwapStyle::ThreeCx),
            _ => Err(format!("unknown swap style `{s}` (expected swap-gate or three-cx)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepSchedule {
    /// Input gate ids applied at this step.
    pub gates: Vec<usize>,
    /// Edges `(p, p2)` whose SWAP finishes at this step.
    pub swaps: Vec<(usize, usize)>,
}

/// A decoded schedule. `mappings[t - 1]` is the logical-to-physical map at
/// step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedResult {
    pub circuit: Circuit,
    pub num_physical: usize,
    pub makespan: usize,
    pub initial_mapping: Vec<usize>,
    pub final_mapping: Vec<usize>,
    pub mappings: Vec<Vec<usize>>,
    pub schedule: Vec<StepSchedule>,
}

impl MappedResult {
    pub fn swap_count(&self) -> usize {
        self.schedule.iter().map(|s| s.swaps.len()).sum()
    }

    /// Step at which input gate `g` runs.
    pub fn gate_step(&self, g: usize) -> Option<usize> {
        self.schedule.iter().position(|s| s.gates.contains(&g)).map(|i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("step {t}: logical qubit {q} is not placed exactly once")]
    Placement { t: usize, q: usize },
    #[error("step {t}: physical qubit {p} hosts two logical qubits")]
    NotInjective { t: usize, p: usize },
    #[error("gate {g} is applied {count} times")]
    GateCount { g: usize, count: usize },
    #[error("step {t}: mapping differs from replaying the SWAPs")]
    Replay { t: usize },
    #[error("unary gate {gate} has no consistent anchor")]
    Anchor { gate: String },
}

/// Reads the schedule out of a model at the state's current makespan.
pub fn decode_model(st: &EncodingState, model: &Model) -> Result<MappedResult, DecodeError> {
    let r = st.registry();
    let (nq, np, makespan) = (r.num_logical(), r.num_physical(), st.makespan());
    let mut mappings = Vec::with_capacity(makespan);
    let mut schedule = Vec::with_capacity(makespan);
    for t in 1..=makespan {
        let mut mapping = Vec::with_capacity(nq);
        let mut used = vec![false; np];
        for q in 0..nq {
            let places: Vec<usize> = (0..np).filter(|&p| model.var(r.mp(t, q, p))).collect();
            let [p] = places[..] else {
                return Err(DecodeError::Placement { t, q });
            };
            if std::mem::replace(&mut used[p], true) {
                return Err(DecodeError::NotInjective { t, p });
            }
            mapping.push(p);
        }
        mappings.push(mapping);
        let gates = (0..st.circuit().len()).filter(|&g| model.var(r.c(t, g))).collect();
        let swaps = r
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| model.var(r.sw(t, e)))
            .map(|(_, &edge)| edge)
            .collect();
        schedule.push(StepSchedule { gates, swaps });
    }
    for g in 0..st.circuit().len() {
        let count = schedule.iter().filter(|s| s.gates.contains(&g)).count();
        if count != 1 {
            return Err(DecodeError::GateCount { g, count });
        }
    }
    for t in 2..=makespan {
        let mut replay = mappings[t - 2].clone();
        for &(a, b) in &schedule[t - 1].swaps {
            for p in replay.iter_mut() {
                if *p == a {
                    *p = b;
                } else if *p == b {
                    *p = a;
                }
            }
        }
        if replay != mappings[t - 1] {
            return Err(DecodeError::Replay { t });
        }
    }
    Ok(MappedResult {
        circuit: st.circuit().clone(),
        num_physical: np,
        makespan,
        initial_mapping: mappings.first().cloned().unwrap_or_default(),
        final_mapping: mappings.last().cloned().unwrap_or_default(),
        mappings,
        schedule,
    })
}

/// Sort key for emitted gates: step, then SWAP parts before input gates
/// before reinserted unary gates, then insertion order.
type Slot = (usize, u8, usize);

fn place(r: &MappedResult, g: &Gate, t: usize) -> Operands {
    let m = &r.mappings[t - 1];
    match g.operands {
        Operands::Unary(q) => Operands::Unary(m[q]),
        Operands::Cx { control, target } => Operands::Cx {
            control: m[control],
            target: m[target],
        },
        Operands::Swap(a, b) => Operands::Swap(m[a], m[b]),
    }
}

fn scheduled_events(r: &MappedResult, style: SwapStyle) -> Vec<(Slot, Gate)> {
    let mut events = Vec::new();
    let gate = |name: &str, operands| Gate {
        id: 0,
        name: name.to_string(),
        operands,
        params: Vec::new(),
    };
    for (i, step) in r.schedule.iter().enumerate() {
        let t = i + 1;
        for &(p, p2) in &step.swaps {
            match style {
                SwapStyle::SwapGate => {
                    events.push(((t - 2, 0, events.len()), gate("swap", Operands::Swap(p, p2))));
                }
                SwapStyle::ThreeCx => {
                    for (dt, (c, tg)) in [(2, (p, p2)), (1, (p2, p)), (0, (p, p2))] {
                        let ops = Operands::Cx { control: c, target: tg };
                        events.push(((t - dt, 0, events.len()), gate("cx", ops)));
                    }
                }
            }
        }
        for &g in &step.gates {
            let src = r.circuit.gate(g);
            let mut out = src.clone();
            out.operands = place(r, src, t);
            events.push(((t, 1, events.len()), out));
        }
    }
    events
}

fn build(num_physical: usize, mut events: Vec<(Slot, Gate)>) -> Circuit {
    events.sort_by_key(|(slot, _)| *slot);
    let mut c = Circuit::new(num_physical);
    for (_, g) in &events {
        c.push_gate(g).expect("scheduled gate fits the platform");
    }
    c
}

/// Lays the schedule out over physical qubits, step by step.
pub fn emit_mapped_circuit(r: &MappedResult, style: SwapStyle) -> Circuit {
    build(r.num_physical, scheduled_events(r, style))
}

/// Emits the schedule with the unary gates removed by
/// [`circuit::strip_unary`] placed back right after the CX that precedes
/// them on their qubit (or at the very start).
pub fn reinsert_unary(r: &MappedResult, anchors: &[UnaryAnchor], style: SwapStyle) -> Result<Circuit, DecodeError> {
    let mut events = scheduled_events(r, style);
    for (order, a) in anchors.iter().enumerate() {
        let bad = || DecodeError::Anchor {
            gate: a.gate.to_string(),
        };
        let (slot, t) = match a.prev_cx {
            Some(cx) => {
                let t = r.gate_step(cx).ok_or_else(bad)?;
                if !r.circuit.gate(cx).acts_on(a.qubit) {
                    return Err(bad());
                }
                ((t, 2, order), t)
            }
            None => ((0, 0, order), 1),
        };
        if let Some(next) = a.next_cx {
            let tn = r.gate_step(next).ok_or_else(bad)?;
            if a.prev_cx.is_some() && tn <= t {
                return Err(bad());
            }
        }
        let wire = *r.mappings.get(t - 1).and_then(|m| m.get(a.qubit)).ok_or_else(bad)?;
        let mut g = a.gate.clone();
        g.operands = Operands::Unary(wire);
        events.push((slot, g));
    }
    Ok(build(r.num_physical, events))
}

/// Figures reported for a mapped circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub depth: usize,
    pub cx_depth: usize,
    pub swap_count: usize,
    pub cx_count: usize,
}

impl Metrics {
    /// `swap_count` is taken as given because three-CX SWAPs are not
    /// distinguishable from input CX gates by inspection.
    pub fn measure(c: &Circuit, swap_count: usize) -> Self {
        Metrics {
            depth: circuit::depth(c),
            cx_depth: circuit::cx_depth(c),
            swap_count,
            cx_count: c.cx_count() + 3 * c.swap_count(),
        }
    }
}
