//! Logical circuits: gate lists, dependency analysis and depth metrics.

mod qasm;

pub use qasm::{emit_qasm, parse_qasm, parse_qasm_with, ParseOptions, Parsed, QasmError};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Qubit operands of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operands {
    Unary(usize),
    Cx {
        control: usize,
        target: usize,
    },
    /// Only produced by the router; never accepted as input.
    Swap(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Unary,
    Cx,
    Swap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: usize,
    pub name: String,
    pub operands: Operands,
    pub params: Vec<f64>,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self.operands {
            Operands::Unary(_) => GateKind::Unary,
            Operands::Cx { .. } => GateKind::Cx,
            Operands::Swap(..) => GateKind::Swap,
        }
    }

    pub fn is_cx(&self) -> bool {
        matches!(self.operands, Operands::Cx { .. })
    }

    pub fn is_unary(&self) -> bool {
        matches!(self.operands, Operands::Unary(_))
    }

    /// Qubits in operand order (control first for CX).
    pub fn qubits(&self) -> Vec<usize> {
        match self.operands {
            Operands::Unary(q) => vec![q],
            Operands::Cx { control, target } => vec![control, target],
            Operands::Swap(a, b) => vec![a, b],
        }
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits().contains(&q)
    }

    /// Same mnemonic, parameters and operand shape, ignoring the id.
    pub fn same_operation(&self, other: &Gate) -> bool {
        self.name == other.name && self.operands == other.operands && self.params == other.params
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        match self.operands {
            Operands::Unary(q) => write!(f, " q[{q}]"),
            Operands::Cx { control, target } => write!(f, " q[{control}],q[{target}]"),
            Operands::Swap(a, b) => write!(f, " q[{a}],q[{b}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("two-qubit gate acts twice on qubit {0}")]
    RepeatedQubit(usize),
}

/// An ordered gate list over `num_qubits` qubits. Gate ids are dense and
/// follow program order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    pub fn swap_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind() == GateKind::Swap).count()
    }

    /// Appends a gate, returning its id.
    pub fn try_push(
        &mut self,
        name: impl Into<String>,
        operands: Operands,
        params: Vec<f64>,
    ) -> Result<usize, CircuitError> {
        let qs = match operands {
            Operands::Unary(q) => vec![q],
            Operands::Cx { control, target } => vec![control, target],
            Operands::Swap(a, b) => vec![a, b],
        };
        for &q in &qs {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(CircuitError::RepeatedQubit(qs[0]));
        }
        let id = self.gates.len();
        self.gates.push(Gate {
            id,
            name: name.into(),
            operands,
            params,
        });
        Ok(id)
    }

    /// Appends a copy of `gate` (its id is reassigned).
    pub fn push_gate(&mut self, gate: &Gate) -> Result<usize, CircuitError> {
        self.try_push(gate.name.clone(), gate.operands, gate.params.clone())
    }

    /// Appends a parameterless unary gate. Panics on an invalid qubit.
    pub fn unary(&mut self, name: &str, q: usize) -> &mut Self {
        self.try_push(name, Operands::Unary(q), Vec::new())
            .expect("invalid unary gate");
        self
    }

    /// Appends a CX gate. Panics on invalid operands.
    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.try_push("cx", Operands::Cx { control, target }, Vec::new())
            .expect("invalid cx gate");
        self
    }

    /// Appends a SWAP gate. Panics on invalid operands.
    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.try_push("swap", Operands::Swap(a, b), Vec::new())
            .expect("invalid swap gate");
        self
    }

    /// Compares gate lists and qubit counts, ignoring nothing but ids being
    /// equal by construction.
    pub fn structurally_eq(&self, other: &Circuit) -> bool {
        self.num_qubits == other.num_qubits
            && self.gates.len() == other.gates.len()
            && self.gates.iter().zip(&other.gates).all(|(a, b)| a.same_operation(b))
    }
}

/// Direct and transitive gate dependencies. Two gates depend on each other
/// iff they share a qubit; no commutation analysis is done.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub pred: Vec<Vec<usize>>,
    pub succ: Vec<Vec<usize>>,
    pub full_pred: Vec<Vec<usize>>,
    pub full_succ: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn len(&self) -> usize {
        self.pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pred.is_empty()
    }

    /// Whether `a` and `b` are ordered by the dependency relation.
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.full_pred[a].binary_search(&b).is_ok() || self.full_succ[a].binary_search(&b).is_ok()
    }
}

pub fn dependency_graph(c: &Circuit) -> DependencyGraph {
    let n = c.len();
    let mut pred = vec![Vec::new(); n];
    let mut succ = vec![Vec::new(); n];
    let mut last: Vec<Option<usize>> = vec![None; c.num_qubits()];
    for g in c.gates() {
        for q in g.qubits() {
            if let Some(p) = last[q] {
                if !pred[g.id].contains(&p) {
                    pred[g.id].push(p);
                    succ[p].push(g.id);
                }
            }
            last[q] = Some(g.id);
        }
    }
    for v in pred.iter_mut().chain(succ.iter_mut()) {
        v.sort_unstable();
    }

    // Program order is a topological order, so one forward and one backward
    // sweep give the closures.
    let mut reach_back: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for g in 0..n {
        for &p in &pred[g] {
            reach_back[g][p] = true;
            let (head, tail) = reach_back.split_at_mut(g);
            for (dst, &src) in tail[0].iter_mut().zip(&head[p]) {
                *dst |= src;
            }
        }
    }
    let mut full_pred = vec![Vec::new(); n];
    let mut full_succ = vec![Vec::new(); n];
    for (g, row) in reach_back.iter().enumerate() {
        for (p, &r) in row.iter().enumerate() {
            if r {
                full_pred[g].push(p);
                full_succ[p].push(g);
            }
        }
    }
    DependencyGraph {
        pred,
        succ,
        full_pred,
        full_succ,
    }
}

fn longest_path(c: &Circuit, weight: impl Fn(&Gate) -> usize) -> usize {
    let deps = dependency_graph(c);
    let mut finish = vec![0usize; c.len()];
    for g in c.gates() {
        let start = deps.pred[g.id].iter().map(|&p| finish[p]).max().unwrap_or(0);
        finish[g.id] = start + weight(g);
    }
    finish.into_iter().max().unwrap_or(0)
}

/// Longest path through the dependency DAG, counting every gate. A SWAP
/// counts as its three-CX decomposition.
pub fn depth(c: &Circuit) -> usize {
    longest_path(c, |g| match g.kind() {
        GateKind::Swap => 3,
        _ => 1,
    })
}

/// Longest chain of dependent CX gates. Unary gates connect chains but add
/// nothing.
pub fn cx_depth(c: &Circuit) -> usize {
    longest_path(c, |g| match g.kind() {
        GateKind::Unary => 0,
        GateKind::Cx => 1,
        GateKind::Swap => 3,
    })
}

/// A unary gate removed by [`strip_unary`], with the CX gates (ids in the
/// stripped circuit) that bracket it on its qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnaryAnchor {
    pub gate: Gate,
    pub qubit: usize,
    pub prev_cx: Option<usize>,
    pub next_cx: Option<usize>,
}

/// Removes unary gates, keeping CX gates in their original relative order.
pub fn strip_unary(c: &Circuit) -> (Circuit, Vec<UnaryAnchor>) {
    let mut cx_only = Circuit::new(c.num_qubits());
    let mut last_cx: Vec<Option<usize>> = vec![None; c.num_qubits()];
    let mut anchors: Vec<UnaryAnchor> = Vec::new();
    // anchors still waiting for a following CX, per qubit
    let mut open: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits()];
    for g in c.gates() {
        match g.operands {
            Operands::Unary(q) => {
                open[q].push(anchors.len());
                anchors.push(UnaryAnchor {
                    gate: g.clone(),
                    qubit: q,
                    prev_cx: last_cx[q],
                    next_cx: None,
                });
            }
            _ => {
                let id = cx_only.push_gate(g).expect("gate valid in source circuit");
                for q in g.qubits() {
                    for a in open[q].drain(..) {
                        anchors[a].next_cx = Some(id);
                    }
                    last_cx[q] = Some(id);
                }
            }
        }
    }
    (cx_only, anchors)
}
