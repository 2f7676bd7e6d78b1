//! Incremental SAT encoding of depth-optimal layout synthesis.
//!
//! Every time step `t >= 1` gets mapping, connectivity, gate and SWAP
//! constraints. A SWAP variable `sw^t` marks the last of the three steps
//! `t-2..t` a SWAP occupies; the mapping flips between `t-1` and `t`.

mod registry;

pub use registry::{VarKey, VariableRegistry};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{self, Circuit, DependencyGraph, GateKind, Operands};
use crate::coupling::CouplingMap;
use crate::satcore::{
    at_most_n, at_most_one, exactly_one, Lit, Model, SatError, SequentialCounter, Session, SolveResult, Var,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Goal {
    Depth,
    CxDepth,
}

impl Goal {
    pub fn as_str(self) -> &'static str {
        match self {
            Goal::Depth => "depth",
            Goal::CxDepth => "cx-depth",
        }
    }
}

impl std::str::FromStr for Goal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "depth" => Ok(Goal::Depth),
            "cx-depth" | "cx_depth" => Ok(Goal::CxDepth),
            _ => Err(format!("unknown goal `{s}` (expected depth or cx-depth)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOptions {
    pub goal: Goal,
    /// Allow SWAPs with one unoccupied endpoint.
    pub ancillary: bool,
    pub minimize_swaps: bool,
    pub timeout: Option<Duration>,
    /// Reuse one session across horizons; otherwise build a fresh one per `t`.
    pub incremental: bool,
    /// Keep a copy of every clause for DIMACS export.
    pub record_cnf: bool,
}

impl Default for EncoderOptions {
    fn default() -> Self {
        EncoderOptions {
            goal: Goal::Depth,
            ancillary: true,
            minimize_swaps: false,
            timeout: None,
            incremental: true,
            record_cnf: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("circuit has {logical} qubits but the platform only {physical}")]
    TooManyQubits { logical: usize, physical: usize },
    #[error("coupling graph is not connected")]
    Disconnected,
    #[error("input circuit contains a swap gate")]
    SwapInInput,
    #[error("goal cx-depth expects a circuit without unary gates")]
    UnaryWithCxGoal,
    #[error("goal assumption requested for t={t} below the lower bound {lower_bound}")]
    BelowLowerBound { t: usize, lower_bound: usize },
    #[error("time step {0} has not been encoded")]
    StepMissing(usize),
    #[error("timed out; UNSAT through t={unsat_through} (lower bound {lower_bound})")]
    Timeout { unsat_through: usize, lower_bound: usize },
    #[error(transparent)]
    Sat(#[from] SatError),
}

impl EncodeError {
    /// Largest horizon known to be infeasible plus one, for timeouts.
    pub fn bound_reached(&self) -> Option<usize> {
        match self {
            EncodeError::Timeout {
                unsat_through,
                lower_bound,
            } => Some((*unsat_through + 1).max(*lower_bound)),
            _ => None,
        }
    }
}

/// One incremental encoding of a circuit on a platform.
pub struct EncodingState {
    session: Session,
    registry: VariableRegistry,
    circuit: Circuit,
    deps: DependencyGraph,
    coupling: CouplingMap,
    lower_bound: usize,
    makespan: usize,
    all_swap_vars: Vec<Var>,
    options: EncoderOptions,
    deadline: Option<Instant>,
    solve_time: Duration,
}

impl EncodingState {
    pub fn new(circuit: &Circuit, coupling: &CouplingMap, options: EncoderOptions) -> Result<Self, EncodeError> {
        if circuit.num_qubits() > coupling.num_physical() {
            return Err(EncodeError::TooManyQubits {
                logical: circuit.num_qubits(),
                physical: coupling.num_physical(),
            });
        }
        if !coupling.is_connected() {
            return Err(EncodeError::Disconnected);
        }
        if circuit.gates().iter().any(|g| g.kind() == GateKind::Swap) {
            return Err(EncodeError::SwapInInput);
        }
        if options.goal == Goal::CxDepth && circuit.gates().iter().any(|g| g.is_unary()) {
            return Err(EncodeError::UnaryWithCxGoal);
        }
        let lower_bound = match options.goal {
            Goal::Depth => circuit::depth(circuit),
            Goal::CxDepth => circuit::cx_depth(circuit),
        };
        let mut pairs: Vec<(usize, usize)> = circuit
            .gates()
            .iter()
            .filter_map(|g| match g.operands {
                Operands::Cx { control, target } => Some((control.min(target), control.max(target))),
                _ => None,
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let registry = VariableRegistry::new(
            circuit.num_qubits(),
            coupling.num_physical(),
            circuit.len(),
            pairs,
            coupling.edges().to_vec(),
        );
        let mut session = Session::new();
        if options.record_cnf {
            session.record();
        }
        let deadline = options.timeout.map(|d| Instant::now() + d);
        session.set_deadline(deadline);
        Ok(EncodingState {
            session,
            registry,
            circuit: circuit.clone(),
            deps: circuit::dependency_graph(circuit),
            coupling: coupling.clone(),
            lower_bound,
            makespan: 0,
            all_swap_vars: Vec::new(),
            options,
            deadline,
            solve_time: Duration::ZERO,
        })
    }

    pub fn registry(&self) -> &VariableRegistry {
        &self.registry
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn coupling(&self) -> &CouplingMap {
        &self.coupling
    }

    pub fn options(&self) -> &EncoderOptions {
        &self.options
    }

    /// Depth (or CX-depth) of the input: no horizon below it can succeed.
    pub fn lower_bound(&self) -> usize {
        self.lower_bound
    }

    pub fn makespan(&self) -> usize {
        self.makespan
    }

    pub fn all_swap_vars(&self) -> &[Var] {
        &self.all_swap_vars
    }

    /// Wall time spent inside solver calls.
    pub fn solve_time(&self) -> Duration {
        self.solve_time
    }

    /// Overrides the deadline set from `options.timeout`.
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
        self.session.set_deadline(deadline);
    }

    /// Allocates step `makespan + 1` and adds all its constraints.
    pub fn push_step(&mut self) -> Result<usize, EncodeError> {
        let t = self.registry.allocate_step(&mut self.session)?;
        self.add_mapping_constraints(t)?;
        self.add_connectivity_constraints(t)?;
        self.add_gate_constraints(t)?;
        self.add_swap_constraints(t)?;
        for e in 0..self.registry.edges().len() {
            self.all_swap_vars.push(self.registry.sw(t, e));
        }
        self.makespan = t;
        Ok(t)
    }

    fn add_mapping_constraints(&mut self, t: usize) -> Result<(), SatError> {
        let (nq, np) = (self.registry.num_logical(), self.registry.num_physical());
        let s = &mut self.session;
        let r = &self.registry;
        for q in 0..nq {
            let row: Vec<Lit> = (0..np).map(|p| r.mp(t, q, p).pos()).collect();
            exactly_one(s, &row)?;
        }
        for p in 0..np {
            let col: Vec<Lit> = (0..nq).map(|q| r.mp(t, q, p).pos()).collect();
            at_most_one(s, &col)?;
            let oc = r.oc(t, p).pos();
            for &m in &col {
                s.implies(m, oc)?;
            }
            let mut clause = vec![!oc];
            clause.extend(&col);
            s.add_clause(&clause)?;
        }
        Ok(())
    }

    fn add_connectivity_constraints(&mut self, t: usize) -> Result<(), SatError> {
        let np = self.registry.num_physical();
        let s = &mut self.session;
        let r = &self.registry;
        for &(q, q2) in r.pairs() {
            let e = r.e(t, q, q2).expect("pair registered").pos();
            for p in 0..np {
                for p2 in 0..np {
                    if p == p2 {
                        continue;
                    }
                    let head = if self.coupling.is_edge(p, p2) { e } else { !e };
                    s.add_clause(&[r.mp(t, q, p).neg(), r.mp(t, q2, p2).neg(), head])?;
                }
            }
        }
        for g in self.circuit.gates() {
            if let Operands::Cx { control, target } = g.operands {
                let e = r.e(t, control, target).expect("pair registered");
                s.implies(r.c(t, g.id).pos(), e.pos())?;
            }
        }
        Ok(())
    }

    fn add_gate_constraints(&mut self, t: usize) -> Result<(), SatError> {
        let np = self.registry.num_physical();
        let s = &mut self.session;
        let r = &self.registry;
        let n = self.circuit.len();
        for g in 0..n {
            let (c, a, d) = (r.c(t, g).pos(), r.a(t, g).pos(), r.d(t, g).pos());
            exactly_one(s, &[c, a, d])?;
            if t == 1 {
                s.add_clause(&[!a])?;
            }
            for &h in &self.deps.succ[g] {
                let dh = r.d(t, h).pos();
                s.implies(c, dh)?;
                s.implies(d, dh)?;
            }
            for &h in &self.deps.pred[g] {
                let ah = r.a(t, h).pos();
                s.implies(c, ah)?;
                s.implies(a, ah)?;
            }
            if t >= 2 {
                let (c1, a1, d1) = (r.c(t - 1, g).pos(), r.a(t - 1, g).pos(), r.d(t - 1, g).pos());
                s.implies(c1, a)?;
                s.implies(a1, a)?;
                s.add_clause(&[!a, c1, a1])?;
                s.add_clause(&[!d1, c, d])?;
                s.implies(c, d1)?;
                s.implies(d, d1)?;
            }
            for &h in &self.deps.full_succ[g] {
                s.add_clause(&[!c, r.c(t, h).neg()])?;
            }
            for q in self.circuit.gate(g).qubits() {
                for p in 0..np {
                    s.add_clause(&[!c, r.mp(t, q, p).neg(), r.u(t, p).pos()])?;
                }
            }
        }
        Ok(())
    }

    fn add_swap_constraints(&mut self, t: usize) -> Result<(), SatError> {
        let (nq, np) = (self.registry.num_logical(), self.registry.num_physical());
        let s = &mut self.session;
        let r = &self.registry;
        let window: Vec<usize> = (t.saturating_sub(2).max(1)..=t).collect();
        for p in 0..np {
            let mut lits: Vec<Lit> = Vec::new();
            for &t2 in &window {
                lits.extend(r.swap_set(t2, p).into_iter().map(Var::pos));
            }
            at_most_one(s, &lits)?;

            let st = r.st(t, p).pos();
            for &t2 in &window {
                s.add_clause(&[!st, r.u(t2, p).neg()])?;
            }
            let here: Vec<Lit> = r.swap_set(t, p).into_iter().map(Var::pos).collect();
            for &w in &here {
                s.implies(w, st)?;
            }
            let mut clause = vec![!st];
            clause.extend(&here);
            s.add_clause(&clause)?;

            if t >= 2 {
                for q in 0..nq {
                    let (before, after) = (r.mp(t - 1, q, p).pos(), r.mp(t, q, p).pos());
                    s.add_clause(&[st, !before, after])?;
                    s.add_clause(&[st, before, !after])?;
                }
            }
        }
        for (i, &(p, p2)) in r.edges().iter().enumerate() {
            let sw = r.sw(t, i).pos();
            if t <= 3 {
                s.add_clause(&[!sw])?;
                continue;
            }
            let (oc, oc2) = (r.oc(t, p).pos(), r.oc(t, p2).pos());
            if self.options.ancillary {
                s.add_clause(&[!sw, oc, oc2])?;
            } else {
                s.implies(sw, oc)?;
                s.implies(sw, oc2)?;
            }
            for q in 0..nq {
                for (from, to) in [(p, p2), (p2, p)] {
                    let (before, after) = (r.mp(t - 1, q, from).pos(), r.mp(t, q, to).pos());
                    s.add_clause(&[!sw, !before, after])?;
                    s.add_clause(&[!sw, before, !after])?;
                }
            }
        }
        Ok(())
    }

    /// Adds `asm^t → ¬d^t(g)` for every gate and returns `asm^t`.
    pub fn add_goal_assumption(&mut self, t: usize) -> Result<Lit, EncodeError> {
        if t < self.lower_bound {
            return Err(EncodeError::BelowLowerBound {
                t,
                lower_bound: self.lower_bound,
            });
        }
        if t == 0 || t > self.makespan {
            return Err(EncodeError::StepMissing(t));
        }
        if let Some(v) = self.registry.asm(t) {
            return Ok(v.pos());
        }
        let asm = self.session.new_var()?;
        for g in 0..self.circuit.len() {
            let d = self.registry.d(t, g);
            self.session.implies(asm.pos(), d.neg())?;
        }
        self.registry.add_asm(t, asm);
        Ok(asm.pos())
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, EncodeError> {
        let start = Instant::now();
        let result = self.session.solve(assumptions);
        self.solve_time += start.elapsed();
        Ok(result?)
    }

    fn deadline_passed(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Number of true SWAP variables in `model`.
    pub fn swap_count(&self, model: &Model) -> usize {
        self.all_swap_vars.iter().filter(|&&v| model.var(v)).count()
    }

    pub fn write_dimacs<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        self.session.write_dimacs(out)
    }
}

/// The first satisfiable horizon and its model.
pub struct Solved {
    pub state: EncodingState,
    pub model: Model,
    pub makespan: usize,
}

/// Deepens the horizon until the goal assumption becomes satisfiable.
pub fn solve_optimal(
    circuit: &Circuit,
    coupling: &CouplingMap,
    options: &EncoderOptions,
) -> Result<Solved, EncodeError> {
    if options.incremental {
        solve_incremental(circuit, coupling, options)
    } else {
        solve_fresh(circuit, coupling, options)
    }
}

fn solve_incremental(
    circuit: &Circuit,
    coupling: &CouplingMap,
    options: &EncoderOptions,
) -> Result<Solved, EncodeError> {
    let mut st = EncodingState::new(circuit, coupling, options.clone())?;
    let start = st.lower_bound.max(1);
    let timeout = |unsat_through: usize, lb: usize| EncodeError::Timeout {
        unsat_through,
        lower_bound: lb,
    };
    let mut unsat_through = start - 1;
    loop {
        if st.deadline_passed() {
            return Err(timeout(unsat_through, st.lower_bound));
        }
        let t = st.push_step()?;
        if t < start {
            continue;
        }
        let asm = st.add_goal_assumption(t)?;
        log::debug!("solving at t={t}");
        match st.solve(&[asm])? {
            SolveResult::Sat => {
                let model = st.session.model()?;
                return Ok(Solved {
                    state: st,
                    model,
                    makespan: t,
                });
            }
            SolveResult::Unsat => {
                st.session.add_clause(&[!asm])?;
                unsat_through = t;
            }
            SolveResult::Interrupted => return Err(timeout(unsat_through, st.lower_bound)),
        }
    }
}

fn solve_fresh(circuit: &Circuit, coupling: &CouplingMap, options: &EncoderOptions) -> Result<Solved, EncodeError> {
    let probe = EncodingState::new(circuit, coupling, options.clone())?;
    let deadline = probe.deadline;
    let lower_bound = probe.lower_bound;
    let mut solve_time = Duration::ZERO;
    let mut t = lower_bound.max(1);
    loop {
        let timeout = EncodeError::Timeout {
            unsat_through: t - 1,
            lower_bound,
        };
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(timeout);
        }
        let mut st = EncodingState::new(circuit, coupling, options.clone())?;
        st.set_deadline(deadline);
        while st.makespan < t {
            st.push_step()?;
        }
        let asm = st.add_goal_assumption(t)?;
        let result = st.solve(&[asm])?;
        solve_time += st.solve_time;
        match result {
            SolveResult::Sat => {
                let model = st.session.model()?;
                st.solve_time = solve_time;
                return Ok(Solved {
                    state: st,
                    model,
                    makespan: t,
                });
            }
            SolveResult::Unsat => t += 1,
            SolveResult::Interrupted => return Err(timeout),
        }
    }
}

/// Outcome of SWAP minimization at a fixed makespan.
#[derive(Debug, Clone)]
pub struct SwapMinimization {
    pub model: Model,
    pub initial_swaps: usize,
    pub swaps: usize,
    /// Bound `swaps - 1` was shown UNSAT (always true when `swaps == 0`).
    pub proven_minimal: bool,
    /// Every bound that was tried and refuted.
    pub unsat_bounds: Vec<usize>,
}

/// Lowers the SWAP count at the solved makespan one bound at a time until
/// the session refutes the next bound.
pub fn minimize_swaps(st: &mut EncodingState, model: Model) -> Result<SwapMinimization, EncodeError> {
    let t = st.makespan;
    let asm = st.registry.asm(t).ok_or(EncodeError::StepMissing(t))?.pos();
    let initial = st.swap_count(&model);
    let mut best = model;
    let mut swaps = initial;
    let mut unsat_bounds = Vec::new();
    if initial == 0 {
        return Ok(SwapMinimization {
            model: best,
            initial_swaps: 0,
            swaps: 0,
            proven_minimal: true,
            unsat_bounds,
        });
    }
    let lits: Vec<Lit> = st.all_swap_vars.iter().map(|v| v.pos()).collect();
    let counter: SequentialCounter = at_most_n(&mut st.session, initial - 1, &lits)?;
    let mut proven = false;
    while swaps > 0 {
        let bound = swaps - 1;
        let guard = st.session.new_var()?;
        st.registry.add_sasm(bound, guard);
        counter.enforce(&mut st.session, Some(guard.pos()), bound)?;
        match st.solve(&[asm, guard.pos()])? {
            SolveResult::Sat => {
                best = st.session.model()?;
                let found = st.swap_count(&best);
                debug_assert!(found <= bound);
                swaps = found;
            }
            SolveResult::Unsat => {
                unsat_bounds.push(bound);
                proven = true;
                break;
            }
            SolveResult::Interrupted => break,
        }
    }
    Ok(SwapMinimization {
        model: best,
        initial_swaps: initial,
        swaps,
        proven_minimal: proven || swaps == 0,
        unsat_bounds,
    })
}
