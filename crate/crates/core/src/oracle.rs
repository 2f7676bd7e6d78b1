//! Exhaustive reference search for tiny instances.
//!
//! Schedules follow the same rules as the encoder but are enumerated
//! directly: a SWAP started at step `s >= 2` blocks both wires for steps
//! `s..=s+2` and exchanges their occupants from step `s+2` on. Every gate
//! that is ready, legal and on free wires is executed as soon as possible,
//! so only SWAP starts and the initial mapping are branched on.

use std::collections::HashMap;

use thiserror::Error;

use crate::circuit::{self, Circuit, GateKind};
use crate::coupling::CouplingMap;
use crate::encoder::Goal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle supports at most 128 gates, got {0}")]
    TooManyGates(usize),
    #[error("circuit has {logical} qubits but the platform only {physical}")]
    TooManyQubits { logical: usize, physical: usize },
    #[error("input circuit contains a swap gate")]
    SwapInInput,
}

#[derive(Debug, Clone)]
struct GateInfo {
    qubits: Vec<usize>,
    preds: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    /// Logical to physical, after every SWAP that has already finished.
    map: Vec<u8>,
    /// `(edge, last step)` of SWAPs in progress.
    inflight: Vec<(u8, usize)>,
    done: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    map: Vec<u8>,
    inflight: Vec<(u8, usize)>,
    done: u128,
    early: bool,
}

struct Search {
    num_physical: usize,
    gates: Vec<GateInfo>,
    /// Longest dependency chain starting at each gate, in steps.
    height: Vec<usize>,
    /// Gates acting on each logical qubit, as a mask.
    on_qubit: Vec<u128>,
    cx_pairs: Vec<(usize, usize, usize)>,
    edges: Vec<(usize, usize)>,
    dist: Vec<Vec<usize>>,
    all: u128,
    /// Largest number of remaining steps known to fail, per relative state.
    failed_steps: HashMap<Key, usize>,
    /// Largest SWAP budget known to fail, per state and absolute step.
    failed_budget: HashMap<(Key, usize), usize>,
}

impl Search {
    fn new(c: &Circuit, coupling: &CouplingMap) -> Result<Self, OracleError> {
        if c.len() > 128 {
            return Err(OracleError::TooManyGates(c.len()));
        }
        if c.num_qubits() > coupling.num_physical() {
            return Err(OracleError::TooManyQubits {
                logical: c.num_qubits(),
                physical: coupling.num_physical(),
            });
        }
        if c.gates().iter().any(|g| g.kind() == GateKind::Swap) {
            return Err(OracleError::SwapInInput);
        }
        let deps = circuit::dependency_graph(c);
        let gates: Vec<GateInfo> = c
            .gates()
            .iter()
            .map(|g| GateInfo {
                qubits: g.qubits(),
                preds: deps.pred[g.id].iter().fold(0u128, |m, &p| m | 1 << p),
            })
            .collect();
        let mut height = vec![1; c.len()];
        for g in (0..c.len()).rev() {
            for &s in &deps.succ[g] {
                height[g] = height[g].max(height[s] + 1);
            }
        }
        let mut on_qubit = vec![0u128; c.num_qubits()];
        let mut cx_pairs = Vec::new();
        for (i, g) in gates.iter().enumerate() {
            for &q in &g.qubits {
                on_qubit[q] |= 1 << i;
            }
            if let [a, b] = g.qubits[..] {
                cx_pairs.push((i, a, b));
            }
        }
        Ok(Search {
            num_physical: coupling.num_physical(),
            all: if c.is_empty() { 0 } else { u128::MAX >> (128 - c.len()) },
            gates,
            height,
            on_qubit,
            cx_pairs,
            edges: coupling.edges().to_vec(),
            dist: coupling.shortest_distances(),
            failed_steps: HashMap::new(),
            failed_budget: HashMap::new(),
        })
    }

    fn key(st: &State, t: usize) -> Key {
        Key {
            map: st.map.clone(),
            inflight: st.inflight.iter().map(|&(e, end)| (e, end - t)).collect(),
            done: st.done,
            early: t < 2,
        }
    }

    fn settled_map(&self, st: &State) -> Vec<u8> {
        let mut m = st.map.clone();
        for &(e, _) in &st.inflight {
            let (a, b) = self.edges[e as usize];
            for p in m.iter_mut() {
                if *p as usize == a {
                    *p = b as u8;
                } else if *p as usize == b {
                    *p = a as u8;
                }
            }
        }
        m
    }

    /// Admissible checks before processing step `t` of `horizon`. Returns the
    /// least number of further SWAPs needed, or `None` if hopeless.
    fn bound(&self, st: &State, t: usize, horizon: usize) -> Option<usize> {
        let steps_left = horizon + 1 - t;
        let pending = self.all & !st.done;
        let mut rest = pending;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.height[g] > steps_left {
                return None;
            }
        }
        // each qubit can ride at most one SWAP per three steps, and a SWAP
        // must end before the gate that needs it
        let moves = (horizon - t) / 3;
        let m = self.settled_map(st);
        let mut need = 0;
        for &(g, a, b) in &self.cx_pairs {
            if pending >> g & 1 == 1 {
                let d = self.dist[m[a] as usize][m[b] as usize];
                if d - 1 > 2 * moves {
                    return None;
                }
                need = need.max(d - 1);
            }
        }
        Some(need)
    }

    fn has_pending(&self, st: &State, q: usize) -> bool {
        self.on_qubit[q] & !st.done != 0
    }

    /// All sets of vertex-disjoint edges within `free`, each touching a
    /// qubit that still has gates.
    fn swap_sets(&self, st: &State, free: &[bool], occupant: &[Option<usize>], limit: usize) -> Vec<Vec<u8>> {
        let useful: Vec<u8> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(_, &(a, b))| {
                free[a]
                    && free[b]
                    && [a, b]
                        .iter()
                        .any(|&p| occupant[p].is_some_and(|q| self.has_pending(st, q)))
            })
            .map(|(i, _)| i as u8)
            .collect();
        let mut out = vec![Vec::new()];
        let mut stack: Vec<(usize, Vec<u8>, Vec<bool>)> = vec![(0, Vec::new(), vec![false; self.num_physical])];
        while let Some((from, chosen, used)) = stack.pop() {
            if chosen.len() == limit {
                continue;
            }
            for (i, &e) in useful.iter().enumerate().skip(from) {
                let (a, b) = self.edges[e as usize];
                if used[a] || used[b] {
                    continue;
                }
                let mut c = chosen.clone();
                c.push(e);
                let mut u = used.clone();
                u[a] = true;
                u[b] = true;
                out.push(c.clone());
                stack.push((i + 1, c, u));
            }
        }
        out
    }

    /// Processes step `t`. With `budget`, at most that many SWAPs may still
    /// start. Returns whether all gates can finish by `horizon`.
    fn dfs(&mut self, st: &State, t: usize, horizon: usize, budget: Option<usize>) -> bool {
        if st.done == self.all {
            return true;
        }
        if t > horizon {
            return false;
        }
        let Some(need) = self.bound(st, t, horizon) else {
            return false;
        };
        if budget.is_some_and(|b| need > b) {
            return false;
        }
        let key = Self::key(st, t);
        let steps_left = horizon + 1 - t;
        match budget {
            None => {
                if self.failed_steps.get(&key).is_some_and(|&r| r >= steps_left) {
                    return false;
                }
            }
            Some(b) => {
                if self.failed_budget.get(&(key.clone(), t)).is_some_and(|&f| f >= b) {
                    return false;
                }
            }
        }

        let mut map = st.map.clone();
        let mut blocked = vec![false; self.num_physical];
        let mut inflight = Vec::new();
        for &(e, end) in &st.inflight {
            let (a, b) = self.edges[e as usize];
            blocked[a] = true;
            blocked[b] = true;
            if end == t {
                for p in map.iter_mut() {
                    if *p as usize == a {
                        *p = b as u8;
                    } else if *p as usize == b {
                        *p = a as u8;
                    }
                }
            } else {
                inflight.push((e, end));
            }
        }
        let mut occupant = vec![None; self.num_physical];
        for (q, &p) in map.iter().enumerate() {
            occupant[p as usize] = Some(q);
        }
        let free: Vec<bool> = blocked.iter().map(|b| !b).collect();
        let can_start = t >= 2 && t + 3 <= horizon;
        let limit = budget.unwrap_or(usize::MAX);
        let sets = if can_start && limit > 0 {
            self.swap_sets(st, &free, &occupant, limit)
        } else {
            vec![Vec::new()]
        };

        let mut ok = false;
        for set in sets {
            let mut busy = blocked.clone();
            for &e in &set {
                let (a, b) = self.edges[e as usize];
                busy[a] = true;
                busy[b] = true;
            }
            let mut done = st.done;
            let mut rest = self.all & !st.done;
            while rest != 0 {
                let g = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let info = &self.gates[g];
                if info.preds & !st.done != 0 {
                    continue;
                }
                let wires: Vec<usize> = info.qubits.iter().map(|&q| map[q] as usize).collect();
                if wires.iter().any(|&w| busy[w]) {
                    continue;
                }
                if let [a, b] = wires[..] {
                    if self.dist[a][b] != 1 {
                        continue;
                    }
                }
                done |= 1 << g;
            }
            let mut next_inflight = inflight.clone();
            next_inflight.extend(set.iter().map(|&e| (e, t + 2)));
            next_inflight.sort_unstable();
            let next = State {
                map: map.clone(),
                inflight: next_inflight,
                done,
            };
            let next_budget = budget.map(|b| b - set.len());
            if self.dfs(&next, t + 1, horizon, next_budget) {
                ok = true;
                break;
            }
        }
        if !ok {
            match budget {
                None => {
                    let e = self.failed_steps.entry(key).or_insert(0);
                    *e = (*e).max(steps_left);
                }
                Some(b) => {
                    let e = self.failed_budget.entry((key, t)).or_insert(0);
                    *e = (*e).max(b);
                }
            }
        }
        ok
    }

    fn initial_maps(&self, nq: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(nq);
        let mut used = vec![false; self.num_physical];
        fn rec(nq: usize, np: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
            if cur.len() == nq {
                out.push(cur.clone());
                return;
            }
            for p in 0..np {
                if !used[p] {
                    used[p] = true;
                    cur.push(p as u8);
                    rec(nq, np, cur, used, out);
                    cur.pop();
                    used[p] = false;
                }
            }
        }
        rec(nq, self.num_physical, &mut cur, &mut used, &mut out);
        out
    }

    fn feasible(&mut self, nq: usize, horizon: usize, budget: Option<usize>) -> bool {
        self.initial_maps(nq).into_iter().any(|map| {
            let st = State {
                map,
                inflight: Vec::new(),
                done: 0,
            };
            self.dfs(&st, 1, horizon, budget)
        })
    }
}

fn prepare(c: &Circuit, goal: Goal) -> (Circuit, usize) {
    match goal {
        Goal::Depth => (c.clone(), circuit::depth(c)),
        Goal::CxDepth => {
            let (cx, _) = circuit::strip_unary(c);
            let d = circuit::cx_depth(&cx);
            (cx, d)
        }
    }
}

/// Least makespan of a legal schedule, or `None` if it exceeds `max_depth`.
/// For [`Goal::CxDepth`] unary gates are ignored.
pub fn optimal_depth_bruteforce(
    c: &Circuit,
    coupling: &CouplingMap,
    goal: Goal,
    max_depth: usize,
) -> Result<Option<usize>, OracleError> {
    let (c, lower) = prepare(c, goal);
    let mut search = Search::new(&c, coupling)?;
    if c.is_empty() {
        return Ok(Some(0));
    }
    for horizon in lower.max(1)..=max_depth {
        if search.feasible(c.num_qubits(), horizon, None) {
            return Ok(Some(horizon));
        }
    }
    Ok(None)
}

/// Fewest SWAPs in any legal schedule of at most `makespan` steps, or `None`
/// if no schedule fits.
pub fn min_swaps_at_makespan(
    c: &Circuit,
    coupling: &CouplingMap,
    goal: Goal,
    makespan: usize,
) -> Result<Option<usize>, OracleError> {
    let (c, _) = prepare(c, goal);
    let mut search = Search::new(&c, coupling)?;
    if c.is_empty() {
        return Ok(Some(0));
    }
    if !search.feasible(c.num_qubits(), makespan, None) {
        return Ok(None);
    }
    let mut budget = 0;
    while !search.feasible(c.num_qubits(), makespan, Some(budget)) {
        budget += 1;
    }
    Ok(Some(budget))
}
