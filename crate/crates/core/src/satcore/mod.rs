//! Incremental CNF sessions over an IPASIR-shaped backend, plus the
//! cardinality encodings used by the layout encoder.

mod cardinality;

pub use cardinality::{at_most_n, at_most_one, exactly_one, SequentialCounter, PAIRWISE_LIMIT};

use std::fmt;
use std::io::{self, Write};
use std::ops::Not;
use std::time::Instant;

use thiserror::Error;

/// A propositional variable. Ids start at 1, as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn id(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

/// A literal in DIMACS convention: `+v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl From<Var> for Lit {
    fn from(v: Var) -> Lit {
        v.pos()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The backend stopped early (deadline reached).
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("variable {0} was never allocated")]
    UnallocatedVar(u32),
    #[error("no model available: the last solve call was not satisfiable or the formula changed since")]
    NoModel,
    #[error("exactly-one over an empty literal set is unsatisfiable")]
    EmptyExactlyOne,
    #[error("variable limit exhausted")]
    VarLimit,
}

/// What a session needs from a SAT solver: persistent clauses, per-call
/// assumptions, post-SAT value queries and a termination hook.
pub trait Backend {
    fn reserve(&mut self, max_var: i32);
    fn add_clause(&mut self, lits: &[i32]);
    fn solve(&mut self, assumptions: &[i32]) -> SolveResult;
    /// Truth value of `lit` in the current model. Only called after `Sat`.
    fn value(&self, lit: i32) -> bool;
    fn set_deadline(&mut self, deadline: Option<Instant>);
}

struct Deadline(Option<Instant>);

impl cadical::Callbacks for Deadline {
    fn terminate(&mut self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// CaDiCaL through the `cadical` crate.
pub struct Cadical {
    solver: cadical::Solver<Deadline>,
}

impl Default for Cadical {
    fn default() -> Self {
        Cadical {
            solver: cadical::Solver::new(),
        }
    }
}

impl Backend for Cadical {
    fn reserve(&mut self, max_var: i32) {
        self.solver.reserve(max_var);
    }

    fn add_clause(&mut self, lits: &[i32]) {
        self.solver.add_clause(lits.iter().copied());
    }

    fn solve(&mut self, assumptions: &[i32]) -> SolveResult {
        match self.solver.solve_with(assumptions.iter().copied()) {
            Some(true) => SolveResult::Sat,
            Some(false) => SolveResult::Unsat,
            None => SolveResult::Interrupted,
        }
    }

    fn value(&self, lit: i32) -> bool {
        // CaDiCaL reports unconstrained variables as None; any value works.
        self.solver.value(lit).unwrap_or(false)
    }

    fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.solver.set_callbacks(deadline.map(|d| Deadline(Some(d))));
    }
}

/// A full assignment read back after a satisfiable call, indexed by variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn var(&self, v: Var) -> bool {
        self.values[v.0 as usize - 1]
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.var(l.var()) == l.is_positive()
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Unknown,
    Sat,
    Unsat,
}

#[derive(Debug, Default, Clone)]
struct Recording {
    clauses: Vec<Vec<i32>>,
    solves: Vec<Vec<i32>>,
}

/// One incremental CNF formula. Clauses persist for the life of the
/// session; assumptions apply to a single `solve` call.
pub struct Session<B: Backend = Cadical> {
    backend: B,
    num_vars: u32,
    num_clauses: usize,
    state: State,
    recording: Option<Recording>,
}

impl Session<Cadical> {
    pub fn new() -> Self {
        Session::with_backend(Cadical::default())
    }
}

impl Default for Session<Cadical> {
    fn default() -> Self {
        Self::new()
    }
}

impl<B: Backend> Session<B> {
    pub fn with_backend(backend: B) -> Self {
        Session {
            backend,
            num_vars: 0,
            num_clauses: 0,
            state: State::Unknown,
            recording: None,
        }
    }

    /// Keeps a copy of every clause and assumption set so the formula can be
    /// dumped as DIMACS later.
    pub fn record(&mut self) {
        self.recording.get_or_insert_with(Recording::default);
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.num_clauses
    }

    pub fn new_var(&mut self) -> Result<Var, SatError> {
        if self.num_vars >= i32::MAX as u32 - 1 {
            return Err(SatError::VarLimit);
        }
        self.num_vars += 1;
        self.backend.reserve(self.num_vars as i32);
        Ok(Var(self.num_vars))
    }

    fn check(&self, lits: &[Lit]) -> Result<(), SatError> {
        match lits.iter().find(|l| l.var().0 > self.num_vars || l.0 == 0) {
            Some(l) => Err(SatError::UnallocatedVar(l.var().0)),
            None => Ok(()),
        }
    }

    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<(), SatError> {
        self.check(lits)?;
        let raw: Vec<i32> = lits.iter().map(|l| l.0).collect();
        self.backend.add_clause(&raw);
        if let Some(r) = &mut self.recording {
            r.clauses.push(raw);
        }
        self.num_clauses += 1;
        self.state = State::Unknown;
        Ok(())
    }

    /// `a → b` as the clause `¬a ∨ b`.
    pub fn implies(&mut self, a: Lit, b: Lit) -> Result<(), SatError> {
        self.add_clause(&[!a, b])
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SatError> {
        self.check(assumptions)?;
        let raw: Vec<i32> = assumptions.iter().map(|l| l.0).collect();
        if let Some(r) = &mut self.recording {
            r.solves.push(raw.clone());
        }
        let res = self.backend.solve(&raw);
        self.state = match res {
            SolveResult::Sat => State::Sat,
            SolveResult::Unsat => State::Unsat,
            SolveResult::Interrupted => State::Unknown,
        };
        Ok(res)
    }

    pub fn value(&self, v: Var) -> Result<bool, SatError> {
        if self.state != State::Sat {
            return Err(SatError::NoModel);
        }
        if v.0 == 0 || v.0 > self.num_vars {
            return Err(SatError::UnallocatedVar(v.0));
        }
        Ok(self.backend.value(v.0 as i32))
    }

    /// Snapshot of every variable's value after a satisfiable call.
    pub fn model(&self) -> Result<Model, SatError> {
        if self.state != State::Sat {
            return Err(SatError::NoModel);
        }
        let values = (1..=self.num_vars).map(|v| self.backend.value(v as i32)).collect();
        Ok(Model { values })
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.backend.set_deadline(deadline);
    }

    /// Writes the recorded formula as DIMACS. Assumption sets of every
    /// solve call follow as trailing comments. Without [`Session::record`]
    /// only the header is written.
    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p cnf {} {}", self.num_vars, self.num_clauses)?;
        let Some(rec) = &self.recording else {
            return Ok(());
        };
        for c in &rec.clauses {
            for l in c {
                write!(out, "{l} ")?;
            }
            writeln!(out, "0")?;
        }
        writeln!(out, "c assumptions, one line per solve call")?;
        for (i, a) in rec.solves.iter().enumerate() {
            write!(out, "c solve {}:", i + 1)?;
            for l in a {
                write!(out, " {l}")?;
            }
            writeln!(out, " 0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_ids() {
        let mut s = Session::new();
        assert_eq!(s.new_var().unwrap().id(), 1);
        let a = s.new_var().unwrap();
        let b = s.new_var().unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn units() {
        let mut s = Session::new();
        let x = s.new_var().unwrap();
        s.add_clause(&[x.pos()]).unwrap();
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Sat);
        assert!(s.value(x).unwrap());
        s.add_clause(&[x.neg()]).unwrap();
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Unsat);
        assert_eq!(s.value(x), Err(SatError::NoModel));
    }

    #[test]
    fn empty_formula_is_sat() {
        let mut s = Session::new();
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Sat);
    }

    #[test]
    fn assumption_forces_other_disjunct() {
        let mut s = Session::new();
        let x = s.new_var().unwrap();
        let y = s.new_var().unwrap();
        s.add_clause(&[x.pos(), y.pos()]).unwrap();
        assert_eq!(s.solve(&[x.neg()]).unwrap(), SolveResult::Sat);
        assert!(s.value(y).unwrap());
        assert!(!s.value(x).unwrap());
        // assumptions do not persist
        assert_eq!(s.solve(&[y.neg()]).unwrap(), SolveResult::Sat);
        assert!(s.value(x).unwrap());
    }

    #[test]
    fn value_errors() {
        let mut s = Session::new();
        let x = s.new_var().unwrap();
        assert_eq!(s.value(x), Err(SatError::NoModel));
        s.solve(&[]).unwrap();
        assert_eq!(s.value(Var(7)), Err(SatError::UnallocatedVar(7)));
        s.add_clause(&[x.pos()]).unwrap();
        assert_eq!(s.value(x), Err(SatError::NoModel));
    }

    #[test]
    fn unallocated_var_rejected() {
        let mut s = Session::new();
        let _ = s.new_var().unwrap();
        assert_eq!(s.add_clause(&[Var(2).pos()]), Err(SatError::UnallocatedVar(2)));
        assert_eq!(s.solve(&[Var(5).neg()]), Err(SatError::UnallocatedVar(5)));
    }

    #[test]
    fn implication_chain_propagates() {
        let mut s = Session::new();
        let xs: Vec<Var> = (0..10).map(|_| s.new_var().unwrap()).collect();
        for w in xs.windows(2) {
            s.implies(w[0].pos(), w[1].pos()).unwrap();
        }
        assert_eq!(s.solve(&[xs[0].pos()]).unwrap(), SolveResult::Sat);
        let m = s.model().unwrap();
        assert!(xs.iter().all(|&v| m.var(v)));
    }

    #[allow(clippy::needless_range_loop)]
    fn pigeonhole(s: &mut Session, pigeons: usize, holes: usize) {
        let x: Vec<Vec<Var>> = (0..pigeons)
            .map(|_| (0..holes).map(|_| s.new_var().unwrap()).collect())
            .collect();
        for row in &x {
            let c: Vec<Lit> = row.iter().map(|v| v.pos()).collect();
            s.add_clause(&c).unwrap();
        }
        for h in 0..holes {
            for a in 0..pigeons {
                for b in a + 1..pigeons {
                    s.add_clause(&[x[a][h].neg(), x[b][h].neg()]).unwrap();
                }
            }
        }
    }

    #[test]
    fn pigeonhole_4_3_unsat() {
        let mut s = Session::new();
        pigeonhole(&mut s, 4, 3);
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Unsat);
        let mut s = Session::new();
        pigeonhole(&mut s, 3, 3);
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Sat);
    }

    #[test]
    fn expired_deadline_interrupts() {
        let mut s = Session::new();
        pigeonhole(&mut s, 11, 10);
        s.set_deadline(Some(Instant::now()));
        assert_eq!(s.solve(&[]).unwrap(), SolveResult::Interrupted);
        assert_eq!(s.model(), Err(SatError::NoModel));
    }

    #[test]
    fn dimacs_dump() {
        let mut s = Session::new();
        s.record();
        let x = s.new_var().unwrap();
        let y = s.new_var().unwrap();
        s.add_clause(&[x.pos(), y.neg()]).unwrap();
        s.solve(&[y.pos()]).unwrap();
        let mut buf = Vec::new();
        s.write_dimacs(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "p cnf 2 1\n1 -2 0\nc assumptions, one line per solve call\nc solve 1: 2 0\n"
        );
    }
}
