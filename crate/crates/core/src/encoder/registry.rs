use std::collections::BTreeMap;

use crate::satcore::{Backend, SatError, Session, Var};

/// Identifies one encoding variable. Time steps start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    /// Logical `q` sits on physical `p`.
    Mp { t: usize, q: usize, p: usize },
    /// Physical `p` hosts some logical qubit.
    Oc { t: usize, p: usize },
    /// Logical pair `q < q2` sits on a coupling edge.
    E { t: usize, q: usize, q2: usize },
    /// Physical `p` is not part of a SWAP.
    U { t: usize, p: usize },
    /// Gate is applied at `t`.
    C { t: usize, g: usize },
    /// Gate was applied strictly before `t`.
    A { t: usize, g: usize },
    /// Gate is applied strictly after `t`.
    D { t: usize, g: usize },
    /// A SWAP on edge `(p, p2)`, `p < p2`, finishes at `t`.
    Sw { t: usize, p: usize, p2: usize },
    /// Physical `p` is touched by a SWAP finishing at `t`.
    St { t: usize, p: usize },
    /// `t` is the final time step.
    Asm { t: usize },
    /// At most `i` SWAPs in total.
    Sasm { i: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct StepVars {
    pub mp: Vec<Var>,
    pub oc: Vec<Var>,
    pub e: Vec<Var>,
    pub u: Vec<Var>,
    pub c: Vec<Var>,
    pub a: Vec<Var>,
    pub d: Vec<Var>,
    pub sw: Vec<Var>,
    pub st: Vec<Var>,
}

/// Maps encoding variables to solver variable ids, one block per time step.
#[derive(Debug, Clone)]
pub struct VariableRegistry {
    num_logical: usize,
    num_physical: usize,
    num_gates: usize,
    pairs: Vec<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    steps: Vec<StepVars>,
    asm: BTreeMap<usize, Var>,
    sasm: BTreeMap<usize, Var>,
}

impl VariableRegistry {
    /// `pairs` are the interacting logical pairs (`q < q2`); `edges` the
    /// coupling edges (`p < p2`).
    pub(crate) fn new(
        num_logical: usize,
        num_physical: usize,
        num_gates: usize,
        pairs: Vec<(usize, usize)>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut incident = vec![Vec::new(); num_physical];
        for (i, &(a, b)) in edges.iter().enumerate() {
            incident[a].push(i);
            incident[b].push(i);
        }
        VariableRegistry {
            num_logical,
            num_physical,
            num_gates,
            pairs,
            edges,
            incident,
            steps: Vec::new(),
            asm: BTreeMap::new(),
            sasm: BTreeMap::new(),
        }
    }

    pub(crate) fn allocate_step<B: Backend>(&mut self, s: &mut Session<B>) -> Result<usize, SatError> {
        let mut fresh = |n: usize| -> Result<Vec<Var>, SatError> { (0..n).map(|_| s.new_var()).collect() };
        let step = StepVars {
            mp: fresh(self.num_logical * self.num_physical)?,
            oc: fresh(self.num_physical)?,
            e: fresh(self.pairs.len())?,
            u: fresh(self.num_physical)?,
            c: fresh(self.num_gates)?,
            a: fresh(self.num_gates)?,
            d: fresh(self.num_gates)?,
            sw: fresh(self.edges.len())?,
            st: fresh(self.num_physical)?,
        };
        self.steps.push(step);
        Ok(self.steps.len())
    }

    pub(crate) fn add_asm(&mut self, t: usize, v: Var) {
        self.asm.insert(t, v);
    }

    pub(crate) fn add_sasm(&mut self, i: usize, v: Var) {
        self.sasm.insert(i, v);
    }

    pub(crate) fn step(&self, t: usize) -> &StepVars {
        &self.steps[t - 1]
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn num_logical(&self) -> usize {
        self.num_logical
    }

    pub fn num_physical(&self) -> usize {
        self.num_physical
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn mp(&self, t: usize, q: usize, p: usize) -> Var {
        self.step(t).mp[q * self.num_physical + p]
    }

    pub fn oc(&self, t: usize, p: usize) -> Var {
        self.step(t).oc[p]
    }

    pub fn u(&self, t: usize, p: usize) -> Var {
        self.step(t).u[p]
    }

    pub fn c(&self, t: usize, g: usize) -> Var {
        self.step(t).c[g]
    }

    pub fn a(&self, t: usize, g: usize) -> Var {
        self.step(t).a[g]
    }

    pub fn d(&self, t: usize, g: usize) -> Var {
        self.step(t).d[g]
    }

    /// SWAP variable by edge index.
    pub fn sw(&self, t: usize, edge: usize) -> Var {
        self.step(t).sw[edge]
    }

    pub fn st(&self, t: usize, p: usize) -> Var {
        self.step(t).st[p]
    }

    /// `e` variable of a logical pair, if the pair interacts.
    pub fn e(&self, t: usize, q: usize, q2: usize) -> Option<Var> {
        let key = (q.min(q2), q.max(q2));
        self.pairs.iter().position(|&pr| pr == key).map(|i| self.step(t).e[i])
    }

    pub fn asm(&self, t: usize) -> Option<Var> {
        self.asm.get(&t).copied()
    }

    pub fn sasm(&self, i: usize) -> Option<Var> {
        self.sasm.get(&i).copied()
    }

    /// Edge indices incident to physical `p`.
    pub fn incident_edges(&self, p: usize) -> &[usize] {
        &self.incident[p]
    }

    /// The SWAP variables at step `t` touching physical `p`; empty for steps
    /// that do not exist.
    pub fn swap_set(&self, t: usize, p: usize) -> Vec<Var> {
        if t == 0 || t > self.steps.len() {
            return Vec::new();
        }
        self.incident[p].iter().map(|&e| self.sw(t, e)).collect()
    }

    pub fn get(&self, key: VarKey) -> Option<Var> {
        let in_range = |t: usize| t >= 1 && t <= self.steps.len();
        match key {
            VarKey::Mp { t, q, p } if in_range(t) && q < self.num_logical && p < self.num_physical => {
                Some(self.mp(t, q, p))
            }
            VarKey::Oc { t, p } if in_range(t) && p < self.num_physical => Some(self.oc(t, p)),
            VarKey::E { t, q, q2 } if in_range(t) && q < q2 => self.e(t, q, q2),
            VarKey::U { t, p } if in_range(t) && p < self.num_physical => Some(self.u(t, p)),
            VarKey::C { t, g } if in_range(t) && g < self.num_gates => Some(self.c(t, g)),
            VarKey::A { t, g } if in_range(t) && g < self.num_gates => Some(self.a(t, g)),
            VarKey::D { t, g } if in_range(t) && g < self.num_gates => Some(self.d(t, g)),
            VarKey::Sw { t, p, p2 } if in_range(t) && p < p2 => {
                self.edges.binary_search(&(p, p2)).ok().map(|e| self.sw(t, e))
            }
            VarKey::St { t, p } if in_range(t) && p < self.num_physical => Some(self.st(t, p)),
            VarKey::Asm { t } => self.asm(t),
            VarKey::Sasm { i } => self.sasm(i),
            _ => None,
        }
    }

    /// Every registered key with its variable.
    pub fn entries(&self) -> Vec<(VarKey, Var)> {
        let mut out = Vec::new();
        for t in 1..=self.steps.len() {
            for q in 0..self.num_logical {
                for p in 0..self.num_physical {
                    out.push((VarKey::Mp { t, q, p }, self.mp(t, q, p)));
                }
            }
            for p in 0..self.num_physical {
                out.push((VarKey::Oc { t, p }, self.oc(t, p)));
                out.push((VarKey::U { t, p }, self.u(t, p)));
                out.push((VarKey::St { t, p }, self.st(t, p)));
            }
            for (i, &(q, q2)) in self.pairs.iter().enumerate() {
                out.push((VarKey::E { t, q, q2 }, self.step(t).e[i]));
            }
            for g in 0..self.num_gates {
                out.push((VarKey::C { t, g }, self.c(t, g)));
                out.push((VarKey::A { t, g }, self.a(t, g)));
                out.push((VarKey::D { t, g }, self.d(t, g)));
            }
            for (i, &(p, p2)) in self.edges.iter().enumerate() {
                out.push((VarKey::Sw { t, p, p2 }, self.sw(t, i)));
            }
        }
        out.extend(self.asm.iter().map(|(&t, &v)| (VarKey::Asm { t }, v)));
        out.extend(self.sasm.iter().map(|(&i, &v)| (VarKey::Sasm { i }, v)));
        out
    }
}
