use super::{Backend, Lit, SatError, Session};

/// Sets of at most this many literals get the pairwise at-most-one encoding;
/// larger sets use the ladder encoding.
pub const PAIRWISE_LIMIT: usize = 5;

pub fn at_most_one<B: Backend>(s: &mut Session<B>, lits: &[Lit]) -> Result<(), SatError> {
    if lits.len() <= PAIRWISE_LIMIT {
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                s.add_clause(&[!a, !b])?;
            }
        }
        return Ok(());
    }
    // ladder: prefix[i] is true once some literal among lits[..=i] is true
    let mut prev = lits[0];
    for (i, &x) in lits.iter().enumerate().skip(1) {
        s.add_clause(&[!x, !prev])?;
        if i + 1 < lits.len() {
            let next = s.new_var()?.pos();
            s.implies(prev, next)?;
            s.implies(x, next)?;
            prev = next;
        }
    }
    Ok(())
}

pub fn exactly_one<B: Backend>(s: &mut Session<B>, lits: &[Lit]) -> Result<(), SatError> {
    if lits.is_empty() {
        return Err(SatError::EmptyExactlyOne);
    }
    s.add_clause(lits)?;
    at_most_one(s, lits)
}

/// Sequential counter outputs: `outputs[k]` is forced true whenever at least
/// `k + 1` of the counted literals are true.
#[derive(Debug, Clone)]
pub struct SequentialCounter {
    outputs: Vec<Lit>,
    inputs: usize,
}

impl SequentialCounter {
    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs
    }

    /// The literal whose falsity caps the count at `bound`, or `None` when
    /// the bound is vacuous for this counter.
    pub fn bound_literal(&self, bound: usize) -> Option<Lit> {
        self.outputs.get(bound).copied()
    }

    /// Adds `guard → count ≤ bound` (unconditional without a guard).
    /// Bounds the counter cannot express are rejected by returning `false`.
    pub fn enforce<B: Backend>(&self, s: &mut Session<B>, guard: Option<Lit>, bound: usize) -> Result<bool, SatError> {
        if bound >= self.inputs {
            return Ok(true);
        }
        let Some(o) = self.bound_literal(bound) else {
            return Ok(false);
        };
        match guard {
            Some(g) => s.implies(g, !o)?,
            None => s.add_clause(&[!o])?,
        }
        Ok(true)
    }
}

/// Builds a sequential counter able to express every bound in `0..=n` over
/// `lits`. Nothing is enforced yet; see [`SequentialCounter::enforce`].
pub fn at_most_n<B: Backend>(s: &mut Session<B>, n: usize, lits: &[Lit]) -> Result<SequentialCounter, SatError> {
    let width = (n + 1).min(lits.len());
    let mut prev: Vec<Lit> = Vec::new();
    for (i, &x) in lits.iter().enumerate() {
        let len = (i + 1).min(width);
        let mut cur = Vec::with_capacity(len);
        for k in 0..len {
            let r = s.new_var()?.pos();
            if k == 0 {
                s.implies(x, r)?;
            } else {
                s.add_clause(&[!x, !prev[k - 1], r])?;
            }
            if k < prev.len() {
                s.implies(prev[k], r)?;
            }
            cur.push(r);
        }
        prev = cur;
    }
    Ok(SequentialCounter {
        outputs: prev,
        inputs: lits.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satcore::{SolveResult, Var};

    fn vars(s: &mut Session, n: usize) -> Vec<Var> {
        (0..n).map(|_| s.new_var().unwrap()).collect()
    }

    /// Number of assignments to `xs` that extend to a model.
    fn projected_count(s: &mut Session, xs: &[Var]) -> usize {
        (0u32..1 << xs.len())
            .filter(|mask| {
                let assumps: Vec<Lit> = xs
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if mask >> i & 1 == 1 { v.pos() } else { v.neg() })
                    .collect();
                s.solve(&assumps).unwrap() == SolveResult::Sat
            })
            .count()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn exactly_one_pair() {
        let mut s = Session::new();
        let xs = vars(&mut s, 2);
        exactly_one(&mut s, &[xs[0].pos(), xs[1].pos()]).unwrap();
        assert_eq!(s.solve(&[xs[0].pos(), xs[1].neg()]).unwrap(), SolveResult::Sat);
        assert_eq!(s.solve(&[xs[0].neg(), xs[1].pos()]).unwrap(), SolveResult::Sat);
        assert_eq!(projected_count(&mut s, &xs), 2);
    }

    #[test]
    fn empty_sets() {
        let mut s = Session::new();
        at_most_one(&mut s, &[]).unwrap();
        assert_eq!(s.num_clauses(), 0);
        assert_eq!(exactly_one(&mut s, &[]), Err(SatError::EmptyExactlyOne));
    }

    #[test]
    fn exactly_one_counts_exhaustive() {
        for n in 1..=10 {
            let mut s = Session::new();
            let xs = vars(&mut s, n);
            let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
            exactly_one(&mut s, &lits).unwrap();
            assert_eq!(projected_count(&mut s, &xs), n, "n={n}");
        }
    }

    #[test]
    fn at_most_one_counts_exhaustive() {
        for n in 0..=10 {
            let mut s = Session::new();
            let xs = vars(&mut s, n);
            let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
            at_most_one(&mut s, &lits).unwrap();
            assert_eq!(projected_count(&mut s, &xs), n + 1, "n={n}");
        }
    }

    #[test]
    fn counter_pair_bound_one() {
        let mut s = Session::new();
        let xs = vars(&mut s, 2);
        let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
        let counter = at_most_n(&mut s, 1, &lits).unwrap();
        assert!(counter.enforce(&mut s, None, 1).unwrap());
        assert_eq!(s.solve(&lits).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn counter_vacuous_bound() {
        let mut s = Session::new();
        let xs = vars(&mut s, 4);
        let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
        let counter = at_most_n(&mut s, 4, &lits).unwrap();
        assert!(counter.enforce(&mut s, None, 4).unwrap());
        assert_eq!(s.solve(&lits).unwrap(), SolveResult::Sat);
    }

    #[test]
    fn counter_counts_exhaustive() {
        for n in 1..=10 {
            for bound in 0..=n {
                let mut s = Session::new();
                let xs = vars(&mut s, n);
                let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
                let counter = at_most_n(&mut s, bound, &lits).unwrap();
                let guard = s.new_var().unwrap();
                counter.enforce(&mut s, Some(guard.pos()), bound).unwrap();
                s.add_clause(&[guard.pos()]).unwrap();
                let expected: usize = (0..=bound).map(|k| binom(n, k)).sum();
                assert_eq!(projected_count(&mut s, &xs), expected, "n={n} bound={bound}");
            }
        }
    }

    #[test]
    fn six_choose_at_most_two() {
        let mut s = Session::new();
        let xs = vars(&mut s, 6);
        let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
        let counter = at_most_n(&mut s, 2, &lits).unwrap();
        counter.enforce(&mut s, None, 2).unwrap();
        assert_eq!(projected_count(&mut s, &xs), 22);
    }

    #[test]
    fn one_counter_serves_decreasing_bounds() {
        let mut s = Session::new();
        let xs = vars(&mut s, 5);
        let lits: Vec<Lit> = xs.iter().map(|v| v.pos()).collect();
        let counter = at_most_n(&mut s, 4, &lits).unwrap();
        for bound in (0..5).rev() {
            let g = s.new_var().unwrap();
            counter.enforce(&mut s, Some(g.pos()), bound).unwrap();
            let mut assumps = vec![g.pos()];
            assumps.extend(&lits[..bound]);
            assert_eq!(s.solve(&assumps).unwrap(), SolveResult::Sat);
            assumps.push(lits[bound]);
            assert_eq!(s.solve(&assumps).unwrap(), SolveResult::Unsat);
        }
    }
}
