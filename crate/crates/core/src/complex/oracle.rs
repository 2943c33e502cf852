use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::chains::kernel_report;
use crate::presentation::{
    check_small_cancellation, free_reduce, DehnSolver, Letter, Presentation, PresentationError, Word,
};
use crate::complex::SparseIntMatrix;
use num_rational::Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Free,
    FreeAbelian,
    Surface,
    Dehn,
}

/// A presentation together with a terminating normal-form procedure.
#[derive(Clone, Debug)]
pub struct GroupOracle {
    strategy: Strategy,
    presentation: Presentation,
    solver: Option<DehnSolver>,
    invariant: Vec<Vec<i64>>,
}

const CLOSURE_CAP: usize = 20_000;

impl GroupOracle {
    pub fn free(rank: usize) -> Self {
        let names: Vec<String> = (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let p = Presentation::new(names, Vec::new());
        GroupOracle { strategy: Strategy::Free, presentation: p, solver: None, invariant: Vec::new() }
    }

    pub fn free_abelian(rank: usize) -> Self {
        assert!((1..=3).contains(&rank), "free abelian rank must be 1..=3");
        GroupOracle {
            strategy: Strategy::FreeAbelian,
            presentation: Presentation::free_abelian(rank),
            solver: None,
            invariant: Vec::new(),
        }
    }

    pub fn surface(genus: usize) -> Self {
        assert!(genus >= 2, "surface genus must be at least 2");
        let p = Presentation::surface(genus);
        let solver = DehnSolver::new(&p).expect("surface presentations are C'(1/6)");
        GroupOracle { strategy: Strategy::Surface, presentation: p, solver: Some(solver), invariant: Vec::new() }
    }

    /// Dehn-algorithm oracle; refuses presentations that are not C'(1/6).
    pub fn dehn(p: Presentation) -> Result<Self, PresentationError> {
        let solver = DehnSolver::new(&p)?;
        let invariant = abelian_functionals(&p);
        Ok(GroupOracle { strategy: Strategy::Dehn, presentation: p, solver: Some(solver), invariant })
    }

    /// Picks a strategy: free when there are no relators, Dehn when C'(1/6),
    /// free abelian when the relators are exactly the pairwise commutators.
    pub fn from_presentation(p: Presentation) -> Result<Self, PresentationError> {
        if p.relators.is_empty() {
            return Ok(GroupOracle { strategy: Strategy::Free, presentation: p, solver: None, invariant: Vec::new() });
        }
        if check_small_cancellation(&p, Rational64::new(1, 6)).is_satisfied() {
            return Self::dehn(p);
        }
        let rank = p.rank();
        if (1..=3).contains(&rank) {
            let std = Presentation::free_abelian(rank);
            let mut a: Vec<_> = p.relators.iter().map(|r| r.letters().to_vec()).collect();
            let mut b: Vec<_> = std.relators.iter().flat_map(|r| [r.letters().to_vec(), r.inverse().letters().to_vec()]).collect();
            a.sort();
            b.sort();
            if a.iter().all(|r| b.binary_search(r).is_ok()) && a.len() == std.relators.len() {
                return Ok(GroupOracle { strategy: Strategy::FreeAbelian, presentation: p, solver: None, invariant: Vec::new() });
            }
        }
        Err(PresentationError::PreconditionViolated(
            "no terminating normal form: presentation is neither free, free abelian, nor C'(1/6)".into(),
        ))
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn generator_count(&self) -> usize {
        self.presentation.rank()
    }

    pub fn solver(&self) -> Option<&DehnSolver> {
        self.solver.as_ref()
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        match self.strategy {
            Strategy::Free => free_reduce(w.letters().iter().copied()),
            Strategy::FreeAbelian => {
                let mut exps = vec![0i64; self.generator_count()];
                for l in w.letters() {
                    exps[l.gen as usize] += l.sign();
                }
                let mut out = Vec::new();
                for (g, &e) in exps.iter().enumerate() {
                    let l = Letter::new(g as u32, e < 0);
                    out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
                }
                free_reduce(out)
            }
            Strategy::Surface | Strategy::Dehn => self.dehn_canonical(w),
        }
    }

    /// Dehn-reduce, then take the least word among those reachable by exact-half swaps;
    /// a swap that opens a shortening restarts the process from the shorter word.
    fn dehn_canonical(&self, w: &Word) -> Word {
        let solver = self.solver.as_ref().expect("Dehn strategies carry a solver");
        let mut cur = solver.reduce_linear(w);
        'restart: loop {
            let mut seen: BTreeSet<Word> = BTreeSet::from([cur.clone()]);
            let mut stack = vec![cur.clone()];
            let mut next = Vec::new();
            while let Some(x) = stack.pop() {
                next.clear();
                solver.half_swaps(x.letters(), &mut next);
                for y in next.drain(..) {
                    if y.len() < x.len() || solver.has_long_subword(y.letters()) {
                        cur = solver.reduce_linear(&y);
                        continue 'restart;
                    }
                    if seen.len() < CLOSURE_CAP && seen.insert(y.clone()) {
                        stack.push(y);
                    }
                }
            }
            return seen.into_iter().next().expect("nonempty closure");
        }
    }

    /// Exact equality test through Dehn's algorithm (word problem), for Dehn strategies.
    pub fn same_element(&self, u: &Word, v: &Word) -> bool {
        match &self.solver {
            Some(s) => s.is_trivial(&u.concat(&v.inverse())),
            None => self.normal_form(u) == self.normal_form(v),
        }
    }

    /// Values of integer functionals on exponent sums that vanish on every relator.
    pub fn abelian_invariant(&self, w: &Word) -> Vec<i64> {
        let mut e = vec![0i64; self.generator_count()];
        for l in w.letters() {
            e[l.gen as usize] += l.sign();
        }
        self.invariant.iter().map(|f| f.iter().zip(&e).map(|(a, b)| a * b).sum()).collect()
    }
}

fn abelian_functionals(p: &Presentation) -> Vec<Vec<i64>> {
    let n = p.rank();
    let mut trip = Vec::new();
    for (i, r) in p.relators.iter().enumerate() {
        for l in r.letters() {
            trip.push((i, l.gen as usize, l.sign()));
        }
    }
    let m = SparseIntMatrix::from_triplets(p.relators.len(), n, &trip);
    kernel_report(&m, true)
        .basis
        .unwrap_or_default()
        .into_iter()
        .map(|v| v.iter().map(|x| x.to_i64().expect("small kernel entries")).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn abelian_normal_form() {
        let o = GroupOracle::free_abelian(2);
        let w = o.presentation().parse_word("b a B a").unwrap();
        assert_eq!(o.presentation().render_word(&o.normal_form(&w)), "a a");
    }

    #[test]
    fn surface_normal_form_respects_relator() {
        let o = GroupOracle::surface(2);
        let p = o.presentation();
        let r = p.relators[0].canonical().clone();
        assert!(o.normal_form(&r).is_empty());
        // [a,b] = [d,c] by the relator
        let u = p.parse_word("a b a^-1 b^-1").unwrap();
        let v = p.parse_word("d c d^-1 c^-1").unwrap();
        assert_eq!(o.normal_form(&u), o.normal_form(&v));
        assert!(o.same_element(&u, &v));
    }

    #[test]
    fn strategy_selection() {
        let p = parse_presentation("gens: a b\nrel: [a,b]").unwrap();
        assert_eq!(GroupOracle::from_presentation(p).unwrap().strategy(), Strategy::FreeAbelian);
        let p = parse_presentation("gens: a b c d\nrel: [a,b][c,d]").unwrap();
        assert_eq!(GroupOracle::from_presentation(p).unwrap().strategy(), Strategy::Dehn);
        let p = parse_presentation("gens: a b\n").unwrap();
        assert_eq!(GroupOracle::from_presentation(p).unwrap().strategy(), Strategy::Free);
        let p = parse_presentation("gens: a b\nrel: a a b").unwrap();
        assert!(GroupOracle::from_presentation(p).is_err());
    }

    #[test]
    fn invariant_kills_relators() {
        let p = parse_presentation("gens: a b c\nrel: a b^-1 c c b^-1 c a^-1 c^-1 b a c^-1 a b").unwrap();
        let o = GroupOracle::dehn(p.clone()).unwrap();
        assert!(o.abelian_invariant(p.relators[0].canonical()).iter().all(|&x| x == 0));
    }
}
