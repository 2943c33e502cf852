//! Minimum ℓ¹ integer preimage under a boundary matrix.
//!
//! `x = p - q` with `p, q ≥ 0`; each node LP runs over a growing set of active columns
//! (priced in from the duals), then branch-and-bound on fractional `x` closes the integrality gap.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::lp::{solve_lp, LpOutcome, LpProblem, PivotLimit};
use crate::complex::SparseIntMatrix;
use crate::exact::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverBudget {
    pub max_nodes: usize,
    pub max_pivots: usize,
    pub restart_every: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget { max_nodes: 100_000, max_pivots: 200_000, restart_every: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpOutcome {
    Optimal { x: BTreeMap<usize, i64>, value: u64 },
    /// Best incumbent when the node budget ran out.
    Budget { x: BTreeMap<usize, i64>, value: u64 },
    Infeasible,
    BudgetNoIncumbent,
}

// LP variable index 2*col + (0 for p, 1 for q); branching bounds apply to x_col = p - q
type Bounds = BTreeMap<usize, (Option<i64>, Option<i64>)>;

enum NodeLp {
    Infeasible,
    Optimal { value: Q, vals: BTreeMap<usize, Q> },
}

struct Solver<'a> {
    m: &'a SparseIntMatrix,
    mt: &'a SparseIntMatrix,
    allowed: Option<&'a [bool]>,
    target: BTreeMap<usize, i64>,
    active: BTreeSet<usize>,
    max_pivots: usize,
}

impl<'a> Solver<'a> {
    fn node(&mut self, bounds: &Bounds) -> Result<NodeLp, PivotLimit> {
        loop {
            let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
            for &r in self.target.keys() {
                let k = rows.len();
                rows.entry(r).or_insert(k);
            }
            for &c in &self.active {
                for &(r, _) in self.m.col(c) {
                    let k = rows.len();
                    rows.entry(r).or_insert(k);
                }
            }
            let edge_rows = rows.len();
            let mut lp = LpProblem { rows: edge_rows, ..Default::default() };
            lp.rhs = vec![0; edge_rows];
            for (r, v) in &self.target {
                lp.rhs[rows[r]] = *v;
            }
            let vars: Vec<usize> = self.active.iter().flat_map(|&c| [2 * c, 2 * c + 1]).collect();
            for &var in &vars {
                let sign = if var % 2 == 0 { 1 } else { -1 };
                lp.cols.push(self.m.col(var / 2).iter().map(|&(r, v)| (rows[&r], sign * v)).collect());
                lp.cost.push(1);
            }
            for (&c, &(lo, hi)) in bounds {
                let pos = self.active.iter().position(|&a| a == c).expect("bounded columns are active");
                for (bound, slack) in [(hi, 1), (lo, -1)] {
                    let Some(b) = bound else { continue };
                    let r = lp.rows;
                    lp.rows += 1;
                    lp.cols[2 * pos].push((r, 1));
                    lp.cols[2 * pos + 1].push((r, -1));
                    lp.cols.push(vec![(r, slack)]);
                    lp.cost.push(0);
                    lp.rhs.push(b);
                }
            }
            let outcome = solve_lp(&lp, self.max_pivots)?;
            let (duals, infeasible) = match &outcome {
                LpOutcome::Optimal { duals, .. } => (duals, false),
                LpOutcome::Infeasible { duals } => (duals, true),
                LpOutcome::Unbounded => unreachable!("objective is bounded below by zero"),
            };
            let y: HashMap<usize, Q> =
                rows.iter().filter(|(_, &k)| k < edge_rows && !duals[k].is_zero()).map(|(&r, &k)| (r, duals[k].clone())).collect();
            let mut candidates: BTreeSet<usize> = BTreeSet::new();
            for &r in y.keys() {
                for &(c, _) in self.mt.col(r) {
                    if !self.active.contains(&c) && self.allowed.is_none_or(|a| a[c]) {
                        candidates.insert(c);
                    }
                }
            }
            let mut added = false;
            for c in candidates {
                let ya = self.m.col(c).iter().fold(Q::zero(), |acc, &(r, v)| match y.get(&r) {
                    Some(q) => &acc + &(q * &Q::int(v)),
                    None => acc,
                });
                // phase one: any nonzero y·a helps; phase two: reduced cost 1 ∓ y·a < 0
                let improves = if infeasible { !ya.is_zero() } else { ya.abs() > Q::one() };
                if improves {
                    self.active.insert(c);
                    added = true;
                }
            }
            if added {
                continue;
            }
            return Ok(match outcome {
                LpOutcome::Optimal { x, objective, .. } => {
                    let mut vals: BTreeMap<usize, Q> = BTreeMap::new();
                    for (&var, v) in vars.iter().zip(x) {
                        if !v.is_zero() {
                            let e = vals.entry(var / 2).or_insert_with(Q::zero);
                            *e = if var % 2 == 0 { &*e + &v } else { &*e - &v };
                        }
                    }
                    vals.retain(|_, v| !v.is_zero());
                    NodeLp::Optimal { value: objective, vals }
                }
                _ => NodeLp::Infeasible,
            });
        }
    }

    fn is_preimage(&self, x: &BTreeMap<usize, i64>) -> bool {
        let mut img: BTreeMap<usize, i64> = BTreeMap::new();
        for (&c, &v) in x {
            for &(r, w) in self.m.col(c) {
                *img.entry(r).or_insert(0) += v * w;
            }
        }
        img.retain(|_, v| *v != 0);
        img == self.target
    }
}

fn to_ints(vals: &BTreeMap<usize, BigInt>) -> BTreeMap<usize, i64> {
    vals.iter()
        .filter(|(_, v)| **v != BigInt::ZERO)
        .map(|(&c, v)| (c, v.to_i64().expect("coefficient fits in i64")))
        .collect()
}

fn l1(x: &BTreeMap<usize, i64>) -> u64 {
    x.values().map(|v| v.unsigned_abs()).sum()
}

struct Node {
    bounds: Bounds,
    parent_bound: Q,
}

/// Minimizes `‖x‖₁` subject to `m x = target` over the integers.
pub fn min_l1_preimage(m: &SparseIntMatrix, target: &BTreeMap<usize, i64>, budget: &SolverBudget) -> Result<IlpOutcome, PivotLimit> {
    min_l1_preimage_with(m, &m.transpose(), None, target, budget)
}

/// As [`min_l1_preimage`], with the transpose of `m` supplied by the caller and the search
/// optionally confined to the columns flagged in `allowed`.
pub fn min_l1_preimage_with(
    m: &SparseIntMatrix,
    mt: &SparseIntMatrix,
    allowed: Option<&[bool]>,
    target: &BTreeMap<usize, i64>,
    budget: &SolverBudget,
) -> Result<IlpOutcome, PivotLimit> {
    let target: BTreeMap<usize, i64> = target.iter().filter(|(_, &v)| v != 0).map(|(&k, &v)| (k, v)).collect();
    if target.is_empty() {
        return Ok(IlpOutcome::Optimal { x: BTreeMap::new(), value: 0 });
    }
    let active: BTreeSet<usize> =
        target.keys().flat_map(|&r| mt.col(r).iter().map(|e| e.0)).filter(|&c| allowed.is_none_or(|a| a[c])).collect();
    let mut s = Solver { m, mt, allowed, target, active, max_pivots: budget.max_pivots };

    let mut incumbent: Option<(u64, BTreeMap<usize, i64>)> = None;
    let mut stack = vec![Node { bounds: Bounds::new(), parent_bound: Q::zero() }];
    let mut processed = 0usize;
    while let Some(node) = stack.pop() {
        if let Some((best, _)) = &incumbent {
            if Q::from_bigint(node.parent_bound.ceil()) >= Q::int(*best as i64) {
                continue;
            }
        }
        if processed >= budget.max_nodes {
            return Ok(match incumbent {
                Some((value, x)) => IlpOutcome::Budget { x, value },
                None => IlpOutcome::BudgetNoIncumbent,
            });
        }
        processed += 1;
        if budget.restart_every > 0 && processed.is_multiple_of(budget.restart_every) {
            // continue depth-first from the best open bound
            stack.sort_by(|a, b| b.parent_bound.cmp(&a.parent_bound));
        }
        let NodeLp::Optimal { value, vals } = s.node(&node.bounds)? else { continue };
        if let Some((best, _)) = &incumbent {
            if Q::from_bigint(value.ceil()) >= Q::int(*best as i64) {
                continue;
            }
        }
        if vals.values().all(|v| v.is_integer()) {
            let x = to_ints(&vals.iter().map(|(&k, v)| (k, v.floor())).collect());
            let n = l1(&x);
            if incumbent.as_ref().is_none_or(|(b, _)| n < *b) {
                incumbent = Some((n, x));
            }
            continue;
        }
        let half = Q::ratio(1, 2);
        let rounded: BTreeMap<usize, BigInt> = vals.iter().map(|(&k, v)| (k, (v + &half).floor())).collect();
        let x = to_ints(&rounded);
        if s.is_preimage(&x) {
            let n = l1(&x);
            if incumbent.as_ref().is_none_or(|(b, _)| n < *b) {
                incumbent = Some((n, x));
            }
        }
        let (var, v) = vals
            .iter()
            .filter(|(_, v)| !v.is_integer())
            .max_by(|a, b| a.1.fractionality().cmp(&b.1.fractionality()).then_with(|| b.0.cmp(a.0)))
            .map(|(&k, v)| (k, v.clone()))
            .expect("a fractional variable");
        let fl = v.floor().to_i64().expect("bounded");
        let (lo, hi) = node.bounds.get(&var).copied().unwrap_or((None, None));
        let mut up = node.bounds.clone();
        up.insert(var, (Some(fl + 1), hi));
        let mut down = node.bounds;
        down.insert(var, (lo, Some(fl)));
        stack.push(Node { bounds: up, parent_bound: value.clone() });
        stack.push(Node { bounds: down, parent_bound: value });
    }
    Ok(match incumbent {
        Some((value, x)) => IlpOutcome::Optimal { x, value },
        None => IlpOutcome::Infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_needs_branching() {
        // rows are pairwise sums; target (1,1,1) has LP optimum 3/2 but no integer solution
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let t = BTreeMap::from([(0, 1), (1, 1), (2, 1)]);
        assert_eq!(min_l1_preimage(&m, &t, &SolverBudget::default()).unwrap(), IlpOutcome::Infeasible);
        let t = BTreeMap::from([(0, 2), (1, 2), (2, 2)]);
        let IlpOutcome::Optimal { value, x } = min_l1_preimage(&m, &t, &SolverBudget::default()).unwrap() else { panic!() };
        assert_eq!(value, 3);
        assert_eq!(x, BTreeMap::from([(0, 1), (1, 1), (2, 1)]));
    }

    #[test]
    fn chooses_cheaper_of_two_preimages() {
        // column 0 alone or columns 1 + 2 both hit the target
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, -1, 1, 1]]);
        let t = BTreeMap::from([(0, 1), (1, 1)]);
        let IlpOutcome::Optimal { value, x } = min_l1_preimage(&m, &t, &SolverBudget::default()).unwrap() else { panic!() };
        assert_eq!(value, 1);
        assert_eq!(x, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn zero_target() {
        let m = SparseIntMatrix::from_dense(&[vec![1]]);
        assert_eq!(
            min_l1_preimage(&m, &BTreeMap::new(), &SolverBudget::default()).unwrap(),
            IlpOutcome::Optimal { x: BTreeMap::new(), value: 0 }
        );
    }
}
