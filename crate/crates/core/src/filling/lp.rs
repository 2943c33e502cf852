//! Exact two-phase simplex on a dense tableau, for `min c·x, Ax = b, x ≥ 0`.

use thiserror::Error;

use crate::exact::Q;

#[derive(Clone, Debug, Default)]
pub struct LpProblem {
    pub rows: usize,
    /// Sparse columns of `A` as (row, value).
    pub cols: Vec<Vec<(usize, i64)>>,
    pub rhs: Vec<i64>,
    pub cost: Vec<i64>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, objective: Q, duals: Vec<Q> },
    /// `duals` are phase-one multipliers: any column `a` with `duals·a != 0` could reduce infeasibility.
    Infeasible { duals: Vec<Q> },
    Unbounded,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("simplex pivot limit of {0} reached")]
pub struct PivotLimit(pub usize);

const BLAND_AFTER: usize = 50;

struct Tableau {
    t: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    d: Vec<Q>,
    z: Q,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.t[r][c].recip();
        let nz: Vec<usize> = (0..self.width).filter(|&j| !self.t[r][j].is_zero()).collect();
        for &j in &nz {
            self.t[r][j] = &self.t[r][j] * &inv;
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        let prow: Vec<(usize, Q)> = nz.iter().map(|&j| (j, self.t[r][j].clone())).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (j, v) in &prow {
                self.t[i][*j] = &self.t[i][*j] - &(&f * v);
            }
            self.rhs[i] = &self.rhs[i] - &(&f * &prhs);
        }
        if !self.d[c].is_zero() {
            let f = self.d[c].clone();
            for (j, v) in &prow {
                self.d[*j] = &self.d[*j] - &(&f * v);
            }
            self.z = &self.z - &(&f * &prhs);
        }
        self.basis[r] = c;
    }

    /// Runs to optimality over columns allowed by `enter`. Returns false if unbounded.
    fn optimize(&mut self, enter: impl Fn(usize) -> bool) -> Result<bool, PivotLimit> {
        let mut degenerate = 0;
        loop {
            if self.pivots >= self.max_pivots {
                return Err(PivotLimit(self.max_pivots));
            }
            let bland = degenerate >= BLAND_AFTER;
            let mut col: Option<usize> = None;
            for j in 0..self.width {
                if !enter(j) || !self.d[j].is_negative() {
                    continue;
                }
                if bland {
                    col = Some(j);
                    break;
                }
                if col.is_none_or(|c| self.d[j] < self.d[c]) {
                    col = Some(j);
                }
            }
            let Some(c) = col else { return Ok(true) };
            let mut row: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].div(&self.t[i][c]);
                let better = match &row {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    row = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = row else { return Ok(false) };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

pub fn solve_lp(p: &LpProblem, max_pivots: usize) -> Result<LpOutcome, PivotLimit> {
    let m = p.rows;
    let n = p.cols.len();
    let width = n + m;
    let sign: Vec<i64> = p.rhs.iter().map(|&b| if b < 0 { -1 } else { 1 }).collect();
    let mut t = vec![vec![Q::zero(); width]; m];
    for (j, col) in p.cols.iter().enumerate() {
        for &(i, v) in col {
            t[i][j] = &t[i][j] + &Q::int(v * sign[i]);
        }
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = Q::one();
    }
    let rhs: Vec<Q> = p.rhs.iter().zip(&sign).map(|(&b, &s)| Q::int(b * s)).collect();
    let mut d = vec![Q::zero(); width];
    for j in 0..n {
        let mut acc = Q::zero();
        for row in &t {
            if !row[j].is_zero() {
                acc = &acc - &row[j];
            }
        }
        d[j] = acc;
    }
    let z = rhs.iter().fold(Q::zero(), |a, b| &a - b);
    let mut tab = Tableau { t, rhs, d, z, basis: (n..n + m).collect(), width, pivots: 0, max_pivots };

    tab.optimize(|_| true)?;
    // z tracks minus the phase-one objective
    if tab.z.is_negative() {
        let duals = (0..m).map(|i| &(&Q::one() - &tab.d[n + i]) * &Q::int(sign[i])).collect();
        return Ok(LpOutcome::Infeasible { duals });
    }

    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        if let Some(c) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
            tab.pivot(r, c);
        }
    }

    let cost = |j: usize| if j < n { Q::int(p.cost[j]) } else { Q::zero() };
    for j in 0..width {
        let mut acc = cost(j);
        for i in 0..m {
            let cb = cost(tab.basis[i]);
            if !cb.is_zero() && !tab.t[i][j].is_zero() {
                acc = &acc - &(&cb * &tab.t[i][j]);
            }
        }
        tab.d[j] = acc;
    }
    tab.z = (0..m).fold(Q::zero(), |a, i| &a - &(&cost(tab.basis[i]) * &tab.rhs[i]));

    if !tab.optimize(|j| j < n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Q::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs[i].clone();
        }
    }
    let duals = (0..m).map(|i| &(-tab.d[n + i].clone()) * &Q::int(sign[i])).collect();
    Ok(LpOutcome::Optimal { x, objective: -tab.z.clone(), duals })
}
