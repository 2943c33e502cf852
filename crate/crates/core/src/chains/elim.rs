//! Exact rank and kernels: leaf peeling followed by fraction-free elimination on the core.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::complex::SparseIntMatrix;
use crate::exact::Q;

/// Order in which rows with a single live column pin that column.
///
/// The plan depends only on the sparsity pattern, so it is computed once per matrix
/// and reused for every right-hand side.
#[derive(Clone, Debug)]
pub struct PeelPlan {
    /// (row, col, value) pivots in peel order.
    pub order: Vec<(usize, usize, i64)>,
    pub core_cols: Vec<usize>,
    pub core_rows: Vec<usize>,
}

impl PeelPlan {
    pub fn new(m: &SparseIntMatrix) -> Self {
        let rows = m.row_lists();
        let mut live = vec![true; m.cols()];
        let mut count: Vec<usize> = rows.iter().map(|r| r.len()).collect();
        let mut queue: VecDeque<usize> = (0..m.rows()).filter(|&r| count[r] == 1).collect();
        let mut order = Vec::new();
        while let Some(r) = queue.pop_front() {
            if count[r] != 1 {
                continue;
            }
            let &(c, v) = rows[r].iter().find(|(c, _)| live[*c]).expect("row count out of sync");
            order.push((r, c, v));
            live[c] = false;
            for &(k, _) in m.col(c) {
                count[k] -= 1;
                if count[k] == 1 {
                    queue.push_back(k);
                }
            }
        }
        let core_cols = (0..m.cols()).filter(|&c| live[c]).collect();
        let core_rows = (0..m.rows()).filter(|&r| count[r] > 0).collect();
        PeelPlan { order, core_cols, core_rows }
    }

    /// Core rows restricted to core columns, with columns renumbered `0..core_cols.len()`.
    pub(crate) fn core_rows_big(&self, m: &SparseIntMatrix) -> Vec<Vec<(usize, BigInt)>> {
        let local: HashMap<usize, usize> = self.core_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        for (i, &r) in self.core_rows.iter().enumerate() {
            pos.insert(r, i);
        }
        let mut out = vec![Vec::new(); self.core_rows.len()];
        for &c in &self.core_cols {
            for &(r, v) in m.col(c) {
                if let Some(&i) = pos.get(&r) {
                    out[i].push((local[&c], BigInt::from(v)));
                }
            }
        }
        for row in &mut out {
            row.sort_by_key(|e| e.0);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub rank: usize,
    pub kernel_rank: usize,
    pub basis: Option<Vec<Vec<BigInt>>>,
}

pub(crate) struct Echelon {
    /// (pivot column, row) in elimination order.
    pub rows: Vec<(usize, Vec<(usize, BigInt)>)>,
    pub inconsistent: bool,
}

fn content_normalize(row: &mut [(usize, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g > BigInt::one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

// a*x - b*y on sorted sparse rows
fn combine(x: &[(usize, BigInt)], a: &BigInt, y: &[(usize, BigInt)], b: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take = match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) => p.0.cmp(&q.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match take {
            std::cmp::Ordering::Less => {
                out.push((x[i].0, a * &x[i].1));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((y[j].0, -(b * &y[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Fraction-free row elimination. `rhs` marks an augmented column that never pivots.
///
/// Pivot choice: the sparsest remaining row, then within it the column shared by the
/// fewest remaining rows; ties go to the smaller index.
pub(crate) fn eliminate(mut rows: Vec<Vec<(usize, BigInt)>>, ncols: usize, rhs: Option<usize>) -> Echelon {
    let width = ncols + rhs.map_or(0, |_| 1);
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); width];
    let mut by_size: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut inconsistent = false;
    for (i, r) in rows.iter_mut().enumerate() {
        content_normalize(r);
        for (c, _) in r.iter() {
            col_rows[*c].insert(i);
        }
        if !r.is_empty() {
            by_size.insert((r.len(), i));
        }
    }
    let pivotable = |row: &[(usize, BigInt)]| row.iter().any(|(c, _)| Some(*c) != rhs);
    let mut out = Vec::new();
    while let Some(&(sz, p)) = by_size.iter().next() {
        by_size.remove(&(sz, p));
        let row = std::mem::take(&mut rows[p]);
        for (c, _) in &row {
            col_rows[*c].remove(&p);
        }
        if !pivotable(&row) {
            inconsistent = true;
            continue;
        }
        let &(pc, ref a) = row
            .iter()
            .filter(|(c, _)| Some(*c) != rhs)
            .min_by_key(|(c, _)| (col_rows[*c].len(), *c))
            .expect("pivotable row");
        let a = a.clone();
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for k in targets {
            let old = std::mem::take(&mut rows[k]);
            by_size.remove(&(old.len(), k));
            let b = old.iter().find(|(c, _)| *c == pc).map(|e| e.1.clone()).expect("indexed entry");
            let g = a.gcd(&b);
            let (a2, b2) = (&a / &g, &b / &g);
            let mut new = combine(&old, &a2, &row, &b2);
            content_normalize(&mut new);
            for (c, _) in &old {
                col_rows[*c].remove(&k);
            }
            for (c, _) in &new {
                col_rows[*c].insert(k);
            }
            if !new.is_empty() {
                by_size.insert((new.len(), k));
            }
            rows[k] = new;
        }
        out.push((pc, row));
    }
    Echelon { rows: out, inconsistent }
}

/// Solves the echelon system given values for free columns (absent means zero).
pub(crate) fn back_substitute(e: &Echelon, ncols: usize, rhs: Option<usize>, free: &HashMap<usize, Q>) -> Vec<Q> {
    let mut x = vec![Q::zero(); ncols];
    for (&c, v) in free {
        x[c] = v.clone();
    }
    for (pc, row) in e.rows.iter().rev() {
        let mut acc = Q::zero();
        let mut a = Q::zero();
        for (c, v) in row {
            if *c == *pc {
                a = Q::from_bigint(v.clone());
            } else if Some(*c) == rhs {
                acc = &acc + &Q::from_bigint(v.clone());
            } else if !x[*c].is_zero() {
                acc = &acc - &(&Q::from_bigint(v.clone()) * &x[*c]);
            }
        }
        x[*pc] = acc.div(&a);
    }
    x
}

fn integer_vector(v: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for q in v {
        let d = q.to_big().denom().clone();
        l = l.lcm(&d);
    }
    let mut out: Vec<BigInt> = v.iter().map(|q| (q.to_big() * &l).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &out {
        g = g.gcd(x);
    }
    if g > BigInt::one() {
        for x in &mut out {
            *x /= &g;
        }
    }
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -x.clone();
            }
        }
    }
    out
}

pub fn kernel_rank(m: &SparseIntMatrix) -> KernelReport {
    kernel_report(m, false)
}

pub fn kernel_report(m: &SparseIntMatrix, with_basis: bool) -> KernelReport {
    kernel_report_with_plan(m, &PeelPlan::new(m), with_basis)
}

pub fn kernel_report_with_plan(m: &SparseIntMatrix, plan: &PeelPlan, with_basis: bool) -> KernelReport {
    let ncore = plan.core_cols.len();
    let ech = eliminate(plan.core_rows_big(m), ncore, None);
    let rank = plan.order.len() + ech.rows.len();
    let kernel_rank = m.cols() - rank;
    let basis = with_basis.then(|| {
        let pivots: BTreeSet<usize> = ech.rows.iter().map(|(c, _)| *c).collect();
        (0..ncore)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let free = HashMap::from([(f, Q::one())]);
                let local = integer_vector(&back_substitute(&ech, ncore, None, &free));
                let mut v = vec![BigInt::zero(); m.cols()];
                for (i, x) in local.into_iter().enumerate() {
                    v[plan.core_cols[i]] = x;
                }
                v
            })
            .collect()
    });
    KernelReport { rank, kernel_rank, basis }
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Dense Gauss-Jordan rank over the rationals.
    pub fn dense_rank(m: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|&v| Q::int(v)).collect()).collect();
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
            a.swap(rank, p);
            for r in 0..rows {
                if r != rank && !a[r][c].is_zero() {
                    let f = a[r][c].div(&a[rank][c]);
                    for k in 0..cols {
                        let t = &f * &a[rank][k];
                        a[r][k] = &a[r][k] - &t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_matrix() {
        let r = kernel_rank(&SparseIntMatrix::zeros(3, 5));
        assert_eq!((r.rank, r.kernel_rank), (0, 5));
    }

    #[test]
    fn basis_vectors_are_in_kernel() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 0, 2], vec![0, 2, 2, 0], vec![1, -1, -2, 2]]);
        let r = kernel_report(&m, true);
        assert_eq!(r.rank + r.kernel_rank, 4);
        assert_eq!(r.rank, oracle::dense_rank(&m.to_dense()));
        for v in r.basis.unwrap() {
            let x: Vec<i64> = v.iter().map(|b| i64::try_from(b).unwrap()).collect();
            assert!(m.mul_vec(&x).iter().all(|&y| y == 0));
            assert!(x.iter().any(|&y| y != 0));
        }
    }

    fn sparse_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=40, 1usize..=40).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(prop_oneof![6 => Just(0i64), 1 => -3i64..=3], c), r)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn fraction_free_rank_matches_rational(d in sparse_matrix()) {
            let m = SparseIntMatrix::from_dense(&d);
            let r = kernel_report(&m, true);
            prop_assert_eq!(r.rank, oracle::dense_rank(&d));
            prop_assert_eq!(r.rank + r.kernel_rank, m.cols());
            let basis = r.basis.unwrap();
            prop_assert_eq!(basis.len(), r.kernel_rank);
            for v in basis {
                for row in &d {
                    let s: BigInt = row.iter().zip(&v).map(|(a, b)| BigInt::from(*a) * b).sum();
                    prop_assert!(s.is_zero());
                }
            }
        }
    }
}
