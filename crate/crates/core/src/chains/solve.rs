use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use super::elim::{back_substitute, eliminate, PeelPlan};
use crate::complex::SparseIntMatrix;
use crate::exact::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("the rational solution is not integral")]
    NonIntegral,
    #[error("the solution is not unique (nontrivial kernel)")]
    NonUnique,
    #[error("solution entry does not fit in 64 bits")]
    Overflow,
    #[error("internal: solution failed verification")]
    VerificationFailed,
}

/// Unique integer solution of `m x = b`; `Ok(None)` when no rational solution exists.
pub fn solve_exact(m: &SparseIntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>, SolveError> {
    solve_with_plan(m, &PeelPlan::new(m), b)
}

pub fn solve_with_plan(m: &SparseIntMatrix, plan: &PeelPlan, b: &[i64]) -> Result<Option<Vec<i64>>, SolveError> {
    assert_eq!(b.len(), m.rows());
    let mut resid: Vec<Q> = b.iter().map(|&v| Q::int(v)).collect();
    let mut x = vec![Q::zero(); m.cols()];
    for &(r, c, a) in &plan.order {
        if resid[r].is_zero() {
            continue;
        }
        let v = resid[r].div(&Q::int(a));
        for &(k, w) in m.col(c) {
            resid[k] = &resid[k] - &(&Q::int(w) * &v);
        }
        x[c] = v;
    }

    let core_rows: BTreeSet<usize> = plan.core_rows.iter().copied().collect();
    if resid.iter().enumerate().any(|(r, q)| !q.is_zero() && !core_rows.contains(&r)) {
        return Ok(None);
    }

    let ncore = plan.core_cols.len();
    if !plan.core_rows.is_empty() {
        let mut rows = plan.core_rows_big(m);
        let mut scale = BigInt::one();
        for &r in &plan.core_rows {
            scale = scale.lcm(resid[r].to_big().denom());
        }
        for (i, &r) in plan.core_rows.iter().enumerate() {
            let v = (resid[r].to_big() * &scale).to_integer();
            if v != BigInt::ZERO {
                rows[i].push((ncore, v));
            }
        }
        let ech = eliminate(rows, ncore, Some(ncore));
        if ech.inconsistent {
            return Ok(None);
        }
        if ech.rows.len() < ncore {
            return Err(SolveError::NonUnique);
        }
        let sol = back_substitute(&ech, ncore, Some(ncore), &HashMap::new());
        let inv = Q::from_bigint(scale).recip();
        for (i, q) in sol.into_iter().enumerate() {
            x[plan.core_cols[i]] = &q * &inv;
        }
    } else if ncore > 0 {
        return Err(SolveError::NonUnique);
    }

    if x.iter().any(|q| !q.is_integer()) {
        return Err(SolveError::NonIntegral);
    }
    let out: Vec<i64> = x.iter().map(|q| q.to_i64().ok_or(SolveError::Overflow)).collect::<Result<_, _>>()?;
    let check = m.mul_vec(&out);
    if check.iter().zip(b).any(|(y, &v)| *y != v as i128) {
        return Err(SolveError::VerificationFailed);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_systems() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 0], vec![1, 1], vec![0, 1]]);
        assert_eq!(solve_exact(&m, &[2, 5, 3]), Ok(Some(vec![2, 3])));
        assert_eq!(solve_exact(&m, &[2, 5, 4]), Ok(None));
        let h = SparseIntMatrix::from_dense(&[vec![2]]);
        assert_eq!(solve_exact(&h, &[1]), Err(SolveError::NonIntegral));
        let k = SparseIntMatrix::from_dense(&[vec![1, 1]]);
        assert_eq!(solve_exact(&k, &[1]), Err(SolveError::NonUnique));
        assert_eq!(solve_exact(&m, &[0, 0, 0]), Ok(Some(vec![0, 0])));
    }

    #[test]
    fn core_system_with_cycle_structure() {
        // No row has a single entry, so everything goes through elimination.
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 1]]);
        assert_eq!(solve_exact(&m, &[3, 5, 4, 6]), Ok(Some(vec![1, 2, 3])));
        assert_eq!(solve_exact(&m, &[3, 5, 4, 7]), Ok(None));
        let odd = SparseIntMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        assert_eq!(solve_exact(&odd, &[1, 1, 1]), Err(SolveError::NonIntegral));
    }

    #[test]
    fn inconsistency_beats_non_uniqueness() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(solve_exact(&m, &[1, 2]), Ok(None));
        assert_eq!(solve_exact(&m, &[1, 1]), Err(SolveError::NonUnique));
    }
}
