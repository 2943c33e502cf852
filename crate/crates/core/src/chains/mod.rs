//! Integer chains on a cell complex and exact linear algebra over ℤ.

mod elim;
mod solve;

use std::collections::BTreeMap;

use serde_json::Value;

use crate::complex::CellComplex;

pub use elim::{kernel_rank, kernel_report, kernel_report_with_plan, KernelReport, PeelPlan};
pub use solve::{solve_exact, solve_with_plan, SolveError};

#[cfg(test)]
pub(crate) use elim::oracle;

/// A sparse integer combination of cells of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Chain {
    pub dim: usize,
    coeffs: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain { dim, coeffs: BTreeMap::new() }
    }

    pub fn cell(dim: usize, id: usize) -> Self {
        Chain::from_pairs(dim, [(id, 1)])
    }

    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut c = Chain::zero(dim);
        for (id, v) in pairs {
            c.add_to(id, v);
        }
        c
    }

    pub fn from_dense(dim: usize, v: &[i64]) -> Self {
        Chain::from_pairs(dim, v.iter().enumerate().map(|(i, &x)| (i, x)))
    }

    pub fn to_dense(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        for (&i, &x) in &self.coeffs {
            v[i] = x;
        }
        v
    }

    pub fn add_to(&mut self, id: usize, v: i64) {
        if v == 0 {
            return;
        }
        let e = self.coeffs.entry(id).or_insert(0);
        *e += v;
        if *e == 0 {
            self.coeffs.remove(&id);
        }
    }

    pub fn coeff(&self, id: usize) -> i64 {
        self.coeffs.get(&id).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// ℓ¹ norm: the sum of absolute coefficients.
    pub fn norm(&self) -> u64 {
        self.coeffs.values().map(|v| v.unsigned_abs()).sum()
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut c = self.clone();
        for (id, v) in other.iter() {
            c.add_to(id, v);
        }
        c
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Chain {
        Chain::from_pairs(self.dim, self.iter().map(|(id, v)| (id, v * k)))
    }

    /// `[[id, coeff], ...]` sorted by id.
    pub fn to_json(&self) -> Value {
        Value::Array(self.iter().map(|(id, v)| Value::from(vec![id as i64, v])).collect())
    }

    pub fn from_json(dim: usize, v: &Value) -> Option<Chain> {
        let mut c = Chain::zero(dim);
        for pair in v.as_array()? {
            let p = pair.as_array()?;
            if p.len() != 2 {
                return None;
            }
            c.add_to(p[0].as_u64()? as usize, p[1].as_i64()?);
        }
        Some(c)
    }
}

pub fn apply_boundary(k: &CellComplex, c: &Chain) -> Chain {
    assert!(c.dim >= 1, "boundary of a 0-chain");
    let m = k.boundary_matrix(c.dim);
    let mut out = Chain::zero(c.dim - 1);
    for (id, v) in c.iter() {
        for &(r, w) in m.col(id) {
            out.add_to(r, v * w);
        }
    }
    out
}

/// `∂c = 0`; for 0-chains, zero augmentation on every connected component.
pub fn is_cycle(k: &CellComplex, c: &Chain) -> bool {
    if c.dim == 0 {
        let comp = k.components();
        let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
        for (v, x) in c.iter() {
            *sums.entry(comp[v]).or_insert(0) += x;
        }
        return sums.values().all(|&s| s == 0);
    }
    apply_boundary(k, c).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_round_trip() {
        let c = Chain::from_pairs(1, [(5, -2), (1, 3)]);
        assert_eq!(c.to_json().to_string(), "[[1,3],[5,-2]]");
        assert_eq!(Chain::from_json(1, &c.to_json()), Some(c));
    }

    fn chain() -> impl Strategy<Value = Chain> {
        prop::collection::vec((0usize..20, -5i64..=5), 0..12).prop_map(|v| Chain::from_pairs(1, v))
    }

    proptest! {
        #[test]
        fn norm_axioms(a in chain(), b in chain(), k in -4i64..=4) {
            prop_assert_eq!(a.norm() == 0, a.is_zero());
            prop_assert!(a.add(&b).norm() <= a.norm() + b.norm());
            prop_assert_eq!(a.scale(k).norm(), k.unsigned_abs() * a.norm());
            prop_assert!(a.iter().all(|(_, v)| v != 0));
        }
    }
}
