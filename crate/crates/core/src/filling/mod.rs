//! Filling volumes, sampled filling functions, growth fits and the ≺ comparison.

mod growth;
mod ilp;
mod lp;
mod sample;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::chains::{apply_boundary, is_cycle, solve_with_plan, Chain, SolveError};
use crate::complex::{CellComplex, VertexLabel};

pub use growth::{compare_growth, growth_fit, log_grid, FitError, GrowthComparison, GrowthProfile, MIN_FIT_ELL};
pub use ilp::{min_l1_preimage, min_l1_preimage_with, IlpOutcome, SolverBudget};
pub use lp::{solve_lp, LpOutcome, LpProblem, PivotLimit};
pub use sample::{
    box_boundary, geodesic, inner_radius, profile, profile_from_volumes, restricted_fill, sample_volumes, top_cells_by_corner, CycleSource,
    ProfileSample, SampledVolume, EXHAUSTIVE_MAX,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Unique,
    Ilp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Unique => "UNIQUE",
            Method::Ilp => "ILP",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FillStrategy {
    #[default]
    Auto,
    ForceIlp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingResult {
    pub cycle: Chain,
    pub filling: Chain,
    pub volume: u64,
    pub method: Method,
    pub certified: bool,
    pub padding_stable: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FillError {
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("cannot fill a {dim}-cycle in a complex of dimension {complex_dim}")]
    DimensionTooHigh { dim: usize, complex_dim: usize },
    #[error("cycle does not bound within this complex")]
    NoFilling,
    #[error("solver budget exhausted before any filling was found")]
    BudgetExceeded,
    #[error(transparent)]
    PivotLimit(#[from] PivotLimit),
    #[error("filling coefficient does not fit in 64 bits")]
    Overflow,
}

/// Minimal ℓ¹ filling of the cycle `s` inside `k`.
pub fn fvol(k: &CellComplex, s: &Chain, budget: &SolverBudget) -> Result<FillingResult, FillError> {
    fvol_with(k, s, budget, FillStrategy::Auto)
}

pub fn fvol_with(k: &CellComplex, s: &Chain, budget: &SolverBudget, strategy: FillStrategy) -> Result<FillingResult, FillError> {
    let d = s.dim;
    if d + 1 > k.dim().max(1) || d + 1 > 3 {
        return Err(FillError::DimensionTooHigh { dim: d, complex_dim: k.dim() });
    }
    if !is_cycle(k, s) {
        return Err(FillError::NotACycle);
    }
    let done = |filling: Chain, method, certified| FillingResult {
        cycle: s.clone(),
        volume: filling.norm(),
        filling,
        method,
        certified,
        padding_stable: false,
    };
    if s.is_zero() {
        return Ok(done(Chain::zero(d + 1), Method::Unique, true));
    }
    if k.cell_count(d + 1) == 0 {
        return Err(FillError::NoFilling);
    }

    if strategy == FillStrategy::Auto && k.boundary_injective(d + 1) {
        let m = k.boundary_matrix(d + 1);
        let b = s.to_dense(m.rows());
        return match solve_with_plan(m, k.peel_plan(d + 1), &b) {
            Ok(Some(x)) => Ok(done(Chain::from_dense(d + 1, &x), Method::Unique, true)),
            Ok(None) | Err(SolveError::NonIntegral) => Err(FillError::NoFilling),
            Err(SolveError::Overflow) => Err(FillError::Overflow),
            Err(e) => panic!("unique solve failed on an injective boundary: {e}"),
        };
    }

    let target: BTreeMap<usize, i64> = s.iter().collect();
    let m = k.boundary_matrix(d + 1);
    let allowed = k.grid_rank().map(|_| bounding_box_cells(k, s));
    let out = min_l1_preimage_with(m, k.boundary_transpose(d + 1), allowed.as_deref(), &target, budget)?;
    let (x, certified) = match out {
        IlpOutcome::Optimal { x, .. } => (x, true),
        IlpOutcome::Budget { x, .. } => (x, false),
        IlpOutcome::Infeasible => return Err(FillError::NoFilling),
        IlpOutcome::BudgetNoIncumbent => return Err(FillError::BudgetExceeded),
    };
    let filling = Chain::from_pairs(d + 1, x);
    debug_assert_eq!(apply_boundary(k, &filling), *s);
    Ok(done(filling, Method::Ilp, certified))
}

/// Flags the (d+1)-cells inside the bounding box of the cycle's vertices. Clamping coordinates
/// to the box is a cellular chain map that fixes the cycle and never increases norm, so on a
/// grid some minimal filling always lives there.
fn bounding_box_cells(k: &CellComplex, s: &Chain) -> Vec<bool> {
    let coords = |v: usize| match &k.vertices[v] {
        VertexLabel::Point(p) => p.as_slice(),
        _ => unreachable!("grid vertices are points"),
    };
    let verts: Vec<usize> = s.support().flat_map(|c| k.cell_vertices(s.dim, c)).collect();
    let rank = coords(verts[0]).len();
    let lo: Vec<i64> = (0..rank).map(|i| verts.iter().map(|&v| coords(v)[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..rank).map(|i| verts.iter().map(|&v| coords(v)[i]).max().unwrap()).collect();
    (0..k.cell_count(s.dim + 1))
        .map(|c| k.cell_vertices(s.dim + 1, c).iter().all(|&v| coords(v).iter().enumerate().all(|(i, x)| lo[i] <= *x && *x <= hi[i])))
        .collect()
}

/// Carries a chain of `from` into `to` by matching cell vertex labels. `None` if some cell is missing.
pub fn transport_chain(from: &CellComplex, to: &CellComplex, c: &Chain) -> Option<Chain> {
    let vmap = |v: usize| to.vertex_id(&from.vertices[v]);
    let edge = |e: usize| -> Option<(usize, i8)> {
        let ed = &from.edges[e];
        to.edge_between(vmap(ed.tail)?, vmap(ed.head)?)
    };
    match c.dim {
        0 => {
            let mut out = Chain::zero(0);
            for (v, x) in c.iter() {
                out.add_to(vmap(v)?, x);
            }
            Some(out)
        }
        1 => {
            let mut out = Chain::zero(1);
            for (e, x) in c.iter() {
                let (id, s) = edge(e)?;
                out.add_to(id, x * s as i64);
            }
            Some(out)
        }
        2 => {
            let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut out = Chain::zero(2);
            for (f, x) in c.iter() {
                let mut bnd = Chain::zero(1);
                for &(e, s) in &from.faces2[f].boundary {
                    let (id, t) = edge(e)?;
                    bnd.add_to(id, (s * t) as i64);
                }
                let key: Vec<usize> = bnd.support().collect();
                if index.is_empty() {
                    for g in 0..to.faces2.len() {
                        let mut es: Vec<usize> = to.faces2[g].boundary.iter().map(|p| p.0).collect();
                        es.sort_unstable();
                        es.dedup();
                        index.insert(es, g);
                    }
                }
                let g = *index.get(&key)?;
                let theirs = apply_boundary(to, &Chain::cell(2, g));
                let sign = if theirs == bnd {
                    1
                } else if theirs == bnd.scale(-1) {
                    -1
                } else {
                    return None;
                };
                out.add_to(g, x * sign);
            }
            Some(out)
        }
        _ => None,
    }
}

/// Reruns the fill in a larger ball `big` containing `k`; records and returns whether the volume is unchanged.
pub fn padding_check(k: &CellComplex, big: &CellComplex, s: &Chain, result: &mut FillingResult, budget: &SolverBudget) -> bool {
    let stable = if s.is_zero() {
        true
    } else {
        match transport_chain(k, big, s) {
            Some(t) => matches!(fvol(big, &t, budget), Ok(r) if r.volume == result.volume && r.certified),
            None => false,
        }
    };
    result.padding_stable = stable;
    stable
}
