//! Coarse embeddings between balls: vertex maps, distortion envelopes, the extended complex
//! with its image subcomplex, and the metric and filling checks run on it.

mod extend;
mod verify;

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{build_cayley_ball, build_grid_complex, render_label, CellComplex, ComplexError, GroupOracle, VertexLabel};
use crate::filling::FillError;

pub use extend::{build_extended_complex, ExtendedComplex};
pub use verify::{collision_bound, compare_fillings, qi_verify, CollisionReport, FillingComparison, FillingRow, QiReport};

#[derive(Clone, Debug)]
pub enum Space {
    /// ℤⁿ with its cubical grid.
    Grid(usize),
    Group(GroupOracle),
}

impl Space {
    pub fn ball(&self, radius: u32) -> Result<CellComplex, ComplexError> {
        match self {
            Space::Grid(n) => build_grid_complex(*n, radius),
            Space::Group(g) => build_cayley_ball(g, radius),
        }
    }

    fn names(&self) -> Vec<String> {
        match self {
            Space::Grid(_) => Vec::new(),
            Space::Group(g) => g.presentation().generator_names.clone(),
        }
    }

    /// Parses a vertex label in the serialization format of this space's balls.
    pub fn parse_label(&self, text: &str) -> Result<VertexLabel, String> {
        match self {
            Space::Grid(n) => {
                let coords: Vec<i64> = text
                    .split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| format!("bad coordinate {t:?}")))
                    .collect::<Result<_, _>>()?;
                if coords.len() != *n {
                    return Err(format!("expected {n} coordinates, got {}", coords.len()));
                }
                Ok(VertexLabel::Point(coords))
            }
            Space::Group(g) => {
                let w = g.presentation().parse_word(text).map_err(|e| e.to_string())?;
                Ok(VertexLabel::Word(g.normal_form(&w)))
            }
        }
    }

    /// Extra target radius needed so that short geodesics between images stay in the ball.
    fn padding(&self, c: u32) -> u32 {
        match self {
            Space::Grid(_) => 0,
            Space::Group(g) => c + g.presentation().relators.iter().map(|r| r.len() as u32).max().unwrap_or(0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingKind {
    /// ℤ → ℤ², n ↦ (⌊log₂(|n|+1)⌋, n).
    LogMap,
    /// ℤ → ℤ², n ↦ (n, 0).
    AxisInclusion,
    /// ℤ² → ℤ³, (x, y) ↦ (x, y, 0).
    PlaneInclusion,
    File,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex map is not injective: {a} and {b} have the same image")]
    NonInjective { a: String, b: String },
    #[error("no image given for source vertex {0}")]
    Unmapped(String),
    #[error("image {0} lies outside the target ball; enlarge the target radius")]
    ImageOutsideBall(String),
    #[error("no path of length at most {c} from {from} to {to} inside the target ball; enlarge the target radius")]
    GeodesicEscapesBall { from: String, to: String, c: u32 },
    #[error("image of the boundary of source face {0} does not bound in the target ball; enlarge the target radius")]
    UnfillableLoop(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Fill(#[from] FillError),
}

#[derive(Clone, Debug)]
pub struct EmbeddingSpec {
    pub source: Space,
    pub target: Space,
    pub kind: EmbeddingKind,
    table: HashMap<VertexLabel, VertexLabel>,
}

pub fn builtin_logmap() -> EmbeddingSpec {
    EmbeddingSpec { source: Space::Grid(1), target: Space::Grid(2), kind: EmbeddingKind::LogMap, table: HashMap::new() }
}

pub fn builtin_axis_inclusion() -> EmbeddingSpec {
    EmbeddingSpec { source: Space::Grid(1), target: Space::Grid(2), kind: EmbeddingKind::AxisInclusion, table: HashMap::new() }
}

pub fn builtin_plane_inclusion() -> EmbeddingSpec {
    EmbeddingSpec { source: Space::Grid(2), target: Space::Grid(3), kind: EmbeddingKind::PlaneInclusion, table: HashMap::new() }
}

fn floor_log2(n: u64) -> i64 {
    63 - n.leading_zeros() as i64
}

impl EmbeddingSpec {
    /// Reads `x₁ … x_k -> y₁ … y_m` lines; `#` starts a comment.
    pub fn from_file(text: &str, source: Space, target: Space) -> Result<Self, EmbedError> {
        let mut table = HashMap::new();
        let mut seen: HashMap<VertexLabel, String> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| EmbedError::Parse { line: i + 1, message };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `->`".into()))?;
            let x = source.parse_label(lhs.trim()).map_err(err)?;
            let y = target.parse_label(rhs.trim()).map_err(err)?;
            if table.contains_key(&x) {
                return Err(err(format!("source vertex {} mapped twice", lhs.trim())));
            }
            if let Some(prev) = seen.get(&y) {
                return Err(EmbedError::NonInjective { a: prev.clone(), b: lhs.trim().to_string() });
            }
            seen.insert(y.clone(), lhs.trim().to_string());
            table.insert(x, y);
        }
        Ok(EmbeddingSpec { source, target, kind: EmbeddingKind::File, table })
    }

    pub fn map(&self, v: &VertexLabel) -> Option<VertexLabel> {
        match (self.kind, v) {
            (EmbeddingKind::LogMap, VertexLabel::Point(p)) if p.len() == 1 => {
                Some(VertexLabel::Point(vec![floor_log2(p[0].unsigned_abs() + 1), p[0]]))
            }
            (EmbeddingKind::AxisInclusion, VertexLabel::Point(p)) if p.len() == 1 => Some(VertexLabel::Point(vec![p[0], 0])),
            (EmbeddingKind::PlaneInclusion, VertexLabel::Point(p)) if p.len() == 2 => {
                Some(VertexLabel::Point(vec![p[0], p[1], 0]))
            }
            (EmbeddingKind::File, _) => self.table.get(v).cloned(),
            _ => None,
        }
    }

    /// Image vertex ids in `z` for every vertex of `x`, checking totality and injectivity.
    pub fn vertex_map(&self, x: &CellComplex, z: &CellComplex) -> Result<Vec<usize>, EmbedError> {
        let names = self.source.names();
        let mut out = Vec::with_capacity(x.vertices.len());
        let mut hit: HashMap<usize, usize> = HashMap::new();
        for (v, label) in x.vertices.iter().enumerate() {
            let img = self.map(label).ok_or_else(|| EmbedError::Unmapped(render_label(label, &names)))?;
            let id = z.vertex_id(&img).ok_or_else(|| EmbedError::ImageOutsideBall(render_label(&img, &z.generator_names)))?;
            if let Some(&u) = hit.get(&id) {
                return Err(EmbedError::NonInjective { a: x.render_label(u), b: x.render_label(v) });
            }
            hit.insert(id, v);
            out.push(id);
        }
        Ok(out)
    }

    /// Smallest target radius whose ball contains the images of `x`, padded for short geodesics.
    pub fn target_radius(&self, x: &CellComplex, c: u32) -> Result<u32, EmbedError> {
        let mut r = 0u32;
        for (v, label) in x.vertices.iter().enumerate() {
            let img = self.map(label).ok_or_else(|| EmbedError::Unmapped(x.render_label(v)))?;
            let depth = match &img {
                VertexLabel::Point(p) => p.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as u32,
                VertexLabel::Word(w) => w.len() as u32,
                VertexLabel::Sub { .. } => 0,
            };
            r = r.max(depth);
        }
        Ok(r + self.target.padding(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliEstimate {
    /// Source distance ↦ (min, max) target distance over the pairs examined.
    pub per_distance: BTreeMap<u32, (u32, u32)>,
    pub lipschitz_c: u32,
    /// Heuristic only: the lower envelope never rises above its value at distance 1.
    pub not_coarse: bool,
    pub pairs: usize,
}

impl ModuliEstimate {
    /// `sup{t : ρ₋(t) ≤ bound}` over the observed envelope.
    pub fn last_below(&self, bound: u32) -> u32 {
        self.per_distance.iter().filter(|(_, &(lo, _))| lo <= bound).map(|(&t, _)| t).max().unwrap_or(0)
    }
}

/// Pairs of vertex ids in `pool`: all of them when there are at most `sample_count`, else a seeded sample.
pub(crate) fn pairs(pool: &[usize], sample_count: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = pool.len();
    if n < 2 {
        return Vec::new();
    }
    if n * (n - 1) / 2 <= sample_count {
        return (0..n).flat_map(|i| (i + 1..n).map(move |j| (pool[i], pool[j]))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(usize, usize)> = (0..sample_count)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (pool[i.min(j)], pool[i.max(j)])
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// BFS distances from each distinct first coordinate of `pairs`, evaluated at the second.
pub(crate) fn pair_distances(k: &CellComplex, pairs: &[(usize, usize)]) -> Vec<u32> {
    let adj = k.adjacency();
    let mut by_first: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(a, _)) in pairs.iter().enumerate() {
        by_first.entry(a).or_default().push(i);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_first.into_iter().collect();
    let parts: Vec<Vec<(usize, u32)>> = groups
        .par_iter()
        .map(|(a, idx)| {
            let d = k.bfs(&adj, *a);
            idx.iter().map(|&i| (i, d[pairs[i].1])).collect()
        })
        .collect();
    let mut out = vec![0; pairs.len()];
    for (i, d) in parts.into_iter().flatten() {
        out[i] = d;
    }
    out
}

/// Distortion envelopes over vertex pairs of `x`, with distances measured in the ball graphs of `x` and `z`.
pub fn estimate_moduli_on(spec: &EmbeddingSpec, x: &CellComplex, z: &CellComplex, sample_count: usize, seed: u64) -> Result<ModuliEstimate, EmbedError> {
    let phi = spec.vertex_map(x, z)?;
    let pool: Vec<usize> = (0..x.vertices.len()).collect();
    let ps = pairs(&pool, sample_count, seed);
    let dx = pair_distances(x, &ps);
    let img: Vec<(usize, usize)> = ps.iter().map(|&(a, b)| (phi[a], phi[b])).collect();
    let dz = pair_distances(z, &img);
    let mut per_distance: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for (&t, &s) in dx.iter().zip(&dz) {
        let e = per_distance.entry(t).or_insert((s, s));
        e.0 = e.0.min(s);
        e.1 = e.1.max(s);
    }
    // adjacent pairs are always examined so that ρ₊(1) is exact
    for e in &x.edges {
        let d = pair_distances(z, &[(phi[e.tail], phi[e.head])])[0];
        let v = per_distance.entry(1).or_insert((d, d));
        v.0 = v.0.min(d);
        v.1 = v.1.max(d);
    }
    let lipschitz_c = per_distance.get(&1).map_or(0, |p| p.1);
    let base = per_distance.get(&1).map_or(0, |p| p.0);
    let top = per_distance.keys().copied().max().unwrap_or(0);
    let not_coarse = top > 1 && per_distance.range(top.div_ceil(2)..).all(|(_, &(lo, _))| lo <= base);
    Ok(ModuliEstimate { per_distance, lipschitz_c, not_coarse, pairs: ps.len() })
}

/// Builds the source ball of the given radius and a target ball containing its image.
pub fn estimate_moduli(spec: &EmbeddingSpec, source_radius: u32, sample_count: usize, seed: u64) -> Result<ModuliEstimate, EmbedError> {
    let x = spec.source.ball(source_radius)?;
    let z = spec.target.ball(spec.target_radius(&x, 0)?)?;
    estimate_moduli_on(spec, &x, &z, sample_count, seed)
}

/// Source vertices of `x` that are far enough from the ball boundary.
pub(crate) fn inner_vertices(x: &CellComplex) -> Vec<usize> {
    let inner = crate::filling::inner_radius(x.radius);
    (0..x.vertices.len()).filter(|&v| x.depth[v] <= inner).collect()
}

#[cfg(test)]
pub(crate) fn distinct<T: std::hash::Hash + Eq + Clone>(items: &[T]) -> bool {
    let mut seen = std::collections::HashSet::new();
    items.iter().all(|i| seen.insert(i.clone()))
}
