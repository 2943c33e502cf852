//! Cycle sources and sampled filling functions.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fvol, padding_check, FillError, SolverBudget};
use crate::chains::{apply_boundary, Chain};
use crate::complex::{CellComplex, VertexLabel};

/// Largest ℓ for which simple loops are enumerated exhaustively.
pub const EXHAUSTIVE_MAX: u64 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleSource {
    /// Every simple edge loop through the base vertex, up to orientation.
    Exhaustive { max_norm: u64 },
    /// Geodesic triangles on the base vertex and two random vertices.
    Random { seed: u64, count: usize },
    Explicit(Vec<Chain>),
    /// Boundaries of axis-parallel boxes in a grid, centred on the origin.
    Boxes { max_norm: u64, balanced: bool },
    /// Boundaries of random connected sets of top cells grown from the base vertex.
    Patches { seed: u64, count: usize, max_cells: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfileSample {
    pub ell: u64,
    pub fill: u64,
    pub count: usize,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampledVolume {
    pub norm: u64,
    pub volume: u64,
    pub certified: bool,
}

pub fn inner_radius(radius: u32) -> u32 {
    radius - radius.div_ceil(3)
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

impl CycleSource {
    /// Nonzero cycles supported on vertices of depth at most `inner`.
    pub fn cycles(&self, k: &CellComplex, inner: u32) -> Vec<Chain> {
        let out = match self {
            CycleSource::Exhaustive { max_norm } => simple_loops(k, inner, (*max_norm).min(EXHAUSTIVE_MAX) as usize),
            CycleSource::Random { seed, count } => random_triangles(k, inner, *seed, *count),
            CycleSource::Explicit(cs) => cs.clone(),
            CycleSource::Boxes { max_norm, balanced } => boxes(k, inner, *max_norm, *balanced),
            CycleSource::Patches { seed, count, max_cells } => patches(k, inner, *seed, *count, *max_cells),
        };
        out.into_iter().filter(|c| !c.is_zero()).collect()
    }
}

fn path_chain(k: &CellComplex, path: &[usize]) -> Chain {
    let mut c = Chain::zero(1);
    for w in path.windows(2) {
        let (e, s) = k.edge_between(w[0], w[1]).expect("consecutive path vertices are adjacent");
        c.add_to(e, s as i64);
    }
    c
}

fn simple_loops(k: &CellComplex, inner: u32, max_len: usize) -> Vec<Chain> {
    if k.vertices.is_empty() {
        return Vec::new();
    }
    let adj = k.adjacency();
    let dist = k.bfs(&adj, 0);
    let mut seen: BTreeSet<Vec<(usize, i64)>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut path = vec![0usize];
    let mut on_path = vec![false; k.vertices.len()];
    on_path[0] = true;

    fn dfs(
        k: &CellComplex,
        adj: &[Vec<usize>],
        dist: &[u32],
        inner: u32,
        max_len: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        seen: &mut BTreeSet<Vec<(usize, i64)>>,
        out: &mut Vec<Chain>,
    ) {
        let v = *path.last().unwrap();
        for &u in &adj[v] {
            if u == 0 && path.len() >= 3 {
                path.push(0);
                let c = path_chain(k, path);
                path.pop();
                let key: Vec<(usize, i64)> = c.iter().collect();
                let neg: Vec<(usize, i64)> = c.scale(-1).iter().collect();
                if !seen.contains(&neg) && seen.insert(key) {
                    out.push(c);
                }
                continue;
            }
            if on_path[u] || k.depth[u] > inner || path.len() + dist[u] as usize > max_len {
                continue;
            }
            on_path[u] = true;
            path.push(u);
            dfs(k, adj, dist, inner, max_len, path, on_path, seen, out);
            path.pop();
            on_path[u] = false;
        }
    }
    dfs(k, &adj, &dist, inner, max_len, &mut path, &mut on_path, &mut seen, &mut out);
    out
}

fn bfs_parents(adj: &[Vec<usize>], from: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }
    parent
}

/// First-found BFS geodesic from `from` to `to`.
pub fn geodesic(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let parent = bfs_parents(adj, from);
    if parent[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    Some(path)
}

fn random_triangles(k: &CellComplex, inner: u32, seed: u64, count: usize) -> Vec<Chain> {
    let pool: Vec<usize> = (0..k.vertices.len()).filter(|&v| k.depth[v] <= inner).collect();
    if pool.len() < 2 {
        return Vec::new();
    }
    let adj = k.adjacency();
    let from_base = bfs_parents(&adj, 0);
    let to_base = |v: usize| {
        let mut p = vec![v];
        let mut x = v;
        while x != 0 {
            x = from_base[x];
            p.push(x);
        }
        p
    };
    (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = stream(seed, i);
            let u = pool[rng.gen_range(0..pool.len())];
            let v = pool[rng.gen_range(0..pool.len())];
            let mut walk: Vec<usize> = to_base(u).into_iter().rev().collect();
            walk.extend(geodesic(&adj, u, v)?.into_iter().skip(1));
            walk.extend(to_base(v).into_iter().skip(1));
            Some(path_chain(k, &walk))
        })
        .collect()
}

fn point(k: &CellComplex, v: usize) -> Option<&[i64]> {
    match &k.vertices[v] {
        VertexLabel::Point(p) => Some(p),
        _ => None,
    }
}

/// Top cells of a grid keyed by their minimal corner.
pub fn top_cells_by_corner(k: &CellComplex) -> HashMap<Vec<i64>, usize> {
    let d = k.dim();
    let mut out = HashMap::new();
    for id in 0..k.cell_count(d) {
        let pts: Vec<&[i64]> = k.cell_vertices(d, id).into_iter().filter_map(|v| point(k, v)).collect();
        if let Some(min) = pts.iter().min() {
            out.insert(min.to_vec(), id);
        }
    }
    out
}

/// Boundary of the box `[corner, corner + dims]` in a grid whose top cells span it; `None` if it leaves the grid.
pub fn box_boundary(k: &CellComplex, corners: &HashMap<Vec<i64>, usize>, corner: &[i64], dims: &[i64]) -> Option<Chain> {
    let d = dims.len();
    let mut sum = Chain::zero(d);
    let mut idx = vec![0i64; d];
    loop {
        let p: Vec<i64> = corner.iter().zip(&idx).map(|(c, i)| c + i).collect();
        sum.add_to(*corners.get(&p)?, 1);
        let mut t = 0;
        while t < d {
            idx[t] += 1;
            if idx[t] < dims[t] {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == d {
            break;
        }
    }
    Some(apply_boundary(k, &sum))
}

fn boxes(k: &CellComplex, inner: u32, max_norm: u64, balanced: bool) -> Vec<Chain> {
    let rank = match k.vertices.first() {
        Some(VertexLabel::Point(p)) => p.len(),
        _ => return Vec::new(),
    };
    if rank < 2 || k.dim() != rank {
        return Vec::new();
    }
    let corners = top_cells_by_corner(k);
    let side = 2 * inner as i64;
    let mut shapes: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        shapes = shapes.into_iter().flat_map(|s| (1..=side).map(move |a| [s.clone(), vec![a]].concat())).collect();
    }
    let mut out = Vec::new();
    for dims in shapes {
        if dims.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        if balanced && dims[rank - 1] - dims[0] > 1 {
            continue;
        }
        let norm: i64 = if rank == 2 {
            2 * (dims[0] + dims[1])
        } else {
            2 * (dims[0] * dims[1] + dims[1] * dims[2] + dims[0] * dims[2])
        };
        if norm as u64 > max_norm {
            continue;
        }
        let corner: Vec<i64> = dims.iter().map(|a| -(a / 2)).collect();
        if corner.iter().zip(&dims).any(|(c, a)| c + a > inner as i64 || -c > inner as i64) {
            continue;
        }
        if let Some(c) = box_boundary(k, &corners, &corner, &dims) {
            out.push(c);
        }
    }
    out
}

fn patches(k: &CellComplex, inner: u32, seed: u64, count: usize, max_cells: usize) -> Vec<Chain> {
    let d = k.dim();
    if d == 0 || max_cells == 0 {
        return Vec::new();
    }
    let m = k.boundary_matrix(d);
    let mt = k.boundary_transpose(d);
    let inside: Vec<bool> = (0..k.cell_count(d)).map(|c| k.cell_vertices(d, c).iter().all(|&v| k.depth[v] <= inner)).collect();
    let start: Vec<usize> = (0..k.cell_count(d)).filter(|&c| inside[c] && k.cell_vertices(d, c).contains(&0)).collect();
    if start.is_empty() {
        return Vec::new();
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let target = rng.gen_range(1..=max_cells);
            let first = *start.choose(&mut rng).unwrap();
            let mut sign: HashMap<usize, i64> = HashMap::from([(first, 1)]);
            let mut order = vec![first];
            let mut frontier: Vec<(usize, i64)> = Vec::new();
            let push_frontier = |c: usize, s: i64, sign: &HashMap<usize, i64>, frontier: &mut Vec<(usize, i64)>| {
                for &(r, a) in m.col(c) {
                    for &(g, b) in mt.col(r) {
                        if g != c && inside[g] && !sign.contains_key(&g) {
                            // orient g so the shared cell cancels
                            frontier.push((g, -s * a * b));
                        }
                    }
                }
            };
            push_frontier(first, 1, &sign, &mut frontier);
            while order.len() < target && !frontier.is_empty() {
                let (g, s) = frontier.swap_remove(rng.gen_range(0..frontier.len()));
                if sign.contains_key(&g) {
                    continue;
                }
                sign.insert(g, s);
                order.push(g);
                push_frontier(g, s, &sign, &mut frontier);
            }
            let sum = Chain::from_pairs(d, order.iter().map(|c| (*c, sign[c])));
            apply_boundary(k, &sum)
        })
        .collect()
}

/// Fills every cycle in parallel; with `padded`, a result counts as certified only if it is padding-stable there.
pub fn sample_volumes(
    k: &CellComplex,
    cycles: &[Chain],
    budget: &SolverBudget,
    padded: Option<&CellComplex>,
) -> Result<Vec<SampledVolume>, FillError> {
    cycles
        .par_iter()
        .map(|s| {
            let mut r = fvol(k, s, budget)?;
            let mut certified = r.certified;
            if let Some(big) = padded {
                certified &= padding_check(k, big, s, &mut r, budget);
            }
            Ok(SampledVolume { norm: s.norm(), volume: r.volume, certified })
        })
        .collect()
}

/// Max volume over cycles of norm at most ℓ, for each ℓ in `grid`.
pub fn profile_from_volumes(vols: &[SampledVolume], grid: &[u64]) -> Vec<ProfileSample> {
    grid.iter()
        .map(|&ell| {
            let within: Vec<&SampledVolume> = vols.iter().filter(|v| v.norm <= ell).collect();
            ProfileSample {
                ell,
                fill: within.iter().map(|v| v.volume).max().unwrap_or(0),
                count: within.len(),
                certified: within.iter().all(|v| v.certified),
            }
        })
        .collect()
}

pub fn profile(
    k: &CellComplex,
    source: &CycleSource,
    grid: &[u64],
    budget: &SolverBudget,
    padded: Option<&CellComplex>,
) -> Result<Vec<ProfileSample>, FillError> {
    let inner = inner_radius(k.radius);
    let max_ell = grid.iter().copied().max().unwrap_or(0);
    let cycles: Vec<Chain> = source.cycles(k, inner).into_iter().filter(|c| c.norm() <= max_ell).collect();
    Ok(profile_from_volumes(&sample_volumes(k, &cycles, budget, padded)?, grid))
}

pub fn restricted_fill(k: &CellComplex, source: &CycleSource, ell: u64, budget: &SolverBudget) -> Result<ProfileSample, FillError> {
    Ok(profile(k, source, &[ell], budget, None)?[0])
}
