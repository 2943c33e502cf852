use std::collections::{HashMap, HashSet, VecDeque};

use super::{Cell, CellComplex, ComplexError, EdgeLabel, GroupOracle, Strategy, VertexLabel};
use crate::presentation::{Letter, Word};

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

const NONE: usize = usize::MAX;

pub fn build_cayley_ball(oracle: &GroupOracle, radius: u32) -> Result<CellComplex, ComplexError> {
    build_cayley_ball_capped(oracle, radius, DEFAULT_VERTEX_CAP)
}

/// Ball of the given radius in the Cayley 2-complex, discovered breadth-first.
pub fn build_cayley_ball_capped(oracle: &GroupOracle, radius: u32, cap: usize) -> Result<CellComplex, ComplexError> {
    let p = oracle.presentation();
    if let Some(r) = p.relators.iter().find(|r| r.len() <= 2) {
        return Err(ComplexError::NonSimplicial(format!(
            "relator `{}` has length {} and would give a loop or parallel edges",
            p.render_word(r.canonical()),
            r.len()
        )));
    }
    let ngen = oracle.generator_count();
    let nl = 2 * ngen;
    let verify = oracle.strategy() == Strategy::Dehn;

    let mut words: Vec<Word> = vec![Word::empty()];
    let mut depth: Vec<u32> = vec![0];
    let mut index: HashMap<Word, usize> = HashMap::from([(Word::empty(), 0)]);
    let mut buckets: HashMap<(Vec<i64>, u32), Vec<usize>> = HashMap::new();
    if verify {
        buckets.insert((oracle.abelian_invariant(&Word::empty()), 0), vec![0]);
    }
    let mut nbr: Vec<usize> = vec![NONE; nl];

    let mut v = 0;
    while v < words.len() {
        let d = depth[v];
        for li in 0..nl {
            if nbr[v * nl + li] != NONE {
                continue;
            }
            let l = Letter::from_index(li);
            let w = oracle.normal_form(&words[v].mul_letter(l));
            let mut found = index.get(&w).copied();
            if found.is_none() && verify {
                let inv = oracle.abelian_invariant(&w);
                'search: for dd in d.saturating_sub(1)..=d + 1 {
                    if let Some(list) = buckets.get(&(inv.clone(), dd)) {
                        for &u in list {
                            if oracle.same_element(&w, &words[u]) {
                                found = Some(u);
                                break 'search;
                            }
                        }
                    }
                }
                if let Some(u) = found {
                    index.insert(w.clone(), u);
                }
            }
            let id = match found {
                Some(u) => u,
                None if d < radius => {
                    let u = words.len();
                    if u >= cap {
                        return Err(ComplexError::Overflow { cap });
                    }
                    if verify {
                        buckets.entry((oracle.abelian_invariant(&w), d + 1)).or_default().push(u);
                    }
                    index.insert(w.clone(), u);
                    words.push(w);
                    depth.push(d + 1);
                    nbr.extend(std::iter::repeat_n(NONE, nl));
                    u
                }
                None => continue,
            };
            nbr[v * nl + li] = id;
            nbr[id * nl + l.inverse().index()] = v;
        }
        v += 1;
    }

    let mut k = CellComplex::new(radius, p.generator_names.clone());
    for (w, &dp) in words.into_iter().zip(&depth) {
        k.push_vertex(VertexLabel::Word(w), dp);
    }
    let n = k.vertices.len();
    let mut eid = vec![NONE; n * ngen];
    for v in 0..n {
        for g in 0..ngen {
            let u = nbr[v * nl + 2 * g];
            if u != NONE {
                eid[v * ngen + g] = k.push_edge(v, u, EdgeLabel::Gen(g as u32))?;
            }
        }
    }

    let mut seen: HashSet<Vec<(usize, i8)>> = HashSet::new();
    for v in 0..n {
        for rel in &p.relators {
            let mut cur = v;
            let mut path = Vec::with_capacity(rel.len());
            let mut inside = true;
            for &l in rel.letters() {
                let next = nbr[cur * nl + l.index()];
                if next == NONE {
                    inside = false;
                    break;
                }
                let g = l.gen as usize;
                if l.inv {
                    path.push((eid[next * ngen + g], -1i8));
                } else {
                    path.push((eid[cur * ngen + g], 1i8));
                }
                cur = next;
            }
            if !inside {
                continue;
            }
            if cur != v {
                return Err(ComplexError::InconsistentNormalForm { vertex: v });
            }
            if seen.insert(cycle_key(&path)) {
                k.faces2.push(Cell { boundary: path });
            }
        }
    }
    Ok(k)
}

/// Least representative of a signed edge cycle under rotation and reversal.
pub(crate) fn cycle_key(path: &[(usize, i8)]) -> Vec<(usize, i8)> {
    let rev: Vec<(usize, i8)> = path.iter().rev().map(|&(e, s)| (e, -s)).collect();
    let n = path.len();
    let mut best: Option<Vec<(usize, i8)>> = None;
    for seq in [path, &rev[..]] {
        for k in 0..n {
            let rot: Vec<(usize, i8)> = seq[k..].iter().chain(seq[..k].iter()).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

pub fn build_grid_complex(rank: usize, radius: u32) -> Result<CellComplex, ComplexError> {
    build_grid_complex_capped(rank, radius, DEFAULT_VERTEX_CAP)
}

/// Cubical complex on the lattice points of sup-norm at most `radius` in ℤ^rank.
///
/// Squares run counterclockwise in their (i, j) plane; cube boundaries carry the
/// outward orientation.
pub fn build_grid_complex_capped(rank: usize, radius: u32, cap: usize) -> Result<CellComplex, ComplexError> {
    if !(1..=3).contains(&rank) {
        return Err(ComplexError::BadRank(rank));
    }
    let side = 2 * radius as usize + 1;
    if side.checked_pow(rank as u32).is_none_or(|n| n > cap) {
        return Err(ComplexError::Overflow { cap });
    }
    let r = radius as i64;
    let names = (1..=rank).map(|i| format!("e{i}")).collect();
    let mut k = CellComplex::new(radius, names);
    let sup = |p: &[i64]| p.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u32;

    let origin = vec![0i64; rank];
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut queue = VecDeque::from([origin.clone()]);
    index.insert(origin.clone(), k.push_vertex(VertexLabel::Point(origin), 0));
    while let Some(p) = queue.pop_front() {
        for i in 0..rank {
            for step in [1, -1] {
                let mut q = p.clone();
                q[i] += step;
                if q[i].abs() <= r && !index.contains_key(&q) {
                    let id = k.push_vertex(VertexLabel::Point(q.clone()), sup(&q));
                    index.insert(q.clone(), id);
                    queue.push_back(q);
                }
            }
        }
    }

    let shift = |p: &[i64], axes: &[usize]| -> Vec<i64> {
        let mut q = p.to_vec();
        for &a in axes {
            q[a] += 1;
        }
        q
    };
    let points: Vec<Vec<i64>> = k.vertices.iter().map(|l| match l {
        VertexLabel::Point(p) => p.clone(),
        _ => unreachable!(),
    }).collect();

    let mut edge_at: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, p) in points.iter().enumerate() {
        for i in 0..rank {
            if let Some(&u) = index.get(&shift(p, &[i])) {
                let e = k.push_edge(v, u, EdgeLabel::Axis(i as u8))?;
                edge_at.insert((v, i), e);
            }
        }
    }

    let mut square_at: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (v, p) in points.iter().enumerate() {
        for i in 0..rank {
            for j in i + 1..rank {
                if !index.contains_key(&shift(p, &[i, j])) {
                    continue;
                }
                let vi = index[&shift(p, &[i])];
                let vj = index[&shift(p, &[j])];
                let boundary = vec![
                    (edge_at[&(v, i)], 1),
                    (edge_at[&(vi, j)], 1),
                    (edge_at[&(vj, i)], -1),
                    (edge_at[&(v, j)], -1),
                ];
                square_at.insert((v, i, j), k.faces2.len());
                k.faces2.push(Cell { boundary });
            }
        }
    }

    if rank == 3 {
        for (v, p) in points.iter().enumerate() {
            if !index.contains_key(&shift(p, &[0, 1, 2])) {
                continue;
            }
            let at = |axis: usize| index[&shift(p, &[axis])];
            let boundary = vec![
                (square_at[&(at(0), 1, 2)], 1),
                (square_at[&(v, 1, 2)], -1),
                (square_at[&(at(1), 0, 2)], -1),
                (square_at[&(v, 0, 2)], 1),
                (square_at[&(at(2), 0, 1)], 1),
                (square_at[&(v, 0, 1)], -1),
            ];
            k.faces3.push(Cell { boundary });
        }
    }
    k.grid_rank = Some(rank);
    Ok(k)
}
