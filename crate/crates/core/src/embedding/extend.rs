use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{EmbedError, EmbeddingSpec};
use crate::chains::{apply_boundary, Chain};
use crate::complex::{Cell, CellComplex, EdgeLabel};
use crate::filling::{fvol, FillError, SolverBudget};

/// The target ball with extra edges between close vertices, the cellular map from the source
/// ball, and the image subcomplex `m`.
#[derive(Clone, Debug)]
pub struct ExtendedComplex {
    pub source: CellComplex,
    pub y: CellComplex,
    pub c: u32,
    /// Edges and faces of `y` with these ids or higher were added to the target ball.
    pub first_added_edge: usize,
    pub first_added_face: usize,
    /// Geodesic 1-chain in the target ball behind each added edge, by added-edge offset.
    pub geodesics: Vec<Chain>,
    pub phi_vertex: Vec<usize>,
    pub phi_edge: Vec<(usize, i8)>,
    pub phi_face: Vec<Chain>,
    /// Largest number of 2-cells, with multiplicity, in the image of one source face.
    pub n: u64,
    pub m: CellComplex,
    m_vertex: HashMap<usize, usize>,
    m_edge: HashMap<usize, (usize, i8)>,
    m_face: HashMap<usize, usize>,
}

fn letter(k: &CellComplex, from: usize, e: usize) -> usize {
    let back = k.edges[e].tail != from;
    let base = match k.edges[e].label {
        EdgeLabel::Gen(g) => 2 * g as usize,
        EdgeLabel::Axis(i) => 2 * i as usize,
        EdgeLabel::Added | EdgeLabel::Chord => usize::MAX / 2,
    };
    base + back as usize
}

fn bounded_bfs(adj: &[Vec<usize>], from: usize, limit: u32) -> HashMap<usize, u32> {
    let mut dist = HashMap::from([(from, 0u32)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == limit {
            continue;
        }
        for &u in &adj[v] {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(u) {
                e.insert(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// ShortLex-least geodesic from `u` to `v`, given distances to `v`.
fn shortlex_path(k: &CellComplex, adj: &[Vec<usize>], to_v: &HashMap<usize, u32>, u: usize) -> Vec<(usize, i8)> {
    let mut path = Vec::new();
    let mut cur = u;
    while to_v[&cur] > 0 {
        let want = to_v[&cur] - 1;
        let (e, s, next) = adj[cur]
            .iter()
            .filter(|w| to_v.get(w) == Some(&want))
            .map(|&w| {
                let (e, s) = k.edge_between(cur, w).expect("adjacent");
                (e, s, w)
            })
            .min_by_key(|&(e, _, _)| letter(k, cur, e))
            .expect("a neighbour one step closer");
        path.push((e, s));
        cur = next;
    }
    path
}

/// Builds Y from the target ball `z`: an edge and a bigon-style face `e · γ_e⁻¹` for every pair at
/// distance 2..=C, then maps the source ball `x` cellularly into it.
pub fn build_extended_complex(
    x: &CellComplex,
    z: &CellComplex,
    spec: &EmbeddingSpec,
    c: u32,
    budget: &SolverBudget,
) -> Result<ExtendedComplex, EmbedError> {
    let phi_vertex = spec.vertex_map(x, z)?;

    let mut y = z.clone();
    let first_added_edge = y.edges.len();
    let first_added_face = y.faces2.len();
    let adj = z.adjacency();
    let mut geodesics = Vec::new();
    if c >= 2 {
        y.invalidate();
        let near: Vec<HashMap<usize, u32>> = (0..z.vertices.len()).map(|v| bounded_bfs(&adj, v, c)).collect();
        for u in 0..z.vertices.len() {
            let mut partners: Vec<usize> = near[u].iter().filter(|(&v, &d)| v > u && d >= 2).map(|(&v, _)| v).collect();
            partners.sort_unstable();
            for v in partners {
                let path = shortlex_path(z, &adj, &near[v], u);
                let e = y.push_edge(u, v, EdgeLabel::Added)?;
                let mut boundary = vec![(e, 1i8)];
                boundary.extend(path.iter().rev().map(|&(f, s)| (f, -s)));
                y.faces2.push(Cell { boundary });
                geodesics.push(Chain::from_pairs(1, path.iter().map(|&(f, s)| (f, s as i64))));
            }
        }
    }

    let names = &z.generator_names;
    let mut phi_edge = Vec::with_capacity(x.edges.len());
    for e in &x.edges {
        let (u, v) = (phi_vertex[e.tail], phi_vertex[e.head]);
        let img = y.edge_between(u, v).ok_or_else(|| EmbedError::GeodesicEscapesBall {
            from: crate::complex::render_label(&z.vertices[u], names),
            to: crate::complex::render_label(&z.vertices[v], names),
            c,
        })?;
        phi_edge.push(img);
    }

    let push1 = |ch: &Chain| -> Chain {
        let mut out = Chain::zero(1);
        for (e, k) in ch.iter() {
            let (f, s) = phi_edge[e];
            out.add_to(f, k * s as i64);
        }
        out
    };
    let mut phi_face = Vec::with_capacity(x.faces2.len());
    for f in 0..x.faces2.len() {
        let loop_y = push1(&apply_boundary(x, &Chain::cell(2, f)));
        let mut image = Chain::zero(2);
        let mut sigma = Chain::zero(1);
        for (e, k) in loop_y.iter() {
            if e >= first_added_edge {
                image.add_to(first_added_face + (e - first_added_edge), k);
                sigma = sigma.add(&geodesics[e - first_added_edge].scale(k));
            } else {
                sigma.add_to(e, k);
            }
        }
        match fvol(z, &sigma, budget) {
            Ok(r) => image = image.add(&r.filling),
            Err(FillError::NoFilling) => return Err(EmbedError::UnfillableLoop(f)),
            Err(e) => return Err(e.into()),
        }
        phi_face.push(image);
    }
    let n = phi_face.iter().map(|c| c.norm()).max().unwrap_or(0);

    let mut ext = ExtendedComplex {
        source: x.clone(),
        y,
        c,
        first_added_edge,
        first_added_face,
        geodesics,
        phi_vertex,
        phi_edge,
        phi_face,
        n,
        m: CellComplex::new(x.radius, z.generator_names.clone()),
        m_vertex: HashMap::new(),
        m_edge: HashMap::new(),
        m_face: HashMap::new(),
    };
    ext.build_image()?;
    Ok(ext)
}

impl ExtendedComplex {
    fn build_image(&mut self) -> Result<(), EmbedError> {
        let y = &self.y;
        let mut faces: Vec<usize> = self.phi_face.iter().flat_map(|c| c.support().collect::<Vec<_>>()).collect();
        faces.sort_unstable();
        faces.dedup();
        let mut edges: Vec<usize> = self.phi_edge.iter().map(|p| p.0).collect();
        edges.extend(faces.iter().flat_map(|&f| y.faces2[f].boundary.iter().map(|p| p.0)));
        edges.sort_unstable();
        edges.dedup();
        let mut verts: Vec<usize> = self.phi_vertex.clone();
        verts.extend(edges.iter().flat_map(|&e| [y.edges[e].tail, y.edges[e].head]));
        verts.sort_unstable();
        verts.dedup();

        let mut m = CellComplex::new(self.source.radius, y.generator_names.clone());
        for &v in &verts {
            let id = m.push_vertex(y.vertices[v].clone(), y.depth[v]);
            self.m_vertex.insert(v, id);
        }
        for &e in &edges {
            let ed = &y.edges[e];
            let id = m.push_edge(self.m_vertex[&ed.tail], self.m_vertex[&ed.head], ed.label)?;
            self.m_edge.insert(e, (id, 1));
        }
        for &f in &faces {
            let boundary = y.faces2[f].boundary.iter().map(|&(e, s)| (self.m_edge[&e].0, s)).collect();
            self.m_face.insert(f, m.faces2.len());
            m.faces2.push(Cell { boundary });
        }
        self.m = m;
        Ok(())
    }

    /// φ₊ on chains of the source ball.
    pub fn pushforward(&self, c: &Chain) -> Chain {
        let mut out = Chain::zero(c.dim);
        for (id, k) in c.iter() {
            match c.dim {
                0 => out.add_to(self.phi_vertex[id], k),
                1 => {
                    let (e, s) = self.phi_edge[id];
                    out.add_to(e, k * s as i64);
                }
                _ => out = out.add(&self.phi_face[id].scale(k)),
            }
        }
        out
    }

    /// The same chain with cell ids of the image subcomplex; `None` if it leaves the image.
    pub fn to_image(&self, c: &Chain) -> Option<Chain> {
        let mut out = Chain::zero(c.dim);
        for (id, k) in c.iter() {
            let (m, s) = match c.dim {
                0 => (*self.m_vertex.get(&id)?, 1),
                1 => *self.m_edge.get(&id)?,
                2 => (*self.m_face.get(&id)?, 1),
                _ => return None,
            };
            out.add_to(m, k * s as i64);
        }
        Some(out)
    }

    pub fn image_vertex(&self, y_vertex: usize) -> Option<usize> {
        self.m_vertex.get(&y_vertex).copied()
    }

    /// Added edges as target-vertex pairs.
    pub fn added_edges(&self) -> Vec<(usize, usize)> {
        self.y.edges[self.first_added_edge..].iter().map(|e| (e.tail, e.head)).collect()
    }

    /// Source faces grouped by the 2-cells of `y` their images contain.
    pub(crate) fn face_preimages(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (f, c) in self.phi_face.iter().enumerate() {
            for g in c.support() {
                out.entry(g).or_default().push(f);
            }
        }
        out
    }
}
