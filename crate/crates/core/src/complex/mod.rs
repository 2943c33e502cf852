//! Finite cell complexes: Cayley-complex balls, cubical grids, boundary matrices.

mod build;
mod matrix;
mod oracle;
mod subdivide;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde_json::{json, Value};
use thiserror::Error;

use crate::chains::{kernel_report_with_plan, PeelPlan};
use crate::presentation::Word;

pub use build::{build_cayley_ball, build_cayley_ball_capped, build_grid_complex, build_grid_complex_capped, DEFAULT_VERTEX_CAP};
pub use matrix::SparseIntMatrix;
pub use oracle::{GroupOracle, Strategy};
pub use subdivide::{subdivide_cell, Corner, SubdivisionPattern};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    Word(Word),
    Point(Vec<i64>),
    /// k-th new vertex created when subdividing a face.
    Sub { face: usize, index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Gen(u32),
    Axis(u8),
    Added,
    Chord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub label: EdgeLabel,
}

/// A cell given by its signed boundary: edges in walk order for 2-cells, 2-cells for 3-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub boundary: Vec<(usize, i8)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("ball exceeds the vertex cap of {cap}")]
    Overflow { cap: usize },
    #[error("1-skeleton is not simplicial: {0}")]
    NonSimplicial(String),
    #[error("relator trace from vertex {vertex} does not close; normal form is inconsistent")]
    InconsistentNormalForm { vertex: usize },
    #[error("pattern boundary does not match face {face}")]
    MismatchedBoundary { face: usize },
    #[error("grid rank must be 1..=3, got {0}")]
    BadRank(usize),
    #[error("no cell {id} in dimension {dim}")]
    NoSuchCell { dim: usize, id: usize },
}

#[derive(Clone, Debug, Default)]
struct Caches {
    boundary: [OnceLock<SparseIntMatrix>; 3],
    transpose: [OnceLock<SparseIntMatrix>; 3],
    peel: [OnceLock<PeelPlan>; 3],
    kernel_trivial: [OnceLock<bool>; 3],
    components: OnceLock<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    pub radius: u32,
    pub vertices: Vec<VertexLabel>,
    /// Distance from the base vertex in the metric that defines the ball.
    pub depth: Vec<u32>,
    pub edges: Vec<Edge>,
    pub faces2: Vec<Cell>,
    pub faces3: Vec<Cell>,
    pub generator_names: Vec<String>,
    vertex_index: HashMap<VertexLabel, usize>,
    edge_index: HashMap<(usize, usize), usize>,
    grid_rank: Option<usize>,
    caches: Caches,
}

impl CellComplex {
    pub(crate) fn new(radius: u32, generator_names: Vec<String>) -> Self {
        CellComplex {
            radius,
            vertices: Vec::new(),
            depth: Vec::new(),
            edges: Vec::new(),
            faces2: Vec::new(),
            faces3: Vec::new(),
            generator_names,
            vertex_index: HashMap::new(),
            edge_index: HashMap::new(),
            grid_rank: None,
            caches: Caches::default(),
        }
    }

    pub(crate) fn push_vertex(&mut self, label: VertexLabel, depth: u32) -> usize {
        let id = self.vertices.len();
        self.vertex_index.insert(label.clone(), id);
        self.vertices.push(label);
        self.depth.push(depth);
        id
    }

    /// Adds an edge; refuses loops and parallel edges.
    pub(crate) fn push_edge(&mut self, tail: usize, head: usize, label: EdgeLabel) -> Result<usize, ComplexError> {
        if tail == head {
            return Err(ComplexError::NonSimplicial(format!("loop at vertex {tail}")));
        }
        let key = (tail.min(head), tail.max(head));
        if self.edge_index.contains_key(&key) {
            return Err(ComplexError::NonSimplicial(format!("parallel edges between {tail} and {head}")));
        }
        let id = self.edges.len();
        self.edge_index.insert(key, id);
        self.edges.push(Edge { tail, head, label });
        Ok(id)
    }

    /// Any structural edit must be followed by this; it also drops the grid marker.
    pub(crate) fn invalidate(&mut self) {
        self.caches = Caches::default();
        self.grid_rank = None;
    }

    /// `Some(n)` for an unmodified cubical ball of ℤⁿ.
    pub fn grid_rank(&self) -> Option<usize> {
        self.grid_rank
    }

    pub fn dim(&self) -> usize {
        if !self.faces3.is_empty() {
            3
        } else if !self.faces2.is_empty() {
            2
        } else if !self.edges.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn cell_count(&self, d: usize) -> usize {
        match d {
            0 => self.vertices.len(),
            1 => self.edges.len(),
            2 => self.faces2.len(),
            3 => self.faces3.len(),
            _ => 0,
        }
    }

    pub fn vertex_id(&self, label: &VertexLabel) -> Option<usize> {
        self.vertex_index.get(label).copied()
    }

    /// Edge joining two vertices (either direction) and the sign of traversing it `u -> v`.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<(usize, i8)> {
        let id = *self.edge_index.get(&(u.min(v), u.max(v)))?;
        Some((id, if self.edges[id].tail == u { 1 } else { -1 }))
    }

    pub fn cell(&self, d: usize, id: usize) -> Option<&Cell> {
        match d {
            2 => self.faces2.get(id),
            3 => self.faces3.get(id),
            _ => None,
        }
    }

    /// Vertex cycle of a 2-face: `v_k` is where the k-th boundary edge starts.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces2[f]
            .boundary
            .iter()
            .map(|&(e, s)| if s > 0 { self.edges[e].tail } else { self.edges[e].head })
            .collect()
    }

    /// All vertices of a cell of any dimension, sorted and deduplicated.
    pub fn cell_vertices(&self, d: usize, id: usize) -> Vec<usize> {
        let mut out = match d {
            0 => vec![id],
            1 => vec![self.edges[id].tail, self.edges[id].head],
            2 => self.face_vertices(id),
            _ => self.faces3[id].boundary.iter().flat_map(|&(f, _)| self.face_vertices(f)).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Column per d-cell, row per (d-1)-cell.
    pub fn boundary_matrix(&self, d: usize) -> &SparseIntMatrix {
        assert!((1..=3).contains(&d), "boundary dimension must be 1..=3");
        self.caches.boundary[d - 1].get_or_init(|| boundary_matrix(self, d))
    }

    pub fn boundary_transpose(&self, d: usize) -> &SparseIntMatrix {
        self.caches.transpose[d - 1].get_or_init(|| self.boundary_matrix(d).transpose())
    }

    pub fn peel_plan(&self, d: usize) -> &PeelPlan {
        self.caches.peel[d - 1].get_or_init(|| PeelPlan::new(self.boundary_matrix(d)))
    }

    /// Whether `∂_d` is injective, so that d-chains are determined by their boundaries.
    pub fn boundary_injective(&self, d: usize) -> bool {
        *self.caches.kernel_trivial[d - 1].get_or_init(|| {
            if d < 3 && (0..self.cell_count(d + 1)).any(|c| !self.boundary_matrix(d + 1).col(c).is_empty()) {
                return false;
            }
            let m = self.boundary_matrix(d);
            kernel_report_with_plan(m, self.peel_plan(d), false).kernel_rank == 0
        })
    }

    /// Connected-component id per vertex.
    pub fn components(&self) -> &[usize] {
        self.caches.components.get_or_init(|| {
            let n = self.vertices.len();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for e in &self.edges {
                let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
            (0..n).map(|v| find(&mut parent, v)).collect()
        })
    }

    /// Adjacency lists of the 1-skeleton, neighbors in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        adj
    }

    /// Breadth-first distances in the 1-skeleton (`u32::MAX` when unreachable).
    pub fn bfs(&self, adj: &[Vec<usize>], from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; adj.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        dist[from] = 0;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn render_label(&self, v: usize) -> String {
        render_label(&self.vertices[v], &self.generator_names)
    }

    pub fn to_json(&self) -> Value {
        let edge_label = |l: &EdgeLabel| match l {
            EdgeLabel::Gen(g) => self.generator_names[*g as usize].clone(),
            EdgeLabel::Axis(i) => format!("e{}", i + 1),
            EdgeLabel::Added => "added".into(),
            EdgeLabel::Chord => "chord".into(),
        };
        let cells = |cs: &[Cell]| -> Vec<Value> {
            cs.iter().map(|c| Value::from(c.boundary.iter().map(|&(i, s)| json!([i, s])).collect::<Vec<_>>())).collect()
        };
        json!({
            "radius": self.radius,
            "vertices": (0..self.vertices.len()).map(|v| self.render_label(v)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!([e.tail, e.head, edge_label(&e.label)])).collect::<Vec<_>>(),
            "faces2": cells(&self.faces2),
            "faces3": cells(&self.faces3),
        })
    }
}

pub fn render_label(l: &VertexLabel, names: &[String]) -> String {
    match l {
        VertexLabel::Word(w) => w.render(names),
        VertexLabel::Point(p) => p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        VertexLabel::Sub { face, index } => format!("s{face}.{index}"),
    }
}

pub fn boundary_matrix(k: &CellComplex, d: usize) -> SparseIntMatrix {
    let (rows, cols): (usize, Vec<Vec<(usize, i64)>>) = match d {
        1 => (k.vertices.len(), k.edges.iter().map(|e| vec![(e.tail, -1), (e.head, 1)]).collect()),
        2 => (k.edges.len(), k.faces2.iter().map(|f| f.boundary.iter().map(|&(e, s)| (e, s as i64)).collect()).collect()),
        3 => (k.faces2.len(), k.faces3.iter().map(|f| f.boundary.iter().map(|&(e, s)| (e, s as i64)).collect()).collect()),
        _ => panic!("boundary dimension must be 1..=3"),
    };
    SparseIntMatrix::from_columns(rows, cols)
}
