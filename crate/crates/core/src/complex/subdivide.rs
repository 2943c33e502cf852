use std::collections::BTreeMap;

use super::{Cell, CellComplex, ComplexError, EdgeLabel, VertexLabel};

/// A polygon corner: the i-th vertex of the face boundary or a new interior vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    Boundary(usize),
    New(usize),
}

/// Sub-polygons covering a face, each listed as corners in boundary order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionPattern {
    pub new_vertices: usize,
    pub pieces: Vec<Vec<Corner>>,
}

impl SubdivisionPattern {
    /// The face itself.
    pub fn identity(len: usize) -> Self {
        SubdivisionPattern { new_vertices: 0, pieces: vec![(0..len).map(Corner::Boundary).collect()] }
    }

    /// Split along the chord from corner `i` to corner `j`.
    pub fn chord(len: usize, i: usize, j: usize) -> Self {
        let (i, j) = (i.min(j), i.max(j));
        let first = (i..=j).map(Corner::Boundary).collect();
        let second = (j..len).chain(0..=i).map(Corner::Boundary).collect();
        SubdivisionPattern { new_vertices: 0, pieces: vec![first, second] }
    }

    /// Triangles from every corner to one new centre vertex.
    pub fn cone(len: usize) -> Self {
        let pieces = (0..len).map(|i| vec![Corner::Boundary(i), Corner::Boundary((i + 1) % len), Corner::New(0)]).collect();
        SubdivisionPattern { new_vertices: 1, pieces }
    }
}

/// Replaces a 2-face by the pattern's pieces. Returns the new complex and the ids of the
/// faces that replaced `face`; the first keeps the old id.
pub fn subdivide_cell(
    k: &CellComplex,
    face: usize,
    pattern: &SubdivisionPattern,
) -> Result<(CellComplex, Vec<usize>), ComplexError> {
    let Some(cell) = k.faces2.get(face) else {
        return Err(ComplexError::NoSuchCell { dim: 2, id: face });
    };
    let bnd = cell.boundary.clone();
    let verts = k.face_vertices(face);
    let len = verts.len();
    let mismatch = || ComplexError::MismatchedBoundary { face };
    if pattern.pieces.is_empty() || pattern.pieces.iter().any(|p| p.len() < 3) {
        return Err(mismatch());
    }

    let mut out = k.clone();
    out.invalidate();
    let depth = verts.iter().map(|&v| k.depth[v]).max().unwrap_or(0);
    let new_ids: Vec<usize> = (0..pattern.new_vertices)
        .map(|index| out.push_vertex(VertexLabel::Sub { face, index }, depth))
        .collect();
    let resolve = |c: Corner| -> Option<usize> {
        match c {
            Corner::Boundary(i) => verts.get(i).copied(),
            Corner::New(t) => new_ids.get(t).copied(),
        }
    };

    let mut total: BTreeMap<usize, i64> = BTreeMap::new();
    let mut cells = Vec::new();
    for piece in &pattern.pieces {
        let mut path = Vec::with_capacity(piece.len());
        for t in 0..piece.len() {
            let (a, b) = (piece[t], piece[(t + 1) % piece.len()]);
            let step = match (a, b) {
                (Corner::Boundary(i), Corner::Boundary(j)) if i < len && j == (i + 1) % len => bnd[i],
                (Corner::Boundary(i), Corner::Boundary(j)) if j < len && i == (j + 1) % len => (bnd[j].0, -bnd[j].1),
                _ => {
                    let (u, v) = (resolve(a).ok_or_else(mismatch)?, resolve(b).ok_or_else(mismatch)?);
                    if u == v {
                        return Err(mismatch());
                    }
                    match out.edge_between(u, v) {
                        Some(e) => e,
                        None => (out.push_edge(u, v, EdgeLabel::Chord)?, 1),
                    }
                }
            };
            *total.entry(step.0).or_insert(0) += step.1 as i64;
            path.push(step);
        }
        cells.push(Cell { boundary: path });
    }

    let mut expected: BTreeMap<usize, i64> = BTreeMap::new();
    for &(e, s) in &bnd {
        *expected.entry(e).or_insert(0) += s as i64;
    }
    total.retain(|_, v| *v != 0);
    expected.retain(|_, v| *v != 0);
    if total != expected {
        return Err(mismatch());
    }

    let mut ids = vec![face];
    let mut cells = cells.into_iter();
    out.faces2[face] = cells.next().expect("at least one piece");
    for c in cells {
        ids.push(out.faces2.len());
        out.faces2.push(c);
    }
    for cube in &mut out.faces3 {
        if let Some(pos) = cube.boundary.iter().position(|&(f, _)| f == face) {
            let s = cube.boundary[pos].1;
            cube.boundary.extend(ids[1..].iter().map(|&f| (f, s)));
        }
    }
    Ok((out, ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{apply_boundary, Chain};
    use crate::complex::{build_cayley_ball, build_grid_complex, GroupOracle};

    fn dd_zero(k: &CellComplex) -> bool {
        (1..k.dim()).all(|d| k.boundary_matrix(d).mul(k.boundary_matrix(d + 1)).is_zero())
    }

    #[test]
    fn square_into_triangles() {
        let k = build_grid_complex(2, 1).unwrap();
        let (s, ids) = subdivide_cell(&k, 0, &SubdivisionPattern::chord(4, 0, 2)).unwrap();
        assert_eq!(s.faces2.len(), k.faces2.len() + 1);
        assert_eq!(s.edges.len(), k.edges.len() + 1);
        assert_eq!(ids.len(), 2);
        assert!(dd_zero(&s));
        let sum = ids.iter().fold(Chain::zero(2), |c, &f| c.add(&Chain::cell(2, f)));
        assert_eq!(apply_boundary(&s, &sum), apply_boundary(&k, &Chain::cell(2, 0)));
    }

    #[test]
    fn identity_pattern() {
        let k = build_grid_complex(2, 1).unwrap();
        let (s, ids) = subdivide_cell(&k, 2, &SubdivisionPattern::identity(4)).unwrap();
        assert_eq!(ids, vec![2]);
        assert_eq!(s.faces2, k.faces2);
        assert_eq!(s.edges, k.edges);
    }

    #[test]
    fn octagon_along_diameter() {
        let k = build_cayley_ball(&GroupOracle::surface(2), 4).unwrap();
        let (s, ids) = subdivide_cell(&k, 0, &SubdivisionPattern::chord(8, 0, 4)).unwrap();
        assert_eq!(ids.len(), 2);
        assert_eq!(s.faces2[ids[0]].boundary.len(), 5);
        let sum = Chain::cell(2, ids[0]).add(&Chain::cell(2, ids[1]));
        assert_eq!(apply_boundary(&s, &sum), apply_boundary(&k, &Chain::cell(2, 0)));
        assert!(dd_zero(&s));
    }

    #[test]
    fn cone_and_cubes() {
        let k = build_grid_complex(3, 1).unwrap();
        let (s, ids) = subdivide_cell(&k, 0, &SubdivisionPattern::cone(4)).unwrap();
        assert_eq!(ids.len(), 4);
        assert_eq!(s.vertices.len(), k.vertices.len() + 1);
        assert!(dd_zero(&s));
    }

    #[test]
    fn mismatched() {
        let k = build_grid_complex(2, 1).unwrap();
        let bad = SubdivisionPattern { new_vertices: 0, pieces: vec![vec![Corner::Boundary(0), Corner::Boundary(1), Corner::Boundary(2)]] };
        assert_eq!(subdivide_cell(&k, 0, &bad).unwrap_err(), ComplexError::MismatchedBoundary { face: 0 });
    }
}
