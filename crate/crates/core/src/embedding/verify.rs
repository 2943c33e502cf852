use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{inner_vertices, pair_distances, pairs, EmbedError, ExtendedComplex, ModuliEstimate};
use crate::chains::Chain;
use crate::filling::{compare_growth, fvol, GrowthComparison, ProfileSample, SolverBudget};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    /// Largest source distance between two source cells whose images share a cell.
    pub measured: u32,
    /// `L' + 2N` from the observed lower envelope, when one was supplied.
    pub theoretical: Option<u32>,
    pub l: u32,
}

pub fn collision_bound(ext: &ExtendedComplex, moduli: Option<&ModuliEstimate>) -> CollisionReport {
    let x = &ext.source;
    let mut clashes: BTreeSet<(usize, usize)> = BTreeSet::new();
    for fs in ext.face_preimages().values() {
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                clashes.insert((fs[i], fs[j]));
            }
        }
    }
    let adj = x.adjacency();
    let measured = clashes
        .par_iter()
        .map(|&(f, g)| {
            let vg = x.cell_vertices(2, g);
            x.cell_vertices(2, f)
                .into_iter()
                .map(|a| {
                    let d = x.bfs(&adj, a);
                    vg.iter().map(|&b| d[b]).max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let theoretical = moduli.map(|m| m.last_below(2 * ext.n as u32 + 1) + 2 * ext.n as u32);
    CollisionReport { measured, theoretical, l: measured.max(1) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorstPair {
    pub x1: String,
    pub x2: String,
    pub d_x: u32,
    pub d_m: u32,
    /// `d_X/(L+1) − 2L/(L+1)`.
    pub lhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QiReport {
    pub l: u32,
    pub lower_slope_ok: bool,
    /// `d_M ≤ d_X`: source edges map to edges of the image.
    pub upper_slope_ok: bool,
    /// `d_M ≥ d_Y` on every pair.
    pub dominance_ok: bool,
    pub worst_pair: Option<WorstPair>,
    pub pairs: usize,
}

/// Checks the quasi-isometry inequalities between the source ball and the image on pairs of inner source vertices.
pub fn qi_verify(ext: &ExtendedComplex, l: u32, sample_count: usize, seed: u64) -> QiReport {
    let x = &ext.source;
    let ps = pairs(&inner_vertices(x), sample_count, seed);
    let dx = pair_distances(x, &ps);
    let yp: Vec<(usize, usize)> = ps.iter().map(|&(a, b)| (ext.phi_vertex[a], ext.phi_vertex[b])).collect();
    let dy = pair_distances(&ext.y, &yp);
    let mp: Vec<(usize, usize)> =
        yp.iter().map(|&(a, b)| (ext.image_vertex(a).expect("image vertex"), ext.image_vertex(b).expect("image vertex"))).collect();
    let dm = pair_distances(&ext.m, &mp);

    let (l64, mut lower, mut upper, mut dominance) = (l as i64, true, true, true);
    let mut worst: Option<(i64, usize)> = None;
    for i in 0..ps.len() {
        let (a, m, y) = (dx[i] as i64, dm[i] as i64, dy[i] as i64);
        // d_X/(L+1) − 2L/(L+1) ≤ d_M, cleared of denominators
        let margin = m * (l64 + 1) - (a - 2 * l64);
        lower &= margin >= 0;
        upper &= m <= a;
        dominance &= m >= y;
        if worst.is_none_or(|(w, _)| margin < w) {
            worst = Some((margin, i));
        }
    }
    let worst_pair = worst.map(|(_, i)| WorstPair {
        x1: x.render_label(ps[i].0),
        x2: x.render_label(ps[i].1),
        d_x: dx[i],
        d_m: dm[i],
        lhs: (dx[i] as f64 - 2.0 * l as f64) / (l as f64 + 1.0),
    });
    QiReport { l, lower_slope_ok: lower, upper_slope_ok: upper, dominance_ok: dominance, worst_pair, pairs: ps.len() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingRow {
    pub norm: u64,
    pub fvol_x: u64,
    pub fvol_m: u64,
    pub fvol_y: u64,
    /// `FVol_M(φ₊s) ≤ N · FVol_X(s)`.
    pub pushforward_ok: bool,
    /// `FVol_M = FVol_Y`, checked only when ∂₂ of Y is injective.
    pub unique_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillingComparison {
    pub rows: Vec<FillingRow>,
    pub n: u64,
    pub y_kernel_trivial: bool,
    /// Image profile against source profile and back, by source cycle norm.
    pub m_vs_x: Option<GrowthComparison>,
    pub x_vs_m: Option<GrowthComparison>,
}

impl FillingComparison {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.pushforward_ok && r.unique_ok != Some(false))
    }

    pub fn vacuous(&self) -> bool {
        self.rows.is_empty()
    }
}

fn by_norm(rows: &[FillingRow], pick: impl Fn(&FillingRow) -> u64) -> Vec<ProfileSample> {
    let ells: BTreeSet<u64> = rows.iter().map(|r| r.norm).collect();
    ells.into_iter()
        .map(|ell| {
            let within: Vec<&FillingRow> = rows.iter().filter(|r| r.norm <= ell).collect();
            ProfileSample { ell, fill: within.iter().map(|r| pick(r)).max().unwrap_or(0), count: within.len(), certified: true }
        })
        .collect()
}

/// Fills each source cycle in the source ball, in the image subcomplex and in Y.
pub fn compare_fillings(ext: &ExtendedComplex, cycles: &[Chain], budget: &SolverBudget) -> Result<FillingComparison, EmbedError> {
    let y_kernel_trivial = ext.y.boundary_injective(2);
    let rows: Vec<FillingRow> = cycles
        .par_iter()
        .map(|s| {
            let fx = fvol(&ext.source, s, budget)?.volume;
            let ps = ext.pushforward(s);
            let fy = fvol(&ext.y, &ps, budget)?.volume;
            let in_m = ext.to_image(&ps).expect("pushforward of a 1-chain lies in the image");
            let fm = fvol(&ext.m, &in_m, budget)?.volume;
            Ok(FillingRow {
                norm: s.norm(),
                fvol_x: fx,
                fvol_m: fm,
                fvol_y: fy,
                pushforward_ok: fm <= ext.n * fx,
                unique_ok: y_kernel_trivial.then_some(fm == fy),
            })
        })
        .collect::<Result<_, EmbedError>>()?;
    let (m_vs_x, x_vs_m) = if rows.is_empty() {
        (None, None)
    } else {
        let (m, x) = (by_norm(&rows, |r| r.fvol_m), by_norm(&rows, |r| r.fvol_x));
        (Some(compare_growth(&m, &x, 8)), Some(compare_growth(&x, &m, 8)))
    };
    Ok(FillingComparison { rows, n: ext.n, y_kernel_trivial, m_vs_x, x_vs_m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::apply_boundary;
    use crate::complex::{build_grid_complex, VertexLabel};
    use crate::embedding::{build_extended_complex, builtin_axis_inclusion, builtin_logmap, EmbeddingSpec, Space};

    #[test]
    fn axis_inclusion_trivial_bounds() {
        let x = build_grid_complex(1, 9).unwrap();
        let z = build_grid_complex(2, 9).unwrap();
        let y = build_extended_complex(&x, &z, &builtin_axis_inclusion(), 1, &SolverBudget::default()).unwrap();
        let c = collision_bound(&y, None);
        assert_eq!((c.measured, c.l), (0, 1));
        let q = qi_verify(&y, c.l, 10_000, 0);
        assert!(q.lower_slope_ok && q.upper_slope_ok && q.dominance_ok);
    }

    #[test]
    fn logmap_is_injective_with_unit_collision_bound() {
        let x = build_grid_complex(1, 18).unwrap();
        let z = build_grid_complex(2, 20).unwrap();
        let y = build_extended_complex(&x, &z, &builtin_logmap(), 2, &SolverBudget::default()).unwrap();
        let c = collision_bound(&y, None);
        assert_eq!(c.l, 1);
        let q = qi_verify(&y, c.l, 1_000_000, 0);
        assert!(q.lower_slope_ok && q.upper_slope_ok && q.dominance_ok);
        let f = compare_fillings(&y, &[], &SolverBudget::default()).unwrap();
        assert!(f.vacuous() && f.all_ok());
    }

    #[test]
    fn sheared_plane_identifies_neighbouring_squares() {
        // (x, y) ↦ (x + y, y): each source edge (v, v + e₂) becomes an added diagonal edge whose
        // face is shared by the two source squares on either side
        let x = build_grid_complex(2, 3).unwrap();
        let mut text = String::new();
        for v in &x.vertices {
            let VertexLabel::Point(p) = v else { unreachable!() };
            text.push_str(&format!("{} {} -> {} {}\n", p[0], p[1], p[0] + p[1], p[1]));
        }
        let spec = EmbeddingSpec::from_file(&text, Space::Grid(2), Space::Grid(2)).unwrap();
        let z = build_grid_complex(2, 6).unwrap();
        let y = build_extended_complex(&x, &z, &spec, 2, &SolverBudget::default()).unwrap();
        // direct check: largest L1 distance between vertices of two source squares with a common image cell
        let pts = |f: usize| -> Vec<Vec<i64>> {
            x.cell_vertices(2, f).iter().map(|&v| match &x.vertices[v] {
                VertexLabel::Point(p) => p.clone(),
                _ => unreachable!(),
            }).collect()
        };
        let mut expect = 0;
        for f in 0..x.faces2.len() {
            for g in f + 1..x.faces2.len() {
                if y.phi_face[f].support().any(|c| y.phi_face[g].coeff(c) != 0) {
                    for a in pts(f) {
                        for b in pts(g) {
                            expect = expect.max(a.iter().zip(&b).map(|(p, q)| (p - q).abs()).sum::<i64>());
                        }
                    }
                }
            }
        }
        assert_eq!(expect, 3);
        assert_eq!(collision_bound(&y, None).measured as i64, expect);
        // φ is a chain map on faces
        for f in 0..x.faces2.len() {
            let s = Chain::cell(2, f);
            assert_eq!(apply_boundary(&y.y, &y.pushforward(&s)), y.pushforward(&apply_boundary(&x, &s)));
        }
    }
}
