use std::sync::OnceLock;

use homfill::chains::{apply_boundary, Chain};
use homfill::complex::{build_grid_complex, CellComplex, VertexLabel};
use homfill::embedding::{build_extended_complex, builtin_plane_inclusion, qi_verify, EmbeddingSpec, ExtendedComplex, Space};
use homfill::filling::{fvol, fvol_with, transport_chain, FillStrategy, SolverBudget};
use proptest::prelude::*;

fn z2() -> &'static CellComplex {
    static K: OnceLock<CellComplex> = OnceLock::new();
    K.get_or_init(|| build_grid_complex(2, 6).unwrap())
}

fn z2_big() -> &'static CellComplex {
    static K: OnceLock<CellComplex> = OnceLock::new();
    K.get_or_init(|| build_grid_complex(2, 9).unwrap())
}

fn z3() -> &'static CellComplex {
    static K: OnceLock<CellComplex> = OnceLock::new();
    K.get_or_init(|| build_grid_complex(3, 3).unwrap())
}

fn budget() -> SolverBudget {
    SolverBudget::default()
}

fn chains_in(k: &'static CellComplex, max_terms: usize) -> impl Strategy<Value = Chain> {
    prop::collection::vec((0..k.faces2.len(), -2i64..=2), 0..=max_terms).prop_map(|terms| Chain::from_pairs(2, terms))
}

/// Boundaries of small random 2-chains.
fn cycles_in(k: &'static CellComplex, max_terms: usize) -> impl Strategy<Value = Chain> {
    chains_in(k, max_terms).prop_map(move |c| apply_boundary(k, &c))
}

// (x, y) -> (x + y, y): several source squares land on the same image cells
fn sheared() -> &'static ExtendedComplex {
    static E: OnceLock<ExtendedComplex> = OnceLock::new();
    E.get_or_init(|| {
        let x = build_grid_complex(2, 3).unwrap();
        let mut text = String::new();
        for v in &x.vertices {
            let VertexLabel::Point(p) = v else { unreachable!() };
            text.push_str(&format!("{} {} -> {} {}\n", p[0], p[1], p[0] + p[1], p[1]));
        }
        let spec = EmbeddingSpec::from_file(&text, Space::Grid(2), Space::Grid(2)).unwrap();
        build_extended_complex(&x, &build_grid_complex(2, 6).unwrap(), &spec, 2, &budget()).unwrap()
    })
}

fn plane() -> &'static ExtendedComplex {
    static E: OnceLock<ExtendedComplex> = OnceLock::new();
    E.get_or_init(|| {
        let x = build_grid_complex(2, 4).unwrap();
        build_extended_complex(&x, &build_grid_complex(3, 5).unwrap(), &builtin_plane_inclusion(), 1, &budget()).unwrap()
    })
}

/// Smallest ℓ¹ norm of an integer 2-chain with boundary `s`, by enumerating chains of growing norm.
fn brute_force_fill(k: &CellComplex, s: &Chain, max_volume: usize) -> Option<u64> {
    fn search(k: &CellComplex, s: &Chain, acc: &Chain, left: usize, from: usize) -> bool {
        if apply_boundary(k, acc) == *s {
            return true;
        }
        if left == 0 {
            return false;
        }
        (from..k.faces2.len()).any(|f| {
            [1, -1].into_iter().any(|sign| {
                // a face used with both signs never helps
                if acc.coeff(f) * sign < 0 {
                    return false;
                }
                search(k, s, &acc.add(&Chain::from_pairs(2, [(f, sign)])), left - 1, f)
            })
        })
    }
    (0..=max_volume).find(|&v| search(k, s, &Chain::zero(2), v, 0)).map(|v| v as u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subadditive(s in cycles_in(z2(), 4), t in cycles_in(z2(), 4)) {
        let b = budget();
        let st = fvol(z2(), &s.add(&t), &b).unwrap().volume;
        prop_assert!(st <= fvol(z2(), &s, &b).unwrap().volume + fvol(z2(), &t, &b).unwrap().volume);
    }

    #[test]
    fn scales_linearly_when_unique(s in cycles_in(z2(), 4), k in -4i64..=4) {
        let b = budget();
        let v = fvol(z2(), &s, &b).unwrap().volume;
        prop_assert_eq!(fvol(z2(), &s.scale(k), &b).unwrap().volume, k.unsigned_abs() * v);
    }

    #[test]
    fn scaling_never_beats_the_multiple_in_z3(s in cycles_in(z3(), 2), k in 1i64..=3) {
        let b = budget();
        let sv = fvol(z3(), &s, &b).unwrap().volume;
        prop_assert!(fvol(z3(), &s.scale(k), &b).unwrap().volume <= k as u64 * sv);
    }

    #[test]
    fn unique_and_ilp_agree(s in cycles_in(z2(), 5)) {
        let b = budget();
        let u = fvol(z2(), &s, &b).unwrap();
        let i = fvol_with(z2(), &s, &b, FillStrategy::ForceIlp).unwrap();
        prop_assert_eq!(u.volume, i.volume);
        prop_assert_eq!(apply_boundary(z2(), &i.filling), s);
    }

    #[test]
    fn ilp_filling_is_a_filling_in_z3(s in chains_in(z3(), 3)) {
        let b = budget();
        let cyc = apply_boundary(z3(), &s);
        let r = fvol_with(z3(), &cyc, &b, FillStrategy::ForceIlp).unwrap();
        prop_assert_eq!(&apply_boundary(z3(), &r.filling), &cyc);
        prop_assert!(r.volume <= s.norm());
        prop_assert_eq!(r.volume, fvol(z3(), &cyc, &b).unwrap().volume);
    }

    #[test]
    fn larger_ball_never_needs_more(s in cycles_in(z2(), 4)) {
        let b = budget();
        let t = transport_chain(z2(), z2_big(), &s).unwrap();
        prop_assert!(fvol(z2_big(), &t, &b).unwrap().volume <= fvol(z2(), &s, &b).unwrap().volume);
    }

    #[test]
    fn pushforward_commutes_with_boundary(terms in prop::collection::vec((0usize..1000, -3i64..=3), 0..8)) {
        for e in [sheared(), plane()] {
            let x = &e.source;
            let c2 = Chain::from_pairs(2, terms.iter().map(|&(f, k)| (f % x.faces2.len(), k)));
            prop_assert_eq!(apply_boundary(&e.y, &e.pushforward(&c2)), e.pushforward(&apply_boundary(x, &c2)));
            let c1 = Chain::from_pairs(1, terms.iter().map(|&(f, k)| (f % x.edges.len(), k)));
            prop_assert_eq!(apply_boundary(&e.y, &e.pushforward(&c1)), e.pushforward(&apply_boundary(x, &c1)));
        }
    }

    #[test]
    fn image_metric_dominates(seed in any::<u64>()) {
        for e in [sheared(), plane()] {
            let q = qi_verify(e, 1, 200, seed);
            prop_assert!(q.dominance_ok && q.upper_slope_ok);
        }
    }

    #[test]
    fn pushforward_bound(s in cycles_in(z2(), 3)) {
        let e = plane();
        let Some(t) = transport_chain(z2(), &e.source, &s) else { return Ok(()) };
        let b = budget();
        let fx = fvol(&e.source, &t, &b).unwrap().volume;
        let fm = fvol(&e.m, &e.to_image(&e.pushforward(&t)).unwrap(), &b).unwrap().volume;
        prop_assert!(fm <= e.n * fx);
    }
}

fn small_z2() -> &'static CellComplex {
    static K: OnceLock<CellComplex> = OnceLock::new();
    K.get_or_init(|| build_grid_complex(2, 3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_on_small_balls(s in cycles_in(small_z2(), 3)) {
        prop_assume!(s.norm() <= 6);
        let b = budget();
        let k = small_z2();
        let want = brute_force_fill(k, &s, 3).expect("norm 6 cycles need at most 3 squares");
        prop_assert_eq!(fvol(k, &s, &b).unwrap().volume, want);
        prop_assert_eq!(fvol_with(k, &s, &b, FillStrategy::ForceIlp).unwrap().volume, want);
    }
}

#[test]
fn zero_cycle_has_zero_volume() {
    for k in [z2(), z3()] {
        assert_eq!(fvol(k, &Chain::zero(1), &budget()).unwrap().volume, 0);
    }
}
