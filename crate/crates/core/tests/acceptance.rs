//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::{Duration, Instant};

use homfill::chains::{kernel_rank, Chain};
use homfill::complex::{build_cayley_ball, build_grid_complex, CellComplex, GroupOracle, VertexLabel};
use homfill::embedding::{
    build_extended_complex, builtin_logmap, builtin_plane_inclusion, collision_bound, compare_fillings, estimate_moduli, qi_verify,
    Space,
};
use homfill::filling::{
    box_boundary, compare_growth, fvol, fvol_with, growth_fit, inner_radius, log_grid, profile_from_volumes, sample_volumes,
    top_cells_by_corner, CycleSource, FillStrategy, FitError, Method, ProfileSample, SolverBudget,
};
use homfill::presentation::{check_small_cancellation, compute_pieces, parse_presentation, DehnSolver, Letter, Presentation, SmallCancellation, Word};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// tolerances
const Z2_EXPONENT: (f64, f64) = (1.85, 2.15);
const SURFACE_EXPONENT_MAX: f64 = 1.2;
const PREC_CMAX: u64 = 4;
const REFUTE_CMAX: u64 = 8;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: u32, title: &str, limit: Duration, failed: &mut Vec<u32>, f: impl FnOnce() -> Outcome) {
    let t = Instant::now();
    let o = f();
    let dt = t.elapsed();
    let ok = o.ok && dt <= limit;
    println!(
        "criterion {id} [{}] {title}: {} ({:.2?} of {:?})",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        dt,
        limit
    );
    if !ok {
        failed.push(id);
    }
}

fn point(k: &CellComplex, p: &[i64]) -> Option<usize> {
    k.vertex_id(&VertexLabel::Point(p.to_vec()))
}

/// Boundary walk of the a×b rectangle with lower-left corner (x0, y0), built edge by edge.
fn rectangle(k: &CellComplex, x0: i64, y0: i64, a: i64, b: i64) -> Option<Chain> {
    let mut corners = vec![[x0, y0]];
    for (dx, dy, n) in [(1, 0, a), (0, 1, b), (-1, 0, a), (0, -1, b)] {
        for _ in 0..n {
            let [x, y] = *corners.last().unwrap();
            corners.push([x + dx, y + dy]);
        }
    }
    let mut c = Chain::zero(1);
    for w in corners.windows(2) {
        let (e, s) = k.edge_between(point(k, &w[0])?, point(k, &w[1])?)?;
        c.add_to(e, s as i64);
    }
    Some(c)
}

fn dd_zero(k: &CellComplex) -> bool {
    (2..=k.dim()).all(|d| k.boundary_matrix(d - 1).mul(k.boundary_matrix(d)).is_zero())
}

fn criterion_1() -> Outcome {
    let surface = Presentation::surface(2);
    let sc = check_small_cancellation(&surface, Rational64::new(1, 6));
    let pieces = compute_pieces(&surface).max_piece();
    let z2 = parse_presentation("gens: a b\nrel: a b A B\n").expect("parses");
    let v = check_small_cancellation(&z2, Rational64::new(1, 6));
    let violated = matches!(v, SmallCancellation::Violated { piece_length: 1, relator_length: 4, .. });
    outcome(
        sc.is_satisfied() && pieces == 1 && violated,
        format!("surface satisfied={} max piece={pieces}; commutator verdict {v:?}", sc.is_satisfied()),
    )
}

fn criterion_2() -> Outcome {
    let k = build_grid_complex(2, 10).unwrap();
    let kr = kernel_rank(k.boundary_matrix(2)).kernel_rank;
    let b = SolverBudget::default();
    let mut bad = Vec::new();
    for a in 1..=6 {
        for h in 1..=6 {
            let s = rectangle(&k, -3, -3, a, h).expect("rectangle inside the ball");
            let u = fvol(&k, &s, &b).unwrap();
            let i = fvol_with(&k, &s, &b, FillStrategy::ForceIlp).unwrap();
            if u.volume != (a * h) as u64 || i.volume != u.volume || u.method != Method::Unique || i.method != Method::Ilp {
                bad.push((a, h, u.volume, i.volume));
            }
        }
    }
    outcome(kr == 0 && bad.is_empty(), format!("kernel rank {kr}, 36 rectangles, mismatches {bad:?}"))
}

fn criterion_3() -> Outcome {
    let k = build_grid_complex(3, 6).unwrap();
    let corners = top_cells_by_corner(&k);
    let b = SolverBudget::default();
    let mut bad = Vec::new();
    for a in 1..=3i64 {
        for h in 1..=3i64 {
            for w in 1..=3i64 {
                let s = box_boundary(&k, &corners, &[-1, -1, -1], &[a, h, w]).expect("box inside the ball");
                let faces = 2 * (a * h + h * w + w * a) as u64;
                let v = fvol(&k, &s, &b).unwrap().volume;
                if s.norm() != faces || v != (a * h * w) as u64 {
                    bad.push((a, h, w, v));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("27 boxes, mismatches {bad:?}"))
}

struct Profiles {
    z2: Vec<ProfileSample>,
    surface: Vec<ProfileSample>,
    z2_long: Vec<ProfileSample>,
}

fn z2_profile(radius: u32, grid: &[u64], balanced: bool, padded: bool) -> Vec<ProfileSample> {
    let k = build_grid_complex(2, radius).unwrap();
    let inner = inner_radius(radius);
    let hi = *grid.last().unwrap();
    let mut cycles = CycleSource::Boxes { max_norm: hi, balanced }.cycles(&k, inner);
    if !padded {
        return profile_from_volumes(&sample_volumes(&k, &cycles, &SolverBudget::default(), None).unwrap(), grid);
    }
    cycles.extend(CycleSource::Random { seed: 7, count: 200 }.cycles(&k, inner));
    cycles.retain(|c| c.norm() <= hi);
    let big = build_grid_complex(2, radius + 2).unwrap();
    profile_from_volumes(&sample_volumes(&k, &cycles, &SolverBudget::default(), Some(&big)).unwrap(), grid)
}

fn surface_profile(grid: &[u64]) -> Vec<ProfileSample> {
    let k = build_cayley_ball(&GroupOracle::surface(2), 6).unwrap();
    let inner = inner_radius(6);
    let mut cycles = CycleSource::Exhaustive { max_norm: 12 }.cycles(&k, inner);
    cycles.extend(CycleSource::Patches { seed: 1, count: 400, max_cells: 4 }.cycles(&k, inner));
    cycles.extend(CycleSource::Random { seed: 1, count: 200 }.cycles(&k, inner));
    profile_from_volumes(&sample_volumes(&k, &cycles, &SolverBudget::default(), None).unwrap(), grid)
}

fn show(p: &[ProfileSample]) -> String {
    p.iter().map(|s| format!("{}:{}", s.ell, s.fill)).collect::<Vec<_>>().join(" ")
}

fn criterion_4(out: &mut Option<Profiles>) -> Outcome {
    let z2 = z2_profile(8, &log_grid(8, 40, 8), false, true);
    let z2_fit = growth_fit(&z2, None);
    let surface = surface_profile(&log_grid(8, 24, 8));
    let s_fit = growth_fit(&surface, None);
    let free = build_cayley_ball(&GroupOracle::free(2), 6).unwrap();
    let inner = inner_radius(6);
    let mut cycles = CycleSource::Exhaustive { max_norm: 12 }.cycles(&free, inner);
    cycles.extend(CycleSource::Random { seed: 3, count: 200 }.cycles(&free, inner));
    let fp = profile_from_volumes(&sample_volumes(&free, &cycles, &SolverBudget::default(), None).unwrap(), &log_grid(8, 24, 8));
    let free_fit = growth_fit(&fp, None);

    let z2_ok = z2_fit.as_ref().is_ok_and(|g| g.exponent >= Z2_EXPONENT.0 && g.exponent <= Z2_EXPONENT.1)
        && z2.iter().all(|s| s.certified);
    let s_ok = s_fit.as_ref().is_ok_and(|g| g.exponent <= SURFACE_EXPONENT_MAX);
    let free_ok = fp.iter().all(|s| s.fill == 0) && free_fit == Err(FitError::Degenerate(0));
    let detail = format!(
        "Z2 exponent {:.3} [{}]; surface exponent {:.3} [{}]; free all zero={} ({})",
        z2_fit.as_ref().map_or(f64::NAN, |g| g.exponent),
        show(&z2),
        s_fit.as_ref().map_or(f64::NAN, |g| g.exponent),
        show(&surface),
        free_ok,
        free_fit.map_or_else(|e| e.to_string(), |g| format!("{}", g.exponent)),
    );
    let z2_long = z2_profile(150, &log_grid(8, 800, 12), true, false);
    *out = Some(Profiles { z2, surface, z2_long });
    outcome(z2_ok && s_ok && free_ok, detail)
}

fn cyclic_perms(p: &Presentation) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for r in &p.relators {
        let l = r.letters().to_vec();
        let inv: Vec<Letter> = l.iter().rev().map(|x| x.inverse()).collect();
        for w in [l, inv] {
            for i in 0..w.len() {
                out.push(w[i..].iter().chain(&w[..i]).copied().collect());
            }
        }
    }
    out
}

// Some cyclic rotation of w shares a prefix longer than half its length with a relator permutation.
fn has_long_piece(w: &[Letter], perms: &[Vec<Letter>]) -> bool {
    (0..w.len()).any(|j| {
        let rot: Vec<Letter> = w[j..].iter().chain(&w[..j]).copied().collect();
        perms.iter().any(|r| 2 * rot.iter().zip(r).take_while(|(a, b)| a == b).count() > r.len())
    })
}

fn random_trivial_word(rng: &mut ChaCha8Rng, p: &Presentation) -> Word {
    let gens = p.rank() as u32;
    let mut letters = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let g: Vec<Letter> = (0..rng.gen_range(0..=5)).map(|_| Letter::new(rng.gen_range(0..gens), rng.gen_bool(0.5))).collect();
        let r = p.relators[rng.gen_range(0..p.relators.len())].letters().to_vec();
        let r: Vec<Letter> = if rng.gen_bool(0.5) { r } else { r.iter().rev().map(|x| x.inverse()).collect() };
        letters.extend(g.iter().copied());
        letters.extend(r);
        letters.extend(g.iter().rev().map(|x| x.inverse()));
    }
    homfill::presentation::free_reduce(letters)
}

fn criterion_5() -> Outcome {
    let p = Presentation::surface(2);
    let solver = DehnSolver::new(&p).unwrap();
    let perms = cyclic_perms(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut empty, mut greendlinger, mut nonempty_words) = (0, 0, 0);
    for _ in 0..100 {
        let w = random_trivial_word(&mut rng, &p);
        let trace = solver.reduce_trace(&w);
        empty += trace.last().unwrap().is_empty() as usize;
        for v in trace.iter().filter(|v| !v.is_empty()) {
            nonempty_words += 1;
            greendlinger += has_long_piece(v.letters(), &perms) as usize;
        }
    }
    outcome(
        empty == 100 && greendlinger == nonempty_words,
        format!("{empty}/100 reduced to empty; {greendlinger}/{nonempty_words} intermediates contain more than half a relator"),
    )
}

fn criterion_6() -> Outcome {
    let spec = builtin_logmap();
    let m = estimate_moduli(&spec, 12, 1_000_000, 0).unwrap();
    // source radius 18 has inner radius 12
    let x = Space::Grid(1).ball(18).unwrap();
    let z = Space::Grid(2).ball(20).unwrap();
    let b = SolverBudget::default();
    let y = build_extended_complex(&x, &z, &spec, m.lipschitz_c, &b).unwrap();
    let mut edges: Vec<usize> = y.phi_edge.iter().map(|e| e.0).collect();
    edges.sort_unstable();
    edges.dedup();
    let mut verts = y.phi_vertex.clone();
    verts.sort_unstable();
    verts.dedup();
    let injective = edges.len() == x.edges.len() && verts.len() == x.vertices.len();
    let l = collision_bound(&y, Some(&m)).l;
    let q = qi_verify(&y, l, usize::MAX, 0);
    let exhaustive = q.pairs == 25 * 24 / 2;
    outcome(
        m.lipschitz_c == 2 && injective && q.lower_slope_ok && exhaustive,
        format!(
            "rho+(1)={}, 1-skeleton injective={injective}, L={l}, lower bound on {} pairs={}, upper={}, worst {:?}",
            m.lipschitz_c, q.pairs, q.lower_slope_ok, q.upper_slope_ok, q.worst_pair
        ),
    )
}

fn criterion_7() -> Outcome {
    let x = Space::Grid(2).ball(10).unwrap();
    let z = Space::Grid(3).ball(12).unwrap();
    let b = SolverBudget::default();
    let y = build_extended_complex(&x, &z, &builtin_plane_inclusion(), 1, &b).unwrap();
    let inner = inner_radius(10) as i64;
    let inside = |p: [i64; 2]| p[0].abs().max(p[1].abs()) <= inner;
    let (mut cycles, mut areas) = (Vec::new(), Vec::new());
    for a in 1..=9 {
        for h in 1..=10 - a {
            for x0 in -inner..=inner {
                for y0 in -inner..=inner {
                    if [[x0, y0], [x0 + a, y0], [x0, y0 + h], [x0 + a, y0 + h]].into_iter().all(inside) {
                        cycles.push(rectangle(&x, x0, y0, a, h).unwrap());
                        areas.push((a * h) as u64);
                    }
                }
            }
        }
    }
    let r = compare_fillings(&y, &cycles, &b).unwrap();
    let eq = r.rows.iter().zip(&areas).all(|(row, &area)| row.fvol_m == area && row.fvol_x == area && row.fvol_y == area);
    outcome(
        eq && r.all_ok() && !r.vacuous() && r.n == 1,
        format!("{} rectangles, N={}, all equal={eq}, pushforward bound={}", r.rows.len(), r.n, r.all_ok()),
    )
}

fn criterion_8(p: &Profiles) -> Outcome {
    let fwd = compare_growth(&p.surface, &p.z2, PREC_CMAX);
    let back_short = compare_growth(&p.z2, &p.surface, REFUTE_CMAX);
    let back = compare_growth(&p.z2_long, &p.surface, REFUTE_CMAX);
    println!("  Z2 balanced boxes to l=800: [{}]", show(&p.z2_long));
    println!("  Z2 (l <= 40) vs surface: holds={} c={} (too short to separate)", back_short.holds, back_short.c);
    outcome(
        fwd.holds && !back.holds,
        format!(
            "surface < Z2 with C={} ; Z2 < surface fails at Cmax={REFUTE_CMAX} on l in {:?} (extrapolated={})",
            fwd.c, back.failures, back.extrapolated
        ),
    )
}

fn random_chain(rng: &mut ChaCha8Rng, dim: usize, cells: usize) -> Chain {
    Chain::from_pairs(dim, (0..rng.gen_range(0..8)).map(|_| (rng.gen_range(0..cells), rng.gen_range(-3..=3))))
}

fn profile_bytes(threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let k = build_grid_complex(2, 6).unwrap();
        let inner = inner_radius(6);
        let cycles = CycleSource::Random { seed: 11, count: 120 }.cycles(&k, inner);
        let vols = sample_volumes(&k, &cycles, &SolverBudget::default(), None).unwrap();
        let rows: Vec<serde_json::Value> = profile_from_volumes(&vols, &log_grid(4, 24, 8))
            .iter()
            .map(|s| serde_json::json!({"l": s.ell, "max_fill": s.fill, "cycles_sampled": s.count, "certified": s.certified}))
            .collect();
        serde_json::to_string(&rows).unwrap()
    })
}

fn criterion_9() -> Outcome {
    let complexes = [
        build_grid_complex(2, 6).unwrap(),
        build_grid_complex(3, 4).unwrap(),
        build_cayley_ball(&GroupOracle::surface(2), 3).unwrap(),
        build_cayley_ball(&GroupOracle::free(2), 4).unwrap(),
    ];
    let dd = complexes.iter().all(dd_zero);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut norm_ok = true;
    for _ in 0..500 {
        let (a, c) = (random_chain(&mut rng, 1, 40), random_chain(&mut rng, 1, 40));
        let k = rng.gen_range(-4..=4i64);
        norm_ok &= a.add(&c).norm() <= a.norm() + c.norm();
        norm_ok &= a.scale(k).norm() == k.unsigned_abs() * a.norm();
        norm_ok &= (a.norm() == 0) == a.is_zero();
    }

    let k = build_grid_complex(2, 8).unwrap();
    let mut cycles = CycleSource::Random { seed: 21, count: 400 }.cycles(&k, inner_radius(8));
    cycles.truncate(200);
    let b = SolverBudget::default();
    let agree = cycles.iter().filter(|s| {
        fvol(&k, s, &b).unwrap().volume == fvol_with(&k, s, &b, FillStrategy::ForceIlp).unwrap().volume
    });
    let agree = agree.count();

    let reference = profile_bytes(1);
    let deterministic = (0..3).all(|_| [1, 2, 4].iter().all(|&t| profile_bytes(t) == reference));
    outcome(
        dd && norm_ok && agree == cycles.len() && cycles.len() == 200 && deterministic,
        format!(
            "dd=0 on {} complexes={dd}; norm axioms={norm_ok}; solver agreement {agree}/{}; byte-identical over 1/2/4 workers x3={deterministic}",
            complexes.len(),
            cycles.len()
        ),
    )
}

fn main() {
    let mut failed = Vec::new();
    let secs = Duration::from_secs;
    run(1, "small cancellation verdicts", secs(1), &mut failed, criterion_1);
    run(2, "unique fillings of rectangles in Z2", secs(30), &mut failed, criterion_2);
    run(3, "box surfaces in Z3", secs(60), &mut failed, criterion_3);
    let mut profiles = None;
    run(4, "growth exponents", secs(300), &mut failed, || criterion_4(&mut profiles));
    run(5, "Greendlinger property", secs(10), &mut failed, criterion_5);
    run(6, "LOGMAP embedding pipeline", secs(60), &mut failed, criterion_6);
    run(7, "plane inclusion fillings", secs(120), &mut failed, criterion_7);
    let profiles = profiles.expect("profiles from criterion 4");
    run(8, "growth comparison", secs(1), &mut failed, || criterion_8(&profiles));
    run(9, "property suites", secs(300), &mut failed, criterion_9);
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
