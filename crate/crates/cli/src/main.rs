mod config;
mod profile_io;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use homfill::chains::{apply_boundary, Chain};
use homfill::complex::{build_cayley_ball, build_grid_complex, CellComplex, GroupOracle};
use homfill::embedding::{
    build_extended_complex, builtin_axis_inclusion, builtin_logmap, builtin_plane_inclusion, collision_bound, compare_fillings,
    estimate_moduli_on, qi_verify, EmbedError, EmbeddingSpec, Space,
};
use homfill::filling::{
    box_boundary, compare_growth, fvol_with, growth_fit, inner_radius, log_grid, padding_check, profile_from_volumes,
    top_cells_by_corner, CycleSource, FillStrategy, GrowthComparison, SampledVolume, SolverBudget,
};
use homfill::presentation::{check_small_cancellation, is_proper_power, parse_presentation, Presentation};
use num_rational::Rational64;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Bad input: exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "homfill", version, about = "Homological filling functions and coarse embeddings on finite balls")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// `key = value` file of defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Small cancellation C'(λ) and proper-power check of a presentation.
    CheckSc(CheckSc),
    /// Builds a ball of a Cayley complex or grid and reports its cell counts.
    BuildBall(BuildBall),
    /// Filling volume of one cycle.
    Fvol(Fvol),
    /// Sampled filling profile and power-law fit.
    FillGrowth(FillGrowth),
    /// Coarse-embedding pipeline: moduli, extension, collision bound, QI check, filling comparison.
    Embed(Embed),
    /// Compares two profile CSVs under the ≺ relation.
    Compare(Compare),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Z1,
    Z2,
    Z3,
    Surface,
    Free2,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct GroupArgs {
    #[arg(long, value_enum, conflicts_with = "presentation")]
    preset: Option<Preset>,
    /// Presentation file (`gens:` / `rel:` lines).
    #[arg(long, value_name = "FILE")]
    presentation: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct BudgetArgs {
    #[arg(long, default_value_t = SolverBudget::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = SolverBudget::default().max_pivots)]
    max_pivots: usize,
}

impl BudgetArgs {
    fn budget(&self) -> SolverBudget {
        SolverBudget { max_nodes: self.max_nodes, max_pivots: self.max_pivots, ..SolverBudget::default() }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CheckSc {
    #[command(flatten)]
    group: GroupArgs,
    /// λ as `p/q`; defaults to the presentation's own target (1/6 unless it sets `lambda:`).
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct BuildBall {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    radius: u32,
    /// Writes the full complex as JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct Fvol {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    radius: u32,
    /// Chain as a JSON array of `[cell, coefficient]` pairs.
    #[arg(long, value_name = "FILE", conflicts_with = "box_dims")]
    cycle: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Boundary of a box with these side lengths, centred at the origin (grids only), e.g. `3,4`.
    #[arg(long = "box", value_name = "A,B[,C]")]
    box_dims: Option<String>,
    #[arg(long)]
    force_ilp: bool,
    /// Re-solve in the ball of radius R + 2 and report whether the volume is unchanged.
    #[arg(long)]
    pad: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sampler {
    Exhaustive,
    Random,
    Boxes,
    Balanced,
    Patches,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct FillGrowth {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    radius: u32,
    #[arg(long, default_value_t = 8)]
    ell_min: u64,
    #[arg(long, default_value_t = 40)]
    ell_max: u64,
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// Cycle sources, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "exhaustive,random")]
    sampler: Vec<Sampler>,
    /// Cycles drawn by each random source.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    max_cells: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pad: bool,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Logmap,
    Axis,
    Plane,
    File,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct Embed {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Vertex table for `--kind file`.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    source: Option<Preset>,
    #[arg(long, value_enum)]
    target: Option<Preset>,
    #[arg(long)]
    source_radius: Option<u32>,
    #[arg(long)]
    target_radius: Option<u32>,
    /// Added-edge length; defaults to the measured ρ₊(1).
    #[arg(long)]
    c: Option<u32>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest norm of the source cycles whose fillings are compared.
    #[arg(long, default_value_t = 12)]
    cycle_norm: u64,
    /// Writes the distance envelopes as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct Compare {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 8)]
    cmax: u64,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

enum Loaded {
    Grid(usize),
    Group(GroupOracle),
}

fn preset_presentation(p: Preset) -> Presentation {
    match p {
        Preset::Z1 => Presentation::free(&["a"]),
        Preset::Z2 => Presentation::free_abelian(2),
        Preset::Z3 => Presentation::free_abelian(3),
        Preset::Surface => Presentation::surface(2),
        Preset::Free2 => Presentation::free(&["a", "b"]),
    }
}

fn read_presentation(path: &Path) -> Result<Presentation> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_presentation(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn presentation_of(g: &GroupArgs) -> Result<Presentation> {
    match (&g.preset, &g.presentation) {
        (Some(p), None) => Ok(preset_presentation(*p)),
        (None, Some(path)) => read_presentation(path),
        _ => Err(usage("give one of --preset or --presentation")),
    }
}

fn load(g: &GroupArgs) -> Result<Loaded> {
    Ok(match g.preset {
        Some(Preset::Z1) => Loaded::Grid(1),
        Some(Preset::Z2) => Loaded::Grid(2),
        Some(Preset::Z3) => Loaded::Grid(3),
        Some(Preset::Surface) => Loaded::Group(GroupOracle::surface(2)),
        Some(Preset::Free2) => Loaded::Group(GroupOracle::free(2)),
        None => Loaded::Group(GroupOracle::from_presentation(presentation_of(g)?).map_err(|e| usage(e.to_string()))?),
    })
}

fn ball(l: &Loaded, radius: u32) -> Result<CellComplex> {
    Ok(match l {
        Loaded::Grid(n) => build_grid_complex(*n, radius)?,
        Loaded::Group(o) => build_cayley_ball(o, radius)?,
    })
}

fn space(p: Preset) -> Space {
    match p {
        Preset::Z1 => Space::Grid(1),
        Preset::Z2 => Space::Grid(2),
        Preset::Z3 => Space::Grid(3),
        Preset::Surface => Space::Group(GroupOracle::surface(2)),
        Preset::Free2 => Space::Group(GroupOracle::free(2)),
    }
}

fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => fs::write(p, text).with_context(|| p.display().to_string())?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn comparison_json(c: &GrowthComparison) -> Value {
    json!({"c": c.c, "holds": c.holds, "failures": c.failures, "extrapolated": c.extrapolated})
}

fn check_sc(a: &CheckSc) -> Result<ExitCode> {
    let p = presentation_of(&a.group)?;
    let lambda = match &a.lambda {
        None => p.lambda_target,
        Some(s) => {
            let r: Rational64 = s.trim().parse().map_err(|_| usage(format!("bad --lambda {s:?}")))?;
            if *r.numer() <= 0 || r > Rational64::from_integer(1) {
                return Err(usage("--lambda must lie in (0, 1]"));
            }
            r
        }
    };
    let verdict = check_small_cancellation(&p, lambda);
    let powers: Vec<String> = p.relators.iter().filter(|r| is_proper_power(r)).map(|r| p.render_word(r.canonical())).collect();
    let mut report = json!({
        "lambda": format!("{}/{}", lambda.numer(), lambda.denom()),
        "relators": p.relators.len(),
        "satisfied": verdict.is_satisfied(),
        "proper_powers": powers,
    });
    if let homfill::presentation::SmallCancellation::Violated { relator, piece, piece_length, relator_length } = &verdict {
        report["witness"] = json!({
            "relator": p.render_word(p.relators[*relator].canonical()),
            "piece": p.render_word(piece),
            "piece_length": piece_length,
            "relator_length": relator_length,
        });
    }
    emit(&report, None)?;
    Ok(if verdict.is_satisfied() && powers.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn build_ball(a: &BuildBall) -> Result<ExitCode> {
    let k = ball(&load(&a.group)?, a.radius)?;
    let dd_zero = (2..=k.dim()).all(|d| k.boundary_matrix(d - 1).mul(k.boundary_matrix(d)).is_zero());
    let report = json!({
        "radius": k.radius,
        "vertices": k.vertices.len(),
        "edges": k.edges.len(),
        "faces2": k.faces2.len(),
        "faces3": k.faces3.len(),
        "boundary_squared_zero": dd_zero,
        "top_boundary_injective": k.dim() == 0 || k.boundary_injective(k.dim()),
    });
    if let Some(out) = &a.out {
        emit(&k.to_json(), Some(out))?;
    }
    emit(&report, None)?;
    Ok(if dd_zero { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_dims(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().ok().filter(|&v| v > 0).ok_or_else(|| usage(format!("bad box side {t:?}"))))
        .collect()
}

fn fvol_cmd(a: &Fvol) -> Result<ExitCode> {
    let loaded = load(&a.group)?;
    let k = ball(&loaded, a.radius)?;
    let s = match (&a.cycle, &a.box_dims) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let c = Chain::from_json(a.dim, &v).ok_or_else(|| usage("cycle must be a JSON array of [cell, coefficient] pairs"))?;
            if a.dim == 0 || c.iter().any(|(id, _)| id >= k.cell_count(a.dim)) {
                return Err(usage(format!("cycle refers to a {}-cell outside the ball", a.dim)));
            }
            c
        }
        (None, Some(d)) => {
            let Loaded::Grid(n) = loaded else { return Err(usage("--box needs a grid preset")) };
            let dims = parse_dims(d)?;
            if dims.len() != n {
                return Err(usage(format!("--box needs {n} sides")));
            }
            let corner: Vec<i64> = dims.iter().map(|x| -(x / 2)).collect();
            box_boundary(&k, &top_cells_by_corner(&k), &corner, &dims).ok_or_else(|| usage("box does not fit in the ball"))?
        }
        _ => return Err(usage("give one of --cycle or --box")),
    };
    let budget = a.budget.budget();
    let strategy = if a.force_ilp { FillStrategy::ForceIlp } else { FillStrategy::Auto };
    let mut r = match fvol_with(&k, &s, &budget, strategy) {
        Ok(r) => r,
        Err(e @ homfill::filling::FillError::NotACycle) | Err(e @ homfill::filling::FillError::DimensionTooHigh { .. }) => {
            return Err(usage(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    if a.pad {
        let big = ball(&loaded, a.radius + 2)?;
        padding_check(&k, &big, &s, &mut r, &budget);
    }
    debug_assert_eq!(apply_boundary(&k, &r.filling), s);
    emit(
        &json!({
            "norm": s.norm(),
            "volume": r.volume,
            "method": r.method.as_str(),
            "certified": r.certified,
            "padding_stable": r.padding_stable,
            "filling": r.filling.to_json(),
        }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn sources(a: &FillGrowth) -> Vec<CycleSource> {
    a.sampler
        .iter()
        .enumerate()
        .map(|(i, s)| {
            // each source gets its own seed so adding one does not shift the others
            let seed = a.seed.wrapping_add(i as u64);
            match s {
                Sampler::Exhaustive => CycleSource::Exhaustive { max_norm: a.ell_max },
                Sampler::Random => CycleSource::Random { seed, count: a.samples },
                Sampler::Boxes => CycleSource::Boxes { max_norm: a.ell_max, balanced: false },
                Sampler::Balanced => CycleSource::Boxes { max_norm: a.ell_max, balanced: true },
                Sampler::Patches => CycleSource::Patches { seed, count: a.samples, max_cells: a.max_cells },
            }
        })
        .collect()
}

fn fill_growth(a: &FillGrowth) -> Result<ExitCode> {
    if a.ell_min == 0 || a.ell_max < a.ell_min || a.points < 2 {
        return Err(usage("need 1 <= --ell-min <= --ell-max and --points >= 2"));
    }
    let loaded = load(&a.group)?;
    let k = ball(&loaded, a.radius)?;
    let big = if a.pad { Some(ball(&loaded, a.radius + 2)?) } else { None };
    let inner = inner_radius(a.radius);
    let mut cycles: Vec<Chain> = sources(a).iter().flat_map(|s| s.cycles(&k, inner)).collect();
    cycles.retain(|c| c.norm() <= a.ell_max);
    let budget = a.budget.budget();
    let results: Vec<Result<SampledVolume, String>> = cycles
        .par_iter()
        .map(|s| {
            let mut r = fvol_with(&k, s, &budget, FillStrategy::Auto).map_err(|e| e.to_string())?;
            let mut certified = r.certified;
            if let Some(big) = &big {
                certified &= padding_check(&k, big, s, &mut r, &budget);
            }
            Ok(SampledVolume { norm: s.norm(), volume: r.volume, certified })
        })
        .collect();
    let mut errors: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
    errors.sort();
    errors.dedup();
    let vols: Vec<SampledVolume> = results.into_iter().filter_map(Result::ok).collect();
    let grid = log_grid(a.ell_min, a.ell_max, a.points);
    let mut samples = profile_from_volumes(&vols, &grid);
    if !errors.is_empty() {
        for s in &mut samples {
            s.certified = false;
        }
    }
    let fit = match growth_fit(&samples, None) {
        Ok(g) => json!({"exponent": g.exponent, "window": [g.window.0, g.window.1], "residual": g.residual}),
        Err(homfill::filling::FitError::Degenerate(v)) => {
            json!({"degenerate": true, "value": v, "message": "DEGENERATE_FIT: constant profile, linear-trivial"})
        }
        Err(e) => json!({"error": e.to_string()}),
    };
    if let Some(p) = &a.csv {
        let f = fs::File::create(p).with_context(|| p.display().to_string())?;
        profile_io::write_profile(f, &samples)?;
    }
    let report = json!({
        "radius": a.radius,
        "inner_radius": inner,
        "cycles": cycles.len(),
        "profile": samples.iter().map(|s| json!({"l": s.ell, "max_fill": s.fill, "cycles_sampled": s.count, "certified": s.certified})).collect::<Vec<_>>(),
        "fit": fit,
        "incomplete": !errors.is_empty(),
        "errors": errors,
    });
    emit(&report, a.json.as_deref())?;
    Ok(if errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn embed(a: &Embed) -> Result<ExitCode> {
    let spec = match a.kind {
        Kind::Logmap => builtin_logmap(),
        Kind::Axis => builtin_axis_inclusion(),
        Kind::Plane => builtin_plane_inclusion(),
        Kind::File => {
            let path = a.spec.as_ref().ok_or_else(|| usage("--kind file needs --spec"))?;
            let (Some(s), Some(t)) = (a.source, a.target) else { return Err(usage("--kind file needs --source and --target")) };
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            EmbeddingSpec::from_file(&text, space(s), space(t)).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
    };
    let radius = a.source_radius.unwrap_or(match a.kind {
        Kind::Logmap | Kind::Axis => 18,
        _ => 6,
    });
    let budget = a.budget.budget();
    let x = spec.source.ball(radius)?;
    let rejected = |e: EmbedError| -> anyhow::Error {
        match e {
            EmbedError::NonInjective { .. } | EmbedError::Unmapped(_) | EmbedError::Parse { .. } => usage(e.to_string()),
            other => other.into(),
        }
    };
    let z0 = spec.target.ball(spec.target_radius(&x, 0).map_err(rejected)?)?;
    let moduli = estimate_moduli_on(&spec, &x, &z0, a.samples, a.seed).map_err(rejected)?;
    let c = a.c.unwrap_or(moduli.lipschitz_c).max(1);
    let tr = match a.target_radius {
        Some(r) => r,
        None => spec.target_radius(&x, c).map_err(rejected)?,
    };
    let z = spec.target.ball(tr)?;
    let ext = build_extended_complex(&x, &z, &spec, c, &budget)?;
    let coll = collision_bound(&ext, Some(&moduli));
    let qi = qi_verify(&ext, coll.l, a.samples, a.seed);
    let inner = inner_radius(radius);
    let mut cycles = CycleSource::Exhaustive { max_norm: a.cycle_norm }.cycles(&x, inner);
    if matches!(spec.source, Space::Grid(n) if n >= 2) {
        cycles.extend(CycleSource::Boxes { max_norm: a.cycle_norm, balanced: false }.cycles(&x, inner));
    }
    cycles.retain(|s| s.norm() <= a.cycle_norm);
    cycles.sort_by_key(|s| s.iter().collect::<Vec<_>>());
    cycles.dedup();
    let fills = compare_fillings(&ext, &cycles, &budget)?;

    if let Some(p) = &a.csv {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(p)?;
        w.write_record(["t", "min", "max"])?;
        for (t, (lo, hi)) in &moduli.per_distance {
            w.write_record([t.to_string(), lo.to_string(), hi.to_string()])?;
        }
        w.flush()?;
    }
    let pass = qi.lower_slope_ok && qi.upper_slope_ok && qi.dominance_ok && fills.all_ok();
    let report = json!({
        "source_radius": radius,
        "target_radius": tr,
        "moduli": {
            "lipschitz_c": moduli.lipschitz_c,
            "not_coarse": moduli.not_coarse,
            "pairs": moduli.pairs,
            "per_distance": moduli.per_distance.iter().map(|(t, (lo, hi))| json!([t, lo, hi])).collect::<Vec<_>>(),
        },
        "extension": {
            "c": c,
            "added_edges": ext.added_edges().len(),
            "n": ext.n,
            "image_vertices": ext.m.vertices.len(),
            "image_faces": ext.m.faces2.len(),
        },
        "collision": {"measured": coll.measured, "theoretical": coll.theoretical, "l": coll.l},
        "qi": {
            "l": qi.l,
            "pairs": qi.pairs,
            "lower_slope_ok": qi.lower_slope_ok,
            "upper_slope_ok": qi.upper_slope_ok,
            "dominance_ok": qi.dominance_ok,
            "worst_pair": qi.worst_pair.as_ref().map(|w| json!({"x1": w.x1, "x2": w.x2, "d_x": w.d_x, "d_m": w.d_m, "lhs": w.lhs})),
        },
        "fillings": {
            "cycles": fills.rows.len(),
            "vacuous": fills.vacuous(),
            "all_ok": fills.all_ok(),
            "y_kernel_trivial": fills.y_kernel_trivial,
            "rows": fills.rows.iter().map(|r| json!({
                "norm": r.norm, "fvol_x": r.fvol_x, "fvol_m": r.fvol_m, "fvol_y": r.fvol_y,
                "pushforward_ok": r.pushforward_ok, "unique_ok": r.unique_ok,
            })).collect::<Vec<_>>(),
            "m_vs_x": fills.m_vs_x.as_ref().map(comparison_json),
            "x_vs_m": fills.x_vs_m.as_ref().map(comparison_json),
        },
        "pass": pass,
    });
    emit(&report, a.json.as_deref())?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn relation(ab: &GrowthComparison, ba: &GrowthComparison) -> &'static str {
    match (ab.holds, ba.holds) {
        (true, true) => "∼",
        (true, false) => "≺",
        (false, true) => "≻",
        (false, false) => "incomparable",
    }
}

fn compare(a: &Compare) -> Result<ExitCode> {
    if a.cmax == 0 {
        return Err(usage("--cmax must be at least 1"));
    }
    let read = |p: &Path| -> Result<_> {
        let f = fs::File::open(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        Ok(profile_io::read_profile(f, &p.display().to_string())?)
    };
    let (pa, pb) = (read(&a.a)?, read(&a.b)?);
    let ab = compare_growth(&pa, &pb, a.cmax);
    let ba = compare_growth(&pb, &pa, a.cmax);
    emit(
        &json!({
            "cmax": a.cmax,
            "a_vs_b": comparison_json(&ab),
            "b_vs_a": comparison_json(&ba),
            "relation": relation(&ab, &ba),
            "extrapolated": ab.extrapolated || ba.extrapolated,
        }),
        a.json.as_deref(),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("worker pool")?;
    }
    match &cli.command {
        Command::CheckSc(a) => check_sc(a),
        Command::BuildBall(a) => build_ball(a),
        Command::Fvol(a) => fvol_cmd(a),
        Command::FillGrowth(a) => fill_growth(a),
        Command::Embed(a) => embed(a),
        Command::Compare(a) => compare(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
