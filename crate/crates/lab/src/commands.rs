//! The five commands. Each returns its exit code; errors map to exit 2.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use pss_core::chsim::{integrate, Spectral, Trajectory, RESOLUTION_TOL};
use pss_core::forms::{akns_compatibility, ZcSign};
use pss_core::geolab::{
    brioschi_curvature, brioschi_curvature_periodic, generic_discs, metric_field, nonconstancy_check, omega_fields,
    revalidate_discs, sg_exact_metric, ux_zero_slices, CurvatureField, DiscReport, MetricField, Rect, SingularLocus,
    DEFAULT_WMIN_REL,
};
use pss_core::pss::{
    catalog_entry, degenerate_conditions, first_fundamental, multiplier, verify_pss, zero_curvature_check,
    CatalogEntry, EntryData, Pde, Reduction, Status, VerifyMode,
};
use pss_core::symcore::{try_normalize, Expr};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::definition::{resolve_catalog, resolve_pde, Definition, PdeFile, Perturbation};
use crate::error::{LabError, Result};
use crate::manifest::{json_bytes, read_manifest, sha256_hex, OutputDir};
use crate::svg::Heatmap;
use crate::traj::{fmt_f64, from_csv, to_csv, uniform_prefix};

pub const DEFAULT_LAMBDA: f64 = 2.0;
pub const DEFAULT_ORDER: usize = 4;
/// Box and spacing of the exact kink grid.
pub const KINK_HALF_WIDTH: f64 = 2.0;
pub const KINK_SPACING: f64 = 1e-2;

fn norm_str(e: &Expr) -> String {
    try_normalize(e).unwrap_or_else(|_| e.clone()).to_string()
}

/// Where a triad or matrix comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Catalog(String),
    File(PathBuf),
}

fn load_source(src: &Source) -> Result<(Definition, Option<CatalogEntry>)> {
    match src {
        Source::Catalog(name) => {
            let e = resolve_catalog(name)?;
            Ok((Definition::from_catalog(&e), Some(e)))
        }
        Source::File(p) => Ok((Definition::load(p)?, None)),
    }
}

fn pick_pde(flag: Option<&str>, entry: Option<&CatalogEntry>) -> Result<Pde> {
    match (flag, entry) {
        (Some(s), _) => resolve_pde(s),
        (None, Some(e)) => Ok(e.pde.clone()),
        (None, None) => Err(LabError::invalid("--pde is required with --triad")),
    }
}

fn seeds(seed: u64) -> BTreeMap<String, u64> {
    BTreeMap::from([("certificate".to_string(), seed)])
}

pub struct VerifyArgs {
    pub source: Source,
    pub pde: Option<String>,
    pub mode: VerifyMode,
    pub perturb: Option<String>,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FundamentalJson {
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "F")]
    f: String,
    #[serde(rename = "G")]
    g: String,
}

#[derive(Serialize)]
struct VerifyJson {
    name: String,
    pde: String,
    equation: String,
    requested_mode: &'static str,
    mode: &'static str,
    status: &'static str,
    seed: u64,
    perturbation: Option<String>,
    residuals: Vec<String>,
    multipliers: Vec<Option<String>>,
    wedge12: String,
    degenerate_factors: Option<Vec<String>>,
    first_fundamental: FundamentalJson,
}

fn mode_str(m: VerifyMode) -> &'static str {
    match m {
        VerifyMode::Auto => "auto",
        VerifyMode::Multiplier => "multiplier",
        VerifyMode::Substitution => "substitution",
    }
}

fn reduction_str(r: Reduction) -> &'static str {
    match r {
        Reduction::Multiplier => "multiplier",
        Reduction::Substitution => "substitution",
    }
}

#[derive(Serialize)]
struct ErratumJson {
    entry: String,
    notes: String,
    finding: String,
    compatibility_residuals: Vec<String>,
    compatibility_reduces: Vec<bool>,
    corrected_entry: Option<String>,
}

fn erratum(e: &CatalogEntry, seed: u64) -> Result<Option<ErratumJson>> {
    let EntryData::Akns(d) = &e.data else {
        return Ok(None);
    };
    let res = akns_compatibility(d);
    let mut reduces = Vec::new();
    for r in &res {
        reduces.push(multiplier(r, &e.pde, seed)?.is_some() || substitution_zero(r, &e.pde, seed)?);
    }
    let failing: Vec<String> = reduces.iter().enumerate().filter(|(_, ok)| !**ok).map(|(k, _)| (k + 1).to_string()).collect();
    let corrected = e
        .name
        .strip_suffix("-printed")
        .filter(|base| catalog_entry(base).is_some())
        .map(str::to_string);
    let mut finding = format!(
        "AKNS compatibility equation(s) {} do not reduce modulo {}",
        failing.join(", "),
        e.pde.name
    );
    if let Some(c) = &corrected {
        finding.push_str(&format!("; entry `{c}` carries the corrected data and verifies"));
    }
    Ok(Some(ErratumJson {
        entry: e.name.clone(),
        notes: e.notes.clone(),
        finding,
        compatibility_residuals: res.iter().map(norm_str).collect(),
        compatibility_reduces: reduces,
        corrected_entry: corrected,
    }))
}

fn substitution_zero(r: &Expr, pde: &Pde, seed: u64) -> Result<bool> {
    match &pde.solved {
        None => Ok(false),
        Some((z, g)) => Ok(pss_core::symcore::is_zero_seeded(&pss_core::symcore::substitute(r, *z, g, true)?, seed)?),
    }
}

fn input_digest(def: &Definition, pde: &Pde, extra: Value) -> String {
    let v = json!({ "definition": def.to_file(), "pde": PdeFile::from_pde(pde), "options": extra });
    sha256_hex(v.to_string().as_bytes())
}

pub fn verify(args: &VerifyArgs, command: Vec<String>) -> Result<i32> {
    let (mut def, entry) = load_source(&args.source)?;
    let pde = pick_pde(args.pde.as_deref(), entry.as_ref())?;
    if let Some(p) = &args.perturb {
        def = def.perturbed(&Perturbation::parse(p)?)?;
    }
    let tr = def.triad()?;
    let rep = verify_pss(&tr, &pde, args.mode, args.seed)?;
    let (e, f, g) = first_fundamental(&tr);
    let out_json = VerifyJson {
        name: def.name.clone(),
        pde: pde.name.clone(),
        equation: pde.e.to_string(),
        requested_mode: mode_str(args.mode),
        mode: reduction_str(rep.mode),
        status: rep.status.as_str(),
        seed: args.seed,
        perturbation: args.perturb.clone(),
        residuals: rep.residuals.iter().map(|r| r.c.to_string()).collect(),
        multipliers: rep.multipliers.iter().map(|m| m.as_ref().map(|e| e.to_string())).collect(),
        wedge12: rep.wedge12.to_string(),
        degenerate_factors: degenerate_conditions(&tr).ok().map(|v| v.iter().map(Expr::to_string).collect()),
        first_fundamental: FundamentalJson { e: norm_str(&e), f: norm_str(&f), g: norm_str(&g) },
    };
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("verify.json", &out_json)?;

    println!("{}: {} ({} mode) modulo {}", def.name, rep.status.as_str(), reduction_str(rep.mode), pde.name);
    if rep.multipliers.iter().all(Option::is_some) {
        let mus: Vec<&str> = out_json.multipliers.iter().flatten().map(String::as_str).collect();
        println!("  mu = ({})", mus.join(", "));
    }
    if rep.status != Status::PssVerified {
        for (k, r) in out_json.residuals.iter().enumerate() {
            println!("  R{} = {r}", k + 1);
        }
    }
    if rep.status == Status::Failed && args.perturb.is_none() {
        if let Some(er) = entry.as_ref().map(|e| erratum(e, args.seed)).transpose()?.flatten() {
            println!("  erratum: {}", er.finding);
            out.write_json("erratum.json", &er)?;
        }
    }
    let digest = input_digest(&def, &pde, json!({ "mode": mode_str(args.mode), "perturb": args.perturb }));
    out.finish(command, digest, seeds(args.seed))?;
    Ok(if rep.status == Status::PssVerified { 0 } else { 1 })
}

pub struct ZeroCurvArgs {
    pub source: Source,
    pub pde: Option<String>,
    pub sign: ZcSign,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ZcEntryJson {
    residual: String,
    multiplier: Option<String>,
    substitution: bool,
}

#[derive(Serialize)]
struct ZeroCurvJson {
    name: String,
    pde: String,
    sign: String,
    seed: u64,
    reduced: bool,
    entries: Vec<Vec<ZcEntryJson>>,
}

pub fn zero_curv(args: &ZeroCurvArgs, command: Vec<String>) -> Result<i32> {
    let (def, entry) = load_source(&args.source)?;
    let pde = pick_pde(args.pde.as_deref(), entry.as_ref())?;
    let rep = zero_curvature_check(&def.matrix(), args.sign, &pde, args.seed)?;
    let entries = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| ZcEntryJson {
                    residual: rep.residual[i][j].to_string(),
                    multiplier: rep.multipliers[i][j].as_ref().map(Expr::to_string),
                    substitution: rep.substituted[i][j],
                })
                .collect()
        })
        .collect();
    let body = ZeroCurvJson {
        name: def.name.clone(),
        pde: pde.name.clone(),
        sign: args.sign.symbol().to_string(),
        seed: args.seed,
        reduced: rep.reduced,
        entries,
    };
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("zero_curv.json", &body)?;
    let verdict = if rep.reduced { "reduces" } else { "does not reduce" };
    println!("{}: D_tX {} D_xT + [X,T] {verdict} modulo {}", def.name, args.sign.symbol(), pde.name);
    if !rep.reduced {
        for (i, row) in body.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                println!("  [{}{}] {}", i + 1, j + 1, e.residual);
            }
        }
    }
    let digest = input_digest(&def, &pde, json!({ "sign": body.sign }));
    out.finish(command, digest, seeds(args.seed))?;
    Ok(if rep.reduced { 0 } else { 1 })
}

pub enum ConfigSource {
    File(PathBuf),
    Preset(String),
}

pub struct SolveArgs {
    pub config: ConfigSource,
    pub out: PathBuf,
}

/// Largest `|v(t) − v(0)|`, relative to `max(|v(0)|, 1)` so that data with
/// zero mass report an absolute drift.
fn drift(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let first = v.clone().next().unwrap_or(0.0);
    v.fold(0.0_f64, |a, x| a.max((x - first).abs())) / first.abs().max(1.0)
}

/// Largest relative change of `H¹` and of the mass over the saved times.
pub fn drifts(traj: &Trajectory) -> (f64, f64) {
    let h1 = traj.diagnostics.iter().map(|d| d.h1);
    let h0 = traj.diagnostics.first().map_or(0.0, |d| d.h1);
    let worst = h1.fold(0.0_f64, |a, x| a.max((x - h0).abs()));
    let rel = if h0 > 0.0 { worst / h0 } else { worst };
    (rel, drift(traj.diagnostics.iter().map(|d| d.mass)))
}

pub fn diagnostics_json(traj: &Trajectory, cfg: &RunConfig) -> Value {
    let (h1, mass) = drifts(traj);
    let per_time: Vec<Value> = traj
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "t": d.t, "h1": d.h1, "mass": d.mass, "I": d.i_t, "S": d.s_t, "h": d.h_t,
                "a": d.a_t, "b": d.b_t, "ux_zeros": d.c_list,
            })
        })
        .collect();
    json!({
        "config": cfg,
        "stop_reason": traj.stop.as_str(),
        "numerical_lifespan_proxy": traj.stop_time,
        "trivial": traj.is_trivial(),
        "boundary_decay": traj.boundary_decay,
        "resolution_tail": traj.resolution_tail,
        "resolved": traj.resolution_tail <= RESOLUTION_TOL,
        "h1_drift": h1,
        "mass_drift": mass,
        "sign_violations": traj.sign_violations,
        "h_negative_everywhere": traj.diagnostics.iter().all(|d| d.h_t < 0.0),
        "diagnostics": per_time,
    })
}

pub fn solve(args: &SolveArgs, command: Vec<String>) -> Result<i32> {
    let cfg = match &args.config {
        ConfigSource::File(p) => RunConfig::load(p)?,
        ConfigSource::Preset(n) => RunConfig::preset(n)?,
    };
    let g = cfg.grid()?;
    let traj = integrate(&cfg.datum().sample(g), &cfg.solver(), g)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write("trajectory.csv", &to_csv(&traj))?;
    out.write_json("diagnostics.json", &diagnostics_json(&traj, &cfg))?;
    let (h1, mass) = drifts(&traj);
    println!(
        "{} at t = {} (numerical lifespan proxy), {} saved slices",
        traj.stop.as_str(),
        traj.stop_time,
        traj.states.len()
    );
    println!("h1 drift {h1:.3e}, mass drift {mass:.3e}");
    if traj.is_trivial() {
        println!("trivial trajectory: u vanishes identically");
    }
    if traj.resolution_tail > RESOLUTION_TOL {
        eprintln!(
            "warning: resolution tail {:.2e} exceeds {RESOLUTION_TOL:e}; the grid no longer resolves the solution",
            traj.resolution_tail
        );
    }
    out.finish(command, sha256_hex(cfg.canonical_json().as_bytes()), BTreeMap::new())?;
    Ok(0)
}

pub enum MetricInput {
    Trajectory(PathBuf),
    ExactSg { a: f64 },
}

pub struct MetricArgs {
    pub input: MetricInput,
    pub lambdas: Vec<f64>,
    pub w_min: Option<f64>,
    pub order: usize,
    pub out: PathBuf,
}

pub fn parse_exact_sg(s: &str) -> Result<f64> {
    let v = s.strip_prefix("a=").unwrap_or(s);
    v.parse().map_err(|_| LabError::invalid(format!("bad --exact-sg value `{s}`; expected a=R")))
}

fn metric_csv(mf: &MetricField) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "E", "F", "G", "W"]).expect("in-memory write");
    for (i, t) in mf.ts.iter().enumerate() {
        for (j, x) in mf.xs.iter().enumerate() {
            let v = [*t, *x, mf.e.at(i, j), mf.f.at(i, j), mf.g.at(i, j), mf.w.at(i, j)];
            w.write_record(v.map(fmt_f64)).expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

fn curvature_csv(c: &CurvatureField) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "K", "masked"]).expect("in-memory write");
    let nx = c.xs.len();
    for (i, t) in c.ts.iter().enumerate() {
        for (j, x) in c.xs.iter().enumerate() {
            let masked = c.mask[i * nx + j];
            let k = if masked { String::new() } else { fmt_f64(c.k.at(i, j)) };
            w.write_record([fmt_f64(*t), fmt_f64(*x), k, (masked as u8).to_string()]).expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

fn curvature_summary(c: &CurvatureField) -> Value {
    json!({
        "order": c.order,
        "w_min": c.w_min,
        "cells": c.mask.len(),
        "unmasked": c.unmasked_count(),
        "median_abs_k_plus_1": c.median_abs_dev(-1.0),
        "max_abs_k_plus_1": c.max_abs_dev(-1.0),
    })
}

fn rect_json(r: &Rect) -> Value {
    json!({
        "t0": r.t0, "t1": r.t1, "x0": r.x0, "x1": r.x1,
        "i0": r.i0, "i1": r.i1, "j0": r.j0, "j1": r.j1,
        "min_abs_w": r.min_abs_w, "ux_sign": r.ux_sign,
    })
}

pub fn discs_json(traj: &Trajectory, res: &std::result::Result<DiscReport, pss_core::geolab::GeoError>) -> Value {
    match res {
        Ok(r) => json!({
            "found": true,
            "lambda": r.lambda,
            "w_min": r.w_min,
            "seed_index": r.seed_index,
            "seed_time": traj.states[r.seed_index].t,
            "disjoint": r.disjoint,
            "opposite_signs": r.b1.ux_sign == -r.b2.ux_sign,
            "revalidated": revalidate_discs(traj, r).is_ok(),
            "m_nonconstant": [nonconstancy_check(traj, &r.b1), nonconstancy_check(traj, &r.b2)],
            "b1": rect_json(&r.b1),
            "b2": rect_json(&r.b2),
        }),
        Err(e) => json!({ "found": false, "reason": e.to_string() }),
    }
}

pub fn locus_json(l: &SingularLocus) -> Value {
    let br = |v: &[pss_core::geolab::Bracket]| -> Vec<Value> { v.iter().map(|b| json!([b.lo, b.hi])).collect() };
    json!({
        "lambda": l.lambda,
        "every_slice_has_zero": l.every_slice_has_zero(),
        "slices": l.slices.iter().map(|s| json!({
            "t": s.t,
            "ux_zeros": br(&s.ux),
            "f11_zeros": br(&s.f11),
            "everywhere_degenerate": s.everywhere_degenerate,
            "missing_zero": s.missing_zero,
        })).collect::<Vec<_>>(),
    })
}

/// Chains the zeros of consecutive slices into curves by nearest neighbour.
fn zero_curves(l: &SingularLocus, max_jump: f64) -> Vec<Vec<(f64, f64)>> {
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for s in &l.slices {
        let mut next_open = Vec::new();
        for b in &s.ux {
            let x = b.mid();
            let near = open
                .iter()
                .copied()
                .filter(|&c| !next_open.contains(&c))
                .map(|c| (c, (curves[c].last().unwrap().0 - x).abs()))
                .filter(|&(_, d)| d <= max_jump)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match near {
                Some((c, _)) => {
                    curves[c].push((x, s.t));
                    next_open.push(c);
                }
                None => {
                    curves.push(vec![(x, s.t)]);
                    next_open.push(curves.len() - 1);
                }
            }
        }
        open = next_open;
    }
    curves
}

fn metric_for_trajectory(traj: &Trajectory, lambda: f64, args: &MetricArgs, out: &mut OutputDir, dir: &str) -> Result<Value> {
    let file = |name: &str| if dir.is_empty() { name.to_string() } else { format!("{dir}/{name}") };
    let fields = omega_fields(traj, lambda)?;
    let mf = metric_field(&fields);
    let max_w = mf.w.max_abs();
    let w_min = args.w_min.unwrap_or(DEFAULT_WMIN_REL * max_w);
    out.write(&file("metric.csv"), &metric_csv(&mf))?;

    let locus = ux_zero_slices(traj, lambda)?;
    out.write_json(&file("locus.json"), &locus_json(&locus))?;

    let discs = if traj.is_trivial() {
        Err(pss_core::geolab::GeoError::NoDiscs("trivial trajectory".into()))
    } else {
        generic_discs(traj, lambda, args.w_min)
    };
    out.write_json(&file("discs.json"), &discs_json(traj, &discs))?;

    let prefix = uniform_prefix(traj);
    let sp = Spectral::new(traj.grid);
    let curv = brioschi_curvature_periodic(&metric_field(&omega_fields(&prefix, lambda)?), w_min, args.order, &sp)?;
    out.write(&file("curvature.csv"), &curvature_csv(&curv))?;

    let mask: Vec<bool> = mf.w.data.iter().map(|w| w.abs() < w_min).collect();
    let curves = zero_curves(&locus, 0.1 * traj.grid.l);
    let points: Vec<(f64, f64)> = locus.slices.iter().flat_map(|s| s.ux.iter().map(move |b| (b.mid(), s.t))).collect();
    let w_svg = Heatmap {
        title: &format!("W = f11 f22 - f12 f21, lambda = {lambda}"),
        xs: &mf.xs,
        ts: &mf.ts,
        field: &mf.w,
        mask: Some(&mask),
        center: 0.0,
        points: &points,
        curves: &curves,
        legend: "hatched |W| < w_min, black u_x = 0",
    };
    out.write(&file("w.svg"), w_svg.render().as_bytes())?;
    let k_svg = Heatmap {
        title: &format!("K (Brioschi, order {}), lambda = {lambda}", args.order),
        xs: &curv.xs,
        ts: &curv.ts,
        field: &curv.k,
        mask: Some(&curv.mask),
        center: -1.0,
        points: &points,
        curves: &curves,
        legend: "hatched masked, black u_x = 0",
    };
    out.write(&file("k.svg"), k_svg.render().as_bytes())?;

    let summary = json!({
        "lambda": lambda,
        "slices": traj.states.len(),
        "curvature_slices": prefix.states.len(),
        "max_abs_w": max_w,
        "w_min": w_min,
        "det_identity_defect": mf.det_defect(),
        "every_slice_has_ux_zero": locus.every_slice_has_zero(),
        "everywhere_degenerate_slices": locus.slices.iter().filter(|s| s.everywhere_degenerate).count(),
        "discs_found": discs.is_ok(),
        "curvature": curvature_summary(&curv),
        "resolution_tail": traj.resolution_tail,
        "resolved": traj.resolution_tail <= RESOLUTION_TOL,
        "limitation": "grid checks cover disc existence, the determinant identity and K = -1; C1 regularity of the surface is not certified",
    });
    out.write_json(&file("summary.json"), &summary)?;
    println!(
        "lambda = {lambda}: det defect {:.2e}, u_x zero on every slice: {}, discs: {}, median |K+1| {:.3e} over {} cells",
        mf.det_defect(),
        locus.every_slice_has_zero(),
        if discs.is_ok() { "found" } else { "not found" },
        curv.median_abs_dev(-1.0),
        curv.unmasked_count()
    );
    if traj.resolution_tail > RESOLUTION_TOL {
        eprintln!("warning: resolution tail {:.2e} exceeds {RESOLUTION_TOL:e}; curvature is unreliable", traj.resolution_tail);
    }
    Ok(summary)
}

/// Uniform axis `[−half, half]` with spacing `h`.
pub fn kink_axis(half: f64, h: f64) -> Vec<f64> {
    let n = (2.0 * half / h).round() as usize;
    (0..=n).map(|k| -half + h * k as f64).collect()
}

fn metric_exact_sg(a: f64, args: &MetricArgs, out: &mut OutputDir) -> Result<()> {
    let axis = kink_axis(KINK_HALF_WIDTH, KINK_SPACING);
    let mf = sg_exact_metric(a, &axis, &axis)?;
    let max_w = mf.w.max_abs();
    let w_min = args.w_min.unwrap_or(DEFAULT_WMIN_REL * max_w);
    let curv = brioschi_curvature(&mf, w_min, args.order)?;
    out.write("metric.csv", &metric_csv(&mf))?;
    out.write("curvature.csv", &curvature_csv(&curv))?;
    let center: Vec<(f64, f64)> = axis.iter().map(|&t| (-t / (a * a), t)).filter(|(x, _)| x.abs() <= KINK_HALF_WIDTH).collect();
    let mask: Vec<bool> = mf.w.data.iter().map(|w| w.abs() < w_min).collect();
    let curves = [center];
    let w_svg = Heatmap {
        title: &format!("W on the sine-Gordon kink, a = {a}"),
        xs: &mf.xs,
        ts: &mf.ts,
        field: &mf.w,
        mask: Some(&mask),
        center: 0.0,
        points: &[],
        curves: &curves,
        legend: "hatched |W| < w_min, line a x + t/a = 0 (u_x has no zeros)",
    };
    out.write("w.svg", w_svg.render().as_bytes())?;
    let k_svg = Heatmap {
        title: &format!("K (Brioschi, order {}) on the kink, a = {a}", args.order),
        xs: &curv.xs,
        ts: &curv.ts,
        field: &curv.k,
        mask: Some(&curv.mask),
        center: -1.0,
        points: &[],
        curves: &curves,
        legend: "hatched masked",
    };
    out.write("k.svg", k_svg.render().as_bytes())?;
    let summary = json!({
        "exact_sg": { "a": a, "half_width": KINK_HALF_WIDTH, "spacing": KINK_SPACING },
        "max_abs_w": max_w,
        "w_min": w_min,
        "det_identity_defect": mf.det_defect(),
        "curvature": curvature_summary(&curv),
    });
    out.write_json("summary.json", &summary)?;
    println!(
        "kink a = {a}: det defect {:.2e}, median |K+1| {:.3e}, max |K+1| {:.3e} over {} cells",
        mf.det_defect(),
        curv.median_abs_dev(-1.0),
        curv.max_abs_dev(-1.0),
        curv.unmasked_count()
    );
    Ok(())
}

pub fn metric(args: &MetricArgs, command: Vec<String>) -> Result<i32> {
    let mut out = OutputDir::create(&args.out)?;
    let digest = match &args.input {
        MetricInput::ExactSg { a } => {
            metric_exact_sg(*a, args, &mut out)?;
            sha256_hex(json!({ "exact_sg": a, "w_min": args.w_min, "order": args.order }).to_string().as_bytes())
        }
        MetricInput::Trajectory(p) => {
            let bytes = fs::read(p).map_err(|e| LabError::io(p, e))?;
            let traj = from_csv(&bytes, p)?;
            if args.lambdas.is_empty() {
                return Err(LabError::invalid("no lambda given"));
            }
            for &lambda in &args.lambdas {
                let dir = if args.lambdas.len() == 1 { String::new() } else { format!("lambda-{lambda}") };
                metric_for_trajectory(&traj, lambda, args, &mut out, &dir)?;
            }
            let opts = json!({ "trajectory": sha256_hex(&bytes), "lambda": args.lambdas, "w_min": args.w_min, "order": args.order });
            sha256_hex(opts.to_string().as_bytes())
        }
    };
    out.finish(command, digest, BTreeMap::new())?;
    Ok(0)
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";

fn summary_lines(path: &str, v: &Value) -> Vec<String> {
    let name = Path::new(path).file_name().and_then(|n| n.to_str()).unwrap_or(path);
    let s = |k: &str| v.get(k).map(|x| x.to_string()).unwrap_or_else(|| "?".into());
    match name {
        "verify.json" => {
            let mut l = vec![format!("{path}: {} is {} modulo {}", s("name"), s("status"), s("pde"))];
            if let Some(m) = v.get("multipliers") {
                l.push(format!("  multipliers {m}"));
            }
            l
        }
        "erratum.json" => vec![format!("{path}: {}", s("finding"))],
        "zero_curv.json" => vec![format!("{path}: {} with sign {}: reduced = {}", s("name"), s("sign"), s("reduced"))],
        "diagnostics.json" => vec![
            format!("{path}: stop {} at t = {} (numerical lifespan proxy)", s("stop_reason"), s("numerical_lifespan_proxy")),
            format!("  h1 drift {}, mass drift {}, resolution tail {}", s("h1_drift"), s("mass_drift"), s("resolution_tail")),
            format!("  h(t) < 0 at every saved time: {}", s("h_negative_everywhere")),
        ],
        "summary.json" => {
            let c = v.get("curvature").cloned().unwrap_or(Value::Null);
            let g = |k: &str| c.get(k).map(|x| x.to_string()).unwrap_or_else(|| "?".into());
            let mut l = vec![
                format!("{path}: det identity defect {}", s("det_identity_defect")),
                format!("  median |K+1| {}, max |K+1| {} over {} unmasked cells", g("median_abs_k_plus_1"), g("max_abs_k_plus_1"), g("unmasked")),
            ];
            if v.get("discs_found").is_some() {
                l.push(format!("  u_x zero on every slice: {}, discs found: {}", s("every_slice_has_ux_zero"), s("discs_found")));
            }
            if let Some(lim) = v.get("limitation").and_then(Value::as_str) {
                l.push(format!("  note: {lim}"));
            }
            l
        }
        "discs.json" => vec![format!("{path}: found {}, disjoint {}", s("found"), s("disjoint"))],
        _ => Vec::new(),
    }
}

pub fn report(dir: &Path) -> Result<i32> {
    let manifest = read_manifest(dir)?;
    let mut missing = Vec::new();
    let mut mismatches = Vec::new();
    let mut files = Vec::new();
    let mut contents = serde_json::Map::new();
    let mut text = vec![format!("run: psslab {}", manifest.command.join(" ")), format!("tool version {}", manifest.tool_version)];
    for o in &manifest.outputs {
        let path = dir.join(&o.path);
        let Ok(bytes) = fs::read(&path) else {
            missing.push(o.path.clone());
            continue;
        };
        let digest = sha256_hex(&bytes);
        if digest != o.sha256 {
            eprintln!("warning: digest mismatch for {} (manifest {}, file {digest})", o.path, o.sha256);
            mismatches.push(o.path.clone());
        }
        files.push(json!({ "path": o.path, "sha256": digest, "bytes": bytes.len() }));
        if o.path.ends_with(".json") {
            let v: Value = serde_json::from_slice(&bytes).map_err(|source| LabError::Json { path: path.clone(), source })?;
            text.extend(summary_lines(&o.path, &v));
            contents.insert(o.path.clone(), v);
        }
    }
    if !missing.is_empty() {
        for m in &missing {
            eprintln!("error: missing output {}", dir.join(m).display());
        }
        return Ok(2);
    }
    for m in &mismatches {
        text.push(format!("warning: {m} differs from its manifest digest"));
    }
    let report = json!({
        "manifest": manifest,
        "files": files,
        "digest_mismatches": mismatches,
        "contents": contents,
    });
    fs::write(dir.join(REPORT_JSON), json_bytes(&report)).map_err(|e| LabError::io(dir.join(REPORT_JSON), e))?;
    let mut body = text.join("\n");
    body.push('\n');
    fs::write(dir.join(REPORT_TXT), &body).map_err(|e| LabError::io(dir.join(REPORT_TXT), e))?;
    print!("{body}");
    Ok(0)
}
