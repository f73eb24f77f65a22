//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to fail; the run exits
//! nonzero if any other criterion fails or if a known failure starts passing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use pss_core::chsim::{integrate, GridSpec, InitialDatum, SolverConfig};
use pss_core::forms::{sasaki_triad, OneForm, Triad};
use pss_core::geolab::{full_rect, lemma_violation};
use pss_core::pss::{
    catalog_entry, ch_form_equivalence, degenerate_conditions, first_fundamental, verify_pss, Pde, Status,
    VerifyMode,
};
use pss_core::symcore::{is_zero, parse, total_derivative, Expr, Param, Var, DEFAULT_SEED};
use pss_lab::config::RunConfig;
use serde_json::Value;

/// The displayed Camassa–Holm first fundamental form does not equal the
/// triad's; see `criterion_3`.
const KNOWN_FAILURES: [u32; 1] = [3];

type Outcome = Result<String, String>;

fn psslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psslab")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Result<(), String> {
    let o = psslab(args);
    match o.status.code() {
        Some(0) => Ok(()),
        c => Err(format!("`psslab {}` exited {c:?}: {}", args.join(" "), String::from_utf8_lossy(&o.stderr).trim())),
    }
}

fn json(path: &Path) -> Result<Value, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v.pointer(key).and_then(Value::as_f64).ok_or_else(|| format!("missing number {key}"))
}

fn p(s: &str) -> Expr {
    parse(s).expect("expression parses")
}

fn with_m(s: &str) -> Expr {
    p(&s.replace('M', "(u - u_xx)"))
}

fn same(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a - b)).expect("zero test")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn multipliers_of(name: &str) -> Result<(Status, Vec<Option<Expr>>), String> {
    let e = catalog_entry(name).ok_or("missing catalog entry")?;
    let tr = e.triad().map_err(|e| e.to_string())?;
    let rep = verify_pss(&tr, &e.pde, VerifyMode::Multiplier, DEFAULT_SEED).map_err(|e| e.to_string())?;
    Ok((rep.status, rep.multipliers.to_vec()))
}

fn expect_multipliers(name: &str, want: [&str; 3]) -> Outcome {
    let (status, mu) = multipliers_of(name)?;
    ensure(status == Status::PssVerified, format!("status {}", status.as_str()))?;
    for (m, w) in mu.iter().zip(want) {
        let m = m.as_ref().ok_or("a multiplier is missing")?;
        ensure(same(m, &p(w)), format!("multiplier {m:?} != {w}"))?;
    }
    Ok(format!("mu = ({})", want.join(", ")))
}

fn criterion_1() -> Outcome {
    expect_multipliers("sg", ["0", "0", "-1"])
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let detail = expect_multipliers("ch", ["1", "0", "-1"])?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("{detail} in {secs:.2} s"))
}

fn criterion_3() -> Outcome {
    let sg = catalog_entry("sg").unwrap().triad().unwrap();
    let (e, f, g) = first_fundamental(&sg);
    ensure(same(&e, &p("eta^2")) && same(&f, &p("cos(u)")) && same(&g, &p("1/eta^2")), "sG form differs")?;

    let ch = catalog_entry("ch").unwrap().triad().unwrap();
    let (e, f, g) = first_fundamental(&ch);
    let dx2 = with_m("M^2 - (lambda + 1/lambda)*M + (lambda + 1/lambda)^2/4");
    let dxdt = with_m(
        "-u*M^2 + u*M/lambda + (lambda^2 - 1/lambda^2)*u/4 + lambda*(lambda/2 + 1/(2*lambda))*M \
         - lambda*(lambda/2 + 1/(2*lambda))^2",
    );
    let dt2 = with_m(
        "u*M^2 + u^2*M*(lambda - 1/lambda) + u_x^2 - lambda*(lambda + 1/lambda)*u*M + (lambda + 1/lambda)^2*u^2/4 \
         - (lambda/2)*(lambda + 1/lambda)^2 + (lambda^2/4)*(lambda + 1/lambda)^2",
    );
    let dx2_ok = same(&e, &dx2);
    let cross_is_f = same(&f, &dxdt);
    let cross_is_2f = same(&(Expr::int(2) * &f), &dxdt);
    let dt2_ok = same(&g, &dt2);
    let gap = "(u^2 - u)*M^2 - u^2 - (lambda^2 + 1)*(lambda - 1/lambda)*u/2 + (lambda/2)*(lambda + 1/lambda)^2";
    let gap_ok = same(&(&g - &dt2), &with_m(gap));
    let detail = format!(
        "sG matches; CH dx^2 {}, dxdt bracket = {}, dt^2 {}",
        if dx2_ok { "matches E" } else { "differs from E" },
        if cross_is_f {
            "F (I = E dx^2 + 2F dxdt + G dt^2 needs 2F)"
        } else if cross_is_2f {
            "2F"
        } else {
            "neither F nor 2F"
        },
        if dt2_ok {
            "matches G".to_string()
        } else if gap_ok {
            format!("differs: G - dt^2 = {gap}")
        } else {
            "differs from G".to_string()
        },
    );
    if dx2_ok && cross_is_2f && dt2_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `r` and `want` agree up to a nonzero factor free of jet coordinates.
fn proportional(r: &Expr, want: &Expr) -> bool {
    let q = r / want;
    !is_zero(r).unwrap()
        && is_zero(&total_derivative(&q, Var::X)).unwrap()
        && is_zero(&total_derivative(&q, Var::T)).unwrap()
}

fn factors_match(name: &str, want: &[Expr]) -> Result<(), String> {
    let tr = catalog_entry(name).unwrap().triad().unwrap();
    let got = degenerate_conditions(&tr).map_err(|e| e.to_string())?;
    ensure(got.len() == want.len(), format!("{name}: {} factors, expected {}", got.len(), want.len()))?;
    for w in want {
        ensure(got.iter().any(|g| proportional(g, w)), format!("{name}: no factor proportional to {w:?}"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    factors_match("ch", &[with_m("M - (lambda/2 + 1/(2*lambda))"), p("u_x")])?;
    factors_match("sg", &[p("sin(u)")])?;
    Ok("CH {m - (lambda/2 + 1/(2 lambda)), u_x}, sG {sin u}".into())
}

fn criterion_5(tmp: &Path) -> Outcome {
    let (status, _) = multipliers_of("sg-akns")?;
    ensure(status == Status::PssVerified, "corrected AKNS triad does not verify")?;
    let entry = catalog_entry("sg-akns").unwrap();
    let tr = sasaki_triad(&entry.matrix()).map_err(|e| e.to_string())?;
    let sub = tr.map(|e| e.subs_param(&Param::new("zeta"), &p("i*eta/2")));
    let sg = catalog_entry("sg").unwrap().triad().unwrap();
    for (a, b) in sub.forms().iter().zip(sg.forms()) {
        ensure(same(&a.fx, &b.fx) && same(&a.ft, &b.ft), "Sasaki triad at zeta = i eta/2 differs from the sG triad")?;
    }
    let (status, _) = multipliers_of("sg-akns-printed")?;
    ensure(status == Status::Failed, "printed AKNS data verifies")?;
    let out = tmp.join("c5");
    let o = psslab(&["verify", "--catalog", "sg-akns-printed", "--out", &out.to_string_lossy()]);
    ensure(o.status.code() == Some(1), format!("printed entry exited {:?}", o.status.code()))?;
    let erratum = json(&out.join("erratum.json"))?;
    ensure(erratum["corrected_entry"] == "sg-akns", "erratum does not name the corrected entry")?;
    Ok("corrected A verifies and maps to the sG triad; printed A fails with erratum".into())
}

fn criterion_6() -> Outcome {
    let [printed, conventional] = ch_form_equivalence().map_err(|e| e.to_string())?;
    ensure((printed.alpha, printed.beta, conventional.alpha, conventional.beta) == (2, 1, 1, 2), "unexpected order")?;
    ensure(conventional.matches, "(1,2) does not match")?;
    ensure(!printed.matches, "(2,1) matches")?;
    Ok("(1,2) matches, (2,1) does not".into())
}

fn criterion_7(gauss: &Path) -> Outcome {
    let d = json(&gauss.join("diagnostics.json"))?;
    let (h1, mass) = (num(&d, "/h1_drift")?, num(&d, "/mass_drift")?);
    ensure(h1 < 1e-6 && mass < 1e-8, format!("H1 drift {h1:e}, mass drift {mass:e}"))?;
    Ok(format!("H1 drift {h1:.2e}, mass drift {mass:.2e}"))
}

fn criterion_8() -> Outcome {
    let c = RunConfig::preset("gaussian").map_err(|e| e.to_string())?;
    let (g, base) = (c.grid().map_err(|e| e.to_string())?, c.solver());
    let u0 = c.datum().sample(g);
    let final_u = |dt: f64| -> Result<Vec<f64>, String> {
        let cfg = SolverConfig { dt, save_every: usize::MAX, ..base };
        let tr = integrate(&u0, &cfg, g).map_err(|e| e.to_string())?;
        let last = tr.states.last().ok_or("no states")?;
        ensure((last.t - base.t_end).abs() < 1e-9, format!("stopped at t = {}", last.t))?;
        Ok(last.u.clone())
    };
    let dt = base.dt;
    let reference = final_u(dt / 8.0)?;
    let err = |u: &[f64]| u.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (e1, e2) = (err(&final_u(dt)?), err(&final_u(dt / 2.0)?));
    let ratio = e1 / e2;
    let detail = format!("errors {e1:.2e} / {e2:.2e}, ratio {ratio:.2}");
    ensure((12.0..=20.0).contains(&ratio), detail.clone())?;
    Ok(detail)
}

const LAMBDAS: [&str; 3] = ["0.5", "2", "3"];

fn criterion_9(gauss: &Path, metric: &Path) -> Outcome {
    for l in LAMBDAS {
        let dir = metric.join(format!("lambda-{l}"));
        let s = json(&dir.join("summary.json"))?;
        ensure(s["every_slice_has_ux_zero"] == true, format!("lambda {l}: a slice has no u_x zero"))?;
        let d = json(&dir.join("discs.json"))?;
        ensure(d["found"] == true, format!("lambda {l}: no discs ({})", d["reason"]))?;
        ensure(d["disjoint"] == true && d["opposite_signs"] == true, format!("lambda {l}: discs overlap or share a sign"))?;
        for b in ["/b1/min_abs_w", "/b2/min_abs_w"] {
            ensure(num(&d, b)? > 0.0, format!("lambda {l}: min |W| = 0"))?;
        }
    }
    let diag = json(&gauss.join("diagnostics.json"))?;
    ensure(diag["h_negative_everywhere"] == true, "h(t) >= 0 at some saved time")?;
    Ok(format!("lambda {}: u_x zeros on every slice, two disjoint discs; h < 0 throughout", LAMBDAS.join(", ")))
}

fn criterion_10(summaries: &[PathBuf]) -> Outcome {
    let mut worst: f64 = 0.0;
    for s in summaries {
        let v = num(&json(s)?, "/det_identity_defect")?;
        ensure(v <= 1e-10, format!("{}: defect {v:e}", s.display()))?;
        worst = worst.max(v);
    }
    Ok(format!("max relative defect {worst:.2e} over {} metric fields", summaries.len()))
}

fn criterion_11(kink: &Path, fine: &Path) -> Outcome {
    let k = json(&kink.join("summary.json"))?;
    let (kmax, kcells) = (num(&k, "/curvature/max_abs_k_plus_1")?, num(&k, "/curvature/unmasked")?);
    ensure(kcells > 0.0 && kmax < 1e-3, format!("kink max |K+1| {kmax:e}"))?;
    let c = json(&fine.join("summary.json"))?;
    let (med, cells) = (num(&c, "/curvature/median_abs_k_plus_1")?, num(&c, "/curvature/unmasked")?);
    ensure(cells > 0.0 && med < 1e-2, format!("CH median |K+1| {med:e}"))?;
    Ok(format!("kink max |K+1| {kmax:.2e}, CH median |K+1| {med:.2e} over {cells} cells"))
}

fn scaled_variants(tr: &Triad) -> Vec<Triad> {
    let two = Expr::int(2);
    let mut out = Vec::new();
    for k in 0..3 {
        for dt in [false, true] {
            let w = tr.forms()[k];
            let c = if dt { &w.ft } else { &w.fx };
            if is_zero(c).unwrap() {
                continue;
            }
            let mut forms = [tr.w1.clone(), tr.w2.clone(), tr.w3.clone()];
            forms[k] = if dt { OneForm::new(w.fx.clone(), &two * c) } else { OneForm::new(&two * c, w.ft.clone()) };
            let [a, b, c] = forms;
            out.push(Triad::new(a, b, c));
        }
    }
    out
}

fn criterion_12() -> Outcome {
    let mut checked = 0;
    for (name, pde) in [("sg", Pde::sine_gordon()), ("ch", Pde::camassa_holm())] {
        let tr = catalog_entry(name).unwrap().triad().unwrap();
        for (i, v) in scaled_variants(&tr).iter().enumerate() {
            let rep = verify_pss(v, &pde, VerifyMode::Auto, DEFAULT_SEED).map_err(|e| e.to_string())?;
            ensure(rep.status == Status::Failed, format!("{name} variant {i} still verifies"))?;
            checked += 1;
        }
    }
    let g = GridSpec::new(10.0, 64).map_err(|e| e.to_string())?;
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.05, save_every: 1, ..SolverConfig::default() };
    let mut traj = integrate(&InitialDatum::Zero.sample(g), &cfg, g).map_err(|e| e.to_string())?;
    for s in &mut traj.states {
        s.m.iter_mut().for_each(|m| *m = 0.75);
        s.u_x.iter_mut().for_each(|v| *v = 0.5);
    }
    ensure(lemma_violation(&traj, &full_rect(&traj)), "constant-m grid with u_x = 0.5 passes")?;
    Ok(format!("{checked} doubled coefficients all fail; constant-m grid trips lemma_violation"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let d = tmp.path();
    let arg = |p: PathBuf| p.to_string_lossy().into_owned();
    let (gauss, fine) = (d.join("gauss"), d.join("fine"));
    let (metric, metric_fine, kink) = (d.join("metric"), d.join("metric-fine"), d.join("kink"));

    let prep = (|| -> Result<(), String> {
        run_ok(&["solve", "--preset", "gaussian", "--out", &arg(gauss.clone())])?;
        let traj = arg(gauss.join("trajectory.csv"));
        run_ok(&["metric", "--traj", &traj, "--lambda", &LAMBDAS.join(","), "--out", &arg(metric.clone())])?;
        run_ok(&["solve", "--preset", "gaussian_fine", "--out", &arg(fine.clone())])?;
        let traj = arg(fine.join("trajectory.csv"));
        run_ok(&["metric", "--traj", &traj, "--out", &arg(metric_fine.clone())])?;
        run_ok(&["metric", "--exact-sg", "a=1", "--out", &arg(kink.clone())])
    })();

    let mut summaries: Vec<PathBuf> = LAMBDAS.iter().map(|l| metric.join(format!("lambda-{l}/summary.json"))).collect();
    summaries.push(metric_fine.join("summary.json"));
    summaries.push(kink.join("summary.json"));

    let needs_runs = |f: &dyn Fn() -> Outcome| -> Outcome {
        match &prep {
            Ok(()) => f(),
            Err(e) => Err(format!("runs failed: {e}")),
        }
    };
    let results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5(d)),
        (6, criterion_6()),
        (7, needs_runs(&|| criterion_7(&gauss))),
        (8, criterion_8()),
        (9, needs_runs(&|| criterion_9(&gauss, &metric))),
        (10, needs_runs(&|| criterion_10(&summaries))),
        (11, needs_runs(&|| criterion_11(&kink, &metric_fine))),
        (12, criterion_12()),
    ];

    let mut unexpected = Vec::new();
    for (n, r) in &results {
        let known = KNOWN_FAILURES.contains(n);
        match r {
            Ok(msg) => println!("criterion {n}: PASS - {msg}"),
            Err(msg) => println!("criterion {n}: FAIL{} - {msg}", if known { " (known)" } else { "" }),
        }
        if r.is_ok() == known {
            unexpected.push(*n);
        }
    }
    let passed = results.iter().filter(|(_, r)| r.is_ok()).count();
    println!("acceptance: {passed}/{} pass, known failures {KNOWN_FAILURES:?}", results.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
