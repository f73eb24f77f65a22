//! Trajectory CSV (`t,x,u,u_x,m`, one row per grid point per saved time).

use std::path::Path;

use pss_core::chsim::{diagnostics, resolution_tail, ChState, GridSpec, Spectral, StopReason, Trajectory, BOUNDARY_TOL};

use crate::error::{LabError, Result};

pub const HEADER: [&str; 5] = ["t", "x", "u", "u_x", "m"];

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub fn to_csv(traj: &Trajectory) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    let xs = traj.grid.xs();
    for s in &traj.states {
        let t = fmt_f64(s.t);
        for (j, x) in xs.iter().enumerate() {
            w.write_record([t.as_str(), &fmt_f64(*x), &fmt_f64(s.u[j]), &fmt_f64(s.u_x[j]), &fmt_f64(s.m[j])])
                .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Reads a trajectory written by [`to_csv`]. The box is inferred from the
/// `x` column of the first slice; diagnostics are recomputed.
pub fn from_csv(bytes: &[u8], origin: &Path) -> Result<Trajectory> {
    let bad = |msg: String| LabError::invalid(format!("{}: {msg}", origin.display()));
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().map_err(|source| LabError::Csv { path: origin.into(), source })?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad(format!("expected header {}", HEADER.join(","))));
    }
    let mut rows: Vec<[f64; 5]> = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| LabError::Csv { path: origin.into(), source })?;
        let mut row = [0.0; 5];
        for (c, v) in row.iter_mut().enumerate() {
            *v = rec[c].trim().parse().map_err(|_| bad(format!("row {}: bad number `{}`", k + 2, &rec[c])))?;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no rows".into()));
    }
    let n = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if n < 2 || rows.len() % n != 0 {
        return Err(bad("slices do not share one grid".into()));
    }
    let l = -rows[0][1];
    let grid = GridSpec::new(l, n).map_err(|e| bad(e.to_string()))?;
    let mut states = Vec::new();
    for chunk in rows.chunks(n) {
        let t = chunk[0][0];
        for (j, r) in chunk.iter().enumerate() {
            if r[0] != t || (r[1] - grid.x(j)).abs() > 1e-9 * l.max(1.0) {
                return Err(bad(format!("slice t = {t}: x column is not the uniform grid")));
            }
        }
        states.push(ChState {
            t,
            u: chunk.iter().map(|r| r[2]).collect(),
            u_x: chunk.iter().map(|r| r[3]).collect(),
            m: chunk.iter().map(|r| r[4]).collect(),
        });
    }
    Ok(assemble(grid, states))
}

fn assemble(grid: GridSpec, states: Vec<ChState>) -> Trajectory {
    let sp = Spectral::new(grid);
    let diags: Vec<_> = states.iter().map(|s| diagnostics(s, &sp)).collect();
    let nontrivial = states.iter().any(|s| s.u.iter().any(|&v| v != 0.0));
    let sign_violations = if nontrivial {
        diags.iter().filter(|d| !(d.i_t < 0.0 && 0.0 < d.s_t)).map(|d| d.t).collect()
    } else {
        Vec::new()
    };
    let s0 = &states[0];
    let n = grid.n;
    let boundary_decay = [0, n - 1].iter().all(|&j| s0.u[j].abs() < BOUNDARY_TOL && s0.u_x[j].abs() < BOUNDARY_TOL);
    let tail = states.iter().map(|s| resolution_tail(&s.u, &sp)).fold(0.0, f64::max);
    Trajectory {
        grid,
        stop_time: states.last().map_or(0.0, |s| s.t),
        stop: StopReason::Completed,
        boundary_decay,
        sign_violations,
        resolution_tail: tail,
        diagnostics: diags,
        states,
    }
}

/// Leading saved slices with a uniform time step. A run whose last step was
/// shortened or that stopped between saves ends with an irregular slice.
pub fn uniform_prefix(traj: &Trajectory) -> Trajectory {
    let ts: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    if ts.len() < 3 {
        return traj.clone();
    }
    let h = ts[1] - ts[0];
    let keep = 2 + ts.windows(2).skip(1).take_while(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs()).count();
    let mut out = traj.clone();
    out.states.truncate(keep);
    out.diagnostics.truncate(keep);
    out
}
