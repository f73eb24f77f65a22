//! The metric `ω₁² + ω₂²` induced by the Camassa–Holm triad on computed
//! solutions: degenerate locus, generic discs, Gaussian curvature.

mod curvature;

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chsim::{ChState, Spectral, Trajectory};

pub use curvature::{brioschi_curvature, brioschi_curvature_periodic, fd_weights, sg_exact_metric, sg_kink, CurvatureField};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("kink parameter a must be nonzero")]
    ZeroKinkParameter,
    #[error("u_x vanishes identically on the slice t = {t}")]
    EverywhereDegenerate { t: f64 },
    #[error("no certified disc pair: {0}")]
    NoDiscs(String),
    #[error("trajectory has no saved states")]
    EmptyTrajectory,
    #[error("field shapes disagree")]
    ShapeMismatch,
    #[error("grid axis is not uniformly spaced")]
    NonUniform,
    #[error("unsupported stencil order {0}; use 2, 4, 6 or 8")]
    StencilOrder(usize),
}

/// Values on the saved `(t, x)` grid, row `i` holding time `ts[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub nt: usize,
    pub nx: usize,
    pub data: Vec<f64>,
}

impl Grid2 {
    pub fn new(nt: usize, nx: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nt * nx);
        Grid2 { nt, nx, data }
    }

    pub fn from_fn(nt: usize, nx: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nt * nx);
        for i in 0..nt {
            for j in 0..nx {
                data.push(f(i, j));
            }
        }
        Grid2 { nt, nx, data }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nx + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.nx..(i + 1) * self.nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn zip_map(&self, other: &Grid2, f: impl Fn(f64, f64) -> f64) -> Grid2 {
        assert_eq!((self.nt, self.nx), (other.nt, other.nx));
        Grid2::new(self.nt, self.nx, self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect())
    }
}

/// `λ/2 + 1/(2λ)`.
pub fn kappa(lambda: f64) -> f64 {
    lambda / 2.0 + 1.0 / (2.0 * lambda)
}

/// Coefficients of the Camassa–Holm triad on a trajectory; `f₂₁ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaFields {
    pub lambda: f64,
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub f11: Grid2,
    pub f12: Grid2,
    pub f22: Grid2,
}

pub fn omega_point(lambda: f64, u: f64, m: f64, u_x: f64) -> (f64, f64, f64) {
    let f11 = kappa(lambda) - m;
    let f12 = u * m + lambda * u / 2.0 - u / (2.0 * lambda) - 0.5 - lambda * lambda / 2.0;
    (f11, f12, -u_x)
}

pub fn omega_fields(traj: &Trajectory, lambda: f64) -> Result<OmegaFields, GeoError> {
    if lambda == 0.0 {
        return Err(GeoError::ZeroLambda);
    }
    if traj.states.is_empty() {
        return Err(GeoError::EmptyTrajectory);
    }
    let (nt, nx) = (traj.states.len(), traj.grid.n);
    let pt = |i: usize, j: usize| {
        let s = &traj.states[i];
        omega_point(lambda, s.u[j], s.m[j], s.u_x[j])
    };
    Ok(OmegaFields {
        lambda,
        ts: traj.states.iter().map(|s| s.t).collect(),
        xs: traj.grid.xs(),
        f11: Grid2::from_fn(nt, nx, |i, j| pt(i, j).0),
        f12: Grid2::from_fn(nt, nx, |i, j| pt(i, j).1),
        f22: Grid2::from_fn(nt, nx, |i, j| pt(i, j).2),
    })
}

/// `W = f₁₁f₂₂ − f₁₂f₂₁ = f₁₁f₂₂`.
pub fn wedge_field(f: &OmegaFields) -> Grid2 {
    f.f11.zip_map(&f.f22, |a, b| a * b)
}

/// `E = f₁₁²`, `F = f₁₁f₁₂`, `G = f₁₂² + f₂₂²` and `W` on a `(t, x)` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    pub lambda: f64,
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub e: Grid2,
    pub f: Grid2,
    pub g: Grid2,
    pub w: Grid2,
}

impl MetricField {
    /// Largest `|EG − F² − W²| / max(EG, W², tiny)` over the grid.
    pub fn det_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.e.data.len() {
            let (e, f, g, w) = (self.e.data[k], self.f.data[k], self.g.data[k], self.w.data[k]);
            let scale = (e * g).abs().max(f * f).max(w * w).max(f64::MIN_POSITIVE);
            worst = worst.max((e * g - f * f - w * w).abs() / scale);
        }
        worst
    }
}

pub fn metric_field(f: &OmegaFields) -> MetricField {
    MetricField {
        lambda: f.lambda,
        ts: f.ts.clone(),
        xs: f.xs.clone(),
        e: f.f11.zip_map(&f.f11, |a, _| a * a),
        f: f.f11.zip_map(&f.f12, |a, b| a * b),
        g: f.f12.zip_map(&f.f22, |a, b| a * a + b * b),
        w: wedge_field(f),
    }
}

/// `[lo, hi]` with a strict sign change of the interpolant between its ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

pub const BRACKET_WIDTH: f64 = 1e-8;
/// Grid values below this fraction of the largest `|value|` count as noise.
pub const NOISE_REL: f64 = 1e-12;
/// A slice whose `max |u_x|` is below this fraction of `max(|u|, |m|)` is
/// treated as `u_x ≡ 0`.
pub const FLAT_REL: f64 = 1e-11;

/// Sign-change brackets of a periodic grid function, refined by bisection on
/// its trigonometric interpolant. Returns `None` when the function is below
/// `floor` everywhere.
pub fn sign_change_brackets(f: &[f64], sp: &Spectral, floor: f64) -> Option<Vec<Bracket>> {
    let g = sp.grid;
    let peak = f.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    if peak <= floor {
        return None;
    }
    let noise = (NOISE_REL * peak).max(floor);
    let sig: Vec<usize> = (0..g.n).filter(|&j| f[j].abs() > noise).collect();
    let coeffs = sp.forward(f);
    let mut out = Vec::new();
    for (k, &p) in sig.iter().enumerate() {
        let (q, wrap) = match sig.get(k + 1) {
            Some(&q) => (q, false),
            None => (sig[0], true),
        };
        if wrap && sig.len() == 1 {
            break;
        }
        if (f[p] > 0.0) == (f[q] > 0.0) {
            continue;
        }
        let lo = g.x(p);
        let hi = if wrap { g.x(q) + 2.0 * g.l } else { g.x(q) };
        out.push(bisect(&coeffs, sp, lo, hi, f[p] > 0.0));
    }
    Some(out)
}

fn bisect(c: &[Complex64], sp: &Spectral, mut lo: f64, mut hi: f64, lo_positive: bool) -> Bracket {
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if (sp.interpolate(c, mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = sp.grid.l;
    if lo >= l {
        lo -= 2.0 * l;
        hi -= 2.0 * l;
    }
    Bracket { lo, hi }
}

/// Zeros of `u_x` on one slice.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceZeros {
    pub t: f64,
    pub brackets: Vec<Bracket>,
}

impl SliceZeros {
    pub fn midpoints(&self) -> Vec<f64> {
        self.brackets.iter().map(Bracket::mid).collect()
    }
}

fn flat_floor(s: &ChState) -> f64 {
    let scale = s.u.iter().chain(&s.m).fold(0.0, |a: f64, v| a.max(v.abs()));
    FLAT_REL * scale
}

pub fn ux_zero_slice(s: &ChState, sp: &Spectral) -> Result<SliceZeros, GeoError> {
    sign_change_brackets(&s.u_x, sp, flat_floor(s))
        .map(|brackets| SliceZeros { t: s.t, brackets })
        .ok_or(GeoError::EverywhereDegenerate { t: s.t })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocusSlice {
    pub t: f64,
    /// Sign changes of `u_x`.
    pub ux: Vec<Bracket>,
    /// Sign changes of `m − (λ/2 + 1/(2λ))`.
    pub f11: Vec<Bracket>,
    pub everywhere_degenerate: bool,
    /// Non-degenerate slice without any `u_x` zero.
    pub missing_zero: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularLocus {
    pub lambda: f64,
    pub slices: Vec<LocusSlice>,
}

impl SingularLocus {
    pub fn every_slice_has_zero(&self) -> bool {
        !self.slices.is_empty() && self.slices.iter().all(|s| !s.ux.is_empty())
    }
}

pub fn ux_zero_slices(traj: &Trajectory, lambda: f64) -> Result<SingularLocus, GeoError> {
    if lambda == 0.0 {
        return Err(GeoError::ZeroLambda);
    }
    let sp = Spectral::new(traj.grid);
    let k = kappa(lambda);
    let slices = traj
        .states
        .iter()
        .map(|s| {
            let (ux, degenerate) = match ux_zero_slice(s, &sp) {
                Ok(z) => (z.brackets, false),
                Err(_) => (Vec::new(), true),
            };
            let shifted: Vec<f64> = s.m.iter().map(|m| m - k).collect();
            let f11 = sign_change_brackets(&shifted, &sp, 0.0).unwrap_or_default();
            LocusSlice { t: s.t, missing_zero: !degenerate && ux.is_empty(), ux, f11, everywhere_degenerate: degenerate }
        })
        .collect();
    Ok(SingularLocus { lambda, slices })
}

/// Index rectangle `[i0, i1] × [j0, j1]` on the saved grid, with its extent.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub min_abs_w: f64,
    pub ux_sign: i8,
}

impl Rect {
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.i0..=self.i1).flat_map(move |i| (self.j0..=self.j1).map(move |j| (i, j)))
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.i0 <= o.i1 && o.i0 <= self.i1 && self.j0 <= o.j1 && o.j0 <= self.j1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscReport {
    pub lambda: f64,
    pub w_min: f64,
    /// Seed time index.
    pub seed_index: usize,
    pub b1: Rect,
    pub b2: Rect,
    pub disjoint: bool,
}

pub const DEFAULT_WMIN_REL: f64 = 1e-3;

fn cell_ok(fields: &OmegaFields, signs: (f64, f64), w_min: f64, i: usize, j: usize) -> bool {
    let (ux, f11) = (-fields.f22.at(i, j), fields.f11.at(i, j));
    ux * signs.0 > 0.0 && f11 * signs.1 > 0.0 && (ux * f11).abs() > w_min
}

fn grow(fields: &OmegaFields, seed: (usize, usize), w_min: f64) -> Option<Rect> {
    let (nt, nx) = (fields.f11.nt, fields.f11.nx);
    let sign = -fields.f22.at(seed.0, seed.1).signum();
    let signs = (sign, fields.f11.at(seed.0, seed.1).signum());
    if !cell_ok(fields, signs, w_min, seed.0, seed.1) {
        return None;
    }
    let (mut i0, mut i1, mut j0, mut j1) = (seed.0, seed.0, seed.1, seed.1);
    let ok_row = |i: usize, j0: usize, j1: usize| (j0..=j1).all(|j| cell_ok(fields, signs, w_min, i, j));
    let ok_col = |j: usize, i0: usize, i1: usize| (i0..=i1).all(|i| cell_ok(fields, signs, w_min, i, j));
    loop {
        let mut grew = false;
        if i0 > 0 && ok_row(i0 - 1, j0, j1) {
            i0 -= 1;
            grew = true;
        }
        if i1 + 1 < nt && ok_row(i1 + 1, j0, j1) {
            i1 += 1;
            grew = true;
        }
        if j0 > 0 && ok_col(j0 - 1, i0, i1) {
            j0 -= 1;
            grew = true;
        }
        if j1 + 1 < nx && ok_col(j1 + 1, i0, i1) {
            j1 += 1;
            grew = true;
        }
        if !grew {
            break;
        }
    }
    let mut r = Rect {
        i0,
        i1,
        j0,
        j1,
        t0: fields.ts[i0],
        t1: fields.ts[i1],
        x0: fields.xs[j0],
        x1: fields.xs[j1],
        min_abs_w: 0.0,
        ux_sign: sign as i8,
    };
    r.min_abs_w = r
        .cells()
        .map(|(i, j)| (fields.f11.at(i, j) * fields.f22.at(i, j)).abs())
        .fold(f64::INFINITY, f64::min);
    Some(r)
}

/// Two rectangles around the extrema of `u_x` at the middle saved time. On
/// each, `u_x` and `f₁₁` keep strict signs and `|W| > w_min`; the two `u_x`
/// signs are opposite.
pub fn generic_discs(traj: &Trajectory, lambda: f64, w_min: Option<f64>) -> Result<DiscReport, GeoError> {
    let fields = omega_fields(traj, lambda)?;
    let w_min = w_min.unwrap_or_else(|| DEFAULT_WMIN_REL * wedge_field(&fields).max_abs());
    let mid = traj.states.len() / 2;
    let ux = &traj.states[mid].u_x;
    let (mut ja, mut jb) = (0, 0);
    for (j, &v) in ux.iter().enumerate() {
        if v < ux[ja] {
            ja = j;
        }
        if v > ux[jb] {
            jb = j;
        }
    }
    if !(ux[ja] < 0.0 && ux[jb] > 0.0) {
        return Err(GeoError::NoDiscs("u_x does not take both signs at the seed time".into()));
    }
    let b1 = grow(&fields, (mid, ja), w_min)
        .ok_or_else(|| GeoError::NoDiscs(alloc::format!("|W| <= w_min at the u_x minimum (x = {})", fields.xs[ja])))?;
    let b2 = grow(&fields, (mid, jb), w_min)
        .ok_or_else(|| GeoError::NoDiscs(alloc::format!("|W| <= w_min at the u_x maximum (x = {})", fields.xs[jb])))?;
    let disjoint = !b1.intersects(&b2);
    let report = DiscReport { lambda, w_min, seed_index: mid, b1, b2, disjoint };
    revalidate_discs(traj, &report).map_err(GeoError::NoDiscs)?;
    Ok(report)
}

/// Re-checks a report against the raw states, recomputing every cell.
pub fn revalidate_discs(traj: &Trajectory, r: &DiscReport) -> Result<(), String> {
    if r.b1.intersects(&r.b2) || !r.disjoint {
        return Err("rectangles intersect".into());
    }
    if r.b1.ux_sign == r.b2.ux_sign {
        return Err("rectangles carry the same u_x sign".into());
    }
    let k = kappa(r.lambda);
    for b in [&r.b1, &r.b2] {
        if b.i1 >= traj.states.len() || b.j1 >= traj.grid.n {
            return Err("rectangle outside the grid".into());
        }
        let mut min_w = f64::INFINITY;
        let f11_sign = (k - traj.states[b.i0].m[b.j0]).signum();
        for (i, j) in b.cells() {
            let s = &traj.states[i];
            let f11 = k - s.m[j];
            if s.u_x[j].signum() as i8 != b.ux_sign || s.u_x[j] == 0.0 {
                return Err(alloc::format!("u_x changes sign at t = {}, x = {}", s.t, traj.grid.x(j)));
            }
            if f11 == 0.0 || f11.signum() != f11_sign {
                return Err(alloc::format!("f11 changes sign at t = {}, x = {}", s.t, traj.grid.x(j)));
            }
            let w = (f11 * s.u_x[j]).abs();
            if w <= r.w_min {
                return Err(alloc::format!("|W| <= w_min at t = {}, x = {}", s.t, traj.grid.x(j)));
            }
            min_w = min_w.min(w);
        }
        if !(min_w > 0.0) || (min_w - b.min_abs_w).abs() > 1e-12 * min_w.max(1.0) {
            return Err("recorded min |W| does not match".into());
        }
    }
    Ok(())
}

pub const VARIANCE_TOL: f64 = 1e-10;

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Sample variance of `m` over the rectangle exceeds [`VARIANCE_TOL`].
pub fn nonconstancy_check(traj: &Trajectory, r: &Rect) -> bool {
    variance(&r.cells().map(|(i, j)| traj.states[i].m[j]).collect::<Vec<_>>()) > VARIANCE_TOL
}

/// `u_x` is nonzero throughout the rectangle while `m` is constant there,
/// which no solution permits.
pub fn lemma_violation(traj: &Trajectory, r: &Rect) -> bool {
    let ux_nonzero = r.cells().all(|(i, j)| traj.states[i].u_x[j] != 0.0);
    ux_nonzero && !nonconstancy_check(traj, r)
}

/// The rectangle covering every saved cell.
pub fn full_rect(traj: &Trajectory) -> Rect {
    let (nt, nx) = (traj.states.len(), traj.grid.n);
    Rect {
        i0: 0,
        i1: nt - 1,
        j0: 0,
        j1: nx - 1,
        t0: traj.states[0].t,
        t1: traj.states[nt - 1].t,
        x0: traj.grid.x(0),
        x1: traj.grid.x(nx - 1),
        min_abs_w: 0.0,
        ux_sign: 0,
    }
}
