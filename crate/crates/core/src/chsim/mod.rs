//! Fourier pseudospectral Camassa–Holm solver on a periodic box, stepping
//! `m_t = −(u m_x + 2 u_x m)` with `m = u − u_xx` by classical RK4.

mod fft;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub use fft::Fft;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ChError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} grid values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },
    #[error("initial spectrum too rough: {ratio:e} of the peak beyond 2/3 of the Nyquist band")]
    RoughInitialDatum { ratio: f64 },
}

/// Periodic box `[−L, L)` sampled at `N` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub l: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(l: f64, n: usize) -> Result<Self, ChError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(ChError::InvalidGrid(alloc::format!("half-length {l} must be positive")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(ChError::InvalidGrid(alloc::format!("N = {n} must be a power of two >= 16")));
        }
        Ok(GridSpec { l, n })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed mode index of FFT slot `j`, in `−N/2 ..= N/2 − 1`.
    pub fn mode(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        PI * self.mode(j) as f64 / self.l
    }

    fn check_len(&self, f: &[f64]) -> Result<(), ChError> {
        if f.len() == self.n {
            Ok(())
        } else {
            Err(ChError::LengthMismatch { expected: self.n, got: f.len() })
        }
    }
}

/// Transforms on one grid, with the FFT plan built once.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub grid: GridSpec,
    fft: Fft,
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        Spectral { grid, fft: Fft::new(grid.n) }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        self.fft.forward_real(f)
    }

    pub fn inverse(&self, c: Vec<Complex64>) -> Vec<f64> {
        self.fft.inverse_real(c)
    }

    /// Multiplies coefficients by `(ik)^order`; the Nyquist mode is dropped
    /// for odd orders.
    pub fn deriv_coeffs(&self, c: &[Complex64], order: u32) -> Vec<Complex64> {
        let g = self.grid;
        c.iter()
            .enumerate()
            .map(|(j, &z)| {
                if order % 2 == 1 && j == g.n / 2 {
                    return Complex64::new(0.0, 0.0);
                }
                z * Complex64::new(0.0, g.wavenumber(j)).powu(order)
            })
            .collect()
    }

    pub fn deriv(&self, f: &[f64], order: u32) -> Vec<f64> {
        self.inverse(self.deriv_coeffs(&self.forward(f), order))
    }

    pub fn helmholtz_coeffs(&self, m_hat: &[Complex64]) -> Vec<Complex64> {
        m_hat
            .iter()
            .enumerate()
            .map(|(j, &z)| {
                let k = self.grid.wavenumber(j);
                z / (1.0 + k * k)
            })
            .collect()
    }

    /// Zeroes modes with `|j| > N/3`.
    pub fn dealias(&self, c: &mut [Complex64]) {
        let cut = self.grid.n as i64 / 3;
        for (j, z) in c.iter_mut().enumerate() {
            if self.grid.mode(j).abs() > cut {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Evaluates the trigonometric interpolant of `c` (forward coefficients
    /// of real data) at an arbitrary `x`.
    pub fn interpolate(&self, c: &[Complex64], x: f64) -> f64 {
        let g = self.grid;
        let half = g.n / 2;
        let (sn, cs) = (g.wavenumber(1) * (x + g.l)).sin_cos();
        let step = Complex64::new(cs, sn);
        let mut w = Complex64::new(1.0, 0.0);
        let mut acc = c[0].re;
        for z in &c[1..half] {
            w *= step;
            acc += 2.0 * (z * w).re;
        }
        if half > 0 {
            w *= step;
            acc += c[half].re * w.re;
        }
        acc / g.n as f64
    }
}

/// `u` with `(1 − ∂²ₓ)u = m`.
pub fn helmholtz_invert(m: &[f64], g: GridSpec) -> Result<Vec<f64>, ChError> {
    g.check_len(m)?;
    let sp = Spectral::new(g);
    Ok(sp.inverse(sp.helmholtz_coeffs(&sp.forward(m))))
}

pub fn spectral_deriv(f: &[f64], order: u32, g: GridSpec) -> Result<Vec<f64>, ChError> {
    g.check_len(f)?;
    Ok(Spectral::new(g).deriv(f, order))
}

/// `m = u − u_xx` computed spectrally.
pub fn m_from_u(u: &[f64], g: GridSpec) -> Result<Vec<f64>, ChError> {
    let uxx = spectral_deriv(u, 2, g)?;
    Ok(u.iter().zip(&uxx).map(|(a, b)| a - b).collect())
}

/// A solution slice: `m` is the evolved field, `u` and `u_x` follow from it.
#[derive(Clone, Debug, PartialEq)]
pub struct ChState {
    pub t: f64,
    pub m: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
}

impl ChState {
    pub fn from_m(t: f64, m: Vec<f64>, sp: &Spectral) -> Self {
        let u_hat = sp.helmholtz_coeffs(&sp.forward(&m));
        let u_x = sp.inverse(sp.deriv_coeffs(&u_hat, 1));
        let u = sp.inverse(u_hat);
        ChState { t, m, u, u_x }
    }

    pub fn from_u(t: f64, u: &[f64], sp: &Spectral) -> Result<Self, ChError> {
        sp.grid.check_len(u)?;
        let m = m_from_u(u, sp.grid)?;
        Ok(ChState::from_m(t, m, sp))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().chain(&self.u).chain(&self.u_x).all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub save_every: usize,
    pub dealias: bool,
    pub breaking_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { dt: 1e-3, t_end: 1.0, save_every: 100, dealias: true, breaking_threshold: -50.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ChError> {
        let bad = |s: String| Err(ChError::InvalidConfig(s));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(alloc::format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(alloc::format!("t_end = {} must be positive", self.t_end));
        }
        if self.save_every == 0 {
            return bad("save_every must be at least 1".into());
        }
        if !(self.breaking_threshold < 0.0) {
            return bad(alloc::format!("breaking threshold {} must be negative", self.breaking_threshold));
        }
        Ok(())
    }
}

/// `∂ₜm = −(u m_x + 2 u_x m)` with products formed pointwise.
pub fn ch_rhs(m: &[f64], g: GridSpec, dealias: bool) -> Result<Vec<f64>, ChError> {
    g.check_len(m)?;
    Ok(rhs(m, &Spectral::new(g), dealias))
}

fn rhs(m: &[f64], sp: &Spectral, dealias: bool) -> Vec<f64> {
    let mut m_hat = sp.forward(m);
    if dealias {
        sp.dealias(&mut m_hat);
    }
    let u_hat = sp.helmholtz_coeffs(&m_hat);
    let u_x = sp.inverse(sp.deriv_coeffs(&u_hat, 1));
    let m_x = sp.inverse(sp.deriv_coeffs(&m_hat, 1));
    let u = sp.inverse(u_hat);
    let m_f = if dealias { sp.inverse(m_hat) } else { m.to_vec() };
    let out: Vec<f64> = (0..m.len()).map(|j| -(u[j] * m_x[j] + 2.0 * u_x[j] * m_f[j])).collect();
    if !dealias {
        return out;
    }
    let mut c = sp.forward(&out);
    sp.dealias(&mut c);
    sp.inverse(c)
}

/// One classical RK4 step of size `dt` (negative allowed).
pub fn rk4_step(s: &ChState, dt: f64, sp: &Spectral, dealias: bool) -> Result<ChState, ChError> {
    let m = &s.m;
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { m.iter().zip(k).map(|(x, y)| x + a * y).collect() };
    let k1 = rhs(m, sp, dealias);
    let k2 = rhs(&axpy(dt / 2.0, &k1), sp, dealias);
    let k3 = rhs(&axpy(dt / 2.0, &k2), sp, dealias);
    let k4 = rhs(&axpy(dt, &k3), sp, dealias);
    let next: Vec<f64> = (0..m.len())
        .map(|j| m[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let out = ChState::from_m(s.t + dt, next, sp);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(ChError::NonFinite { t: out.t })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// `∫(u² + u_x²) dx`.
    pub h1: f64,
    /// `∫ m dx`.
    pub mass: f64,
    /// `I(t) = min u_x`, attained at `a_t`.
    pub i_t: f64,
    /// `S(t) = max u_x`, attained at `b_t`.
    pub s_t: f64,
    pub h_t: f64,
    pub a_t: f64,
    pub b_t: f64,
    /// Refined zeros of `u_x`.
    pub c_list: Vec<f64>,
}

pub fn diagnostics(s: &ChState, sp: &Spectral) -> Diagnostics {
    let g = sp.grid;
    let dx = g.dx();
    let h1 = dx * s.u.iter().zip(&s.u_x).map(|(u, v)| u * u + v * v).sum::<f64>();
    let mass = dx * s.m.iter().sum::<f64>();
    let (mut ia, mut ib) = (0, 0);
    for (j, &v) in s.u_x.iter().enumerate() {
        if v < s.u_x[ia] {
            ia = j;
        }
        if v > s.u_x[ib] {
            ib = j;
        }
    }
    let (i_t, s_t) = (s.u_x[ia], s.u_x[ib]);
    let c_list = crate::geolab::ux_zero_slice(s, sp).map(|z| z.midpoints()).unwrap_or_default();
    Diagnostics { t: s.t, h1, mass, i_t, s_t, h_t: i_t * s_t, a_t: g.x(ia), b_t: g.x(ib), c_list }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    Breaking,
    NonFinite,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::Breaking => "breaking",
            StopReason::NonFinite => "non-finite",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub states: Vec<ChState>,
    pub diagnostics: Vec<Diagnostics>,
    pub stop: StopReason,
    /// Numerical proxy for the lifespan: the time of the last finite state.
    pub stop_time: f64,
    /// `|u|, |u_x| < 1e-8` at the box edges at `t = 0`.
    pub boundary_decay: bool,
    /// Saved times violating `I(t) < 0 < S(t)`.
    pub sign_violations: Vec<f64>,
    /// Largest [`resolution_tail`] of `u` over the saved states.
    pub resolution_tail: f64,
}

impl Trajectory {
    pub fn is_trivial(&self) -> bool {
        self.states.iter().all(|s| s.u.iter().all(|&v| v == 0.0))
    }
}

pub const BOUNDARY_TOL: f64 = 1e-8;
pub const SPECTRAL_TAIL_TOL: f64 = 1e-10;
/// A [`resolution_tail`] above this means the grid has stopped resolving
/// the solution.
pub const RESOLUTION_TOL: f64 = 1e-6;

/// Largest `|û_j|` with `|j| > N/3`, relative to the peak.
pub fn spectral_tail(u: &[f64], sp: &Spectral) -> f64 {
    tail_beyond(u, sp, sp.grid.n as i64 / 3)
}

/// Largest `|û_j|` with `|j| > N/4`, relative to the peak. Unlike
/// [`spectral_tail`] this band survives dealiasing.
pub fn resolution_tail(u: &[f64], sp: &Spectral) -> f64 {
    tail_beyond(u, sp, sp.grid.n as i64 / 4)
}

fn tail_beyond(u: &[f64], sp: &Spectral, cut: i64) -> f64 {
    let c = sp.forward(u);
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    c.iter()
        .enumerate()
        .filter(|(j, _)| sp.grid.mode(*j).abs() > cut)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max)
        / peak
}

fn boundary_decay(s: &ChState) -> bool {
    let n = s.u.len();
    [0, n - 1].iter().all(|&j| s.u[j].abs() < BOUNDARY_TOL && s.u_x[j].abs() < BOUNDARY_TOL)
}

pub fn integrate(u0: &[f64], cfg: &SolverConfig, g: GridSpec) -> Result<Trajectory, ChError> {
    cfg.validate()?;
    g.check_len(u0)?;
    let sp = Spectral::new(g);
    let tail = spectral_tail(u0, &sp);
    if tail > SPECTRAL_TAIL_TOL {
        return Err(ChError::RoughInitialDatum { ratio: tail });
    }
    let mut s = ChState::from_u(0.0, u0, &sp)?;
    let boundary = boundary_decay(&s);
    let nontrivial = u0.iter().any(|&v| v != 0.0);

    let steps = {
        let r = cfg.t_end / cfg.dt;
        let n = r.round();
        if (r - n).abs() < 1e-9 * r.max(1.0) {
            n as usize
        } else {
            r.ceil() as usize
        }
    };
    let mut states = alloc::vec![s.clone()];
    let mut stop = StopReason::Completed;
    for step in 1..=steps {
        let dt = if step == steps { cfg.t_end - s.t } else { cfg.dt };
        match rk4_step(&s, dt, &sp, cfg.dealias) {
            Ok(next) => s = next,
            Err(ChError::NonFinite { .. }) => {
                stop = StopReason::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        }
        let broke = s.u_x.iter().any(|&v| v < cfg.breaking_threshold);
        if broke || step % cfg.save_every == 0 || step == steps {
            states.push(s.clone());
        }
        if broke {
            stop = StopReason::Breaking;
            break;
        }
    }
    if stop == StopReason::NonFinite && states.last().map(|l| l.t) != Some(s.t) {
        states.push(s.clone());
    }
    let diagnostics: Vec<Diagnostics> = states.iter().map(|st| diagnostics(st, &sp)).collect();
    let sign_violations = if nontrivial {
        diagnostics.iter().filter(|d| !(d.i_t < 0.0 && 0.0 < d.s_t)).map(|d| d.t).collect()
    } else {
        Vec::new()
    };
    let tail = states.iter().map(|st| resolution_tail(&st.u, &sp)).fold(0.0, f64::max);
    Ok(Trajectory {
        grid: g,
        resolution_tail: tail,
        stop_time: s.t,
        states,
        diagnostics,
        stop,
        boundary_decay: boundary,
        sign_violations,
    })
}

/// Named initial data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialDatum {
    /// `amplitude · exp(−((x − center)/width)²)`.
    Gaussian { center: f64, width: f64, amplitude: f64 },
    /// `−steepness · tanh(x) · exp(−x²/8)`, odd with `u_x(0) = −steepness`.
    AntisymTanh { steepness: f64 },
    /// `cos(π k x / L)`.
    Cosine { k: u32 },
    Zero,
}

impl InitialDatum {
    pub fn sample(&self, g: GridSpec) -> Vec<f64> {
        g.xs()
            .into_iter()
            .map(|x| match *self {
                InitialDatum::Gaussian { center, width, amplitude } => {
                    let z = (x - center) / width;
                    amplitude * (-z * z).exp()
                }
                InitialDatum::AntisymTanh { steepness } => -steepness * x.tanh() * (-x * x / 8.0).exp(),
                InitialDatum::Cosine { k } => (PI * k as f64 * x / g.l).cos(),
                InitialDatum::Zero => 0.0,
            })
            .collect()
    }
}
