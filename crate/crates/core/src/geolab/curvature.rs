use alloc::vec;
use alloc::vec::Vec;


use super::{GeoError, Grid2, MetricField};
use crate::chsim::Spectral;

/// Central-difference weights `(radius, d/dx, d²/dx²)` of the given even order.
pub fn fd_weights(order: usize) -> Result<(usize, Vec<f64>, Vec<f64>), GeoError> {
    let (d1, d2): (Vec<f64>, Vec<f64>) = match order {
        2 => (vec![-0.5, 0.0, 0.5], vec![1.0, -2.0, 1.0]),
        4 => (
            vec![1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
            vec![-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
        ),
        6 => (
            vec![-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
            vec![1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
        ),
        8 => (
            vec![
                1.0 / 280.0,
                -4.0 / 105.0,
                1.0 / 5.0,
                -4.0 / 5.0,
                0.0,
                4.0 / 5.0,
                -1.0 / 5.0,
                4.0 / 105.0,
                -1.0 / 280.0,
            ],
            vec![
                -1.0 / 560.0,
                8.0 / 315.0,
                -1.0 / 5.0,
                8.0 / 5.0,
                -205.0 / 72.0,
                8.0 / 5.0,
                -1.0 / 5.0,
                8.0 / 315.0,
                -1.0 / 560.0,
            ],
        ),
        o => return Err(GeoError::StencilOrder(o)),
    };
    Ok((order / 2, d1, d2))
}

/// Gaussian curvature on the grid; masked cells hold `NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub k: Grid2,
    pub mask: Vec<bool>,
    pub w_min: f64,
    pub order: usize,
}

impl CurvatureField {
    pub fn unmasked(&self) -> impl Iterator<Item = f64> + '_ {
        self.k.data.iter().zip(&self.mask).filter(|(_, m)| !**m).map(|(k, _)| *k)
    }

    pub fn unmasked_count(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }

    pub fn max_abs_dev(&self, target: f64) -> f64 {
        self.unmasked().fold(0.0, |a, k| a.max((k - target).abs()))
    }

    /// Median of `|K − target|` over unmasked cells; `NaN` if none.
    pub fn median_abs_dev(&self, target: f64) -> f64 {
        let mut v: Vec<f64> = self.unmasked().map(|k| (k - target).abs()).collect();
        if v.is_empty() {
            return f64::NAN;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }
}

fn spacing(v: &[f64]) -> Result<f64, GeoError> {
    if v.len() < 2 {
        return Err(GeoError::ShapeMismatch);
    }
    let h = v[1] - v[0];
    let uniform = v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !(h > 0.0) || !uniform {
        return Err(GeoError::NonUniform);
    }
    Ok(h)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn stencil(f: &Grid2, w: &[f64], h: f64, along_t: bool) -> Grid2 {
    let r = w.len() / 2;
    let (nt, nx) = (f.nt, f.nx);
    Grid2::from_fn(nt, nx, |i, j| {
        let (p, n) = if along_t { (i, nt) } else { (j, nx) };
        if p < r || p + r >= n {
            return f64::NAN;
        }
        let mut s = 0.0;
        for (a, c) in w.iter().enumerate() {
            if *c != 0.0 {
                s += c * if along_t { f.at(i + a - r, j) } else { f.at(i, j + a - r) };
            }
        }
        s / h
    })
}

fn spectral_x(f: &Grid2, sp: &Spectral, order: u32) -> Grid2 {
    let mut data = Vec::with_capacity(f.data.len());
    for i in 0..f.nt {
        data.extend(sp.deriv(f.row(i), order));
    }
    Grid2::new(f.nt, f.nx, data)
}

/// Brioschi curvature of `E dx² + 2F dx dt + G dt²` by central differences
/// of the given order. Cells with `|W| < w_min` or too close to the edge of
/// the grid are masked.
pub fn brioschi_curvature(mf: &MetricField, w_min: f64, order: usize) -> Result<CurvatureField, GeoError> {
    brioschi(mf, w_min, order, None)
}

/// As [`brioschi_curvature`], with `x`-derivatives taken spectrally on a
/// periodic grid.
pub fn brioschi_curvature_periodic(
    mf: &MetricField,
    w_min: f64,
    order: usize,
    sp: &Spectral,
) -> Result<CurvatureField, GeoError> {
    if sp.grid.n != mf.xs.len() {
        return Err(GeoError::ShapeMismatch);
    }
    brioschi(mf, w_min, order, Some(sp))
}

fn brioschi(mf: &MetricField, w_min: f64, order: usize, sp: Option<&Spectral>) -> Result<CurvatureField, GeoError> {
    let (_, d1, d2) = fd_weights(order)?;
    let (nt, nx) = (mf.e.nt, mf.e.nx);
    if mf.ts.len() != nt || mf.xs.len() != nx {
        return Err(GeoError::ShapeMismatch);
    }
    let hx = spacing(&mf.xs)?;
    let ht = spacing(&mf.ts)?;
    let dx = |f: &Grid2, k: u32| match sp {
        Some(sp) => spectral_x(f, sp, k),
        None => stencil(f, if k == 1 { &d1 } else { &d2 }, hx.powi(k as i32), false),
    };
    let dt = |f: &Grid2| stencil(f, &d1, ht, true);
    let (e_x, e_t, e_tt) = (dx(&mf.e, 1), dt(&mf.e), stencil(&mf.e, &d2, ht * ht, true));
    let (f_x, f_t) = (dx(&mf.f, 1), dt(&mf.f));
    let f_xt = dt(&f_x);
    let (g_x, g_t, g_xx) = (dx(&mf.g, 1), dt(&mf.g), dx(&mf.g, 2));

    let mut k = vec![f64::NAN; nt * nx];
    let mut mask = vec![true; nt * nx];
    for c in 0..nt * nx {
        let (e, f, g, w) = (mf.e.data[c], mf.f.data[c], mf.g.data[c], mf.w.data[c]);
        if !(w.abs() >= w_min) {
            continue;
        }
        let a = det3([
            [-0.5 * e_tt.data[c] + f_xt.data[c] - 0.5 * g_xx.data[c], 0.5 * e_x.data[c], f_x.data[c] - 0.5 * e_t.data[c]],
            [f_t.data[c] - 0.5 * g_x.data[c], e, f],
            [0.5 * g_t.data[c], f, g],
        ]);
        let b = det3([[0.0, 0.5 * e_t.data[c], 0.5 * g_x.data[c]], [0.5 * e_t.data[c], e, f], [0.5 * g_x.data[c], f, g]]);
        let det = e * g - f * f;
        let kc = (a - b) / (det * det);
        if kc.is_finite() {
            k[c] = kc;
            mask[c] = false;
        }
    }
    Ok(CurvatureField { ts: mf.ts.clone(), xs: mf.xs.clone(), k: Grid2::new(nt, nx, k), mask, w_min, order })
}

/// The sine-Gordon kink `4 arctan(exp(a x + t/a))`.
pub fn sg_kink(a: f64, x: f64, t: f64) -> f64 {
    4.0 * (a * x + t / a).exp().atan()
}

/// `E = a²`, `F = cos u`, `G = 1/a²`, `W = −sin u` on the kink.
pub fn sg_exact_metric(a: f64, xs: &[f64], ts: &[f64]) -> Result<MetricField, GeoError> {
    if a == 0.0 {
        return Err(GeoError::ZeroKinkParameter);
    }
    let (nt, nx) = (ts.len(), xs.len());
    let u = Grid2::from_fn(nt, nx, |i, j| sg_kink(a, xs[j], ts[i]));
    let map = |f: &dyn Fn(f64) -> f64| Grid2::new(nt, nx, u.data.iter().map(|v| f(*v)).collect());
    Ok(MetricField {
        lambda: a,
        ts: ts.to_vec(),
        xs: xs.to_vec(),
        e: map(&|_| a * a),
        f: map(&|v| v.cos()),
        g: map(&|_| 1.0 / (a * a)),
        w: map(&|v| -v.sin()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(lo: f64, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| lo + h * k as f64).collect()
    }

    fn metric(xs: &[f64], ts: &[f64], e: impl Fn(f64, f64) -> f64, f: impl Fn(f64, f64) -> f64, g: impl Fn(f64, f64) -> f64) -> MetricField {
        let (nt, nx) = (ts.len(), xs.len());
        let grid = |h: &dyn Fn(f64, f64) -> f64| Grid2::from_fn(nt, nx, |i, j| h(xs[j], ts[i]));
        let eg = grid(&e);
        let fg = grid(&f);
        let gg = grid(&g);
        let w = Grid2::new(nt, nx, (0..nt * nx).map(|k| (eg.data[k] * gg.data[k] - fg.data[k] * fg.data[k]).sqrt()).collect());
        MetricField { lambda: 1.0, ts: ts.to_vec(), xs: xs.to_vec(), e: eg, f: fg, g: gg, w }
    }

    #[test]
    fn weights_are_consistent() {
        for o in [2, 4, 6, 8] {
            let (r, d1, d2) = fd_weights(o).unwrap();
            assert_eq!(d1.len(), 2 * r + 1);
            let m1: f64 = d1.iter().enumerate().map(|(k, w)| w * (k as f64 - r as f64)).sum();
            let m2: f64 = d2.iter().enumerate().map(|(k, w)| w * (k as f64 - r as f64).powi(2)).sum();
            assert!((m1 - 1.0).abs() < 1e-13 && (m2 - 2.0).abs() < 1e-13);
            assert!(d2.iter().sum::<f64>().abs() < 1e-13);
        }
        assert!(matches!(fd_weights(3), Err(GeoError::StencilOrder(3))));
    }

    #[test]
    fn flat_and_spherical_examples() {
        let xs = axis(0.3, 0.01, 120);
        let ts = axis(-0.5, 0.01, 100);
        let flat = metric(&xs, &ts, |_, _| 1.0, |_, _| 0.0, |_, _| 1.0);
        let k = brioschi_curvature(&flat, 1e-6, 4).unwrap();
        assert!(k.unmasked_count() > 0 && k.max_abs_dev(0.0) < 1e-12);

        let sphere = metric(&xs, &ts, |_, _| 1.0, |_, _| 0.0, |x, _| x.sin().powi(2));
        let k = brioschi_curvature(&sphere, 1e-6, 4).unwrap();
        assert!(k.max_abs_dev(1.0) < 1e-6, "{}", k.max_abs_dev(1.0));

        let ts_bad = [0.0, 0.1, 0.3];
        let m = metric(&xs, &ts_bad, |_, _| 1.0, |_, _| 0.0, |_, _| 1.0);
        assert!(matches!(brioschi_curvature(&m, 0.0, 2), Err(GeoError::NonUniform)));
    }

    #[test]
    fn masking() {
        let xs = axis(-1.0, 0.05, 41);
        let ts = axis(0.0, 0.05, 21);
        let m = metric(&xs, &ts, |_, _| 1.0, |_, _| 0.0, |x, _| x * x);
        let k = brioschi_curvature(&m, 0.21, 2).unwrap();
        for i in 0..ts.len() {
            for j in 0..xs.len() {
                let masked = k.mask[i * xs.len() + j];
                let edge = i == 0 || j == 0 || i == ts.len() - 1 || j == xs.len() - 1;
                assert_eq!(masked, edge || xs[j].abs() < 0.21, "{i} {j}");
                assert_eq!(masked, k.k.at(i, j).is_nan());
            }
        }
        assert!(k.max_abs_dev(0.0) < 1e-10);
    }

    #[test]
    fn kink_metric() {
        assert!((sg_kink(1.0, 0.0, 0.0) - core::f64::consts::PI).abs() < 1e-15);
        assert!(matches!(sg_exact_metric(0.0, &[0.0], &[0.0]), Err(GeoError::ZeroKinkParameter)));
        let xs = axis(-3.0, 0.02, 301);
        let ts = axis(-1.0, 0.02, 101);
        for a in [1.0, 0.7] {
            let m = sg_exact_metric(a, &xs, &ts).unwrap();
            assert!(m.det_defect() < 1e-12);
            let k = brioschi_curvature(&m, 0.05, 6).unwrap();
            assert!(k.max_abs_dev(-1.0) < 1e-5, "{a}: {}", k.max_abs_dev(-1.0));
        }
    }
}
