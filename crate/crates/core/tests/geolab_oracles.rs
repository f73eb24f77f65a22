use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pss_core::chsim::{integrate, GridSpec, InitialDatum, SolverConfig, Spectral, Trajectory};
use pss_core::geolab::*;
use pss_core::pss::{catalog_entry, first_fundamental};
use pss_core::symcore::{eval_numeric, Assignment, Expr, JetCoord, Param, Symbol};

fn gaussian_run() -> Trajectory {
    let g = GridSpec::new(20.0, 256).unwrap();
    let u0 = InitialDatum::Gaussian { center: 0.0, width: 1.0, amplitude: 1.0 }.sample(g);
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.5, save_every: 5, ..Default::default() };
    integrate(&u0, &cfg, g).unwrap()
}

fn point(lambda: f64, u: f64, u_x: f64, u_xx: f64) -> Assignment {
    let mut a = Assignment::new();
    let r = |v: f64| Complex64::new(v, 0.0);
    a.insert(Symbol::Param(Param::new("lambda")), r(lambda));
    a.insert(Symbol::Jet(JetCoord { nx: 0, nt: 0 }), r(u));
    a.insert(Symbol::Jet(JetCoord { nx: 1, nt: 0 }), r(u_x));
    a.insert(Symbol::Jet(JetCoord { nx: 2, nt: 0 }), r(u_xx));
    a
}

fn re(e: &Expr, a: &Assignment) -> f64 {
    let v = eval_numeric(e, a).unwrap();
    assert!(v.im.abs() < 1e-12);
    v.re
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn fields_agree_with_the_symbolic_triad() {
    let tr = gaussian_run();
    let triad = catalog_entry("ch").unwrap().triad().unwrap();
    let (e_sym, f_sym, g_sym) = first_fundamental(&triad);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for lambda in [0.5, 2.0, 3.0] {
        let f = omega_fields(&tr, lambda).unwrap();
        let mf = metric_field(&f);
        for _ in 0..100 {
            let i = rng.next_u32() as usize % tr.states.len();
            let j = rng.next_u32() as usize % tr.grid.n;
            let s = &tr.states[i];
            let a = point(lambda, s.u[j], s.u_x[j], s.u[j] - s.m[j]);
            assert!(close(f.f11.at(i, j), re(&triad.w1.fx, &a)));
            assert!(close(f.f12.at(i, j), re(&triad.w1.ft, &a)));
            assert!(close(0.0, re(&triad.w2.fx, &a)));
            assert!(close(f.f22.at(i, j), re(&triad.w2.ft, &a)));
            assert!(close(mf.e.at(i, j), re(&e_sym, &a)));
            assert!(close(mf.f.at(i, j), re(&f_sym, &a)));
            assert!(close(mf.g.at(i, j), re(&g_sym, &a)));
        }
    }
}

#[test]
fn kink_solves_sine_gordon() {
    for a in [1.0, 0.6, -1.5] {
        for k in 0..400 {
            let x = -4.0 + 0.02 * k as f64;
            let t = 1.3 - 0.007 * k as f64;
            let xi = a * x + t / a;
            let u_xt = -2.0 * xi.tanh() / xi.cosh();
            assert!((sg_kink(a, x, t).sin() - u_xt).abs() < 1e-12);
            let h = 1e-3;
            let fd = (sg_kink(a, x + h, t + h) - sg_kink(a, x + h, t - h) - sg_kink(a, x - h, t + h)
                + sg_kink(a, x - h, t - h))
                / (4.0 * h * h);
            assert!((fd - u_xt).abs() < 1e-5, "{a} {x} {t}");
        }
    }
    let m = sg_exact_metric(1.0, &[0.0, 3.0], &[0.0, -30.0]).unwrap();
    assert!(m.w.at(0, 0).abs() < 1e-15);
    assert!((m.f.at(1, 0) - 1.0).abs() < 1e-12);
}

#[test]
fn kink_curvature_is_minus_one() {
    let ax: Vec<f64> = (0..=400).map(|k| -2.0 + 0.01 * k as f64).collect();
    let m = sg_exact_metric(1.0, &ax, &ax).unwrap();
    let k = brioschi_curvature(&m, 1e-3 * m.w.max_abs(), 4).unwrap();
    assert!(k.unmasked_count() > 100_000);
    assert!(k.max_abs_dev(-1.0) < 1e-3);
}

#[test]
fn resolved_ch_curvature_is_minus_one() {
    let g = GridSpec::new(20.0, 1024).unwrap();
    let u0 = InitialDatum::Gaussian { center: 0.0, width: 1.0, amplitude: 1.0 }.sample(g);
    let cfg = SolverConfig { dt: 1e-3, t_end: 0.3, save_every: 10, ..Default::default() };
    let tr = integrate(&u0, &cfg, g).unwrap();
    let mf = metric_field(&omega_fields(&tr, 2.0).unwrap());
    let k = brioschi_curvature_periodic(&mf, 1e-3 * mf.w.max_abs(), 4, &Spectral::new(g)).unwrap();
    assert!(k.median_abs_dev(-1.0) < 1e-3, "{}", k.median_abs_dev(-1.0));
}

#[test]
fn discs_persist_toward_breaking() {
    let g = GridSpec::new(20.0, 1024).unwrap();
    let u0 = InitialDatum::AntisymTanh { steepness: 3.0 }.sample(g);
    let cfg = SolverConfig { dt: 1e-3, t_end: 2.0, save_every: 20, breaking_threshold: -15.0, ..Default::default() };
    let tr = integrate(&u0, &cfg, g).unwrap();
    assert!(matches!(generic_discs(&tr, 2.0, None), Err(GeoError::NoDiscs(_))));
    let d = generic_discs(&tr, 2.0, Some(1e-3)).unwrap();
    assert!(d.disjoint && d.b1.min_abs_w > 0.0 && d.b2.min_abs_w > 0.0);
    assert!(ux_zero_slices(&tr, 2.0).unwrap().every_slice_has_zero());
}

fn trig_poly() -> impl Strategy<Value = Vec<(u32, f64, f64)>> {
    prop::collection::vec((1u32..10, -1.0..1.0f64, -1.0..1.0f64), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn brackets_straddle_sign_changes(terms in trig_poly(), c0 in -0.5..0.5f64) {
        let g = GridSpec::new(3.0, 64).unwrap();
        let sp = Spectral::new(g);
        let f = |x: f64| c0 + terms.iter().map(|(k, a, b)| {
            let w = std::f64::consts::PI * *k as f64 * x / 3.0;
            a * w.cos() + b * w.sin()
        }).sum::<f64>();
        let vals: Vec<f64> = g.xs().iter().map(|&x| f(x)).collect();
        let bs = sign_change_brackets(&vals, &sp, 0.0).unwrap();
        for b in &bs {
            prop_assert!(b.width() < BRACKET_WIDTH && b.width() > 0.0);
            prop_assert!(f(b.lo) * f(b.hi) <= 0.0, "{:?}", b);
        }
        let changes = (0..64).filter(|&j| vals[j].signum() != vals[(j + 1) % 64].signum()).count();
        prop_assert!(bs.len() <= changes);
        prop_assert_eq!(bs.len() % 2, 0);
    }

    #[test]
    fn metric_determinant_is_wedge_squared(lambda in 0.2..4.0f64, neg in any::<bool>(), u in -3.0..3.0f64, m in -5.0..5.0f64, ux in -10.0..10.0f64) {
        let lambda = if neg { -lambda } else { lambda };
        let (f11, f12, f22) = omega_point(lambda, u, m, ux);
        let (e, f, g) = (f11 * f11, f11 * f12, f12 * f12 + f22 * f22);
        let w = f11 * f22;
        let scale = (e * g).max(f * f).max(1e-300);
        prop_assert!((e * g - f * f - w * w).abs() <= 1e-10 * scale);
        if w.abs() > 1e-6 {
            prop_assert!(e > 0.0 && e * g - f * f > 0.0);
        }
    }
}
