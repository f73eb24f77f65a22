use num_complex::Complex64;
use proptest::prelude::*;
use pss_core::symcore::{
    eval_numeric, is_zero, normalize, parse, total_derivative, try_normalize, Assignment, Expr, JetCoord,
    Param, Symbol, Var,
};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::x()),
        Just(Expr::t()),
        Just(Expr::u()),
        Just(Expr::jet(1, 0)),
        Just(Expr::jet(0, 1)),
        Just(Expr::jet(2, 0)),
        Just(Expr::jet(1, 1)),
        Just(Expr::param("eta")),
        Just(Expr::param("lambda")),
        Just(Expr::i()),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(p, q)| Expr::ratio(p, q)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add_all),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::mul_all),
            (inner.clone(), -2i32..=3).prop_filter_map("no zero inverse", |(b, n)| b.checked_pow(n)),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            (inner.clone(), inner).prop_map(|(a, b)| a - b),
        ]
    })
}

/// Smaller trees for the finite-difference check, with bounded transcendental arguments.
fn small_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add_all),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul_all),
            (inner.clone(), 1i32..=3).prop_map(|(b, n)| b.pow(n)),
            inner.clone().prop_map(Expr::sin),
            inner.prop_map(Expr::exp),
        ]
    })
}

fn normalizable(e: &Expr) -> bool {
    try_normalize(e).is_ok()
}

/// u(x, t) = 1 + x/3 − t/5 + x²/2 − 2xt/5 + t²/10 + x³/5 + x²t/10 − xt²/7.
fn section_jet(nx: u32, nt: u32, x: f64, t: f64) -> f64 {
    let terms: [(f64, u32, u32); 9] = [
        (1.0, 0, 0),
        (1.0 / 3.0, 1, 0),
        (-0.2, 0, 1),
        (0.5, 2, 0),
        (-0.4, 1, 1),
        (0.1, 0, 2),
        (0.2, 3, 0),
        (0.1, 2, 1),
        (-1.0 / 7.0, 1, 2),
    ];
    let falling = |n: u32, k: u32| -> f64 { (0..k).map(|j| (n - j) as f64).product() };
    terms
        .iter()
        .filter(|(_, px, pt)| *px >= nx && *pt >= nt)
        .map(|(c, px, pt)| {
            c * falling(*px, nx) * falling(*pt, nt) * x.powi((px - nx) as i32) * t.powi((pt - nt) as i32)
        })
        .sum()
}

fn section_assignment(x: f64, t: f64) -> Assignment {
    let mut at = Assignment::new();
    at.insert(Symbol::Var(Var::X), Complex64::new(x, 0.0));
    at.insert(Symbol::Var(Var::T), Complex64::new(t, 0.0));
    at.insert(Symbol::Param(Param::new("eta")), Complex64::new(0.7, 0.0));
    at.insert(Symbol::Param(Param::new("lambda")), Complex64::new(1.3, 0.0));
    for nx in 0..5 {
        for nt in 0..5 {
            at.insert(Symbol::Jet(JetCoord::new(nx, nt)), Complex64::new(section_jet(nx, nt, x, t), 0.0));
        }
    }
    at
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn print_parse_roundtrip(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", printed);
        prop_assert_eq!(parse(&back.to_string()).unwrap(), back);
    }

    #[test]
    fn normalize_is_idempotent(e in expr()) {
        prop_assume!(normalizable(&e));
        let once = normalize(&e);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn difference_with_self_is_zero(e in expr()) {
        prop_assume!(normalizable(&e));
        prop_assert!(is_zero(&(&e - &e)).unwrap());
    }

    #[test]
    fn total_derivatives_commute(e in expr()) {
        prop_assume!(normalizable(&e));
        let a = total_derivative(&total_derivative(&e, Var::X), Var::T);
        let b = total_derivative(&total_derivative(&e, Var::T), Var::X);
        prop_assume!(normalizable(&a) && normalizable(&b));
        prop_assert!(is_zero(&(a - b)).unwrap());
    }

    #[test]
    fn total_x_derivative_matches_finite_differences(e in small_expr(), x0 in -0.8f64..0.8, t0 in -0.8f64..0.8) {
        let g = |x: f64| eval_numeric(&e, &section_assignment(x, t0));
        let h = 1e-3;
        let vals: Vec<_> = [-2.0, -1.0, 1.0, 2.0].iter().map(|k| g(x0 + k * h)).collect();
        prop_assume!(vals.iter().all(|v| v.is_ok()));
        let v: Vec<Complex64> = vals.into_iter().map(|v| v.unwrap()).collect();
        let fd = (v[0] - v[1] * 8.0 + v[2] * 8.0 - v[3]) / (12.0 * h);
        let exact = eval_numeric(&total_derivative(&e, Var::X), &section_assignment(x0, t0));
        prop_assume!(exact.is_ok());
        let exact = exact.unwrap();
        prop_assume!(exact.norm() < 1e4 && v.iter().all(|z| z.norm() < 1e4));
        prop_assert!((exact - fd).norm() <= 1e-6 * exact.norm().max(1.0), "{} vs {} for {}", exact, fd, e);
    }
}
