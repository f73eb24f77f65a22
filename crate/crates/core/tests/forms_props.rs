use proptest::prelude::*;
use pss_core::forms::{
    curvature_matrix, ext_d, sasaki_triad, triad_to_matrix, wedge, MatrixOneForm, OneForm, Triad,
};
use pss_core::pss::{
    catalog_entry, first_fundamental, generic_wedge, structure_residuals, verify_pss, VerifyMode,
};
use pss_core::symcore::{is_zero, Expr, Param};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::u()),
        Just(Expr::jet(1, 0)),
        Just(Expr::jet(0, 1)),
        Just(Expr::jet(2, 0)),
        Just(Expr::param("eta")),
        Just(Expr::x()),
        Just(Expr::sin(Expr::u())),
        Just(Expr::cos(Expr::u())),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=3, 2i64..=4).prop_map(|(p, q)| Expr::ratio(p, q)),
    ]
}

/// Polynomials in the leaves, optionally divided by a parameter power.
fn coeff() -> impl Strategy<Value = Expr> {
    let mono = prop::collection::vec(leaf(), 1..3).prop_map(Expr::mul_all);
    (prop::collection::vec(mono, 1..3), 0i32..=1)
        .prop_map(|(ts, k)| Expr::add_all(ts) * Expr::param("eta").pow(-k))
}

fn one_form() -> impl Strategy<Value = OneForm> {
    (coeff(), coeff()).prop_map(|(a, b)| OneForm::new(a, b))
}

fn triad() -> impl Strategy<Value = Triad> {
    (one_form(), one_form(), one_form()).prop_map(|(a, b, c)| Triad::new(a, b, c))
}

/// Flat triads: `ω₁ = ω₂ = 0` with exact `ω₃`, or a random triad.
fn mixed_triad() -> impl Strategy<Value = Triad> {
    prop_oneof![
        triad(),
        coeff().prop_map(|f| Triad::new(OneForm::default(), OneForm::default(), OneForm::exact(&f))),
    ]
}

fn z(e: &Expr) -> bool {
    is_zero(e).unwrap()
}

fn eq(a: &Expr, b: &Expr) -> bool {
    z(&(a - b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_of_exact_form_is_zero(f in coeff()) {
        prop_assert!(z(&ext_d(&OneForm::exact(&f)).c));
    }

    #[test]
    fn wedge_is_antisymmetric_and_bilinear(a in one_form(), b in one_form(), c in one_form(), k in coeff()) {
        prop_assert!(eq(&wedge(&a, &b).c, &-wedge(&b, &a).c));
        prop_assert!(z(&wedge(&a, &a).c));
        let lhs = wedge(&(a.clone() + k.clone() * c.clone()), &b).c;
        let rhs = wedge(&a, &b).c + &k * wedge(&c, &b).c;
        prop_assert!(eq(&lhs, &rhs));
    }

    #[test]
    fn curvature_entries_are_structure_residuals(tr in mixed_triad()) {
        let s = curvature_matrix(&triad_to_matrix(&tr));
        let [r1, r2, r3] = structure_residuals(&tr).map(|r| r.c);
        let h = Expr::ratio(1, 2);
        prop_assert!(eq(&s[0][0].c, &(&h * &r2)));
        prop_assert!(eq(&s[0][1].c, &(&h * (&r1 - &r3))));
        prop_assert!(eq(&s[1][0].c, &(&h * (&r1 + &r3))));
        prop_assert!(eq(&s[1][1].c, &-(&h * &r2)));
        let flat = s.iter().flatten().all(|w| z(&w.c));
        prop_assert_eq!(flat, [r1, r2, r3].iter().all(z));
    }

    #[test]
    fn sasaki_round_trip(a in one_form(), b in one_form(), c in one_form()) {
        let om = MatrixOneForm::from_entries([[a.clone(), b], [c, -a]]);
        let back = triad_to_matrix(&sasaki_triad(&om).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(eq(&back.x[i][j], &om.x[i][j]) && eq(&back.t[i][j], &om.t[i][j]));
            }
        }
    }

    #[test]
    fn metric_determinant_is_wedge_squared(tr in triad()) {
        let (e, f, g) = first_fundamental(&tr);
        let w = generic_wedge(&tr);
        prop_assert!(eq(&(&e * &g - &f * &f), &(&w * &w)));
    }

    #[test]
    fn residuals_are_not_linear_in_the_triad(tr in triad()) {
        let doubled = Triad::new(tr.w1.clone(), tr.w2.clone(), Expr::int(2) * tr.w3.clone());
        let r = structure_residuals(&tr);
        let r2 = structure_residuals(&doubled);
        let w12 = generic_wedge(&tr);
        prop_assert!(eq(&(&r2[2].c - Expr::int(2) * &r[2].c), &w12));
        if !z(&w12) {
            prop_assert!(!eq(&r2[2].c, &(Expr::int(2) * &r[2].c)));
        }
    }

    #[test]
    fn status_survives_renaming_and_rescaling(p in 1i64..=5, q in 1i64..=5, neg in any::<bool>(), which in 0usize..3) {
        let name = ["sg", "ch", "sg-akns"][which];
        let entry = catalog_entry(name).unwrap();
        let tr = entry.triad().unwrap();
        let base = verify_pss(&tr, &entry.pde, VerifyMode::Auto, 11).unwrap();
        let k = Expr::ratio(if neg { -p } else { p }, q);
        let scaled = verify_pss(&tr, &entry.pde.scaled(k.clone()), VerifyMode::Auto, 11).unwrap();
        prop_assert_eq!(base.status, scaled.status);
        for (m0, m1) in base.multipliers.iter().zip(&scaled.multipliers) {
            let (m0, m1) = (m0.clone().unwrap(), m1.clone().unwrap());
            prop_assert!(eq(&(&m1 * &k), &m0));
        }
        let from = ["eta", "lambda", "zeta"][which];
        let renamed = tr.map(|e| e.subs_param(&Param::new(from), &Expr::param("a")));
        let r = verify_pss(&renamed, &entry.pde, VerifyMode::Auto, 11).unwrap();
        prop_assert_eq!(base.status, r.status);
    }
}
