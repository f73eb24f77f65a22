use alloc::vec::Vec;

use super::expr::{Expr, Func, Var};

/// Total derivative `D_v` on the jet space: `D_v f = ∂f/∂v + Σ_J u_{J,v} ∂f/∂u_J`.
pub fn total_derivative(e: &Expr, v: Var) -> Expr {
    match e {
        Expr::Const(_) | Expr::Param(_) => Expr::zero(),
        Expr::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Jet(j) => Expr::Jet(j.prolong(v)),
        Expr::Add(ts) => Expr::add_all(ts.iter().map(|t| total_derivative(t, v))),
        Expr::Mul(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (k, f) in fs.iter().enumerate() {
                let df = total_derivative(f, v);
                if df.is_zero_literal() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                factors.extend(fs.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, g)| g.clone()));
                factors.push(df);
                terms.push(Expr::mul_all(factors));
            }
            Expr::add_all(terms)
        }
        Expr::Pow(b, n) => {
            let db = total_derivative(b, v);
            if db.is_zero_literal() {
                return Expr::zero();
            }
            Expr::mul_all([Expr::int(i64::from(*n)), (**b).clone().pow(n - 1), db])
        }
        Expr::Func(f, a) => {
            let da = total_derivative(a, v);
            if da.is_zero_literal() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::cos((**a).clone()),
                Func::Cos => -Expr::sin((**a).clone()),
                Func::Exp => e.clone(),
            };
            outer * da
        }
    }
}

/// `D_x^nx D_t^nt e`.
pub fn total_derivative_n(e: &Expr, nx: u32, nt: u32) -> Expr {
    let mut out = e.clone();
    for _ in 0..nx {
        out = total_derivative(&out, Var::X);
    }
    for _ in 0..nt {
        out = total_derivative(&out, Var::T);
    }
    out
}
