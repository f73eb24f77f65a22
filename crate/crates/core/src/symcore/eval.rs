use alloc::collections::BTreeMap;
use alloc::string::ToString;

use num_complex::Complex64;

use super::expr::{Expr, Func, Symbol};
use super::SymError;

/// Values for the leaves of an expression.
pub type Assignment = BTreeMap<Symbol, Complex64>;

/// Divisors smaller than this in magnitude count as poles.
pub const POLE_EPS: f64 = 1e-14;

pub fn eval_numeric(e: &Expr, at: &Assignment) -> Result<Complex64, SymError> {
    eval_tracked(e, at, &mut 0.0)
}

/// Evaluates `e` and records in `scale` the largest magnitude of any
/// subexpression, which bounds the rounding error of the result.
pub fn eval_with_scale(e: &Expr, at: &Assignment) -> Result<(Complex64, f64), SymError> {
    let mut scale = 0.0;
    let v = eval_tracked(e, at, &mut scale)?;
    Ok((v, scale))
}

fn eval_tracked(e: &Expr, at: &Assignment, scale: &mut f64) -> Result<Complex64, SymError> {
    let v = eval_node(e, at, scale)?;
    *scale = scale.max(v.norm());
    Ok(v)
}

fn eval_node(e: &Expr, at: &Assignment, scale: &mut f64) -> Result<Complex64, SymError> {
    Ok(match e {
        Expr::Const(c) => c.to_complex(),
        Expr::Var(v) => lookup(at, Symbol::Var(*v))?,
        Expr::Jet(j) => lookup(at, Symbol::Jet(*j))?,
        Expr::Param(p) => lookup(at, Symbol::Param(p.clone()))?,
        Expr::Add(ts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in ts {
                acc += eval_tracked(t, at, scale)?;
            }
            acc
        }
        Expr::Mul(fs) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for f in fs {
                acc *= eval_tracked(f, at, scale)?;
            }
            acc
        }
        Expr::Pow(b, n) => {
            let v = eval_tracked(b, at, scale)?;
            if *n < 0 && v.norm() < POLE_EPS {
                return Err(SymError::Pole);
            }
            v.powi(*n)
        }
        Expr::Func(f, a) => {
            let v = eval_tracked(a, at, scale)?;
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
            }
        }
    })
}

fn lookup(at: &Assignment, s: Symbol) -> Result<Complex64, SymError> {
    at.get(&s).copied().ok_or_else(|| SymError::MissingAtom(symbol_name(&s)))
}

pub fn symbol_name(s: &Symbol) -> alloc::string::String {
    match s {
        Symbol::Var(v) => v.to_string(),
        Symbol::Jet(j) => j.to_string(),
        Symbol::Param(p) => p.name().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse, Param};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn examples() {
        let mut at = Assignment::new();
        at.insert(Symbol::Jet(crate::symcore::JetCoord::U), c(0.0));
        assert_eq!(eval_numeric(&parse("sin(u)").unwrap(), &at).unwrap(), c(0.0));

        let mut at = Assignment::new();
        at.insert(Symbol::Param(Param::new("lambda")), c(1.0));
        let v = eval_numeric(&parse("lambda/2 + 1/(2*lambda)").unwrap(), &at).unwrap();
        assert!((v - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        let at = Assignment::new();
        assert_eq!(
            eval_numeric(&parse("u_x").unwrap(), &at),
            Err(SymError::MissingAtom("u_x".into()))
        );
        let mut at = Assignment::new();
        at.insert(Symbol::Jet(crate::symcore::JetCoord::U), c(1e-15));
        assert_eq!(eval_numeric(&parse("1/u").unwrap(), &at), Err(SymError::Pole));
    }
}
