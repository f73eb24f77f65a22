use core::fmt::{self, Write};

use super::expr::{Expr, JetCoord, Var};
use super::gauss::GaussRational;

// Binding contexts: 0 = sum or top level, 1 = product factor, 2 = power base.
const SUM: u8 = 0;
const FACTOR: u8 = 1;
const BASE: u8 = 2;

impl fmt::Display for JetCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('u')?;
        if self.order() == 0 {
            return Ok(());
        }
        f.write_char('_')?;
        for _ in 0..self.nx {
            f.write_char('x')?;
        }
        for _ in 0..self.nt {
            f.write_char('t')?;
        }
        Ok(())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::T => "t",
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, SUM, f)
    }
}

fn needs_parens(e: &Expr, ctx: u8) -> bool {
    match e {
        Expr::Const(c) => {
            if ctx == SUM {
                false
            } else if c.is_real() && c.re.is_integer() {
                // `-3` as a factor is fine only where a unary minus may start
                ctx == BASE && !c.is_natural()
            } else {
                *c != GaussRational::i()
            }
        }
        Expr::Var(_) | Expr::Jet(_) | Expr::Param(_) | Expr::Func(..) => false,
        Expr::Add(_) => ctx >= FACTOR,
        Expr::Mul(_) => ctx >= FACTOR,
        Expr::Pow(..) => ctx >= BASE,
    }
}

fn write_expr(e: &Expr, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if needs_parens(e, ctx) {
        f.write_char('(')?;
        write_expr(e, SUM, f)?;
        return f.write_char(')');
    }
    match e {
        Expr::Const(c) => {
            if ctx == FACTOR && c.is_negative_real() {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Jet(j) => write!(f, "{j}"),
        Expr::Param(p) => f.write_str(p.name()),
        Expr::Func(g, a) => {
            write!(f, "{}(", g.name())?;
            write_expr(a, SUM, f)?;
            f.write_char(')')
        }
        Expr::Pow(b, n) => {
            write_expr(b, BASE, f)?;
            if *n < 0 {
                write!(f, "^({n})")
            } else {
                write!(f, "^{n}")
            }
        }
        Expr::Add(ts) => {
            for (k, t) in ts.iter().enumerate() {
                if k == 0 {
                    write_expr(t, SUM, f)?;
                } else if let Some(neg) = negated_term(t) {
                    f.write_str(" - ")?;
                    write_expr(&neg, FACTOR.min(term_ctx(&neg)), f)?;
                } else {
                    f.write_str(" + ")?;
                    write_expr(t, SUM, f)?;
                }
            }
            Ok(())
        }
        Expr::Mul(fs) => write_product(fs, f),
    }
}

fn term_ctx(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => FACTOR,
        _ => SUM,
    }
}

/// For a term with a negative real leading coefficient, the term with that
/// coefficient's sign flipped.
fn negated_term(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Const(c) if c.is_negative_real() => Some(Expr::Const(-c)),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative_real() => {
                let mut rest = fs.clone();
                rest[0] = Expr::Const(-c);
                Some(Expr::mul_all(rest))
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_product(fs: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut start = 0;
    if let Some(Expr::Const(c)) = fs.first() {
        if c.is_negative_real() {
            f.write_char('-')?;
            let flipped = -c;
            if !flipped.is_one() {
                write_expr(&Expr::Const(flipped), FACTOR, f)?;
                f.write_char('*')?;
            }
            start = 1;
        }
    }
    for (k, x) in fs.iter().enumerate().skip(start) {
        match x {
            Expr::Pow(b, n) if *n < 0 && k > start => {
                f.write_char('/')?;
                write_expr(b, BASE, f)?;
                if *n != -1 {
                    write!(f, "^{}", -n)?;
                }
            }
            _ => {
                if k > start {
                    f.write_char('*')?;
                }
                write_expr(x, FACTOR, f)?;
            }
        }
    }
    Ok(())
}
