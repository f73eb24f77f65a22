use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use super::gauss::GaussRational;

/// A jet coordinate `u_{x^nx t^nt}`. Mixed partials commute, so the pair of
/// counts is the whole identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoord {
    pub nx: u32,
    pub nt: u32,
}

impl JetCoord {
    pub const U: JetCoord = JetCoord { nx: 0, nt: 0 };

    pub const fn new(nx: u32, nt: u32) -> Self {
        JetCoord { nx, nt }
    }

    pub fn order(&self) -> u32 {
        self.nx + self.nt
    }

    pub fn prolong(&self, v: Var) -> JetCoord {
        match v {
            Var::X => JetCoord::new(self.nx + 1, self.nt),
            Var::T => JetCoord::new(self.nx, self.nt + 1),
        }
    }

    /// Whether `self` is `other` or one of its derivatives.
    pub fn is_derivative_of(&self, other: &JetCoord) -> bool {
        self.nx >= other.nx && self.nt >= other.nt
    }
}

/// Independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    T,
}

/// A free (complex) parameter, constant under both total derivatives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(pub String);

impl Param {
    pub fn new(name: &str) -> Self {
        Param(String::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

/// A leaf that an assignment must give a value to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Var(Var),
    Jet(JetCoord),
    Param(Param),
}

/// Symbolic expression over the jet space.
///
/// Values built through the constructors below are kept in a light canonical
/// shape (flattened sums and products, folded constants); that shape is what
/// the printer and parser round-trip. Full canonicalization is [`normalize`].
///
/// [`normalize`]: super::normalize
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(GaussRational),
    Var(Var),
    Jet(JetCoord),
    Param(Param),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(GaussRational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(GaussRational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(GaussRational::from_int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Const(GaussRational::from_ratio(p, q))
    }

    pub fn i() -> Expr {
        Expr::Const(GaussRational::i())
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn u() -> Expr {
        Expr::Jet(JetCoord::U)
    }

    pub fn jet(nx: u32, nt: u32) -> Expr {
        Expr::Jet(JetCoord::new(nx, nt))
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(Param::new(name))
    }

    pub fn as_const(&self) -> Option<&GaussRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// Sum with flattening and constant folding. The folded constant, when
    /// nonzero, leads.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut acc = GaussRational::zero();
        let mut out = Vec::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t {
                Expr::Const(c) => acc = &acc + &c,
                Expr::Add(inner) => stack.extend(inner.into_iter().rev()),
                other => out.push(other),
            }
        }
        if !acc.is_zero() {
            out.insert(0, Expr::Const(acc));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    /// Product with flattening and constant folding. The folded constant,
    /// when not one, leads.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut acc = GaussRational::one();
        let mut out = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Const(c) => acc = &acc * &c,
                Expr::Mul(inner) => stack.extend(inner.into_iter().rev()),
                other => out.push(other),
            }
        }
        if acc.is_zero() {
            return Expr::zero();
        }
        if !acc.is_one() {
            out.insert(0, Expr::Const(acc));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::Mul(out),
        }
    }

    /// Integer power. Returns `None` when a literal zero would be inverted.
    pub fn checked_pow(self, n: i32) -> Option<Expr> {
        if n == 0 {
            return Some(Expr::one());
        }
        if n == 1 {
            return Some(self);
        }
        match self {
            Expr::Const(c) => c.powi(n).map(Expr::Const),
            Expr::Pow(b, k) if k * n == 1 => Some(*b),
            Expr::Pow(b, k) => Some(Expr::Pow(b, k * n)),
            other => Some(Expr::Pow(Box::new(other), n)),
        }
    }

    /// Integer power.
    ///
    /// # Panics
    ///
    /// If `self` is the literal zero and `n < 0`.
    pub fn pow(self, n: i32) -> Expr {
        self.checked_pow(n)
            .expect("negative power of the literal zero")
    }

    /// `self / rhs`, or `None` when `rhs` is the literal zero.
    pub fn checked_div(self, rhs: Expr) -> Option<Expr> {
        Some(Expr::mul_all([self, rhs.checked_pow(-1)?]))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if arg.is_zero_literal() {
            return match f {
                Func::Sin => Expr::zero(),
                Func::Cos | Func::Exp => Expr::one(),
            };
        }
        Expr::Func(f, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    /// Structural rebuild bottom-up through the constructors, with `leaf`
    /// applied to every leaf.
    pub fn map_leaves<F: FnMut(&Expr) -> Expr + Copy>(&self, leaf: F) -> Expr {
        let mut f = leaf;
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Jet(_) | Expr::Param(_) => f(self),
            Expr::Add(ts) => Expr::add_all(ts.iter().map(|t| t.map_leaves(leaf))),
            Expr::Mul(fs) => Expr::mul_all(fs.iter().map(|t| t.map_leaves(leaf))),
            Expr::Pow(b, n) => b.map_leaves(leaf).pow(*n),
            Expr::Func(g, a) => Expr::func(*g, a.map_leaves(leaf)),
        }
    }

    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Pow(b, _) => b.visit(f),
            Expr::Func(_, a) => a.visit(f),
            _ => {}
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Var(v) => {
                out.insert(Symbol::Var(*v));
            }
            Expr::Jet(j) => {
                out.insert(Symbol::Jet(*j));
            }
            Expr::Param(p) => {
                out.insert(Symbol::Param(p.clone()));
            }
            _ => {}
        });
        out
    }

    pub fn jets(&self) -> BTreeSet<JetCoord> {
        self.symbols()
            .into_iter()
            .filter_map(|s| match s {
                Symbol::Jet(j) => Some(j),
                _ => None,
            })
            .collect()
    }

    pub fn params(&self) -> BTreeSet<Param> {
        self.symbols()
            .into_iter()
            .filter_map(|s| match s {
                Symbol::Param(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    /// True when the expression involves neither x, t nor any jet.
    pub fn is_jet_free(&self) -> bool {
        self.symbols().iter().all(|s| matches!(s, Symbol::Param(_)))
    }

    /// Replace a parameter by an expression.
    pub fn subs_param(&self, p: &Param, with: &Expr) -> Expr {
        self.map_leaves(|e| match e {
            Expr::Param(q) if q == p => with.clone(),
            other => other.clone(),
        })
    }

    pub fn scale(&self, c: GaussRational) -> Expr {
        Expr::mul_all([Expr::Const(c), self.clone()])
    }
}

impl Default for Expr {
    fn default() -> Expr {
        Expr::zero()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<JetCoord> for Expr {
    fn from(j: JetCoord) -> Expr {
        Expr::Jet(j)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a, b]));
binop!(Sub, sub, |a, b| Expr::add_all([a, -b]));
binop!(Mul, mul, |a, b| Expr::mul_all([a, b]));
binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by the literal zero"));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_constants() {
        let e = Expr::int(2) * Expr::u() * Expr::ratio(1, 2);
        assert_eq!(e, Expr::u());
        assert_eq!(Expr::u() - Expr::u() + Expr::int(0), Expr::add_all([Expr::u(), -Expr::u()]));
        assert_eq!(Expr::i() * Expr::i(), Expr::int(-1));
        assert_eq!(Expr::u().pow(2).pow(-1), Expr::Pow(Box::new(Expr::u()), -2));
    }

    #[test]
    fn zero_is_never_inverted() {
        assert!(Expr::u().checked_div(Expr::zero()).is_none());
        assert!(Expr::zero().checked_pow(-2).is_none());
    }

    #[test]
    fn mixed_partials_commute() {
        let a = JetCoord::U.prolong(Var::X).prolong(Var::T);
        let b = JetCoord::U.prolong(Var::T).prolong(Var::X);
        assert_eq!(a, b);
        assert!(JetCoord::new(2, 1).is_derivative_of(&JetCoord::new(1, 1)));
        assert!(!JetCoord::new(2, 0).is_derivative_of(&JetCoord::new(1, 1)));
    }
}
