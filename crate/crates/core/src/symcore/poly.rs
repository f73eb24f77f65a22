//! Canonical rational form.
//!
//! An expression is brought to `num / den` with `num`, `den` multivariate
//! polynomials over Gaussian rationals in the atoms `x, t`, jet coordinates,
//! parameters and function applications (whose arguments are themselves in
//! normal form). `cos(u)` is kept to degree at most one through
//! `cos²u = 1 − sin²u`. Common factors are cancelled when one side divides the
//! other or when they are monomials; the leading coefficient of `den` is one.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::expr::{Expr, Func, JetCoord, Param, Var};
use super::gauss::GaussRational;
use super::SymError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(Var),
    Jet(JetCoord),
    Param(Param),
    Func(Func, Box<Expr>),
}

impl Atom {
    pub fn sin_u() -> Atom {
        Atom::Func(Func::Sin, Box::new(Expr::u()))
    }

    pub fn cos_u() -> Atom {
        Atom::Func(Func::Cos, Box::new(Expr::u()))
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Atom::Var(v) => Expr::Var(*v),
            Atom::Jet(j) => Expr::Jet(*j),
            Atom::Param(p) => Expr::Param(p.clone()),
            Atom::Func(f, a) => Expr::func(*f, (**a).clone()),
        }
    }

    /// Function applications other than `sin(u)` and `cos(u)`, whose
    /// identities the normal form does not know.
    pub fn is_opaque(&self) -> bool {
        matches!(self, Atom::Func(..)) && *self != Atom::sin_u() && *self != Atom::cos_u()
    }

    /// Parameters only; constant under the total derivatives and nonzero
    /// by convention.
    pub fn is_param(&self) -> bool {
        matches!(self, Atom::Param(_))
    }
}

/// Power product of atoms, ordered lexicographically with the largest atom
/// most significant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(pub BTreeMap<Atom, u32>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter().rev().peekable();
        let mut b = other.0.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb) {
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        o => return o,
                    },
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn atom(a: Atom, e: u32) -> Self {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(a, e);
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            *out.entry(a.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            let have = out.get_mut(a)?;
            if *have < *e {
                return None;
            }
            *have -= e;
            if *have == 0 {
                out.remove(a);
            }
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = BTreeMap::new();
        for (a, e) in &self.0 {
            if let Some(f) = other.0.get(a) {
                out.insert(a.clone(), (*e).min(*f));
            }
        }
        Monomial(out)
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0.get(a).copied().unwrap_or(0)
    }

    pub fn to_expr(&self) -> Expr {
        Expr::mul_all(self.0.iter().map(|(a, e)| a.to_expr().pow(*e as i32)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(pub BTreeMap<Monomial, GaussRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(GaussRational::one())
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::atom(a, 1), GaussRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.0.len() {
            0 => Some(GaussRational::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.0.len() == 1
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&m) {
            Some(have) => {
                let s = &*have + &c;
                if s.is_zero() {
                    self.0.remove(&m);
                } else {
                    *have = s;
                }
            }
            None => {
                self.0.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &GaussRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul_term(&self, m: &Monomial, k: &GaussRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(n, c)| (n.mul(m), c * k)).collect())
    }

    /// Plain polynomial product (no trigonometric reduction).
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            for (n, d) in &other.0 {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_raw(other).trig_reduce()
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussRational)> {
        self.0.iter().next_back()
    }

    /// Rewrites every `cos(u)^k`, `k ≥ 2`, through `cos²u = 1 − sin²u`.
    pub fn trig_reduce(self) -> Poly {
        let cos = Atom::cos_u();
        if !self.0.keys().any(|m| m.exponent(&cos) >= 2) {
            return self;
        }
        let one_minus_s2 = {
            let mut p = Poly::one();
            p.add_term(Monomial::atom(Atom::sin_u(), 2), GaussRational::from_int(-1));
            p
        };
        let mut out = Poly::zero();
        for (m, c) in self.0 {
            let e = m.exponent(&cos);
            if e < 2 {
                out.add_term(m, c);
                continue;
            }
            let mut rest = m.0.clone();
            rest.remove(&cos);
            if e % 2 == 1 {
                rest.insert(cos.clone(), 1);
            }
            let expanded = one_minus_s2.pow_raw(e / 2).mul_term(&Monomial(rest), &c);
            out = out.add(&expanded);
        }
        out
    }

    fn pow_raw(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul_raw(self);
        }
        acc
    }

    /// Exact quotient `self / d` in the plain polynomial ring, if any.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (ld_m, ld_c) = d.leading()?;
        let ld_inv = ld_c.inv()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero();
        while let Some((lm, lc)) = rem.leading() {
            let qm = lm.div(ld_m)?;
            let qc = lc * &ld_inv;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.0.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly(self.0.iter().map(|(n, c)| (n.div(m).expect("monomial divides"), c.clone())).collect())
    }

    pub fn atoms(&self) -> alloc::collections::BTreeSet<Atom> {
        self.0.keys().flat_map(|m| m.0.keys().cloned()).collect()
    }

    pub fn to_expr(&self) -> Expr {
        Expr::add_all(
            self.0
                .iter()
                .map(|(m, c)| Expr::mul_all([Expr::Const(c.clone()), m.to_expr()])),
        )
    }
}

/// `num / den` in reduced form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussRational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn reduced(num: Poly, den: Poly) -> Self {
        let num = num.trig_reduce();
        let den = den.trig_reduce();
        if num.is_zero() {
            return RatFunc { num: Poly::zero(), den: Poly::one() };
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&g), den.div_monomial(&g))
        };
        if den.as_constant().is_none() {
            if let Some(q) = num.div_exact(&den) {
                num = q;
                den = Poly::one();
            } else if num.as_constant().is_none() {
                if let Some(q) = den.div_exact(&num) {
                    num = Poly::one();
                    den = q;
                }
            }
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.inv().expect("nonzero leading coefficient");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc::reduced(self.num.add(&other.num), self.den.clone());
        }
        if let Some(k) = other.den.div_exact(&self.den) {
            return RatFunc::reduced(self.num.mul(&k).add(&other.num), other.den.clone());
        }
        if let Some(k) = self.den.div_exact(&other.den) {
            return RatFunc::reduced(self.num.add(&other.num.mul(&k)), self.den.clone());
        }
        RatFunc::reduced(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        let (a, d) = cancel(&self.num, &other.den);
        let (c, b) = cancel(&other.num, &self.den);
        RatFunc::reduced(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            return None;
        }
        Some(RatFunc::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn powi(&self, n: i32) -> Option<RatFunc> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let e = n.unsigned_abs();
        Some(RatFunc::reduced(base.num.pow(e), base.den.pow(e)))
    }

    pub fn from_expr(e: &Expr) -> Result<RatFunc, SymError> {
        Ok(match e {
            Expr::Const(c) => RatFunc::constant(c.clone()),
            Expr::Var(v) => RatFunc::from_poly(Poly::atom(Atom::Var(*v))),
            Expr::Jet(j) => RatFunc::from_poly(Poly::atom(Atom::Jet(*j))),
            Expr::Param(p) => RatFunc::from_poly(Poly::atom(Atom::Param(p.clone()))),
            Expr::Add(ts) => {
                let mut acc = RatFunc::constant(GaussRational::zero());
                for t in ts {
                    acc = acc.add(&RatFunc::from_expr(t)?);
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = RatFunc::constant(GaussRational::one());
                for f in fs {
                    acc = acc.mul(&RatFunc::from_expr(f)?);
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Expr::Pow(b, n) => RatFunc::from_expr(b)?.powi(*n).ok_or(SymError::DivisionByZero)?,
            Expr::Func(f, a) => {
                let arg = RatFunc::from_expr(a)?.to_expr();
                match Expr::func(*f, arg) {
                    Expr::Func(f, a) => RatFunc::from_poly(Poly::atom(Atom::Func(f, a))),
                    folded => RatFunc::from_expr(&folded)?,
                }
            }
        })
    }

    pub fn to_expr(&self) -> Expr {
        let num = self.num.to_expr();
        if self.den == Poly::one() {
            num
        } else {
            Expr::mul_all([num, self.den.to_expr().pow(-1)])
        }
    }

    pub fn atoms(&self) -> alloc::collections::BTreeSet<Atom> {
        let mut a = self.num.atoms();
        a.extend(self.den.atoms());
        a
    }
}

fn cancel(n: &Poly, d: &Poly) -> (Poly, Poly) {
    if d.as_constant().is_some() || n.is_zero() {
        return (n.clone(), d.clone());
    }
    if let Some(q) = n.div_exact(d) {
        return (q, Poly::one());
    }
    if n.as_constant().is_none() {
        if let Some(q) = d.div_exact(n) {
            return (Poly::one(), q);
        }
    }
    (n.clone(), d.clone())
}

/// Canonical form, or an error when a divisor is equivalent to zero.
pub fn try_normalize(e: &Expr) -> Result<Expr, SymError> {
    Ok(RatFunc::from_expr(e)?.to_expr())
}

/// Canonical form of `e`.
///
/// # Panics
///
/// If `e` divides by a subexpression whose normal form is zero.
pub fn normalize(e: &Expr) -> Expr {
    try_normalize(e).expect("division by an expression equivalent to zero")
}

/// Distinct atoms of `e`'s normal form, flattened through function arguments.
pub fn normal_atoms(e: &Expr) -> Result<Vec<Atom>, SymError> {
    Ok(RatFunc::from_expr(e)?.atoms().into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse;

    fn n(s: &str) -> Expr {
        normalize(&parse(s).unwrap())
    }

    #[test]
    fn pythagorean_identity() {
        assert_eq!(n("sin(u)^2 + cos(u)^2"), Expr::one());
        assert_eq!(n("cos(u)^4 - (1 - sin(u)^2)^2"), Expr::zero());
    }

    #[test]
    fn common_denominator() {
        assert_eq!(
            n("(lambda/2 + 1/(2*lambda) - u) - (lambda^2 + 1 - 2*lambda*u)/(2*lambda)"),
            Expr::zero()
        );
    }

    #[test]
    fn imaginary_unit() {
        assert_eq!(n("i*i"), Expr::int(-1));
    }

    #[test]
    fn cancels_exact_factors() {
        assert_eq!(n("(u^2 - u_x^2)/(u - u_x)"), n("u + u_x"));
        assert_eq!(n("(u + 1)/((u + 1)*(u_x + 2))"), n("1/(u_x + 2)"));
        assert_eq!(n("(1 + sin(u))/cos(u)^2"), n("1/(1 - sin(u))"));
    }

    #[test]
    fn idempotent_on_samples() {
        for s in [
            "lambda/2 + 1/(2*lambda) - (u - u_xx)",
            "(u*x + eta)/(eta^2*u_t - 3)",
            "sin(u/eta)^3 * cos(u)^3 + exp(x)/(1 + i*u)",
        ] {
            let once = n(s);
            assert_eq!(normalize(&once), once, "{s}");
        }
    }

    #[test]
    fn zero_denominator_is_an_error() {
        assert_eq!(try_normalize(&parse("1/(u - u)").unwrap()), Err(SymError::DivisionByZero));
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let a = Monomial::atom(Atom::Jet(JetCoord::U), 1);
        let b = Monomial::atom(Atom::Jet(JetCoord::new(1, 0)), 1);
        let ab = a.mul(&b);
        assert!(a < b);
        assert!(ab > b);
        assert!(a.mul(&a).mul(&b) > ab);
        assert!(ab.mul(&a) > b.mul(&a));
    }
}
