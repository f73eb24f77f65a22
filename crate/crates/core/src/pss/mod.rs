//! Structure equations of pseudospherical surfaces checked modulo a PDE.

mod catalog;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::forms::{ext_d, wedge, zero_curvature_residual, Mat2, MatrixOneForm, TwoForm, Triad, ZcSign};
use crate::symcore::poly::{Atom, Poly, RatFunc};
use crate::symcore::{
    is_zero_seeded, substitute, total_derivative, Expr, JetCoord, SymError, Var, DEFAULT_SEED,
};

pub use catalog::{catalog, catalog_entry, CatalogEntry, EntryData, Family, CATALOG_NAMES};

/// A scalar equation `e = 0`, optionally solved for one jet coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pde {
    pub name: String,
    pub e: Expr,
    pub solved: Option<(JetCoord, Expr)>,
}

impl Pde {
    pub fn new(name: &str, e: Expr, solved: Option<(JetCoord, Expr)>) -> Self {
        Pde { name: name.into(), e, solved }
    }

    /// `u_xt − sin u = 0`, solved as `u_xt = sin u`.
    pub fn sine_gordon() -> Self {
        let e = Expr::jet(1, 1) - Expr::sin(Expr::u());
        Pde::new("sine-gordon", e, Some((JetCoord::new(1, 1), Expr::sin(Expr::u()))))
    }

    /// `u_t − u_txx + 3uu_x − 2u_x u_xx − u u_xxx = 0`.
    pub fn camassa_holm() -> Self {
        let j = Expr::jet;
        let e = j(0, 1) - j(2, 1) + Expr::int(3) * j(0, 0) * j(1, 0)
            - Expr::int(2) * j(1, 0) * j(2, 0)
            - j(0, 0) * j(3, 0);
        Pde::new("camassa-holm", e, None)
    }

    /// Jets of `e` of maximal order.
    pub fn leading_jets(&self) -> BTreeSet<JetCoord> {
        let jets = self.e.jets();
        let top = jets.iter().map(JetCoord::order).max().unwrap_or(0);
        jets.into_iter().filter(|j| j.order() == top).collect()
    }

    /// Whether `e` vanishes after substituting the solved pair.
    pub fn solved_is_consistent(&self) -> Result<bool, SymError> {
        match &self.solved {
            None => Ok(true),
            Some((z, g)) => is_zero_seeded(&substitute(&self.e, *z, g, true)?, DEFAULT_SEED),
        }
    }

    pub fn scaled(&self, k: Expr) -> Pde {
        Pde { name: self.name.clone(), e: k * self.e.clone(), solved: self.solved.clone() }
    }
}

/// `R₁ = dω₁ − ω₃∧ω₂`, `R₂ = dω₂ − ω₁∧ω₃`, `R₃ = dω₃ − ω₁∧ω₂`.
pub fn structure_residuals(tr: &Triad) -> [TwoForm; 3] {
    let (w1, w2, w3) = (&tr.w1, &tr.w2, &tr.w3);
    [
        ext_d(w1) - wedge(w3, w2),
        ext_d(w2) - wedge(w1, w3),
        ext_d(w3) - wedge(w1, w2),
    ]
}

/// Coefficient of `ω₁∧ω₂`.
pub fn generic_wedge(tr: &Triad) -> Expr {
    wedge(&tr.w1, &tr.w2).c
}

/// `(E, F, G)` with `I = ω₁² + ω₂² = E dx² + 2F dxdt + G dt²`.
pub fn first_fundamental(tr: &Triad) -> (Expr, Expr, Expr) {
    let (a, b) = (&tr.w1, &tr.w2);
    (
        &a.fx * &a.fx + &b.fx * &b.fx,
        &a.fx * &a.ft + &b.fx * &b.ft,
        &a.ft * &a.ft + &b.ft * &b.ft,
    )
}

/// Factors whose vanishing makes `ω₁∧ω₂` vanish: the atoms dividing every
/// term of the numerator, then the remaining cofactor. Factors involving
/// parameters only are dropped. An identically degenerate triad yields `[0]`.
pub fn degenerate_conditions(tr: &Triad) -> Result<Vec<Expr>, SymError> {
    let rf = RatFunc::from_expr(&generic_wedge(tr))?;
    if rf.is_zero() {
        return Ok(alloc::vec![Expr::zero()]);
    }
    let content = rf.num.monomial_content();
    let mut out: Vec<Expr> = content
        .0
        .keys()
        .filter(|a| !a.is_param())
        .map(Atom::to_expr)
        .collect();
    let rest = rf.num.div_monomial(&content);
    if !rest.atoms().iter().all(Atom::is_param) {
        out.push(monic(&rest).to_expr());
    }
    Ok(out)
}

fn monic(p: &Poly) -> Poly {
    match p.leading().and_then(|(_, c)| c.inv()) {
        Some(k) => p.scale(&k),
        None => p.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerifyMode {
    Auto,
    Multiplier,
    Substitution,
}

/// How a report's residuals were reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Multiplier,
    Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    PssVerified,
    IdenticallyFlat,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::PssVerified => "PSS-verified",
            Status::IdenticallyFlat => "identically-flat",
            Status::Failed => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub residuals: [TwoForm; 3],
    /// `μᵢ` with `Rᵢ = μᵢ·E`, where exact division succeeded.
    pub multipliers: [Option<Expr>; 3],
    pub mode: Reduction,
    pub status: Status,
    pub wedge12: Expr,
}

/// `μ` with `r = μ·e`, free of the leading jets of `e`, if exact division
/// of the numerators succeeds and the identity certifies.
pub fn multiplier(r: &Expr, pde: &Pde, seed: u64) -> Result<Option<Expr>, SymError> {
    let rr = RatFunc::from_expr(r)?;
    if rr.is_zero() {
        return Ok(Some(Expr::zero()));
    }
    let re = RatFunc::from_expr(&pde.e)?;
    if re.is_zero() {
        return Ok(None);
    }
    let Some(q) = rr.num.div_exact(&re.num) else {
        return Ok(None);
    };
    let mu = RatFunc::from_poly(q)
        .mul(&RatFunc::from_poly(re.den.clone()))
        .mul(&RatFunc::reduced(Poly::one(), rr.den.clone()))
        .to_expr();
    let lead = pde.leading_jets();
    if mu.jets().iter().any(|j| lead.contains(j)) {
        return Ok(None);
    }
    if !is_zero_seeded(&(r - &mu * &pde.e), seed)? {
        return Ok(None);
    }
    Ok(Some(mu))
}

fn reduces_by_substitution(r: &Expr, pde: &Pde, seed: u64) -> Result<bool, SymError> {
    match &pde.solved {
        None => Ok(false),
        Some((z, g)) => is_zero_seeded(&substitute(r, *z, g, true)?, seed),
    }
}

pub fn verify_pss(tr: &Triad, pde: &Pde, mode: VerifyMode, seed: u64) -> Result<VerifyReport, SymError> {
    let residuals = structure_residuals(tr).map(|r| TwoForm::new(normalize_or_raw(&r.c)));
    let wedge12 = normalize_or_raw(&generic_wedge(tr));
    let mut report = VerifyReport {
        residuals,
        multipliers: [None, None, None],
        mode: Reduction::Multiplier,
        status: Status::Failed,
        wedge12,
    };
    let mut flat = true;
    for r in &report.residuals {
        flat &= is_zero_seeded(&r.c, seed)?;
    }
    if flat {
        report.multipliers = core::array::from_fn(|_| Some(Expr::zero()));
        report.status = Status::IdenticallyFlat;
        return Ok(report);
    }
    if mode != VerifyMode::Substitution {
        for (m, r) in report.multipliers.iter_mut().zip(&report.residuals) {
            *m = multiplier(&r.c, pde, seed)?;
        }
        if report.multipliers.iter().all(Option::is_some) {
            report.status = Status::PssVerified;
            return Ok(report);
        }
    }
    if mode != VerifyMode::Multiplier && pde.solved.is_some() {
        report.mode = Reduction::Substitution;
        let mut ok = true;
        for r in &report.residuals {
            ok &= reduces_by_substitution(&r.c, pde, seed)?;
        }
        if ok {
            report.status = Status::PssVerified;
        }
    }
    Ok(report)
}

fn normalize_or_raw(e: &Expr) -> Expr {
    crate::symcore::try_normalize(e).unwrap_or_else(|_| e.clone())
}

/// Entrywise reduction of a zero-curvature residual modulo a PDE.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZcReport {
    pub sign: ZcSign,
    pub residual: Mat2,
    pub multipliers: [[Option<Expr>; 2]; 2],
    /// Entries that reduce only by substituting the solved form.
    pub substituted: [[bool; 2]; 2],
    pub reduced: bool,
}

pub fn zero_curvature_check(om: &MatrixOneForm, sign: ZcSign, pde: &Pde, seed: u64) -> Result<ZcReport, SymError> {
    let raw = zero_curvature_residual(&om.x, &om.t, sign);
    let residual = raw.map(|row| row.map(|e| normalize_or_raw(&e)));
    let mut multipliers: [[Option<Expr>; 2]; 2] = Default::default();
    let mut substituted = [[false; 2]; 2];
    let mut reduced = true;
    for i in 0..2 {
        for j in 0..2 {
            let r = &residual[i][j];
            multipliers[i][j] = multiplier(r, pde, seed)?;
            if multipliers[i][j].is_none() {
                substituted[i][j] = reduces_by_substitution(r, pde, seed)?;
                reduced &= substituted[i][j];
            }
        }
    }
    Ok(ZcReport { sign, residual, multipliers, substituted, reduced })
}

/// One expansion of `m_t + α·u·m_x + β·u_x·m` with `m = u − u_xx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MFormCheck {
    pub alpha: i64,
    pub beta: i64,
    pub expansion: Expr,
    /// Expansion minus the Camassa–Holm left-hand side, normalized.
    pub difference: Expr,
    pub matches: bool,
}

pub fn m_form_expansion(alpha: i64, beta: i64, m: &Expr) -> Expr {
    let u = Expr::u();
    total_derivative(m, Var::T)
        + Expr::int(alpha) * &u * total_derivative(m, Var::X)
        + Expr::int(beta) * Expr::jet(1, 0) * m
}

/// Compares the printed `(2, 1)` and the conventional `(1, 2)` coefficient
/// pairs of the `m`-form against the expanded equation.
pub fn ch_form_equivalence() -> Result<[MFormCheck; 2], SymError> {
    let m = Expr::u() - Expr::jet(2, 0);
    let e = Pde::camassa_holm().e;
    let check = |alpha: i64, beta: i64| -> Result<MFormCheck, SymError> {
        let expansion = m_form_expansion(alpha, beta, &m);
        let difference = crate::symcore::try_normalize(&(&expansion - &e))?;
        Ok(MFormCheck {
            alpha,
            beta,
            matches: is_zero_seeded(&difference, DEFAULT_SEED)?,
            expansion: crate::symcore::try_normalize(&expansion)?,
            difference,
        })
    };
    Ok([check(2, 1)?, check(1, 2)?])
}
