//! Exterior calculus in the coframe `{dx, dt}` with symbolic coefficients.

use core::ops::{Add, Mul, Neg, Sub};

use crate::symcore::{is_zero, total_derivative, Expr, SymError, Var};

/// `fx dx + ft dt`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct OneForm {
    pub fx: Expr,
    pub ft: Expr,
}

/// `c dx∧dt`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TwoForm {
    pub c: Expr,
}

pub type Mat2 = [[Expr; 2]; 2];
pub type TwoFormMat = [[TwoForm; 2]; 2];

/// `Ω = X dx + T dt` with 2×2 coefficient matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MatrixOneForm {
    pub x: Mat2,
    pub t: Mat2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Triad {
    pub w1: OneForm,
    pub w2: OneForm,
    pub w3: OneForm,
}

/// Sign `s` of the `D_x T` term in `D_t X + s·D_x T + [X, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZcSign {
    Plus,
    Minus,
}

impl ZcSign {
    pub fn symbol(self) -> char {
        match self {
            ZcSign::Plus => '+',
            ZcSign::Minus => '-',
        }
    }

    pub fn from_symbol(c: &str) -> Option<ZcSign> {
        match c {
            "+" => Some(ZcSign::Plus),
            "-" => Some(ZcSign::Minus),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FormsError {
    #[error("matrix one-form is not trace-free")]
    NotTraceFree,
    #[error(transparent)]
    Sym(#[from] SymError),
}

impl OneForm {
    pub fn new(fx: Expr, ft: Expr) -> Self {
        OneForm { fx, ft }
    }

    pub fn dx() -> Self {
        OneForm::new(Expr::one(), Expr::zero())
    }

    pub fn dt() -> Self {
        OneForm::new(Expr::zero(), Expr::one())
    }

    /// `df = D_x f dx + D_t f dt` for a function `f`.
    pub fn exact(f: &Expr) -> Self {
        OneForm::new(total_derivative(f, Var::X), total_derivative(f, Var::T))
    }

    pub fn scale(&self, k: &Expr) -> OneForm {
        OneForm::new(k * &self.fx, k * &self.ft)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> OneForm {
        OneForm::new(f(&self.fx), f(&self.ft))
    }

    pub fn is_zero(&self) -> Result<bool, SymError> {
        Ok(is_zero(&self.fx)? && is_zero(&self.ft)?)
    }
}

impl TwoForm {
    pub fn new(c: Expr) -> Self {
        TwoForm { c }
    }

    pub fn is_zero(&self) -> Result<bool, SymError> {
        is_zero(&self.c)
    }
}

macro_rules! linear_ops {
    ($ty:ident { $($f:ident),+ }) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                $ty { $($f: self.$f + rhs.$f),+ }
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                $ty { $($f: self.$f - rhs.$f),+ }
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty { $($f: -self.$f),+ }
            }
        }
        impl Mul<$ty> for Expr {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                $ty { $($f: &self * rhs.$f),+ }
            }
        }
    };
}

linear_ops!(OneForm { fx, ft });
linear_ops!(TwoForm { c });

/// `d(f dx + g dt) = (D_x g − D_t f) dx∧dt`.
pub fn ext_d(w: &OneForm) -> TwoForm {
    TwoForm::new(total_derivative(&w.ft, Var::X) - total_derivative(&w.fx, Var::T))
}

/// `(a_x b_t − a_t b_x) dx∧dt`.
pub fn wedge(a: &OneForm, b: &OneForm) -> TwoForm {
    TwoForm::new(&a.fx * &b.ft - &a.ft * &b.fx)
}

impl MatrixOneForm {
    pub fn new(x: Mat2, t: Mat2) -> Self {
        MatrixOneForm { x, t }
    }

    pub fn zero() -> Self {
        MatrixOneForm::default()
    }

    pub fn entry(&self, i: usize, j: usize) -> OneForm {
        OneForm::new(self.x[i][j].clone(), self.t[i][j].clone())
    }

    pub fn from_entries(e: [[OneForm; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = e;
        MatrixOneForm {
            x: [[a.fx, b.fx], [c.fx, d.fx]],
            t: [[a.ft, b.ft], [c.ft, d.ft]],
        }
    }

    pub fn is_trace_free(&self) -> Result<bool, SymError> {
        Ok(is_zero(&(&self.x[0][0] + &self.x[1][1]))? && is_zero(&(&self.t[0][0] + &self.t[1][1]))?)
    }

    /// The AKNS matrix
    /// `[[−iζ dx + A dt, q dx + B dt], [r dx + C dt, iζ dx − A dt]]`.
    pub fn akns(d: &AknsData) -> Self {
        let iz = Expr::i() * d.zeta.clone();
        MatrixOneForm {
            x: [[-iz.clone(), d.q.clone()], [d.r.clone(), iz]],
            t: [[d.a.clone(), d.b.clone()], [d.c.clone(), -d.a.clone()]],
        }
    }
}

fn mat_map<T, U>(m: &[[T; 2]; 2], f: impl Fn(&T) -> U) -> [[U; 2]; 2] {
    [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][j] - &b[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn matrix_ext_d(om: &MatrixOneForm) -> TwoFormMat {
    let e = |i: usize, j: usize| ext_d(&om.entry(i, j));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `(Ω∧Ψ)_ij = Σ_k Ω_ik ∧ Ψ_kj`.
pub fn matrix_wedge(om: &MatrixOneForm, psi: &MatrixOneForm) -> TwoFormMat {
    let e = |i: usize, j: usize| {
        wedge(&om.entry(i, 0), &psi.entry(0, j)) + wedge(&om.entry(i, 1), &psi.entry(1, j))
    };
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `Σ = dΩ − Ω∧Ω`.
pub fn curvature_matrix(om: &MatrixOneForm) -> TwoFormMat {
    let d = matrix_ext_d(om);
    let w = matrix_wedge(om, om);
    let e = |i: usize, j: usize| d[i][j].clone() - w[i][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `D_t X + s·D_x T + [X, T]`.
pub fn zero_curvature_residual(x: &Mat2, t: &Mat2, sign: ZcSign) -> Mat2 {
    let dtx = mat_map(x, |e| total_derivative(e, Var::T));
    let dxt = mat_map(t, |e| match sign {
        ZcSign::Plus => total_derivative(e, Var::X),
        ZcSign::Minus => -total_derivative(e, Var::X),
    });
    let comm = mat_sub(&mat_mul(x, t), &mat_mul(t, x));
    let e = |i: usize, j: usize| &dtx[i][j] + &dxt[i][j] + &comm[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Coefficients of the AKNS matrix; `zeta` is the spectral parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AknsData {
    pub q: Expr,
    pub r: Expr,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub zeta: Expr,
}

/// Residuals of the AKNS system:
/// `D_x A − (qC − rB)`, `D_x B + 2iζB − (D_t q − 2Aq)`, `D_x C − 2iζC − (D_t r + 2Ar)`.
pub fn akns_compatibility(d: &AknsData) -> [Expr; 3] {
    let two_iz = Expr::int(2) * Expr::i() * d.zeta.clone();
    let dx = |e: &Expr| total_derivative(e, Var::X);
    let dt = |e: &Expr| total_derivative(e, Var::T);
    [
        dx(&d.a) - (&d.q * &d.c - &d.r * &d.b),
        dx(&d.b) + &two_iz * &d.b - (dt(&d.q) - Expr::int(2) * &d.a * &d.q),
        dx(&d.c) - &two_iz * &d.c - (dt(&d.r) + Expr::int(2) * &d.a * &d.r),
    ]
}

/// `ω₁ = Ω₁₂ + Ω₂₁`, `ω₂ = 2Ω₁₁`, `ω₃ = Ω₂₁ − Ω₁₂`.
pub fn sasaki_triad(om: &MatrixOneForm) -> Result<Triad, FormsError> {
    if !om.is_trace_free()? {
        return Err(FormsError::NotTraceFree);
    }
    let (o11, o12, o21) = (om.entry(0, 0), om.entry(0, 1), om.entry(1, 0));
    Ok(Triad {
        w1: o12.clone() + o21.clone(),
        w2: Expr::int(2) * o11,
        w3: o21 - o12,
    })
}

/// Inverse of [`sasaki_triad`]:
/// `Ω = ½[[ω₂, ω₁ − ω₃], [ω₁ + ω₃, −ω₂]]`.
pub fn triad_to_matrix(tr: &Triad) -> MatrixOneForm {
    let half = Expr::ratio(1, 2);
    MatrixOneForm::from_entries([
        [
            half.clone() * tr.w2.clone(),
            half.clone() * (tr.w1.clone() - tr.w3.clone()),
        ],
        [half.clone() * (tr.w1.clone() + tr.w3.clone()), -(half * tr.w2.clone())],
    ])
}

impl Triad {
    pub fn new(w1: OneForm, w2: OneForm, w3: OneForm) -> Self {
        Triad { w1, w2, w3 }
    }

    pub fn forms(&self) -> [&OneForm; 3] {
        [&self.w1, &self.w2, &self.w3]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Triad {
        Triad::new(self.w1.map(&f), self.w2.map(&f), self.w3.map(&f))
    }
}
