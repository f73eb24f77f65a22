//! Symbolic expressions over the jet space of `u(x, t)`.

mod certify;
mod deriv;
mod eval;
mod expr;
mod gauss;
mod parse;
pub mod poly;
mod print;
mod subst;

use alloc::string::String;

pub use certify::{
    certify, is_zero, is_zero_seeded, numeric_max_abs, Certificate, CERT_POINTS, CERT_ROUNDS, CERT_TOL,
    DEFAULT_SEED,
};
pub use deriv::{total_derivative, total_derivative_n};
pub use eval::{eval_numeric, eval_with_scale, symbol_name, Assignment, POLE_EPS};
pub use expr::{Expr, Func, JetCoord, Param, Symbol, Var};
pub use gauss::GaussRational;
pub use parse::{parse, PARAM_NAMES};
pub use poly::{normalize, try_normalize};
pub use subst::substitute;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("no value assigned to `{0}`")]
    MissingAtom(String),
    #[error("evaluation hit a pole")]
    Pole,
    #[error("zero test inconclusive: poles in all {rounds} rounds")]
    Inconclusive { rounds: usize },
    #[error("normal form and numeric certificate disagree")]
    CertificateMismatch,
    #[error("substitution cycle: replacement depends on {0} or a derivative of it")]
    Cycle(String),
    #[error("substitution did not reach a fixed point")]
    NoFixedPoint,
    #[error("division by an expression equivalent to zero")]
    DivisionByZero,
}
