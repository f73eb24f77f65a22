//! Zero testing: exact normal form, cross-checked by evaluation at random
//! complex points.

use core::f64::consts::TAU;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_with_scale, Assignment};
use super::expr::Expr;
use super::poly::RatFunc;
use super::SymError;

pub const CERT_POINTS: usize = 8;
pub const CERT_TOL: f64 = 1e-9;
pub const CERT_ROUNDS: usize = 5;
pub const DEFAULT_SEED: u64 = 0x5eed_2025;

/// Sample points are drawn with modulus in this range.
const ANNULUS: (f64, f64) = (0.5, 1.5);

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub symbolic_zero: bool,
    pub numeric_zero: bool,
    /// Largest scaled `|value|` seen in the accepted round.
    pub max_abs: f64,
    /// Rounds needed to get a pole-free sample.
    pub rounds: usize,
    /// The normal form contains function applications beyond `sin(u)` and
    /// `cos(u)`, so the numeric route decides.
    pub opaque: bool,
}

impl Certificate {
    pub fn verdict(&self) -> Result<bool, SymError> {
        if self.symbolic_zero {
            return if self.numeric_zero { Ok(true) } else { Err(SymError::CertificateMismatch) };
        }
        if self.opaque {
            return Ok(self.numeric_zero);
        }
        if self.numeric_zero {
            Err(SymError::CertificateMismatch)
        } else {
            Ok(false)
        }
    }
}

/// Uniform draw on `[0, 1)`.
pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn annulus_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = ANNULUS.0 + (ANNULUS.1 - ANNULUS.0) * unit(rng);
    Complex64::from_polar(r, TAU * unit(rng))
}

pub fn random_assignment(e: &Expr, rng: &mut ChaCha8Rng) -> Assignment {
    e.symbols().into_iter().map(|s| (s, annulus_point(rng))).collect()
}

/// Evaluates `e` at `CERT_POINTS` random points; a round with any pole is
/// discarded and redrawn, at most `CERT_ROUNDS` times. Each value is divided
/// by the largest intermediate magnitude when that exceeds one, so the
/// threshold is absolute for moderate sizes and relative beyond.
pub fn numeric_max_abs(e: &Expr, seed: u64) -> Result<(f64, usize), SymError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'round: for round in 1..=CERT_ROUNDS {
        let mut max_abs: f64 = 0.0;
        for _ in 0..CERT_POINTS {
            let at = random_assignment(e, &mut rng);
            match eval_with_scale(e, &at) {
                Ok((v, scale)) if v.re.is_finite() && v.im.is_finite() && scale.is_finite() => {
                    max_abs = max_abs.max(v.norm() / scale.max(1.0))
                }
                Ok(_) | Err(SymError::Pole) => continue 'round,
                Err(other) => return Err(other),
            }
        }
        return Ok((max_abs, round));
    }
    Err(SymError::Inconclusive { rounds: CERT_ROUNDS })
}

pub fn certify(e: &Expr, seed: u64) -> Result<Certificate, SymError> {
    let rf = RatFunc::from_expr(e)?;
    let opaque = rf.atoms().iter().any(|a| a.is_opaque());
    let (max_abs, rounds) = numeric_max_abs(e, seed)?;
    Ok(Certificate {
        symbolic_zero: rf.is_zero(),
        numeric_zero: max_abs < CERT_TOL,
        max_abs,
        rounds,
        opaque,
    })
}

pub fn is_zero_seeded(e: &Expr, seed: u64) -> Result<bool, SymError> {
    certify(e, seed)?.verdict()
}

/// Certified zero test with the default seed.
pub fn is_zero(e: &Expr) -> Result<bool, SymError> {
    is_zero_seeded(e, DEFAULT_SEED)
}
