use alloc::collections::BTreeMap;

use super::deriv::total_derivative_n;
use super::expr::{Expr, JetCoord};
use super::SymError;

/// Upper bound on substitution sweeps before giving up on a fixed point.
const MAX_SWEEPS: usize = 64;

/// Replaces `target` by `replacement`. With `prolong`, every derivative
/// `u_{target + (a, b)}` is replaced by `D_x^a D_t^b replacement`, repeated
/// until no derivative of `target` remains.
pub fn substitute(
    e: &Expr,
    target: JetCoord,
    replacement: &Expr,
    prolong: bool,
) -> Result<Expr, SymError> {
    if !prolong {
        return Ok(e.map_leaves(|leaf| match leaf {
            Expr::Jet(j) if *j == target => replacement.clone(),
            other => other.clone(),
        }));
    }
    if replacement.jets().iter().any(|j| j.is_derivative_of(&target)) {
        return Err(SymError::Cycle(target.to_string()));
    }
    let mut cache: BTreeMap<JetCoord, Expr> = BTreeMap::new();
    let mut cur = e.clone();
    for _ in 0..MAX_SWEEPS {
        let hits: alloc::vec::Vec<JetCoord> =
            cur.jets().into_iter().filter(|j| j.is_derivative_of(&target)).collect();
        if hits.is_empty() {
            return Ok(cur);
        }
        for j in hits {
            cache.entry(j).or_insert_with(|| {
                total_derivative_n(replacement, j.nx - target.nx, j.nt - target.nt)
            });
        }
        cur = cur.map_leaves(|leaf| match leaf {
            Expr::Jet(j) if j.is_derivative_of(&target) => cache[j].clone(),
            other => other.clone(),
        });
    }
    Err(SymError::NoFixedPoint)
}

use alloc::string::ToString;
