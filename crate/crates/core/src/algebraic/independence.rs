use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::number::AlgebraicNumber;
use crate::diophantine::cf::continued_fraction_enclosure;
use crate::error::{Error, Result};

pub const DEFAULT_EXPONENT_BOUND: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Independence {
    /// `α^u β^v = 1`, normalised with `u > 0`, or `u = 0` and `v > 0`.
    Dependent {
        u: i64,
        v: i64,
    },
    IndependentUpTo {
        bound: u32,
    },
}

impl Independence {
    pub fn is_dependent(&self) -> bool {
        matches!(self, Independence::Dependent { .. })
    }
}

fn rational_pow(r: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// Exact test of `α^u β^v = 1`.
fn relation_holds(a: &AlgebraicNumber, b: &AlgebraicNumber, u: i64, v: i64) -> Result<bool> {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return Ok((rational_pow(&x, u) * rational_pow(&y, v)).is_one());
    }
    let lhs = a.pow(u)?;
    let rhs = b.pow(-v)?;
    Ok(lhs == rhs)
}

/// Candidate exponent pairs ordered by `max(|u|,|v|)`, then `u`, then `v`.
fn candidates(bound: i64) -> Vec<(i64, i64)> {
    let mut out = vec![];
    for m in 1..=bound {
        for u in 0..=m {
            for v in -m..=m {
                if u.abs().max(v.abs()) != m || (u == 0 && v <= 0) {
                    continue;
                }
                out.push((u, v));
            }
        }
    }
    out
}

/// Bounded search for a multiplicative relation `α^u β^v = 1`.
///
/// The necessary condition `u log|α| + v log|β| = 0` screens pairs with
/// certified logarithm enclosures; survivors are checked exactly.
pub fn multiplicative_independence(a: &AlgebraicNumber, b: &AlgebraicNumber, bound: u32) -> Result<Independence> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput(
            "multiplicative relations need nonzero numbers".into(),
        ));
    }
    let prec = 128;
    let la = a.log_abs(prec)?;
    let lb = b.log_abs(prec)?;
    let bound_i = bound as i64;
    // Convergents of log|α|/log|β| are tried first; they are the only pairs
    // that can satisfy the modulus condition when both logs are nonzero.
    let mut order = vec![];
    if la.excludes_zero() && lb.excludes_zero() {
        let ratio = la.div_ref(&lb)?;
        if let Ok(cf) = continued_fraction_enclosure(&ratio, 40) {
            for (p, q) in cf.convergents {
                if let (Some(p), Some(q)) = (p.to_i64(), q.to_i64()) {
                    if q.abs() <= bound_i && p.abs() <= bound_i && q != 0 {
                        order.push((q, -p));
                    }
                }
            }
        }
    }
    order.extend(candidates(bound_i));
    let mut seen = std::collections::HashSet::new();
    for (u, v) in order {
        let (u, v) = normalise(u, v);
        if !seen.insert((u, v)) {
            continue;
        }
        let form = la.mul_int(&u.into()).add_ref(&lb.mul_int(&v.into()));
        if form.excludes_zero() {
            continue;
        }
        if relation_holds(a, b, u, v)? {
            return Ok(Independence::Dependent { u, v });
        }
    }
    Ok(Independence::IndependentUpTo { bound })
}

fn normalise(u: i64, v: i64) -> (i64, i64) {
    if u < 0 || (u == 0 && v < 0) {
        (-u, -v)
    } else {
        (u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_integer(k)
    }

    #[test]
    fn integer_examples() {
        assert_eq!(
            multiplicative_independence(&n(2), &n(8), 64).unwrap(),
            Independence::Dependent { u: 3, v: -1 }
        );
        assert_eq!(
            multiplicative_independence(&n(4), &n(8), 64).unwrap(),
            Independence::Dependent { u: 3, v: -2 }
        );
        assert_eq!(
            multiplicative_independence(&n(2), &n(3), 64).unwrap(),
            Independence::IndependentUpTo { bound: 64 }
        );
    }
}
