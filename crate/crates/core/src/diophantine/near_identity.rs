use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::cf::continued_fraction_enclosure;
use crate::arithmetic::elementary::{arg, atan, pi, try_sqrt};
use crate::arithmetic::{ComplexEnclosure, Expr, PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Linear-scan prefix used before switching to convergent denominators.
const SCAN_PREFIX: u64 = 1 << 16;
const FIXED_BITS: i64 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Scan,
    ContinuedFraction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearIdentity {
    pub n: BigInt,
    /// Enclosures of `|η_j^n - 1|`.
    pub achieved: Vec<RealEnclosure>,
    pub method: SearchMethod,
}

/// Smallest `n >= 1` with `|η_j^n - 1| < d` for every `j`.
pub fn near_identity_search(etas: &[Arc<Expr>], d: &BigRational, policy: &PrecisionPolicy) -> Result<BigInt> {
    near_identity_search_with(etas, d, DEFAULT_BUDGET, policy).map(|r| r.n)
}

/// As [`near_identity_search`] with an explicit scan budget.
///
/// For a single `η` the minimal `n` is a convergent denominator of
/// `arg(η)/2π`, so the search continues past the budget along convergents.
pub fn near_identity_search_with(
    etas: &[Arc<Expr>],
    d: &BigRational,
    budget: u64,
    policy: &PrecisionPolicy,
) -> Result<NearIdentity> {
    if etas.is_empty() {
        return Err(Error::InvalidInput(
            "near-identity search needs at least one rotation".into(),
        ));
    }
    let two = BigRational::from_integer(2.into());
    if !d.is_positive() || d >= &two {
        return Err(Error::InvalidInput(format!("threshold {d} must lie in (0, 2)")));
    }
    let prec = policy.initial.max(192);
    let mut turns = vec![];
    for e in etas {
        let z = e.eval_at(prec)?;
        let m = z.abs_sq();
        if !m.contains_rational(&BigRational::one()) {
            return Err(Error::InvalidInput(format!(
                "rotation {} does not have modulus 1",
                m.to_sci(12)
            )));
        }
        turns.push(FixedTurn::new(&turns_of(&z)?));
    }
    let delta = FixedTurn::threshold(d, prec)?;
    let limit = if etas.len() == 1 {
        budget.min(SCAN_PREFIX)
    } else {
        budget
    };
    let mut phase: Vec<u128> = vec![0; turns.len()];
    for n in 1..=limit {
        let mut verdict = Verdict::Yes;
        for (p, t) in phase.iter_mut().zip(&turns) {
            *p = p.wrapping_add(t.lo);
            match t.compare(*p, n, &delta) {
                Verdict::No => verdict = Verdict::No,
                Verdict::Unknown if verdict == Verdict::Yes => verdict = Verdict::Unknown,
                _ => {}
            }
        }
        if verdict == Verdict::No {
            continue;
        }
        let nb = BigInt::from(n);
        if let Some(achieved) = check_direct(etas, &nb, d, policy)? {
            return Ok(NearIdentity {
                n: nb,
                achieved,
                method: SearchMethod::Scan,
            });
        }
    }
    if etas.len() > 1 {
        return Err(Error::SearchBudgetExceeded { budget });
    }
    convergent_search(&etas[0], d, BigInt::from(limit), policy)
}

fn convergent_search(
    eta: &Arc<Expr>,
    d: &BigRational,
    after: BigInt,
    policy: &PrecisionPolicy,
) -> Result<NearIdentity> {
    let dbits = (d.denom().bits() as i64 - d.numer().bits() as i64).max(0) as u32;
    let start = policy.initial.max(2 * dbits + 128).min(policy.cap);
    let mut floor = after;
    for prec in policy.with_initial(start).schedule() {
        let theta = turns_of(&eta.eval_at(prec)?)?;
        let cf = match continued_fraction_enclosure(&theta, usize::MAX / 2) {
            Ok(cf) => cf,
            Err(e) if e.is_precision() => continue,
            Err(e) => return Err(e),
        };
        for (_, q) in &cf.convergents {
            if q <= &floor {
                continue;
            }
            match check_direct(std::slice::from_ref(eta), q, d, policy)? {
                Some(achieved) => {
                    return Ok(NearIdentity {
                        n: q.clone(),
                        achieved,
                        method: SearchMethod::ContinuedFraction,
                    })
                }
                None => floor = q.clone(),
            }
        }
    }
    Err(Error::cap(policy.cap, "near-identity convergent search"))
}

/// `Some(|η_j^n - 1|)` when all are certainly below `d`, `None` when one is
/// certainly not.
fn check_direct(
    etas: &[Arc<Expr>],
    n: &BigInt,
    d: &BigRational,
    policy: &PrecisionPolicy,
) -> Result<Option<Vec<RealEnclosure>>> {
    let dbits = (d.denom().bits() as i64 - d.numer().bits() as i64).max(0) as u32;
    let start = policy.initial.max(n.bits() as u32 + dbits + 64).min(policy.cap);
    let mut last = None;
    for prec in policy.with_initial(start).schedule() {
        let bound = RealEnclosure::from_rational(d, prec);
        let mut out = vec![];
        let mut unknown = false;
        for e in etas {
            let z = e.eval_at(prec)?.pow_big(n)?;
            let g = z.sub_ref(&ComplexEnclosure::one(prec)).abs();
            if bound.certainly_le(&g) {
                return Ok(None);
            }
            unknown |= !g.certainly_lt(&bound);
            out.push(g);
        }
        if !unknown {
            return Ok(Some(out));
        }
        last = out.last().cloned();
    }
    let (lo, hi) = last.map(|g| g.to_decimal_bounds(20)).unwrap_or_default();
    Err(Error::AmbiguousRounding { lo, hi })
}

/// `arg(z) / 2π` reduced to `[0, 1)` when the enclosure allows it.
fn turns_of(z: &ComplexEnclosure) -> Result<RealEnclosure> {
    let prec = z.precision();
    let t = arg(z)?.div_ref(&pi(prec).mul_pow2(1))?;
    if t.is_certainly_negative() {
        Ok(t.add_ref(&RealEnclosure::one(prec)))
    } else {
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Yes,
    No,
    Unknown,
}

/// A turn count known to lie in `[lo, lo + width]` units of `2^-128`.
struct FixedTurn {
    lo: u128,
    width: u128,
}

/// `asin(d/2)/π` in units of `2^-128`: `|η^n - 1| < d` iff the distance of
/// `n·θ` to the nearest integer is below it.
struct Threshold {
    lo: u128,
    hi: u128,
}

impl FixedTurn {
    fn new(t: &RealEnclosure) -> Self {
        let modulus = BigInt::one() << FIXED_BITS;
        let lo = t.lo().mul_pow2(FIXED_BITS).floor();
        let hi = t.hi().mul_pow2(FIXED_BITS).ceil();
        let width = (&hi - &lo).to_u128().unwrap_or(u128::MAX);
        let lo = lo.mod_floor(&modulus).to_u128().unwrap_or(0);
        FixedTurn { lo, width }
    }

    fn threshold(d: &BigRational, prec: u32) -> Result<Threshold> {
        let x = RealEnclosure::from_rational(&(d / BigRational::from_integer(2.into())), prec);
        let c = try_sqrt(&RealEnclosure::one(prec).sub_ref(&x.sqr()))?;
        let delta = atan(&x.div_ref(&c)?).div_ref(&pi(prec))?;
        let lo = delta.lo().mul_pow2(FIXED_BITS).floor().max(BigInt::zero());
        let hi = delta.hi().mul_pow2(FIXED_BITS).ceil();
        Ok(Threshold {
            lo: lo.to_u128().unwrap_or(0),
            hi: hi.to_u128().unwrap_or(u128::MAX),
        })
    }

    /// Compares the distance of the phase `n·θ` to 0 with the threshold.
    fn compare(&self, phase: u128, n: u64, delta: &Threshold) -> Verdict {
        let span = match self.width.checked_mul(n as u128) {
            Some(s) if s < 1u128 << 100 => s as i128,
            _ => return Verdict::Unknown,
        };
        let a = phase as i128;
        let Some(b) = a.checked_add(span) else {
            return Verdict::Unknown;
        };
        let far = a.unsigned_abs().max(b.unsigned_abs());
        let near = if a <= 0 && b >= 0 {
            0
        } else {
            a.unsigned_abs().min(b.unsigned_abs())
        };
        if far < delta.lo {
            Verdict::Yes
        } else if near >= delta.hi {
            Verdict::No
        } else {
            Verdict::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::expr::Expr;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rotation(turns: Arc<Expr>) -> Arc<Expr> {
        let two_pi_i = Expr::mul(&Expr::mul(&Expr::int(2), &Arc::new(Expr::Pi)), &Arc::new(Expr::I));
        Expr::unary(Expr::Exp, &Expr::mul(&two_pi_i, &turns))
    }

    fn scan_oracle(theta: f64, d: f64, limit: u64) -> u64 {
        (1..=limit)
            .find(|&n| {
                let a = 2.0 * std::f64::consts::PI * theta * n as f64;
                (a.cos() - 1.0).hypot(a.sin()) < d
            })
            .unwrap()
    }

    #[test]
    fn quarter_turn() {
        let pol = PrecisionPolicy::default();
        let n = near_identity_search(&[Arc::new(Expr::I)], &q(1, 10), &pol).unwrap();
        assert_eq!(n, BigInt::from(4));
    }

    #[test]
    fn golden_rotation() {
        let pol = PrecisionPolicy::default();
        // 1/φ² = (3 - √5)/2
        let t = Expr::div(
            &Expr::sub(&Expr::int(3), &Expr::unary(Expr::Sqrt, &Expr::int(5))),
            &Expr::int(2),
        );
        let n = near_identity_search(&[rotation(t)], &q(1, 20), &pol).unwrap();
        assert_eq!(n, BigInt::from(89));
        let phi2 = ((3.0 - 5f64.sqrt()) / 2.0).fract();
        assert_eq!(scan_oracle(phi2, 0.05, 1000), 89);
    }

    #[test]
    fn two_rotations_match_scan() {
        let pol = PrecisionPolicy::default();
        let s2 = Expr::unary(Expr::Sqrt, &Expr::int(2));
        let s3 = Expr::unary(Expr::Sqrt, &Expr::int(3));
        let n = near_identity_search(&[rotation(s2), rotation(s3)], &q(1, 2), &pol).unwrap();
        let want = (1..1000u64)
            .find(|&n| {
                [2f64.sqrt(), 3f64.sqrt()].iter().all(|t| {
                    let a = 2.0 * std::f64::consts::PI * t * n as f64;
                    (a.cos() - 1.0).hypot(a.sin()) < 0.5
                })
            })
            .unwrap();
        assert_eq!(n, BigInt::from(want));
    }

    #[test]
    fn convergent_route_beyond_scan() {
        let pol = PrecisionPolicy::default();
        let eta = four_three_i();
        let theta = (0.6f64).atan2(0.8) / (2.0 * std::f64::consts::PI);
        let r = near_identity_search_with(std::slice::from_ref(&eta), &q(1, 100_000), 1000, &pol).unwrap();
        assert_eq!(r.method, SearchMethod::ContinuedFraction);
        assert_eq!(r.n, BigInt::from(scan_oracle(theta, 1e-5, 10_000_000)));
        let deep = near_identity_search_with(&[eta], &q(1, 1 << 30), 1000, &pol).unwrap();
        assert!(deep.n > r.n);
        let small = near_identity_search_with(&[four_three_i()], &q(1, 16), 1000, &pol).unwrap();
        assert_eq!(small.n, BigInt::from(scan_oracle(theta, 1.0 / 16.0, 100_000)));
    }

    fn four_three_i() -> Arc<Expr> {
        Expr::add(
            &Expr::rational(q(4, 5)),
            &Expr::mul(&Expr::rational(q(3, 5)), &Arc::new(Expr::I)),
        )
    }

    #[test]
    fn preconditions() {
        let pol = PrecisionPolicy::default();
        assert!(near_identity_search(&[Expr::int(2)], &q(1, 10), &pol).is_err());
        assert!(near_identity_search(&[Arc::new(Expr::I)], &q(3, 1), &pol).is_err());
        let r = near_identity_search_with(&[Expr::int(-1), Arc::new(Expr::I)], &q(1, 10), 3, &pol);
        assert_eq!(r.unwrap_err(), Error::SearchBudgetExceeded { budget: 3 });
    }
}
