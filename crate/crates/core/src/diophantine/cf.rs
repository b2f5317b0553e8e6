use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arithmetic::{PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};

/// Certified partial quotients with their convergents `p_k / q_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The expansion terminated: the input is this rational exactly.
    pub terminated: bool,
}

impl ContinuedFraction {
    fn from_quotients(a: Vec<BigInt>, terminated: bool) -> Self {
        let mut conv = Vec::with_capacity(a.len());
        let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
        let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
        for ak in &a {
            let p2 = ak * &p1 + &p0;
            let q2 = ak * &q1 + &q0;
            conv.push((p2.clone(), q2.clone()));
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
        }
        ContinuedFraction {
            partial_quotients: a,
            convergents: conv,
            terminated,
        }
    }

    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    pub fn convergent(&self, k: usize) -> BigRational {
        let (p, q) = &self.convergents[k];
        BigRational::new(p.clone(), q.clone())
    }
}

/// Canonical expansion by the Euclidean algorithm (at most `max_terms`).
fn euclid(x: &BigRational, max_terms: usize) -> (Vec<BigInt>, bool) {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut out = vec![];
    while out.len() < max_terms {
        let (a, r) = n.div_mod_floor(&d);
        out.push(a);
        if r.is_zero() {
            return (out, true);
        }
        n = std::mem::replace(&mut d, r);
    }
    (out, false)
}

pub fn continued_fraction_rational(x: &BigRational, max_terms: usize) -> ContinuedFraction {
    let (a, done) = euclid(x, max_terms);
    ContinuedFraction::from_quotients(a, done)
}

/// Partial quotients shared by every point of the enclosure.
///
/// A prefix `[a_0; …, a_k]` is certified when both endpoints have canonical
/// expansions starting with it and continuing past it; the set of reals with
/// that prefix is an interval, so the whole enclosure shares it.
pub fn continued_fraction_enclosure(x: &RealEnclosure, max_terms: usize) -> Result<ContinuedFraction> {
    if let Some(r) = x.exact_value() {
        return Ok(continued_fraction_rational(&r, max_terms));
    }
    let (lo, hi) = x.to_rationals();
    let (a, _) = euclid(&lo, max_terms + 1);
    let (b, _) = euclid(&hi, max_terms + 1);
    let mut k = 0;
    while k < max_terms && k + 1 < a.len() && k + 1 < b.len() && a[k] == b[k] {
        k += 1;
    }
    if k == 0 {
        let (l, h) = x.to_decimal_bounds(20);
        return Err(Error::AmbiguousRounding { lo: l, hi: h });
    }
    Ok(ContinuedFraction::from_quotients(a[..k].to_vec(), false))
}

/// Refines `eval` until `terms` partial quotients are certified or the
/// expansion terminates.
pub fn continued_fraction_with(
    policy: &PrecisionPolicy,
    terms: usize,
    mut eval: impl FnMut(u32) -> Result<RealEnclosure>,
) -> Result<ContinuedFraction> {
    let mut last = None;
    for prec in policy.schedule() {
        let x = eval(prec)?;
        match continued_fraction_enclosure(&x, terms) {
            Ok(cf) if cf.terminated || cf.len() >= terms => return Ok(cf),
            Ok(cf) => last = Some((cf, x)),
            Err(e) if e.is_precision() => {}
            Err(e) => return Err(e),
        }
    }
    match last {
        Some((_, x)) => {
            let (lo, hi) = x.to_decimal_bounds(20);
            Err(Error::AmbiguousRounding { lo, hi })
        }
        None => Err(Error::cap(policy.cap, "continued fraction")),
    }
}

/// `|x - p/q| < 1/q^2` for every convergent, checked on an enclosure.
pub fn convergents_are_good(cf: &ContinuedFraction, x: &RealEnclosure) -> bool {
    let prec = x.precision();
    cf.convergents.iter().enumerate().all(|(k, (p, q))| {
        if cf.terminated && k + 1 == cf.len() {
            return true;
        }
        let c = RealEnclosure::from_rational(&BigRational::new(p.clone(), q.clone()), prec);
        let err = x.sub_ref(&c).abs();
        let bound = RealEnclosure::from_rational(&BigRational::new(BigInt::one(), q * q), prec);
        err.certainly_lt(&bound)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_sevenths() {
        let cf = continued_fraction_rational(&BigRational::new(13.into(), 7.into()), 10);
        assert_eq!(cf.partial_quotients, vec![1.into(), 1.into(), 6.into()]);
        assert!(cf.terminated);
        assert_eq!(cf.convergent(2), BigRational::new(13.into(), 7.into()));
    }

    #[test]
    fn negative_rational() {
        let cf = continued_fraction_rational(&BigRational::new((-7).into(), 3.into()), 10);
        assert_eq!(cf.partial_quotients, vec![(-3).into(), 1.into(), 2.into()]);
    }

    #[test]
    fn enclosure_straddling_boundary_has_no_terms() {
        let x = RealEnclosure::from_rational(&BigRational::new(29.into(), 10.into()), 64).hull(
            &RealEnclosure::from_rational(&BigRational::new(31.into(), 10.into()), 64),
        );
        assert!(matches!(
            continued_fraction_enclosure(&x, 5),
            Err(Error::AmbiguousRounding { .. })
        ));
    }
}
