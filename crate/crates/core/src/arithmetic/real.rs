use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dyadic::{rational_to_decimal, Dyadic, Round};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 256;

/// A closed interval `[lo, hi]` with dyadic endpoints, guaranteed to contain
/// the real quantity it stands for. `prec` is the mantissa width used when
/// rounding results of further operations.
#[derive(Clone, PartialEq, Eq)]
pub struct RealEnclosure {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl RealEnclosure {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi: {lo:?} > {hi:?}");
        RealEnclosure { lo, hi, prec }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        RealEnclosure {
            lo: x.clone(),
            hi: x,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::point(Dyadic::one(), prec)
    }

    pub fn from_int<T: Into<BigInt>>(v: T, prec: u32) -> Self {
        Self::point(Dyadic::from_int(v), prec)
    }

    /// Outward-rounded enclosure of a rational; exact when it is dyadic.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if let Some(d) = Dyadic::try_from_rational(r) {
            if d.mantissa().bits() <= prec as u64 {
                return Self::point(d, prec);
            }
        }
        RealEnclosure {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
            prec,
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self::point(Dyadic::from_f64(x), prec)
    }

    /// `[c - r, c + r]`.
    pub fn ball(center: &Dyadic, radius: &Dyadic, prec: u32) -> Self {
        let r = radius.abs();
        RealEnclosure {
            lo: center.sub(&r).round(prec, Round::Down),
            hi: center.add(&r).round(prec, Round::Up),
            prec,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// Upper bound on the half-width.
    pub fn radius(&self) -> Dyadic {
        self.width().mul_pow2(-1)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `other` lies in the interior of `self`.
    pub fn strictly_encloses(&self, other: &Self) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        RealEnclosure {
            lo: self.lo.min_ref(&other.lo).clone(),
            hi: self.hi.max_ref(&other.hi).clone(),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max_ref(&other.lo).clone();
        let hi = self.hi.min_ref(&other.hi).clone();
        (lo <= hi).then(|| RealEnclosure {
            lo,
            hi,
            prec: self.prec.max(other.prec),
        })
    }

    /// Widen by `r` on both sides.
    pub fn inflate(&self, r: &Dyadic) -> Self {
        let r = r.abs();
        RealEnclosure {
            lo: self.lo.sub(&r).round(self.prec, Round::Down),
            hi: self.hi.add(&r).round(self.prec, Round::Up),
            prec: self.prec,
        }
    }

    fn prec2(&self, other: &Self) -> u32 {
        self.prec.max(other.prec)
    }

    fn from_exact(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        RealEnclosure {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        Self::from_exact(self.lo.add(&other.lo), self.hi.add(&other.hi), self.prec2(other))
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        Self::from_exact(self.lo.sub(&other.hi), self.hi.sub(&other.lo), self.prec2(other))
    }

    pub fn neg_ref(&self) -> Self {
        RealEnclosure {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let prec = self.prec2(other);
        if self.is_point() && other.is_point() {
            let p = self.lo.mul(&other.lo);
            return Self::from_exact(p.clone(), p, prec);
        }
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = &cands[0];
        let mut hi = &cands[0];
        for c in &cands[1..] {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        Self::from_exact(lo.clone(), hi.clone(), prec)
    }

    pub fn mul_dyadic(&self, d: &Dyadic) -> Self {
        self.mul_ref(&Self::point(d.clone(), self.prec))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        self.mul_ref(&Self::point(Dyadic::from_int(k.clone()), self.prec))
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        RealEnclosure {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if self.contains_zero() {
            Self::from_exact(Dyadic::zero(), a.max_ref(&b).clone(), self.prec)
        } else {
            Self::from_exact(a.min_ref(&b).clone(), a.max_ref(&b).clone(), self.prec)
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByUncertainZero);
        }
        let one = Dyadic::one();
        Ok(RealEnclosure {
            lo: one.div_round(&self.hi, self.prec, Round::Down),
            hi: one.div_round(&self.lo, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::DivisionByUncertainZero);
        }
        let prec = self.prec2(other);
        if other.is_point() {
            let d = &other.lo;
            let a = self.lo.div_round(d, prec, Round::Down);
            let b = self.hi.div_round(d, prec, Round::Down);
            let c = self.lo.div_round(d, prec, Round::Up);
            let e = self.hi.div_round(d, prec, Round::Up);
            return Ok(RealEnclosure {
                lo: a.min_ref(&b).clone(),
                hi: c.max_ref(&e).clone(),
                prec,
            });
        }
        Ok(self.mul_ref(&other.recip()?.with_precision(prec)))
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        Ok(self.pow_big(&BigInt::from(n)))
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow_big(&self, n: &BigInt) -> Self {
        assert!(n >= &BigInt::zero(), "negative exponent in pow_big");
        let mut result = Self::one(self.prec);
        let mut base = self.clone();
        let bits = n.bits();
        for i in 0..bits {
            if n.bit(i) {
                result = result.mul_ref(&base);
            }
            if i + 1 < bits {
                base = base.sqr();
            }
        }
        result
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            RealEnclosure {
                lo: Dyadic::zero(),
                hi: self.lo.abs().max_ref(&self.hi).clone(),
                prec: self.prec,
            }
        } else if self.hi.signum() <= 0 {
            self.neg_ref()
        } else {
            self.clone()
        }
    }

    pub fn max_with(&self, other: &Self) -> Self {
        RealEnclosure {
            lo: self.lo.max_ref(&other.lo).clone(),
            hi: self.hi.max_ref(&other.hi).clone(),
            prec: self.prec2(other),
        }
    }

    pub fn min_with(&self, other: &Self) -> Self {
        RealEnclosure {
            lo: self.lo.min_ref(&other.lo).clone(),
            hi: self.hi.min_ref(&other.hi).clone(),
            prec: self.prec2(other),
        }
    }

    /// Rational bounds `(lo, hi)`.
    pub fn to_rationals(&self) -> (BigRational, BigRational) {
        (self.lo.to_rational(), self.hi.to_rational())
    }

    /// The exact value when the enclosure is a single point.
    pub fn exact_value(&self) -> Option<BigRational> {
        self.is_point().then(|| self.lo.to_rational())
    }

    /// Decimal rendering `[lo, hi]` with `digits` fractional digits, rounded
    /// outward so the printed interval still contains the value.
    pub fn to_decimal_bounds(&self, digits: usize) -> (String, String) {
        (
            rational_to_decimal(&self.lo.to_rational(), digits, Round::Down),
            rational_to_decimal(&self.hi.to_rational(), digits, Round::Up),
        )
    }

    /// Significant-digit rendering of the midpoint.
    pub fn to_sci(&self, digits: usize) -> String {
        format!("{:.*e}", digits, self.mid_f64())
    }
}

impl fmt::Debug for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for RealEnclosure {
    type Output = RealEnclosure;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn add(self, rhs: Self) -> RealEnclosure {
        self.add_ref(rhs)
    }
}

impl Sub for RealEnclosure {
    type Output = RealEnclosure;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<'a> Sub<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn sub(self, rhs: Self) -> RealEnclosure {
        self.sub_ref(rhs)
    }
}

impl Mul for RealEnclosure {
    type Output = RealEnclosure;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn mul(self, rhs: Self) -> RealEnclosure {
        self.mul_ref(rhs)
    }
}

impl Neg for RealEnclosure {
    type Output = RealEnclosure;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl Zero for RealEnclosure {
    fn zero() -> Self {
        RealEnclosure::zero(DEFAULT_PRECISION)
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for RealEnclosure {
    fn one() -> Self {
        RealEnclosure::one(DEFAULT_PRECISION)
    }
}
