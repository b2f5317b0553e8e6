use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::real::{RealEnclosure, DEFAULT_PRECISION};
use crate::error::{Error, Result};

/// A rectangle `re × im` in the complex plane.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexEnclosure {
    pub re: RealEnclosure,
    pub im: RealEnclosure,
}

impl ComplexEnclosure {
    pub fn new(re: RealEnclosure, im: RealEnclosure) -> Self {
        ComplexEnclosure { re, im }
    }

    pub fn real(re: RealEnclosure) -> Self {
        let prec = re.precision();
        ComplexEnclosure {
            re,
            im: RealEnclosure::zero(prec),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::real(RealEnclosure::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::real(RealEnclosure::one(prec))
    }

    pub fn i(prec: u32) -> Self {
        ComplexEnclosure {
            re: RealEnclosure::zero(prec),
            im: RealEnclosure::one(prec),
        }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        ComplexEnclosure {
            re: RealEnclosure::from_rational(re, prec),
            im: RealEnclosure::from_rational(im, prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexEnclosure {
            re: RealEnclosure::from_f64(re, prec),
            im: RealEnclosure::from_f64(im, prec),
        }
    }

    pub fn precision(&self) -> u32 {
        self.re.precision().max(self.im.precision())
    }

    pub fn with_precision(self, prec: u32) -> Self {
        ComplexEnclosure {
            re: self.re.with_precision(prec),
            im: self.im.with_precision(prec),
        }
    }

    pub fn is_point(&self) -> bool {
        self.re.is_point() && self.im.is_point()
    }

    pub fn is_real_exact(&self) -> bool {
        self.im.is_point() && self.im.lo().is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn contains_rationals(&self, re: &BigRational, im: &BigRational) -> bool {
        self.re.contains_rational(re) && self.im.contains_rational(im)
    }

    pub fn encloses(&self, other: &Self) -> bool {
        self.re.encloses(&other.re) && self.im.encloses(&other.im)
    }

    pub fn strictly_encloses(&self, other: &Self) -> bool {
        self.re.strictly_encloses(&other.re) && self.im.strictly_encloses(&other.im)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn hull(&self, other: &Self) -> Self {
        ComplexEnclosure {
            re: self.re.hull(&other.re),
            im: self.im.hull(&other.im),
        }
    }

    /// Larger of the two side widths.
    pub fn width(&self) -> Dyadic {
        self.re.width().max_ref(&self.im.width()).clone()
    }

    pub fn mid(&self) -> (Dyadic, Dyadic) {
        (self.re.mid(), self.im.mid())
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }

    /// The midpoint as a point enclosure (used for floating iterations).
    pub fn mid_point(&self) -> Self {
        let prec = self.precision();
        let (a, b) = self.mid();
        ComplexEnclosure {
            re: RealEnclosure::point(a.round(prec + 8, super::Round::Down), prec),
            im: RealEnclosure::point(b.round(prec + 8, super::Round::Down), prec),
        }
    }

    pub fn inflate(&self, r: &Dyadic) -> Self {
        ComplexEnclosure {
            re: self.re.inflate(r),
            im: self.im.inflate(r),
        }
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        ComplexEnclosure {
            re: self.re.add_ref(&o.re),
            im: self.im.add_ref(&o.im),
        }
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        ComplexEnclosure {
            re: self.re.sub_ref(&o.re),
            im: self.im.sub_ref(&o.im),
        }
    }

    pub fn neg_ref(&self) -> Self {
        ComplexEnclosure {
            re: self.re.neg_ref(),
            im: self.im.neg_ref(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexEnclosure {
            re: self.re.clone(),
            im: self.im.neg_ref(),
        }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.is_real_exact() && o.is_real_exact() {
            return Self::real(self.re.mul_ref(&o.re));
        }
        ComplexEnclosure {
            re: self.re.mul_ref(&o.re).sub_ref(&self.im.mul_ref(&o.im)),
            im: self.re.mul_ref(&o.im).add_ref(&self.im.mul_ref(&o.re)),
        }
    }

    pub fn scale(&self, r: &RealEnclosure) -> Self {
        ComplexEnclosure {
            re: self.re.mul_ref(r),
            im: self.im.mul_ref(r),
        }
    }

    pub fn sqr(&self) -> Self {
        if self.is_real_exact() {
            return Self::real(self.re.sqr());
        }
        let two_ab = self.re.mul_ref(&self.im).mul_pow2(1);
        ComplexEnclosure {
            re: self.re.sqr().sub_ref(&self.im.sqr()),
            im: two_ab,
        }
    }

    pub fn abs_sq(&self) -> RealEnclosure {
        self.re.sqr().add_ref(&self.im.sqr())
    }

    pub fn abs(&self) -> RealEnclosure {
        if self.is_real_exact() {
            return self.re.abs();
        }
        super::elementary::sqrt(&self.abs_sq())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_real_exact() {
            return Ok(Self::real(self.re.recip()?));
        }
        let n = self.abs_sq();
        if n.contains_zero() {
            return Err(Error::DivisionByUncertainZero);
        }
        let c = self.conj();
        Ok(ComplexEnclosure {
            re: c.re.div_ref(&n)?,
            im: c.im.div_ref(&n)?,
        })
    }

    pub fn div_ref(&self, o: &Self) -> Result<Self> {
        if o.is_real_exact() {
            return Ok(ComplexEnclosure {
                re: self.re.div_ref(&o.re)?,
                im: self.im.div_ref(&o.re)?,
            });
        }
        Ok(self.mul_ref(&o.recip()?))
    }

    pub fn pow_big(&self, n: &BigInt) -> Result<Self> {
        if n.is_negative() {
            return self.recip()?.pow_big(&-n);
        }
        let mut result = Self::one(self.precision());
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
        Ok(result)
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        self.pow_big(&BigInt::from(n))
    }
}

impl fmt::Debug for ComplexEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + {:?}i", self.re, self.im)
    }
}

impl Add for ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a ComplexEnclosure> for &'a ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn add(self, rhs: Self) -> ComplexEnclosure {
        self.add_ref(rhs)
    }
}

impl Sub for ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<'a> Sub<&'a ComplexEnclosure> for &'a ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn sub(self, rhs: Self) -> ComplexEnclosure {
        self.sub_ref(rhs)
    }
}

impl Mul for ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a ComplexEnclosure> for &'a ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn mul(self, rhs: Self) -> ComplexEnclosure {
        self.mul_ref(rhs)
    }
}

impl Neg for ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl Zero for ComplexEnclosure {
    fn zero() -> Self {
        ComplexEnclosure::zero(DEFAULT_PRECISION)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ComplexEnclosure {
    fn one() -> Self {
        ComplexEnclosure::one(DEFAULT_PRECISION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn powers_of_i_are_exact() {
        let i = ComplexEnclosure::i(64);
        let i4 = i.powi(4).unwrap();
        assert!(i4.is_point());
        assert!(i4.contains_rationals(&q(1, 1), &q(0, 1)));
        let im1 = i.powi(-1).unwrap();
        assert!(im1.contains_rationals(&q(0, 1), &q(-1, 1)));
    }

    #[test]
    fn division_contains_quotient() {
        let a = ComplexEnclosure::from_rationals(&q(4, 5), &q(3, 5), 128);
        let b = a.conj();
        let c = a.div_ref(&b).unwrap();
        // (4+3i)/(4-3i) = (7+24i)/25
        assert!(c.contains_rationals(&q(7, 25), &q(24, 25)));
    }

    #[test]
    fn modulus_of_pythagorean_point() {
        let a = ComplexEnclosure::from_rationals(&q(4, 5), &q(3, 5), 128);
        assert!(a.abs().contains_rational(&q(1, 1)));
    }
}

/// Serialised rectangle: `re = [lo, hi]`, `im = [lo, hi]` as number strings.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoxJson {
    pub re: [String; 2],
    pub im: [String; 2],
}

impl ComplexEnclosure {
    /// Exact dyadic bounds as rationals, or outward decimals with `digits`
    /// fractional digits.
    pub fn to_box_json(&self, digits: Option<usize>) -> BoxJson {
        let side = |x: &RealEnclosure| -> [String; 2] {
            match digits {
                Some(d) => {
                    let (lo, hi) = x.to_decimal_bounds(d);
                    [lo, hi]
                }
                None => {
                    let (lo, hi) = x.to_rationals();
                    [crate::exact::format_rational(&lo), crate::exact::format_rational(&hi)]
                }
            }
        };
        BoxJson {
            re: side(&self.re),
            im: side(&self.im),
        }
    }

    pub fn from_box_json(b: &BoxJson, prec: u32) -> Result<Self> {
        let side = |s: &[String; 2]| -> Result<RealEnclosure> {
            let lo = crate::exact::parse_rational(&s[0])?;
            let hi = crate::exact::parse_rational(&s[1])?;
            if lo > hi {
                return Err(Error::InvalidInput(format!("empty interval [{}, {}]", s[0], s[1])));
            }
            Ok(RealEnclosure::from_rational(&lo, prec).hull(&RealEnclosure::from_rational(&hi, prec)))
        };
        Ok(ComplexEnclosure::new(side(&b.re)?, side(&b.im)?))
    }
}
