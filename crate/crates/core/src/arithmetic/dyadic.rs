use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Direction for a rounded operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// An exact binary fraction `mant * 2^exp`.
///
/// The mantissa is kept odd (or the value is zero with exponent 0), so equal
/// values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn shift_floor(m: &BigInt, k: u64) -> BigInt {
    if m.sign() == Sign::Minus {
        let mag = -m;
        let q = (&mag + ((BigInt::one() << k) - 1u32)) >> k;
        -q
    } else {
        m >> k
    }
}

fn shift_ceil(m: &BigInt, k: u64) -> BigInt {
    -shift_floor(&-m, k)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: k,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Smallest `e` with `|self| < 2^e` (0 for zero).
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 4;
        }
        self.exp + self.mant.bits() as i64
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    /// Round to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let k = bits - prec as u64;
        let m = match dir {
            Round::Down => shift_floor(&self.mant, k),
            Round::Up => shift_ceil(&self.mant, k),
        };
        Self::new(m, self.exp + k as i64)
    }

    /// Rounded quotient `self / other` with `prec` significant bits.
    pub fn div_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let (num, den) = if shift >= 0 {
            (&self.mant << shift as u64, other.mant.clone())
        } else {
            (self.mant.clone(), &other.mant << (-shift) as u64)
        };
        let q = match dir {
            Round::Down => num.div_floor(&den),
            Round::Up => num.div_ceil(&den),
        };
        Self::new(q, self.exp - other.exp - shift).round(prec, dir)
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        Self::from_int(r.numer().clone()).div_round(&Self::from_int(r.denom().clone()), prec, dir)
    }

    /// Exact conversion when the rational is dyadic.
    pub fn try_from_rational(r: &BigRational) -> Option<Self> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz) == BigInt::one() {
            Some(Self::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_ceil(&self.mant, (-self.exp) as u64)
        }
    }

    /// Square root of a non-negative value rounded to `prec` bits.
    pub fn sqrt_round(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let bits = self.mant.bits() as i64;
        let mut shift = 2 * prec as i64 + 4 - bits;
        if shift < 0 {
            shift = 0;
        }
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as u64;
        let mut s = m.sqrt();
        if dir == Round::Up && &s * &s < m {
            s += 1u32;
        }
        Self::new(s, (self.exp - shift) / 2).round(prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let keep = 60i64;
        let (m, e) = if bits > keep {
            (shift_floor(&self.mant, (bits - keep) as u64), self.exp + bits - keep)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        if e > 2000 {
            return mf.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let half = (e / 2) as i32;
        mf * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exp_bits == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, exp_bits - 1075)
        };
        Self::new(BigInt::from(sign * m), e)
    }

    pub fn max_ref<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min_ref<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes cheaply first.
        let (ma, mb) = (self.magnitude_bits(), other.magnitude_bits());
        if ma != mb {
            let mag = ma.cmp(&mb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        self.sub(other).signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

/// Render a rational as a decimal string with `digits` digits after the point,
/// rounded in the given direction.
pub fn rational_to_decimal(r: &BigRational, digits: usize, dir: Round) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * BigRational::from_integer(scale);
    let n = match dir {
        Round::Down => scaled.floor().to_integer(),
        Round::Up => scaled.ceil().to_integer(),
    };
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = "0".repeat(digits + 1 - s.len()) + &s;
        }
        let p = s.len() - digits;
        s.insert(p, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalizes_trailing_zeros() {
        assert_eq!(Dyadic::from_int(12), Dyadic::new(BigInt::from(3), 2));
    }

    #[test]
    fn directed_division_brackets_quotient() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = one.div_round(&three, 53, Round::Down);
        let hi = one.div_round(&three, 53, Round::Up);
        let third = rat(1, 3);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert!(lo.to_rational() > third.clone() - rat(1, 1 << 52));
    }

    #[test]
    fn floor_and_ceil_of_negative() {
        let x = Dyadic::new(BigInt::from(-5), -1); // -2.5
        assert_eq!(x.floor(), BigInt::from(-3));
        assert_eq!(x.ceil(), BigInt::from(-2));
        let y = Dyadic::new(BigInt::from(-5), -1).round(2, Round::Down);
        assert_eq!(y.to_rational(), rat(-3, 1));
    }

    #[test]
    fn sqrt_brackets() {
        let two = Dyadic::from_int(2);
        let lo = two.sqrt_round(100, Round::Down);
        let hi = two.sqrt_round(100, Round::Up);
        assert!(lo.mul(&lo) < two && two < hi.mul(&hi));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&rat(-3, 2), 3, Round::Down), "-1.500");
        assert_eq!(rational_to_decimal(&rat(1, 3), 4, Round::Up), "0.3334");
        assert_eq!(rational_to_decimal(&rat(1, 300), 2, Round::Down), "0.00");
    }

    #[test]
    fn f64_round_trip() {
        for x in [0.1, -3.75, 1e-300, 123456.789] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }
}
