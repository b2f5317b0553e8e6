//! Elementary functions on enclosures: square root, exponential, logarithm,
//! the circular functions and π. Each series is evaluated in interval
//! arithmetic and its truncation remainder is added as an explicit radius, so
//! every result contains the exact value.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::complex::ComplexEnclosure;
use super::dyadic::{Dyadic, Round};
use super::real::RealEnclosure;
use crate::error::{Error, Result};

const GUARD: u32 = 32;

fn upper_abs(x: &RealEnclosure) -> Dyadic {
    x.lo().abs().max_ref(&x.hi().abs()).clone()
}

fn trim(x: RealEnclosure, prec: u32) -> RealEnclosure {
    RealEnclosure::new(x.lo().round(prec, Round::Down), x.hi().round(prec, Round::Up), prec)
}

fn div_small(x: &RealEnclosure, k: u64) -> RealEnclosure {
    x.div_ref(&RealEnclosure::from_int(k, x.precision()))
        .expect("division by a positive integer")
}

pub fn try_sqrt(x: &RealEnclosure) -> Result<RealEnclosure> {
    if x.hi().is_negative() {
        return Err(Error::Domain("square root of a negative enclosure".into()));
    }
    let prec = x.precision();
    let lo = if x.lo().is_positive() {
        x.lo().sqrt_round(prec, Round::Down)
    } else {
        Dyadic::zero()
    };
    Ok(RealEnclosure::new(lo, x.hi().sqrt_round(prec, Round::Up), prec))
}

/// Square root; negative lower endpoints are clamped to zero.
pub fn sqrt(x: &RealEnclosure) -> RealEnclosure {
    try_sqrt(x).expect("square root of a certainly negative enclosure")
}

fn exp_point(d: &Dyadic, prec: u32) -> RealEnclosure {
    if d.is_zero() {
        return RealEnclosure::one(prec);
    }
    let mb = d.magnitude_bits();
    if d.is_negative() && mb > 40 {
        // e^d < 2^d for d < 0.
        let e = d.floor().to_i64().unwrap_or(i64::MIN / 4).max(i64::MIN / 4);
        return RealEnclosure::new(Dyadic::zero(), Dyadic::pow2(e), prec);
    }
    assert!(mb <= 40, "exponential overflow: argument {d}");
    let s = (mb + 10).max(0) as u32;
    let wp = prec + s + GUARD;
    let r = RealEnclosure::point(d.mul_pow2(-(s as i64)), wp);
    let mut term = RealEnclosure::one(wp);
    let mut sum = RealEnclosure::one(wp);
    let stop = -(wp as i64) - 4;
    let mut k = 1u64;
    loop {
        term = div_small(&term.mul_ref(&r), k);
        sum = sum.add_ref(&term);
        if upper_abs(&term).magnitude_bits() < stop {
            break;
        }
        k += 1;
    }
    // |r| < 2^-10, so the omitted tail is below the last term.
    let mut acc = sum.inflate(&upper_abs(&term));
    for _ in 0..s {
        acc = acc.sqr();
    }
    trim(acc, prec)
}

pub fn exp(x: &RealEnclosure) -> RealEnclosure {
    let prec = x.precision();
    if x.is_point() {
        return exp_point(x.lo(), prec);
    }
    let a = exp_point(x.lo(), prec);
    let b = exp_point(x.hi(), prec);
    RealEnclosure::new(a.lo().clone(), b.hi().clone(), prec)
}

/// `2 * atanh(z)` for an enclosure with `0 <= z <= 1/3`.
fn two_atanh(z: &RealEnclosure, wp: u32) -> RealEnclosure {
    let z2 = z.sqr();
    let mut pow = z.clone();
    let mut sum = z.clone();
    let stop = -(wp as i64) - 4;
    let mut k = 1u64;
    loop {
        pow = pow.mul_ref(&z2);
        sum = sum.add_ref(&div_small(&pow, 2 * k + 1));
        if upper_abs(&pow).magnitude_bits() < stop {
            break;
        }
        k += 1;
    }
    // Tail is below pow * z^2 / (1 - z^2) < pow.
    sum.inflate(&upper_abs(&pow)).mul_pow2(1)
}

pub fn ln2(prec: u32) -> RealEnclosure {
    let wp = prec + GUARD;
    let third = RealEnclosure::one(wp).div_ref(&RealEnclosure::from_int(3, wp)).unwrap();
    trim(two_atanh(&third, wp), prec)
}

fn ln_point(d: &Dyadic, prec: u32) -> RealEnclosure {
    assert!(d.is_positive());
    let b = d.mantissa().bits() as i64;
    let e = d.exponent() + b - 1;
    let wp = prec + GUARD + 64;
    // y in [1, 2)
    let y = RealEnclosure::point(Dyadic::new(d.mantissa().clone(), -(b - 1)), wp);
    let one = RealEnclosure::one(wp);
    let z = y.sub_ref(&one).div_ref(&y.add_ref(&one)).unwrap();
    let ly = if z.is_zero() {
        RealEnclosure::zero(wp)
    } else {
        two_atanh(&z, wp)
    };
    let total = if e == 0 {
        ly
    } else {
        ln2(wp).mul_int(&BigInt::from(e)).add_ref(&ly)
    };
    trim(total, prec)
}

pub fn try_ln(x: &RealEnclosure) -> Result<RealEnclosure> {
    if !x.is_certainly_positive() {
        return Err(Error::Domain("logarithm of an enclosure not certainly positive".into()));
    }
    let prec = x.precision();
    if x.is_point() {
        return Ok(ln_point(x.lo(), prec));
    }
    let a = ln_point(x.lo(), prec);
    let b = ln_point(x.hi(), prec);
    Ok(RealEnclosure::new(a.lo().clone(), b.hi().clone(), prec))
}

pub fn ln(x: &RealEnclosure) -> RealEnclosure {
    try_ln(x).expect("logarithm of a non-positive enclosure")
}

/// `atan(1/q)` for an integer `q >= 2`.
fn atan_inv(q: u64, wp: u32) -> RealEnclosure {
    let x = RealEnclosure::one(wp).div_ref(&RealEnclosure::from_int(q, wp)).unwrap();
    alternating_atan(&x, wp)
}

/// Alternating series for `|x| < 1`.
fn alternating_atan(x: &RealEnclosure, wp: u32) -> RealEnclosure {
    let x2 = x.sqr();
    let mut pow = x.clone();
    let mut sum = x.clone();
    let stop = -(wp as i64) - 4;
    let mut k = 1u64;
    loop {
        pow = pow.mul_ref(&x2);
        let t = div_small(&pow, 2 * k + 1);
        sum = if k % 2 == 1 { sum.sub_ref(&t) } else { sum.add_ref(&t) };
        if upper_abs(&pow).magnitude_bits() < stop {
            break;
        }
        k += 1;
    }
    sum.inflate(&upper_abs(&pow))
}

pub fn pi(prec: u32) -> RealEnclosure {
    let wp = prec + GUARD;
    let a = atan_inv(5, wp).mul_int(&BigInt::from(16));
    let b = atan_inv(239, wp).mul_int(&BigInt::from(4));
    trim(a.sub_ref(&b), prec)
}

fn atan_point(d: &Dyadic, prec: u32) -> RealEnclosure {
    if d.is_zero() {
        return RealEnclosure::zero(prec);
    }
    let wp = prec + GUARD;
    let x = RealEnclosure::point(d.clone(), wp);
    if d.abs() > Dyadic::one() {
        let half_pi = pi(wp).mul_pow2(-1);
        let inner = atan_point_small(&x.recip().unwrap(), wp);
        let r = if d.is_positive() {
            half_pi.sub_ref(&inner)
        } else {
            half_pi.neg_ref().sub_ref(&inner)
        };
        return trim(r, prec);
    }
    trim(atan_point_small(&x, wp), prec)
}

/// `atan` for `|x| <= 1` via argument halving.
fn atan_point_small(x: &RealEnclosure, wp: u32) -> RealEnclosure {
    let mut y = x.clone();
    let one = RealEnclosure::one(wp);
    let mut halvings = 0i64;
    while upper_abs(&y).magnitude_bits() > -8 {
        let s = sqrt(&one.add_ref(&y.sqr()));
        y = y.div_ref(&one.add_ref(&s)).unwrap();
        halvings += 1;
    }
    alternating_atan(&y, wp).mul_pow2(halvings)
}

pub fn atan(x: &RealEnclosure) -> RealEnclosure {
    let prec = x.precision();
    if x.is_point() {
        return atan_point(x.lo(), prec);
    }
    let a = atan_point(x.lo(), prec);
    let b = atan_point(x.hi(), prec);
    RealEnclosure::new(a.lo().clone(), b.hi().clone(), prec)
}

fn clamp_unit(x: RealEnclosure) -> RealEnclosure {
    let prec = x.precision();
    let one = Dyadic::one();
    let m1 = one.neg();
    let lo = x.lo().max_ref(&m1).clone();
    let hi = x.hi().min_ref(&one).clone();
    if lo > hi {
        return x;
    }
    RealEnclosure::new(lo, hi, prec)
}

/// Taylor series of sin and cos for an enclosure of modest magnitude.
fn sin_cos_small(r: &RealEnclosure, wp: u32) -> (RealEnclosure, RealEnclosure) {
    let m = upper_abs(r);
    let mut term = RealEnclosure::one(wp);
    let mut sin = RealEnclosure::zero(wp);
    let mut cos = RealEnclosure::zero(wp);
    let mut bound = RealEnclosure::one(wp);
    let mpt = RealEnclosure::point(m, wp);
    let stop = -(wp as i64) - 4;
    let mut k = 0u64;
    loop {
        match k % 4 {
            0 => cos = cos.add_ref(&term),
            1 => sin = sin.add_ref(&term),
            2 => cos = cos.sub_ref(&term),
            _ => sin = sin.sub_ref(&term),
        }
        k += 1;
        term = div_small(&term.mul_ref(r), k);
        bound = div_small(&bound.mul_ref(&mpt), k);
        if k > 4 && upper_abs(&bound).magnitude_bits() < stop {
            break;
        }
    }
    // Lagrange remainder: |R_k| <= M^k / k!.
    let tail = upper_abs(&bound);
    (sin.inflate(&tail), cos.inflate(&tail))
}

pub fn sin_cos(x: &RealEnclosure) -> (RealEnclosure, RealEnclosure) {
    let prec = x.precision();
    let mb = upper_abs(x).magnitude_bits().max(0) as u32;
    let wp = prec + GUARD + mb;
    let half_pi = pi(wp).mul_pow2(-1);
    let xm = x.clone().with_precision(wp);
    let q = xm
        .mid()
        .div_round(half_pi.lo(), wp, Round::Down)
        .add(&Dyadic::pow2(-1))
        .floor();
    let r = xm.sub_ref(&half_pi.mul_int(&q));
    let (s, c) = sin_cos_small(&r, wp);
    let quadrant = q.mod_floor_4();
    let (s, c) = match quadrant {
        0 => (s, c),
        1 => (c, s.neg_ref()),
        2 => (s.neg_ref(), c.neg_ref()),
        _ => (c.neg_ref(), s),
    };
    (clamp_unit(trim(s, prec)), clamp_unit(trim(c, prec)))
}

trait ModFour {
    fn mod_floor_4(&self) -> u8;
}

impl ModFour for BigInt {
    fn mod_floor_4(&self) -> u8 {
        let r = num_integer::Integer::mod_floor(self, &BigInt::from(4));
        r.to_u8().unwrap()
    }
}

pub fn sin(x: &RealEnclosure) -> RealEnclosure {
    sin_cos(x).0
}

pub fn cos(x: &RealEnclosure) -> RealEnclosure {
    sin_cos(x).1
}

/// `e^z` for a complex enclosure.
pub fn exp_complex(z: &ComplexEnclosure) -> ComplexEnclosure {
    let m = exp(&z.re);
    if z.im.is_zero() {
        return ComplexEnclosure::real(m);
    }
    let (s, c) = sin_cos(&z.im);
    ComplexEnclosure::new(m.mul_ref(&c), m.mul_ref(&s))
}

/// `e^{2πi t}` for a real enclosure `t`.
pub fn unit_root_of_turns(t: &RealEnclosure) -> ComplexEnclosure {
    let prec = t.precision();
    let angle = pi(prec + 8).mul_pow2(1).mul_ref(t);
    let (s, c) = sin_cos(&angle.with_precision(prec));
    ComplexEnclosure::new(c, s)
}

/// Argument of a complex enclosure bounded away from zero, in `(-π, 3π/2)`.
///
/// The branch is continuous on the box, so boxes straddling the negative real
/// axis are handled by shifting the principal branch by π.
pub fn arg(z: &ComplexEnclosure) -> Result<RealEnclosure> {
    let prec = z.precision();
    if z.re.is_certainly_positive() {
        return Ok(atan(&z.im.div_ref(&z.re)?));
    }
    let half_pi = pi(prec).mul_pow2(-1);
    if z.im.is_certainly_positive() {
        return Ok(half_pi.sub_ref(&atan(&z.re.div_ref(&z.im)?)));
    }
    if z.im.is_certainly_negative() {
        return Ok(half_pi.neg_ref().sub_ref(&atan(&z.re.div_ref(&z.im)?)));
    }
    if z.re.is_certainly_negative() {
        return Ok(pi(prec).add_ref(&atan(&z.im.div_ref(&z.re)?)));
    }
    Err(Error::DivisionByUncertainZero)
}

/// Exact integer power of a real enclosure with big exponent, allowing
/// negative exponents.
pub fn powi_big(x: &RealEnclosure, n: &BigInt) -> Result<RealEnclosure> {
    if n.is_negative() {
        return Ok(x.recip()?.pow_big(&-n));
    }
    if n.is_zero() {
        return Ok(RealEnclosure::one(x.precision()));
    }
    Ok(x.pow_big(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn approx(x: &RealEnclosure, v: f64, tol: f64) {
        assert!((x.mid_f64() - v).abs() < tol, "value {:?} not near {v}", x);
    }

    #[test]
    fn pi_digits() {
        let p = pi(200);
        approx(&p, std::f64::consts::PI, 1e-15);
        assert!(p.width().magnitude_bits() < -190);
        // 3.14159265358979323846264338327950288...
        let q = BigRational::new(
            BigInt::parse_bytes(b"314159265358979323846264338327950288", 10).unwrap(),
            BigInt::from(10u32).pow(35),
        );
        let r = BigRational::new(
            BigInt::parse_bytes(b"314159265358979323846264338327950289", 10).unwrap(),
            BigInt::from(10u32).pow(35),
        );
        assert!(p.lo().to_rational() > q && p.hi().to_rational() < r);
    }

    #[test]
    fn exp_log_consistency() {
        let x = RealEnclosure::from_rational(&BigRational::new(7.into(), 3.into()), 160);
        let y = ln(&exp(&x));
        assert!(y.contains_rational(&BigRational::new(7.into(), 3.into())));
        assert!(y.width().magnitude_bits() < -140);
        approx(&exp(&RealEnclosure::one(80)), std::f64::consts::E, 1e-15);
        approx(&ln2(128), std::f64::consts::LN_2, 1e-16);
        approx(&ln(&RealEnclosure::from_int(3, 100)), 3f64.ln(), 1e-15);
    }

    #[test]
    fn very_negative_exponent_is_tiny() {
        let x = RealEnclosure::from_int(-(1i64 << 50), 64);
        let y = exp(&x);
        assert!(y.contains_zero() && y.hi().magnitude_bits() < -(1i64 << 49));
    }

    #[test]
    fn circular_functions() {
        let x = RealEnclosure::from_rational(&BigRational::new(1.into(), 2.into()), 128);
        let (s, c) = sin_cos(&x);
        approx(&s, 0.5f64.sin(), 1e-15);
        approx(&c, 0.5f64.cos(), 1e-15);
        let big = RealEnclosure::from_int(1_000_003, 128);
        approx(&sin(&big), 1_000_003f64.sin(), 1e-9);
        let one = s.sqr().add_ref(&c.sqr());
        assert!(one.contains_rational(&BigRational::from_integer(1.into())));
        approx(&atan(&RealEnclosure::from_int(3, 100)), 3f64.atan(), 1e-15);
        approx(&atan(&RealEnclosure::from_f64(-0.3, 100)), (-0.3f64).atan(), 1e-15);
    }

    #[test]
    fn argument_quadrants() {
        for (re, im) in [(1.0, 1.0), (-1.0, 0.5), (-1.0, -0.5), (0.2, -3.0), (-2.0, 0.0)] {
            let z = ComplexEnclosure::from_f64(re, im, 100);
            let a = arg(&z).unwrap().mid_f64();
            let want = f64::atan2(im, re);
            let tau = 2.0 * std::f64::consts::PI;
            let diff = (a - want).rem_euclid(tau);
            assert!(diff.min(tau - diff) < 1e-12, "{re} {im}: {a} vs {want}");
        }
    }
}
