//! Expression DAGs evaluated to certified enclosures.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{BoxJson, ComplexEnclosure};
use super::dyadic::Dyadic;
use super::elementary;
use super::policy::PrecisionPolicy;
use super::real::RealEnclosure;
use crate::algebraic::number::{AlgebraicJson, AlgebraicNumber};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};

/// Exponents above this size skip the exact path.
const EXACT_POW_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(BigRational),
    Algebraic(Arc<AlgebraicNumber>),
    /// A caller-supplied enclosure, used as is at every precision.
    Enclosure(ComplexEnclosure),
    I,
    Pi,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, BigInt),
    Sqrt(Arc<Expr>),
    Exp(Arc<Expr>),
    Ln(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Re(Arc<Expr>),
    Im(Arc<Expr>),
    Conj(Arc<Expr>),
    Abs(Arc<Expr>),
}

type Gauss = (BigRational, BigRational);

fn gmul(a: &Gauss, b: &Gauss) -> Gauss {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gdiv(a: &Gauss, b: &Gauss) -> Option<Gauss> {
    let n = &b.0 * &b.0 + &b.1 * &b.1;
    if n.is_zero() {
        return None;
    }
    let c = (b.0.clone(), -b.1.clone());
    let p = gmul(a, &c);
    Some((p.0 / &n, p.1 / &n))
}

fn gpow(a: &Gauss, n: &BigInt) -> Option<Gauss> {
    if n.is_negative() {
        let inv = gdiv(&(BigRational::one(), BigRational::zero()), a)?;
        return gpow(&inv, &-n);
    }
    let mut result = (BigRational::one(), BigRational::zero());
    let mut base = a.clone();
    let bits = n.bits();
    for i in 0..bits {
        if n.bit(i) {
            result = gmul(&result, &base);
        }
        if i + 1 < bits {
            base = gmul(&base, &base);
        }
    }
    Some(result)
}

impl Expr {
    pub fn int<T: Into<BigInt>>(v: T) -> Arc<Expr> {
        Arc::new(Expr::Rational(BigRational::from_integer(v.into())))
    }

    pub fn rational(r: BigRational) -> Arc<Expr> {
        Arc::new(Expr::Rational(r))
    }

    pub fn algebraic(a: AlgebraicNumber) -> Arc<Expr> {
        Arc::new(Expr::Algebraic(Arc::new(a)))
    }

    pub fn add(a: &Arc<Expr>, b: &Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Add(a.clone(), b.clone()))
    }

    pub fn sub(a: &Arc<Expr>, b: &Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Sub(a.clone(), b.clone()))
    }

    pub fn mul(a: &Arc<Expr>, b: &Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Mul(a.clone(), b.clone()))
    }

    pub fn div(a: &Arc<Expr>, b: &Arc<Expr>) -> Arc<Expr> {
        Arc::new(Expr::Div(a.clone(), b.clone()))
    }

    pub fn pow(a: &Arc<Expr>, n: impl Into<BigInt>) -> Arc<Expr> {
        Arc::new(Expr::Pow(a.clone(), n.into()))
    }

    pub fn unary(f: fn(Arc<Expr>) -> Expr, a: &Arc<Expr>) -> Arc<Expr> {
        Arc::new(f(a.clone()))
    }

    /// Exact value in `Q(i)` when every leaf is rational or `i`.
    pub fn exact(&self) -> Option<Gauss> {
        let zero = BigRational::zero;
        Some(match self {
            Expr::Rational(r) => (r.clone(), zero()),
            Expr::Algebraic(a) => (a.as_rational()?, zero()),
            Expr::I => (zero(), BigRational::one()),
            Expr::Add(a, b) => {
                let (x, y) = (a.exact()?, b.exact()?);
                (x.0 + y.0, x.1 + y.1)
            }
            Expr::Sub(a, b) => {
                let (x, y) = (a.exact()?, b.exact()?);
                (x.0 - y.0, x.1 - y.1)
            }
            Expr::Mul(a, b) => gmul(&a.exact()?, &b.exact()?),
            Expr::Div(a, b) => gdiv(&a.exact()?, &b.exact()?)?,
            Expr::Neg(a) => {
                let x = a.exact()?;
                (-x.0, -x.1)
            }
            Expr::Pow(a, n) => {
                if n.magnitude() > &EXACT_POW_LIMIT.into() {
                    return None;
                }
                gpow(&a.exact()?, n)?
            }
            Expr::Re(a) => (a.exact()?.0, zero()),
            Expr::Im(a) => (a.exact()?.1, zero()),
            Expr::Conj(a) => {
                let x = a.exact()?;
                (x.0, -x.1)
            }
            Expr::Abs(a) => {
                let x = a.exact()?;
                if !x.1.is_zero() {
                    return None;
                }
                (x.0.abs(), zero())
            }
            _ => return None,
        })
    }

    /// Enclosure at working precision `prec`.
    pub fn eval_at(self: &Arc<Self>, prec: u32) -> Result<ComplexEnclosure> {
        let mut memo = HashMap::new();
        eval_node(self, prec, &mut memo)
    }
}

fn real_only(z: ComplexEnclosure, what: &str) -> Result<RealEnclosure> {
    if z.im.is_point() && z.im.lo().is_zero() {
        Ok(z.re)
    } else {
        Err(Error::Domain(format!("{what} of a non-real enclosure")))
    }
}

fn complex_sqrt(z: ComplexEnclosure) -> Result<ComplexEnclosure> {
    if z.is_real_exact() {
        if z.re.hi().is_negative() {
            let r = elementary::try_sqrt(&z.re.neg_ref())?;
            return Ok(ComplexEnclosure::new(RealEnclosure::zero(z.precision()), r));
        }
        return Ok(ComplexEnclosure::real(elementary::try_sqrt(&z.re)?));
    }
    if !(z.re.is_certainly_positive() || z.im.excludes_zero()) {
        return Err(Error::Domain("square root near the branch cut".into()));
    }
    let m = z.abs();
    let a = elementary::try_sqrt(
        &m.add_ref(&z.re)
            .max_with(&RealEnclosure::zero(m.precision()))
            .mul_pow2(-1),
    )?;
    let b = elementary::try_sqrt(
        &m.sub_ref(&z.re)
            .max_with(&RealEnclosure::zero(m.precision()))
            .mul_pow2(-1),
    )?;
    let b = if z.im.is_certainly_negative() { b.neg_ref() } else { b };
    Ok(ComplexEnclosure::new(a, b))
}

fn eval_node(e: &Arc<Expr>, prec: u32, memo: &mut HashMap<*const Expr, ComplexEnclosure>) -> Result<ComplexEnclosure> {
    let key = Arc::as_ptr(e);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let mut ev = |x: &Arc<Expr>| eval_node(x, prec, memo);
    let v = match e.as_ref() {
        Expr::Rational(r) => ComplexEnclosure::from_rationals(r, &BigRational::zero(), prec),
        Expr::Algebraic(a) => a.enclosure(prec),
        Expr::Enclosure(z) => z.clone(),
        Expr::I => ComplexEnclosure::i(prec),
        Expr::Pi => ComplexEnclosure::real(elementary::pi(prec)),
        Expr::Add(a, b) => ev(a)?.add_ref(&ev(b)?),
        Expr::Sub(a, b) => ev(a)?.sub_ref(&ev(b)?),
        Expr::Mul(a, b) => ev(a)?.mul_ref(&ev(b)?),
        Expr::Div(a, b) => ev(a)?.div_ref(&ev(b)?)?,
        Expr::Neg(a) => ev(a)?.neg_ref(),
        Expr::Pow(a, n) => {
            // Powers amplify relative error by about |n|.
            let extra = n.magnitude().bits() as u32 + 8;
            let base = eval_node(a, prec + extra, memo)?;
            base.pow_big(n)?.with_precision(prec)
        }
        Expr::Sqrt(a) => complex_sqrt(ev(a)?)?,
        Expr::Exp(a) => {
            let z = ev(a)?;
            // Cancellation at low precision can leave an argument too wide to exponentiate.
            if z.re.hi().is_positive() && z.re.hi().magnitude_bits() > 40 {
                return Err(Error::cap(prec, "exponential of a wide argument"));
            }
            elementary::exp_complex(&z)
        }
        Expr::Ln(a) => {
            let z = ev(a)?;
            if z.is_real_exact() {
                ComplexEnclosure::real(elementary::try_ln(&z.re)?)
            } else {
                if z.re.is_certainly_negative() && z.im.contains_zero() {
                    return Err(Error::Domain("logarithm near the branch cut".into()));
                }
                ComplexEnclosure::new(elementary::try_ln(&z.abs())?, elementary::arg(&z)?)
            }
        }
        Expr::Sin(a) => ComplexEnclosure::real(elementary::sin(&real_only(ev(a)?, "sine")?)),
        Expr::Cos(a) => ComplexEnclosure::real(elementary::cos(&real_only(ev(a)?, "cosine")?)),
        Expr::Re(a) => ComplexEnclosure::real(ev(a)?.re),
        Expr::Im(a) => ComplexEnclosure::real(ev(a)?.im),
        Expr::Conj(a) => ev(a)?.conj(),
        Expr::Abs(a) => ComplexEnclosure::real(ev(a)?.abs()),
    };
    memo.insert(key, v.clone());
    Ok(v)
}

/// Result of [`eval_enclosure`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub value: ComplexEnclosure,
    /// Exact value when the rational fast path applied.
    pub exact: Option<(BigRational, BigRational)>,
    pub precision: u32,
    /// The target radius was not reached before the cap.
    pub capped: bool,
}

/// Evaluates with precision escalation until the enclosure radius is at most
/// `target_radius` (when given). Division by an enclosure containing zero is
/// retried at higher precision and reported only at the cap.
pub fn eval_enclosure(
    expr: &Arc<Expr>,
    policy: &PrecisionPolicy,
    target_radius: Option<&Dyadic>,
) -> Result<EvalOutcome> {
    if let Some((re, im)) = expr.exact() {
        let value = ComplexEnclosure::from_rationals(&re, &im, policy.initial);
        return Ok(EvalOutcome {
            value,
            exact: Some((re, im)),
            precision: policy.initial,
            capped: false,
        });
    }
    let mut last: Option<(ComplexEnclosure, u32)> = None;
    let mut last_err = None;
    for prec in policy.schedule() {
        match expr.eval_at(prec) {
            Ok(v) => {
                let ok = match target_radius {
                    None => true,
                    Some(t) => v.width().mul_pow2(-1) <= *t,
                };
                if ok {
                    return Ok(EvalOutcome {
                        value: v,
                        exact: None,
                        precision: prec,
                        capped: false,
                    });
                }
                last = Some((v, prec));
            }
            Err(e) if e == Error::DivisionByUncertainZero || e.is_precision() => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match last {
        Some((value, precision)) => Ok(EvalOutcome {
            value,
            exact: None,
            precision,
            capped: true,
        }),
        None => Err(last_err.unwrap_or_else(|| Error::cap(policy.cap, "evaluation"))),
    }
}

/// JSON tree form of an expression; exact numbers are strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExprJson {
    Rational(String),
    Algebraic(AlgebraicJson),
    Enclosure(BoxJson),
    I,
    Pi,
    Add(Box<ExprJson>, Box<ExprJson>),
    Sub(Box<ExprJson>, Box<ExprJson>),
    Mul(Box<ExprJson>, Box<ExprJson>),
    Div(Box<ExprJson>, Box<ExprJson>),
    Neg(Box<ExprJson>),
    Pow(Box<ExprJson>, String),
    Sqrt(Box<ExprJson>),
    Exp(Box<ExprJson>),
    Ln(Box<ExprJson>),
    Sin(Box<ExprJson>),
    Cos(Box<ExprJson>),
    Re(Box<ExprJson>),
    Im(Box<ExprJson>),
    Conj(Box<ExprJson>),
    Abs(Box<ExprJson>),
}

impl ExprJson {
    pub fn to_expr(&self) -> Result<Arc<Expr>> {
        use ExprJson as J;
        let b = |x: &ExprJson| x.to_expr();
        Ok(Arc::new(match self {
            J::Rational(s) => Expr::Rational(parse_rational(s)?),
            J::Algebraic(a) => Expr::Algebraic(Arc::new(AlgebraicNumber::from_json(a)?)),
            J::Enclosure(b) => {
                let prec = b.re.iter().chain(&b.im).map(|s| s.len() as u32 * 4).max().unwrap_or(0);
                Expr::Enclosure(ComplexEnclosure::from_box_json(b, prec.max(64))?)
            }
            J::I => Expr::I,
            J::Pi => Expr::Pi,
            J::Add(x, y) => Expr::Add(b(x)?, b(y)?),
            J::Sub(x, y) => Expr::Sub(b(x)?, b(y)?),
            J::Mul(x, y) => Expr::Mul(b(x)?, b(y)?),
            J::Div(x, y) => Expr::Div(b(x)?, b(y)?),
            J::Neg(x) => Expr::Neg(b(x)?),
            J::Pow(x, n) => {
                let r = parse_rational(n)?;
                if !r.is_integer() {
                    return Err(Error::InvalidInput(format!("non-integer exponent {n}")));
                }
                Expr::Pow(b(x)?, r.to_integer())
            }
            J::Sqrt(x) => Expr::Sqrt(b(x)?),
            J::Exp(x) => Expr::Exp(b(x)?),
            J::Ln(x) => Expr::Ln(b(x)?),
            J::Sin(x) => Expr::Sin(b(x)?),
            J::Cos(x) => Expr::Cos(b(x)?),
            J::Re(x) => Expr::Re(b(x)?),
            J::Im(x) => Expr::Im(b(x)?),
            J::Conj(x) => Expr::Conj(b(x)?),
            J::Abs(x) => Expr::Abs(b(x)?),
        }))
    }

    pub fn from_expr(e: &Expr) -> Result<Self> {
        use ExprJson as J;
        let b = |x: &Arc<Expr>| -> Result<Box<ExprJson>> { Ok(Box::new(J::from_expr(x)?)) };
        Ok(match e {
            Expr::Rational(r) => J::Rational(format_rational(r)),
            Expr::Algebraic(a) => J::Algebraic(a.to_json()),
            Expr::Enclosure(z) => J::Enclosure(z.to_box_json(None)),
            Expr::I => J::I,
            Expr::Pi => J::Pi,
            Expr::Add(x, y) => J::Add(b(x)?, b(y)?),
            Expr::Sub(x, y) => J::Sub(b(x)?, b(y)?),
            Expr::Mul(x, y) => J::Mul(b(x)?, b(y)?),
            Expr::Div(x, y) => J::Div(b(x)?, b(y)?),
            Expr::Neg(x) => J::Neg(b(x)?),
            Expr::Pow(x, n) => J::Pow(b(x)?, n.to_string()),
            Expr::Sqrt(x) => J::Sqrt(b(x)?),
            Expr::Exp(x) => J::Exp(b(x)?),
            Expr::Ln(x) => J::Ln(b(x)?),
            Expr::Sin(x) => J::Sin(b(x)?),
            Expr::Cos(x) => J::Cos(b(x)?),
            Expr::Re(x) => J::Re(b(x)?),
            Expr::Im(x) => J::Im(b(x)?),
            Expr::Conj(x) => J::Conj(b(x)?),
            Expr::Abs(x) => J::Abs(b(x)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn exact_power() {
        let e = Expr::pow(&Expr::rational(q("3/2")), 5);
        let out = eval_enclosure(&e, &PrecisionPolicy::default(), None).unwrap();
        assert_eq!(out.exact, Some((q("243/32"), q("0"))));
        assert!(out.value.is_point());
    }

    #[test]
    fn golden_ratio_target_radius() {
        let five = Expr::int(5);
        let e = Expr::div(
            &Expr::add(&Expr::int(1), &Expr::unary(Expr::Sqrt, &five)),
            &Expr::int(2),
        );
        let t = Dyadic::pow2(-60);
        let out = eval_enclosure(&e, &PrecisionPolicy::default(), Some(&t)).unwrap();
        assert!(!out.capped);
        let (lo, hi) = out.value.re.to_rationals();
        assert!(lo > q("1.6180339887") && hi < q("1.6180339888"));
        assert!(out.value.re.width() <= Dyadic::pow2(-59));
    }

    #[test]
    fn division_by_zero_enclosure() {
        let e = Expr::div(&Expr::int(1), &Expr::sub(&Expr::int(2), &Expr::int(2)));
        let out = eval_enclosure(&e, &PrecisionPolicy::new(64, 256, 2).unwrap(), None);
        assert!(out.is_err());
        let z = Expr::sub(&Expr::unary(Expr::Sin, &Expr::Pi.into()), &Expr::int(0));
        let r = Expr::div(&Expr::int(1), &z);
        assert_eq!(
            eval_enclosure(&r, &PrecisionPolicy::new(64, 256, 2).unwrap(), None),
            Err(Error::DivisionByUncertainZero)
        );
    }

    #[test]
    fn json_round_trip() {
        let e = Expr::mul(
            &Expr::pow(&Expr::rational(q("-3/2")), -3),
            &Arc::new(Expr::Exp(Arc::new(Expr::I))),
        );
        let j = ExprJson::from_expr(&e).unwrap();
        let s = serde_json::to_string(&j).unwrap();
        let back: ExprJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_expr().unwrap(), e);
    }
}
