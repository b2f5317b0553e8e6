use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::algebraic::{multiplicative_independence, AlgebraicNumber, Independence};
use crate::arithmetic::{elementary, ComplexEnclosure, RealEnclosure};
use crate::error::{Error, Result};

const PREC: u32 = 256;

/// `β = ζ·α^p` for dependent roots `α^u β^v = 1`, with `p = -u/v` and `α^p`
/// taken on the principal branch of the logarithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRelation {
    pub u: i64,
    pub v: i64,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: BigRational,
    #[serde(serialize_with = "ser_box")]
    pub zeta: ComplexEnclosure,
    /// `ζ^|v|` encloses 1.
    pub verified: bool,
}

fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_box<S: Serializer>(z: &ComplexEnclosure, s: S) -> std::result::Result<S::Ok, S::Error> {
    z.to_box_json(Some(20)).serialize(s)
}

/// Principal `Log α`.
fn principal_log(a: &AlgebraicNumber, prec: u32) -> Result<ComplexEnclosure> {
    let z = a.enclosure(prec);
    let ln_abs = a.log_abs(prec)?;
    if a.is_real() {
        let x = a.real_enclosure(prec)?;
        let im = if x.is_certainly_negative() {
            elementary::pi(prec)
        } else {
            RealEnclosure::zero(prec)
        };
        return Ok(ComplexEnclosure::new(ln_abs, im));
    }
    Ok(ComplexEnclosure::new(ln_abs, elementary::arg(&z)?))
}

/// Relation between two dependent roots, searching exponents up to `bound`.
pub fn root_relation(alpha: &AlgebraicNumber, beta: &AlgebraicNumber, bound: u32) -> Result<RootRelation> {
    let (u, v) = match multiplicative_independence(alpha, beta, bound)? {
        Independence::Dependent { u, v } => (u, v),
        Independence::IndependentUpTo { bound } => {
            return Err(Error::InvalidInput(format!(
                "no multiplicative relation with exponents up to {bound}"
            )))
        }
    };
    if v == 0 {
        return Err(Error::InvalidInput("alpha is a root of unity".into()));
    }
    let exponent = BigRational::new((-u).into(), v.into());
    let scaled = principal_log(alpha, PREC)?.scale(&RealEnclosure::from_rational(&exponent, PREC));
    let power = elementary::exp_complex(&scaled);
    let zeta = beta.enclosure(PREC).div_ref(&power)?;
    let verified = zeta
        .powi(v.abs())?
        .contains_rationals(&BigRational::one(), &BigRational::zero());
    Ok(RootRelation {
        u,
        v,
        exponent,
        zeta,
        verified,
    })
}
