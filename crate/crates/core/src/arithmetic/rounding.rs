use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::policy::PrecisionPolicy;
use super::real::RealEnclosure;
use crate::error::{Error, Result};

/// Integer rounding brackets. `NearestHalfUp` is `floor(x + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMode {
    Floor,
    Ceil,
    NearestHalfUp,
}

pub fn round_rational(x: &BigRational, mode: RoundingMode) -> BigInt {
    match mode {
        RoundingMode::Floor => x.floor().to_integer(),
        RoundingMode::Ceil => x.ceil().to_integer(),
        RoundingMode::NearestHalfUp => {
            let two = BigInt::from(2);
            let (n, d) = (x.numer(), x.denom());
            // floor((2n + d) / 2d)
            (two.clone() * n + d).div_floor(&(two * d))
        }
    }
}

fn round_dyadic(x: &Dyadic, mode: RoundingMode) -> BigInt {
    match mode {
        RoundingMode::Floor => x.floor(),
        RoundingMode::Ceil => x.ceil(),
        RoundingMode::NearestHalfUp => x.add(&Dyadic::pow2(-1)).floor(),
    }
}

/// Rounds an enclosure when every point of it rounds to the same integer.
pub fn certified_round(x: &RealEnclosure, mode: RoundingMode) -> Result<BigInt> {
    let a = round_dyadic(x.lo(), mode);
    let b = round_dyadic(x.hi(), mode);
    if a == b {
        Ok(a)
    } else {
        let (lo, hi) = x.to_decimal_bounds(20);
        Err(Error::AmbiguousRounding { lo, hi })
    }
}

/// Certified rounding of a quantity given by an enclosure generator,
/// refining according to `policy` before giving up.
pub fn certified_round_with(
    policy: &PrecisionPolicy,
    mode: RoundingMode,
    mut eval: impl FnMut(u32) -> Result<RealEnclosure>,
) -> Result<BigInt> {
    policy.run(|prec| certified_round(&eval(prec)?, mode))
}

/// Fractional distance helper: `x - round(x)` as an exact rational.
pub fn rounding_error(x: &BigRational, mode: RoundingMode) -> BigRational {
    x - BigRational::from_integer(round_rational(x, mode))
}

/// Supremum of `|x - round(x)|` under the mode.
pub fn rounding_bound(mode: RoundingMode) -> BigRational {
    match mode {
        RoundingMode::NearestHalfUp => BigRational::new(BigInt::one(), BigInt::from(2)),
        _ => BigRational::one(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn straddling_three_is_ambiguous() {
        let x =
            RealEnclosure::from_rational(&q(2999, 1000), 64).hull(&RealEnclosure::from_rational(&q(3001, 1000), 64));
        assert!(matches!(
            certified_round(&x, RoundingMode::Floor),
            Err(Error::AmbiguousRounding { .. })
        ));
    }

    #[test]
    fn half_up_tie() {
        let x = RealEnclosure::from_rational(&q(5, 2), 64);
        assert_eq!(
            certified_round(&x, RoundingMode::NearestHalfUp).unwrap(),
            BigInt::from(3)
        );
        assert_eq!(round_rational(&q(-5, 2), RoundingMode::NearestHalfUp), BigInt::from(-2));
        assert_eq!(round_rational(&q(-7, 3), RoundingMode::Floor), BigInt::from(-3));
        assert_eq!(round_rational(&q(-7, 3), RoundingMode::Ceil), BigInt::from(-2));
    }
}
