//! Exact parsing and formatting of rationals ("p/q", integers, decimals).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type ExactRational = BigRational;

/// A JSON number literal accepted either as a string or a JSON integer.
/// Always written back as a string.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Str(String),
}

impl Literal {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Literal::Int(i) => Ok(BigRational::from_integer((*i).into())),
            Literal::Str(s) => parse_rational(s),
        }
    }

    pub fn to_integer(&self) -> Result<BigInt> {
        let r = self.to_rational()?;
        if !r.is_integer() {
            return Err(Error::InvalidInput(format!(
                "expected an integer, got {}",
                format_rational(&r)
            )));
        }
        Ok(r.to_integer())
    }
}

impl serde::Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Literal::Int(i) => s.serialize_str(&i.to_string()),
            Literal::Str(x) => s.serialize_str(x),
        }
    }
}

impl From<&BigRational> for Literal {
    fn from(r: &BigRational) -> Self {
        Literal::Str(format_rational(r))
    }
}

impl From<&BigInt> for Literal {
    fn from(r: &BigInt) -> Self {
        Literal::Str(r.to_string())
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidInput(format!("not an exact number: {s:?}"))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(s));
    }
    t.trim_start_matches('+').parse::<BigInt>().map_err(|_| bad(s))
}

/// Parses `"p/q"`, `"-12"`, `"1.25"` or `"1e-25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n)?;
        let d = parse_int(d)?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (
            &t[..i],
            t[i + 1..].trim_start_matches('+').parse::<i64>().map_err(|_| bad(s))?,
        ),
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad(s));
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad(s));
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad(s))?;
    let scale = exp - fp.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(bad(s));
    }
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"a"`, `"a+bi"`, `"a-bi"`, `"bi"` or `"i"` with exact parts.
pub fn parse_complex(s: &str) -> Result<(BigRational, BigRational)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok((parse_rational(&t)?, BigRational::zero()));
    };
    // Split at the last sign that is not part of an exponent or leading.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im) = match split {
        Some(i) => (parse_rational(&body[..i])?, &body[i..]),
        None => (BigRational::zero(), body),
    };
    let im = match im {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        x => parse_rational(x)?,
    };
    Ok((re, im))
}

pub fn format_complex(re: &BigRational, im: &BigRational) -> String {
    if im.is_zero() {
        return format_rational(re);
    }
    let sign = if im.is_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_rational(re), sign, format_rational(&im.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("-3/2").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("1.25").unwrap(), q(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("4/5+3/5i").unwrap(), (q(4, 5), q(3, 5)));
        assert_eq!(parse_complex("0.8-0.6i").unwrap(), (q(4, 5), q(-3, 5)));
        assert_eq!(parse_complex("-i").unwrap(), (q(0, 1), q(-1, 1)));
        assert_eq!(parse_complex("1e-2+1e-3i").unwrap(), (q(1, 100), q(1, 1000)));
        assert_eq!(format_complex(&q(4, 5), &q(-3, 5)), "4/5-3/5i");
    }
}
