use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::arithmetic::expr::ExprJson;
use crate::arithmetic::{eval_enclosure, ComplexEnclosure, Dyadic, Expr, PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};

const DISPLAY_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Shift,
    Gamma,
    FluctuatingTail,
    ZeroRich,
}

/// How a stage inequality was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Interval evaluation at finite precision.
    Enclosure,
    /// The residual is identically zero by construction.
    Symbolic,
}

/// One claimed inequality `|achieved| < target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub inequality: String,
    #[serde(serialize_with = "ser_opt_enclosure")]
    pub target: Option<RealEnclosure>,
    #[serde(serialize_with = "ser_opt_enclosure")]
    pub achieved: Option<RealEnclosure>,
    pub passed: bool,
    pub kind: CheckKind,
    pub precision: u32,
}

impl Check {
    pub fn symbolic(inequality: impl Into<String>) -> Self {
        Check {
            inequality: inequality.into(),
            target: None,
            achieved: None,
            passed: true,
            kind: CheckKind::Symbolic,
            precision: 0,
        }
    }
}

/// One stage of a construction. Shift-type stages fill `k`, `m`, `s`;
/// index-type stages fill `n` and `step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub index: usize,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub k: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub m: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub k_total: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub m_total: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub n: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub step: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_enclosure", skip_serializing_if = "Option::is_none")]
    pub s: Option<RealEnclosure>,
    #[serde(serialize_with = "ser_opt_rational", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<BigRational>,
    pub check: Check,
    /// Dropped stages stay in the trace with `passed = false`.
    pub retained: bool,
}

impl Stage {
    pub fn new(index: usize, check: Check) -> Self {
        Stage {
            index,
            k: None,
            m: None,
            k_total: None,
            m_total: None,
            n: None,
            step: None,
            s: None,
            epsilon: None,
            retained: check.passed,
            check,
        }
    }
}

/// Self-verifying record of a construction run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionTrace {
    pub construction: Construction,
    pub parameters: BTreeMap<String, String>,
    pub stages: Vec<Stage>,
    #[serde(serialize_with = "ser_opt_expr", skip_serializing_if = "Option::is_none")]
    pub constant: Option<Arc<Expr>>,
    #[serde(serialize_with = "ser_opt_box", skip_serializing_if = "Option::is_none")]
    pub constant_enclosure: Option<ComplexEnclosure>,
    /// The infinite series differs from the truncated constant by at most
    /// `2·(2C)^-tail_exponent`.
    #[serde(serialize_with = "ser_opt_big", skip_serializing_if = "Option::is_none")]
    pub tail_exponent: Option<BigInt>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<Stage>,
}

impl ConstructionTrace {
    pub fn new(construction: Construction) -> Self {
        ConstructionTrace {
            construction,
            parameters: BTreeMap::new(),
            stages: vec![],
            constant: None,
            constant_enclosure: None,
            tail_exponent: None,
            pairs: vec![],
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Every retained stage and pair passed its check.
    pub fn verified(&self) -> bool {
        self.stages
            .iter()
            .chain(&self.pairs)
            .all(|s| !s.retained || s.check.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serialises")
    }
}

pub(crate) fn log2_upper(r: &BigRational) -> f64 {
    RealEnclosure::from_rational(r, 64).hi().to_f64().log2()
}

/// `|residual| + 2^(1-tail) < base^-exponent` in enclosures; `base_bits`
/// covers cancellation inside the residual.
pub(crate) fn check_below(
    residual: &Arc<Expr>,
    c: &BigRational,
    exponent: &BigInt,
    tail_exponent: Option<&BigInt>,
    base_bits: u32,
    inequality: &str,
    policy: &PrecisionPolicy,
) -> Result<Check> {
    let e = exponent
        .to_u64()
        .ok_or_else(|| Error::cap(policy.cap, "stage exponent"))?;
    let target_bits = (e as f64 * log2_upper(c)).ceil() as u32 + 16;
    let need = target_bits + base_bits + 64;
    let pol = policy.with_initial(need.min(policy.cap));
    let out = eval_enclosure(residual, &pol, Some(&Dyadic::pow2(-(target_bits as i64))))?;
    let prec = out.precision;
    // 2^(1-T) bounds the tail; clamped to keep the enclosure compact.
    let tail = tail_exponent.map(|t| {
        let t = t.to_i64().unwrap_or(i64::MAX).min(prec as i64 + 9);
        Dyadic::pow2(1 - t)
    });
    let target = RealEnclosure::from_rational(c, prec).pow_big(exponent).recip()?;
    let achieved = match tail {
        Some(t) => out.value.abs().inflate(&t),
        None => out.value.abs(),
    };
    Ok(Check {
        inequality: inequality.into(),
        passed: achieved.certainly_lt(&target),
        target: Some(target),
        achieved: Some(achieved),
        kind: CheckKind::Enclosure,
        precision: prec,
    })
}

/// Scientific rendering that survives exponents far outside `f64`.
pub fn sci(d: &Dyadic, digits: usize) -> String {
    if d.is_zero() {
        return "0".into();
    }
    let bits = d.mantissa().bits() as i64;
    let keep = bits.min(60);
    let top = (d.mantissa().abs() >> (bits - keep) as u64).to_f64().unwrap_or(1.0);
    let e2 = d.exponent() + bits - keep;
    let l = top.log10() + e2 as f64 * std::f64::consts::LOG10_2;
    let mut e10 = l.floor();
    let mut mant = 10f64.powf(l - e10);
    let scale = 10f64.powi(digits as i32);
    mant = (mant * scale).round() / scale;
    if mant >= 10.0 {
        mant /= 10.0;
        e10 += 1.0;
    }
    let sign = if d.is_negative() { "-" } else { "" };
    format!("{sign}{mant:.digits$}e{}", e10 as i64)
}

pub fn enclosure_strings(x: &RealEnclosure) -> [String; 2] {
    [sci(x.lo(), DISPLAY_DIGITS), sci(x.hi(), DISPLAY_DIGITS)]
}

fn ser_opt_enclosure<S: Serializer>(x: &Option<RealEnclosure>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref().map(enclosure_strings).serialize(s)
}

fn ser_opt_big<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref().map(|v| v.to_string()).serialize(s)
}

fn ser_opt_rational<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref()
        .map(|r| {
            let enc = RealEnclosure::from_rational(r, 64);
            sci(enc.hi(), DISPLAY_DIGITS)
        })
        .serialize(s)
}

fn ser_opt_expr<S: Serializer>(x: &Option<Arc<Expr>>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref()
        .map(|e| ExprJson::from_expr(e).map_err(serde::ser::Error::custom))
        .transpose()?
        .serialize(s)
}

fn ser_opt_box<S: Serializer>(x: &Option<ComplexEnclosure>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref()
        .map(|z| {
            let mut m = BTreeMap::new();
            m.insert("re", enclosure_strings(&z.re));
            m.insert("im", enclosure_strings(&z.im));
            m
        })
        .serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_rendering() {
        assert_eq!(sci(&Dyadic::from_int(1500), 3), "1.500e3");
        assert_eq!(sci(&Dyadic::pow2(-10_000), 4), "5.0124e-3011");
        assert_eq!(sci(&Dyadic::from_int(-1), 2), "-1.00e0");
        assert_eq!(sci(&Dyadic::zero(), 2), "0");
    }
}
