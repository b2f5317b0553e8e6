//! JSON spec files. Every exact number is a string (`"-3/2"`); integers may
//! also be JSON integers. Floats are rejected.
//!
//! ```json
//! {"degree": 2, "coefficients": ["1", "-3/2"], "initial": ["0", "1"], "rule": "srs"}
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value as Json};

use crate::algebraic::number::AlgebraicJson;
use crate::algebraic::AlgebraicNumber;
use crate::arithmetic::expr::ExprJson;
use crate::arithmetic::{Expr, RoundingMode};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};
use crate::sequences::{Coefficient, NlrsSpec, Rule, TargetTerm};

const KEYS: [&str; 9] = [
    "degree",
    "coefficients",
    "initial",
    "rule",
    "targets",
    "rounding",
    "offset",
    "errors",
    "bound",
];

pub fn parse_spec(text: &str) -> Result<NlrsSpec> {
    let root: Json = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
    spec_from_json(&root)
}

pub fn read_spec(path: &std::path::Path) -> Result<NlrsSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::schema("$", format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

/// Command-line literal: a bare rational such as `3/2`, or JSON text.
fn literal(text: &str, path: &str) -> Result<Json> {
    let t = text.trim();
    if t.starts_with(['{', '[', '"']) {
        serde_json::from_str(t).map_err(|e| Error::schema(path, e.to_string()))
    } else {
        Ok(Json::String(t.to_string()))
    }
}

/// An expression given as a bare rational or an expression tree in JSON.
pub fn parse_expr(text: &str, path: &str) -> Result<Arc<Expr>> {
    expr(&literal(text, path)?, path)
}

/// An algebraic number given as a bare rational or `{"minpoly", "approx", "radius"}`.
pub fn parse_algebraic(text: &str, path: &str) -> Result<AlgebraicNumber> {
    algebraic(&literal(text, path)?, path)
}

pub fn parse_rational_arg(text: &str, path: &str) -> Result<BigRational> {
    rational(&literal(text, path)?, path)
}

pub fn spec_from_json(root: &Json) -> Result<NlrsSpec> {
    let obj = root
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::schema(k.as_str(), "unknown field"));
    }
    let degree = field(obj, "degree")?
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::schema("degree", "expected a positive integer"))? as usize;
    let coefficients: Vec<Coefficient> = array(field(obj, "coefficients")?, "coefficients")?
        .iter()
        .enumerate()
        .map(|(i, c)| coefficient(c, &format!("coefficients[{i}]")))
        .collect::<Result<_>>()?;
    if coefficients.len() != degree {
        return Err(Error::schema(
            "coefficients",
            format!("expected {degree} entries, got {}", coefficients.len()),
        ));
    }
    let initial: Vec<BigRational> = match obj.get("initial") {
        None => vec![],
        Some(v) => array(v, "initial")?
            .iter()
            .enumerate()
            .map(|(i, x)| rational(x, &format!("initial[{i}]")))
            .collect::<Result<_>>()?,
    };
    let rule_name = field(obj, "rule")?
        .as_str()
        .ok_or_else(|| Error::schema("rule", "expected a string"))?;
    let allowed: &[&str] = match rule_name {
        "srs" => &[],
        "target" => &["targets", "rounding", "offset"],
        "explicit_errors" => &["errors", "bound"],
        other => {
            return Err(Error::schema(
                "rule",
                format!("unknown rule `{other}` (srs, target, explicit_errors)"),
            ))
        }
    };
    for k in ["targets", "rounding", "offset", "errors", "bound"] {
        if obj.contains_key(k) && !allowed.contains(&k) {
            return Err(Error::schema(k, format!("not used by rule `{rule_name}`")));
        }
    }
    let rule = match rule_name {
        "srs" => Rule::Srs,
        "target" => {
            let terms = array(field(obj, "targets")?, "targets")?
                .iter()
                .enumerate()
                .map(|(i, t)| target(t, &format!("targets[{i}]")))
                .collect::<Result<_>>()?;
            let rounding = match obj.get("rounding") {
                None => RoundingMode::Floor,
                Some(v) => rounding(v)?,
            };
            let offset = match obj.get("offset") {
                None => BigInt::zero(),
                Some(v) => integer(v, "offset")?,
            };
            Rule::Target {
                terms,
                rounding,
                offset,
            }
        }
        _ => {
            let errors = array(field(obj, "errors")?, "errors")?
                .iter()
                .enumerate()
                .map(|(i, e)| expr(e, &format!("errors[{i}]")))
                .collect::<Result<_>>()?;
            Rule::ExplicitErrors {
                errors,
                bound: rational(field(obj, "bound")?, "bound")?,
            }
        }
    };
    let spec = NlrsSpec {
        degree,
        coefficients,
        initial,
        rule,
    };
    spec.validate().map_err(|e| match e {
        Error::InvalidSpec(m) => Error::schema("$", m),
        other => other,
    })?;
    Ok(spec)
}

pub fn spec_to_json(spec: &NlrsSpec) -> Result<Json> {
    let mut obj = Map::new();
    obj.insert("degree".into(), json!(spec.degree));
    let coefficients: Vec<Json> = spec
        .coefficients
        .iter()
        .map(|c| match c {
            Coefficient::Rational(r) => Ok(json!(format_rational(r))),
            Coefficient::Algebraic(a) => Ok(serde_json::to_value(a.to_json()).expect("algebraic json")),
        })
        .collect::<Result<_>>()?;
    obj.insert("coefficients".into(), Json::Array(coefficients));
    obj.insert(
        "initial".into(),
        Json::Array(spec.initial.iter().map(|r| json!(format_rational(r))).collect()),
    );
    match &spec.rule {
        Rule::Srs => {
            obj.insert("rule".into(), json!("srs"));
        }
        Rule::Target {
            terms,
            rounding,
            offset,
        } => {
            obj.insert("rule".into(), json!("target"));
            let targets: Vec<Json> = terms
                .iter()
                .map(|t| {
                    let alpha = match t.alpha.as_rational() {
                        Some(r) => json!(format_rational(&r)),
                        None => serde_json::to_value(t.alpha.to_json()).expect("algebraic json"),
                    };
                    Ok(json!({"gamma": expr_json(&t.gamma)?, "alpha": alpha}))
                })
                .collect::<Result<_>>()?;
            obj.insert("targets".into(), Json::Array(targets));
            obj.insert(
                "rounding".into(),
                serde_json::to_value(rounding).expect("rounding json"),
            );
            obj.insert("offset".into(), json!(offset.to_string()));
        }
        Rule::ExplicitErrors { errors, bound } => {
            obj.insert("rule".into(), json!("explicit_errors"));
            let errors: Vec<Json> = errors.iter().map(expr_json).collect::<Result<_>>()?;
            obj.insert("errors".into(), Json::Array(errors));
            obj.insert("bound".into(), json!(format_rational(bound)));
        }
    }
    Ok(Json::Object(obj))
}

/// Pretty JSON with sorted keys.
pub fn emit_spec(spec: &NlrsSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&spec_to_json(spec)?).expect("json text"))
}

fn expr_json(e: &Arc<Expr>) -> Result<Json> {
    if let Expr::Rational(r) = &**e {
        return Ok(json!(format_rational(r)));
    }
    Ok(serde_json::to_value(ExprJson::from_expr(e)?).expect("expr json"))
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str) -> Result<&'a Json> {
    obj.get(key).ok_or_else(|| Error::schema(key, "missing field"))
}

fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))
}

fn rational(v: &Json, path: &str) -> Result<BigRational> {
    match v {
        Json::String(s) => parse_rational(s).map_err(|e| Error::schema(path, e.to_string())),
        Json::Number(n) if n.is_i64() || n.is_u64() => Ok(BigRational::from_integer(
            n.to_string().parse::<BigInt>().expect("integer literal"),
        )),
        Json::Number(_) => Err(Error::schema(path, "floats are not exact; write the value as a string")),
        _ => Err(Error::schema(path, "expected a rational string")),
    }
}

fn integer(v: &Json, path: &str) -> Result<BigInt> {
    let r = rational(v, path)?;
    if !r.is_integer() {
        return Err(Error::schema(path, "expected an integer"));
    }
    Ok(r.to_integer())
}

fn algebraic(v: &Json, path: &str) -> Result<AlgebraicNumber> {
    if v.is_string() || v.is_number() {
        return Ok(AlgebraicNumber::from_rational(&rational(v, path)?));
    }
    let j: AlgebraicJson = serde_json::from_value(v.clone()).map_err(|e| Error::schema(path, e.to_string()))?;
    AlgebraicNumber::from_json(&j)
}

fn coefficient(v: &Json, path: &str) -> Result<Coefficient> {
    if v.is_object() {
        return Ok(Coefficient::Algebraic(algebraic(v, path)?));
    }
    Ok(Coefficient::Rational(rational(v, path)?))
}

fn expr(v: &Json, path: &str) -> Result<Arc<Expr>> {
    if v.is_string() || v.is_number() {
        return Ok(Expr::rational(rational(v, path)?));
    }
    let j: ExprJson = serde_json::from_value(v.clone()).map_err(|e| Error::schema(path, e.to_string()))?;
    j.to_expr().map_err(|e| match e {
        Error::IsolationError(_) => e,
        other => Error::schema(path, other.to_string()),
    })
}

fn target(v: &Json, path: &str) -> Result<TargetTerm> {
    let obj = v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| *k != "gamma" && *k != "alpha") {
        return Err(Error::schema(format!("{path}.{k}"), "unknown field"));
    }
    let gamma = match obj.get("gamma") {
        None => Expr::int(1),
        Some(g) => expr(g, &format!("{path}.gamma"))?,
    };
    let alpha_path = format!("{path}.alpha");
    let alpha = algebraic(
        obj.get("alpha")
            .ok_or_else(|| Error::schema(&alpha_path, "missing field"))?,
        &alpha_path,
    )?;
    Ok(TargetTerm { gamma, alpha })
}

fn rounding(v: &Json) -> Result<RoundingMode> {
    let name = v
        .as_str()
        .ok_or_else(|| Error::schema("rounding", "expected a string"))?;
    match name {
        "floor" => Ok(RoundingMode::Floor),
        "ceil" => Ok(RoundingMode::Ceil),
        "nearest" | "nearest-half-up" => Ok(RoundingMode::NearestHalfUp),
        other => Err(Error::schema(
            "rounding",
            format!("unknown rounding `{other}` (floor, ceil, nearest)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(e: Error) -> String {
        match e {
            Error::Schema { path, .. } => path,
            other => panic!("not a schema error: {other}"),
        }
    }

    #[test]
    fn srs_spec() {
        let s = parse_spec(r#"{"degree": 2, "coefficients": ["1", "-3/2"], "initial": ["0", "1"], "rule": "srs"}"#)
            .unwrap();
        assert_eq!(s.degree, 2);
        assert_eq!(s.rule, Rule::Srs);
        assert_eq!(
            s.coefficients[1],
            Coefficient::Rational(BigRational::new((-3).into(), 2.into()))
        );
        assert_eq!(parse_spec(&emit_spec(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn schema_paths() {
        let e = parse_spec(r#"{"coefficients": ["1"], "rule": "srs"}"#).unwrap_err();
        assert_eq!(path_of(e), "degree");
        let e = parse_spec(r#"{"degree": 2, "coefficients": ["1", "2", "3"], "initial": ["0", "1"], "rule": "srs"}"#)
            .unwrap_err();
        assert_eq!(path_of(e), "coefficients");
        let e = parse_spec(r#"{"degree": 1, "coefficients": [0.5], "initial": ["0"], "rule": "srs"}"#).unwrap_err();
        assert_eq!(path_of(e), "coefficients[0]");
        let e = parse_spec(r#"{"degree": 1, "coefficients": ["-2"], "rule": "target", "targets": [{"gamma": "1"}]}"#)
            .unwrap_err();
        assert_eq!(path_of(e), "targets[0].alpha");
        let e = parse_spec(r#"{"degree": 1, "coefficients": ["-2"], "initial": ["0"], "rule": "srs", "bound": "1"}"#)
            .unwrap_err();
        assert_eq!(path_of(e), "bound");
    }

    #[test]
    fn target_and_errors_round_trip() {
        let t = parse_spec(
            r#"{"degree": 2, "coefficients": ["1", "-1"], "rule": "target", "rounding": "nearest", "offset": "-1",
                "targets": [{"gamma": {"div": [{"rational": "1"}, {"sqrt": {"rational": "5"}}]},
                             "alpha": {"minpoly": ["-1", "-1", "1"], "approx": "1.618", "radius": "1/100"}}]}"#,
        )
        .unwrap();
        assert_eq!(parse_spec(&emit_spec(&t).unwrap()).unwrap(), t);
        let e = parse_spec(
            r#"{"degree": 1, "coefficients": ["-3/2"], "initial": ["1"], "rule": "explicit_errors",
                "errors": ["1/3", "-1/4", {"neg": {"rational": "1/5"}}], "bound": "1/2"}"#,
        )
        .unwrap();
        assert_eq!(parse_spec(&emit_spec(&e).unwrap()).unwrap(), e);
    }
}
