use nlrs_core::arithmetic::{Expr, RoundingMode};
use nlrs_core::common_terms::{rational_line_fit, search_common, LineFit};
use nlrs_core::diophantine::continued_fraction_rational;
use nlrs_core::sequences::{generate_with, Coefficient, NlrsSpec, Rule, TargetTerm};
use nlrs_core::spec_io::{emit_spec, parse_spec};
use nlrs_core::{AlgebraicNumber, BigInt, ExactRational as Q, PrecisionPolicy};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational(max: i64) -> impl Strategy<Value = Q> {
    (-max..=max, 1..=6i64).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn srs() -> impl Strategy<Value = NlrsSpec> {
    (1..=5usize)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(rational(18), d),
                prop::collection::vec(-9..=9i64, d),
            )
        })
        .prop_map(|(c, init)| NlrsSpec {
            degree: c.len(),
            coefficients: c.into_iter().map(Coefficient::Rational).collect(),
            initial: init.into_iter().map(|a| Q::from_integer(a.into())).collect(),
            rule: Rule::Srs,
        })
}

fn rounding() -> impl Strategy<Value = RoundingMode> {
    prop_oneof![
        Just(RoundingMode::Floor),
        Just(RoundingMode::Ceil),
        Just(RoundingMode::NearestHalfUp)
    ]
}

fn target() -> impl Strategy<Value = NlrsSpec> {
    (2..=40i64, 1..=9i64, rational(12), rounding(), -3..=3i64).prop_map(|(n, d, g, mode, u)| {
        let alpha = Q::new(n.into(), d.into());
        NlrsSpec {
            degree: 1,
            coefficients: vec![Coefficient::Rational(-alpha.clone())],
            initial: vec![],
            rule: Rule::Target {
                terms: vec![TargetTerm {
                    gamma: Expr::rational(g),
                    alpha: AlgebraicNumber::from_rational(&alpha),
                }],
                rounding: mode,
                offset: u.into(),
            },
        }
    })
}

fn explicit() -> impl Strategy<Value = NlrsSpec> {
    (rational(12), prop::collection::vec(rational(6), 1..12)).prop_map(|(c, errors)| {
        let bound = errors.iter().map(|e| e.abs()).max().unwrap_or_else(Q::zero);
        NlrsSpec {
            degree: 1,
            coefficients: vec![Coefficient::Rational(c)],
            initial: vec![Q::zero()],
            rule: Rule::ExplicitErrors {
                errors: errors.into_iter().map(Expr::rational).collect(),
                bound,
            },
        }
    })
}

fn floor_power(n: i64, d: i64) -> NlrsSpec {
    let alpha = Q::new(n.into(), d.into());
    NlrsSpec {
        degree: 1,
        coefficients: vec![Coefficient::Rational(-alpha.clone())],
        initial: vec![],
        rule: Rule::Target {
            terms: vec![TargetTerm {
                gamma: Expr::int(1),
                alpha: AlgebraicNumber::from_rational(&alpha),
            }],
            rounding: RoundingMode::Floor,
            offset: BigInt::zero(),
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trip(spec in prop_oneof![srs(), target(), explicit()]) {
        let text = emit_spec(&spec).unwrap();
        prop_assert_eq!(parse_spec(&text).unwrap(), spec.clone());
        // Emission is canonical.
        prop_assert_eq!(emit_spec(&parse_spec(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn srs_errors_in_unit_interval(spec in srs()) {
        let seq = generate_with(&spec, 60, &PrecisionPolicy::default()).unwrap();
        for (n, e) in seq.errors.iter().enumerate().skip(spec.degree) {
            let e = e.as_exact().unwrap();
            prop_assert!(!e.is_negative() && *e < Q::from_integer(1.into()), "e_{} = {}", n, e);
        }
        prop_assert!(seq.values.iter().all(|v| v.as_integer().is_some()));
    }

    #[test]
    fn convergents_bracket(n in -10_000i64..10_000, d in 1..5_000i64) {
        let x = Q::new(n.into(), d.into());
        let cf = continued_fraction_rational(&x, 64);
        prop_assert!(cf.terminated);
        let (p, q) = cf.convergents.last().unwrap();
        prop_assert_eq!(Q::new(p.clone(), q.clone()), x.clone());
        // Even convergents lie below x, odd ones above.
        for (k, (p, q)) in cf.convergents.iter().enumerate() {
            let c = Q::new(p.clone(), q.clone());
            if k % 2 == 0 { prop_assert!(c <= x) } else { prop_assert!(c >= x) }
        }
    }

    #[test]
    fn line_fit_recovers_lines(du in 1..6i64, dv in 1..6i64, k0 in 0..20i64, m0 in 0..20i64, n in 3..8i64) {
        let pairs: Vec<(BigInt, BigInt)> = (0..n).map(|t| ((k0 + du * t).into(), (m0 + dv * t).into())).collect();
        match rational_line_fit(&pairs) {
            LineFit::Line { u, v, w, exceptions } => {
                prop_assert!(exceptions.is_empty());
                for (k, m) in &pairs {
                    prop_assert_eq!(k * &v, &u * m + &w);
                }
            }
            LineFit::NoLine => prop_assert!(false, "no line through collinear points"),
        }
    }
}

#[test]
fn search_is_symmetric() {
    let pol = PrecisionPolicy::default();
    let a = generate_with(&floor_power(3, 2), 120, &pol).unwrap();
    let b = generate_with(&floor_power(5, 2), 120, &pol).unwrap();
    let ab = search_common(&a, &b, 120, 120).unwrap();
    let ba = search_common(&b, &a, 120, 120).unwrap();
    let mut swapped: Vec<(BigInt, BigInt)> = ba.as_tuples().into_iter().map(|(k, m)| (m, k)).collect();
    let mut direct = ab.as_tuples();
    swapped.sort();
    direct.sort();
    assert_eq!(direct, swapped);
}
