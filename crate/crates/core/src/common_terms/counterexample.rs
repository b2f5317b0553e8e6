use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::line::rational_line_fit;
use super::search::{PairVerification, SolutionPair, SolutionSet};
use crate::algebraic::AlgebraicNumber;
use crate::arithmetic::{certified_round, eval_enclosure, Dyadic, Expr, PrecisionPolicy, RoundingMode};
use crate::diophantine::{construct_gamma, GammaConstruction};
use crate::error::{Error, Result};
use crate::sequences::{generate_with, Coefficient, NlrsSpec, Rule, TargetTerm};

/// Largest index up to which both specs are regenerated as a cross-check.
const GENERATION_LIMIT: u64 = 10_000;

const MODES: [RoundingMode; 3] = [RoundingMode::Floor, RoundingMode::Ceil, RoundingMode::NearestHalfUp];
const OFFSETS: [i64; 3] = [0, 1, -1];

/// `a_n = ⌊α^n⌋` and `b_n = round(γβ^n + u)` sharing infinitely many terms.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub a_spec: NlrsSpec,
    pub b_spec: NlrsSpec,
    pub u: BigInt,
    pub b_rounding: RoundingMode,
    pub solutions: SolutionSet,
    /// Constructed pairs where no common `u` applies.
    pub dropped: Vec<(BigInt, BigInt)>,
    pub construction: GammaConstruction,
}

fn degree_one(root: &AlgebraicNumber, gamma: Arc<Expr>, rounding: RoundingMode, offset: BigInt) -> NlrsSpec {
    let coefficient = match root.as_rational() {
        Some(r) => Coefficient::Rational(-r),
        None => Coefficient::Algebraic(root.neg()),
    };
    NlrsSpec {
        degree: 1,
        coefficients: vec![coefficient],
        initial: vec![],
        rule: Rule::Target {
            terms: vec![TargetTerm {
                gamma,
                alpha: root.clone(),
            }],
            rounding,
            offset,
        },
    }
}

/// `round(x)` in each mode from enclosures of `x` at growing precision;
/// modes still straddling a boundary at the cap stay `None`.
fn roundings(x: &Arc<Expr>, magnitude: u32, policy: &PrecisionPolicy) -> Result<[Option<BigInt>; 3]> {
    let mut out: [Option<BigInt>; 3] = [None, None, None];
    let mut bits = 64u32;
    loop {
        let pol = policy.with_initial((bits + magnitude).min(policy.cap));
        let enc = eval_enclosure(x, &pol, Some(&Dyadic::pow2(-(bits as i64))))?;
        for (slot, mode) in out.iter_mut().zip(MODES) {
            if slot.is_none() {
                *slot = certified_round(&enc.value.re, mode).ok();
            }
        }
        if out.iter().all(Option::is_some) || bits + magnitude >= policy.cap || enc.capped {
            return Ok(out);
        }
        bits = bits.saturating_mul(2);
    }
}

/// `α^K` is an integer, for the positive real `α`: its minimal polynomial
/// is `x^e - c` with `c ∈ Z` and `e | K`.
fn integral_power(alpha: &AlgebraicNumber, k: &BigInt) -> bool {
    let p = alpha.minpoly();
    let e = p.len() - 1;
    if p[1..e].iter().any(|c| !c.is_zero()) {
        return false;
    }
    if !(k % BigInt::from(e)).is_zero() {
        return false;
    }
    BigRational::new(-p[0].clone(), p[e].clone()).is_integer()
}

/// Whether `⌊α^K⌋ = round(γβ^M + u)` holds for the last pair, where
/// `γβ^M = α^K` exactly; `None` when the fractional part would decide.
fn symbolic_match(alpha: &AlgebraicNumber, k: &BigInt, mode: RoundingMode, u: i64) -> Option<bool> {
    let integral = integral_power(alpha, k);
    match (integral, mode) {
        (true, _) => Some(u == 0),
        (false, RoundingMode::Floor) => Some(u == 0),
        (false, RoundingMode::Ceil) => Some(u == -1),
        (false, RoundingMode::NearestHalfUp) => None,
    }
}

/// Two Target-rule specs `a_n = ⌊α^n⌋`, `b_n = round(γβ^n + u)` with
/// `a_k = b_m` along the constructed pairs. The rounding of `b` and `u`
/// are chosen to match the most pairs; at least two must agree.
pub fn build_counterexample_pair(
    alpha: &AlgebraicNumber,
    beta: &AlgebraicNumber,
    c: &BigRational,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<CounterexamplePair> {
    let (ae, be) = (Expr::algebraic(alpha.clone()), Expr::algebraic(beta.clone()));
    let construction = construct_gamma(&ae, &be, c, depth, policy)?;
    let gamma = construction.gamma.clone();
    let (last, numeric) = construction.pairs.split_last().expect("depth >= 1");
    let log2a = alpha.approx().0.log2();
    let log2b = beta.approx().0.log2();
    // Per numeric pair: ⌊α^k⌋ and the three roundings of γβ^m.
    let mut evaluated = vec![];
    for (k, m) in numeric {
        let kf = k.to_f64().unwrap_or(f64::MAX);
        let a_val = roundings(&Expr::pow(&ae, k.clone()), (kf * log2a) as u32 + 8, policy)?[0].clone();
        let x = Expr::mul(&gamma, &Expr::pow(&be, m.clone()));
        let b_vals = roundings(&x, (m.to_f64().unwrap_or(f64::MAX) * log2b) as u32 + 8, policy)?;
        evaluated.push((a_val, b_vals));
    }
    let mut best: Option<(usize, RoundingMode, i64, Vec<bool>, bool)> = None;
    for (mi, mode) in MODES.into_iter().enumerate() {
        for u in OFFSETS {
            let hits: Vec<bool> = evaluated
                .iter()
                .map(|(a, bs)| match (a, &bs[mi]) {
                    (Some(a), Some(b)) => *a == b + BigInt::from(u),
                    _ => false,
                })
                .collect();
            let tail = symbolic_match(alpha, &last.0, mode, u) == Some(true);
            let count = hits.iter().filter(|h| **h).count() + tail as usize;
            if best.as_ref().is_none_or(|b| count > b.0) {
                best = Some((count, mode, u, hits, tail));
            }
        }
    }
    let (count, mode, u, hits, tail) = best.expect("candidates");
    if count < 2 {
        return Err(Error::DepthInsufficient(format!(
            "no rounding and offset in {{-1, 0, 1}} matches two of the {depth} constructed pairs"
        )));
    }
    let a_spec = degree_one(alpha, Expr::int(1), RoundingMode::Floor, BigInt::zero());
    let b_spec = degree_one(beta, gamma.clone(), mode, BigInt::from(u));
    let mut pairs = vec![];
    let mut dropped = vec![];
    for ((k, m), hit) in numeric.iter().zip(&hits) {
        if *hit {
            pairs.push(SolutionPair::exact(k.clone(), m.clone()));
        } else {
            dropped.push((k.clone(), m.clone()));
        }
    }
    let k_max = pairs
        .iter()
        .map(|p| p.k.to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0);
    let m_max = pairs
        .iter()
        .map(|p| p.m.to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0);
    if k_max <= GENERATION_LIMIT && m_max <= GENERATION_LIMIT {
        let a = generate_with(&a_spec, k_max as usize, policy)?;
        let b = generate_with(&b_spec, m_max as usize, policy)?;
        let probe = SolutionSet::new(pairs.clone(), k_max, m_max);
        if !probe.reverify(&a, &b)? {
            return Err(Error::DepthInsufficient(
                "generated terms disagree with the constructed pairs".into(),
            ));
        }
    }
    if tail {
        pairs.push(SolutionPair {
            k: last.0.clone(),
            m: last.1.clone(),
            verification: PairVerification::Symbolic,
        });
    } else {
        dropped.push(last.clone());
    }
    let mut solutions = SolutionSet::new(pairs, k_max, m_max);
    solutions.line_fit = Some(rational_line_fit(&solutions.as_tuples()));
    Ok(CounterexamplePair {
        a_spec,
        b_spec,
        u: BigInt::from(u),
        b_rounding: mode,
        solutions,
        dropped,
        construction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::common_terms::LineFit;

    #[test]
    fn dependent_bases() {
        let pol = PrecisionPolicy::default();
        let r = build_counterexample_pair(
            &AlgebraicNumber::from_integer(2),
            &AlgebraicNumber::from_integer(4),
            &BigRational::new(21.into(), 20.into()),
            3,
            &pol,
        );
        assert!(matches!(r, Err(Error::DependentBases { .. })));
    }

    #[test]
    fn integral_powers() {
        let sqrt2 = AlgebraicNumber::from_minpoly_near(
            &[(-2).into(), 0.into(), 1.into()],
            &BigRational::new(141.into(), 100.into()),
            &BigRational::zero(),
            &BigRational::new(1.into(), 100.into()),
        )
        .unwrap();
        assert!(integral_power(&sqrt2, &BigInt::from(10)));
        assert!(!integral_power(&sqrt2, &BigInt::from(7)));
        let half = AlgebraicNumber::from_rational(&BigRational::new(3.into(), 2.into()));
        assert!(!integral_power(&half, &BigInt::from(4)));
        assert_eq!(
            symbolic_match(&half, &BigInt::from(4), RoundingMode::Ceil, -1),
            Some(true)
        );
        assert_eq!(
            symbolic_match(&half, &BigInt::from(4), RoundingMode::NearestHalfUp, 0),
            None
        );
    }

    #[test]
    fn two_and_three() {
        let pol = PrecisionPolicy::default();
        let c = BigRational::new(21.into(), 20.into());
        let p = build_counterexample_pair(
            &AlgebraicNumber::from_integer(2),
            &AlgebraicNumber::from_integer(3),
            &c,
            3,
            &pol,
        )
        .unwrap();
        assert_eq!(p.solutions.len(), 3);
        assert_eq!(
            (p.b_rounding, p.u.clone()),
            (RoundingMode::NearestHalfUp, BigInt::zero())
        );
        assert!(p.construction.trace.verified());
        assert_eq!(p.solutions.line_fit, Some(LineFit::NoLine));
        // Independent check of the numeric pairs: ⌊2^k⌋ against the b spec.
        for pair in p
            .solutions
            .pairs
            .iter()
            .filter(|q| q.verification == PairVerification::Exact)
        {
            let k = pair.k.to_u32().unwrap();
            let b = generate_with(&p.b_spec, pair.m.to_usize().unwrap(), &pol).unwrap();
            let bm = b.values.last().unwrap().as_integer().unwrap();
            assert_eq!(bm, BigInt::from(1) << k, "pair ({}, {})", pair.k, pair.m);
        }
    }
}
