use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::near_identity::{near_identity_search_with, DEFAULT_BUDGET};
use super::trace::{check_below, Check, Construction, ConstructionTrace, Stage};
use crate::algebraic::{AlgebraicNumber, Poly};
use crate::arithmetic::{eval_enclosure, Dyadic, Expr, PrecisionPolicy, RoundingMode};
use crate::error::{Error, Result};
use crate::sequences::{generate_with, Coefficient, NlrsSpec, Rule, TargetTerm};

/// Largest `n_k` for which the next threshold `(2 d_2)^-n_k` is formed.
const MAX_INDEX_EXPONENT: u64 = 1 << 20;
/// Zero-rich sequences are generated up to this index for certification.
pub const GENERATION_LIMIT: u64 = 10_000;
const MIN_COVERED: u64 = 16;

/// `γ_r` with `|γ_1 η_1^n + ... + γ_r η_r^n| < d_2^-n` along `n_1 < n_2 < ...`.
#[derive(Debug, Clone)]
pub struct FluctuatingTail {
    pub trace: ConstructionTrace,
    pub gamma_r: Arc<Expr>,
    pub indices: Vec<BigInt>,
}

fn gaussian_unit(q: &(BigRational, BigRational)) -> bool {
    let (re, im) = q;
    let one = BigRational::one();
    (re.is_zero() && im.abs() == one) || (im.is_zero() && re.abs() == one)
}

/// `Σ_j γ_j η'_j^n`.
fn partial_sum(gammas: &[Arc<Expr>], quotients: &[Arc<Expr>], n: &BigInt) -> Arc<Expr> {
    let mut terms = gammas
        .iter()
        .zip(quotients)
        .map(|(g, q)| Expr::mul(g, &Expr::pow(q, n.clone())));
    let first = terms.next().expect("at least one term");
    terms.fold(first, |acc, t| Expr::add(&acc, &t))
}

/// Smallest `b` with `2^b > x` for `x > 0`.
fn power_of_two_above(x: &Dyadic) -> i64 {
    let mut b = x.magnitude_bits() - 1;
    while Dyadic::pow2(b) <= *x {
        b += 1;
    }
    while b > i64::MIN / 2 && Dyadic::pow2(b - 1) > *x {
        b -= 1;
    }
    b
}

pub fn construct_fluctuating_tail(
    etas: &[Arc<Expr>],
    gammas: &[Arc<Expr>],
    d2: &BigRational,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<FluctuatingTail> {
    let r = etas.len();
    if r < 2 || gammas.len() + 1 != r {
        return Err(Error::InvalidInput(format!(
            "need r >= 2 rotations and r - 1 coefficients (got {r} and {})",
            gammas.len()
        )));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if d2 <= &BigRational::one() {
        return Err(Error::InvalidInput(format!("d_2 = {d2} must exceed 1")));
    }
    let quotients: Vec<Arc<Expr>> = etas[..r - 1].iter().map(|e| Expr::div(e, &etas[r - 1])).collect();
    let exact: Option<Vec<_>> = quotients.iter().map(|q| q.exact()).collect();
    if exact.as_ref().is_some_and(|qs| qs.iter().all(gaussian_unit)) {
        return Err(Error::AllRootsOfUnity);
    }
    let mut max_gamma = Dyadic::zero();
    for g in gammas {
        let z = g.eval_at(policy.initial)?;
        if z.contains_zero() {
            return Err(Error::InvalidInput("coefficients γ_j must be certified nonzero".into()));
        }
        max_gamma = max_gamma.max_ref(z.abs().hi()).clone();
    }
    let b_exp = power_of_two_above(&max_gamma);
    let big_b = if b_exp >= 0 {
        BigRational::from_integer(BigInt::one() << b_exp as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-b_exp) as u64)
    };
    let two_d2 = d2 * BigRational::from_integer(2.into());
    let rb = &big_b * BigRational::from_integer(r.into());
    let mut n = BigInt::one();
    let mut raw = vec![(n.clone(), None, None)];
    for k in 1..depth {
        let e = n
            .to_u64()
            .filter(|&e| e <= MAX_INDEX_EXPONENT)
            .ok_or_else(|| Error::cap(policy.cap, format!("stage {} threshold exponent {n}", k + 1)))?;
        let t = num_traits::pow(two_d2.recip(), e as usize) / &rb;
        let found = near_identity_search_with(&quotients, &t, DEFAULT_BUDGET, policy)?;
        n += &found.n;
        raw.push((n.clone(), Some(found.n), Some(t)));
    }
    let last = n.clone();
    let gamma_r = Expr::unary(Expr::Neg, &partial_sum(gammas, &quotients, &last));
    let base_bits = last.bits() as u32;
    let mut trace = ConstructionTrace::new(Construction::FluctuatingTail)
        .param("d2", d2)
        .param("depth", depth)
        .param("B", &big_b);
    let mut indices = vec![];
    for (i, (nk, step, t)) in raw.into_iter().enumerate() {
        let check = if i + 1 == depth {
            Check::symbolic("u_{n_depth} + gamma_r = 0")
        } else {
            let residual = Expr::add(&partial_sum(gammas, &quotients, &nk), &gamma_r);
            check_below(
                &residual,
                d2,
                &nk,
                Some(&last),
                base_bits,
                "|u_n + gamma_r| < d2^-n",
                policy,
            )?
        };
        if !check.passed {
            return Err(Error::cap(
                policy.cap,
                format!("index {} inequality not certified", i + 1),
            ));
        }
        let mut stage = Stage::new(i + 1, check);
        stage.n = Some(nk.clone());
        stage.step = step;
        stage.epsilon = t;
        trace.stages.push(stage);
        indices.push(nk);
    }
    let pol = policy.with_initial((base_bits + 128).min(policy.cap));
    trace.constant_enclosure = Some(eval_enclosure(&gamma_r, &pol, Some(&Dyadic::pow2(-100)))?.value);
    trace.constant = Some(gamma_r.clone());
    trace.tail_exponent = Some(last);
    Ok(FluctuatingTail {
        trace,
        gamma_r,
        indices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `t_n = Re Σ γ_i α_i^n`.
    RealPart,
    /// Every `γ_i + conj(γ_i')` vanishes; the coefficients are rotated by `-i`.
    ImaginaryPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroEvidence {
    /// `a_n = 0` read off the certified generated sequence.
    Generated,
    /// `|t_n| <= ρ^n |u_n + γ_2| < C^-n <= 1/2` from the verified stage.
    StageBound,
    /// `t_n = 0` identically.
    Symbolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCertificate {
    #[serde(serialize_with = "ser_big")]
    pub n: BigInt,
    pub evidence: ZeroEvidence,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Target-rule nlrs with `a_{n_k} = 0` at every constructed index.
#[derive(Debug, Clone)]
pub struct ZeroRich {
    pub spec: NlrsSpec,
    pub trace: ConstructionTrace,
    pub branch: Branch,
    pub zeros: Vec<ZeroCertificate>,
    /// Values `a_0, ..., a_covered`.
    pub values: Vec<BigInt>,
    pub max_abs: BigInt,
}

impl ZeroRich {
    pub fn covered(&self) -> usize {
        self.values.len() - 1
    }
}

/// Smallest `n` with `C^n >= 2`.
fn halving_index(c: &BigRational) -> u64 {
    let two = BigRational::from_integer(2.into());
    let mut p = c.clone();
    let mut n = 1;
    while p < two {
        p *= c;
        n += 1;
    }
    n
}

/// `η` as an expression, exact when it is a Gaussian rational.
fn eta_expr(eta: &AlgebraicNumber) -> Arc<Expr> {
    match eta.as_gaussian() {
        Some((re, im)) => Expr::add(&Expr::rational(re), &Expr::mul(&Expr::rational(im), &Arc::new(Expr::I))),
        None => Expr::algebraic(eta.clone()),
    }
}

pub fn build_zero_rich(
    rho: &BigRational,
    eta: &AlgebraicNumber,
    c: &BigRational,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<ZeroRich> {
    let one = BigRational::one();
    if rho <= &one || c <= &one {
        return Err(Error::InvalidInput("need rho > 1 and C > 1".into()));
    }
    // Unit-modulus quadratic: minpoly b x^2 + c x + b with c^2 < 4 b^2.
    let mp = eta.minpoly();
    if mp.len() != 3 || mp[0] != mp[2] || eta.is_real() {
        return Err(Error::InvalidInput(
            "eta must be a non-real quadratic of modulus 1 (minpoly b x^2 + c x + b)".into(),
        ));
    }
    if eta.is_root_of_unity() {
        return Err(Error::AllRootsOfUnity);
    }
    let re = BigRational::new(-mp[1].clone(), BigInt::from(2) * &mp[2]);
    let two = BigRational::from_integer(2.into());
    let trace_coeff = -(&two * rho * &re);
    let norm = rho * rho;
    let p = Poly::new(vec![norm.clone(), trace_coeff.clone(), one.clone()]);
    let (_, y) = eta.approx();
    let mut alphas: Vec<AlgebraicNumber> = AlgebraicNumber::roots_of(&p)?.into_iter().map(|(a, _)| a).collect();
    alphas.sort_by(|a, b| (b.approx().1 * y).total_cmp(&(a.approx().1 * y)));
    let e1 = eta_expr(eta);
    let e2 = Expr::unary(Expr::Conj, &e1);
    let d2 = c * rho;
    let tail = construct_fluctuating_tail(&[e1, e2], &[Expr::int(1)], &d2, depth, policy)?;
    let (g1, g2) = (Expr::int(1), tail.gamma_r.clone());
    // α_1 and α_2 are conjugates, so Re Σ γ_i α_i^n vanishes identically iff
    // γ_1 + conj(γ_2) = 0.
    let pairing = Expr::add(&g1, &Expr::unary(Expr::Conj, &g2));
    let bits = tail.indices.last().map_or(0, |n| n.bits() as u32);
    let pol = policy.with_initial((bits + 128).min(policy.cap));
    let branch = match pairing.exact() {
        Some((a, b)) if a.is_zero() && b.is_zero() => Branch::ImaginaryPart,
        _ if eval_enclosure(&pairing, &pol, None)?.value.excludes_zero() => Branch::RealPart,
        _ => return Err(Error::cap(policy.cap, "pairing cancellation undecided")),
    };
    let rotate = |g: Arc<Expr>| match branch {
        Branch::RealPart => g,
        Branch::ImaginaryPart => Expr::mul(&Expr::unary(Expr::Neg, &Arc::new(Expr::I)), &g),
    };
    let spec = NlrsSpec {
        degree: 2,
        coefficients: vec![Coefficient::Rational(norm), Coefficient::Rational(trace_coeff)],
        initial: vec![],
        rule: Rule::Target {
            terms: vec![
                TargetTerm {
                    gamma: rotate(g1),
                    alpha: alphas[0].clone(),
                },
                TargetTerm {
                    gamma: rotate(g2),
                    alpha: alphas[1].clone(),
                },
            ],
            rounding: RoundingMode::NearestHalfUp,
            offset: BigInt::zero(),
        },
    };
    spec.validate()?;
    let covered = tail
        .indices
        .iter()
        .filter_map(|n| n.to_u64())
        .filter(|&n| n <= GENERATION_LIMIT)
        .max()
        .unwrap_or(0)
        .max(MIN_COVERED);
    let seq = generate_with(&spec, covered as usize, policy)?;
    let values = seq
        .integer_values()
        .ok_or_else(|| Error::cap(policy.cap, "zero-rich values not all certified integers"))?;
    let max_abs = values.iter().map(|v| v.abs()).max().unwrap_or_default();
    let mut zeros = vec![];
    for (i, n) in tail.indices.iter().enumerate() {
        let evidence = if i + 1 == depth {
            ZeroEvidence::Symbolic
        } else if n.to_u64().is_some_and(|n| n <= covered) {
            ZeroEvidence::Generated
        } else {
            ZeroEvidence::StageBound
        };
        if evidence == ZeroEvidence::Generated && !values[n.to_usize().unwrap()].is_zero() {
            return Err(Error::cap(policy.cap, format!("a_{n} is not zero")));
        }
        // |t_n| < C^-n rounds to 0 once C^n >= 2.
        if evidence == ZeroEvidence::StageBound && n < &BigInt::from(halving_index(c)) {
            return Err(Error::InvalidInput(format!("C^-{n} exceeds 1/2")));
        }
        zeros.push(ZeroCertificate { n: n.clone(), evidence });
    }
    let mut trace = tail.trace;
    trace.construction = Construction::ZeroRich;
    trace = trace.param("rho", rho).param("C", c).param("covered", covered);
    Ok(ZeroRich {
        spec,
        trace,
        branch,
        zeros,
        values,
        max_abs,
    })
}
