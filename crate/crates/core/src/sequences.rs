//! Nearly linear recurrence sequences: generation, error terms, associated
//! linear recurrences and the decomposition `a_n = ã_n + Σ â_{n-j} e_{d-1+j}`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebraic::{AlgebraicNumber, ModulusClass};
use crate::arithmetic::{
    certified_round, eval_enclosure, round_rational, ComplexEnclosure, Dyadic, Expr, PrecisionPolicy, RealEnclosure,
    RoundingMode,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Working precision for enclosure-valued terms that need no rounding.
const VALUE_PRECISION: u32 = 256;

/// A recurrence coefficient `A_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Rational(BigRational),
    Algebraic(AlgebraicNumber),
}

impl Coefficient {
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Coefficient::Rational(r) => Some(r.clone()),
            Coefficient::Algebraic(a) => a.as_rational(),
        }
    }

    pub fn enclosure(&self, prec: u32) -> ComplexEnclosure {
        match self {
            Coefficient::Rational(r) => ComplexEnclosure::from_rationals(r, &BigRational::zero(), prec),
            Coefficient::Algebraic(a) => a.enclosure(prec),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Coefficient::Rational(_) => true,
            Coefficient::Algebraic(a) => a.is_real(),
        }
    }
}

/// One summand `γ α^n` of a target rule.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTerm {
    pub gamma: Arc<Expr>,
    pub alpha: AlgebraicNumber,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// `0 <= s_{n+d} + S_{d-1}s_{n+d-1} + ... + S_0 s_n < 1`.
    Srs,
    /// `a_n = round(Re(Σ γ_i α_i^n) + u)`.
    Target {
        terms: Vec<TargetTerm>,
        rounding: RoundingMode,
        offset: BigInt,
    },
    /// `errors[j] = e_{d+j}`, all bounded in modulus by `bound`.
    ExplicitErrors { errors: Vec<Arc<Expr>>, bound: BigRational },
}

/// A fully determined nlrs.
#[derive(Debug, Clone, PartialEq)]
pub struct NlrsSpec {
    pub degree: usize,
    /// `A_0, ..., A_{d-1}`.
    pub coefficients: Vec<Coefficient>,
    /// `a_0, ..., a_{d-1}`; may be empty for a target rule.
    pub initial: Vec<BigRational>,
    pub rule: Rule,
}

/// A term of a generated sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Approx(ComplexEnclosure),
}

impl Value {
    pub fn integer(n: BigInt) -> Self {
        Value::Exact(BigRational::from_integer(n))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_exact().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn enclosure(&self, prec: u32) -> ComplexEnclosure {
        match self {
            Value::Exact(r) => ComplexEnclosure::from_rationals(r, &BigRational::zero(), prec),
            Value::Approx(z) => z.clone(),
        }
    }

    /// Exactly zero, or an enclosure containing zero.
    pub fn is_zero_compatible(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(z) => z.contains_zero(),
        }
    }

    /// Upper bound for the modulus.
    pub fn abs_upper(&self) -> RealEnclosure {
        match self {
            Value::Exact(r) => RealEnclosure::from_rational(&r.abs(), VALUE_PRECISION),
            Value::Approx(z) => z.abs(),
        }
    }
}

/// Values and error terms `e_0, ..., e_N` of an nlrs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSequence {
    pub degree: usize,
    pub values: Vec<Value>,
    pub errors: Vec<Value>,
    /// `sup |e_n|` over the generated range.
    pub observed_sup: RealEnclosure,
    /// Bound on `|e_n|` for every `n`, when the rule provides one.
    pub apriori: Option<RealEnclosure>,
    /// Largest working precision used by a certified rounding, 0 if none.
    pub max_precision: u32,
}

impl GeneratedSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The a priori bound when present, else the observed supremum.
    pub fn bound(&self) -> RealEnclosure {
        self.apriori.clone().unwrap_or_else(|| self.observed_sup.clone())
    }

    /// Integer values, when every term is an exact integer.
    pub fn integer_values(&self) -> Option<Vec<BigInt>> {
        self.values.iter().map(Value::as_integer).collect()
    }

    /// `e_d, e_{d+1}, ...`, the coefficients of the correction series.
    pub fn tail_errors(&self) -> &[Value] {
        &self.errors[self.degree.min(self.errors.len())..]
    }
}

impl NlrsSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.degree;
        if d == 0 {
            return Err(Error::InvalidSpec("degree must be at least 1".into()));
        }
        if self.coefficients.len() != d {
            return Err(Error::InvalidSpec(format!(
                "{} coefficients given for degree {d}",
                self.coefficients.len()
            )));
        }
        if d > 1 && self.coefficients.iter().any(|c| c.as_rational().is_none()) {
            return Err(Error::InvalidSpec(
                "irrational algebraic coefficients need degree 1".into(),
            ));
        }
        let integral = self.initial.iter().all(|a| a.is_integer());
        match &self.rule {
            Rule::Srs => {
                if self.initial.len() != d || !integral {
                    return Err(Error::InvalidSpec(format!("SRS rule needs {d} integer initial terms")));
                }
                if !self.coefficients.iter().all(Coefficient::is_real) {
                    return Err(Error::InvalidSpec("SRS coefficients must be real".into()));
                }
            }
            Rule::Target { terms, .. } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("target rule without terms".into()));
                }
                if !self.initial.is_empty() && (self.initial.len() != d || !integral) {
                    return Err(Error::InvalidSpec(format!(
                        "target rule takes no initial terms or {d} integers"
                    )));
                }
            }
            Rule::ExplicitErrors { errors, bound } => {
                if self.initial.len() != d {
                    return Err(Error::InvalidSpec(format!("{d} initial terms required")));
                }
                if bound.is_negative() {
                    return Err(Error::InvalidSpec("error bound must be non-negative".into()));
                }
                for (j, e) in errors.iter().enumerate() {
                    if let Some((re, im)) = e.exact() {
                        if &re * &re + &im * &im > bound * bound {
                            return Err(Error::InvalidSpec(format!("e_{} exceeds the bound", d + j)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Rational `A_i`, when every coefficient is rational.
    pub fn rational_coefficients(&self) -> Option<Vec<BigRational>> {
        self.coefficients.iter().map(Coefficient::as_rational).collect()
    }

    /// `a_0, ..., a_{d-1}`; for a target rule these are the first `d` target values.
    pub fn initial_terms(&self) -> Result<Vec<Value>> {
        if self.initial.len() == self.degree {
            return Ok(self.initial.iter().cloned().map(Value::Exact).collect());
        }
        let seq = generate(self, self.degree - 1)?;
        Ok(seq.values)
    }
}

/// Generates `a_0, ..., a_N` and `e_0, ..., e_N` under the default policy.
pub fn generate(spec: &NlrsSpec, n: usize) -> Result<GeneratedSequence> {
    generate_with(spec, n, &PrecisionPolicy::from_env())
}

pub fn generate_with(spec: &NlrsSpec, n: usize, policy: &PrecisionPolicy) -> Result<GeneratedSequence> {
    generate_inner(spec, n, policy, false)
}

/// Like [`generate_with`] but always certifies target roundings through
/// enclosures, even when exact arithmetic is available.
pub fn generate_certified(spec: &NlrsSpec, n: usize, policy: &PrecisionPolicy) -> Result<GeneratedSequence> {
    generate_inner(spec, n, policy, true)
}

fn generate_inner(spec: &NlrsSpec, n: usize, policy: &PrecisionPolicy, force: bool) -> Result<GeneratedSequence> {
    spec.validate()?;
    let d = spec.degree;
    let count = n.max(d - 1) + 1;
    let (values, max_precision) = match &spec.rule {
        Rule::Srs => srs_values(spec, count, policy)?,
        Rule::Target {
            terms,
            rounding,
            offset,
        } => {
            let (values, prec) = target_values(terms, *rounding, offset, count, policy, force)?;
            if !spec.initial.is_empty() {
                for (j, a) in spec.initial.iter().enumerate() {
                    if Value::Exact(a.clone()) != values[j] {
                        return Err(Error::InvalidSpec(format!(
                            "initial term a_{j} differs from the target value"
                        )));
                    }
                }
            }
            (values, prec)
        }
        Rule::ExplicitErrors { errors, .. } => (explicit_values(spec, errors, count)?, 0),
    };
    let errors = error_terms(&spec.coefficients, &values, d);
    let mut sup = RealEnclosure::zero(VALUE_PRECISION);
    for e in &errors {
        sup = sup.max_with(&e.abs_upper());
    }
    if let Rule::Srs = spec.rule {
        for e in &errors[d..] {
            if let Value::Exact(r) = e {
                debug_assert!(!r.is_negative() && r < &BigRational::one());
            }
        }
    }
    Ok(GeneratedSequence {
        degree: d,
        values,
        errors,
        observed_sup: sup,
        apriori: apriori_bound(spec, policy)?,
        max_precision,
    })
}

fn bits_of(v: &BigRational) -> u32 {
    (v.numer().bits() as u32).max(v.denom().bits() as u32)
}

fn srs_values(spec: &NlrsSpec, count: usize, policy: &PrecisionPolicy) -> Result<(Vec<Value>, u32)> {
    let d = spec.degree;
    let mut s: Vec<BigInt> = spec.initial.iter().map(|a| a.to_integer()).collect();
    let mut max_prec = 0;
    if let Some(coeffs) = spec.rational_coefficients() {
        while s.len() < count {
            let k = s.len() - d;
            let x: BigRational = (0..d)
                .map(|i| &coeffs[i] * BigRational::from_integer(s[k + i].clone()))
                .sum();
            s.push(-x.floor().to_integer());
        }
    } else {
        while s.len() < count {
            let k = s.len() - d;
            let extra = s[k..].iter().map(|v| v.bits() as u32).max().unwrap_or(0) + 16;
            let (next, prec) = round_with(policy, extra, RoundingMode::Floor, |p| {
                let mut x = RealEnclosure::zero(p);
                for i in 0..d {
                    let c = spec.coefficients[i].enclosure(p).re;
                    x = x.add_ref(&c.mul_int(&s[k + i]));
                }
                Ok(x)
            })?;
            max_prec = max_prec.max(prec);
            s.push(-next);
        }
    }
    Ok((s.into_iter().map(Value::integer).collect(), max_prec))
}

/// Certified rounding at `extra` bits above each precision of the schedule.
fn round_with(
    policy: &PrecisionPolicy,
    extra: u32,
    mode: RoundingMode,
    mut eval: impl FnMut(u32) -> Result<RealEnclosure>,
) -> Result<(BigInt, u32)> {
    let mut last = None;
    for p in policy.schedule() {
        let prec = p.saturating_add(extra).min(policy.cap.max(p));
        match eval(prec).and_then(|x| certified_round(&x, mode)) {
            Ok(v) => return Ok((v, prec)),
            Err(e) if e.is_precision() || e == Error::DivisionByUncertainZero => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::cap(policy.cap, "certified rounding")))
}

type Gauss = (BigRational, BigRational);

fn target_values(
    terms: &[TargetTerm],
    mode: RoundingMode,
    offset: &BigInt,
    count: usize,
    policy: &PrecisionPolicy,
    force: bool,
) -> Result<(Vec<Value>, u32)> {
    let u = BigRational::from_integer(offset.clone());
    let exact: Option<Vec<(Gauss, Gauss)>> = terms
        .iter()
        .map(|t| Some((t.gamma.exact()?, t.alpha.as_gaussian()?)))
        .collect();
    if let (Some(exact), false) = (exact, force) {
        let mut powers: Vec<Gauss> = exact.iter().map(|(g, _)| g.clone()).collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let re: BigRational = powers.iter().map(|p| p.0.clone()).sum();
            out.push(Value::integer(round_rational(&(re + &u), mode)));
            for (p, (_, a)) in powers.iter_mut().zip(&exact) {
                *p = (&p.0 * &a.0 - &p.1 * &a.1, &p.0 * &a.1 + &p.1 * &a.0);
            }
        }
        return Ok((out, 0));
    }
    // Bits needed to resolve the largest term: about N log2 max|α|.
    let growth = terms
        .iter()
        .map(|t| {
            let (x, y) = t.alpha.approx();
            x.hypot(y).log2().max(0.0)
        })
        .fold(0.0, f64::max);
    let magnitude = terms
        .iter()
        .map(|t| {
            let (x, y) = t.gamma.eval_at(64).map(|g| g.mid_f64()).unwrap_or((1.0, 0.0));
            x.hypot(y).log2().max(0.0)
        })
        .fold(0.0, f64::max);
    let need = (count as f64 * (growth + 1e-9) + magnitude + 64.0 + (count as f64).log2()).ceil() as u32;
    let wp = policy.initial.saturating_add(need).min(policy.cap.max(policy.initial));
    let gammas: Vec<ComplexEnclosure> = terms
        .iter()
        .map(|t| gamma_enclosure(&t.gamma, wp, policy))
        .collect::<Result<_>>()?;
    let alphas: Vec<ComplexEnclosure> = terms.iter().map(|t| t.alpha.enclosure(wp)).collect();
    let mut powers = gammas.clone();
    let uenc = RealEnclosure::from_int(offset.clone(), wp);
    let mut out = Vec::with_capacity(count);
    let mut max_prec = wp;
    for n in 0..count {
        let mut t = uenc.clone();
        for p in &powers {
            t = t.add_ref(&p.re);
        }
        let v = match certified_round(&t, mode) {
            Ok(v) => v,
            Err(e) if e.is_precision() => {
                let exp = BigInt::from(n);
                let (v, prec) = round_with(policy, need, mode, |p| {
                    let mut t = RealEnclosure::from_int(offset.clone(), p);
                    for term in terms {
                        let z =
                            gamma_enclosure(&term.gamma, p, policy)?.mul_ref(&term.alpha.enclosure(p).pow_big(&exp)?);
                        t = t.add_ref(&z.re);
                    }
                    Ok(t)
                })?;
                max_prec = max_prec.max(prec);
                v
            }
            Err(e) => return Err(e),
        };
        out.push(Value::integer(v));
        for (p, a) in powers.iter_mut().zip(&alphas) {
            *p = p.mul_ref(a);
        }
    }
    Ok((out, max_prec))
}

/// `γ` with absolute radius at most `2^-bits`; symbolic constants with huge
/// exponents need more working bits than the radius alone.
fn gamma_enclosure(gamma: &Arc<Expr>, bits: u32, policy: &PrecisionPolicy) -> Result<ComplexEnclosure> {
    let pol = policy.with_initial(bits);
    Ok(eval_enclosure(gamma, &pol, Some(&Dyadic::pow2(-(bits as i64))))?.value)
}

fn explicit_values(spec: &NlrsSpec, errors: &[Arc<Expr>], count: usize) -> Result<Vec<Value>> {
    let d = spec.degree;
    if count > d + errors.len() {
        return Err(Error::InvalidSpec(format!(
            "explicit error list covers n <= {}",
            d + errors.len() - 1
        )));
    }
    let mut a: Vec<Value> = spec.initial.iter().cloned().map(Value::Exact).collect();
    let coeffs = spec.rational_coefficients();
    for (j, e) in errors.iter().enumerate().take(count - d) {
        let exact = match (&coeffs, e.exact()) {
            (Some(c), Some((re, im))) if im.is_zero() => {
                let window: Option<Vec<&BigRational>> = a[j..j + d].iter().map(Value::as_exact).collect();
                window.map(|w| re - (0..d).map(|i| &c[i] * w[i]).sum::<BigRational>())
            }
            _ => None,
        };
        let next = match exact {
            Some(v) => Value::Exact(v),
            None => {
                let p = VALUE_PRECISION;
                let mut x = e.eval_at(p)?;
                for i in 0..d {
                    x = x.sub_ref(&spec.coefficients[i].enclosure(p).mul_ref(&a[j + i].enclosure(p)));
                }
                Value::Approx(x)
            }
        };
        a.push(next);
    }
    Ok(a)
}

/// `e_n = a_n + A_{d-1}a_{n-1} + ... + A_0 a_{n-d}` for `n >= d`, zero before.
fn error_terms(coeffs: &[Coefficient], values: &[Value], d: usize) -> Vec<Value> {
    let rational: Option<Vec<BigRational>> = coeffs.iter().map(Coefficient::as_rational).collect();
    let mut out = vec![Value::Exact(BigRational::zero()); d.min(values.len())];
    for n in d..values.len() {
        let window = &values[n - d..=n];
        let exact = rational.as_ref().and_then(|c| {
            let w: Option<Vec<&BigRational>> = window.iter().map(Value::as_exact).collect();
            w.map(|w| w[d].clone() + (0..d).map(|i| &c[i] * w[i]).sum::<BigRational>())
        });
        out.push(match exact {
            Some(e) => Value::Exact(e),
            None => {
                let extra = window
                    .iter()
                    .filter_map(Value::as_exact)
                    .map(bits_of)
                    .max()
                    .unwrap_or(0);
                let p = VALUE_PRECISION + extra;
                let mut x = window[d].enclosure(p);
                for i in 0..d {
                    x = x.add_ref(&coeffs[i].enclosure(p).mul_ref(&window[i].enclosure(p)));
                }
                Value::Approx(x)
            }
        });
    }
    out
}

/// Characteristic polynomial `x^d + A_{d-1}x^{d-1} + ... + A_0` evaluated at `z`.
fn eval_charpoly(coeffs: &[Coefficient], z: &ComplexEnclosure, prec: u32) -> ComplexEnclosure {
    let mut acc = ComplexEnclosure::one(prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(z).add_ref(&c.enclosure(prec));
    }
    acc
}

fn is_charpoly_root(coeffs: &[Coefficient], alpha: &AlgebraicNumber) -> Result<bool> {
    if let Some(c) = coeffs.iter().map(Coefficient::as_rational).collect::<Option<Vec<_>>>() {
        let p = crate::algebraic::Poly::monic_from_lower(&c);
        return Ok(p.rem(&alpha.minpoly_poly()).is_zero());
    }
    // Degree 1 with an algebraic coefficient: the root is -A_0.
    match &coeffs[0] {
        Coefficient::Algebraic(a) => Ok(&a.neg() == alpha),
        Coefficient::Rational(r) => Ok(alpha.as_rational().as_ref() == Some(&-r)),
    }
}

/// A priori bound for `|e_n|` implied by the rule.
fn apriori_bound(spec: &NlrsSpec, policy: &PrecisionPolicy) -> Result<Option<RealEnclosure>> {
    let prec = VALUE_PRECISION;
    Ok(match &spec.rule {
        Rule::Srs => Some(RealEnclosure::one(prec)),
        Rule::ExplicitErrors { bound, .. } => Some(RealEnclosure::from_rational(bound, prec)),
        Rule::Target {
            terms,
            rounding,
            offset,
        } => {
            // e_n = u P(1) + Σ_k P_k δ_{n-d+k} + Σ_{P(α)≠0} γ P(α) α^{n-d}, δ the rounding error.
            let mut p: Vec<ComplexEnclosure> = spec.coefficients.iter().map(|c| c.enclosure(prec)).collect();
            p.push(ComplexEnclosure::one(prec));
            let p1 = eval_charpoly(&spec.coefficients, &ComplexEnclosure::one(prec), prec);
            let mut total = p1.abs().mul_int(&offset.abs());
            let real = spec.coefficients.iter().all(Coefficient::is_real);
            let rounding_part = match rounding {
                RoundingMode::NearestHalfUp => {
                    let s = p.iter().fold(RealEnclosure::zero(prec), |acc, c| acc.add_ref(&c.abs()));
                    s.mul_pow2(-1)
                }
                _ if real => {
                    let (mut pos, mut neg) = (RealEnclosure::zero(prec), RealEnclosure::zero(prec));
                    for c in &p {
                        let r = c.re.clone();
                        pos = pos.add_ref(&r.max_with(&RealEnclosure::zero(prec)));
                        neg = neg.sub_ref(&r.min_with(&RealEnclosure::zero(prec)));
                    }
                    pos.max_with(&neg)
                }
                _ => p.iter().fold(RealEnclosure::zero(prec), |acc, c| acc.add_ref(&c.abs())),
            };
            total = total.add_ref(&rounding_part);
            for t in terms {
                if is_charpoly_root(&spec.coefficients, &t.alpha)? {
                    continue;
                }
                if t.alpha.modulus_class(policy.cap)? == ModulusClass::Above {
                    return Ok(None);
                }
                let pa = eval_charpoly(&spec.coefficients, &t.alpha.enclosure(prec), prec);
                total = total.add_ref(&t.gamma.eval_at(prec)?.abs().mul_ref(&pa.abs()));
            }
            Some(total)
        }
    })
}

/// `x_{k+d} = -(A_{d-1}x_{k+d-1} + ... + A_0 x_k)` from `init`, up to index `n`.
pub fn linear_recurrence<S: Scalar>(coeffs: &[S], init: &[S], n: usize) -> Vec<S> {
    let d = coeffs.len();
    let mut x: Vec<S> = init.to_vec();
    while x.len() <= n {
        let k = x.len() - d;
        let mut acc = S::zero();
        for i in 0..d {
            acc = acc + coeffs[i].clone() * x[k + i].clone();
        }
        x.push(-acc);
    }
    x.truncate(n + 1);
    x
}

/// The lrs `â` (initial terms `0, ..., 0, 1`) and `ã` (initial terms
/// `a_0, ..., a_{d-1}`), indices `0..=N`.
pub fn associated_lrs(spec: &NlrsSpec, n: usize) -> Result<(Vec<Value>, Vec<Value>)> {
    spec.validate()?;
    let d = spec.degree;
    let init = spec.initial_terms()?;
    let exact_init: Option<Vec<BigRational>> = init.iter().map(|v| v.as_exact().cloned()).collect();
    if let (Some(c), Some(a0)) = (spec.rational_coefficients(), exact_init) {
        let mut unit = vec![BigRational::zero(); d];
        unit[d - 1] = BigRational::one();
        let hat = linear_recurrence(&c, &unit, n);
        let tilde = linear_recurrence(&c, &a0, n);
        return Ok((
            hat.into_iter().map(Value::Exact).collect(),
            tilde.into_iter().map(Value::Exact).collect(),
        ));
    }
    let growth = spec
        .coefficients
        .iter()
        .map(|c| c.enclosure(64).abs().mid_f64().log2().max(0.0))
        .fold(0.0, f64::max);
    let prec = VALUE_PRECISION + (n as f64 * (growth + 1.0)).ceil() as u32;
    let c: Vec<ComplexEnclosure> = spec.coefficients.iter().map(|c| c.enclosure(prec)).collect();
    let mut unit = vec![ComplexEnclosure::zero(prec); d];
    unit[d - 1] = ComplexEnclosure::one(prec);
    let a0: Vec<ComplexEnclosure> = init.iter().map(|v| v.enclosure(prec)).collect();
    let hat = linear_recurrence(&c, &unit, n);
    let tilde = linear_recurrence(&c, &a0, n);
    Ok((
        hat.into_iter().map(Value::Approx).collect(),
        tilde.into_iter().map(Value::Approx).collect(),
    ))
}

/// Residuals `a_n - ã_n - Σ_{j=1}^{n-d+1} â_{n-j} e_{d-1+j}` for every `n`.
pub fn verify_decomposition(seq: &GeneratedSequence, hat: &[Value], tilde: &[Value]) -> Result<Vec<Value>> {
    let len = seq.values.len();
    for got in [hat.len(), tilde.len(), seq.errors.len()] {
        if got != len {
            return Err(Error::LengthMismatch { expected: len, got });
        }
    }
    let d = seq.degree;
    let all: Option<Vec<&BigRational>> = seq
        .values
        .iter()
        .chain(&seq.errors)
        .chain(hat)
        .chain(tilde)
        .map(Value::as_exact)
        .collect();
    if let Some(all) = all {
        let mut l = BigInt::one();
        for r in &all {
            l = l.lcm(r.denom());
        }
        let scale = |v: &Value| -> BigInt {
            let r = v.as_exact().unwrap();
            r.numer() * (&l / r.denom())
        };
        let a: Vec<BigInt> = seq.values.iter().map(scale).collect();
        let e: Vec<BigInt> = seq.errors.iter().map(scale).collect();
        let h: Vec<BigInt> = hat.iter().map(scale).collect();
        let t: Vec<BigInt> = tilde.iter().map(scale).collect();
        let l2 = &l * &l;
        return Ok((0..len)
            .map(|n| {
                let mut sum = BigInt::zero();
                if n + 1 >= d {
                    for j in 1..=n + 1 - d {
                        sum += &h[n - j] * &e[d - 1 + j];
                    }
                }
                let num = (&a[n] - &t[n]) * &l - sum;
                Value::Exact(BigRational::new(num, l2.clone()))
            })
            .collect());
    }
    let prec = [&seq.values[..], &seq.errors, hat, tilde]
        .iter()
        .flat_map(|s| s.iter())
        .map(|v| match v {
            Value::Approx(z) => z.precision(),
            Value::Exact(r) => VALUE_PRECISION + bits_of(r),
        })
        .max()
        .unwrap_or(VALUE_PRECISION);
    Ok((0..len)
        .map(|n| {
            let mut r = seq.values[n].enclosure(prec).sub_ref(&tilde[n].enclosure(prec));
            if n + 1 >= d {
                for j in 1..=n + 1 - d {
                    r = r.sub_ref(
                        &hat[n - j]
                            .enclosure(prec)
                            .mul_ref(&seq.errors[d - 1 + j].enclosure(prec)),
                    );
                }
            }
            Value::Approx(r)
        })
        .collect())
}

/// Decimal rendering of a term; exact integers print in full.
pub fn decimal(v: &Value, digits: usize) -> String {
    match v {
        Value::Exact(r) => {
            if r.is_integer() {
                r.to_integer().to_string()
            } else {
                crate::arithmetic::rational_to_decimal(r, digits, crate::arithmetic::Round::Down)
            }
        }
        Value::Approx(z) => {
            let (x, _) = z.mid_f64();
            let digits = digits.min(17);
            if z.im.contains_zero() {
                format!("{x:.digits$}")
            } else {
                let (_, y) = z.mid_f64();
                format!("{x:.digits$}{y:+.digits$}i")
            }
        }
    }
}
