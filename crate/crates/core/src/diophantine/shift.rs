use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cf::continued_fraction_enclosure;
use super::trace::{check_below, Check, Construction, ConstructionTrace, Stage};
use crate::algebraic::{multiplicative_independence, AlgebraicNumber, DEFAULT_EXPONENT_BOUND};
use crate::arithmetic::{eval_enclosure, Dyadic, Expr, PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};

/// Largest `k' + m'` for which the next threshold `(2C)^-(k'+m')` is formed.
const MAX_THRESHOLD_EXPONENT: u64 = 1 << 20;

/// Output of the shift construction: `|a k - b m - c| < C^-(k+m)` along
/// the cumulative pairs, with `c = a K - b M` for the last pair `(K, M)`.
#[derive(Debug, Clone)]
pub struct ShiftConstruction {
    pub trace: ConstructionTrace,
    pub constant: Arc<Expr>,
    /// Cumulative `(k'_n, m'_n)`.
    pub pairs: Vec<(BigInt, BigInt)>,
}

impl ShiftConstruction {
    pub fn last(&self) -> &(BigInt, BigInt) {
        self.pairs.last().expect("depth >= 1")
    }
}

/// Bits below 1 needed to resolve a positive rational of this size.
fn small_bits(r: &BigRational) -> u32 {
    (r.denom().bits() as i64 - r.numer().bits() as i64 + 2).max(0) as u32
}

fn positive(e: &Arc<Expr>, name: &str) -> Result<()> {
    let v = e.eval_at(128)?;
    if !v.re.is_certainly_positive() || !v.im.contains_zero() {
        return Err(Error::InvalidInput(format!("{name} must be a certified positive real")));
    }
    Ok(())
}

/// Next stage: the first convergent `p/q` of `a/b` past `from` with
/// `p >= 1` and `|a q - b p| < ε`; only even convergents (`s > 0`) when
/// `positive` is set.
fn next_stage(
    a: &Arc<Expr>,
    b: &Arc<Expr>,
    eps: &BigRational,
    from: usize,
    positive: bool,
    policy: &PrecisionPolicy,
) -> Result<(usize, BigInt, BigInt, RealEnclosure)> {
    let eps_bits = small_bits(eps);
    let start = policy.initial.max(3 * eps_bits + 128).min(policy.cap);
    for prec in policy.with_initial(start).schedule() {
        let (ae, be) = (a.eval_at(prec)?.re, b.eval_at(prec)?.re);
        let cf = match continued_fraction_enclosure(&ae.div_ref(&be)?, usize::MAX / 2) {
            Ok(cf) => cf,
            Err(e) if e.is_precision() => continue,
            Err(e) => return Err(e),
        };
        let bound = RealEnclosure::from_rational(eps, prec);
        let mut idx = from;
        while idx < cf.len() {
            let (p, q) = &cf.convergents[idx];
            idx += 1;
            if (positive && idx.is_multiple_of(2)) || !p.is_positive() {
                continue;
            }
            let s = ae.mul_int(q).sub_ref(&be.mul_int(p));
            let size = s.abs();
            if size.certainly_lt(&bound) && (!positive || s.is_certainly_positive()) {
                return Ok((idx - 1, q.clone(), p.clone(), s));
            }
            if !bound.certainly_le(&size) {
                break;
            }
        }
    }
    Err(Error::cap(policy.cap, "shift stage selection"))
}

/// Nonnegative `k, m` with `|a k - b m - c| < C^-(k+m)` for a constructed
/// shift `c`, truncated after `depth` stages.
pub fn construct_shift(
    a: &Arc<Expr>,
    b: &Arc<Expr>,
    c: &BigRational,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<ShiftConstruction> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if c <= &BigRational::one() {
        return Err(Error::InvalidInput(format!("C = {c} must exceed 1")));
    }
    positive(a, "a")?;
    positive(b, "b")?;
    if let (Some((x, _)), Some((y, _))) = (a.exact(), b.exact()) {
        return Err(Error::InvalidInput(format!("a/b = {} is rational", x / y)));
    }
    let two_c = c * BigRational::from_integer(2.into());
    let mut eps = BigRational::new(1.into(), 2.into());
    let mut from = 0usize;
    let (mut kt, mut mt) = (BigInt::zero(), BigInt::zero());
    let mut raw = vec![];
    for n in 1..=depth {
        let (idx, k, m, s) = next_stage(a, b, &eps, from, n == 1, policy)?;
        from = idx + 1;
        kt += &k;
        mt += &m;
        raw.push((k, m, kt.clone(), mt.clone(), s, eps.clone()));
        if n < depth {
            let e = (&kt + &mt)
                .to_u64()
                .filter(|&e| e <= MAX_THRESHOLD_EXPONENT)
                .ok_or_else(|| Error::cap(policy.cap, format!("stage {} threshold exponent {}", n + 1, &kt + &mt)))?;
            let decay = num_traits::pow(two_c.recip(), e as usize);
            let half = &eps / BigRational::from_integer(2.into());
            let mut next = half.min(decay);
            if n == 1 {
                // Keeps c > s_1 / 2 > 0, hence γ = e^c > 1.
                next = next.min(raw[0].4.lo().to_rational() / BigRational::from_integer(4.into()));
            }
            eps = next * BigRational::new(15.into(), 16.into());
        }
    }
    let (big_k, big_m) = (kt, mt);
    let constant = Expr::sub(
        &Expr::mul(a, &Expr::int(big_k.clone())),
        &Expr::mul(b, &Expr::int(big_m.clone())),
    );
    let tail_exponent = &big_k + &big_m;
    let base_bits = big_k.bits().max(big_m.bits()) as u32;
    let mut trace = ConstructionTrace::new(Construction::Shift)
        .param("C", c)
        .param("depth", depth);
    let mut pairs = vec![];
    for (i, (k, m, kt, mt, s, eps)) in raw.into_iter().enumerate() {
        let check = if i + 1 == depth {
            Check::symbolic("a K - b M - c = 0")
        } else {
            let residual = Expr::sub(
                &Expr::mul(a, &Expr::int(&kt - &big_k)),
                &Expr::mul(b, &Expr::int(&mt - &big_m)),
            );
            check_below(
                &residual,
                c,
                &(&kt + &mt),
                Some(&tail_exponent),
                base_bits,
                "|a k' - b m' - c| < C^-(k'+m')",
                policy,
            )?
        };
        if !check.passed {
            return Err(Error::cap(
                policy.cap,
                format!("stage {} inequality not certified", i + 1),
            ));
        }
        let mut stage = Stage::new(i + 1, check);
        stage.k = Some(k);
        stage.m = Some(m);
        stage.k_total = Some(kt.clone());
        stage.m_total = Some(mt.clone());
        stage.s = Some(s);
        stage.epsilon = Some(eps);
        trace.stages.push(stage);
        pairs.push((kt, mt));
    }
    let pol = policy.with_initial((base_bits + 128).min(policy.cap));
    trace.constant_enclosure = Some(eval_enclosure(&constant, &pol, Some(&Dyadic::pow2(-100)))?.value);
    trace.constant = Some(constant.clone());
    trace.tail_exponent = Some(tail_exponent);
    Ok(ShiftConstruction { trace, constant, pairs })
}

/// Output of the multiplicative construction.
#[derive(Debug, Clone)]
pub struct GammaConstruction {
    pub trace: ConstructionTrace,
    /// `γ = exp(K log α - M log β) = α^K β^-M`.
    pub gamma: Arc<Expr>,
    /// Retained pairs `(k, m)` in order; the last one is exact.
    pub pairs: Vec<(BigInt, BigInt)>,
}

fn as_algebraic(e: &Expr) -> Option<AlgebraicNumber> {
    match e {
        Expr::Algebraic(a) => Some((**a).clone()),
        _ => {
            let (re, im) = e.exact()?;
            im.is_zero().then(|| AlgebraicNumber::from_rational(&re))
        }
    }
}

/// Rational upper bound of a certified positive real.
fn rational_upper(e: &Arc<Expr>) -> Result<BigRational> {
    let v = e.eval_at(64)?;
    Ok(v.re.hi().to_rational())
}

/// `γ > 1` with `|α^k - γβ^m| < C^-(k+m)` along the constructed pairs.
pub fn construct_gamma(
    alpha: &Arc<Expr>,
    beta: &Arc<Expr>,
    c: &BigRational,
    depth: usize,
    policy: &PrecisionPolicy,
) -> Result<GammaConstruction> {
    let one = RealEnclosure::one(128);
    for (e, name) in [(alpha, "alpha"), (beta, "beta")] {
        let v = e.eval_at(128)?;
        if !v.re.certainly_gt(&one) || !v.im.contains_zero() {
            return Err(Error::InvalidInput(format!("{name} must be a certified real > 1")));
        }
    }
    if let (Some(x), Some(y)) = (as_algebraic(alpha), as_algebraic(beta)) {
        if let crate::algebraic::Independence::Dependent { u, v } =
            multiplicative_independence(&x, &y, DEFAULT_EXPONENT_BOUND)?
        {
            return Err(Error::DependentBases { u, v });
        }
    }
    // The proof amplifies C to 2βC; any rational upper bound of β works.
    let amplified = c * rational_upper(beta)? * BigRational::from_integer(2.into());
    let (la, lb) = (Expr::unary(Expr::Ln, alpha), Expr::unary(Expr::Ln, beta));
    let shift = construct_shift(&la, &lb, &amplified, depth, policy)?;
    let gamma = Expr::unary(Expr::Exp, &shift.constant);
    let (big_k, big_m) = shift.last().clone();
    let base_bits = big_k.bits().max(big_m.bits()) as u32;
    let mut trace = ConstructionTrace::new(Construction::Gamma)
        .param("C", c)
        .param("amplified_C", &amplified)
        .param("depth", depth);
    trace.stages = shift.trace.stages.clone();
    trace.tail_exponent = shift.trace.tail_exponent.clone();
    let log2_alpha = alpha.eval_at(64)?.re.hi().to_f64().log2();
    let mut pairs = vec![];
    for (i, (k, m)) in shift.pairs.iter().enumerate() {
        let check = if i + 1 == depth {
            Check::symbolic("alpha^K = gamma beta^M")
        } else {
            let lhs = Expr::sub(
                &Expr::pow(alpha, k.clone()),
                &Expr::mul(&gamma, &Expr::pow(beta, m.clone())),
            );
            let bits = (k.to_f64().unwrap_or(f64::MAX) * log2_alpha).ceil() as u32 + base_bits;
            check_below(
                &lhs,
                c,
                &(k + m),
                None,
                bits,
                "|alpha^k - gamma beta^m| < C^-(k+m)",
                policy,
            )?
        };
        let mut stage = Stage::new(i + 1, check);
        stage.k = Some(k.clone());
        stage.m = Some(m.clone());
        if stage.retained {
            pairs.push((k.clone(), m.clone()));
        }
        trace.pairs.push(stage);
    }
    let pol = policy.with_initial((base_bits + 128).min(policy.cap));
    let g = eval_enclosure(&gamma, &pol, Some(&Dyadic::pow2(-100)))?.value;
    if !g.re.certainly_gt(&RealEnclosure::one(g.precision())) {
        return Err(Error::cap(policy.cap, "gamma > 1 not certified"));
    }
    trace.constant_enclosure = Some(g);
    trace.constant = Some(gamma.clone());
    Ok(GammaConstruction { trace, gamma, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::trace::CheckKind;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sqrt(n: i64) -> Arc<Expr> {
        Expr::unary(Expr::Sqrt, &Expr::int(n))
    }

    /// Independent check in f64-free arithmetic: `|√2 k - m - c|` against
    /// `C^-(k+m)` with a 4000-bit evaluation.
    fn residual_ok(c_expr: &Arc<Expr>, k: &BigInt, m: &BigInt, cc: &BigRational) -> bool {
        let r = Expr::sub(
            &Expr::sub(&Expr::mul(&sqrt(2), &Expr::int(k.clone())), &Expr::int(m.clone())),
            c_expr,
        );
        let v = r.eval_at(4000).unwrap().abs();
        let e = (k + m).to_u64().unwrap();
        let t = RealEnclosure::from_rational(&num_traits::pow(cc.recip(), e as usize), 4000);
        v.certainly_lt(&t) || v.contains_zero()
    }

    #[test]
    fn sqrt_two_shift() {
        let pol = PrecisionPolicy::default();
        let c = q(6, 5);
        let out = construct_shift(&sqrt(2), &Expr::int(1), &c, 3, &pol).unwrap();
        assert_eq!(out.pairs.len(), 3);
        assert!(out.trace.verified());
        for w in out.trace.stages.windows(2) {
            let (e0, e1) = (w[0].epsilon.clone().unwrap(), w[1].epsilon.clone().unwrap());
            let kt = w[0].k_total.clone().unwrap() + w[0].m_total.clone().unwrap();
            let decay = num_traits::pow(
                (&c * BigRational::from_integer(2.into())).recip(),
                kt.to_usize().unwrap(),
            );
            assert!(e1 < &e0 / BigRational::from_integer(2.into()) && e1 < decay);
        }
        assert!(out.trace.stages[0].s.as_ref().unwrap().is_certainly_positive());
        assert!(out
            .trace
            .constant_enclosure
            .as_ref()
            .unwrap()
            .re
            .is_certainly_positive());
        let (k, m) = &out.pairs[0];
        assert!(residual_ok(&out.constant, k, m, &c));
        // stage 1: even convergent 1/1 of √2 gives s = √2 - 1 < 1/2
        assert_eq!(out.pairs[0], (BigInt::from(1), BigInt::from(1)));
    }

    #[test]
    fn depth_one_is_exact() {
        let pol = PrecisionPolicy::default();
        let out = construct_shift(&sqrt(2), &Expr::int(1), &q(6, 5), 1, &pol).unwrap();
        assert_eq!(out.trace.stages[0].check.kind, CheckKind::Symbolic);
        let (k, m) = out.last();
        let r = Expr::sub(
            &Expr::sub(&Expr::mul(&sqrt(2), &Expr::int(k.clone())), &Expr::int(m.clone())),
            &out.constant,
        );
        assert!(r.eval_at(256).unwrap().contains_zero());
    }

    #[test]
    fn rational_ratio_rejected() {
        let pol = PrecisionPolicy::default();
        let err = construct_shift(&Expr::int(2), &Expr::int(1), &q(6, 5), 2, &pol).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn gamma_for_two_and_three() {
        let pol = PrecisionPolicy::default();
        let c = q(21, 20);
        let out = construct_gamma(&Expr::int(2), &Expr::int(3), &c, 3, &pol).unwrap();
        assert_eq!(out.pairs.len(), 3);
        assert!(out.trace.verified());
        assert_eq!(out.pairs[0], (BigInt::from(2), BigInt::from(1)));
        let json = out.trace.to_json();
        assert_eq!(json["construction"], "gamma");
        assert_eq!(json["pairs"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn gamma_depth_one_and_dependent() {
        let pol = PrecisionPolicy::default();
        let out = construct_gamma(&Expr::int(2), &Expr::int(3), &q(21, 20), 1, &pol).unwrap();
        assert_eq!(out.pairs.len(), 1);
        let err = construct_gamma(&Expr::int(2), &Expr::int(4), &q(21, 20), 2, &pol).unwrap_err();
        assert_eq!(err, Error::DependentBases { u: 2, v: -1 });
    }
}
