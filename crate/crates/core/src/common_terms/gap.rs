use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::matveev::matveev_constant;
use super::search::SolutionSet;
use crate::algebraic::{multiplicative_independence, AlgebraicNumber, Independence, DEFAULT_EXPONENT_BOUND};
use crate::arithmetic::{elementary, Dyadic, RealEnclosure};
use crate::binet::{BinetReport, ResidualBound};
use crate::diophantine::trace::enclosure_strings;
use crate::error::{Error, Result};

const PREC: u32 = 256;
/// `ε` is rounded down to this many binary digits.
const EPSILON_BITS: u32 = 32;

/// Dominating-root data of one sequence: `|a_n - γα^n| <= Σ|β_i||α_i|^n +
/// constant + slope·n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantData {
    pub alpha: AlgebraicNumber,
    pub coefficient: RealEnclosure,
    /// `(|α_i|, |β_i|)` for the other roots of modulus above 1.
    pub lower: Vec<(RealEnclosure, RealEnclosure)>,
    pub residual: ResidualBound,
}

impl DominantData {
    pub fn from_report(report: &BinetReport) -> Result<Self> {
        let dom: Vec<_> = report.dominant().collect();
        let (top, beta) = dom
            .iter()
            .copied()
            .max_by(|x, y| x.0.modulus.mid_f64().total_cmp(&y.0.modulus.mid_f64()))
            .ok_or_else(|| Error::MissingBinetData("no root of modulus above 1".into()))?;
        if !top.root.is_real() || !top.root.real_enclosure(PREC)?.is_certainly_positive() {
            return Err(Error::InvalidInput(
                "only positive real dominating roots are supported".into(),
            ));
        }
        if top.nonvanishing != Some(true) || !beta.im.contains_zero() {
            return Err(Error::MissingBinetData(
                "dominant coefficient not certified real and nonzero".into(),
            ));
        }
        let mut lower = vec![];
        for (r, b) in dom.iter().filter(|(r, _)| !std::ptr::eq(*r, top)) {
            if !r.modulus.certainly_lt(&top.modulus) {
                return Err(Error::MissingBinetData(
                    "dominating root is not strictly largest".into(),
                ));
            }
            lower.push((r.modulus.clone(), b.abs()));
        }
        Ok(DominantData {
            alpha: top.root.clone(),
            coefficient: beta.re.clone(),
            lower,
            residual: report.bound.clone(),
        })
    }

    fn log_alpha(&self) -> Result<RealEnclosure> {
        self.alpha.log_abs(PREC)
    }

    /// `min(1/2, 1 - log max|α_i| / log α)`.
    fn gap(&self) -> Result<RealEnclosure> {
        let la = self.log_alpha()?;
        let mut e = RealEnclosure::from_rational(&BigRational::new(1.into(), 2.into()), PREC);
        for (m, _) in &self.lower {
            let g = RealEnclosure::one(PREC).sub_ref(&elementary::try_ln(m)?.div_ref(&la)?);
            e = e.min_with(&g);
        }
        Ok(e)
    }

    /// `C` with `|a_n - γα^n| <= C α^{n(1-ε)}` for all `n >= 0`, using
    /// `n x^-n <= 1/(e log x)` for `x > 1`.
    fn error_constant(&self, eps: &RealEnclosure) -> Result<RealEnclosure> {
        let mut c = RealEnclosure::zero(PREC);
        for (_, b) in &self.lower {
            c = c.add_ref(b);
        }
        c = c.add_ref(&self.residual.constant.abs());
        let one_minus = RealEnclosure::one(PREC).sub_ref(eps);
        let denom = elementary::exp(&RealEnclosure::one(PREC))
            .mul_ref(&one_minus)
            .mul_ref(&self.log_alpha()?);
        Ok(c.add_ref(&self.residual.slope.abs().div_ref(&denom)?))
    }
}

/// One named step of the constant chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: String,
    pub formula: String,
    #[serde(serialize_with = "ser_enclosure")]
    pub value: RealEnclosure,
}

/// Constants of the gap bound `k_2 > k_1 + K_2 exp(K_1 k_1)` for
/// consecutive solutions with `K_0 <= k_1 < k_2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapConstants {
    #[serde(serialize_with = "ser_big")]
    pub k0: BigInt,
    /// Exponential rate.
    #[serde(serialize_with = "ser_enclosure")]
    pub k1: RealEnclosure,
    /// Prefactor.
    #[serde(serialize_with = "ser_enclosure")]
    pub k2: RealEnclosure,
    /// The same constants under the swapped names `k_1 + K_1 exp(K_2 k_1)`.
    #[serde(serialize_with = "ser_enclosure")]
    pub statement_k1: RealEnclosure,
    #[serde(serialize_with = "ser_enclosure")]
    pub statement_k2: RealEnclosure,
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "ser_enclosure")]
    pub gamma: RealEnclosure,
    #[serde(serialize_with = "ser_enclosure")]
    pub delta: RealEnclosure,
    pub degree: u64,
    pub chain: Vec<ChainStep>,
}

impl GapConstants {
    pub fn step(&self, name: &str) -> Option<&RealEnclosure> {
        self.chain.iter().find(|s| s.name == name).map(|s| &s.value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("gap constants serialise")
    }
}

struct Chain(Vec<ChainStep>);

impl Chain {
    fn push(&mut self, name: &str, formula: &str, value: &RealEnclosure) -> RealEnclosure {
        self.0.push(ChainStep {
            name: name.into(),
            formula: formula.into(),
            value: value.clone(),
        });
        value.clone()
    }
}

fn pow_real(x: &RealEnclosure, e: &RealEnclosure) -> Result<RealEnclosure> {
    Ok(elementary::exp(&elementary::try_ln(x)?.mul_ref(e)))
}

/// Gap constants for `a_k = b_m` with dominating roots `α` of `a` and `β`
/// of `b`.
pub fn gap_constants(a: &DominantData, b: &DominantData) -> Result<GapConstants> {
    if let Independence::Dependent { u, v } = multiplicative_independence(&a.alpha, &b.alpha, DEFAULT_EXPONENT_BOUND)? {
        return Err(Error::DependentBases { u, v });
    }
    let one = RealEnclosure::one(PREC);
    let (gamma, delta) = (a.coefficient.clone(), b.coefficient.clone());
    if !((gamma.is_certainly_positive() && delta.is_certainly_positive())
        || (gamma.is_certainly_negative() && delta.is_certainly_negative()))
    {
        return Err(Error::InvalidInput(
            "dominant coefficients must share a certified sign".into(),
        ));
    }
    let (g, h) = (gamma.abs(), delta.abs());
    let (la, lb) = (a.log_alpha()?, b.log_alpha()?);
    if !la.is_certainly_positive() || !lb.is_certainly_positive() {
        return Err(Error::InvalidInput("dominating roots must exceed 1".into()));
    }
    let mut ch = Chain(vec![]);

    let gap = a.gap()?.min_with(&b.gap()?);
    let scaled = gap.lo().mul_pow2(EPSILON_BITS as i64).floor();
    if !scaled.is_positive() {
        return Err(Error::MissingBinetData("no certified dominance gap".into()));
    }
    let epsilon = BigRational::new(scaled, BigInt::from(1) << EPSILON_BITS);
    let eps = ch.push(
        "epsilon",
        "min(1/2, 1 - log|alpha_i|/log alpha) over both sequences, rounded down",
        &RealEnclosure::from_rational(&epsilon, PREC),
    );
    let one_minus = one.sub_ref(&eps);

    let ca = ch.push(
        "C_a",
        "sum|beta_i| + c_0 + c_1/(e (1-eps) log alpha)",
        &a.error_constant(&eps)?,
    );
    let cb = ch.push("C_b", "same for b with beta", &b.error_constant(&eps)?);
    // |1 - Q| <= α^{-kε}(C_1 + C_2 Q^{1-ε}) with Q = δβ^m/(γα^k).
    let c1 = ch.push("C_1", "C_a/|gamma|", &ca.div_ref(&g)?);
    let c2 = ch.push(
        "C_2",
        "C_b |gamma|^-eps |delta|^-(1-eps)",
        &cb.div_ref(&pow_real(&g, &eps)?.mul_ref(&pow_real(&h, &one_minus)?))?,
    );
    let two = RealEnclosure::from_int(2, PREC);
    let c3 = ch.push(
        "C_3",
        "C_1 + 2^(1-eps) C_2",
        &c1.add_ref(&pow_real(&two, &one_minus)?.mul_ref(&c2)),
    );
    let k0_real = ch.push(
        "K_0",
        "floor(log(2 C_3)/(eps log alpha)) + 1, at least 0",
        &elementary::try_ln(&c3.mul_pow2(1))?.div_ref(&eps.mul_ref(&la))?,
    );
    let k0 = if k0_real.hi().is_negative() {
        BigInt::zero()
    } else {
        k0_real.hi().floor() + 1
    };
    let c4 = ch.push("C_4", "4 C_3", &c3.mul_pow2(2));
    let c5 = ch.push(
        "C_5",
        "(log 2 + |log(delta/gamma)|)/log beta",
        &elementary::ln2(PREC)
            .add_ref(&elementary::try_ln(&h.div_ref(&g)?)?.abs())
            .div_ref(&lb)?,
    );
    let c6 = ch.push("C_6", "2 C_5", &c5.mul_pow2(1));
    let c7 = ch.push("C_7", "log alpha/log beta", &la.div_ref(&lb)?);
    let degree = (a.alpha.degree() * b.alpha.degree()) as u64;
    let d = RealEnclosure::from_int(degree, PREC);
    let floor_a = RealEnclosure::from_rational(&BigRational::new(4.into(), 25.into()), PREC);
    let a1 = ch.push(
        "A_1",
        "max(D h(beta), log beta, 0.16)",
        &b.alpha.height(PREC)?.mul_ref(&d).max_with(&lb).max_with(&floor_a),
    );
    let a2 = ch.push(
        "A_2",
        "max(D h(alpha), log alpha, 0.16)",
        &a.alpha.height(PREC)?.mul_ref(&d).max_with(&la).max_with(&floor_a),
    );
    ch.push("D", "deg alpha * deg beta", &d);
    ch.push("C_8", "1.4 30^5 2^4.5", &matveev_constant(2, 1, &[], PREC));
    let c9 = ch.push(
        "C_9",
        "C_8 D^2 (1 + log D) A_1 A_2",
        &matveev_constant(2, degree, &[a1, a2], PREC),
    );
    let l = ch.push(
        "L",
        "log(max(1, C_7) + C_6)",
        &elementary::try_ln(&c7.max_with(&one).add_ref(&c6))?,
    );
    let c10 = ch.push("C_10", "C_9 (1 + L)", &c9.mul_ref(&one.add_ref(&l)));
    let c11 = ch.push("C_11", "log alpha", &la);
    let k1 = ch.push("K_1", "C_11 eps / C_9", &c11.mul_ref(&eps).div_ref(&c9)?);
    let k2 = ch.push(
        "K_2",
        "exp(-C_10/C_9 - log C_4/C_9)",
        &elementary::exp(&c10.add_ref(&elementary::try_ln(&c4)?).div_ref(&c9)?.neg_ref()),
    );
    Ok(GapConstants {
        k0,
        statement_k1: k2.clone(),
        statement_k2: k1.clone(),
        k1,
        k2,
        epsilon,
        gamma,
        delta,
        degree,
        chain: ch.0,
    })
}

/// One consecutive-pair comparison `log(k_2 - k_1) > log K_2 + K_1 k_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCheck {
    #[serde(serialize_with = "ser_big")]
    pub k1: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub k2: BigInt,
    #[serde(serialize_with = "ser_opt_enclosure")]
    pub lhs: Option<RealEnclosure>,
    #[serde(serialize_with = "ser_enclosure")]
    pub rhs: RealEnclosure,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    #[serde(serialize_with = "ser_big")]
    pub k0: BigInt,
    /// Pairs with `k < K_0`, outside the bound's scope.
    pub below_threshold: usize,
    pub checks: Vec<GapCheck>,
    pub violations: usize,
    pub passed: bool,
}

/// Checks every consecutive pair of solutions with `k >= K_0`, ordered by
/// `k`; an undecided comparison counts as a violation.
pub fn certify_gaps(constants: &GapConstants, solutions: &SolutionSet) -> Result<GapCertificate> {
    let mut ks: Vec<BigInt> = solutions.pairs.iter().map(|p| p.k.clone()).collect();
    ks.sort();
    let below = ks.iter().filter(|k| **k < constants.k0).count();
    let ks = &ks[below..];
    let log_k2 = elementary::try_ln(&constants.k2)?;
    let mut checks = vec![];
    for w in ks.windows(2) {
        let (k1, k2) = (&w[0], &w[1]);
        let rhs = log_k2.add_ref(&constants.k1.mul_int(k1));
        let diff = k2 - k1;
        let lhs = diff
            .is_positive()
            .then(|| elementary::ln(&RealEnclosure::point(Dyadic::from_int(diff), PREC)));
        let passed = lhs.as_ref().is_some_and(|l| l.certainly_gt(&rhs));
        checks.push(GapCheck {
            k1: k1.clone(),
            k2: k2.clone(),
            lhs,
            rhs,
            passed,
        });
    }
    let violations = checks.iter().filter(|c| !c.passed).count();
    Ok(GapCertificate {
        k0: constants.k0.clone(),
        below_threshold: below,
        checks,
        violations,
        passed: violations == 0,
    })
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_enclosure<S: Serializer>(x: &RealEnclosure, s: S) -> std::result::Result<S::Ok, S::Error> {
    enclosure_strings(x).serialize(s)
}

fn ser_opt_enclosure<S: Serializer>(x: &Option<RealEnclosure>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(enclosure_strings).serialize(s)
}

fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{Expr, RoundingMode};
    use crate::binet::asymptotic_coefficients;
    use crate::common_terms::search_common;
    use crate::sequences::{generate, Coefficient, GeneratedSequence, NlrsSpec, Rule, TargetTerm};

    fn floor_power(p: i64, q: i64, n: usize) -> (NlrsSpec, GeneratedSequence) {
        let alpha = BigRational::new(p.into(), q.into());
        let spec = NlrsSpec {
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
        };
        let seq = generate(&spec, n).unwrap();
        (spec, seq)
    }

    fn data(p: i64, q: i64, n: usize) -> (DominantData, GeneratedSequence) {
        let (spec, seq) = floor_power(p, q, n);
        let rep = asymptotic_coefficients(&spec, &seq).unwrap();
        (DominantData::from_report(&rep).unwrap(), seq)
    }

    fn f(x: &RealEnclosure) -> f64 {
        x.mid_f64()
    }

    #[test]
    fn three_halves_against_five_halves() {
        let (a, sa) = data(3, 2, 200);
        let (b, sb) = data(5, 2, 200);
        let gc = gap_constants(&a, &b).unwrap();
        for k in [&gc.k1, &gc.k2] {
            assert!(k.is_certainly_positive() && f(k).is_finite());
        }
        assert_eq!(gc.epsilon, BigRational::new(1.into(), 2.into()));
        assert_eq!((&gc.statement_k1, &gc.statement_k2), (&gc.k2, &gc.k1));
        // Independent double-precision walk of the chain from C_a, C_b.
        let (la, lb) = (1.5f64.ln(), 2.5f64.ln());
        let (ca, cb) = (f(gc.step("C_a").unwrap()), f(gc.step("C_b").unwrap()));
        let c3 = ca + 2f64.powf(0.5) * cb;
        let c4 = 4.0 * c3;
        let c6 = 2.0 * 2f64.ln() / lb;
        let c7 = la / lb;
        // D = 1, A_1 = h(5/2) = log 5, A_2 = h(3/2) = log 3.
        let c9 = 1.4 * 30f64.powi(5) * 2f64.powf(4.5) * 5f64.ln() * 3f64.ln();
        let l = (c7.max(1.0) + c6).ln();
        let k1 = 0.5 * la / c9;
        let k2 = (-(1.0 + l) - c4.ln() / c9).exp();
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        assert!(rel(f(gc.step("C_3").unwrap()), c3) < 1e-12);
        assert!(
            rel(f(gc.step("C_9").unwrap()), c9) < 1e-12,
            "{} {}",
            f(gc.step("C_9").unwrap()),
            c9
        );
        assert!(rel(f(&gc.k1), k1) < 1e-12);
        assert!(rel(f(&gc.k2), k2) < 1e-12);
        let k0 = ((2.0 * c3).ln() / (0.5 * la)).floor() as i64 + 1;
        assert_eq!(gc.k0, BigInt::from(k0.max(0)));

        let sols = search_common(&sa, &sb, 200, 200).unwrap();
        let cert = certify_gaps(&gc, &sols).unwrap();
        assert!(cert.passed, "{cert:?}");
        // All three solutions 1 = 1, 1 = 1, 2 = 2 lie below K_0.
        let small: Vec<(BigInt, BigInt)> = [(0, 0), (1, 0), (2, 1)]
            .iter()
            .map(|&(k, m)| (k.into(), m.into()))
            .collect();
        assert_eq!(sols.as_tuples(), small);
        assert_eq!((cert.below_threshold, cert.checks.len()), (3, 0));
        let json = gc.to_json();
        for key in ["k0", "k1", "k2", "statement_k1", "statement_k2", "chain"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn dependent_and_opposite() {
        let (a, _) = data(2, 1, 60);
        let (b, _) = data(4, 1, 60);
        assert_eq!(gap_constants(&a, &b), Err(Error::DependentBases { u: 2, v: -1 }));
    }

    #[test]
    fn violations_are_reported() {
        let (a, _) = data(3, 2, 120);
        let (b, _) = data(5, 2, 120);
        let mut gc = gap_constants(&a, &b).unwrap();
        gc.k0 = BigInt::zero();
        gc.k2 = RealEnclosure::from_int(10, PREC);
        let pairs = vec![
            crate::common_terms::SolutionPair::exact(3, 1),
            crate::common_terms::SolutionPair::exact(5, 2),
            crate::common_terms::SolutionPair::exact(BigInt::from(10).pow(400), 7),
        ];
        let cert = certify_gaps(&gc, &SolutionSet::new(pairs, 0, 0)).unwrap();
        assert_eq!(cert.violations, 1);
        assert!(!cert.checks[0].passed && cert.checks[1].passed);
    }
}
