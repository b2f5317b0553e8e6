use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::{multiplicative_independence, AlgebraicNumber, Independence, DEFAULT_EXPONENT_BOUND};
use crate::arithmetic::{elementary, RealEnclosure};
use crate::diophantine::trace::enclosure_strings;
use crate::error::{Error, Result};

const PREC: u32 = 128;
/// Exact evaluation of `Π γ_i^{b_i}` for rational bases below this exponent.
const EXACT_EXPONENT_LIMIT: u64 = 4096;

/// Data for `log|Π γ_i^{b_i} - 1| > -c(t)·D²(1+log D)(1+log B)·Π A_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatveevInput {
    pub gammas: Vec<AlgebraicNumber>,
    pub exponents: Vec<BigInt>,
    /// Upper bound on the degree of the field generated by the `γ_i`.
    pub degree: u64,
    /// Upper bound on `max |b_i|`.
    pub b: BigInt,
    pub a: Vec<RealEnclosure>,
}

impl MatveevInput {
    /// Degree bound from the product of minimal-polynomial degrees, `B` from
    /// the exponents and the smallest admissible `A_i`.
    pub fn new(gammas: Vec<AlgebraicNumber>, exponents: Vec<BigInt>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != exponents.len() {
            return Err(Error::InvalidInput(
                "need as many exponents as bases, at least one".into(),
            ));
        }
        let degree = gammas.iter().map(|g| g.degree() as u64).product();
        let b = exponents.iter().map(|b| b.abs()).max().unwrap_or_default();
        let mut input = MatveevInput {
            gammas,
            exponents,
            degree,
            b,
            a: vec![],
        };
        input.a = input.required_a(PREC)?;
        Ok(input)
    }

    pub fn with_degree(mut self, degree: u64) -> Result<Self> {
        self.degree = degree;
        self.a = self.required_a(PREC)?;
        self.validate()?;
        Ok(self)
    }

    pub fn with_b(mut self, b: BigInt) -> Self {
        self.b = b;
        self
    }

    pub fn with_a(mut self, a: Vec<RealEnclosure>) -> Self {
        self.a = a;
        self
    }

    pub fn t(&self) -> usize {
        self.gammas.len()
    }

    /// `max(D·h(γ_i), |log γ_i|, 0.16)` for each `i`.
    pub fn required_a(&self, prec: u32) -> Result<Vec<RealEnclosure>> {
        let d = RealEnclosure::from_int(self.degree, prec);
        let floor = RealEnclosure::from_rational(&BigRational::new(4.into(), 25.into()), prec);
        self.gammas
            .iter()
            .map(|g| {
                let h = g.height(prec)?.mul_ref(&d);
                let l = g.log_abs(prec)?.abs();
                Ok(h.max_with(&l).max_with(&floor))
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.gammas.len() != self.exponents.len() || self.a.len() != self.gammas.len() {
            return Err(Error::InvalidInput(
                "bases, exponents and A_i must have equal nonzero length".into(),
            ));
        }
        // Every field containing the γ_i has degree divisible by each deg γ_i.
        let lcm = self.gammas.iter().fold(1u64, |l, g| l.lcm(&(g.degree() as u64)));
        if self.degree < lcm {
            return Err(Error::InvalidInput(format!(
                "degree bound {} is below the lcm {lcm} of the degrees of the bases",
                self.degree
            )));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            if !g.is_real() || !g.real_enclosure(PREC)?.is_certainly_positive() {
                return Err(Error::InvalidInput(format!("gamma_{} must be a positive real", i + 1)));
            }
        }
        if let Some(big) = self.exponents.iter().find(|b| b.abs() > self.b) {
            return Err(Error::InvalidInput(format!(
                "B = {} is below |b| = {}",
                self.b,
                big.abs()
            )));
        }
        for (i, (a, need)) in self.a.iter().zip(self.required_a(PREC)?).enumerate() {
            if a.certainly_lt(&need) {
                return Err(Error::InvalidInput(format!(
                    "A_{} is below max(D h, |log gamma|, 0.16)",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// `1.4·30^{t+3}·t^{4.5}·D²(1+log D)·Π A_i`.
pub fn matveev_constant(t: usize, degree: u64, a: &[RealEnclosure], prec: u32) -> RealEnclosure {
    let tt = RealEnclosure::from_int(t as u64, prec);
    let mut c = RealEnclosure::from_rational(&BigRational::new(7.into(), 5.into()), prec)
        .mul_ref(&RealEnclosure::from_int(BigInt::from(30).pow(t as u32 + 3), prec))
        .mul_ref(&tt.sqr().sqr())
        .mul_ref(&elementary::sqrt(&tt));
    let d = RealEnclosure::from_int(degree, prec);
    c = c
        .mul_ref(&d.sqr())
        .mul_ref(&RealEnclosure::one(prec).add_ref(&elementary::ln(&d)));
    for ai in a {
        c = c.mul_ref(ai);
    }
    c
}

/// Enclosure of the lower bound `-c(t)·D²(1+log D)(1+log B)·Π A_i` for
/// `log|Λ|`.
pub fn matveev_lower_bound(input: &MatveevInput) -> Result<RealEnclosure> {
    input.validate()?;
    lambda_nonzero(input)?;
    let c = matveev_constant(input.t(), input.degree, &input.a, PREC);
    let b = RealEnclosure::from_int(input.b.clone(), PREC);
    let log_b = RealEnclosure::one(PREC).add_ref(&elementary::ln(&b));
    Ok(c.mul_ref(&log_b).neg_ref())
}

/// Certifies `Λ ≠ 0`: exactly for rational bases, otherwise by enclosing
/// `Σ b_i log γ_i` or by a multiplicative relation search for `t = 2`.
fn lambda_nonzero(input: &MatveevInput) -> Result<()> {
    if input.exponents.iter().all(Zero::is_zero) {
        return Err(Error::LambdaZero);
    }
    let rationals: Option<Vec<BigRational>> = input.gammas.iter().map(|g| g.as_rational()).collect();
    let small = input
        .exponents
        .iter()
        .all(|b| b.abs() <= BigInt::from(EXACT_EXPONENT_LIMIT));
    if let (Some(rs), true) = (&rationals, small) {
        let mut prod = BigRational::one();
        for (r, b) in rs.iter().zip(&input.exponents) {
            let e = b.to_i32().expect("bounded exponent");
            prod *= num_traits::pow::Pow::pow(r, e);
        }
        return if prod.is_one() { Err(Error::LambdaZero) } else { Ok(()) };
    }
    for prec in [PREC, 1024, 8192] {
        let mut sum = RealEnclosure::zero(prec);
        for (g, b) in input.gammas.iter().zip(&input.exponents) {
            sum = sum.add_ref(&g.log_abs(prec)?.mul_int(b));
        }
        if sum.excludes_zero() {
            return Ok(());
        }
    }
    if let [g1, g2] = &input.gammas[..] {
        let bound = input.b.to_u32().unwrap_or(u32::MAX).min(DEFAULT_EXPONENT_BOUND);
        match multiplicative_independence(g1, g2, bound)? {
            Independence::Dependent { u, v } => {
                let (b1, b2) = (&input.exponents[0], &input.exponents[1]);
                if b1 * BigInt::from(v) == b2 * BigInt::from(u) {
                    return Err(Error::LambdaZero);
                }
                return Ok(());
            }
            Independence::IndependentUpTo { bound: got } if BigInt::from(got) >= input.b => return Ok(()),
            _ => {}
        }
    }
    Err(Error::InvalidInput(
        "cannot certify that the linear form is nonzero".into(),
    ))
}

/// JSON view of a bound evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct MatveevReport {
    pub t: usize,
    pub degree: u64,
    pub b: String,
    pub a: Vec<[String; 2]>,
    pub lower_bound: [String; 2],
}

impl MatveevReport {
    pub fn new(input: &MatveevInput, bound: &RealEnclosure) -> Self {
        MatveevReport {
            t: input.t(),
            degree: input.degree,
            b: input.b.to_string(),
            a: input.a.iter().map(enclosure_strings).collect(),
            lower_bound: enclosure_strings(bound),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(n: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_integer(n)
    }

    fn two_three(b: i64) -> MatveevInput {
        let ln = |n: u64| elementary::ln(&RealEnclosure::from_int(n, PREC));
        MatveevInput::new(vec![alg(2), alg(3)], vec![BigInt::from(b), BigInt::from(-1)])
            .unwrap()
            .with_a(vec![ln(2), ln(3)])
    }

    /// Direct double-precision evaluation of the formula.
    fn oracle(t: f64, d: f64, b: f64, a: &[f64]) -> f64 {
        -(1.4 * 30f64.powf(t + 3.0) * t.powf(4.5) * d * d * (1.0 + d.ln()) * (1.0 + b.ln()) * a.iter().product::<f64>())
    }

    #[test]
    fn two_and_three() {
        for (b, frozen) in [(10, -1.93596e9), (100, -3.28573e9)] {
            let x = matveev_lower_bound(&two_three(b)).unwrap().mid_f64();
            let o = oracle(2.0, 1.0, b as f64, &[2f64.ln(), 3f64.ln()]);
            assert!(((x - o) / o).abs() < 1e-12, "{x} vs {o}");
            assert!(((x - frozen) / frozen).abs() < 1e-5);
        }
    }

    #[test]
    fn default_a_matches_logs() {
        let input = MatveevInput::new(vec![alg(2), alg(3)], vec![BigInt::from(10), BigInt::from(-1)]).unwrap();
        assert_eq!(input.degree, 1);
        assert!((input.a[0].mid_f64() - 2f64.ln()).abs() < 1e-15);
        assert!((input.a[1].mid_f64() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lambda_zero() {
        let input = MatveevInput::new(vec![alg(2), alg(4)], vec![BigInt::from(2), BigInt::from(-1)]).unwrap();
        assert_eq!(matveev_lower_bound(&input), Err(Error::LambdaZero));
        let sqrt2 = AlgebraicNumber::from_minpoly_near(
            &[(-2).into(), 0.into(), 1.into()],
            &BigRational::new(141.into(), 100.into()),
            &BigRational::zero(),
            &BigRational::new(1.into(), 100.into()),
        )
        .unwrap();
        let input = MatveevInput::new(vec![sqrt2, alg(2)], vec![BigInt::from(2), BigInt::from(-1)]).unwrap();
        assert_eq!(matveev_lower_bound(&input), Err(Error::LambdaZero));
    }

    #[test]
    fn invalid_inputs() {
        let low_a = two_three(10).with_a(vec![
            RealEnclosure::from_f64(0.1, PREC),
            RealEnclosure::from_f64(2.0, PREC),
        ]);
        assert!(matches!(matveev_lower_bound(&low_a), Err(Error::InvalidInput(_))));
        let low_b = two_three(10).with_b(BigInt::from(3));
        assert!(matches!(matveev_lower_bound(&low_b), Err(Error::InvalidInput(_))));
        let neg = MatveevInput::new(vec![alg(-2)], vec![BigInt::from(1)]).unwrap();
        assert!(matches!(matveev_lower_bound(&neg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn monotone_in_parameters() {
        let base = two_three(10);
        let mag = |i: &MatveevInput| matveev_lower_bound(i).unwrap().neg_ref();
        let m0 = mag(&base);
        for b in [11, 50, 1000] {
            assert!(m0.certainly_le(&mag(&base.clone().with_b(BigInt::from(b)))));
        }
        let mut prev = m0.clone();
        for d in [2, 3, 8] {
            let wider = base.clone().with_degree(d).unwrap();
            let m = mag(&wider);
            // A larger degree bound weakens the bound.
            assert!(prev.certainly_lt(&m));
            prev = m;
        }
        for i in 0..2 {
            let mut a = base.a.clone();
            a[i] = a[i].mul_ref(&RealEnclosure::from_int(2, PREC));
            assert!(m0.certainly_lt(&mag(&base.clone().with_a(a))));
        }
    }

    #[test]
    fn single_base_sanity() {
        // Λ = 2 - 1 = 1, so log|Λ| = 0 exceeds the bound.
        let input = MatveevInput::new(vec![alg(2)], vec![BigInt::from(1)]).unwrap();
        let bound = matveev_lower_bound(&input).unwrap();
        assert!(bound.is_certainly_negative());
        assert!(bound.certainly_lt(&RealEnclosure::zero(PREC)));
    }
}
