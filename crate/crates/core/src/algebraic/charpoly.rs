use num_rational::BigRational;
use serde::Serialize;

use super::number::{AlgebraicNumber, ModulusClass};
use super::poly::Poly;
use super::roots::approx_order;
use crate::arithmetic::{ComplexEnclosure, PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};

/// A distinct root of a characteristic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct CharRoot {
    pub value: AlgebraicNumber,
    pub multiplicity: u32,
    pub class: ModulusClass,
}

impl CharRoot {
    pub fn enclosure(&self, prec: u32) -> ComplexEnclosure {
        self.value.enclosure(prec)
    }
}

/// Roots of a monic polynomial, classified against the unit circle and
/// ordered by descending modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    /// Monic rational coefficients when the polynomial is defined over Q.
    pub coefficients: Option<Poly>,
    pub roots: Vec<CharRoot>,
    pub r1: usize,
    pub r2: usize,
    pub separable: bool,
    pub dominating: Option<usize>,
    /// No root lies strictly inside the unit disc.
    pub valid_nlrs: bool,
}

/// Result of stripping the factors `x - α` with `|α| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub charpoly: CharPoly,
    pub stripped: Vec<CharRoot>,
}

fn certainly_smaller(a: &AlgebraicNumber, b: &AlgebraicNumber) -> bool {
    for prec in [64u32, 256, 1024, 4096] {
        let ma = a.enclosure(prec).abs_sq();
        let mb = b.enclosure(prec).abs_sq();
        if ma.certainly_lt(&mb) {
            return true;
        }
        if mb.certainly_lt(&ma) {
            return false;
        }
    }
    false
}

impl CharPoly {
    /// Builds the classification from distinct roots with multiplicities.
    pub fn from_roots(roots: Vec<(AlgebraicNumber, u32)>, policy: &PrecisionPolicy) -> Result<Self> {
        let mut out = vec![];
        for (value, multiplicity) in roots {
            let class = value.modulus_class(policy.cap)?;
            out.push(CharRoot {
                value,
                multiplicity,
                class,
            });
        }
        out.sort_by(|a, b| approx_order(a.value.approx(), b.value.approx()));
        let count = |c: ModulusClass| -> usize {
            out.iter()
                .filter(|r| r.class == c)
                .map(|r| r.multiplicity as usize)
                .sum()
        };
        let r1 = count(ModulusClass::Above);
        let r2 = count(ModulusClass::On);
        let valid_nlrs = count(ModulusClass::Below) == 0;
        let separable = out.iter().all(|r| r.multiplicity == 1);
        let dominating = match out.first() {
            Some(top) if top.value.is_real() || out.len() == 1 => {
                let ok = out.iter().skip(1).all(|r| certainly_smaller(&r.value, &top.value));
                ok.then_some(0)
            }
            _ => None,
        };
        let coefficients = rational_product(&out);
        Ok(CharPoly {
            coefficients,
            roots: out,
            r1,
            r2,
            separable,
            dominating,
            valid_nlrs,
        })
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity as usize).sum()
    }

    /// Roots listed with repetition, in order.
    pub fn roots_with_multiplicity(&self) -> Vec<&CharRoot> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r, r.multiplicity as usize))
            .collect()
    }

    /// Coefficients of `Π (x - α)^m` as complex enclosures, ascending.
    pub fn coefficient_enclosures(&self, prec: u32) -> Vec<ComplexEnclosure> {
        let mut c = vec![ComplexEnclosure::one(prec)];
        for r in self.roots_with_multiplicity() {
            let a = r.enclosure(prec);
            let mut next = vec![ComplexEnclosure::zero(prec); c.len() + 1];
            for (j, cj) in c.iter().enumerate() {
                next[j + 1] = next[j + 1].add_ref(cj);
                next[j] = next[j].sub_ref(&cj.mul_ref(&a));
            }
            c = next;
        }
        c
    }

    /// Moduli of the roots listed with repetition.
    pub fn moduli(&self, prec: u32) -> Vec<RealEnclosure> {
        self.roots_with_multiplicity()
            .iter()
            .map(|r| r.enclosure(prec).abs())
            .collect()
    }
}

/// Monic rational coefficients when the roots form full conjugate sets.
fn rational_product(roots: &[CharRoot]) -> Option<Poly> {
    let mut total = Poly::one();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mp = roots[i].value.minpoly().to_vec();
        let members: Vec<usize> = (0..roots.len())
            .filter(|&j| !used[j] && roots[j].value.minpoly() == mp.as_slice())
            .collect();
        if members.len() != roots[i].value.degree()
            || members.iter().any(|&j| roots[j].multiplicity != roots[i].multiplicity)
        {
            return None;
        }
        for &j in &members {
            used[j] = true;
        }
        total = total.mul(&Poly::from_ints(&mp).monic().pow(roots[i].multiplicity));
    }
    Some(total)
}

/// Certified classification of the roots of a monic rational polynomial.
pub fn classify_roots(p: &Poly, policy: &PrecisionPolicy) -> Result<CharPoly> {
    if p.degree() == 0 {
        return Err(Error::InvalidInput(
            "characteristic polynomial must have degree >= 1".into(),
        ));
    }
    if !p.is_monic() {
        return Err(Error::InvalidInput(format!("{p} is not monic")));
    }
    let roots = AlgebraicNumber::roots_of(p)?;
    let mut cp = CharPoly::from_roots(roots, policy)?;
    cp.coefficients = Some(p.clone());
    Ok(cp)
}

/// Removes every factor `x - α` with `|α| < 1`.
pub fn reduce_to_nlrs_charpoly(cp: &CharPoly, policy: &PrecisionPolicy) -> Result<Reduction> {
    let (keep, stripped): (Vec<_>, Vec<_>) = cp.roots.iter().cloned().partition(|r| r.class != ModulusClass::Below);
    let kept = CharPoly::from_roots(keep.into_iter().map(|r| (r.value, r.multiplicity)).collect(), policy)?;
    Ok(Reduction {
        charpoly: kept,
        stripped,
    })
}

/// Serialisable summary used in reports.
#[derive(Debug, Clone, Serialize)]
pub struct RootSummary {
    pub minpoly: Vec<String>,
    pub approx: String,
    pub multiplicity: u32,
    pub modulus: String,
    pub class: ModulusClass,
}

impl CharRoot {
    pub fn summary(&self) -> RootSummary {
        let m = self.value.enclosure(128).abs();
        RootSummary {
            minpoly: self.value.minpoly().iter().map(|c| c.to_string()).collect(),
            approx: self.value.approx_string(),
            multiplicity: self.multiplicity,
            modulus: m.to_sci(20),
            class: self.class,
        }
    }
}

/// `x^d + A_{d-1}x^{d-1} + ... + A_0` from rational `A_i`.
pub fn charpoly_from_coefficients(a: &[BigRational]) -> Poly {
    Poly::monic_from_lower(a)
}
