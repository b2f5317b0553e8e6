use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arithmetic::ComplexEnclosure;

/// Dense univariate polynomial over the rationals, coefficients ascending.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints<T: Into<BigInt> + Clone>(c: &[T]) -> Self {
        Self::new(c.iter().map(|x| BigRational::from_integer(x.clone().into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`
    pub fn linear(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn x_pow(k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Poly { coeffs: c }
    }

    /// Monic polynomial `x^d + A_{d-1} x^{d-1} + ... + A_0` from `A_0..A_{d-1}`.
    pub fn monic_from_lower(a: &[BigRational]) -> Self {
        let mut c = a.to_vec();
        c.push(BigRational::one());
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Poly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.lead();
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); self.coeffs.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = &r[i + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            quo[i] = c;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (quo, r) = self.divrem(d);
        r.is_zero().then_some(quo)
    }

    /// Monic greatest common divisor (zero when both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &ComplexEnclosure) -> ComplexEnclosure {
        let prec = z.precision();
        let mut acc = ComplexEnclosure::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul_ref(z)
                .add_ref(&ComplexEnclosure::from_rationals(c, &BigRational::zero(), prec));
        }
        acc
    }

    /// `x^n P(1/x)`.
    pub fn reciprocal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    /// `P(-x)`.
    pub fn negate_variable(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Yun's square-free factorisation: monic `(f_i, i)` with `P = lc · Π f_i^i`.
    pub fn square_free(&self) -> Vec<(Poly, u32)> {
        let mut out = vec![];
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = fp.exact_div(&a).unwrap();
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            a = b.gcd(&d);
            b = b.exact_div(&a).unwrap();
            c = d.exact_div(&a).unwrap();
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_square_free(&self) -> bool {
        self.square_free().iter().all(|(_, m)| *m == 1)
    }

    /// Integer coefficients with content 1 and positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// `x^k mod self`.
    pub fn x_pow_mod(&self, k: &BigInt) -> Self {
        let mut result = Poly::one();
        let mut base = Poly::x_pow(1).rem(self);
        let bits = k.bits();
        for i in 0..bits {
            if k.bit(i) {
                result = result.mul(&base).rem(self);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(self);
            }
        }
        result
    }

    /// Characteristic polynomial of multiplication by `g` in `Q[x]/(self)`,
    /// i.e. `Π (x - g(α_j))` over the roots of the monic `self`.
    pub fn char_poly_of(&self, g: &Self) -> Self {
        let f = self.monic();
        let n = f.degree();
        // Column j of the matrix is g·x^j mod f.
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let mut col = g.rem(&f);
        for j in 0..n {
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = col.coeff(i);
            }
            col = col.mul(&Poly::x_pow(1)).rem(&f);
        }
        char_poly_matrix(&m)
    }

    /// Cauchy bound on root moduli.
    pub fn cauchy_bound(&self) -> BigRational {
        let l = self.lead().abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let v = c.abs() / &l;
            if v > m {
                m = v;
            }
        }
        m + BigRational::one()
    }
}

/// Faddeev–LeVerrier characteristic polynomial `det(xI - M)`.
pub fn char_poly_matrix(m: &[Vec<BigRational>]) -> Poly {
    let n = m.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for (l, ml) in mk.iter().enumerate() {
                    if !ml[j].is_zero() {
                        s += &m[i][l] * &ml[j];
                    }
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &m[i][l] * &mk[l][i];
            }
        }
        c[n - k] = -tr / q(k as i64);
    }
    Poly::new(c)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, -1, 1]).mul(&p(&[-2, 1]));
        let (quo, r) = a.divrem(&p(&[-2, 1]));
        assert!(r.is_zero());
        assert_eq!(quo, p(&[-1, -1, 1]));
        assert_eq!(a.gcd(&p(&[-2, 1]).mul(&p(&[1, 1]))), p(&[-2, 1]));
        assert_eq!(format!("{a}"), "x^3 - 3x^2 + x + 2");
    }

    #[test]
    fn yun_multiplicities() {
        let f = p(&[-1, 1]).pow(3).mul(&p(&[1, 0, 1]).pow(2)).mul(&p(&[5, 1]));
        let sf = f.square_free();
        assert_eq!(sf, vec![(p(&[5, 1]), 1), (p(&[1, 0, 1]), 2), (p(&[-1, 1]), 3)]);
    }

    #[test]
    fn char_poly_of_square() {
        // θ^2 for θ root of x^2 - x - 1 has minimal polynomial x^2 - 3x + 1.
        let f = p(&[-1, -1, 1]);
        assert_eq!(f.char_poly_of(&Poly::x_pow(2)), p(&[1, -3, 1]));
        let g = f.x_pow_mod(&BigInt::from(10));
        // θ^10 = 55θ + 34
        assert_eq!(g, p(&[34, 55]));
    }

    #[test]
    fn primitive_form() {
        let f = Poly::new(vec![
            BigRational::new((-1).into(), 2.into()),
            BigRational::new((-4).into(), 3.into()),
        ]);
        assert_eq!(f.primitive_integer(), vec![BigInt::from(3), BigInt::from(8)]);
    }
}
