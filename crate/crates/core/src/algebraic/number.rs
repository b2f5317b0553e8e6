use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;
use super::roots::{identify, isolate, rational_root, refine, IsolatedRoot};
use crate::arithmetic::{elementary, ComplexEnclosure, RealEnclosure, Round};
use crate::error::{Error, Result};
use crate::exact::{parse_complex, parse_rational, Literal};

/// Precision used when isolating roots for structural decisions.
const ISOLATION_CAP: u32 = 8192;

/// An algebraic number: primitive irreducible integer minimal polynomial
/// (ascending, positive leading coefficient) and a disc isolating the root.
#[derive(Clone)]
pub struct AlgebraicNumber {
    minpoly: Vec<BigInt>,
    root: IsolatedRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusClass {
    Above,
    On,
    Below,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, n, k, &mut vec![], &mut out);
    out
}

fn lead_int(p: &Poly) -> BigInt {
    p.primitive_integer().last().cloned().unwrap_or_else(BigInt::one)
}

/// Outcome of a subset-product factor search at one precision.
enum Split {
    Irreducible,
    Factor(Poly),
    Ambiguous,
}

fn try_split(f: &Poly, roots: &[IsolatedRoot], prec: u32) -> Split {
    let n = f.degree();
    let b0 = BigRational::from_integer(lead_int(f));
    let encl: Vec<ComplexEnclosure> = roots.iter().map(|r| refine(f, r, prec).enclosure(prec + 16)).collect();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut ambiguous = false;
    for k in 1..=n / 2 {
        for subset in combinations(n, k) {
            // b0 · Π (x - r) has integer coefficients for every rational factor.
            let mut coeffs = vec![ComplexEnclosure::one(prec + 16)];
            for &i in &subset {
                let mut next = vec![ComplexEnclosure::zero(prec + 16); coeffs.len() + 1];
                for (j, c) in coeffs.iter().enumerate() {
                    next[j + 1] = next[j + 1].add_ref(c);
                    next[j] = next[j].sub_ref(&c.mul_ref(&encl[i]));
                }
                coeffs = next;
            }
            let b0e = ComplexEnclosure::from_rationals(&b0, &BigRational::zero(), prec + 16);
            let mut ints = Vec::with_capacity(coeffs.len());
            let mut plausible = true;
            let mut sharp = true;
            for c in &coeffs {
                let c = c.mul_ref(&b0e);
                if !c.im.contains_zero() {
                    plausible = false;
                    break;
                }
                let (lo, hi) = c.re.to_rationals();
                let m = ((&lo + &hi) / BigRational::from_integer(2.into())).round().to_integer();
                let mr = BigRational::from_integer(m.clone());
                if !c.re.contains_rational(&mr) {
                    plausible = false;
                    break;
                }
                if &hi - &lo >= half {
                    sharp = false;
                }
                ints.push(m);
            }
            if !plausible {
                continue;
            }
            let g = Poly::from_ints(&ints).monic();
            if g.degree() == k && f.exact_div(&g).is_some() {
                return Split::Factor(g);
            }
            if !sharp {
                ambiguous = true;
            }
        }
    }
    if ambiguous {
        Split::Ambiguous
    } else {
        Split::Irreducible
    }
}

fn split_square_free(f: &Poly, out: &mut Vec<Poly>) -> Result<()> {
    if f.degree() <= 1 {
        out.push(f.monic());
        return Ok(());
    }
    // Rational roots first (cheap and exact).
    if let Some(r) = rational_root_of(f) {
        let g = Poly::linear(&r);
        out.push(g.clone());
        return split_square_free(&f.exact_div(&g).unwrap(), out);
    }
    let roots = isolate(f, ISOLATION_CAP)?;
    let mut prec = 128;
    loop {
        match try_split(f, &roots, prec) {
            Split::Irreducible => {
                out.push(f.monic());
                return Ok(());
            }
            Split::Factor(g) => {
                let h = f.exact_div(&g).unwrap();
                split_square_free(&g, out)?;
                return split_square_free(&h, out);
            }
            Split::Ambiguous if prec < ISOLATION_CAP => prec *= 2,
            Split::Ambiguous => {
                return Err(Error::cap(ISOLATION_CAP, format!("factoring {f}")));
            }
        }
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = vec![];
    if n.is_zero() {
        return out;
    }
    // Trial division suffices for the desk-scale coefficients used here.
    if n.bits() > 40 {
        return vec![BigInt::one(), n];
    }
    let v = n.to_u64().unwrap();
    let mut d = 1u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    out
}

/// A rational root by the rational root theorem, if one exists.
pub fn rational_root_of(f: &Poly) -> Option<BigRational> {
    let c = f.primitive_integer();
    if c.is_empty() {
        return None;
    }
    if c[0].is_zero() {
        return Some(BigRational::zero());
    }
    let ps = divisors(&c[0]);
    let qs = divisors(c.last().unwrap());
    for p in &ps {
        for qd in &qs {
            for s in [1i32, -1] {
                let r = BigRational::new(p * BigInt::from(s), qd.clone());
                if f.eval(&r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}

/// Complete factorisation into monic irreducible factors with multiplicity.
pub fn factor_over_q(p: &Poly) -> Result<Vec<(Poly, u32)>> {
    let mut out = vec![];
    for (f, m) in p.square_free() {
        let mut parts = vec![];
        split_square_free(&f, &mut parts)?;
        for g in parts {
            out.push((g, m));
        }
    }
    Ok(out)
}

pub fn is_irreducible(p: &Poly) -> Result<bool> {
    let f = factor_over_q(p)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

/// Whether the two discs can share a point.
fn discs_meet(a: &IsolatedRoot, b: &IsolatedRoot) -> bool {
    let dx = a.re.sub(&b.re);
    let dy = a.im.sub(&b.im);
    let s = a.radius.add(&b.radius);
    dx.mul(&dx).add(&dy.mul(&dy)) <= s.mul(&s)
}

fn euler_phi(mut n: u64) -> u64 {
    let mut r = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

impl AlgebraicNumber {
    pub(crate) fn from_parts(minpoly: Vec<BigInt>, root: IsolatedRoot) -> Self {
        AlgebraicNumber { minpoly, root }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        AlgebraicNumber {
            minpoly: vec![-r.numer().clone(), r.denom().clone()],
            root: rational_root(r),
        }
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// All distinct roots of a nonzero polynomial with their multiplicities.
    pub fn roots_of(p: &Poly) -> Result<Vec<(AlgebraicNumber, u32)>> {
        let mut out = vec![];
        for (f, m) in factor_over_q(p)? {
            let mp = f.primitive_integer();
            if f.degree() == 1 {
                out.push((Self::from_rational(&(-f.coeff(0) / f.coeff(1))), m));
                continue;
            }
            for r in isolate(&f, ISOLATION_CAP)? {
                out.push((AlgebraicNumber::from_parts(mp.clone(), r), m));
            }
        }
        Ok(out)
    }

    /// The unique root of `minpoly` in the box `centre ± radius`; validates
    /// irreducibility and isolation.
    pub fn from_minpoly_near(
        minpoly: &[BigInt],
        re: &BigRational,
        im: &BigRational,
        radius: &BigRational,
    ) -> Result<Self> {
        let p = Poly::from_ints(minpoly);
        if p.degree() == 0 {
            return Err(Error::IsolationError("minimal polynomial must have degree >= 1".into()));
        }
        if p.primitive_integer() != minpoly {
            return Err(Error::IsolationError(format!(
                "minimal polynomial {p} must be primitive with positive leading coefficient"
            )));
        }
        if !is_irreducible(&p)? {
            return Err(Error::IsolationError(format!("{p} is reducible over the rationals")));
        }
        let prec = 256;
        let rad = RealEnclosure::from_rational(radius, prec);
        let rad = rad.hi().clone();
        let z = ComplexEnclosure::from_rationals(re, im, prec).inflate(&rad);
        if p.degree() == 1 {
            let a = Self::from_rational(&(-p.coeff(0) / p.coeff(1)));
            if a.root.meets(&z) {
                return Ok(a);
            }
            return Err(Error::IsolationError(
                "the rational root lies outside the given disc".into(),
            ));
        }
        let roots = isolate(&p, ISOLATION_CAP)?;
        // Refine until the hits stabilise to a single disc.
        let mut cur = roots.clone();
        for bits in [64u32, 256, 1024, 4096] {
            match identify(&cur, &z) {
                Some(i) => return Ok(Self::from_parts(minpoly.to_vec(), roots[i].clone())),
                None => {
                    let hits = cur.iter().filter(|r| r.meets(&z)).count();
                    if hits == 0 {
                        break;
                    }
                    cur = roots.iter().map(|r| refine(&p, r, bits)).collect();
                }
            }
        }
        Err(Error::IsolationError(format!(
            "the given disc does not isolate exactly one root of {p}"
        )))
    }

    /// The root of this number's minimal polynomial closest to the box.
    pub fn identify_in(minpoly: &[BigInt], z: &ComplexEnclosure) -> Result<Self> {
        let p = Poly::from_ints(minpoly);
        if p.degree() == 1 {
            return Ok(Self::from_rational(&(-p.coeff(0) / p.coeff(1))));
        }
        let roots = isolate(&p, ISOLATION_CAP)?;
        let mut cur = roots.clone();
        for bits in [64u32, 256, 1024, 4096] {
            if let Some(i) = identify(&cur, z) {
                return Ok(Self::from_parts(minpoly.to_vec(), roots[i].clone()));
            }
            cur = roots.iter().map(|r| refine(&p, r, bits)).collect();
        }
        Err(Error::IsolationError(format!("cannot identify root of {p}")))
    }

    /// Position of this root in the deterministic isolation of its minimal
    /// polynomial.
    pub fn canonical_index(&self) -> Result<usize> {
        if self.degree() == 1 {
            return Ok(0);
        }
        let p = self.minpoly_poly();
        let canon = isolate(&p, ISOLATION_CAP)?;
        for bits in [0u32, 64, 256, 1024, 4096] {
            let mine = refine(&p, &self.root, bits);
            let hits: Vec<usize> = (0..canon.len()).filter(|&i| discs_meet(&canon[i], &mine)).collect();
            if hits.len() == 1 {
                return Ok(hits[0]);
            }
        }
        Err(Error::IsolationError(format!("cannot match root of {p}")))
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn minpoly_poly(&self) -> Poly {
        Poly::from_ints(&self.minpoly)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    /// Leading coefficient `b_0` of the minimal polynomial.
    pub fn leading(&self) -> &BigInt {
        self.minpoly.last().unwrap()
    }

    pub fn isolating_disc(&self) -> &IsolatedRoot {
        &self.root
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        (self.degree() == 1).then(|| BigRational::new(-self.minpoly[0].clone(), self.minpoly[1].clone()))
    }

    /// Exact value `(re, im)` when the number lies in `Q(i)`.
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        if let Some(r) = self.as_rational() {
            return Some((r, BigRational::zero()));
        }
        if self.degree() != 2 {
            return None;
        }
        let (e, c, b) = (&self.minpoly[0], &self.minpoly[1], &self.minpoly[2]);
        let disc: BigInt = c * c - BigInt::from(4) * b * e;
        if !disc.is_negative() {
            return None;
        }
        let s = (-&disc).sqrt();
        if &s * &s != -disc {
            return None;
        }
        let two_b = BigInt::from(2) * b;
        let re = BigRational::new(-c.clone(), two_b.clone());
        let im = BigRational::new(s, two_b).abs();
        let (_, y) = self.approx();
        Some((re, if y < 0.0 { -im } else { im }))
    }

    pub fn is_real(&self) -> bool {
        self.root.real
    }

    pub fn is_algebraic_integer(&self) -> bool {
        self.leading().is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.degree() == 1 && self.minpoly[0].is_zero()
    }

    /// Enclosure with radius at most `2^-prec`.
    pub fn enclosure(&self, prec: u32) -> ComplexEnclosure {
        if let Some(r) = self.as_rational() {
            return ComplexEnclosure::from_rationals(&r, &BigRational::zero(), prec);
        }
        refine(&self.minpoly_poly(), &self.root, prec).enclosure(prec)
    }

    pub fn real_enclosure(&self, prec: u32) -> Result<RealEnclosure> {
        if !self.is_real() {
            return Err(Error::Domain(format!("{self} is not certified real")));
        }
        Ok(self.enclosure(prec).re)
    }

    pub fn approx(&self) -> (f64, f64) {
        self.enclosure(64).mid_f64()
    }

    /// All conjugates, including this number.
    pub fn conjugates(&self) -> Result<Vec<AlgebraicNumber>> {
        if self.degree() == 1 {
            return Ok(vec![self.clone()]);
        }
        Ok(isolate(&self.minpoly_poly(), ISOLATION_CAP)?
            .into_iter()
            .map(|r| Self::from_parts(self.minpoly.clone(), r))
            .collect())
    }

    pub fn neg(&self) -> AlgebraicNumber {
        let p = self.minpoly_poly().negate_variable();
        let root = IsolatedRoot {
            re: self.root.re.neg(),
            im: self.root.im.neg(),
            radius: self.root.radius.clone(),
            real: self.root.real,
        };
        AlgebraicNumber {
            minpoly: p.primitive_integer(),
            root,
        }
    }

    pub fn conj(&self) -> AlgebraicNumber {
        let mut root = self.root.clone();
        root.im = root.im.neg();
        AlgebraicNumber {
            minpoly: self.minpoly.clone(),
            root,
        }
    }

    pub fn recip(&self) -> Result<AlgebraicNumber> {
        if self.is_zero() {
            return Err(Error::DivisionByUncertainZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&r.recip()));
        }
        let p = self.minpoly_poly().reciprocal().primitive_integer();
        let z = self.enclosure(128).recip()?;
        Self::identify_in(&p, &z)
    }

    /// `self^k` with its exact minimal polynomial.
    pub fn pow(&self, k: i64) -> Result<AlgebraicNumber> {
        if k < 0 {
            return self.recip()?.pow(-k);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&num_traits::pow(r, k as usize)));
        }
        let f = self.minpoly_poly();
        let chi = f.char_poly_of(&f.x_pow_mod(&BigInt::from(k)));
        let z = self.enclosure(256).powi(k)?;
        for (g, _) in factor_over_q(&chi)? {
            let cand = Self::identify_in(&g.primitive_integer(), &z);
            if let Ok(c) = cand {
                if c.enclosure(256).intersects(&z) {
                    return Ok(c);
                }
            }
        }
        Err(Error::IsolationError("power not identified".into()))
    }

    /// Exact root-of-unity test via cyclotomic divisibility.
    pub fn is_root_of_unity(&self) -> bool {
        if !self.is_algebraic_integer() {
            return false;
        }
        let n = self.degree() as u64;
        let f = self.minpoly_poly();
        // φ(k) >= sqrt(k/2), so k <= 2n^2.
        for k in 1..=(2 * n * n).max(2) {
            if euler_phi(k) != n {
                continue;
            }
            if f.x_pow_mod(&BigInt::from(k)).sub(&Poly::one()).is_zero() {
                return true;
            }
        }
        false
    }

    /// Exact decision whether `|self| = 1`, else the side.
    pub fn modulus_class(&self, cap: u32) -> Result<ModulusClass> {
        let f = self.minpoly_poly();
        let self_reciprocal = {
            let r = f.reciprocal();
            r.degree() == f.degree() && r.monic() == f.monic()
        };
        if self_reciprocal && self.degree() > 1 {
            // Unit-circle roots satisfy 1/conj(α) = α; roots off the circle
            // are paired with a distinct root 1/conj(α).
            let roots = isolate(&f, ISOLATION_CAP)?;
            let own = identify(&roots, &self.root.center(256))
                .ok_or_else(|| Error::IsolationError("root not found among conjugates".into()))?;
            let mut prec = 128;
            loop {
                let refined: Vec<_> = roots.iter().map(|r| refine(&f, r, prec)).collect();
                let e = refined[own].enclosure(prec + 16);
                let inv = e.conj().recip()?;
                let hits: Vec<usize> = (0..refined.len()).filter(|&i| refined[i].meets(&inv)).collect();
                if hits == [own] {
                    return Ok(ModulusClass::On);
                }
                if !hits.contains(&own) {
                    break;
                }
                if prec >= cap {
                    return Err(Error::cap(cap, "unit-circle decision"));
                }
                prec *= 2;
            }
        } else if self.degree() == 1 {
            let r = self.as_rational().unwrap().abs();
            return Ok(match r.cmp(&BigRational::one()) {
                std::cmp::Ordering::Greater => ModulusClass::Above,
                std::cmp::Ordering::Equal => ModulusClass::On,
                std::cmp::Ordering::Less => ModulusClass::Below,
            });
        }
        let mut prec = 64;
        loop {
            let m = self.enclosure(prec).abs_sq();
            let one = RealEnclosure::one(prec);
            if m.certainly_gt(&one) {
                return Ok(ModulusClass::Above);
            }
            if m.certainly_lt(&one) {
                return Ok(ModulusClass::Below);
            }
            if prec >= cap {
                return Err(Error::cap(cap, format!("modulus of {self} against 1")));
            }
            prec = (prec * 2).min(cap);
        }
    }

    /// Absolute logarithmic height `(1/n)(log b_0 + Σ log max(|β_j|, 1))`.
    pub fn height(&self, prec: u32) -> Result<RealEnclosure> {
        let n = self.degree();
        let wp = prec + 32;
        let b0 = RealEnclosure::from_int(self.leading().clone(), wp);
        let mut acc = elementary::ln(&b0);
        for c in self.conjugates()? {
            let m = c.enclosure(wp).abs().max_with(&RealEnclosure::one(wp));
            acc = acc.add_ref(&elementary::ln(&m));
        }
        Ok(acc
            .div_ref(&RealEnclosure::from_int(n as u64, wp))?
            .with_precision(prec))
    }

    /// Natural logarithm of `|self|`.
    pub fn log_abs(&self, prec: u32) -> Result<RealEnclosure> {
        let m = self.enclosure(prec + 16).abs();
        Ok(elementary::try_ln(&m)?.with_precision(prec))
    }

    /// Decimal approximation used for serialisation.
    pub fn approx_string(&self) -> String {
        let z = self.enclosure(128);
        let re = z.re.mid().to_rational();
        let d = crate::arithmetic::rational_to_decimal(&re, 30, Round::Down);
        if self.is_real() {
            d
        } else {
            let im = z.im.mid().to_rational();
            let di = crate::arithmetic::rational_to_decimal(&im.abs(), 30, Round::Down);
            format!("{d}{}{di}i", if im.is_negative() { '-' } else { '+' })
        }
    }
}

/// JSON form `{"minpoly": [c_0, …, c_n], "approx": "a+bi", "radius": "r"}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlgebraicJson {
    pub minpoly: Vec<Literal>,
    pub approx: String,
    #[serde(default = "default_radius")]
    pub radius: String,
}

fn default_radius() -> String {
    "1e-20".to_string()
}

impl AlgebraicNumber {
    pub fn to_json(&self) -> AlgebraicJson {
        AlgebraicJson {
            minpoly: self.minpoly.iter().map(Literal::from).collect(),
            approx: self.approx_string(),
            radius: "1e-25".to_string(),
        }
    }

    pub fn from_json(j: &AlgebraicJson) -> Result<Self> {
        let coeffs = j
            .minpoly
            .iter()
            .map(|c| c.to_integer())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::IsolationError(e.to_string()))?;
        let (re, im) = parse_complex(&j.approx).map_err(|e| Error::IsolationError(e.to_string()))?;
        let radius = parse_rational(&j.radius).map_err(|e| Error::IsolationError(e.to_string()))?;
        Self::from_minpoly_near(&coeffs, &re, &im, &radius)
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.minpoly != other.minpoly {
            return false;
        }
        if self.degree() == 1 || self.root == other.root {
            return true;
        }
        match (self.canonical_index(), other.canonical_index()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        write!(f, "root of {} near {}", self.minpoly_poly(), self.approx_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    fn golden() -> AlgebraicNumber {
        AlgebraicNumber::from_minpoly_near(
            &[(-1).into(), (-1).into(), 1.into()],
            &BigRational::new(16.into(), 10.into()),
            &BigRational::zero(),
            &BigRational::new(1.into(), 10.into()),
        )
        .unwrap()
    }

    #[test]
    fn factorisation() {
        let f = p(&[-1, -1, 1]).mul(&p(&[-2, 1])).mul(&p(&[1, 0, 1]));
        let mut fs = factor_over_q(&f).unwrap();
        fs.sort_by_key(|(g, _)| g.degree());
        assert_eq!(fs.len(), 3);
        // x^4 + 1 is irreducible, x^4 + 4 = (x^2+2x+2)(x^2-2x+2) is not.
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[4, 0, 0, 0, 1])).unwrap());
    }

    #[test]
    fn golden_ratio_properties() {
        let t = golden();
        assert!(t.is_real());
        let (a, _) = t.approx();
        assert!((a - 1.618033988749895).abs() < 1e-14);
        assert_eq!(t.modulus_class(4096).unwrap(), ModulusClass::Above);
        let h = t.height(128).unwrap();
        assert!((h.mid_f64() - 0.2406059125298).abs() < 1e-12);
        let t2 = t.pow(2).unwrap();
        assert_eq!(t2.minpoly(), &[1.into(), (-3).into(), 1.into()]);
        assert!(!t.is_root_of_unity());
    }

    #[test]
    fn unit_circle_decisions() {
        let eta = AlgebraicNumber::from_minpoly_near(
            &[5.into(), (-8).into(), 5.into()],
            &BigRational::new(4.into(), 5.into()),
            &BigRational::new(3.into(), 5.into()),
            &BigRational::new(1.into(), 100.into()),
        )
        .unwrap();
        assert_eq!(eta.modulus_class(4096).unwrap(), ModulusClass::On);
        assert!(!eta.is_root_of_unity());
        let i = AlgebraicNumber::from_minpoly_near(
            &[1.into(), 0.into(), 1.into()],
            &BigRational::zero(),
            &BigRational::one(),
            &BigRational::new(1.into(), 10.into()),
        )
        .unwrap();
        assert!(i.is_root_of_unity());
        // x^2 - 3x + 1 is self-reciprocal with real roots off the circle.
        let r = AlgebraicNumber::roots_of(&p(&[1, -3, 1])).unwrap();
        assert_eq!(r[0].0.modulus_class(4096).unwrap(), ModulusClass::Above);
        assert_eq!(r[1].0.modulus_class(4096).unwrap(), ModulusClass::Below);
    }

    #[test]
    fn rational_heights() {
        let two = AlgebraicNumber::from_integer(2);
        let half = AlgebraicNumber::from_rational(&BigRational::new(1.into(), 2.into()));
        let l2 = std::f64::consts::LN_2;
        assert!((two.height(64).unwrap().mid_f64() - l2).abs() < 1e-15);
        assert!((half.height(64).unwrap().mid_f64() - l2).abs() < 1e-15);
    }

    #[test]
    fn reducible_minpoly_is_rejected() {
        let e = AlgebraicNumber::from_minpoly_near(
            &[(-2).into(), 1.into(), (-2).into(), 1.into()],
            &BigRational::from_integer(2.into()),
            &BigRational::zero(),
            &BigRational::new(1.into(), 10.into()),
        );
        assert!(matches!(e, Err(Error::IsolationError(_))));
    }
}
