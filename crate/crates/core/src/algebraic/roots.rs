//! Certified isolation of the complex roots of a square-free rational
//! polynomial.
//!
//! Approximations come from Aberth iteration at a working precision. They are
//! certified with the inclusion disc `|z - ζ| <= n |p(z)/p'(z)|`, which contains
//! at least one root; `n` pairwise disjoint such discs therefore contain
//! exactly one root each.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::poly::Poly;
use crate::arithmetic::{ComplexEnclosure, Dyadic, RealEnclosure, Round};
use crate::error::{Error, Result};

/// A disc in the complex plane containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub re: Dyadic,
    pub im: Dyadic,
    pub radius: Dyadic,
    /// Certified real: the disc is centred on the real axis.
    pub real: bool,
}

impl IsolatedRoot {
    /// Bounding box of the disc.
    pub fn enclosure(&self, prec: u32) -> ComplexEnclosure {
        let re = RealEnclosure::ball(&self.re, &self.radius, prec);
        let im = if self.real {
            RealEnclosure::zero(prec)
        } else {
            RealEnclosure::ball(&self.im, &self.radius, prec)
        };
        ComplexEnclosure::new(re, im)
    }

    pub fn center(&self, prec: u32) -> ComplexEnclosure {
        ComplexEnclosure::new(
            RealEnclosure::point(self.re.clone(), prec),
            RealEnclosure::point(self.im.clone(), prec),
        )
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Whether the disc meets the box `z`.
    pub fn meets(&self, z: &ComplexEnclosure) -> bool {
        let c = self.center(z.precision().max(64));
        distance_lower_to_box(&c, z) <= self.radius
    }

    /// Whether the disc lies in the box `z`.
    pub fn inside(&self, z: &ComplexEnclosure) -> bool {
        z.encloses(&self.enclosure(z.precision().max(64)))
    }
}

/// Lower bound on the distance from the point `c` to the box `z`.
fn distance_lower_to_box(c: &ComplexEnclosure, z: &ComplexEnclosure) -> Dyadic {
    let gap = |p: &Dyadic, lo: &Dyadic, hi: &Dyadic| -> Dyadic {
        if p < lo {
            lo.sub(p)
        } else if p > hi {
            p.sub(hi)
        } else {
            Dyadic::zero()
        }
    };
    let gx = gap(c.re.lo(), z.re.lo(), z.re.hi());
    let gy = gap(c.im.lo(), z.im.lo(), z.im.hi());
    let s = gx.mul(&gx).add(&gy.mul(&gy));
    s.sqrt_round(64, Round::Down)
}

fn point(re: &Dyadic, im: &Dyadic, prec: u32) -> ComplexEnclosure {
    ComplexEnclosure::new(
        RealEnclosure::point(re.clone(), prec),
        RealEnclosure::point(im.clone(), prec),
    )
}

/// Upper bound for the inclusion radius at the point, if `p'` is certainly
/// nonzero there.
fn inclusion_radius(p: &Poly, dp: &Poly, re: &Dyadic, im: &Dyadic, prec: u32) -> Option<Dyadic> {
    let z = point(re, im, prec);
    let v = p.eval_complex(&z).abs();
    let dv = dp.eval_complex(&z).abs();
    if !dv.is_certainly_positive() {
        return None;
    }
    let n = Dyadic::from_int(p.degree() as u64);
    let r = v.hi().mul(&n).div_round(dv.lo(), 64, Round::Up);
    Some(r)
}

fn disjoint(a: &IsolatedRoot, b: &IsolatedRoot) -> bool {
    let dx = a.re.sub(&b.re);
    let dy = a.im.sub(&b.im);
    let d2 = dx.mul(&dx).add(&dy.mul(&dy));
    let s = a.radius.add(&b.radius);
    d2 > s.mul(&s)
}

fn rounded(x: &Dyadic, prec: u32) -> Dyadic {
    x.round(prec, Round::Down)
}

/// Aberth iteration with dyadic midpoints at `wp` bits.
fn aberth(p: &Poly, wp: u32, start: Option<&[(Dyadic, Dyadic)]>) -> Vec<(Dyadic, Dyadic)> {
    let n = p.degree();
    let dp = p.derivative();
    let mut z: Vec<ComplexEnclosure> = match start {
        Some(s) => s.iter().map(|(a, b)| point(a, b, wp)).collect(),
        None => {
            let r = p.cauchy_bound().to_f64().unwrap_or(1e300).clamp(1e-3, 1e300);
            (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
                    let rr = r * (0.5 + 0.5 * (k as f64 + 1.0) / (n as f64));
                    point(&Dyadic::from_f64(rr * t.cos()), &Dyadic::from_f64(rr * t.sin()), wp)
                })
                .collect()
        }
    };
    let tol = Dyadic::pow2(-(wp as i64) / 2 - 8);
    for _ in 0..(400 + 8 * n) {
        let mut max_step = Dyadic::zero();
        for i in 0..n {
            let zi = z[i].clone();
            let pv = p.eval_complex(&zi).mid_point();
            let dv = dp.eval_complex(&zi).mid_point();
            let ratio = match pv.div_ref(&dv) {
                Ok(r) => r.mid_point(),
                Err(_) => continue,
            };
            let mut s = ComplexEnclosure::zero(wp);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    if let Ok(inv) = zi.sub_ref(zj).mid_point().recip() {
                        s = s.add_ref(&inv.mid_point());
                    }
                }
            }
            let denom = ComplexEnclosure::one(wp).sub_ref(&ratio.mul_ref(&s)).mid_point();
            let w = match ratio.div_ref(&denom) {
                Ok(w) => w.mid_point(),
                Err(_) => ratio.clone(),
            };
            let (wr, wi) = w.mid();
            let step = wr.abs().max_ref(&wi.abs()).clone();
            if step > max_step {
                max_step = step;
            }
            z[i] = zi.sub_ref(&w).mid_point();
        }
        if max_step <= tol {
            break;
        }
    }
    z.iter()
        .map(|c| {
            let (a, b) = c.mid();
            (rounded(&a, wp), rounded(&b, wp))
        })
        .collect()
}

/// Newton steps at working precision from `(re, im)`.
fn newton(p: &Poly, dp: &Poly, re: &Dyadic, im: &Dyadic, wp: u32, steps: usize) -> (Dyadic, Dyadic) {
    let mut z = point(re, im, wp);
    for _ in 0..steps {
        let v = p.eval_complex(&z).mid_point();
        let dv = dp.eval_complex(&z).mid_point();
        match v.div_ref(&dv) {
            Ok(w) => z = z.sub_ref(&w.mid_point()).mid_point(),
            Err(_) => break,
        }
    }
    let (a, b) = z.mid();
    (rounded(&a, wp), rounded(&b, wp))
}

fn certify(p: &Poly, approx: &[(Dyadic, Dyadic)], prec: u32) -> Option<Vec<IsolatedRoot>> {
    let dp = p.derivative();
    let mut roots = Vec::with_capacity(approx.len());
    for (re, im) in approx {
        let r = inclusion_radius(p, &dp, re, im, prec)?;
        roots.push(IsolatedRoot {
            re: re.clone(),
            im: im.clone(),
            radius: r,
            real: false,
        });
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if !disjoint(&roots[i], &roots[j]) {
                return None;
            }
        }
    }
    // Snap discs meeting the real axis; conjugate symmetry keeps the unique
    // root real when the snapped disc stays disjoint from the others.
    for i in 0..roots.len() {
        if roots[i].im.abs() > roots[i].radius {
            continue;
        }
        let re = roots[i].re.clone();
        let Some(r) = inclusion_radius(p, &dp, &re, &Dyadic::zero(), prec) else {
            continue;
        };
        let cand = IsolatedRoot {
            re,
            im: Dyadic::zero(),
            radius: r,
            real: true,
        };
        if (0..roots.len()).all(|j| j == i || disjoint(&cand, &roots[j])) {
            roots[i] = cand;
        }
    }
    Some(roots)
}

/// Isolates all roots of a square-free polynomial of degree at least 1.
pub fn isolate(p: &Poly, cap: u32) -> Result<Vec<IsolatedRoot>> {
    let n = p.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        return Ok(vec![rational_root(&r)]);
    }
    let mut wp = 64u32;
    let mut approx: Option<Vec<(Dyadic, Dyadic)>> = None;
    loop {
        let a = aberth(p, wp, approx.as_deref());
        let dp = p.derivative();
        let polished: Vec<_> = a.iter().map(|(x, y)| newton(p, &dp, x, y, wp, 4)).collect();
        if let Some(roots) = certify(p, &polished, wp) {
            return Ok(sort_roots(roots));
        }
        if wp >= cap {
            return Err(Error::IsolationError(format!(
                "could not separate the roots of {p} within {cap} bits"
            )));
        }
        approx = Some(polished);
        wp = (wp * 2).min(cap);
    }
}

/// Exact disc of radius zero, or a tiny disc when the rational is not dyadic.
pub fn rational_root(r: &BigRational) -> IsolatedRoot {
    match Dyadic::try_from_rational(r) {
        Some(d) => IsolatedRoot {
            re: d,
            im: Dyadic::zero(),
            radius: Dyadic::zero(),
            real: true,
        },
        None => {
            let lo = Dyadic::from_rational(r, 128, Round::Down);
            let hi = Dyadic::from_rational(r, 128, Round::Up);
            IsolatedRoot {
                re: lo.clone(),
                im: Dyadic::zero(),
                radius: hi.sub(&lo),
                real: true,
            }
        }
    }
}

/// Deterministic order: descending modulus, then descending real part, then
/// descending imaginary part (by centre approximations).
fn sort_roots(mut roots: Vec<IsolatedRoot>) -> Vec<IsolatedRoot> {
    roots.sort_by(|a, b| approx_order(a.approx(), b.approx()));
    roots
}

/// Ordering of root approximations; values within `1e-12` relative count
/// as equal so conjugates and equal moduli order by the next key.
pub fn approx_order(a: (f64, f64), b: (f64, f64)) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()));
    let key = |x: f64, y: f64| -> Ordering {
        if close(x, y) {
            Ordering::Equal
        } else {
            y.partial_cmp(&x).unwrap_or(Ordering::Equal)
        }
    };
    key(a.0.hypot(a.1), b.0.hypot(b.1))
        .then(key(a.0, b.0))
        .then(key(a.1, b.1))
}

/// Shrinks an isolating disc until its radius is at most `2^-prec`, staying
/// inside the original disc so that isolation is preserved.
pub fn refine(p: &Poly, root: &IsolatedRoot, prec: u32) -> IsolatedRoot {
    let target = Dyadic::pow2(-(prec as i64));
    if root.radius <= target {
        return root.clone();
    }
    if p.degree() == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        let wp = prec + 8;
        let lo = Dyadic::from_rational(&r, wp, Round::Down);
        let hi = Dyadic::from_rational(&r, wp, Round::Up);
        return IsolatedRoot {
            re: lo.clone(),
            im: Dyadic::zero(),
            radius: hi.sub(&lo),
            real: true,
        };
    }
    let dp = p.derivative();
    let wp = prec + 32;
    let mut best = root.clone();
    let mut cur = (root.re.clone(), root.im.clone());
    let mut steps = 0;
    while best.radius > target && steps < 64 {
        let im = if root.real { Dyadic::zero() } else { cur.1.clone() };
        cur = newton(p, &dp, &cur.0, &im, wp, 2);
        if root.real {
            cur.1 = Dyadic::zero();
        }
        steps += 1;
        if let Some(r) = inclusion_radius(p, &dp, &cur.0, &cur.1, wp) {
            let cand = IsolatedRoot {
                re: cur.0.clone(),
                im: cur.1.clone(),
                radius: r,
                real: root.real,
            };
            if cand.radius < best.radius && disc_inside(&cand, root) {
                best = cand;
            }
        }
    }
    best
}

fn disc_inside(inner: &IsolatedRoot, outer: &IsolatedRoot) -> bool {
    let dx = inner.re.sub(&outer.re);
    let dy = inner.im.sub(&outer.im);
    let d2 = dx.mul(&dx).add(&dy.mul(&dy));
    let slack = outer.radius.sub(&inner.radius);
    !slack.is_negative() && d2 <= slack.mul(&slack)
}

/// Index of the unique isolating disc meeting the box, if exactly one does.
pub fn identify(roots: &[IsolatedRoot], z: &ComplexEnclosure) -> Option<usize> {
    let hits: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].meets(z)).collect();
    (hits.len() == 1).then(|| hits[0])
}
