//! The scalar abstraction shared by the generic recursions and solvers.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arithmetic::{ComplexEnclosure, RealEnclosure};

/// A field-like scalar: exact (rationals), floating (f32/f64) or enclosures.
pub trait Scalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// `self / other`, or `None` when `other` is (possibly) zero.
    fn try_div(&self, other: &Self) -> Option<Self>;

    /// Certainly nonzero: exact nonzero, nonzero float, or enclosure excluding 0.
    fn is_certainly_nonzero(&self) -> bool;

    /// Rough magnitude used for pivot selection.
    fn magnitude_hint(&self) -> f64;

    /// Residual test: exact zero, float within `tol`, or enclosure containing 0.
    fn is_zero_within(&self, tol: f64) -> bool;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn try_div(&self, other: &Self) -> Option<Self> {
                (*other != 0.0).then(|| self / other)
            }
            fn is_certainly_nonzero(&self) -> bool {
                *self != 0.0
            }
            fn magnitude_hint(&self) -> f64 {
                self.abs() as f64
            }
            fn is_zero_within(&self, tol: f64) -> bool {
                (self.abs() as f64) <= tol
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn try_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
    fn is_certainly_nonzero(&self) -> bool {
        !self.is_zero()
    }
    fn magnitude_hint(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::MAX)
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for RealEnclosure {
    fn try_div(&self, other: &Self) -> Option<Self> {
        self.div_ref(other).ok()
    }
    fn is_certainly_nonzero(&self) -> bool {
        self.excludes_zero()
    }
    fn magnitude_hint(&self) -> f64 {
        self.mid_f64().abs()
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.contains_zero()
    }
}

impl Scalar for ComplexEnclosure {
    fn try_div(&self, other: &Self) -> Option<Self> {
        self.div_ref(other).ok()
    }
    fn is_certainly_nonzero(&self) -> bool {
        self.excludes_zero()
    }
    fn magnitude_hint(&self) -> f64 {
        let (a, b) = self.mid_f64();
        a.hypot(b)
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.contains_zero()
    }
}

/// Solves `M x = b` by Gaussian elimination with magnitude pivoting.
/// Returns `None` when no certainly nonzero pivot exists.
pub fn solve_linear<S: Scalar>(m: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = b.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| a[r][col].is_certainly_nonzero())
            .max_by(|&x, &y| {
                a[x][col]
                    .magnitude_hint()
                    .partial_cmp(&a[y][col].magnitude_hint())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let (top, below) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (i, row) in below.iter_mut().enumerate() {
            let f = row[col].try_div(&pivot[col])?;
            for (x, p) in row[col..n].iter_mut().zip(&pivot[col..n]) {
                *x = x.clone() - f.clone() * p.clone();
            }
            let t = f * rhs[col].clone();
            rhs[col + 1 + i] = rhs[col + 1 + i].clone() - t;
        }
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut s = rhs[r].clone();
        for c in r + 1..n {
            s = s - a[r][c].clone() * x[c].clone();
        }
        x[r] = s.try_div(&a[r][r])?;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_in_every_scalar() {
        let m = vec![vec![2.0f64, 1.0], vec![1.0, 3.0]];
        let x = solve_linear(&m, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);

        let q = |n: i64| BigRational::from_integer(n.into());
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_linear(&m, &[q(3), q(5)]).unwrap();
        assert_eq!(
            x,
            vec![
                BigRational::new(4.into(), 5.into()),
                BigRational::new(7.into(), 5.into())
            ]
        );

        let e = |n: i64| RealEnclosure::from_int(n, 128);
        let m = vec![vec![e(2), e(1)], vec![e(1), e(3)]];
        let x = solve_linear(&m, &[e(3), e(5)]).unwrap();
        assert!(x[0].contains_rational(&BigRational::new(4.into(), 5.into())));

        let m = vec![vec![1.0f32, 2.0], vec![2.0, 4.0]];
        assert!(solve_linear(&m, &[1.0, 2.0]).is_none());
    }
}
