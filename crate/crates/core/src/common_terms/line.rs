use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

/// Result of fitting `k·v = u·m + w` through solution pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineFit {
    Line {
        #[serde(serialize_with = "ser_big")]
        u: BigInt,
        #[serde(serialize_with = "ser_big")]
        v: BigInt,
        #[serde(serialize_with = "ser_big")]
        w: BigInt,
        /// Pairs off the line.
        #[serde(serialize_with = "ser_pairs")]
        exceptions: Vec<(BigInt, BigInt)>,
    },
    NoLine,
}

impl LineFit {
    pub fn is_line(&self) -> bool {
        matches!(self, LineFit::Line { .. })
    }
}

/// Line through all pairs, or `NoLine`.
pub fn rational_line_fit(pairs: &[(BigInt, BigInt)]) -> LineFit {
    rational_line_fit_with(pairs, 0)
}

/// `(u, v, w, exceptions)`.
type Candidate = (BigInt, BigInt, BigInt, Vec<(BigInt, BigInt)>);

/// Line missing at most `tolerance` pairs. Among candidates through two
/// pairs, the one with fewest exceptions wins; ties keep the first found.
pub fn rational_line_fit_with(pairs: &[(BigInt, BigInt)], tolerance: usize) -> LineFit {
    let mut best: Option<Candidate> = None;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let dk = &pairs[j].0 - &pairs[i].0;
            let dm = &pairs[j].1 - &pairs[i].1;
            if dm.is_zero() {
                continue;
            }
            let g = dk.gcd(&dm);
            let (mut u, mut v) = (&dk / &g, &dm / &g);
            if v.is_negative() {
                u = -u;
                v = -v;
            }
            let w = &pairs[i].0 * &v - &u * &pairs[i].1;
            let exceptions: Vec<_> = pairs.iter().filter(|(k, m)| k * &v != &u * m + &w).cloned().collect();
            if best.as_ref().is_none_or(|b| exceptions.len() < b.3.len()) {
                best = Some((u, v, w, exceptions));
            }
        }
    }
    match best {
        Some((u, v, w, exceptions)) if exceptions.len() <= tolerance => LineFit::Line { u, v, w, exceptions },
        _ => LineFit::NoLine,
    }
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_pairs<S: Serializer>(x: &[(BigInt, BigInt)], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<[String; 2]> = x.iter().map(|(k, m)| [k.to_string(), m.to_string()]).collect();
    v.serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(k, m)| (k.into(), m.into())).collect()
    }

    fn line(u: i64, v: i64, w: i64) -> LineFit {
        LineFit::Line {
            u: u.into(),
            v: v.into(),
            w: w.into(),
            exceptions: vec![],
        }
    }

    #[test]
    fn exact_lines() {
        assert_eq!(
            rational_line_fit(&pairs(&[(0, 0), (3, 1), (6, 2), (9, 3)])),
            line(3, 1, 0)
        );
        assert_eq!(rational_line_fit(&pairs(&[(1, 0), (4, 1), (7, 2)])), line(3, 1, 1));
        // k = 3m/2 + 1/2, i.e. 2k = 3m + 1.
        assert_eq!(rational_line_fit(&pairs(&[(2, 1), (5, 3), (8, 5)])), line(3, 2, 1));
    }

    #[test]
    fn no_line() {
        assert_eq!(
            rational_line_fit(&pairs(&[(2, 1), (1056, 666), (5000, 3000)])),
            LineFit::NoLine
        );
        assert_eq!(rational_line_fit(&pairs(&[(1, 5)])), LineFit::NoLine);
        // Constant m cannot be written as k·v = u·m + w with v > 0.
        assert_eq!(rational_line_fit(&pairs(&[(1, 2), (5, 2)])), LineFit::NoLine);
    }

    #[test]
    fn tolerated_exceptions() {
        let p = pairs(&[(0, 1), (1, 0), (3, 1), (6, 2), (9, 3)]);
        assert_eq!(rational_line_fit(&p), LineFit::NoLine);
        let fit = rational_line_fit_with(&p, 2);
        assert_eq!(
            fit,
            LineFit::Line {
                u: 3.into(),
                v: 1.into(),
                w: 0.into(),
                exceptions: pairs(&[(0, 1), (1, 0)]),
            }
        );
    }
}
