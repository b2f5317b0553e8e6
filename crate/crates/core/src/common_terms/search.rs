use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use super::gap::GapCertificate;
use super::line::LineFit;
use crate::error::{Error, Result};
use crate::sequences::{GeneratedSequence, Value};

/// How a stored pair was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerification {
    /// Both terms were generated and compared as integers.
    Exact,
    /// Equality holds by construction beyond the generated range.
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionPair {
    #[serde(serialize_with = "ser_big")]
    pub k: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub m: BigInt,
    pub verification: PairVerification,
}

impl SolutionPair {
    pub fn exact(k: impl Into<BigInt>, m: impl Into<BigInt>) -> Self {
        SolutionPair {
            k: k.into(),
            m: m.into(),
            verification: PairVerification::Exact,
        }
    }
}

/// Pairs `(k, m)` with `a_k = b_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSet {
    pub pairs: Vec<SolutionPair>,
    /// Searched ranges `0..=k_max`, `0..=m_max`.
    pub k_max: u64,
    pub m_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_certificate: Option<GapCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_fit: Option<LineFit>,
}

impl SolutionSet {
    pub fn new(mut pairs: Vec<SolutionPair>, k_max: u64, m_max: u64) -> Self {
        sort_pairs(&mut pairs);
        SolutionSet {
            pairs,
            k_max,
            m_max,
            gap_certificate: None,
            line_fit: None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn as_tuples(&self) -> Vec<(BigInt, BigInt)> {
        self.pairs.iter().map(|p| (p.k.clone(), p.m.clone())).collect()
    }

    /// Re-checks every exact pair against the two sequences; symbolic pairs
    /// are skipped.
    pub fn reverify(&self, a: &GeneratedSequence, b: &GeneratedSequence) -> Result<bool> {
        for p in self.pairs.iter().filter(|p| p.verification == PairVerification::Exact) {
            let (x, y) = (term(a, &p.k)?, term(b, &p.m)?);
            if x != y {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("solution set serialises")
    }
}

/// Order by `max(k, m)`, then `k`.
pub fn sort_pairs(pairs: &mut [SolutionPair]) {
    pairs.sort_by(|x, y| {
        let kx = (x.k.clone().max(x.m.clone()), &x.k, &x.m);
        let ky = (y.k.clone().max(y.m.clone()), &y.k, &y.m);
        kx.cmp(&ky)
    });
}

fn term(seq: &GeneratedSequence, n: &BigInt) -> Result<BigInt> {
    let idx: usize = n
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("index {n} outside the generated range")))?;
    let v = seq
        .values
        .get(idx)
        .ok_or_else(|| Error::InvalidInput(format!("index {n} outside the generated range")))?;
    integer(v)
}

fn integer(v: &Value) -> Result<BigInt> {
    match v {
        Value::Exact(r) if r.is_integer() => Ok(r.to_integer()),
        Value::Exact(r) => Err(Error::InvalidInput(format!("term {r} is not an integer"))),
        Value::Approx(z) => {
            let (lo, hi) = z.re.to_decimal_bounds(20);
            Err(Error::AmbiguousRounding { lo, hi })
        }
    }
}

fn integers(seq: &GeneratedSequence, n: usize) -> Result<Vec<BigInt>> {
    if seq.len() <= n {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            got: seq.len(),
        });
    }
    seq.values[..=n].iter().map(integer).collect()
}

/// All `(k, m)` with `k <= k_max`, `m <= m_max` and `a_k = b_m`.
pub fn search_common(a: &GeneratedSequence, b: &GeneratedSequence, k_max: usize, m_max: usize) -> Result<SolutionSet> {
    search_common_with(a, b, k_max, m_max, 1)
}

/// [`search_common`] with the `m` range split across `workers` threads.
pub fn search_common_with(
    a: &GeneratedSequence,
    b: &GeneratedSequence,
    k_max: usize,
    m_max: usize,
    workers: usize,
) -> Result<SolutionSet> {
    let av = integers(a, k_max)?;
    let bv = integers(b, m_max)?;
    let mut index: HashMap<&BigInt, Vec<usize>> = HashMap::new();
    for (k, v) in av.iter().enumerate() {
        index.entry(v).or_default().push(k);
    }
    let scan = |range: std::ops::Range<usize>| -> Vec<SolutionPair> {
        let mut out = vec![];
        for m in range {
            if let Some(ks) = index.get(&bv[m]) {
                out.extend(ks.iter().map(|&k| SolutionPair::exact(k, m)));
            }
        }
        out
    };
    let total = bv.len();
    let workers = workers.clamp(1, total.max(1));
    let pairs = if workers == 1 {
        scan(0..total)
    } else {
        let chunk = total.div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let range = (w * chunk).min(total)..((w + 1) * chunk).min(total);
                    s.spawn(move || scan(range))
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker"))
                .collect()
        })
    };
    Ok(SolutionSet::new(pairs, k_max as u64, m_max as u64))
}

fn ser_big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
