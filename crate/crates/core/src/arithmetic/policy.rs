use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_INITIAL_BITS: u32 = 256;
pub const DEFAULT_CAP_BITS: u32 = 65536;
pub const CAP_ENV: &str = "NLRS_PRECISION_CAP";

/// Deterministic precision escalation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub initial: u32,
    pub cap: u32,
    pub growth: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial: DEFAULT_INITIAL_BITS,
            cap: DEFAULT_CAP_BITS,
            growth: 2,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(initial: u32, cap: u32, growth: u32) -> Result<Self> {
        if initial == 0 || initial > cap || growth < 2 {
            return Err(Error::InvalidInput(format!(
                "precision policy needs 0 < initial <= cap and growth >= 2 (got {initial}, {cap}, {growth})"
            )));
        }
        Ok(PrecisionPolicy { initial, cap, growth })
    }

    /// Default policy with the cap taken from `NLRS_PRECISION_CAP` when set.
    pub fn from_env() -> Self {
        let mut p = Self::default();
        if let Some(cap) = std::env::var(CAP_ENV).ok().and_then(|s| s.trim().parse::<u32>().ok()) {
            p = p.with_cap(cap);
        }
        p
    }

    /// Replaces the cap, lowering the initial precision if needed.
    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap.max(2);
        self.initial = self.initial.min(self.cap);
        self
    }

    pub fn with_initial(mut self, initial: u32) -> Self {
        self.initial = initial.clamp(2, self.cap);
        self
    }

    /// Strictly increasing precisions from `initial`, ending exactly at `cap`.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = vec![self.initial];
        let mut p = self.initial as u64;
        while (p as u32) < self.cap {
            p = (p * self.growth as u64).min(self.cap as u64);
            out.push(p as u32);
        }
        out
    }

    /// Runs `f` at increasing precision until it returns something other than
    /// a precision-type failure. The last failure is returned at the cap.
    pub fn run<T>(&self, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut last = None;
        for prec in self.schedule() {
            match f(prec) {
                Err(e) if e.is_precision() || e == Error::DivisionByUncertainZero => last = Some(e),
                other => return other,
            }
        }
        Err(match last {
            Some(Error::DivisionByUncertainZero) => Error::DivisionByUncertainZero,
            Some(Error::AmbiguousRounding { lo, hi }) => Error::AmbiguousRounding { lo, hi },
            Some(Error::IllConditioned) => Error::IllConditioned,
            Some(e) => Error::cap(self.cap, e.to_string()),
            None => Error::cap(self.cap, "empty schedule"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_doubles_to_cap() {
        let p = PrecisionPolicy::default();
        let s = p.schedule();
        assert_eq!(s.first(), Some(&256));
        assert_eq!(s.last(), Some(&65536));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        let q = PrecisionPolicy::new(100, 300, 2).unwrap();
        assert_eq!(q.schedule(), vec![100, 200, 300]);
    }

    #[test]
    fn run_escalates() {
        let p = PrecisionPolicy::new(64, 1024, 2).unwrap();
        let mut seen = vec![];
        let r = p.run(|prec| {
            seen.push(prec);
            if prec < 512 {
                Err(Error::IllConditioned)
            } else {
                Ok(prec)
            }
        });
        assert_eq!(r, Ok(512));
        assert_eq!(seen, vec![64, 128, 256, 512]);
        let r: Result<()> = p.run(|_| Err(Error::cap(0, "x")));
        assert!(matches!(r, Err(Error::PrecisionCapExceeded { cap: 1024, .. })));
    }
}
