//! Binet coefficients, the correction series `c(z)` and the asymptotic
//! coefficients `β_i = g̃_i + ĝ_i c(α_i)`.

use num_complex::Complex;
use num_traits::Float;
use serde::Serialize;

use crate::algebraic::{classify_roots, AlgebraicNumber, CharPoly, ModulusClass, Poly, RootSummary};
use crate::arithmetic::{BoxJson, ComplexEnclosure, Dyadic, PrecisionPolicy, RealEnclosure};
use crate::error::{Error, Result};
use crate::scalar::solve_linear;
use crate::sequences::{associated_lrs, Coefficient, GeneratedSequence, NlrsSpec, Value};

/// Decimal digits used when reports render enclosure bounds.
pub const REPORT_DIGITS: usize = 25;

/// Bits of slack kept below `2^-64` when choosing the residual range.
const GUARD_BITS: f64 = 72.0;

/// Residuals below this are treated as zero by the growth label.
const NOISE_FLOOR: f64 = 1e-9;

/// Solves `Σ_i g_i α_i^n = x_n`, `n < d`, for the distinct roots of `cp`.
pub fn binet_coefficients(
    cp: &CharPoly,
    initial: &[ComplexEnclosure],
    policy: &PrecisionPolicy,
) -> Result<Vec<ComplexEnclosure>> {
    if !cp.separable {
        return Err(Error::InseparableInput);
    }
    let d = cp.degree();
    if initial.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: initial.len(),
        });
    }
    let base = initial.iter().map(|x| x.precision()).max().unwrap_or(0);
    let mut last = Error::IllConditioned;
    for prec in policy.schedule() {
        let prec = prec.max(base);
        let alphas: Vec<ComplexEnclosure> = cp.roots.iter().map(|r| r.enclosure(prec)).collect();
        let mut m = vec![Vec::with_capacity(d); d];
        for (n, row) in m.iter_mut().enumerate() {
            for a in &alphas {
                row.push(a.powi(n as i64)?);
            }
        }
        match solve_linear(&m, initial) {
            Some(g) => return Ok(g),
            None => last = Error::IllConditioned,
        }
    }
    Err(last)
}

/// `c(α)` on `N` error terms with its tail radius.
#[derive(Debug, Clone, PartialEq)]
pub struct CValue {
    /// Box containing `c(α)`: partial sum inflated by `tail_radius`.
    pub value: ComplexEnclosure,
    pub tail_radius: Dyadic,
    pub terms: usize,
}

/// `c(α) = Σ_{j>=1} e_{d+j-1} α^{-j}` from `errors = [e_d, ..., e_{d+N-1}]`
/// and `|e_n| <= E` for every `n`.
pub fn c_enclosure(alpha: &ComplexEnclosure, errors: &[Value], bound: &RealEnclosure) -> Result<CValue> {
    let prec = alpha.precision();
    let m = alpha.abs();
    let one = RealEnclosure::one(prec);
    if !m.certainly_gt(&one) {
        return Err(Error::ModulusNotAboveOne);
    }
    let inv = alpha.recip()?;
    let mut acc = ComplexEnclosure::zero(prec);
    for e in errors.iter().rev() {
        acc = acc.add_ref(&e.enclosure(prec)).mul_ref(&inv);
    }
    // E |α|^{-N} / (|α| - 1), evaluated at the lower endpoint of |α|.
    let m_lo = RealEnclosure::point(m.lo().clone(), prec);
    let denom = m_lo.pow_big(&errors.len().into()).mul_ref(&m_lo.sub_ref(&one));
    let e_hi = RealEnclosure::point(bound.hi().clone(), prec);
    let tail = e_hi.div_ref(&denom)?.hi().clone();
    Ok(CValue {
        value: acc.inflate(&tail),
        tail_radius: tail,
        terms: errors.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    Bounded,
    Linear,
    Other,
}

/// Maximum residual over `[start, end]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualProfile {
    /// `|a_n - Σ β_i α_i^n|` for `n = 0..=n_max`.
    pub residuals: Vec<RealEnclosure>,
    pub max_residual: RealEnclosure,
    /// Dyadic windows `[2^k, 2^{k+1})`, plus `[0, 0]`.
    pub windows: Vec<Window>,
    pub growth: Growth,
    /// `(N, #{n <= N : residual_n > threshold})` at dyadic checkpoints.
    pub exceedances: Vec<(usize, usize)>,
    /// `(n, |a_n - ã_n|)` at dyadic `n` and at the last index.
    pub divergence: Vec<(usize, f64)>,
}

fn upper_f64(x: &RealEnclosure) -> f64 {
    x.hi().to_f64()
}

fn dyadic_checkpoints(last: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut k = 1usize;
    while k < last {
        out.push(k);
        k *= 2;
    }
    out.push(last);
    out
}

/// Residual diagnostics over `n = 0..=n_max`.
///
/// The growth label compares the maximum on `[n_max/2, n_max]` with the
/// maximum on `[1, n_max/2)`: a ratio up to 1.25 is bounded, 1.5 to 2.5 linear.
/// Both maxima are floored at `1e-9`.
pub fn residual_profile(
    values: &[Value],
    betas: &[ComplexEnclosure],
    alphas: &[ComplexEnclosure],
    tilde: &[Value],
    n_max: usize,
    threshold: Option<f64>,
) -> Result<ResidualProfile> {
    if betas.len() != alphas.len() {
        return Err(Error::LengthMismatch {
            expected: alphas.len(),
            got: betas.len(),
        });
    }
    let n_max = n_max.min(values.len().saturating_sub(1));
    let prec = betas
        .iter()
        .chain(alphas)
        .map(|z| z.precision())
        .max()
        .unwrap_or(crate::arithmetic::DEFAULT_PRECISION);
    let mut powers = betas.to_vec();
    let mut residuals = Vec::with_capacity(n_max + 1);
    for (n, v) in values.iter().enumerate().take(n_max + 1) {
        let mut r = v.enclosure(prec);
        for p in &powers {
            r = r.sub_ref(p);
        }
        residuals.push(r.abs());
        if n < n_max {
            for (p, a) in powers.iter_mut().zip(alphas) {
                *p = p.mul_ref(a);
            }
        }
    }
    let mut max_residual = RealEnclosure::zero(prec);
    for r in &residuals {
        max_residual = max_residual.max_with(r);
    }
    let ups: Vec<f64> = residuals.iter().map(upper_f64).collect();
    let window_max = |a: usize, b: usize| ups[a..=b].iter().cloned().fold(0.0, f64::max);
    let mut windows = vec![Window {
        start: 0,
        end: 0,
        max: ups[0],
    }];
    let mut k = 1;
    while k <= n_max {
        let end = (2 * k - 1).min(n_max);
        windows.push(Window {
            start: k,
            end,
            max: window_max(k, end),
        });
        k *= 2;
    }
    let growth = if n_max < 4 {
        Growth::Other
    } else {
        let first = window_max(1, n_max / 2 - 1).max(NOISE_FLOOR);
        let second = window_max(n_max / 2, n_max).max(NOISE_FLOOR);
        if second <= 1.25 * first {
            Growth::Bounded
        } else if (1.5 * first..=2.5 * first).contains(&second) {
            Growth::Linear
        } else {
            Growth::Other
        }
    };
    let exceedances = match threshold {
        Some(t) => {
            let mut out = vec![];
            let mut count = 0;
            let checkpoints = dyadic_checkpoints(n_max);
            let mut next = 0;
            for (n, r) in residuals.iter().enumerate() {
                if n >= 1 && r.lo().to_f64() > t {
                    count += 1;
                }
                if next < checkpoints.len() && n == checkpoints[next] {
                    out.push((n, count));
                    next += 1;
                }
            }
            out
        }
        None => vec![],
    };
    let divergence = dyadic_checkpoints(n_max.min(tilde.len().saturating_sub(1)))
        .into_iter()
        .map(|n| {
            let p = prec.max(64);
            let diff = values[n].enclosure(p).sub_ref(&tilde[n].enclosure(p)).abs();
            (n, diff.mid_f64())
        })
        .collect();
    Ok(ResidualProfile {
        residuals,
        max_residual,
        windows,
        growth,
        exceedances,
        divergence,
    })
}

/// Per-root data of a [`BinetReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootRecord {
    pub root: AlgebraicNumber,
    pub alpha: ComplexEnclosure,
    pub modulus: RealEnclosure,
    pub class: ModulusClass,
    pub g_hat: ComplexEnclosure,
    pub g_tilde: ComplexEnclosure,
    /// Present for roots of modulus above 1.
    pub c_value: Option<CValue>,
    pub beta: Option<ComplexEnclosure>,
    /// `β_i` certainly nonzero; `None` for roots of modulus at most 1.
    pub nonvanishing: Option<bool>,
}

/// `|a_n - Σ_{i<=r_1} β_i α_i^n| <= constant + slope·n` for every `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBound {
    pub constant: RealEnclosure,
    pub slope: RealEnclosure,
}

impl ResidualBound {
    pub fn at(&self, n: usize) -> RealEnclosure {
        self.constant.add_ref(&self.slope.mul_int(&n.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinetReport {
    pub roots: Vec<RootRecord>,
    pub r1: usize,
    pub r2: usize,
    pub error_bound: RealEnclosure,
    pub bound: ResidualBound,
    pub profile: ResidualProfile,
    /// Every sampled residual certainly lies below the bound.
    pub within_bound: bool,
    pub precision: u32,
}

impl BinetReport {
    /// Roots of modulus above 1 with their `β_i`, in order.
    pub fn dominant(&self) -> impl Iterator<Item = (&RootRecord, &ComplexEnclosure)> {
        self.roots.iter().filter_map(|r| r.beta.as_ref().map(|b| (r, b)))
    }

    pub fn to_json(&self) -> BinetReportJson {
        let b = |z: &ComplexEnclosure| z.to_box_json(Some(REPORT_DIGITS));
        let real = |x: &RealEnclosure| {
            let (lo, hi) = x.to_decimal_bounds(REPORT_DIGITS);
            [lo, hi]
        };
        BinetReportJson {
            r1: self.r1,
            r2: self.r2,
            roots: self
                .roots
                .iter()
                .map(|r| RootJson {
                    summary: crate::algebraic::CharRoot {
                        value: r.root.clone(),
                        multiplicity: 1,
                        class: r.class,
                    }
                    .summary(),
                    enclosure: b(&r.alpha),
                })
                .collect(),
            g_hat: self.roots.iter().map(|r| b(&r.g_hat)).collect(),
            g_tilde: self.roots.iter().map(|r| b(&r.g_tilde)).collect(),
            c_values: self
                .roots
                .iter()
                .map(|r| {
                    r.c_value.as_ref().map(|c| CValueJson {
                        value: b(&c.value),
                        tail_radius: format!("{:.6e}", c.tail_radius.to_f64()),
                        terms: c.terms,
                    })
                })
                .collect(),
            betas: self
                .roots
                .iter()
                .map(|r| {
                    r.beta.as_ref().map(|beta| BetaJson {
                        value: b(beta),
                        nonvanishing: r.nonvanishing.unwrap_or(false),
                    })
                })
                .collect(),
            residual_stats: ResidualStatsJson {
                sampled_up_to: self.profile.residuals.len().saturating_sub(1),
                max_residual: real(&self.profile.max_residual),
                error_bound: real(&self.error_bound),
                bound_constant: real(&self.bound.constant),
                bound_slope: real(&self.bound.slope),
                within_bound: self.within_bound,
                growth: self.profile.growth,
                windows: self.profile.windows.clone(),
            },
            divergence: self.profile.divergence.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RootJson {
    #[serde(flatten)]
    pub summary: RootSummary,
    pub enclosure: BoxJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct CValueJson {
    pub value: BoxJson,
    pub tail_radius: String,
    pub terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaJson {
    pub value: BoxJson,
    pub nonvanishing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualStatsJson {
    pub sampled_up_to: usize,
    pub max_residual: [String; 2],
    pub error_bound: [String; 2],
    pub bound_constant: [String; 2],
    pub bound_slope: [String; 2],
    pub within_bound: bool,
    pub growth: Growth,
    pub windows: Vec<Window>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BinetReportJson {
    pub r1: usize,
    pub r2: usize,
    pub roots: Vec<RootJson>,
    pub g_hat: Vec<BoxJson>,
    pub g_tilde: Vec<BoxJson>,
    pub c_values: Vec<Option<CValueJson>>,
    pub betas: Vec<Option<BetaJson>>,
    pub residual_stats: ResidualStatsJson,
    pub divergence: Vec<(usize, f64)>,
}

/// Characteristic polynomial `x^d + A_{d-1}x^{d-1} + ... + A_0` of a spec.
pub fn spec_charpoly(spec: &NlrsSpec, policy: &PrecisionPolicy) -> Result<CharPoly> {
    if let Some(c) = spec.rational_coefficients() {
        return classify_roots(&Poly::monic_from_lower(&c), policy);
    }
    let root = match &spec.coefficients[..] {
        [Coefficient::Algebraic(a)] => a.neg(),
        _ => {
            return Err(Error::InvalidSpec(
                "irrational algebraic coefficients need degree 1".into(),
            ))
        }
    };
    CharPoly::from_roots(vec![(root, 1)], policy)
}

pub fn asymptotic_coefficients(spec: &NlrsSpec, seq: &GeneratedSequence) -> Result<BinetReport> {
    asymptotic_coefficients_with(spec, seq, &PrecisionPolicy::from_env(), None)
}

/// Binet data for `spec`, with residuals sampled up to `n_max` (default:
/// the largest index at which the `β_i α_i^n` enclosures keep 64 bits).
pub fn asymptotic_coefficients_with(
    spec: &NlrsSpec,
    seq: &GeneratedSequence,
    policy: &PrecisionPolicy,
    n_max: Option<usize>,
) -> Result<BinetReport> {
    let d = spec.degree;
    let cp = spec_charpoly(spec, policy)?;
    if !cp.separable {
        return Err(Error::InseparableInput);
    }
    let e = seq
        .apriori
        .clone()
        .ok_or_else(|| Error::MissingBinetData("the rule gives no a priori error bound".into()))?;
    let len = seq.len();
    let log_mod: Vec<f64> = cp
        .roots
        .iter()
        .map(|r| {
            let (x, y) = r.value.approx();
            x.hypot(y).log2()
        })
        .collect();
    let top = log_mod.iter().cloned().fold(0.0, f64::max);
    let value_bits = seq
        .values
        .iter()
        .filter_map(Value::as_exact)
        .map(|r| r.numer().bits().max(r.denom().bits()))
        .max()
        .unwrap_or(0) as f64;
    let prec = (policy.initial as f64 + 64.0 + (len as f64) * top.max(0.0) + value_bits).ceil() as u32;
    let prec = prec.min(policy.cap.max(policy.initial));

    let init = spec.initial_terms()?;
    let init_enc: Vec<ComplexEnclosure> = init.iter().map(|v| v.enclosure(prec)).collect();
    let mut unit = vec![ComplexEnclosure::zero(prec); d];
    unit[d - 1] = ComplexEnclosure::one(prec);
    let g_hat = binet_coefficients(&cp, &unit, policy)?;
    let g_tilde = binet_coefficients(&cp, &init_enc, policy)?;

    let tail = seq.tail_errors();
    let mut roots = vec![];
    let mut betas = vec![];
    let mut alphas = vec![];
    let mut constant = RealEnclosure::zero(prec);
    let mut slope = RealEnclosure::zero(prec);
    let one = RealEnclosure::one(prec);
    for (i, r) in cp.roots.iter().enumerate() {
        let alpha = r.enclosure(prec);
        let modulus = alpha.abs();
        let gh = g_hat[i].clone();
        let gt = g_tilde[i].clone();
        let (c_value, beta, nonvanishing) = match r.class {
            ModulusClass::Above => {
                let c = c_enclosure(&alpha, tail, &e)?;
                let beta = gt.add_ref(&gh.mul_ref(&c.value));
                // |ĝ_i| E |α_i|^{d-1} / (|α_i| - 1)
                let m_lo = RealEnclosure::point(modulus.lo().clone(), prec);
                let m_hi = RealEnclosure::point(modulus.hi().clone(), prec);
                let term = gh
                    .abs()
                    .mul_ref(&e)
                    .mul_ref(&m_hi.powi(d as i64 - 1)?)
                    .div_ref(&m_lo.sub_ref(&one))?;
                constant = constant.add_ref(&term);
                betas.push(beta.clone());
                alphas.push(alpha.clone());
                let nz = beta.excludes_zero();
                (Some(c), Some(beta), Some(nz))
            }
            ModulusClass::On => {
                // |g̃_i α_i^n| + |ĝ_i| Σ_{j<=n-d+1} |e| <= |g̃_i| + |ĝ_i| E n.
                constant = constant.add_ref(&gt.abs());
                slope = slope.add_ref(&gh.abs().mul_ref(&e));
                (None, None, None)
            }
            ModulusClass::Below => {
                // |g̃_i| + |ĝ_i| E / (1 - |α_i|).
                let m_hi = RealEnclosure::point(modulus.hi().clone(), prec);
                let term = gh.abs().mul_ref(&e).div_ref(&one.sub_ref(&m_hi))?;
                constant = constant.add_ref(&gt.abs()).add_ref(&term);
                (None, None, None)
            }
        };
        roots.push(RootRecord {
            root: r.value.clone(),
            alpha,
            modulus,
            class: r.class,
            g_hat: gh,
            g_tilde: gt,
            c_value,
            beta,
            nonvanishing,
        });
    }
    let bound = ResidualBound { constant, slope };

    // Keep n where E |α|^{n-N}/(|α|-1) |ĝ| stays below 2^-64.
    let min_above = cp
        .roots
        .iter()
        .zip(&log_mod)
        .filter(|(r, _)| r.class == ModulusClass::Above)
        .map(|(_, &l)| l)
        .fold(f64::INFINITY, f64::min);
    let guard = if min_above.is_finite() {
        (GUARD_BITS / min_above).ceil() as usize
    } else {
        0
    };
    let auto = (len.saturating_sub(1)).saturating_sub(guard);
    let n_max = n_max.unwrap_or(auto).min(len.saturating_sub(1));
    let (_, tilde) = associated_lrs(spec, len - 1)?;
    let profile = residual_profile(&seq.values, &betas, &alphas, &tilde, n_max, None)?;
    let within_bound = profile
        .residuals
        .iter()
        .enumerate()
        .all(|(n, r)| r.certainly_le(&bound.at(n)));
    Ok(BinetReport {
        r1: cp.r1,
        r2: cp.r2,
        roots,
        error_bound: e,
        bound,
        profile,
        within_bound,
        precision: prec,
    })
}

/// Cesàro estimate `(1/T) Σ_{n=n_0}^{n_0+T-1} g(n) η^{-n}`, `samples[k] = g(n_0 + k)`.
pub fn recover_coefficient<F: Float>(samples: &[Complex<F>], n0: i64, eta: Complex<F>) -> Complex<F> {
    if samples.is_empty() {
        return Complex::new(F::zero(), F::zero());
    }
    let inv = eta.inv();
    let mut w = inv.powi(n0 as i32);
    let mut acc = Complex::new(F::zero(), F::zero());
    for g in samples {
        acc = acc + *g * w;
        w = w * inv;
    }
    acc / F::from(samples.len()).unwrap()
}

/// Enclosure version of [`recover_coefficient`].
pub fn recover_coefficient_enclosure(
    samples: &[ComplexEnclosure],
    n0: i64,
    eta: &ComplexEnclosure,
) -> Result<ComplexEnclosure> {
    let prec = eta.precision();
    if samples.is_empty() {
        return Ok(ComplexEnclosure::zero(prec));
    }
    let inv = eta.recip()?;
    let mut w = inv.powi(n0)?;
    let mut acc = ComplexEnclosure::zero(prec);
    for g in samples {
        acc = acc.add_ref(&g.mul_ref(&w));
        w = w.mul_ref(&inv);
    }
    let t = RealEnclosure::from_int(samples.len() as u64, prec);
    Ok(acc.scale(&t.recip()?))
}

/// `#{1 <= n <= N : |Σ γ_i η_i^n| > threshold}` at dyadic checkpoints `N`.
pub fn exceedance_counts<F: Float>(
    gammas: &[Complex<F>],
    etas: &[Complex<F>],
    threshold: F,
    n_max: usize,
) -> Vec<(usize, usize)> {
    let mut powers: Vec<Complex<F>> = gammas.to_vec();
    let checkpoints = dyadic_checkpoints(n_max);
    let mut out = vec![];
    let mut count = 0;
    let mut next = 0;
    for n in 1..=n_max {
        let mut s = Complex::new(F::zero(), F::zero());
        for (p, e) in powers.iter_mut().zip(etas) {
            *p = *p * *e;
            s = s + *p;
        }
        if s.norm() > threshold {
            count += 1;
        }
        if next < checkpoints.len() && n == checkpoints[next] {
            out.push((n, count));
            next += 1;
        }
    }
    out
}
