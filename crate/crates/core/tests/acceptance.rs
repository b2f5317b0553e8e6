//! Acceptance criteria 1 to 10. Each prints one `PASS`/`FAIL` line with its
//! measured quantity, tolerance and runtime against the limit.

use std::io::Write;
use std::time::{Duration, Instant};

use nlrs_core::algebraic::{classify_roots, reduce_to_nlrs_charpoly, AlgebraicNumber, Poly};
use nlrs_core::arithmetic::{elementary, Expr};
use nlrs_core::binet::{asymptotic_coefficients_with, c_enclosure, recover_coefficient};
use nlrs_core::common_terms::{
    build_counterexample_pair, certify_gaps, gap_constants, matveev_lower_bound, rational_line_fit, search_common,
    DominantData, LineFit, MatveevInput, PairVerification, SolutionSet,
};
use nlrs_core::diophantine::build_zero_rich;
use nlrs_core::sequences::{
    associated_lrs, generate_certified, generate_with, verify_decomposition, Coefficient, GeneratedSequence, NlrsSpec,
    Rule, TargetTerm, Value,
};
use nlrs_core::{BigInt, ComplexEnclosure, ExactRational as Q, PrecisionPolicy, RealEnclosure, RoundingMode};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn report(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let passed = o.passed && in_time;
    let line = format!(
        "criterion {id:>2} {} {name}: {}; {:.2}s (limit {}s{})",
        if passed { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" },
    );
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    passed
}

fn floor_power_spec(num: i64, den: i64) -> NlrsSpec {
    NlrsSpec {
        degree: 1,
        coefficients: vec![Coefficient::Rational(-q(num, den))],
        initial: vec![],
        rule: Rule::Target {
            terms: vec![TargetTerm {
                gamma: Expr::int(1),
                alpha: AlgebraicNumber::from_rational(&q(num, den)),
            }],
            rounding: RoundingMode::Floor,
            offset: BigInt::zero(),
        },
    }
}

fn srs_spec(coefficients: Vec<Q>, initial: Vec<Q>) -> NlrsSpec {
    NlrsSpec {
        degree: coefficients.len(),
        coefficients: coefficients.into_iter().map(Coefficient::Rational).collect(),
        initial,
        rule: Rule::Srs,
    }
}

fn exact(v: &Value) -> Q {
    v.as_exact().expect("exact term").clone()
}

/// Scaled residuals `L²(a_n - ã_n) - Σ_{j=1}^{n-d+1} Lâ_{n-j} Le_{d-1+j}` from
/// first principles, with `L` a common denominator; zero iff the identity holds.
fn decomposition_oracle(c: &[Q], a: &[Q]) -> Vec<BigInt> {
    let d = c.len();
    let lrs = |init: &[Q]| {
        let mut s = init.to_vec();
        for n in d..a.len() {
            let next: Q = -(0..d).map(|i| &c[i] * &s[n - d + i]).sum::<Q>();
            s.push(next);
        }
        s
    };
    let mut unit = vec![Q::zero(); d];
    unit[d - 1] = Q::one();
    let hat = lrs(&unit);
    let tilde = lrs(&a[..d]);
    let e: Vec<Q> = (0..a.len())
        .map(|n| {
            if n < d {
                Q::zero()
            } else {
                &a[n] + (0..d).map(|i| &c[i] * &a[n - d + i]).sum::<Q>()
            }
        })
        .collect();
    let l = hat
        .iter()
        .chain(&tilde)
        .chain(&e)
        .chain(a)
        .fold(BigInt::one(), |l, r| num_integer::Integer::lcm(&l, r.denom()));
    let scale = |v: &[Q]| -> Vec<BigInt> { v.iter().map(|r| (r * &l).to_integer()).collect() };
    let (h, e, t, a) = (scale(&hat), scale(&e), scale(&tilde), scale(a));
    (0..a.len())
        .map(|n| {
            let tail: BigInt = (1..=(n + 1).saturating_sub(d)).map(|j| &h[n - j] * &e[d - 1 + j]).sum();
            (&a[n] - &t[n]) * &l - tail
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let pol = PrecisionPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nonzero = 0usize;
    let mut checked = 0usize;
    for _ in 0..100 {
        let d = rng.gen_range(1..=5);
        let c: Vec<Q> = (0..d)
            .map(|_| {
                let den = rng.gen_range(1..=4i64);
                q(rng.gen_range(-3 * den..=3 * den), den)
            })
            .collect();
        let init: Vec<Q> = (0..d).map(|_| q(rng.gen_range(-5..=5), 1)).collect();
        let spec = srs_spec(c.clone(), init);
        let n = rng.gen_range(d..=300);
        let seq = generate_with(&spec, n, &pol).expect("srs generates");
        let (hat, tilde) = associated_lrs(&spec, n).expect("associated lrs");
        let library = verify_decomposition(&seq, &hat, &tilde).expect("decomposition");
        let a: Vec<Q> = seq.values.iter().map(exact).collect();
        let oracle = decomposition_oracle(&c, &a);
        for (l, o) in library.iter().zip(&oracle) {
            checked += 1;
            if !exact(l).is_zero() || !o.is_zero() {
                nonzero += 1;
            }
        }
    }
    outcome(
        nonzero == 0,
        format!("{nonzero} nonzero residuals among {checked} terms of 100 specs (tolerance: exact zero)"),
    )
}

fn criterion_2() -> Outcome {
    let pol = PrecisionPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0usize;
    for _ in 0..50 {
        let d = rng.gen_range(1..=5);
        let c: Vec<Q> = (0..d).map(|_| q(rng.gen_range(-3..=3), 1)).collect();
        let init: Vec<Q> = (0..d).map(|_| q(rng.gen_range(-5..=5), 1)).collect();
        let spec = srs_spec(c.clone(), init.clone());
        let seq = generate_with(&spec, 200, &pol).expect("srs generates");
        // Oracle: the exact linear recurrence.
        let mut s = init;
        for n in d..=200 {
            let next: Q = -(0..d).map(|i| &c[i] * &s[n - d + i]).sum::<Q>();
            s.push(next);
        }
        let errors_zero = seq.errors[d..].iter().all(|e| exact(e).is_zero());
        let values_match = seq.values.iter().map(exact).eq(s);
        if !(errors_zero && values_match) {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad} of 50 specs with some e_n != 0 for n >= d (tolerance: exact)"),
    )
}

fn criterion_3() -> Outcome {
    let pol = PrecisionPolicy::default();
    let prec = 256;
    let cp = classify_roots(&Poly::from_ints(&[-1, -1, 1]), &pol).expect("roots");
    let red = reduce_to_nlrs_charpoly(&cp, &pol).expect("reduction");
    if red.charpoly.roots.len() != 1 || red.stripped.len() != 1 {
        return outcome(false, "reduction did not leave a single root");
    }
    let theta = red.charpoly.roots[0].value.clone();
    let psi = Expr::algebraic(red.stripped[0].value.clone());
    let n_terms = 120;
    let spec = NlrsSpec {
        degree: 1,
        coefficients: vec![Coefficient::Algebraic(theta.neg())],
        initial: vec![Q::zero()],
        rule: Rule::ExplicitErrors {
            errors: (0..n_terms).map(|j| Expr::pow(&psi, BigInt::from(j))).collect(),
            bound: Q::one(),
        },
    };
    let seq = generate_with(&spec, n_terms, &pol).expect("generates");
    let rep = asymptotic_coefficients_with(&spec, &seq, &pol, Some(60)).expect("binet");
    let beta = rep.roots[0].beta.clone().expect("beta");
    let inv_sqrt5 = elementary::sqrt(&RealEnclosure::from_int(5, prec))
        .recip()
        .expect("nonzero");
    let contains = beta.re.encloses(&inv_sqrt5) && beta.im.contains_zero();
    let width = beta.width().to_f64();
    // Oracle: exact Fibonacci numbers against θ^n/√5.
    let th = theta.enclosure(prec).re;
    let (mut f0, mut f1) = (BigInt::zero(), BigInt::one());
    let mut max_res = 0f64;
    let mut generated_ok = true;
    for n in 0..=60 {
        let fnv = RealEnclosure::from_int(f0.clone(), prec);
        generated_ok &=
            seq.values[n].enclosure(prec).re.encloses(&fnv) || seq.values[n].as_integer() == Some(f0.clone());
        let r = fnv.sub_ref(&th.powi(n as i64).unwrap().mul_ref(&inv_sqrt5)).abs();
        max_res = max_res.max(r.hi().to_f64());
        let next = &f0 + &f1;
        f0 = std::mem::replace(&mut f1, next);
    }
    let limit = 1.0 / 5f64.sqrt() + 1e-12;
    outcome(
        contains && width <= 1e-10 && max_res <= limit && generated_ok,
        format!(
            "beta contains 1/sqrt5: {contains}, width {width:.3e} (<= 1e-10); max residual {max_res:.12} (<= 1/sqrt5 + 1e-12)"
        ),
    )
}

fn criterion_4() -> (Outcome, Option<GeneratedSequence>) {
    let pol = PrecisionPolicy::default();
    let spec = floor_power_spec(3, 2);
    let seq = match generate_certified(&spec, 1000, &pol) {
        Ok(s) => s,
        Err(e) => return (outcome(false, format!("generation failed: {e}")), None),
    };
    // Oracle: ⌊3^n / 2^n⌋ in integers.
    let floors_ok = (0..=500u32).all(|n| {
        let want = num_integer::Integer::div_floor(&BigInt::from(3).pow(n), &BigInt::from(2).pow(n));
        seq.values[n as usize].as_integer() == Some(want)
    });
    let rep = asymptotic_coefficients_with(&spec, &seq, &pol, Some(500)).expect("binet");
    let above = rep
        .profile
        .residuals
        .iter()
        .enumerate()
        .filter(|(n, r)| !r.certainly_le(&rep.bound.at(*n)))
        .count();
    let max_res = rep.profile.max_residual.hi().to_f64();
    let bound0 = rep.bound.at(0).lo().to_f64();
    let passed = floors_ok
        && seq.max_precision <= pol.cap
        && above == 0
        && rep.within_bound
        && rep.profile.residuals.len() == 501;
    (
        outcome(
            passed,
            format!(
                "floors match oracle: {floors_ok}; max precision {} of cap {}; max residual {max_res:.6} against bound {bound0:.6}; {above} samples above",
                seq.max_precision, pol.cap
            ),
        ),
        Some(seq),
    )
}

fn criterion_5() -> (Outcome, Option<nlrs_core::common_terms::CounterexamplePair>) {
    let pol = PrecisionPolicy::default();
    let r = build_counterexample_pair(
        &AlgebraicNumber::from_integer(2),
        &AlgebraicNumber::from_integer(3),
        &q(21, 20),
        3,
        &pol,
    );
    let p = match r {
        Ok(p) => p,
        Err(e) => return (outcome(false, format!("construction failed: {e}")), None),
    };
    // Oracle: ⌊2^k⌋ = 2^k against the generated b spec at every numeric pair.
    let mut exact_ok = 0usize;
    for pair in p
        .solutions
        .pairs
        .iter()
        .filter(|s| s.verification == PairVerification::Exact)
    {
        let k = pair.k.to_u32().expect("small k");
        let m = pair.m.to_usize().expect("small m");
        let b = generate_with(&p.b_spec, m, &pol).expect("b generates");
        if b.values[m].as_integer() == Some(BigInt::from(1) << k) {
            exact_ok += 1;
        }
    }
    let stages: Vec<bool> = p
        .construction
        .trace
        .stages
        .iter()
        .chain(&p.construction.trace.pairs)
        .filter(|s| s.retained)
        .map(|s| s.check.passed)
        .collect();
    let all_stages = !stages.is_empty() && stages.iter().all(|b| *b);
    let fit = rational_line_fit(&p.solutions.as_tuples());
    let passed = exact_ok >= 2 && all_stages && fit == LineFit::NoLine;
    (
        outcome(
            passed,
            format!(
                "{exact_ok} numerically verified pairs of {} (>= 2); {} stage checks certified: {all_stages}; line fit {fit:?}",
                p.solutions.len(),
                stages.len()
            ),
        ),
        Some(p),
    )
}

/// `-1.4·30^(t+3)·t^4.5·D²(1 + log D)(1 + log B)·Π A_i` in `f64`.
fn matveev_oracle(t: i32, d: f64, b: f64, a: &[f64]) -> f64 {
    -1.4 * 30f64.powi(t + 3)
        * (t as f64).powf(4.5)
        * d
        * d
        * (1.0 + d.ln())
        * (1.0 + b.ln())
        * a.iter().product::<f64>()
}

fn criterion_6() -> Outcome {
    let mut rel = vec![];
    for (b, frozen) in [(10i64, -1.93596e9), (100, -3.28573e9)] {
        let input = MatveevInput::new(
            vec![AlgebraicNumber::from_integer(2), AlgebraicNumber::from_integer(3)],
            vec![BigInt::from(1), BigInt::from(-1)],
        )
        .and_then(|i| i.with_degree(1))
        .map(|i| i.with_b(BigInt::from(b)));
        let v = match input.and_then(|i| matveev_lower_bound(&i)) {
            Ok(v) => v.mid_f64(),
            Err(e) => return outcome(false, format!("evaluation failed: {e}")),
        };
        let oracle = matveev_oracle(2, 1.0, b as f64, &[2f64.ln(), 3f64.ln()]);
        rel.push(((v - frozen) / frozen).abs().max(((v - oracle) / oracle).abs()));
    }
    outcome(
        rel.iter().all(|r| *r <= 1e-5),
        format!(
            "relative errors {:.2e} (B=10), {:.2e} (B=100) against 1e-5",
            rel[0], rel[1]
        ),
    )
}

fn dominant(spec: &NlrsSpec, n: usize, pol: &PrecisionPolicy) -> nlrs_core::Result<DominantData> {
    let seq = generate_with(spec, n, pol)?;
    DominantData::from_report(&asymptotic_coefficients_with(spec, &seq, pol, None)?)
}

fn criterion_7(cx: Option<&nlrs_core::common_terms::CounterexamplePair>) -> Outcome {
    let pol = PrecisionPolicy::default();
    let mut details = vec![];
    let mut passed = true;
    match cx {
        Some(p) => {
            let r = dominant(&p.a_spec, 60, &pol)
                .and_then(|a| Ok((a, dominant(&p.b_spec, 60, &pol)?)))
                .and_then(|(a, b)| gap_constants(&a, &b))
                .and_then(|k| certify_gaps(&k, &p.solutions));
            match r {
                Ok(c) => {
                    passed &= c.passed;
                    details.push(format!(
                        "2 vs 3: K_0 {}, {} checks, {} violations",
                        c.k0,
                        c.checks.len(),
                        c.violations
                    ));
                }
                Err(e) => {
                    passed = false;
                    details.push(format!("2 vs 3: {e}"));
                }
            }
        }
        None => {
            passed = false;
            details.push("criterion 5 produced no solutions".into());
        }
    }
    let a_spec = floor_power_spec(3, 2);
    let b_spec = floor_power_spec(5, 2);
    let r = (|| {
        let a = generate_with(&a_spec, 200, &pol)?;
        let b = generate_with(&b_spec, 200, &pol)?;
        let sols: SolutionSet = search_common(&a, &b, 200, 200)?;
        let k = gap_constants(&dominant(&a_spec, 200, &pol)?, &dominant(&b_spec, 200, &pol)?)?;
        Ok::<_, nlrs_core::Error>((sols.len(), certify_gaps(&k, &sols)?))
    })();
    match r {
        Ok((n, c)) => {
            passed &= c.passed;
            details.push(format!(
                "3/2 vs 5/2: {n} solutions, K_0 {}, {} checks, {} violations",
                c.k0,
                c.checks.len(),
                c.violations
            ));
        }
        Err(e) => {
            passed = false;
            details.push(format!("3/2 vs 5/2: {e}"));
        }
    }
    outcome(passed, details.join("; "))
}

fn criterion_8() -> Outcome {
    let pol = PrecisionPolicy::default();
    let eta = AlgebraicNumber::from_minpoly_near(&[5.into(), (-8).into(), 5.into()], &q(4, 5), &q(3, 5), &q(1, 10))
        .expect("eta isolates");
    let z = match build_zero_rich(&q(2, 1), &eta, &q(2, 1), 3, &pol) {
        Ok(z) => z,
        Err(e) => return outcome(false, format!("construction failed: {e}")),
    };
    // Oracle: regenerate the spec and compare with the reported values.
    let regen = generate_with(&z.spec, z.covered(), &pol).expect("spec generates");
    let regen_ok = regen
        .values
        .iter()
        .zip(&z.values)
        .all(|(v, w)| v.as_integer().as_ref() == Some(w));
    let zeros_ok = z
        .zeros
        .iter()
        .filter_map(|c| c.n.to_usize())
        .filter(|n| *n <= z.covered())
        .all(|n| z.values[n].is_zero());
    let max_abs = z.values.iter().map(|v| v.abs()).max().unwrap_or_default();
    let classes_ok =
        (1..=5usize).all(|v| (0..v).all(|u| (u..z.values.len()).step_by(v).any(|n| !z.values[n].is_zero())));
    let passed = z.zeros.len() >= 3 && regen_ok && zeros_ok && max_abs >= BigInt::from(100) && classes_ok;
    outcome(
        passed,
        format!(
            "{} certified zeros (>= 3); covered range 0..={} with max |a_n| = {max_abs} (>= 100); every class mod v <= 5 has a nonzero term: {classes_ok}",
            z.zeros.len(),
            z.covered()
        ),
    )
}

fn criterion_9() -> Outcome {
    const T: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0f64;
    let mut ok = true;
    for _ in 0..10 {
        let r = rng.gen_range(1..=4usize);
        // Bases e^{2πiθ} with pairwise distance at least 1/2.
        let mut etas: Vec<Complex64> = vec![];
        while etas.len() < r {
            let theta: f64 = rng.gen_range(0.0..1.0);
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
            if etas.iter().all(|x| (x - e).norm() >= 0.5) {
                etas.push(e);
            }
        }
        let coeffs: Vec<Complex64> = (0..r)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let samples: Vec<Complex64> = (0..T)
            .map(|n| coeffs.iter().zip(&etas).map(|(c, e)| c * e.powu(n as u32)).sum())
            .collect();
        let sup = samples.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let tol = 10.0 / T as f64 * sup * r as f64;
        for (c, e) in coeffs.iter().zip(&etas) {
            let err = (recover_coefficient(&samples, 0, *e) - c).norm();
            worst = worst.max(err / tol);
            ok &= err <= tol;
        }
    }
    outcome(
        ok,
        format!("worst error {worst:.3} of the tolerance 10/T sup|g| r at T = 10^4"),
    )
}

fn criterion_10(seq: Option<&GeneratedSequence>) -> Outcome {
    let Some(seq) = seq else {
        return outcome(false, "criterion 4 sequence unavailable");
    };
    let prec = 256;
    let alpha = ComplexEnclosure::from_rationals(&q(3, 2), &Q::zero(), prec);
    let bound = seq.bound().with_precision(prec);
    let errors = seq.tail_errors();
    let encs: Vec<ComplexEnclosure> = [10usize, 20, 40, 80]
        .iter()
        .map(|n| c_enclosure(&alpha, &errors[..*n], &bound).expect("c enclosure").value)
        .collect();
    let nested = encs.windows(2).all(|w| w[0].strictly_encloses(&w[1]));
    let widths: Vec<String> = encs.iter().map(|e| format!("{:.2e}", e.width().to_f64())).collect();
    outcome(
        nested,
        format!(
            "strictly nested at N = 10, 20, 40, 80: {nested}; widths {}",
            widths.join(", ")
        ),
    )
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let mut results = vec![
        report(1, "decomposition identity", s(10), criterion_1),
        report(2, "lrs degeneration", s(2), criterion_2),
        report(3, "Fibonacci pipeline", s(2), criterion_3),
    ];
    let mut floor_seq = None;
    results.push(report(4, "floor-power certification", s(30), || {
        let (o, seq) = criterion_4();
        floor_seq = seq;
        o
    }));
    let mut cx = None;
    results.push(report(5, "counterexample factory", s(60), || {
        let (o, p) = criterion_5();
        cx = p;
        o
    }));
    results.push(report(6, "Matveev evaluator", s(1), criterion_6));
    results.push(report(7, "gap certificate", s(60), || criterion_7(cx.as_ref())));
    results.push(report(8, "zero-rich nlrs", s(120), criterion_8));
    results.push(report(9, "Cesaro recovery", s(30), criterion_9));
    results.push(report(10, "c-enclosure nesting", s(2), || {
        criterion_10(floor_seq.as_ref())
    }));
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, p)| !**p)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
