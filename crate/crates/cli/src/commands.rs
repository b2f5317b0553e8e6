use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlrs_core::binet::{asymptotic_coefficients_with, spec_charpoly};
use nlrs_core::common_terms::{
    build_counterexample_pair, certify_gaps, gap_constants, matveev_lower_bound, rational_line_fit,
    rational_line_fit_with, search_common_with, DominantData, MatveevInput, MatveevReport, SolutionSet,
};
use nlrs_core::diophantine::trace::enclosure_strings;
use nlrs_core::diophantine::{
    build_zero_rich, construct_fluctuating_tail, construct_gamma, construct_shift, continued_fraction_rational,
    continued_fraction_with, ContinuedFraction,
};
use nlrs_core::sequences::{decimal, generate_with, GeneratedSequence, NlrsSpec, Value};
use nlrs_core::spec_io::{parse_algebraic, parse_expr, parse_rational_arg, read_spec, spec_to_json};
use nlrs_core::{AlgebraicNumber, BigInt, Error, PrecisionPolicy, RealEnclosure, Result};
use serde_json::{json, Value as Json};

use crate::{Command, Common, Construct, Format, Global, Output};

/// Decimal digits of non-integer terms.
const DIGITS: usize = 20;
/// Working precision for heights and explicit Matveev `A_i`.
const REPORT_PRECISION: u32 = 256;

pub fn dispatch(command: &Command, global: &Global, policy: &PrecisionPolicy) -> Result<Output> {
    let format = global.format;
    if format == Some(Format::Csv) && !matches!(command, Command::Generate { .. }) {
        return Err(Error::InvalidInput("only generate emits csv".into()));
    }
    let out = match command {
        Command::Generate { config, count } => return generate(config, *count, format, policy),
        Command::Analyze { config, count } => analyze(config, *count, policy)?,
        Command::Construct(c) => construct(c, policy)?,
        Command::Common(c) => return common(c, policy),
        Command::Heights { config, alphas } => heights(config.as_deref(), alphas, policy)?,
        Command::Cf { value, count } => cf(value, *count, policy)?,
    };
    Ok(Output::ok(render(&out)))
}

fn render(j: &Json) -> String {
    let mut s = serde_json::to_string_pretty(j).expect("json renders");
    s.push('\n');
    s
}

fn error_cell(v: &Value) -> String {
    let d = decimal(v, DIGITS);
    match v.as_exact() {
        Some(r) if !r.is_integer() => format!("{d} [{r}]"),
        _ => d,
    }
}

fn generate(config: &Path, count: usize, format: Option<Format>, policy: &PrecisionPolicy) -> Result<Output> {
    let spec = read_spec(config)?;
    let seq = generate_with(&spec, count, policy)?;
    let rows = seq.values.iter().zip(&seq.errors).enumerate();
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("n,a_n,e_n\n");
            for (n, (a, e)) in rows {
                s.push_str(&format!("{n},{},{}\n", decimal(a, DIGITS), error_cell(e)));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Json> = rows
                .map(|(n, (a, e))| json!({"n": n, "a_n": decimal(a, DIGITS), "e_n": error_cell(e)}))
                .collect();
            render(&json!({ "rows": rows, "max_precision": seq.max_precision }))
        }
    };
    Ok(Output::ok(text))
}

fn sequence(path: &Path, count: usize, policy: &PrecisionPolicy) -> Result<(NlrsSpec, GeneratedSequence)> {
    let spec = read_spec(path)?;
    let seq = generate_with(&spec, count, policy)?;
    Ok((spec, seq))
}

fn analyze(config: &Path, count: usize, policy: &PrecisionPolicy) -> Result<Json> {
    let (spec, seq) = sequence(config, count, policy)?;
    let report = asymptotic_coefficients_with(&spec, &seq, policy, None)?;
    Ok(serde_json::to_value(report.to_json()).expect("report serialises"))
}

fn construct(c: &Construct, policy: &PrecisionPolicy) -> Result<Json> {
    Ok(match c {
        Construct::Shift { a, b, c, depth } => {
            let (a, b) = (parse_expr(a, "a")?, parse_expr(b, "b")?);
            construct_shift(&a, &b, &parse_rational_arg(c, "c")?, *depth, policy)?
                .trace
                .to_json()
        }
        Construct::Gamma { alpha, beta, c, depth } => {
            let (a, b) = (parse_expr(alpha, "alpha")?, parse_expr(beta, "beta")?);
            construct_gamma(&a, &b, &parse_rational_arg(c, "c")?, *depth, policy)?
                .trace
                .to_json()
        }
        Construct::Fluctuate {
            etas,
            gammas,
            d2,
            depth,
        } => {
            let etas = exprs(etas, "eta")?;
            let gammas = exprs(gammas, "gamma")?;
            construct_fluctuating_tail(&etas, &gammas, &parse_rational_arg(d2, "d2")?, *depth, policy)?
                .trace
                .to_json()
        }
        Construct::Zeros { rho, eta, c, depth } => {
            let rho = parse_rational_arg(rho, "rho")?;
            let eta = parse_algebraic(eta, "eta")?;
            let z = build_zero_rich(&rho, &eta, &parse_rational_arg(c, "c")?, *depth, policy)?;
            let mut trace = z.trace.to_json();
            trace["spec"] = spec_to_json(&z.spec)?;
            trace["branch"] = serde_json::to_value(z.branch).expect("branch serialises");
            trace["zeros"] = serde_json::to_value(&z.zeros).expect("zeros serialise");
            trace["covered"] = json!(z.covered());
            trace["max_abs"] = json!(z.max_abs.to_string());
            trace
        }
    })
}

fn exprs(texts: &[String], name: &str) -> Result<Vec<Arc<nlrs_core::arithmetic::Expr>>> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_expr(t, &format!("{name}[{i}]")))
        .collect()
}

fn two_configs(configs: &[PathBuf]) -> Result<(&Path, &Path)> {
    match configs {
        [a, b] => Ok((a, b)),
        _ => Err(Error::InvalidInput(format!(
            "expected two --config files, got {}",
            configs.len()
        ))),
    }
}

fn search(
    a: &GeneratedSequence,
    b: &GeneratedSequence,
    kmax: usize,
    mmax: usize,
    workers: usize,
) -> Result<SolutionSet> {
    let mut set = search_common_with(a, b, kmax, mmax, workers.max(1))?;
    set.line_fit = Some(rational_line_fit(&set.as_tuples()));
    Ok(set)
}

fn common(c: &Common, policy: &PrecisionPolicy) -> Result<Output> {
    let out = match c {
        Common::Search {
            configs,
            kmax,
            mmax,
            workers,
        } => {
            let (pa, pb) = two_configs(configs)?;
            let (_, a) = sequence(pa, *kmax, policy)?;
            let (_, b) = sequence(pb, *mmax, policy)?;
            search(&a, &b, *kmax, *mmax, *workers)?.to_json()
        }
        Common::Counterexample { alpha, beta, c, depth } => {
            let alpha = parse_algebraic(alpha, "alpha")?;
            let beta = parse_algebraic(beta, "beta")?;
            let p = build_counterexample_pair(&alpha, &beta, &parse_rational_arg(c, "c")?, *depth, policy)?;
            let dropped: Vec<Json> = p
                .dropped
                .iter()
                .map(|(k, m)| json!([k.to_string(), m.to_string()]))
                .collect();
            json!({
                "a_spec": spec_to_json(&p.a_spec)?,
                "b_spec": spec_to_json(&p.b_spec)?,
                "b_rounding": format!("{:?}", p.b_rounding),
                "u": p.u.to_string(),
                "solutions": p.solutions.to_json(),
                "dropped": dropped,
                "trace": p.construction.trace.to_json(),
            })
        }
        Common::Gaps {
            configs,
            count,
            kmax,
            mmax,
            workers,
        } => {
            let (pa, pb) = two_configs(configs)?;
            let n = (*count).max(*kmax).max(*mmax);
            let (sa, a) = sequence(pa, n, policy)?;
            let (sb, b) = sequence(pb, n, policy)?;
            let ra = asymptotic_coefficients_with(&sa, &a, policy, Some(*count))?;
            let rb = asymptotic_coefficients_with(&sb, &b, policy, Some(*count))?;
            let constants = gap_constants(&DominantData::from_report(&ra)?, &DominantData::from_report(&rb)?)?;
            let solutions = search(&a, &b, *kmax, *mmax, *workers)?;
            let cert = certify_gaps(&constants, &solutions)?;
            let text = render(&json!({
                "constants": constants.to_json(),
                "solutions": solutions.to_json(),
                "certificate": serde_json::to_value(&cert).expect("certificate serialises"),
            }));
            return Ok(Output {
                text,
                code: if cert.passed { 0 } else { 1 },
            });
        }
        Common::Matveev {
            gammas,
            exponents,
            degree,
            bound,
            a,
        } => {
            let gammas = gammas
                .iter()
                .enumerate()
                .map(|(i, g)| parse_algebraic(g, &format!("gamma[{i}]")))
                .collect::<Result<Vec<AlgebraicNumber>>>()?;
            let exponents = exponents
                .iter()
                .enumerate()
                .map(|(i, e)| integer(e, &format!("exponent[{i}]")))
                .collect::<Result<Vec<BigInt>>>()?;
            let mut input = MatveevInput::new(gammas, exponents)?;
            if let Some(d) = degree {
                input = input.with_degree(*d)?;
            }
            if let Some(b) = bound {
                input = input.with_b(integer(b, "bound")?);
            }
            if !a.is_empty() {
                let a = a
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        parse_rational_arg(t, &format!("a[{i}]"))
                            .map(|r| RealEnclosure::from_rational(&r, REPORT_PRECISION))
                    })
                    .collect::<Result<Vec<_>>>()?;
                input = input.with_a(a);
            }
            let lb = matveev_lower_bound(&input)?;
            serde_json::to_value(MatveevReport::new(&input, &lb)).expect("report serialises")
        }
        Common::Linefit { pairs, tolerance } => {
            let pairs = pairs
                .iter()
                .enumerate()
                .map(|(i, p)| pair(p, i))
                .collect::<Result<Vec<_>>>()?;
            serde_json::to_value(rational_line_fit_with(&pairs, *tolerance)).expect("line fit serialises")
        }
    };
    Ok(Output::ok(render(&out)))
}

fn integer(text: &str, path: &str) -> Result<BigInt> {
    text.trim()
        .parse()
        .map_err(|_| Error::schema(path, format!("expected an integer, got {text:?}")))
}

fn pair(text: &str, i: usize) -> Result<(BigInt, BigInt)> {
    let path = format!("pair[{i}]");
    let (k, m) = text
        .split_once(',')
        .ok_or_else(|| Error::schema(&path, format!("expected k,m, got {text:?}")))?;
    Ok((integer(k, &path)?, integer(m, &path)?))
}

fn height_entry(a: &AlgebraicNumber, policy: &PrecisionPolicy) -> Result<Json> {
    let h = a.height(REPORT_PRECISION.min(policy.cap))?;
    let minpoly: Vec<String> = a.minpoly().iter().map(|c| c.to_string()).collect();
    Ok(json!({
        "minpoly": minpoly,
        "approx": a.approx_string(),
        "height": enclosure_strings(&h),
    }))
}

fn heights(config: Option<&Path>, alphas: &[String], policy: &PrecisionPolicy) -> Result<Json> {
    let mut out = vec![];
    if let Some(path) = config {
        let spec = read_spec(path)?;
        for root in spec_charpoly(&spec, policy)?.roots {
            let mut e = height_entry(&root.value, policy)?;
            e["multiplicity"] = json!(root.multiplicity);
            e["class"] = serde_json::to_value(root.class).expect("class serialises");
            out.push(e);
        }
    }
    for (i, a) in alphas.iter().enumerate() {
        out.push(height_entry(&parse_algebraic(a, &format!("alpha[{i}]"))?, policy)?);
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("heights needs --config or --alpha".into()));
    }
    Ok(json!({ "heights": out }))
}

fn cf_json(cf: &ContinuedFraction) -> Json {
    let q: Vec<String> = cf.partial_quotients.iter().map(|a| a.to_string()).collect();
    let c: Vec<String> = cf.convergents.iter().map(|(p, q)| format!("{p}/{q}")).collect();
    json!({ "partial_quotients": q, "convergents": c, "terminated": cf.terminated })
}

fn cf(value: &str, count: usize, policy: &PrecisionPolicy) -> Result<Json> {
    let x = parse_expr(value, "value")?;
    let cf = match x.exact() {
        Some((re, im)) if im == Default::default() => continued_fraction_rational(&re, count),
        Some(_) => return Err(Error::InvalidInput("value must be real".into())),
        None => continued_fraction_with(policy, count, |prec| {
            let z = x.eval_at(prec)?;
            if !z.im.contains_zero() {
                return Err(Error::InvalidInput("value must be real".into()));
            }
            Ok(z.re)
        })?,
    };
    Ok(cf_json(&cf))
}
