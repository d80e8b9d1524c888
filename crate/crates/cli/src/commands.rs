//! One function per subcommand. Each returns the stdout text, the report
//! files and any invariant violations it detected.

use serde_json::{json, Value};
use sigma_series::acceptance::{verify_all, SuiteConfig};
use sigma_series::arith::int;
use sigma_series::criteria::{
    calibrated_constant, condition_i_eval, default_epsilon, endgame_eval, eq1_eval, eq2_eval,
    scaled_sigma3, sigma3_window, small_k_elimination, subset_expand, CriterionResult,
    QuarterShift, SmallK,
};
use sigma_series::equidist::{
    discrepancy_report, sweep, EtParams, SequenceSpec, SweepConfig, VdcAlphaFactor, VdcParams,
};
use sigma_series::oracle::is_prime_by_trial_division;
use sigma_series::poly::derive_quotient;
use sigma_series::report::{
    composite_csv, constellations_csv, criteria_csv, criteria_summary, csv_header, equidist_csv,
    lemma_csv, lemma_summary,
};
use sigma_series::series::{digits, partial_sum, truncation_index};
use sigma_series::sieve::{
    find_composite_schinzel, find_lemma_primes, find_schinzel, pattern_modulus, primes_in,
    SieveRange, ThresholdMode,
};
use sigma_series::Rational;

use crate::config::{parse_rat, rat_string, RangeConfig};
use crate::{
    AlphaFactor, Command, Context, CriteriaCommand, EquidistCommand, Failure, Kind, Mode, Output,
    PolyCommand, RangeArgs, Shift, SieveCommand,
};

pub fn dispatch(command: &Command, ctx: &Context) -> Result<Output, Failure> {
    match command {
        Command::Series(a) => series(ctx, a.k, a.precision, a.terms),
        Command::Sieve(SieveCommand::Primes(r)) => sieve_primes(ctx, r),
        Command::Sieve(SieveCommand::Lemma(a)) => sieve_lemma(ctx, &a.range, &a.exponent, a.mode),
        Command::Sieve(SieveCommand::Schinzel(a)) => sieve_schinzel(ctx, &a.range, a.k),
        Command::Sieve(SieveCommand::Composite(a)) => sieve_composite(ctx, &a.range, a.k, a.p),
        Command::Poly(PolyCommand::Derive(a)) => poly_derive(ctx, a.k, a.i),
        Command::Criteria(c) => criteria(ctx, c),
        Command::Equidist(EquidistCommand::Run(a)) => equidist_run(ctx, a),
        Command::Equidist(EquidistCommand::Sweep(a)) => equidist_sweep(ctx, a),
        Command::VerifyAll(a) => verify(ctx, a.quick, &a.tolerance_scale),
    }
}

fn cfg_err(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

fn resolve_k(ctx: &Context, flag: Option<u32>, default: u32) -> u32 {
    flag.or(ctx.file.k).unwrap_or(default)
}

fn resolve_range(ctx: &Context, args: &RangeArgs, lo: u64, hi: u64) -> Result<SieveRange, Failure> {
    let file = ctx.file.range;
    let cfg = RangeConfig {
        lo: args.lo.or(file.map(|r| r.lo)).unwrap_or(lo),
        hi: args.hi.or(file.map(|r| r.hi)).unwrap_or(hi),
        segment_size: ctx
            .segment_size
            .unwrap_or(sigma_series::sieve::DEFAULT_SEGMENT),
    };
    cfg.to_range().map_err(Failure::Config)
}

fn resolve_epsilon(ctx: &Context, flag: &Option<String>) -> Result<Rational, Failure> {
    match flag.as_ref().or(ctx.file.epsilon.as_ref()) {
        Some(s) => parse_rat(s).map_err(Failure::Config),
        None => Ok(default_epsilon()),
    }
}

fn range_json(r: &SieveRange) -> Value {
    json!({"lo": r.lo(), "hi": r.hi(), "segment_size": r.segment_size()})
}

/// Stdout gets the JSON summary; the same text is the `.json` artifact.
fn emit(name: &str, summary: String, csv: Option<String>) -> Output {
    let mut files = vec![(format!("{name}.json"), summary.clone())];
    if let Some(csv) = csv {
        files.push((format!("{name}.csv"), csv));
    }
    Output {
        stdout: summary,
        files,
        violations: Vec::new(),
    }
}

fn series(
    ctx: &Context,
    k: Option<u32>,
    precision: Option<u32>,
    terms: Option<u64>,
) -> Result<Output, Failure> {
    let k = resolve_k(ctx, k, 3);
    let precision = precision.or(ctx.file.precision).unwrap_or(30);
    let expansion = digits(k, precision)?;
    let (index, tail) = truncation_index(k, precision);
    let rows = terms.unwrap_or(index);
    if rows == 0 || rows > 10_000 {
        return Err(Failure::Config(format!(
            "terms must be in 1..=10000, got {rows}"
        )));
    }
    let config = ctx.embed(
        "series",
        json!({"k": k, "precision": precision, "terms": rows}),
    );
    let mut csv = csv_header(&config);
    csv.push_str("n,partial_num,partial_den,scaled\n");
    for n in 1..=rows {
        let p = partial_sum(k, n)?;
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            p.value.numer(),
            p.value.denom(),
            p.scaled
        ));
    }
    let summary = ctx.report(
        &config,
        &json!({
            "k": k,
            "precision": precision,
            "digits": expansion.digits,
            "error_bound": rat_string(&expansion.error_bound),
            "truncation_index": index,
            "tail_bound": rat_string(&tail),
        }),
    )?;
    Ok(emit("series", summary, Some(csv)))
}

fn sieve_primes(ctx: &Context, args: &RangeArgs) -> Result<Output, Failure> {
    let range = resolve_range(ctx, args, 2, 1_000_000)?;
    let primes = primes_in(range);
    let config = ctx.embed("sieve primes", json!({"range": range_json(&range)}));
    let mut csv = csv_header(&config);
    csv.push_str("p\n");
    for p in &primes {
        csv.push_str(&format!("{p}\n"));
    }
    let summary = ctx.report(
        &config,
        &json!({"range": range_json(&range), "count": primes.len()}),
    )?;
    Ok(emit("sieve-primes", summary, Some(csv)))
}

fn sieve_lemma(
    ctx: &Context,
    args: &RangeArgs,
    exponent: &str,
    mode: Mode,
) -> Result<Output, Failure> {
    let range = resolve_range(ctx, args, 2, 1_000_000)?;
    let exponent = parse_rat(exponent).map_err(Failure::Config)?;
    let mode = match mode {
        Mode::RangeTop => ThresholdMode::RangeTop,
        Mode::PerElement => ThresholdMode::PerElement,
    };
    let scan = find_lemma_primes(range, &exponent, mode)?;
    let config = ctx.embed(
        "sieve lemma",
        json!({"range": range_json(&range), "exponent": rat_string(&exponent), "mode": mode}),
    );
    let mut out = emit(
        "sieve-lemma",
        ctx.report(&config, &lemma_summary(&scan))?,
        Some(lemma_csv(&config, &scan)?),
    );
    for l in &scan.primes {
        let ok = is_prime_by_trial_division(l.p) && (l.p + 1) % 2 == 0 && (l.p + 2) % 3 == 0;
        if !ok || !l.threshold.exceeded_by(&int(l.lpf1)) || !l.threshold.exceeded_by(&int(l.lpf2)) {
            out.violations
                .push(format!("lemma prime {} fails re-verification", l.p));
        }
    }
    Ok(out)
}

fn pattern_density(count: usize, k: u32, hi: u64) -> f64 {
    let h = hi as f64;
    count as f64 / (h / h.ln().powi(k as i32 + 1))
}

fn cofactor_violations(q: u64, cofactors: &[u64]) -> Option<String> {
    let ok = cofactors.iter().enumerate().all(|(j, &c)| {
        let i = j as u64 + 1;
        c * (i + 1) == q + i && is_prime_by_trial_division(c)
    });
    (!ok).then(|| format!("constellation q = {q} fails re-verification"))
}

fn sieve_schinzel(ctx: &Context, args: &RangeArgs, k: Option<u32>) -> Result<Output, Failure> {
    let k = resolve_k(ctx, k, 2);
    let range = resolve_range(ctx, args, 2, 1_000_000)?;
    let found = find_schinzel(k, range)?;
    let config = ctx.embed(
        "sieve schinzel",
        json!({"k": k, "range": range_json(&range)}),
    );
    let summary = json!({
        "range": range_json(&range),
        "k": k,
        "modulus": pattern_modulus(k)?,
        "count": found.len(),
        "density_ratio": pattern_density(found.len(), k, range.hi()),
    });
    let mut out = emit(
        "sieve-schinzel",
        ctx.report(&config, &summary)?,
        Some(constellations_csv(&config, &found)?),
    );
    out.violations = found
        .iter()
        .filter_map(|c| {
            if !is_prime_by_trial_division(c.q) {
                return Some(format!("q = {} is not prime", c.q));
            }
            cofactor_violations(c.q, &c.cofactors)
        })
        .collect();
    Ok(out)
}

fn sieve_composite(
    ctx: &Context,
    args: &RangeArgs,
    k: Option<u32>,
    p: u64,
) -> Result<Output, Failure> {
    let k = resolve_k(ctx, k, 1);
    let range = resolve_range(ctx, args, 2, 1_000_000)?;
    let found = find_composite_schinzel(k, p, range)?;
    let config = ctx.embed(
        "sieve composite",
        json!({"k": k, "p": p, "range": range_json(&range)}),
    );
    let summary = json!({
        "range": range_json(&range),
        "k": k,
        "p": p,
        "modulus": pattern_modulus(k)?,
        "count": found.len(),
        "density_ratio": pattern_density(found.len(), k, range.hi()),
    });
    let mut out = emit(
        "sieve-composite",
        ctx.report(&config, &summary)?,
        Some(composite_csv(&config, &found)?),
    );
    out.violations = found
        .iter()
        .filter_map(|c| {
            if c.p * c.r != c.q || !is_prime_by_trial_division(c.r) {
                return Some(format!("q = {} is not p*r with r prime", c.q));
            }
            cofactor_violations(c.q, &c.cofactors)
        })
        .collect();
    Ok(out)
}

fn poly_derive(ctx: &Context, k: Option<u32>, i: Option<u32>) -> Result<Output, Failure> {
    let k = resolve_k(ctx, k, 3);
    let indices: Vec<u32> = match i {
        Some(i) => vec![i],
        None => (1..=k.max(1)).collect(),
    };
    let mut records = Vec::new();
    let mut violations = Vec::new();
    for i in indices {
        let dec = derive_quotient(k, i)?;
        if dec.residual().degree().is_some() {
            violations.push(format!("decomposition ({k}, {i}) does not reconstruct"));
        }
        records.push(dec.record());
    }
    let config = ctx.embed("poly derive", json!({"k": k, "i": i}));
    let mut out = emit(
        "poly",
        ctx.report(&config, &json!({"decompositions": records}))?,
        None,
    );
    out.violations = violations;
    Ok(out)
}

fn criteria_output(
    ctx: &Context,
    name: &str,
    config: Value,
    results: &[CriterionResult],
    extra: Value,
) -> Result<Output, Failure> {
    let mut summary = json!({"count": results.len(), "criteria": criteria_summary(results)});
    if let (Value::Object(s), Value::Object(e)) = (&mut summary, extra) {
        s.extend(e);
    }
    Ok(emit(
        name,
        ctx.report(&config, &summary)?,
        Some(criteria_csv(&config, results)?),
    ))
}

fn criteria(ctx: &Context, command: &CriteriaCommand) -> Result<Output, Failure> {
    match command {
        CriteriaCommand::Eq1(a) => {
            let k = resolve_k(ctx, a.k, 2);
            let range = resolve_range(ctx, &a.range, 2, 100_000)?;
            let eps = resolve_epsilon(ctx, &a.epsilon)?;
            let results = find_schinzel(k, range)?
                .iter()
                .map(|c| eq1_eval(k, c.q, &eps))
                .collect::<Result<Vec<_>, _>>()?;
            let config = ctx.embed(
                "criteria eq1",
                json!({"k": k, "range": range_json(&range), "epsilon": rat_string(&eps)}),
            );
            criteria_output(ctx, "criteria-eq1", config, &results, json!({}))
        }
        CriteriaCommand::Eq2(a) => {
            let k = resolve_k(ctx, a.pattern.k, 1);
            let range = resolve_range(ctx, &a.pattern.range, 2, 100_000)?;
            let eps = resolve_epsilon(ctx, &a.pattern.epsilon)?;
            let results = find_composite_schinzel(k, a.p, range)?
                .iter()
                .map(|c| eq2_eval(k, a.p, c.q, &eps))
                .collect::<Result<Vec<_>, _>>()?;
            let config = ctx.embed(
                "criteria eq2",
                json!({"k": k, "p": a.p, "range": range_json(&range), "epsilon": rat_string(&eps)}),
            );
            criteria_output(ctx, "criteria-eq2", config, &results, json!({}))
        }
        CriteriaCommand::Endgame(a) => {
            let k = resolve_k(ctx, a.k, 2);
            let eps = resolve_epsilon(ctx, &a.epsilon)?;
            let evals =
                a.q1.iter()
                    .map(|&q1| endgame_eval(k, a.p, q1, &eps))
                    .collect::<Result<Vec<_>, _>>()?;
            let violations: Vec<String> = evals
                .iter()
                .filter(|e| !e.lower_bound_holds)
                .map(|e| format!("endgame q1 = {}: distance below p^-k", e.result.q_or_n))
                .collect();
            let results: Vec<CriterionResult> = evals.iter().map(|e| e.result.clone()).collect();
            let config = ctx.embed(
                "criteria endgame",
                json!({"k": k, "p": a.p, "q1": a.q1, "epsilon": rat_string(&eps)}),
            );
            let lower = evals.first().map(|e| rat_string(&e.lower_bound));
            let mut out = criteria_output(
                ctx,
                "criteria-endgame",
                config,
                &results,
                json!({"lower_bound": lower}),
            )?;
            out.violations = violations;
            Ok(out)
        }
        CriteriaCommand::Sigma3(a) => {
            let range = resolve_range(ctx, &a.range, 7, 100_000)?;
            let eps = resolve_epsilon(ctx, &a.epsilon)?;
            let results = primes_in(range)
                .into_iter()
                .filter(|q| q % 6 == 1)
                .map(|q| sigma3_window(q, &eps))
                .collect::<Result<Vec<_>, _>>()?;
            let config = ctx.embed(
                "criteria sigma3",
                json!({"range": range_json(&range), "epsilon": rat_string(&eps)}),
            );
            criteria_output(ctx, "criteria-sigma3", config, &results, json!({}))
        }
        CriteriaCommand::ConditionI(a) => {
            let range = resolve_range(ctx, &a.range, 2, 10_000)?;
            let c = match &a.c {
                Some(s) => parse_rat(s).map_err(Failure::Config)?,
                None => calibrated_constant(),
            };
            let results = (range.lo()..=range.hi())
                .map(|n| {
                    let shift = match a.shift {
                        Shift::None => None,
                        Shift::Plus => Some(QuarterShift::Plus),
                        Shift::Minus => Some(QuarterShift::Minus),
                        Shift::Auto => QuarterShift::of_odd(n),
                    };
                    condition_i_eval(n, &c, shift)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let shift = format!("{:?}", a.shift).to_lowercase();
            let config = ctx.embed(
                "criteria condition-i",
                json!({"range": range_json(&range), "c": rat_string(&c), "shift": shift}),
            );
            criteria_output(ctx, "criteria-condition-i", config, &results, json!({}))
        }
        CriteriaCommand::Subset(a) => {
            let exp = subset_expand(a.n)?;
            let expected = scaled_sigma3(a.n)?;
            let config = ctx.embed("criteria subset", json!({"n": a.n}));
            let total = exp.total();
            let summary = json!({
                "n": a.n,
                "primes": exp.primes,
                "terms": exp.terms.iter().map(rat_string).collect::<Vec<_>>(),
                "total": rat_string(&total),
                "scaled_sigma3": rat_string(&expected),
            });
            let mut out = emit("criteria-subset", ctx.report(&config, &summary)?, None);
            if total != expected {
                out.violations.push(format!(
                    "subset sum for n = {} differs from 9 sigma3(n)/(4n^2)",
                    a.n
                ));
            }
            Ok(out)
        }
        CriteriaCommand::SmallK(a) => {
            let range = resolve_range(ctx, &a.range, 1_000, 100_000)?;
            let c = match &a.c {
                Some(s) => parse_rat(s).map_err(Failure::Config)?,
                None => calibrated_constant(),
            };
            let kind = match a.kind {
                Kind::K1 => SmallK::K1,
                Kind::K2 => SmallK::K2,
            };
            let report = small_k_elimination(kind, range, &c)?;
            let config = ctx.embed(
                "criteria small-k",
                json!({"kind": kind, "range": range_json(&range), "c": rat_string(&c)}),
            );
            let extra = json!({
                "kind": kind,
                "range": range_json(&range),
                "constant": rat_string(&c),
                "scanned": report.scanned,
                "density": report.density(),
            });
            criteria_output(ctx, "criteria-small-k", config, &report.witnesses, extra)
        }
    }
}

fn equidist_run(ctx: &Context, a: &crate::EquidistRunArgs) -> Result<Output, Failure> {
    let alpha = parse_rat(&a.alpha).map_err(Failure::Config)?;
    let spec = SequenceSpec::new(alpha.clone(), a.y, a.length.unwrap_or(a.y + 1))?;
    let et = EtParams::new(a.h)?;
    let vdc = VdcParams::new(a.ell)?;
    let factor = match a.alpha_factor {
        AlphaFactor::Include => VdcAlphaFactor::Include,
        AlphaFactor::Omit => VdcAlphaFactor::Omit,
    };
    let report = discrepancy_report(&spec, et, vdc, factor)?;
    let config = ctx.embed(
        "equidist run",
        json!({
            "alpha": rat_string(&alpha),
            "y": spec.y(),
            "length": spec.length(),
            "H": et.h_max(),
            "ell": vdc.ell(),
            "alpha_factor": factor,
        }),
    );
    let mut out = emit(
        "equidist",
        ctx.report(&config, &report)?,
        Some(equidist_csv(&config, &report)?),
    );
    out.violations = report.violations.clone();
    Ok(out)
}

fn equidist_sweep(ctx: &Context, a: &crate::SweepArgs) -> Result<Output, Failure> {
    let cfg = SweepConfig {
        x: a.x,
        factors: a.factors,
        samples: a.samples,
        seed: ctx.seed,
        h_cap: a.h_cap,
        ell: a.ell,
    };
    let samples = sweep(&cfg)?;
    let config = ctx.embed(
        "equidist sweep",
        serde_json::to_value(cfg).map_err(cfg_err)?,
    );
    let mut csv = csv_header(&config);
    csv.push_str("sample,primes,alpha_num,alpha_den,y,length,true_discrepancy,et_bound,regime,alpha_in_range,meets_target\n");
    let mut violations = Vec::new();
    for (j, s) in samples.iter().enumerate() {
        let r = &s.report;
        let primes: Vec<String> = s.primes.iter().map(u64::to_string).collect();
        let regime = serde_json::to_value(s.regime).map_err(cfg_err)?;
        let regime = match (&regime["kind"], &regime["ell"]) {
            (Value::String(kind), Value::Null) => kind.clone(),
            (Value::String(kind), ell) => format!("{kind}-{ell}"),
            _ => regime.to_string(),
        };
        csv.push_str(&format!(
            "{j},{},{},{},{},{},{:.12e},{:.12e},{regime},{},{}\n",
            primes.join(";"),
            r.alpha.numer(),
            r.alpha.denom(),
            r.y,
            r.length,
            r.true_discrepancy,
            r.et_bound,
            s.alpha_in_range,
            s.meets_target
        ));
        violations.extend(r.violations.iter().map(|v| format!("sample {j}: {v}")));
    }
    let met = samples.iter().filter(|s| s.meets_target).count();
    let summary = json!({
        "samples": samples,
        "meets_target": met,
        "meets_target_fraction": met as f64 / samples.len().max(1) as f64,
    });
    let mut out = emit("equidist-sweep", ctx.report(&config, &summary)?, Some(csv));
    out.violations = violations;
    Ok(out)
}

fn verify(ctx: &Context, quick: bool, scale: &str) -> Result<Output, Failure> {
    let tolerance_scale = parse_rat(scale).map_err(Failure::Config)?;
    if tolerance_scale <= int(0) {
        return Err(Failure::Config("tolerance scale must be positive".into()));
    }
    let suite = SuiteConfig {
        quick,
        seed: ctx.seed,
        tolerance_scale: tolerance_scale.clone(),
    };
    let report = verify_all(&suite, true);
    let config = ctx.embed(
        "verify-all",
        json!({"quick": quick, "tolerance_scale": rat_string(&tolerance_scale)}),
    );
    let mut stdout = String::new();
    for o in &report.outcomes {
        stdout.push_str(&o.line());
        stdout.push('\n');
    }
    stdout.push_str(&format!(
        "{} passed, {} failed\n",
        report.passed, report.failed
    ));
    let violations = report
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("criterion {} ({}) failed", o.id, o.name))
        .collect();
    Ok(Output {
        stdout,
        files: vec![("verify-all.json".into(), ctx.report(&config, &report)?)],
        violations,
    })
}
