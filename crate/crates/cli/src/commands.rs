//! One function per subcommand. Each parses and validates its settings
//! before building sieves or tables.

use lsign::errfun::{verify_lemma25, ErrorFunction};
use lsign::export::sig17;
use lsign::meanvalue::{
    compare_moments, compare_moments_with, log_mean_constant, mean_constant, MomentKind,
};
use lsign::multfun::expand_coefficients_par;
use lsign::primes::FactorSieve;
use lsign::signs::{
    hypothesis_h_partial, pnt_prime_check, pnt_von_mangoldt_check, sign_report, sign_report_exact,
    HypothesisForm, SignReport,
};
use lsign::satake::DeltaExpansion;
use serde::Serialize;

use crate::config::{config_err, parse_count, parse_grid, parse_real, CliResult, Format, RunConfig};
use crate::forms::{Form, Target};
use crate::output::{csv_row, write_csv, write_json};

fn integer_grid(cfg: &RunConfig, key: &str) -> CliResult<Vec<f64>> {
    let xs = parse_grid(cfg.require(key)?)?;
    if xs[0] < 1.0 {
        return config_err(format!("{key} values must be at least 1"));
    }
    Ok(xs)
}

fn top(xs: &[f64]) -> u64 {
    xs[xs.len() - 1].floor() as u64
}

pub fn coeffs(cfg: &RunConfig) -> CliResult<()> {
    let form = Form::parse(cfg.require("form")?)?;
    let limit = parse_count(cfg.require("limit")?)?;
    if limit == 0 {
        return config_err("limit must be at least 1");
    }
    if cfg.format()? != Format::Csv {
        return config_err("coeffs writes csv only");
    }
    form.check_limit(limit)?;
    let sieve = form.sieve(limit)?;
    let table = form.table(limit, sieve.as_ref())?;
    write_csv(cfg, |w| table.write_csv(w, "lambda"))
}

pub fn moments(cfg: &RunConfig) -> CliResult<()> {
    let target = Target::parse(cfg.require("f")?)?;
    let kappa = match cfg.get("kappa") {
        Some(k) => parse_real(k)?,
        None => target.default_kappa(),
    };
    if !(kappa > 0.0) {
        return config_err("kappa must be positive");
    }
    let kind = match cfg.get("kind").unwrap_or("S") {
        "S" => MomentKind::Sum,
        "s" => MomentKind::LogSum,
        other => return config_err(format!("kind must be S or s, got `{other}`")),
    };
    let xs = integer_grid(cfg, "x")?;
    if xs[0] <= 1.0 {
        return config_err("x values must exceed 1");
    }
    let r = ErrorFunction::parse(cfg.get("R").unwrap_or("power:0.5"))?;
    let prime_limit = match cfg.get("prime-limit") {
        Some(p) => parse_count(p)?,
        None => top(&xs),
    };
    let format = cfg.format()?;
    let limit = prime_limit.max(top(&xs));
    target.check_limit(limit)?;

    let sieve = FactorSieve::new(limit)?;
    let rule = target.rule(limit)?;
    let report = if prime_limit == limit {
        compare_moments(kind, &rule, kappa, &r, &xs, &sieve)?
    } else {
        let table = expand_coefficients_par(&rule, top(&xs), &sieve)?;
        let constant = match kind {
            MomentKind::Sum => mean_constant(&rule, kappa, prime_limit, &sieve)?,
            MomentKind::LogSum => log_mean_constant(&rule, kappa, prime_limit, &sieve)?,
        };
        compare_moments_with(kind, &table, &constant, &r, &xs)?
    };
    match format {
        Format::Json => write_json(cfg, &report),
        Format::Csv => write_csv(cfg, |w| report.write_csv(w)),
    }
}

#[derive(Serialize)]
struct SignsOutput {
    form: String,
    m: u32,
    reports: Vec<SignReport>,
}

pub fn signs(cfg: &RunConfig) -> CliResult<()> {
    let form = Form::parse(cfg.require("form")?)?;
    let xs = integer_grid(cfg, "x")?;
    let m = match cfg.get("m") {
        Some(m) => match parse_count(m)? {
            0 => return config_err("m must be at least 1"),
            m => m as u32,
        },
        None => form.degree(),
    };
    let limit = match cfg.get("limit") {
        Some(l) => parse_count(l)?,
        None => top(&xs),
    };
    if limit < top(&xs) {
        return config_err(format!("limit {limit} is below the largest x"));
    }
    let format = cfg.format()?;
    form.check_limit(limit)?;

    let reports: Vec<SignReport> = if form == Form::Delta && m == 2 {
        let delta = DeltaExpansion::new(limit)?;
        xs.iter().map(|&x| sign_report_exact(&delta, x)).collect::<lsign::Result<_>>()?
    } else {
        let sieve = form.sieve(limit)?;
        let table = form.table(limit, sieve.as_ref())?;
        xs.iter().map(|&x| sign_report(&table, m, x)).collect::<lsign::Result<_>>()?
    };
    match format {
        Format::Json => write_json(cfg, &SignsOutput { form: form.to_string(), m, reports }),
        Format::Csv => write_csv(cfg, |w| {
            csv_row(w, &[
                "x,n_plus,n_minus,n_zero,sign_changes,theorem1_bound,theorem1_pass".into(),
                "plus_density,minus_density,zero_density,min_over_bound".into(),
            ])?;
            for r in &reports {
                csv_row(w, &[
                    sig17(r.x),
                    r.n_plus.to_string(),
                    r.n_minus.to_string(),
                    r.n_zero.to_string(),
                    r.sign_changes.to_string(),
                    r.theorem1_bound.map(sig17).unwrap_or_default(),
                    r.theorem1_pass.map(|b| b.to_string()).unwrap_or_default(),
                    sig17(r.ratios.plus_density),
                    sig17(r.ratios.minus_density),
                    sig17(r.ratios.zero_density),
                    r.ratios.min_over_bound.map(sig17).unwrap_or_default(),
                ])?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct PntRow {
    x: f64,
    prime_sum: f64,
    prime_ratio: f64,
    von_mangoldt_sq: f64,
    von_mangoldt_sq_ratio: f64,
    von_mangoldt_signed: f64,
    von_mangoldt_signed_ratio: f64,
}

#[derive(Serialize)]
struct PntOutput {
    form: String,
    rows: Vec<PntRow>,
}

pub fn pnt(cfg: &RunConfig) -> CliResult<()> {
    let form = Form::parse(cfg.require("form")?)?;
    form.check_source()?;
    let xs = integer_grid(cfg, "x")?;
    let format = cfg.format()?;
    let limit = top(&xs).max(2);
    form.check_limit(limit)?;

    let sieve = FactorSieve::new(limit)?;
    let source = form.source(limit)?;
    let rows = xs
        .iter()
        .map(|&x| {
            let (prime_sum, prime_ratio) = pnt_prime_check(&source, x, &sieve)?;
            let (sq, signed) = pnt_von_mangoldt_check(&source, x, &sieve)?;
            Ok(PntRow {
                x,
                prime_sum,
                prime_ratio,
                von_mangoldt_sq: sq,
                von_mangoldt_sq_ratio: sq / x,
                von_mangoldt_signed: signed,
                von_mangoldt_signed_ratio: signed / x,
            })
        })
        .collect::<lsign::Result<Vec<_>>>()?;
    match format {
        Format::Json => write_json(cfg, &PntOutput { form: form.to_string(), rows }),
        Format::Csv => write_csv(cfg, |w| {
            writeln!(w, "x,prime_sum,prime_ratio,von_mangoldt_sq,von_mangoldt_sq_ratio,von_mangoldt_signed,von_mangoldt_signed_ratio")?;
            for r in &rows {
                csv_row(w, &[
                    sig17(r.x),
                    sig17(r.prime_sum),
                    sig17(r.prime_ratio),
                    sig17(r.von_mangoldt_sq),
                    sig17(r.von_mangoldt_sq_ratio),
                    sig17(r.von_mangoldt_signed),
                    sig17(r.von_mangoldt_signed_ratio),
                ])?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct HypRow {
    x: f64,
    partial_sum: f64,
    /// Change since the previous grid point; absent for the first.
    increment: Option<f64>,
}

#[derive(Serialize)]
struct HypOutput {
    form: String,
    nu: u32,
    weak: bool,
    rows: Vec<HypRow>,
}

pub fn hyp_h(cfg: &RunConfig) -> CliResult<()> {
    let form = Form::parse(cfg.require("form")?)?;
    form.check_source()?;
    let nu = parse_count(cfg.require("nu")?)?;
    if !(2..=64).contains(&nu) {
        return config_err("nu must lie in 2..=64");
    }
    let weak = cfg.flag("weak")?;
    let xs = integer_grid(cfg, "x")?;
    let format = cfg.format()?;
    let limit = top(&xs).max(2);
    form.check_limit(limit)?;

    let sieve = FactorSieve::new(limit)?;
    let source = form.source(limit)?;
    let h = if weak { HypothesisForm::Weak } else { HypothesisForm::Strong };
    let sums = xs
        .iter()
        .map(|&x| hypothesis_h_partial(&source, nu as u32, x, h, &sieve))
        .collect::<lsign::Result<Vec<_>>>()?;
    let rows: Vec<HypRow> = xs
        .iter()
        .zip(&sums)
        .enumerate()
        .map(|(i, (&x, &s))| HypRow {
            x,
            partial_sum: s,
            increment: (i > 0).then(|| s - sums[i - 1]),
        })
        .collect();
    match format {
        Format::Json => write_json(cfg, &HypOutput { form: form.to_string(), nu: nu as u32, weak, rows }),
        Format::Csv => write_csv(cfg, |w| {
            writeln!(w, "x,partial_sum,increment")?;
            for r in &rows {
                let inc = r.increment.map(sig17).unwrap_or_default();
                csv_row(w, &[sig17(r.x), sig17(r.partial_sum), inc])?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct Lemma25Output {
    #[serde(flatten)]
    report: lsign::errfun::Lemma25Report,
    drift: [f64; 4],
}

pub fn lemma25(cfg: &RunConfig) -> CliResult<()> {
    let r = ErrorFunction::parse(cfg.require("R")?)?;
    let zs = parse_grid(cfg.require("z")?)?;
    let format = cfg.format()?;
    let report = verify_lemma25(&r, &zs)?;
    let drift = report.drift();
    match format {
        Format::Json => write_json(cfg, &Lemma25Output { report, drift }),
        Format::Csv => write_csv(cfg, |w| {
            writeln!(w, "z,lhs1,lhs2,lhs3,lhs4,rhs1,rhs2,rhs3,rhs4,c1,c2,c3,c4")?;
            for row in &report.rows {
                let cells: Vec<String> = std::iter::once(row.z)
                    .chain(row.lhs)
                    .chain(row.rhs)
                    .chain(row.constant)
                    .map(sig17)
                    .collect();
                csv_row(w, &cells)?;
            }
            Ok(())
        }),
    }
}
