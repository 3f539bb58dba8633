//! Textual specs for coefficient sources and mean-value targets.

use std::fmt;

use lsign::multfun::{expand_coefficients_par, CoefficientTable, PrimePowerRule, DEFAULT_TABLE_CAP};
use lsign::piltz::piltz_rule;
use lsign::primes::FactorSieve;
use lsign::satake::{ramanujan_delta_source, CoefficientSource, DeltaExpansion, DELTA_CAP};
use lsign::Error;

use crate::config::{config_err, parse_count, parse_real, CliResult};

/// `delta`, `sym:k` (the k-th symmetric power of Δ), `ones`, `squarefree`,
/// `mobius` or `piltz:κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    Delta,
    Sym(u32),
    Ones,
    Squarefree,
    Mobius,
    Piltz(f64),
}

impl Form {
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        Ok(match s.split_once(':') {
            None => match s {
                "delta" => Form::Delta,
                "ones" => Form::Ones,
                "squarefree" => Form::Squarefree,
                "mobius" => Form::Mobius,
                _ => return config_err(format!("unknown form `{s}`")),
            },
            Some(("sym", k)) => match parse_count(k)? {
                0 => return config_err("sym:k needs k ≥ 1"),
                k if k > 64 => return config_err("sym:k supports k ≤ 64"),
                k => Form::Sym(k as u32),
            },
            Some(("piltz", k)) => {
                let k = parse_real(k)?;
                if !(k > 0.0) {
                    return config_err("piltz:κ needs κ > 0");
                }
                Form::Piltz(k)
            }
            _ => return config_err(format!("unknown form `{s}`")),
        })
    }

    /// Degree `m` used in the sign lower bound.
    pub fn degree(&self) -> u32 {
        match self {
            Form::Delta => 2,
            Form::Sym(k) => k + 1,
            _ => 1,
        }
    }

    fn needs_delta(&self) -> bool {
        matches!(self, Form::Delta | Form::Sym(_))
    }

    /// Fails with a capacity error when `limit` is out of reach.
    pub fn check_limit(&self, limit: u64) -> CliResult<()> {
        let (what, cap) = if self.needs_delta() {
            ("delta expansion limit", DELTA_CAP)
        } else {
            ("table limit", DEFAULT_TABLE_CAP)
        };
        if limit > cap {
            return Err(Error::Capacity { what, requested: limit, cap }.into());
        }
        Ok(())
    }

    fn needs_sieve(&self) -> bool {
        !matches!(self, Form::Delta | Form::Ones)
    }

    pub fn sieve(&self, limit: u64) -> CliResult<Option<FactorSieve>> {
        Ok(if self.needs_sieve() { Some(FactorSieve::new(limit)?) } else { None })
    }

    pub fn table(&self, limit: u64, sieve: Option<&FactorSieve>) -> CliResult<CoefficientTable> {
        let rule = match *self {
            Form::Delta => return Ok(DeltaExpansion::new(limit)?.table()),
            Form::Ones => return Ok(CoefficientTable::from_fn("ones", limit, |_| 1.0)?),
            Form::Sym(k) => ramanujan_delta_source(limit)?.0.sym_power(k)?.lambda_rule(),
            Form::Squarefree => PrimePowerRule::squarefree(),
            Form::Mobius => PrimePowerRule::mobius(),
            Form::Piltz(k) => piltz_rule(k)?,
        };
        let sieve = sieve.expect("sieve built for rule-backed forms");
        Ok(expand_coefficients_par(&rule, limit, sieve)?)
    }

    /// Local parameters for the forms that have them, covering `p ≤ limit`.
    pub fn source(&self, limit: u64) -> CliResult<CoefficientSource> {
        match *self {
            Form::Delta => Ok(ramanujan_delta_source(limit)?.0),
            Form::Sym(k) => Ok(ramanujan_delta_source(limit)?.0.sym_power(k)?),
            Form::Ones => Ok(CoefficientSource::unit(1)?),
            _ => config_err(format!("form `{self}` has no Satake parameters (use delta, sym:k or ones)")),
        }
    }

    pub fn check_source(&self) -> CliResult<()> {
        match self {
            Form::Delta | Form::Sym(_) | Form::Ones => Ok(()),
            _ => config_err(format!("form `{self}` has no Satake parameters (use delta, sym:k or ones)")),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Delta => write!(f, "delta"),
            Form::Sym(k) => write!(f, "sym:{k}"),
            Form::Ones => write!(f, "ones"),
            Form::Squarefree => write!(f, "squarefree"),
            Form::Mobius => write!(f, "mobius"),
            Form::Piltz(k) => write!(f, "piltz:{k}"),
        }
    }
}

/// Non-negative multiplicative targets of the mean-value harness:
/// `ones`, `squarefree`, `piltz:κ`, `delta-sq` (λ_Δ²) and
/// `delta-sq-over-divisor` (λ_Δ²/d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Ones,
    Squarefree,
    Piltz(f64),
    DeltaSq,
    DeltaSqOverDivisor,
}

impl Target {
    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "ones" => Target::Ones,
            "squarefree" => Target::Squarefree,
            "divisor" => Target::Piltz(2.0),
            "delta-sq" => Target::DeltaSq,
            "delta-sq-over-divisor" => Target::DeltaSqOverDivisor,
            other => match Form::parse(other) {
                Ok(Form::Piltz(k)) => Target::Piltz(k),
                _ => return config_err(format!("unknown mean-value target `{other}`")),
            },
        })
    }

    /// The mean exponent κ the target is known to have.
    pub fn default_kappa(&self) -> f64 {
        match *self {
            Target::Piltz(k) => k,
            Target::DeltaSqOverDivisor => 0.5,
            _ => 1.0,
        }
    }

    pub fn check_limit(&self, limit: u64) -> CliResult<()> {
        match self {
            Target::DeltaSq | Target::DeltaSqOverDivisor => Form::Delta.check_limit(limit),
            _ => Form::Ones.check_limit(limit),
        }
    }

    pub fn rule(&self, limit: u64) -> CliResult<PrimePowerRule> {
        Ok(match *self {
            Target::Ones => PrimePowerRule::constant_one(),
            Target::Squarefree => PrimePowerRule::squarefree(),
            Target::Piltz(k) => piltz_rule(k)?,
            Target::DeltaSq => ramanujan_delta_source(limit)?.0.lambda_rule().squared().with_label("delta-sq"),
            Target::DeltaSqOverDivisor => ramanujan_delta_source(limit)?
                .0
                .lambda_rule()
                .squared()
                .divided_by(&PrimePowerRule::divisor())
                .with_label("delta-sq-over-divisor"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_specs() {
        assert_eq!(Form::parse("delta").unwrap(), Form::Delta);
        assert_eq!(Form::parse("sym:2").unwrap(), Form::Sym(2));
        assert_eq!(Form::parse("piltz:0.5").unwrap(), Form::Piltz(0.5));
        assert!(Form::parse("sym:0").is_err());
        assert!(Form::parse("eta").is_err());
        assert_eq!(Form::Sym(2).degree(), 3);
    }

    #[test]
    fn capacity_is_checked_without_work() {
        let e = Form::Delta.check_limit(1_000_000_000_000).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(Form::Ones.check_limit(1000).is_ok());
    }

    #[test]
    fn targets() {
        assert_eq!(Target::parse("piltz:2").unwrap(), Target::Piltz(2.0));
        assert_eq!(Target::parse("divisor").unwrap().default_kappa(), 2.0);
        assert!(Target::parse("mobius").is_err());
    }
}
