//! Mean values of non-negative multiplicative functions.
//!
//! For `f ≥ 0` with `Σ_{p≤z} f(p) log p ≈ κz`,
//!
//! - `S_f(x) = Σ_{n≤x} f(n) ~ C_f x (log x)^{κ−1}` and
//! - `s_f(x) = Σ_{n≤x} f(n)/n ~ c_f (log x)^κ`,
//!
//! with `C_f = Γ(κ)^{−1} ∏_p (1 + Σ_ν f(p^ν)/p^ν)(1 − 1/p)^κ` and
//! `c_f = C_f/κ`. This module evaluates the constants, compares empirical
//! sums with the main terms, and checks the Hall–Tenenbaum upper bound.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::errfun::ErrorFunction;
use crate::export::sig17;
use crate::multfun::{expand_coefficients_par, log_mean, partial_sum, CoefficientTable, PrimePowerRule};
use crate::primes::FactorSieve;
use crate::summation::Neumaier;
use crate::{Error, Result};

const LOCAL_REL_TOL: f64 = 1e-15;
const LOCAL_MAX_NU: u32 = 1000;

/// Which mean a constant or prediction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentKind {
    /// `S_f(x) = Σ f(n)`.
    #[serde(rename = "S")]
    Sum,
    /// `s_f(x) = Σ f(n)/n`.
    #[serde(rename = "s")]
    LogSum,
}

/// A truncated Euler product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerConstantResult {
    pub value: f64,
    pub prime_limit: u64,
    /// Estimated size of `|log ∏_{p>P}|`, reported separately and never
    /// folded into `value`.
    pub tail_magnitude: f64,
    pub kappa: f64,
    pub kind: MomentKind,
}

/// `Σ_{ν≥1} f(p^ν)/p^ν`, stopping once two consecutive terms fall below
/// `10⁻¹⁵` of the running sum.
fn local_series(rule: &PrimePowerRule, p: u64) -> Result<f64> {
    let lp = (p as f64).ln();
    let mut sum = Neumaier::new();
    let mut small = 0;
    for nu in 1..=LOCAL_MAX_NU {
        let term = rule.eval(p, nu)? * (-(nu as f64) * lp).exp();
        sum.add(term);
        if term.abs() <= LOCAL_REL_TOL * sum.total().abs() {
            small += 1;
            if small == 2 {
                return Ok(sum.total());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Divergent(format!(
        "local series of `{}` at p = {p} does not converge",
        rule.label()
    )))
}

/// `Σ_{p≤P} log[(1 + Σ_ν f(p^ν)/p^ν)(1 − 1/p)^κ]` and the tail estimate.
fn log_euler_product(rule: &PrimePowerRule, kappa: f64, prime_limit: u64, sieve: &FactorSieve) -> Result<(f64, f64)> {
    if !rule.is_non_negative() {
        return Err(Error::domain(format!("rule `{}` is not declared non-negative", rule.label())));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("κ must be positive, got {kappa}")));
    }
    if prime_limit < 2 || prime_limit > sieve.limit() {
        return Err(Error::range("prime limit", prime_limit as f64, sieve.limit()));
    }
    let primes: Vec<u64> = sieve.primes_up_to(prime_limit).collect();
    let logs: Vec<f64> = primes
        .par_iter()
        .map(|&p| {
            let s = local_series(rule, p)?;
            Ok(s.ln_1p() + kappa * (-1.0 / p as f64).ln_1p())
        })
        .collect::<Result<_>>()?;
    let total: Neumaier = logs.iter().copied().collect();
    let pf = prime_limit as f64;
    let decade = |lo: f64, hi: f64| -> f64 {
        primes
            .iter()
            .zip(&logs)
            .filter(|(&p, _)| (p as f64) > lo && (p as f64) <= hi)
            .map(|(_, &l)| l)
            .collect::<Neumaier>()
            .total()
    };
    let d1 = decade(pf / 10.0, pf);
    let d2 = decade(pf / 100.0, pf / 10.0);
    let rho = if d2 == 0.0 { 0.5 } else { (d1 / d2).abs().clamp(0.5, 0.95) };
    let tail = d1.abs() * rho / (1.0 - rho);
    Ok((total.total(), tail))
}

/// `C_f` truncated at primes `p ≤ P`.
pub fn mean_constant(rule: &PrimePowerRule, kappa: f64, prime_limit: u64, sieve: &FactorSieve) -> Result<EulerConstantResult> {
    let (log_prod, tail) = log_euler_product(rule, kappa, prime_limit, sieve)?;
    Ok(EulerConstantResult {
        value: log_prod.exp() / gamma(kappa),
        prime_limit,
        tail_magnitude: tail,
        kappa,
        kind: MomentKind::Sum,
    })
}

/// `c_f = C_f/κ` truncated at primes `p ≤ P`.
pub fn log_mean_constant(rule: &PrimePowerRule, kappa: f64, prime_limit: u64, sieve: &FactorSieve) -> Result<EulerConstantResult> {
    let (log_prod, tail) = log_euler_product(rule, kappa, prime_limit, sieve)?;
    let upper = log_prod.exp() / gamma(kappa);
    let value = log_prod.exp() / gamma(kappa + 1.0);
    if (value * kappa - upper).abs() > 1e-12 * upper {
        return Err(Error::Divergent(format!(
            "c_f·κ = {} disagrees with C_f = {upper}",
            value * kappa
        )));
    }
    Ok(EulerConstantResult {
        value,
        prime_limit,
        tail_magnitude: tail,
        kappa,
        kind: MomentKind::LogSum,
    })
}

/// `C_f x (log x)^{κ−1}` or `c_f (log x)^κ`.
pub fn predict_main_term(kind: MomentKind, constant: &EulerConstantResult, x: f64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::domain(format!("x must exceed 1, got {x}")));
    }
    if constant.kind != kind {
        return Err(Error::domain(format!(
            "constant was computed for {:?}, not {kind:?}",
            constant.kind
        )));
    }
    let (c, k, l) = (constant.value, constant.kappa, x.ln());
    Ok(match kind {
        MomentKind::Sum => c * x * l.powf(k - 1.0),
        MomentKind::LogSum => c * l.powf(k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPoint {
    pub x: f64,
    pub empirical: f64,
    pub predicted: f64,
    pub ratio: f64,
    /// `(log log x)²/log x + ℰ(x)` for `S`, with `𝔈(x)` for `s`.
    pub error_envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub label: String,
    pub kappa: f64,
    pub kind: MomentKind,
    pub constant: EulerConstantResult,
    pub points: Vec<MomentPoint>,
}

impl MomentReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,empirical,predicted,ratio,error_envelope")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                sig17(p.x),
                sig17(p.empirical),
                sig17(p.predicted),
                sig17(p.ratio),
                sig17(p.error_envelope)
            )?;
        }
        Ok(())
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ratio).collect()
    }
}

fn max_x(xs: &[f64]) -> Result<u64> {
    let m = xs.iter().copied().fold(f64::NAN, f64::max);
    if xs.is_empty() || !m.is_finite() || xs.iter().any(|&x| !(x > 1.0)) {
        return Err(Error::domain("x values must be finite and exceed 1"));
    }
    Ok(m.floor() as u64)
}

/// Compares `S_f` or `s_f` from `table` with the main term at each `x`.
pub fn compare_moments_with(
    kind: MomentKind,
    table: &CoefficientTable,
    constant: &EulerConstantResult,
    r: &ErrorFunction,
    xs: &[f64],
) -> Result<MomentReport> {
    max_x(xs)?;
    let points = xs
        .iter()
        .map(|&x| {
            let empirical = match kind {
                MomentKind::Sum => partial_sum(table, x)?,
                MomentKind::LogSum => log_mean(table, x)?,
            };
            let predicted = predict_main_term(kind, constant, x)?;
            let l = x.ln();
            let functional = match kind {
                MomentKind::Sum => r.error_functional(x)?,
                MomentKind::LogSum => r.log_error_functional(x)?,
            };
            Ok(MomentPoint {
                x,
                empirical,
                predicted,
                ratio: empirical / predicted,
                error_envelope: l.ln().powi(2) / l + functional,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MomentReport {
        label: table.label().to_string(),
        kappa: constant.kappa,
        kind,
        constant: *constant,
        points,
    })
}

/// Expands `rule` up to `max xs`, evaluates the constant with primes up to
/// the sieve limit and compares at each `x`.
pub fn compare_moments(
    kind: MomentKind,
    rule: &PrimePowerRule,
    kappa: f64,
    r: &ErrorFunction,
    xs: &[f64],
    sieve: &FactorSieve,
) -> Result<MomentReport> {
    let limit = max_x(xs)?;
    let table = expand_coefficients_par(rule, limit, sieve)?;
    let constant = match kind {
        MomentKind::Sum => mean_constant(rule, kappa, sieve.limit(), sieve)?,
        MomentKind::LogSum => log_mean_constant(rule, kappa, sieve.limit(), sieve)?,
    };
    compare_moments_with(kind, &table, &constant, r, xs)
}

/// Both sides of `S_f(x) ≤ (A + B + 1) x s_f(x)/log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HallTenenbaumReport {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    /// `A` and `B` were estimated from the sieve rather than supplied.
    pub estimated: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `1.1·sup_{2≤z≤limit} Σ_{p≤z} f(p) log p / z`. The sup is attained at a
/// prime, where the step function jumps.
pub fn estimate_b(rule: &PrimePowerRule, sieve: &FactorSieve) -> Result<f64> {
    let mut acc = Neumaier::new();
    let mut best: f64 = 0.0;
    for p in sieve.primes() {
        acc.add(rule.eval(p, 1)? * (p as f64).ln());
        best = best.max(acc.total() / p as f64);
    }
    Ok(1.1 * best)
}

/// `1.1·Σ_{p^ν ≤ limit, ν≥2} f(p^ν) log p^ν / p^ν`.
pub fn estimate_a(rule: &PrimePowerRule, sieve: &FactorSieve) -> Result<f64> {
    let limit = sieve.limit();
    let mut acc = Neumaier::new();
    for p in sieve.primes() {
        let Some(mut pk) = p.checked_mul(p) else { break };
        if pk > limit {
            break;
        }
        let lp = (p as f64).ln();
        let mut nu = 2;
        while pk <= limit {
            acc.add(rule.eval(p, nu)? * nu as f64 * lp / pk as f64);
            nu += 1;
            match pk.checked_mul(p) {
                Some(n) => pk = n,
                None => break,
            }
        }
    }
    Ok(1.1 * acc.total())
}

/// Checks the Hall–Tenenbaum bound at `x`. Without `hyp`, `A` and `B` are
/// estimated from the sieve.
pub fn hall_tenenbaum_check(
    rule: &PrimePowerRule,
    hyp: Option<(f64, f64)>,
    x: f64,
    sieve: &FactorSieve,
) -> Result<HallTenenbaumReport> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::domain(format!("x must be at least 2, got {x}")));
    }
    if !rule.is_non_negative() {
        return Err(Error::domain(format!("rule `{}` is not declared non-negative", rule.label())));
    }
    let (a, b, estimated) = match hyp {
        Some((a, b)) => {
            if !(a >= 0.0 && b > 0.0) {
                return Err(Error::domain(format!("need A ≥ 0 and B > 0, got A = {a}, B = {b}")));
            }
            (a, b, false)
        }
        None => (estimate_a(rule, sieve)?, estimate_b(rule, sieve)?, true),
    };
    let table = expand_coefficients_par(rule, x.floor() as u64, sieve)?;
    let lhs = partial_sum(&table, x)?;
    let rhs = (a + b + 1.0) * x * log_mean(&table, x)? / x.ln();
    Ok(HallTenenbaumReport {
        x,
        a,
        b,
        estimated,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

/// `max_{x ∈ xs} S_f(x)/(x (log x)^{κ−1})` from a precomputed table.
pub fn normalized_envelope(table: &CoefficientTable, kappa: f64, xs: &[f64]) -> Result<f64> {
    max_x(xs)?;
    xs.iter().try_fold(f64::NEG_INFINITY, |m, &x| {
        Ok(m.max(partial_sum(table, x)? / (x * x.ln().powf(kappa - 1.0))))
    })
}

/// The upper bound `S_f(x) ≪ x (log x)^{κ−1}` in normalized form: the
/// largest normalized sum over `xs`.
pub fn corollary24_envelope(rule: &PrimePowerRule, kappa: f64, xs: &[f64], sieve: &FactorSieve) -> Result<f64> {
    let limit = max_x(xs)?;
    let table = expand_coefficients_par(rule, limit, sieve)?;
    normalized_envelope(&table, kappa, xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piltz::piltz_rule;

    fn sieve() -> FactorSieve {
        FactorSieve::new(100_000).unwrap()
    }

    #[test]
    fn trivial_constants() {
        let s = sieve();
        let one = mean_constant(&PrimePowerRule::constant_one(), 1.0, 1000, &s).unwrap();
        assert!((one.value - 1.0).abs() < 1e-10);
        let d = mean_constant(&PrimePowerRule::divisor(), 2.0, 1000, &s).unwrap();
        assert!((d.value - 1.0).abs() < 1e-10);
        let c = log_mean_constant(&PrimePowerRule::divisor(), 2.0, 1000, &s).unwrap();
        assert!((c.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn piltz_constants_are_reciprocal_gamma() {
        let s = sieve();
        for k in [0.5, 1.0, 2.0, 3.0] {
            let c = mean_constant(&piltz_rule(k).unwrap(), k, 10_000, &s).unwrap();
            assert!((c.value - 1.0 / gamma(k)).abs() < 1e-10, "κ = {k}");
        }
    }

    #[test]
    fn squarefree_constant() {
        let s = sieve();
        let c = mean_constant(&PrimePowerRule::squarefree(), 1.0, 100_000, &s).unwrap();
        assert!((c.value - 0.607_927_101_854_026_6).abs() < 1e-4);
        assert!((c.value - 0.607_927_101_854_026_6).abs() <= c.tail_magnitude);
    }

    #[test]
    fn divergent_local_series() {
        let s = sieve();
        let bad = PrimePowerRule::new("grow", |p, nu| (p as f64).powi(nu as i32)).non_negative();
        assert!(matches!(mean_constant(&bad, 1.0, 100, &s), Err(Error::Divergent(_))));
        assert!(mean_constant(&PrimePowerRule::mobius(), 1.0, 100, &s).is_err());
    }

    #[test]
    fn predictions() {
        let c = |kappa, kind| EulerConstantResult { value: 1.0, prime_limit: 2, tail_magnitude: 0.0, kappa, kind };
        assert!((predict_main_term(MomentKind::Sum, &c(1.0, MomentKind::Sum), 1e6).unwrap() - 1e6).abs() < 1e-6);
        let e5 = 5f64.exp();
        assert!((predict_main_term(MomentKind::LogSum, &c(1.0, MomentKind::LogSum), e5).unwrap() - 5.0).abs() < 1e-12);
        let v = predict_main_term(MomentKind::Sum, &c(2.0, MomentKind::Sum), 1e6).unwrap();
        assert!((v - 1e6 * 1e6f64.ln()).abs() < 1e-6);
        assert!(predict_main_term(MomentKind::Sum, &c(1.0, MomentKind::Sum), 1.0).is_err());
        assert!(predict_main_term(MomentKind::LogSum, &c(1.0, MomentKind::Sum), 10.0).is_err());
    }

    #[test]
    fn compare_for_constant_one() {
        let s = sieve();
        let r = ErrorFunction::power(1.0).unwrap();
        let rep = compare_moments(MomentKind::Sum, &PrimePowerRule::constant_one(), 1.0, &r, &[1e3, 12345.5], &s).unwrap();
        assert!((rep.points[0].ratio - 1.0).abs() < 1e-12);
        assert!((rep.points[1].ratio - 12345.0 / 12345.5).abs() < 1e-12);
    }

    #[test]
    fn hall_tenenbaum_examples() {
        let s = sieve();
        let one = hall_tenenbaum_check(&PrimePowerRule::constant_one(), Some((1.2, 1.05)), 1e4, &s).unwrap();
        assert!(one.slack > 0.0);
        let sq = hall_tenenbaum_check(&PrimePowerRule::squarefree(), Some((0.01, 1.1)), 1e5, &s).unwrap();
        assert!(sq.slack > 0.0);
        let d = hall_tenenbaum_check(&PrimePowerRule::divisor(), None, 1e4, &s).unwrap();
        assert!(d.estimated && d.slack > 0.0);
        assert!(d.b > 2.0 && d.b < 2.5);
    }

    #[test]
    fn estimated_a_for_constant_one() {
        let a = estimate_a(&PrimePowerRule::constant_one(), &sieve()).unwrap();
        // Σ_{p,ν≥2} ν log p/p^ν ≈ 1.975 before the 1.1 safety factor
        assert!((a / 1.1 - 1.9748).abs() < 1e-3, "{a}");
    }

    #[test]
    fn envelope_for_constant_one() {
        let e = corollary24_envelope(&PrimePowerRule::constant_one(), 1.0, &[1e3, 1e4], &sieve()).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }
}
