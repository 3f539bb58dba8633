//! Sign statistics of real coefficient sequences and the diagnostics behind
//! the sign-count lower bound.
//!
//! Counts `N±(x) = #{n ≤ x : λ(n) ≷ 0}` exclude zeros, which are reported
//! separately. A sign change is a pair of consecutive nonzero terms of
//! opposite sign, skipping any zeros in between.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::multfun::{log_weighted_sum, partial_sum, CoefficientTable};
use crate::piltz::piltz_table;
use crate::primes::FactorSieve;
use crate::satake::{theta_m, CoefficientSource, DeltaExpansion};
use crate::summation::{par_sum_range, Neumaier};
use crate::{Error, Result};

/// `|λ(n)| ≤ ZERO_THRESHOLD` counts as a zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignCount {
    pub x: u64,
    pub n_plus: u64,
    pub n_minus: u64,
    pub n_zero: u64,
}

fn sign_of(v: f64) -> i8 {
    if v > ZERO_THRESHOLD {
        1
    } else if v < -ZERO_THRESHOLD {
        -1
    } else {
        0
    }
}

fn tally(x: u64, signs: impl Iterator<Item = i8>) -> (SignCount, u64) {
    let mut c = SignCount { x, n_plus: 0, n_minus: 0, n_zero: 0 };
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs {
        match s {
            1 => c.n_plus += 1,
            -1 => c.n_minus += 1,
            _ => {
                c.n_zero += 1;
                continue;
            }
        }
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    (c, changes)
}

/// `N⁺(x)`, `N⁻(x)` and the number of zeros up to `x`.
pub fn count_signs(table: &CoefficientTable, x: f64) -> Result<SignCount> {
    let n = table.cutoff(x)?;
    Ok(tally(n as u64, table.values()[1..=n].iter().map(|&v| sign_of(v))).0)
}

/// Sign changes among the nonzero terms with `n ≤ x`.
pub fn count_sign_changes(table: &CoefficientTable, x: f64) -> Result<u64> {
    let n = table.cutoff(x)?;
    Ok(tally(n as u64, table.values()[1..=n].iter().map(|&v| sign_of(v))).1)
}

fn delta_cutoff(delta: &DeltaExpansion, x: f64) -> Result<usize> {
    if !x.is_finite() || x < 0.0 || x.floor() > delta.limit() as f64 {
        return Err(Error::range("x", x, delta.limit()));
    }
    Ok(x.floor() as usize)
}

/// [`count_signs`] for Δ, decided on the exact integers `τ(n)`.
pub fn count_signs_exact(delta: &DeltaExpansion, x: f64) -> Result<SignCount> {
    let n = delta_cutoff(delta, x)?;
    Ok(tally(n as u64, delta.tau_values()[1..=n].iter().map(|t| t.signum() as i8)).0)
}

/// [`count_sign_changes`] for Δ on the exact integers `τ(n)`.
pub fn count_sign_changes_exact(delta: &DeltaExpansion, x: f64) -> Result<u64> {
    let n = delta_cutoff(delta, x)?;
    Ok(tally(n as u64, delta.tau_values()[1..=n].iter().map(|t| t.signum() as i8)).1)
}

/// `λ⁺ = (|λ| + λ)/2` and `λ⁻ = (|λ| − λ)/2`.
pub fn lambda_pm_tables(table: &CoefficientTable) -> (CoefficientTable, CoefficientTable) {
    let plus = table.map(format!("{}+", table.label()), |v| v.max(0.0));
    let minus = table.map(format!("{}-", table.label()), |v| (-v).max(0.0));
    (plus, minus)
}

/// `x^{1−2θ_m} (log x)^{2/m−2}`, the shape of the lower bound for
/// `min(N⁺(x), N⁻(x))` with implied constant 1.
pub fn theorem1_lower_bound(m: u32, x: f64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::domain(format!("x must exceed 1, got {x}")));
    }
    let theta = theta_m(m)?;
    Ok(x.powf(1.0 - 2.0 * theta) * x.ln().powf(2.0 / m as f64 - 2.0))
}

/// `Σ_{n≤x} λ(n)²/d_κ(n)`.
pub fn weighted_second_moment(table: &CoefficientTable, kappa: f64, x: f64, sieve: &FactorSieve) -> Result<f64> {
    let n = table.cutoff(x)?;
    if n == 0 {
        return Ok(0.0);
    }
    let d = piltz_table(kappa, n as u64, sieve)?;
    let (v, dv) = (table.values(), d.values());
    Ok(par_sum_range(1, n + 1, |k| v[k] * v[k] / dv[k]))
}

fn check_sieve(x: f64, sieve: &FactorSieve) -> Result<u64> {
    if !(x >= 1.0 && x.is_finite()) || x.floor() > sieve.limit() as f64 {
        return Err(Error::range("x", x, sieve.limit()));
    }
    Ok(x.floor() as u64)
}

/// Sums `term(p)` over the primes `p ≤ x` in increasing order.
fn prime_sum(x: u64, sieve: &FactorSieve, term: impl Fn(u64) -> Result<f64> + Sync) -> Result<f64> {
    let primes: Vec<u64> = sieve.primes_up_to(x).collect();
    let terms: Vec<f64> = primes.par_iter().map(|&p| term(p)).collect::<Result<_>>()?;
    Ok(terms.into_iter().collect::<Neumaier>().total())
}

/// `(Σ_{p≤x} |a(p)|² log p, that sum / x)`.
pub fn pnt_prime_check(source: &CoefficientSource, x: f64, sieve: &FactorSieve) -> Result<(f64, f64)> {
    let n = check_sieve(x, sieve)?;
    let sum = prime_sum(n, sieve, |p| {
        Ok(source.local(p)?.a_prime_power(1)?.norm_sqr() * (p as f64).ln())
    })?;
    Ok((sum, sum / x))
}

/// `(Σ_{n≤x} Λ(n)|a(n)|², Σ_{n≤x} Λ(n) a(n))` over prime powers `n`.
pub fn pnt_von_mangoldt_check(source: &CoefficientSource, x: f64, sieve: &FactorSieve) -> Result<(f64, f64)> {
    let n = check_sieve(x, sieve)?;
    let primes: Vec<u64> = sieve.primes_up_to(n).collect();
    let terms: Vec<(f64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let local = source.local(p)?;
            let lp = (p as f64).ln();
            let (mut sq, mut signed) = (Neumaier::new(), Neumaier::new());
            let mut pk = p;
            let mut nu = 1;
            loop {
                let a = local.a_prime_power(nu)?;
                sq.add(lp * a.norm_sqr());
                signed.add(lp * local.a_real(nu)?);
                match pk.checked_mul(p) {
                    Some(next) if next <= n => {
                        pk = next;
                        nu += 1;
                    }
                    _ => break,
                }
            }
            Ok((sq.total(), signed.total()))
        })
        .collect::<Result<_>>()?;
    let sq: Neumaier = terms.iter().map(|t| t.0).collect();
    let signed: Neumaier = terms.iter().map(|t| t.1).collect();
    Ok((sq.total(), signed.total()))
}

/// Which form of the prime-power convergence hypothesis to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HypothesisForm {
    /// `|a(p^ν)|² (log p)² / p^ν`.
    Strong,
    /// `|a(p^ν)|² log p / p^ν`.
    Weak,
}

/// `Σ_{p≤x} |a(p^ν)|² (log p)^k / p^ν` with `k = 2` (strong) or `1` (weak).
pub fn hypothesis_h_partial(
    source: &CoefficientSource,
    nu: u32,
    x: f64,
    form: HypothesisForm,
    sieve: &FactorSieve,
) -> Result<f64> {
    if nu < 2 {
        return Err(Error::domain(format!("ν must be at least 2, got {nu}")));
    }
    let n = check_sieve(x, sieve)?;
    let k = match form {
        HypothesisForm::Strong => 2,
        HypothesisForm::Weak => 1,
    };
    prime_sum(n, sieve, |p| {
        let lp = (p as f64).ln();
        let a = source.local(p)?.a_prime_power(nu)?;
        Ok(a.norm_sqr() * lp.powi(k) * (-(nu as f64) * lp).exp())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignPart {
    Plus,
    Minus,
}

/// The Cauchy–Schwarz step `L ≤ √(Q·N)` with
/// `L = Σ λ^±(n)(log x/n)^k`, `Q = Σ λ(n)²(log x/n)^{2k}`, `N = N±(x)` and
/// `k = [m/2] + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchySchwarzReport {
    pub x: f64,
    pub m: u32,
    pub part: SignPart,
    pub exponent: u32,
    pub l: f64,
    pub q: f64,
    pub n: u64,
    /// `L² ≤ Q·N·(1 + 10⁻¹⁰)`.
    pub holds: bool,
    pub q_over_x: f64,
    /// `Γ(2k+1)·max_{t≤x} S₂(t)/t`, where `S₂(t) = Σ_{n≤t} λ(n)²`: a
    /// rigorous bound for `Q/x` by partial summation.
    pub q_bound: f64,
}

pub fn cauchy_schwarz_report(table: &CoefficientTable, m: u32, x: f64, part: SignPart) -> Result<CauchySchwarzReport> {
    if m < 2 {
        return Err(Error::domain(format!("m must be at least 2, got {m}")));
    }
    let cut = table.cutoff(x)?;
    let k = m / 2 + 1;
    let (plus, minus) = lambda_pm_tables(table);
    let signed = match part {
        SignPart::Plus => plus,
        SignPart::Minus => minus,
    };
    let l = log_weighted_sum(&signed, x, k as f64)?;
    let sq = table.map(format!("{}^2", table.label()), |v| v * v);
    let q = log_weighted_sum(&sq, x, 2.0 * k as f64)?;
    let counts = count_signs(table, x)?;
    let n = match part {
        SignPart::Plus => counts.n_plus,
        SignPart::Minus => counts.n_minus,
    };
    let mut acc = Neumaier::new();
    let mut max_ratio: f64 = 0.0;
    for (t, v) in sq.values()[1..=cut].iter().enumerate() {
        acc.add(*v);
        max_ratio = max_ratio.max(acc.total() / (t + 1) as f64);
    }
    debug_assert!(cut == 0 || (partial_sum(&sq, x)? - acc.total()).abs() <= 1e-9 * acc.total().max(1.0));
    Ok(CauchySchwarzReport {
        x,
        m,
        part,
        exponent: k,
        l,
        q,
        n,
        holds: l * l <= q * n as f64 * (1.0 + 1e-10),
        q_over_x: q / x,
        q_bound: gamma(2.0 * k as f64 + 1.0) * max_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignRatios {
    pub plus_density: f64,
    pub minus_density: f64,
    pub zero_density: f64,
    /// `min(N⁺, N⁻)` over the lower-bound shape.
    pub min_over_bound: Option<f64>,
}

/// Everything reported for one `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignReport {
    pub x: f64,
    pub n_plus: u64,
    pub n_minus: u64,
    pub n_zero: u64,
    pub sign_changes: u64,
    /// Absent for `m < 2` or `x ≤ 1`, where the bound is not defined.
    pub theorem1_bound: Option<f64>,
    pub theorem1_pass: Option<bool>,
    pub ratios: SignRatios,
}

impl SignReport {
    pub fn new(counts: SignCount, changes: u64, m: u32, x: f64) -> Result<Self> {
        let bound = if m >= 2 && x > 1.0 { Some(theorem1_lower_bound(m, x)?) } else { None };
        let total = counts.x.max(1) as f64;
        let min = counts.n_plus.min(counts.n_minus) as f64;
        Ok(SignReport {
            x,
            n_plus: counts.n_plus,
            n_minus: counts.n_minus,
            n_zero: counts.n_zero,
            sign_changes: changes,
            theorem1_bound: bound,
            theorem1_pass: bound.map(|b| min >= b),
            ratios: SignRatios {
                plus_density: counts.n_plus as f64 / total,
                minus_density: counts.n_minus as f64 / total,
                zero_density: counts.n_zero as f64 / total,
                min_over_bound: bound.map(|b| min / b),
            },
        })
    }
}

/// Sign report from a floating-point table.
pub fn sign_report(table: &CoefficientTable, m: u32, x: f64) -> Result<SignReport> {
    SignReport::new(count_signs(table, x)?, count_sign_changes(table, x)?, m, x)
}

/// Sign report for Δ using the exact `τ(n)`.
pub fn sign_report_exact(delta: &DeltaExpansion, x: f64) -> Result<SignReport> {
    SignReport::new(count_signs_exact(delta, x)?, count_sign_changes_exact(delta, x)?, 2, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfun::{expand_coefficients, PrimePowerRule};

    fn table(v: &[f64]) -> CoefficientTable {
        let mut vals = vec![0.0];
        vals.extend_from_slice(v);
        CoefficientTable::from_values("t", vals).unwrap()
    }

    #[test]
    fn delta_signs_to_ten() {
        let d = DeltaExpansion::new(10).unwrap();
        let c = count_signs_exact(&d, 10.0).unwrap();
        assert_eq!((c.n_plus, c.n_minus, c.n_zero), (4, 6, 0));
        assert_eq!(count_signs(&d.table(), 10.0).unwrap(), c);
        assert_eq!(count_sign_changes_exact(&d, 10.0).unwrap(), 7);
        assert_eq!(count_sign_changes(&d.table(), 10.0).unwrap(), 7);
    }

    #[test]
    fn simple_sign_counts() {
        let ones = CoefficientTable::from_fn("one", 100, |_| 1.0).unwrap();
        let c = count_signs(&ones, 100.0).unwrap();
        assert_eq!((c.n_plus, c.n_minus, c.n_zero), (100, 0, 0));
        assert_eq!(count_sign_changes(&ones, 100.0).unwrap(), 0);
        let s = FactorSieve::new(10).unwrap();
        let mu = expand_coefficients(&PrimePowerRule::mobius(), 4, &s).unwrap();
        let c = count_signs(&mu, 4.0).unwrap();
        assert_eq!((c.n_plus, c.n_minus, c.n_zero), (1, 2, 1));
        let alt: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(count_sign_changes(&table(&alt), 10.0).unwrap(), 9);
        assert_eq!(count_sign_changes(&table(&[1.0, 0.0, -1.0, 0.0, 0.0, -2.0]), 6.0).unwrap(), 1);
        assert!(count_signs(&ones, 101.0).is_err());
    }

    #[test]
    fn pm_split() {
        let t = table(&[-3.0, 0.0, 2.5]);
        let (p, m) = lambda_pm_tables(&t);
        assert_eq!((p.get(1), m.get(1)), (0.0, 3.0));
        assert_eq!((p.get(2), m.get(2)), (0.0, 0.0));
        assert_eq!((p.get(3), m.get(3)), (2.5, 0.0));
    }

    #[test]
    fn lower_bound_shapes() {
        let x = 1e8f64;
        let b5 = theorem1_lower_bound(5, x).unwrap();
        assert!((b5 / (x.powf(2.0 / 13.0) * x.ln().powf(-1.6)) - 1.0).abs() < 1e-12);
        let b6 = theorem1_lower_bound(6, x).unwrap();
        assert!((b6 / (x.powf(4.0 / 37.0) * x.ln().powf(-5.0 / 3.0)) - 1.0).abs() < 1e-12);
        let b2 = theorem1_lower_bound(2, 1e6).unwrap();
        assert!((b2 - 3524.7).abs() < 0.1, "{b2}");
        assert!(theorem1_lower_bound(1, 10.0).is_err());
        assert!(theorem1_lower_bound(2, 1.0).is_err());
    }

    #[test]
    fn weighted_moment_examples() {
        let s = FactorSieve::new(100).unwrap();
        let d = DeltaExpansion::new(10).unwrap();
        let v = weighted_second_moment(&d.table(), 2.0, 10.0, &s).unwrap();
        assert!((v - 2.205_539_961_2).abs() < 1e-9, "{v}");
        let v = weighted_second_moment(&CoefficientTable::from_fn("one", 6, |_| 1.0).unwrap(), 2.0, 6.0, &s).unwrap();
        assert!((v - (1.0 + 0.5 + 0.5 + 1.0 / 3.0 + 0.5 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn pnt_small_x() {
        let s = FactorSieve::new(100).unwrap();
        let (src, _) = crate::satake::ramanujan_delta_source(100).unwrap();
        let (sum, ratio) = pnt_prime_check(&src, 10.0, &s).unwrap();
        assert!((sum - 1.633_637_944_4).abs() < 1e-9, "{sum}");
        assert!((ratio - sum / 10.0).abs() < 1e-15);
        let (sq, _) = pnt_von_mangoldt_check(&src, 2.0, &s).unwrap();
        let l2 = src.lambda_p(2).unwrap();
        assert!((sq - 2f64.ln() * l2 * l2).abs() < 1e-14);
    }

    #[test]
    fn hypothesis_h_small_x() {
        let s = FactorSieve::new(100).unwrap();
        let (src, _) = crate::satake::ramanujan_delta_source(100).unwrap();
        let v = hypothesis_h_partial(&src, 2, 3.0, HypothesisForm::Strong, &s).unwrap();
        let term = |p: f64| {
            let l = src.lambda_p(p as u64).unwrap();
            (l * l - 2.0).powi(2) * p.ln().powi(2) / (p * p)
        };
        assert!((v - term(2.0) - term(3.0)).abs() < 1e-14);
        assert!((term(2.0) - 0.354_826_749_8).abs() < 1e-9);
        assert!(hypothesis_h_partial(&src, 1, 3.0, HypothesisForm::Strong, &s).is_err());
    }

    #[test]
    fn cauchy_schwarz_holds() {
        let d = DeltaExpansion::new(1000).unwrap();
        for part in [SignPart::Plus, SignPart::Minus] {
            let r = cauchy_schwarz_report(&d.table(), 2, 1000.0, part).unwrap();
            assert!(r.holds && r.l > 0.0);
            assert!(r.q_over_x <= r.q_bound);
        }
    }
}
