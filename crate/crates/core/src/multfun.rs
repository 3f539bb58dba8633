//! Multiplicative functions defined by their values at prime powers.
//!
//! A [`PrimePowerRule`] gives `f(p^ν)`; [`expand_coefficients`] turns it into
//! a [`CoefficientTable`] of `f(n)` for `n ≤ limit` in one pass over the
//! smallest-prime-factor sieve, writing `n = p^ν m` with `p ∤ m` and setting
//! `f(n) = f(p^ν) f(m)`. Every value is therefore exactly the product of its
//! prime-power factors, folded from the largest prime down.

use std::io::{self, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::errfun::ErrorFunction;
use crate::export::write_indexed_csv;
use crate::primes::{small_primes, FactorSieve};
use crate::summation::{par_sum_range, Neumaier, SEGMENT};
use crate::{Error, Result};

/// Default cap on the size of materialized tables.
pub const DEFAULT_TABLE_CAP: u64 = 100_000_000;

/// Hypothesis constants attached to a rule: `κ` of the linear prime-sum
/// condition, `A` bounding the prime-power contribution and `B` the crude
/// upper bound `Σ_{p≤z} f(p) log p ≤ Bz`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MomentHypotheses {
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
}

impl MomentHypotheses {
    pub fn new(kappa: f64, a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("A", a), ("B", b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { kappa, a, b })
    }
}

type EvalFn = dyn Fn(u64, u32) -> f64 + Send + Sync;

/// A multiplicative function given by its prime-power values. `f(1) = 1`.
#[derive(Clone)]
pub struct PrimePowerRule {
    label: String,
    eval: Arc<EvalFn>,
    hypothesis: Option<MomentHypotheses>,
    non_negative: bool,
}

impl std::fmt::Debug for PrimePowerRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimePowerRule")
            .field("label", &self.label)
            .field("hypothesis", &self.hypothesis)
            .field("non_negative", &self.non_negative)
            .finish()
    }
}

impl PrimePowerRule {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(u64, u32) -> f64 + Send + Sync + 'static,
    {
        PrimePowerRule {
            label: label.into(),
            eval: Arc::new(eval),
            hypothesis: None,
            non_negative: false,
        }
    }

    /// `f ≡ 1`.
    pub fn constant_one() -> Self {
        Self::new("one", |_, _| 1.0)
            .non_negative()
            .with_hypothesis(MomentHypotheses { kappa: 1.0, a: 2.2, b: 1.1 })
    }

    /// `μ²`, the squarefree indicator.
    pub fn squarefree() -> Self {
        Self::new("squarefree", |_, nu| if nu == 1 { 1.0 } else { 0.0 })
            .non_negative()
            .with_hypothesis(MomentHypotheses { kappa: 1.0, a: 0.01, b: 1.1 })
    }

    /// Möbius function.
    pub fn mobius() -> Self {
        Self::new("mobius", |_, nu| if nu == 1 { -1.0 } else { 0.0 })
    }

    /// `d(n) = d_2(n)`, the number of divisors.
    pub fn divisor() -> Self {
        Self::new("divisor", |_, nu| (nu + 1) as f64)
            .non_negative()
            .with_hypothesis(MomentHypotheses { kappa: 2.0, a: 9.0, b: 2.2 })
    }

    /// Declares the rule non-negative. Expansion then rejects negative values.
    pub fn non_negative(mut self) -> Self {
        self.non_negative = true;
        self
    }

    pub fn with_hypothesis(mut self, h: MomentHypotheses) -> Self {
        self.hypothesis = Some(h);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hypothesis(&self) -> Option<&MomentHypotheses> {
        self.hypothesis.as_ref()
    }

    pub fn is_non_negative(&self) -> bool {
        self.non_negative
    }

    /// `f(p^ν)` without validation.
    #[inline]
    pub fn eval_raw(&self, p: u64, nu: u32) -> f64 {
        (self.eval)(p, nu)
    }

    /// `f(p^ν)`, rejecting non-finite values (and negative ones when the rule
    /// is declared non-negative).
    pub fn eval(&self, p: u64, nu: u32) -> Result<f64> {
        if nu == 0 {
            return Ok(1.0);
        }
        let v = (self.eval)(p, nu);
        if !v.is_finite() || (self.non_negative && v < 0.0) {
            return Err(Error::Evaluation {
                label: self.label.clone(),
                p,
                nu,
            });
        }
        Ok(v)
    }

    /// The rule `n ↦ f(n)²`.
    pub fn squared(&self) -> Self {
        let inner = self.eval.clone();
        Self::new(format!("{}^2", self.label), move |p, nu| {
            let v = inner(p, nu);
            v * v
        })
        .non_negative()
    }

    /// Pointwise quotient `f(n)/g(n)`, which is again multiplicative.
    pub fn divided_by(&self, other: &PrimePowerRule) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut out = Self::new(format!("{}/{}", self.label, other.label), move |p, nu| {
            f(p, nu) / g(p, nu)
        });
        out.non_negative = self.non_negative && other.non_negative;
        out
    }
}

/// `f(n)` for `1 ≤ n ≤ limit`. Index 0 is unused and holds 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    limit: u64,
    values: Vec<f64>,
    label: String,
}

impl CoefficientTable {
    /// Wraps `values[1..=limit]`; `values[0]` is ignored.
    pub fn from_values(label: impl Into<String>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("a table needs at least the entry n = 1"));
        }
        values[0] = 0.0;
        Ok(CoefficientTable {
            limit: (values.len() - 1) as u64,
            values,
            label: label.into(),
        })
    }

    /// Builds a table from `f(n)` evaluated directly at each `n`.
    pub fn from_fn(label: impl Into<String>, limit: u64, f: impl Fn(u64) -> f64) -> Result<Self> {
        let mut values = vec![0.0; limit as usize + 1];
        for (n, v) in values.iter_mut().enumerate().skip(1) {
            *v = f(n as u64);
        }
        Self::from_values(label, values)
    }

    /// The identity of Dirichlet convolution, `δ(n) = [n = 1]`.
    pub fn unit(limit: u64) -> Result<Self> {
        Self::from_fn("unit", limit, |n| if n == 1 { 1.0 } else { 0.0 })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// All values, index 0 included.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(n)`; panics outside `1..=limit`.
    #[inline]
    pub fn get(&self, n: u64) -> f64 {
        assert!(n >= 1 && n <= self.limit, "index {n} outside 1..={}", self.limit);
        self.values[n as usize]
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64) -> f64 + Sync) -> Self {
        let mut values: Vec<f64> = self.values.par_iter().map(|&v| f(v)).collect();
        values[0] = 0.0;
        CoefficientTable {
            limit: self.limit,
            values,
            label: label.into(),
        }
    }

    pub fn zip_with(
        &self,
        other: &CoefficientTable,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        if self.limit != other.limit {
            return Err(Error::LimitMismatch {
                left: self.limit,
                right: other.limit,
            });
        }
        let mut values: Vec<f64> = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        values[0] = 0.0;
        Ok(CoefficientTable {
            limit: self.limit,
            values,
            label: label.into(),
        })
    }

    /// The first `limit` entries as a new table.
    pub fn truncated(&self, limit: u64) -> Result<Self> {
        if limit == 0 || limit > self.limit {
            return Err(Error::range("limit", limit as f64, self.limit));
        }
        Self::from_values(self.label.clone(), self.values[..=limit as usize].to_vec())
    }

    /// CSV with header `n,<column>` and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, w: W, column: &str) -> io::Result<()> {
        write_indexed_csv(
            w,
            &format!("n,{column}"),
            (1..=self.limit).map(|n| (n, self.values[n as usize])),
        )
    }

    /// Resolves a real cutoff `x` to `⌊x⌋`, checking it against the limit.
    pub(crate) fn cutoff(&self, x: f64) -> Result<usize> {
        if !x.is_finite() || x < 0.0 || x.floor() > self.limit as f64 {
            return Err(Error::range("x", x, self.limit));
        }
        Ok(x.floor() as usize)
    }
}

fn check_expansion_limit(limit: u64, sieve: &FactorSieve) -> Result<()> {
    if limit > DEFAULT_TABLE_CAP {
        return Err(Error::Capacity {
            what: "table limit",
            requested: limit,
            cap: DEFAULT_TABLE_CAP,
        });
    }
    if limit == 0 || limit > sieve.limit() {
        return Err(Error::range("limit", limit as f64, sieve.limit()));
    }
    Ok(())
}

/// Expands `rule` into `f(n)` for `n ≤ limit` in a single sequential pass.
pub fn expand_coefficients(
    rule: &PrimePowerRule,
    limit: u64,
    sieve: &FactorSieve,
) -> Result<CoefficientTable> {
    check_expansion_limit(limit, sieve)?;
    let limit = limit as usize;
    let mut values = vec![0.0; limit + 1];
    values[1] = 1.0;
    for n in 2..=limit {
        let (p, nu, pk, m) = sieve.split_smallest(n);
        values[n] = if m == 1 {
            rule.eval(p as u64, nu)?
        } else {
            values[pk] * values[m]
        };
    }
    CoefficientTable::from_values(rule.label(), values)
}

/// Parallel expansion. Prime-power values are evaluated first; every other
/// entry is then the product of its prime-power values folded from the
/// largest prime down, which reproduces [`expand_coefficients`] bit for bit.
pub fn expand_coefficients_par(
    rule: &PrimePowerRule,
    limit: u64,
    sieve: &FactorSieve,
) -> Result<CoefficientTable> {
    check_expansion_limit(limit, sieve)?;
    let limit = limit as usize;
    let primes: Vec<u64> = sieve.primes_up_to(limit as u64).collect();
    let powers: Vec<Vec<(usize, f64)>> = primes
        .par_iter()
        .map(|&p| {
            let mut out = Vec::new();
            let mut pk = p as usize;
            let mut nu = 1;
            loop {
                out.push((pk, rule.eval(p, nu)?));
                match pk.checked_mul(p as usize) {
                    Some(next) if next <= limit => {
                        pk = next;
                        nu += 1;
                    }
                    _ => break,
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut pp = vec![0.0; limit + 1];
    for (k, v) in powers.into_iter().flatten() {
        pp[k] = v;
    }
    let mut values = vec![0.0; limit + 1];
    values
        .par_chunks_mut(SEGMENT)
        .enumerate()
        .for_each(|(idx, chunk)| {
            let lo = idx * SEGMENT;
            let mut stack = [0usize; 16];
            for (i, slot) in chunk.iter_mut().enumerate() {
                let n = lo + i;
                if n < 2 {
                    *slot = if n == 1 { 1.0 } else { 0.0 };
                    continue;
                }
                let mut len = 0;
                let mut rest = n;
                while rest > 1 {
                    let (_, _, pk, m) = sieve.split_smallest(rest);
                    stack[len] = pk;
                    len += 1;
                    rest = m;
                }
                let mut acc = 1.0;
                for &pk in stack[..len].iter().rev() {
                    acc = pp[pk] * acc;
                }
                *slot = acc;
            }
        });
    CoefficientTable::from_values(rule.label(), values)
}

/// `S_f(x) = Σ_{n≤x} f(n)`, compensated.
pub fn partial_sum(table: &CoefficientTable, x: f64) -> Result<f64> {
    let n = table.cutoff(x)?;
    let v = table.values();
    Ok(par_sum_range(1, n + 1, |k| v[k]))
}

/// `s_f(x) = Σ_{n≤x} f(n)/n`, compensated.
pub fn log_mean(table: &CoefficientTable, x: f64) -> Result<f64> {
    let n = table.cutoff(x)?;
    let v = table.values();
    Ok(par_sum_range(1, n + 1, |k| v[k] / k as f64))
}

/// `Σ_{n≤x} f(n) (log(x/n))^exponent`. The exponent-0 case is exactly
/// [`partial_sum`].
pub fn log_weighted_sum(table: &CoefficientTable, x: f64, exponent: f64) -> Result<f64> {
    if !(exponent >= 0.0) || !exponent.is_finite() {
        return Err(Error::domain(format!("exponent must be non-negative, got {exponent}")));
    }
    if exponent == 0.0 {
        return partial_sum(table, x);
    }
    let n = table.cutoff(x)?;
    let v = table.values();
    let lx = x.ln();
    Ok(par_sum_range(1, n + 1, |k| {
        let l = (lx - (k as f64).ln()).max(0.0);
        v[k] * l.powf(exponent)
    }))
}

/// Dirichlet convolution `(a ⋆ b)(n) = Σ_{d|n} a(d) b(n/d)`.
pub fn dirichlet_convolve(a: &CoefficientTable, b: &CoefficientTable) -> Result<CoefficientTable> {
    if a.limit() != b.limit() {
        return Err(Error::LimitMismatch {
            left: a.limit(),
            right: b.limit(),
        });
    }
    let n = a.limit() as usize;
    let (av, bv) = (a.values(), b.values());
    let mut out = vec![0.0; n + 1];
    for d in 1..=n {
        let ad = av[d];
        if ad == 0.0 {
            continue;
        }
        for k in 1..=n / d {
            out[d * k] += ad * bv[k];
        }
    }
    CoefficientTable::from_values(format!("({})*({})", a.label(), b.label()), out)
}

/// For each `z`, `(Σ_{p≤z} f(p) log p − κz)·R(z)/z`. Bounded residuals are
/// the empirical form of the linear prime-sum condition.
pub fn verify_linear_condition(
    rule: &PrimePowerRule,
    r: &ErrorFunction,
    zs: &[f64],
    sieve: &FactorSieve,
) -> Result<Vec<(f64, f64)>> {
    let hyp = rule
        .hypothesis()
        .ok_or_else(|| Error::MissingHypothesis(rule.label().to_string()))?;
    let zmax = zs.iter().copied().fold(0.0, f64::max);
    if zmax > sieve.limit() as f64 {
        return Err(Error::range("z", zmax, sieve.limit()));
    }
    let mut order: Vec<usize> = (0..zs.len()).collect();
    order.sort_by(|&i, &j| zs[i].total_cmp(&zs[j]));
    let mut out = vec![(0.0, 0.0); zs.len()];
    let mut primes = sieve.primes_up_to(zmax.floor() as u64).peekable();
    let mut acc = Neumaier::new();
    for i in order {
        let z = zs[i];
        while let Some(&p) = primes.peek() {
            if p as f64 > z {
                break;
            }
            acc.add(rule.eval(p, 1)? * (p as f64).ln());
            primes.next();
        }
        let resid = (acc.total() - hyp.kappa * z) * r.value(z) / z;
        out[i] = (z, resid);
    }
    Ok(out)
}

/// `(S_f(x), s_f(x))` without materializing a table: each segment of
/// integers is factored by trial division with the primes up to `√x`, its
/// values are summed, and segment totals are merged in order.
pub fn streaming_sums(rule: &PrimePowerRule, x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::domain(format!("x must be at least 1, got {x}")));
    }
    let n = x.floor() as u64;
    let base: Vec<u64> = small_primes((n as f64).sqrt() as usize + 1)
        .into_iter()
        .map(|p| p as u64)
        .collect();
    let seg = SEGMENT as u64;
    let nseg = n.div_ceil(seg);
    let partials: Vec<(Neumaier, Neumaier)> = (0..nseg)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + s * seg;
            let hi = (lo + seg).min(n + 1);
            let len = (hi - lo) as usize;
            let mut rest: Vec<u64> = (lo..hi).collect();
            let mut val = vec![1.0f64; len];
            for &p in &base {
                if p * p >= hi {
                    break;
                }
                let mut m = lo.div_ceil(p) * p;
                while m < hi {
                    let i = (m - lo) as usize;
                    let mut nu = 0;
                    while rest[i] % p == 0 {
                        rest[i] /= p;
                        nu += 1;
                    }
                    val[i] *= rule.eval(p, nu)?;
                    m += p;
                }
            }
            let mut s_acc = Neumaier::new();
            let mut l_acc = Neumaier::new();
            for i in 0..len {
                if rest[i] > 1 {
                    val[i] *= rule.eval(rest[i], 1)?;
                }
                s_acc.add(val[i]);
                l_acc.add(val[i] / (lo + i as u64) as f64);
            }
            Ok((s_acc, l_acc))
        })
        .collect::<Result<_>>()?;
    let mut s = Neumaier::new();
    let mut l = Neumaier::new();
    for (a, b) in &partials {
        s.merge(a);
        l.merge(b);
    }
    Ok((s.total(), l.total()))
}
