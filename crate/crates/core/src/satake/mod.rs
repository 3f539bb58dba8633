//! Automorphic coefficients from local Satake parameters.
//!
//! At a prime `p` a degree-`m` representation contributes the local factor
//! `∏_j (1 − α_j p^{−s})^{−1}`. Expanding it gives
//!
//! - `λ(p^ν) = h_ν(α_1, …, α_m)`, the complete homogeneous symmetric
//!   polynomial, and
//! - `a(p^ν) = α_1^ν + ⋯ + α_m^ν`, the power sum that appears in `−L′/L`.
//!
//! The two are tied together by Newton's identity
//! `ν h_ν = Σ_{1≤j≤ν} a(p^j) h_{ν−j}` (the Hecke recurrence), which
//! [`hecke_recurrence_residual`] measures.

mod delta;
mod ntt;

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::export::sig17;
use crate::multfun::PrimePowerRule;
use crate::{Error, Result};

pub use delta::{delta_form, ramanujan_delta_source, DeltaExpansion, DELTA_CAP};

/// Tolerance for the self-contragredient closure test and for treating a
/// complex coefficient as real.
pub const REAL_TOL: f64 = 1e-10;

/// The `m` Satake parameters at one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSatake {
    prime: u64,
    params: Vec<Complex64>,
    self_contragredient: bool,
}

impl LocalSatake {
    /// Requires `m ≥ 2` finite, nonzero parameters.
    pub fn new(prime: u64, params: Vec<Complex64>) -> Result<Self> {
        if params.len() < 2 {
            return Err(Error::domain(format!(
                "at least two Satake parameters are required, got {}",
                params.len()
            )));
        }
        if let Some(a) = params.iter().find(|a| !a.is_finite() || a.norm() == 0.0) {
            return Err(Error::domain(format!("Satake parameter {a} is zero or not finite")));
        }
        Ok(LocalSatake {
            prime,
            params,
            self_contragredient: false,
        })
    }

    /// Like [`LocalSatake::new`], and additionally checks that the multiset
    /// `{ᾱ_j}` equals `{1/α_j}`.
    pub fn self_contragredient(prime: u64, params: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(prime, params)?;
        if !s.closed_under_conjugate_inverse(REAL_TOL) {
            return Err(Error::domain(format!(
                "parameters at p = {prime} are not closed under α ↦ 1/ᾱ"
            )));
        }
        s.self_contragredient = true;
        Ok(s)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn params(&self) -> &[Complex64] {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.params.len()
    }

    pub fn is_self_contragredient(&self) -> bool {
        self.self_contragredient
    }

    /// All parameters on the unit circle (to `1e-12`).
    pub fn is_tempered(&self) -> bool {
        self.params.iter().all(|a| (a.norm() - 1.0).abs() <= 1e-12)
    }

    pub fn closed_under_conjugate_inverse(&self, tol: f64) -> bool {
        let mut used = vec![false; self.params.len()];
        self.params.iter().all(|a| {
            let target = a.conj();
            let hit = self.params.iter().enumerate().position(|(j, b)| {
                let inv = b.inv();
                !used[j] && (target - inv).norm() <= tol * (1.0 + inv.norm())
            });
            match hit {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }

    /// `h_0, …, h_{nu_max}`, by multiplying the geometric series
    /// `1/(1 − α_j x)` into a truncated power series one parameter at a time.
    pub fn lambda_prime_powers(&self, nu_max: u32) -> Vec<Complex64> {
        let n = nu_max as usize;
        let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
        h[0] = Complex64::new(1.0, 0.0);
        for &a in &self.params {
            for k in 1..=n {
                let prev = h[k - 1];
                h[k] += a * prev;
            }
        }
        h
    }

    /// `λ(p^ν) = h_ν(α)`.
    pub fn lambda_prime_power(&self, nu: u32) -> Complex64 {
        self.lambda_prime_powers(nu)[nu as usize]
    }

    /// Real part of `λ(p^ν)`; for self-contragredient parameters the
    /// imaginary part must be negligible.
    pub fn lambda_real(&self, nu: u32) -> Result<f64> {
        self.realify(self.lambda_prime_power(nu), nu)
    }

    /// `a(p^ν) = Σ_j α_j^ν` for `ν ≥ 1`.
    pub fn a_prime_power(&self, nu: u32) -> Result<Complex64> {
        if nu == 0 {
            return Err(Error::domain("a(p^ν) is only defined for ν ≥ 1"));
        }
        Ok(self.params.iter().map(|a| a.powu(nu)).sum())
    }

    pub fn a_real(&self, nu: u32) -> Result<f64> {
        let v = self.a_prime_power(nu)?;
        self.realify(v, nu)
    }

    fn realify(&self, v: Complex64, nu: u32) -> Result<f64> {
        if self.self_contragredient && v.im.abs() > REAL_TOL * (1.0 + v.norm()) {
            return Err(Error::NotReal {
                p: self.prime,
                nu,
                imag: v.im,
            });
        }
        Ok(v.re)
    }
}

/// `max_{1≤ν≤nu_max} |ν h_ν − Σ_{j=1}^{ν} a(p^j) h_{ν−j}|`.
pub fn hecke_recurrence_residual(local: &LocalSatake, nu_max: u32) -> f64 {
    recurrence_residuals(local, nu_max).map(|(r, _)| r).fold(0.0, f64::max)
}

/// The same residual divided by `max(1, ν|h_ν|)`, for non-tempered
/// parameters whose coefficients grow geometrically.
pub fn hecke_recurrence_relative_residual(local: &LocalSatake, nu_max: u32) -> f64 {
    recurrence_residuals(local, nu_max)
        .map(|(r, scale)| r / scale.max(1.0))
        .fold(0.0, f64::max)
}

fn recurrence_residuals(local: &LocalSatake, nu_max: u32) -> impl Iterator<Item = (f64, f64)> {
    let h = local.lambda_prime_powers(nu_max);
    let a: Vec<Complex64> = (1..=nu_max.max(1))
        .map(|j| local.a_prime_power(j).expect("j >= 1"))
        .collect();
    (1..=nu_max as usize).map(move |nu| {
        let lhs = h[nu] * nu as f64;
        let rhs: Complex64 = (1..=nu).map(|j| a[j - 1] * h[nu - j]).sum();
        ((lhs - rhs).norm(), lhs.norm())
    })
}

/// GL₂ parameters `(α, 1/α)` with `α + 1/α = λ_p`: the roots of
/// `x² − λ_p x + 1`. Tempered (unit circle) exactly when `|λ_p| ≤ 2`.
pub fn gl2_from_eigenvalue(prime: u64, lambda_p: f64) -> Result<LocalSatake> {
    if !lambda_p.is_finite() {
        return Err(Error::domain(format!("eigenvalue at p = {prime} is not finite")));
    }
    let disc = lambda_p * lambda_p - 4.0;
    let (a, b) = if disc <= 0.0 {
        let im = (-disc).sqrt() / 2.0;
        let re = lambda_p / 2.0;
        (Complex64::new(re, im), Complex64::new(re, -im))
    } else {
        let r = disc.sqrt();
        // the larger-magnitude root first, the other as its exact reciprocal
        let big = (lambda_p + lambda_p.signum() * r) / 2.0;
        let (x, y) = if lambda_p >= 0.0 { (big, 1.0 / big) } else { (1.0 / big, big) };
        (Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    };
    LocalSatake::self_contragredient(prime, vec![a, b])
}

/// Parameters of `sym^k`: `(α^k, α^{k−2}, …, α^{−k})` from `(α, 1/α)`.
pub fn sym_power_lift(local: &LocalSatake, k: u32) -> Result<LocalSatake> {
    if local.degree() != 2 {
        return Err(Error::domain(format!(
            "symmetric powers need a degree-2 input, got degree {}",
            local.degree()
        )));
    }
    if k == 0 {
        return Err(Error::domain("symmetric power must be at least 1"));
    }
    let (a, b) = (local.params[0], local.params[1]);
    if ((a * b) - 1.0).norm() > REAL_TOL {
        return Err(Error::domain("GL₂ parameters must satisfy α·β = 1"));
    }
    let params = (0..=k).map(|i| a.powu(k - i) * b.powu(i)).collect();
    let mut out = LocalSatake::new(local.prime, params)?;
    out.self_contragredient = local.self_contragredient;
    Ok(out)
}

/// Best known exponent `θ_m` in `|α_π(p, j)| ≤ p^{θ_m}`.
pub fn theta_m(m: u32) -> Result<f64> {
    match m {
        0 | 1 => Err(Error::domain(format!("θ_m needs m ≥ 2, got {m}"))),
        2 => Ok(7.0 / 64.0),
        3 => Ok(5.0 / 14.0),
        4 => Ok(9.0 / 22.0),
        _ => Ok(0.5 - 2.0 / (m as f64 * m as f64 + 1.0)),
    }
}

/// `η_m = (1 − 2θ_m)/4`.
pub fn eta_m(m: u32) -> Result<f64> {
    Ok((1.0 - 2.0 * theta_m(m)?) / 4.0)
}

/// `max_j |α_j| − p^θ`; non-positive when the bound holds at this prime.
pub fn grc_residual(local: &LocalSatake, theta: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::domain(format!("θ must be non-negative, got {theta}")));
    }
    let max = local.params.iter().map(|a| a.norm()).fold(0.0, f64::max);
    Ok(max - (local.prime as f64).powf(theta))
}

type Supplier = dyn Fn(u64) -> Result<LocalSatake> + Send + Sync;

/// A degree-`m` family of local parameters, one set per prime.
#[derive(Clone)]
pub struct CoefficientSource {
    degree: u32,
    label: String,
    theta: f64,
    supplier: Arc<Supplier>,
}

impl std::fmt::Debug for CoefficientSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientSource")
            .field("degree", &self.degree)
            .field("label", &self.label)
            .field("theta", &self.theta)
            .finish_non_exhaustive()
    }
}

impl CoefficientSource {
    pub fn new<F>(label: impl Into<String>, degree: u32, supplier: F) -> Result<Self>
    where
        F: Fn(u64) -> Result<LocalSatake> + Send + Sync + 'static,
    {
        Ok(CoefficientSource {
            degree,
            label: label.into(),
            theta: theta_m(degree)?,
            supplier: Arc::new(supplier),
        })
    }

    /// All `m` parameters equal to 1: `λ(n) = d_m(n)`, `a(p^ν) = m`.
    pub fn unit(m: u32) -> Result<Self> {
        Self::new(format!("unit:{m}"), m, move |p| {
            LocalSatake::self_contragredient(p, vec![Complex64::new(1.0, 0.0); m as usize])
        })
    }

    /// The GL₂ source of a Hecke eigenform.
    pub fn from_form(form: &HeckeEigenvalueForm) -> Result<Self> {
        let form = form.clone();
        Self::new(form.label.clone(), 2, move |p| form.local(p))
    }

    /// `sym^k` of a degree-2 source.
    pub fn sym_power(&self, k: u32) -> Result<Self> {
        if self.degree != 2 {
            return Err(Error::domain("symmetric powers need a degree-2 source"));
        }
        let base = self.supplier.clone();
        Self::new(format!("sym{k}({})", self.label), k + 1, move |p| {
            sym_power_lift(&base(p)?, k)
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn local(&self, p: u64) -> Result<LocalSatake> {
        let local = (self.supplier)(p)?;
        if local.degree() != self.degree as usize {
            return Err(Error::domain(format!(
                "supplier returned degree {} at p = {p}, expected {}",
                local.degree(),
                self.degree
            )));
        }
        Ok(local)
    }

    /// `λ(p)` as a real number.
    pub fn lambda_p(&self, p: u64) -> Result<f64> {
        self.local(p)?.lambda_real(1)
    }

    /// `a(p^ν)` as a real number.
    pub fn a_real(&self, p: u64, nu: u32) -> Result<f64> {
        self.local(p)?.a_real(nu)
    }

    /// The multiplicative rule `p^ν ↦ λ(p^ν)`. Failures surface as
    /// non-finite values, which expansion reports with their `(p, ν)`.
    pub fn lambda_rule(&self) -> PrimePowerRule {
        let supplier = self.supplier.clone();
        PrimePowerRule::new(self.label.clone(), move |p, nu| {
            supplier(p)
                .and_then(|l| l.lambda_real(nu))
                .unwrap_or(f64::NAN)
        })
    }

    /// Writes `p,j,re,im` rows for every prime `p ≤ up_to`.
    pub fn write_satake_csv<W: Write>(
        &self,
        mut w: W,
        primes: impl IntoIterator<Item = u64>,
    ) -> io::Result<()> {
        writeln!(w, "p,j,re,im")?;
        for p in primes {
            let local = self
                .local(p)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            for (j, a) in local.params().iter().enumerate() {
                writeln!(w, "{p},{},{},{}", j + 1, sig17(a.re), sig17(a.im))?;
            }
        }
        Ok(())
    }
}

/// A holomorphic Hecke eigenform in the unitary normalization: `λ(p)` is
/// the classical eigenvalue divided by `p^{(k−1)/2}`.
#[derive(Clone)]
pub struct HeckeEigenvalueForm {
    label: String,
    weight: u32,
    tempered: bool,
    eigenvalue: Arc<dyn Fn(u64) -> Result<f64> + Send + Sync>,
}

impl std::fmt::Debug for HeckeEigenvalueForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeckeEigenvalueForm")
            .field("label", &self.label)
            .field("weight", &self.weight)
            .field("tempered", &self.tempered)
            .finish_non_exhaustive()
    }
}

impl HeckeEigenvalueForm {
    pub fn new<F>(label: impl Into<String>, weight: u32, tempered: bool, eigenvalue: F) -> Result<Self>
    where
        F: Fn(u64) -> Result<f64> + Send + Sync + 'static,
    {
        if weight < 2 || weight % 2 == 1 {
            return Err(Error::domain(format!("weight must be even and at least 2, got {weight}")));
        }
        Ok(HeckeEigenvalueForm {
            label: label.into(),
            weight,
            tempered,
            eigenvalue: Arc::new(eigenvalue),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn is_tempered(&self) -> bool {
        self.tempered
    }

    /// Normalized `λ(p)`; when the form is flagged tempered, `|λ(p)| ≤ 2` is
    /// enforced.
    pub fn eigenvalue(&self, p: u64) -> Result<f64> {
        let v = (self.eigenvalue)(p)?;
        if self.tempered && v.abs() > 2.0 + 1e-12 {
            return Err(Error::domain(format!(
                "|λ({p})| = {} exceeds the Deligne bound 2",
                v.abs()
            )));
        }
        Ok(v)
    }

    pub fn local(&self, p: u64) -> Result<LocalSatake> {
        gl2_from_eigenvalue(p, self.eigenvalue(p)?)
    }
}
