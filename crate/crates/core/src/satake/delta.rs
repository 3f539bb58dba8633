//! Exact Ramanujan τ(n) from `Δ = q ∏(1 − qⁿ)^24 = q (η³)^8`, using
//! Jacobi's identity `∏(1 − qⁿ)³ = Σ_k (−1)^k (2k+1) q^{k(k+1)/2}`.

use std::sync::Arc;

use super::ntt::{fourth_power_residues, Garner};
use super::{CoefficientSource, HeckeEigenvalueForm};
use crate::multfun::CoefficientTable;
use crate::{Error, Result};

/// Largest supported `n`. Deligne's bound `|τ(n)| ≤ d(n) n^{11/2}` keeps
/// every coefficient up to here well inside `i128`, and the q-expansion
/// needs about 40 bytes of working memory per coefficient.
pub const DELTA_CAP: u64 = 3_000_000;

/// `τ(1), …, τ(limit)` and the unitary normalization `λ(n) = τ(n)/n^{11/2}`.
#[derive(Debug, Clone)]
pub struct DeltaExpansion {
    tau: Vec<i128>,
    lambda: Vec<f64>,
}

impl DeltaExpansion {
    pub fn new(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::domain("Δ expansion needs limit ≥ 1"));
        }
        if limit > DELTA_CAP {
            return Err(Error::Capacity {
                what: "Δ expansion limit",
                requested: limit,
                cap: DELTA_CAP,
            });
        }
        let len = limit as usize;
        // (η³)² exactly, from the sparse Jacobi series
        let jacobi: Vec<(usize, i64)> = (0..)
            .map(|k: usize| (k * (k + 1) / 2, if k % 2 == 0 { 2 * k as i64 + 1 } else { -(2 * k as i64 + 1) }))
            .take_while(|&(e, _)| e < len)
            .collect();
        let mut e6 = vec![0i64; len];
        for &(ei, ci) in &jacobi {
            for &(ej, cj) in &jacobi {
                if ei + ej >= len {
                    break;
                }
                e6[ei + ej] += ci * cj;
            }
        }
        let residues = fourth_power_residues(&e6);
        let garner = Garner::new();
        let mut tau = Vec::with_capacity(len + 1);
        tau.push(0);
        for k in 0..len {
            let r = [residues[0][k], residues[1][k], residues[2][k], residues[3][k], residues[4][k]];
            let v = garner.reconstruct(r).ok_or_else(|| {
                Error::Divergent(format!("τ({}) does not fit in 128 bits", k + 1))
            })?;
            tau.push(v);
        }
        let lambda = tau
            .iter()
            .enumerate()
            .map(|(n, &t)| {
                if n == 0 {
                    0.0
                } else {
                    let x = n as f64;
                    t as f64 / (x.powi(5) * x.sqrt())
                }
            })
            .collect();
        Ok(DeltaExpansion { tau, lambda })
    }

    pub fn limit(&self) -> u64 {
        (self.tau.len() - 1) as u64
    }

    pub fn tau(&self, n: u64) -> Result<i128> {
        self.check(n)?;
        Ok(self.tau[n as usize])
    }

    pub fn lambda(&self, n: u64) -> Result<f64> {
        self.check(n)?;
        Ok(self.lambda[n as usize])
    }

    /// Sign of `τ(n)`, decided on the exact integer.
    pub fn sign(&self, n: u64) -> Result<i8> {
        Ok(self.tau(n)?.signum() as i8)
    }

    /// `τ(0..=limit)` with `τ(0) = 0`.
    pub fn tau_values(&self) -> &[i128] {
        &self.tau
    }

    pub fn table(&self) -> CoefficientTable {
        CoefficientTable::from_values("delta", self.lambda.clone()).expect("limit ≥ 1")
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit() {
            return Err(Error::range("n", n as f64, self.limit()));
        }
        Ok(())
    }
}

/// The weight-12 form Δ, whose eigenvalues are read from `expansion`.
pub fn delta_form(expansion: Arc<DeltaExpansion>) -> HeckeEigenvalueForm {
    HeckeEigenvalueForm::new("delta", 12, true, move |p| expansion.lambda(p))
        .expect("weight 12 is valid")
}

/// The GL₂ source of Δ together with its normalized coefficient table.
pub fn ramanujan_delta_source(limit: u64) -> Result<(CoefficientSource, CoefficientTable)> {
    let expansion = Arc::new(DeltaExpansion::new(limit)?);
    let table = expansion.table();
    let source = CoefficientSource::from_form(&delta_form(expansion))?;
    Ok((source, table))
}
