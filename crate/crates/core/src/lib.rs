//! Coefficients of automorphic L-functions built from Satake parameters,
//! mean values of non-negative multiplicative functions, and sign statistics
//! of real coefficient sequences.
//!
//! The crate is organized bottom-up:
//!
//! - [`primes`]: smallest-prime-factor sieve, factorization, von Mangoldt.
//! - [`multfun`]: multiplicative functions from prime-power rules, partial
//!   sums and Dirichlet convolution.
//! - [`piltz`]: the Piltz divisor function `d_κ` for real `κ > 0`.
//! - [`satake`]: `λ_π(p^ν)` and `a_π(p^ν)` from local parameters, GL₂ forms,
//!   symmetric-power lifts and the Ramanujan Δ q-expansion.
//! - [`errfun`]: admissible error functions `R` and the error functionals
//!   that accompany the mean-value asymptotics.
//! - [`meanvalue`]: Euler-product constants and empirical-vs-predicted
//!   comparisons.
//! - [`signs`]: `N±(x)`, sign changes, prime-number-theorem diagnostics and
//!   the Cauchy–Schwarz chain behind the sign-count lower bound.

pub mod errfun;
mod error;
pub mod export;
pub mod meanvalue;
pub mod multfun;
pub mod piltz;
pub mod primes;
pub mod quad;
pub mod satake;
pub mod signs;
pub mod summation;

pub use error::{Error, Result};
