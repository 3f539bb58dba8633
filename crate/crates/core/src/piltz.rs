//! The Piltz divisor function `d_κ`, the coefficients of `ζ(s)^κ` for real
//! `κ > 0`. At a prime power,
//! `d_κ(p^ν) = (1/ν!) ∏_{0≤j<ν} (κ + j)`.

use statrs::function::gamma::ln_gamma;

use crate::multfun::{expand_coefficients, CoefficientTable, MomentHypotheses, PrimePowerRule};
use crate::primes::FactorSieve;
use crate::{Error, Result};

/// Exponents above this use the log-gamma form instead of the running
/// product.
const PRODUCT_MAX_NU: u32 = 1000;

/// A validated Piltz order `κ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PiltzOrder(f64);

impl PiltzOrder {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("Piltz order must be positive, got {kappa}")));
        }
        Ok(PiltzOrder(kappa))
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    pub fn prime_power(self, nu: u32) -> f64 {
        let k = self.0;
        if nu <= PRODUCT_MAX_NU {
            let mut v = 1.0;
            for j in 0..nu {
                // multiply first so integer orders stay exact
                v = v * (k + j as f64) / (j + 1) as f64;
            }
            v
        } else {
            let nu = nu as f64;
            (ln_gamma(k + nu) - ln_gamma(k) - ln_gamma(nu + 1.0)).exp()
        }
    }
}

/// `d_κ(p^ν)`, independent of `p`.
pub fn piltz_prime_power(kappa: f64, nu: u32) -> Result<f64> {
    Ok(PiltzOrder::new(kappa)?.prime_power(nu))
}

/// The rule `p^ν ↦ d_κ(p^ν)`, tagged with hypothesis constant `κ`.
pub fn piltz_rule(kappa: f64) -> Result<PrimePowerRule> {
    let order = PiltzOrder::new(kappa)?;
    // crude over-estimate of Σ_{p,ν≥2} d_κ(p^ν) log p^ν / p^ν (≈ 8.16 at κ = 2)
    let a = 1.1 * (2f64.powf(kappa) * kappa * kappa + 1.0);
    Ok(PrimePowerRule::new(format!("piltz:{kappa}"), move |_, nu| order.prime_power(nu))
        .non_negative()
        .with_hypothesis(MomentHypotheses::new(kappa, a, 1.1 * kappa)?))
}

/// `d_κ(n)` for `n ≤ limit`.
pub fn piltz_table(kappa: f64, limit: u64, sieve: &FactorSieve) -> Result<CoefficientTable> {
    expand_coefficients(&piltz_rule(kappa)?, limit, sieve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_examples() {
        assert_eq!(piltz_prime_power(2.0, 3).unwrap(), 4.0);
        assert_eq!(piltz_prime_power(1.0, 7).unwrap(), 1.0);
        assert_eq!(piltz_prime_power(3.7, 0).unwrap(), 1.0);
        assert!(matches!(piltz_prime_power(0.0, 1), Err(Error::Domain(_))));
        assert!(piltz_prime_power(-1.0, 1).is_err());
    }

    /// Coefficients of `(1 − x)^{−κ}` by the binomial series recurrence
    /// `c_{ν+1} = c_ν (κ + ν)/(ν + 1)`, written out for `κ = 1/2`.
    #[test]
    fn half_order_matches_binomial_series() {
        // (1 - x)^{-1/2} = 1 + x/2 + 3x²/8 + 5x³/16 + 35x⁴/128
        let series = [1.0, 0.5, 0.375, 0.3125, 35.0 / 128.0];
        for (nu, c) in series.iter().enumerate() {
            assert!((piltz_prime_power(0.5, nu as u32).unwrap() - c).abs() < 1e-15);
        }
    }

    #[test]
    fn integer_order_is_binomial_coefficient() {
        // d_k(p^ν) = C(ν + k − 1, k − 1)
        for nu in 0..30u32 {
            assert_eq!(piltz_prime_power(2.0, nu).unwrap(), (nu + 1) as f64);
            let c3 = ((nu + 1) * (nu + 2) / 2) as f64;
            assert_eq!(piltz_prime_power(3.0, nu).unwrap(), c3);
        }
    }

    #[test]
    fn large_exponents_switch_to_log_gamma_smoothly() {
        let o = PiltzOrder::new(0.7).unwrap();
        let a = o.prime_power(PRODUCT_MAX_NU);
        let b = o.prime_power(PRODUCT_MAX_NU + 1);
        let ratio = (0.7 + PRODUCT_MAX_NU as f64) / (PRODUCT_MAX_NU + 1) as f64;
        assert!((b / a - ratio).abs() < 1e-9);
    }

    #[test]
    fn rule_expansion_for_integer_orders() {
        let s = FactorSieve::new(2000).unwrap();
        let one = piltz_table(1.0, 2000, &s).unwrap();
        assert!(one.values()[1..].iter().all(|&v| v == 1.0));
        let d2 = piltz_table(2.0, 2000, &s).unwrap();
        let ones = crate::multfun::expand_coefficients(&PrimePowerRule::constant_one(), 2000, &s).unwrap();
        let conv = crate::multfun::dirichlet_convolve(&ones, &ones).unwrap();
        assert_eq!(d2.values(), conv.values());
        assert_eq!(piltz_rule(2.5).unwrap().hypothesis().unwrap().kappa, 2.5);
    }
}
