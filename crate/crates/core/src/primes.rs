//! Prime and factorization infrastructure.
//!
//! [`FactorSieve`] stores the smallest prime factor of every integer up to a
//! limit, which makes factorization of any `n ≤ limit` a sequence of
//! `O(log n)` table lookups. The table is built segment by segment (in
//! parallel when a rayon pool is available) and its content does not depend
//! on the number of threads.

use rayon::prelude::*;

use crate::{Error, Result};

/// Default upper bound on sieve limits.
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

const BUILD_SEGMENT: usize = 1 << 18;

/// Smallest-prime-factor table for `2 ≤ n ≤ limit`.
#[derive(Clone)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl std::fmt::Debug for FactorSieve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorSieve")
            .field("limit", &self.limit)
            .finish_non_exhaustive()
    }
}

/// Canonical factorization: strictly increasing primes with exponents `≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn product(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u64, u32)> {
        self.pairs.iter()
    }
}

impl FactorSieve {
    /// Builds the table for `limit` under [`DEFAULT_SIEVE_CAP`].
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        Self::check(limit, cap)?;
        Ok(Self::build(limit as usize, true))
    }

    /// Single-threaded construction; same content as [`FactorSieve::new`].
    pub fn new_sequential(limit: u64) -> Result<Self> {
        Self::check(limit, DEFAULT_SIEVE_CAP)?;
        Ok(Self::build(limit as usize, false))
    }

    fn check(limit: u64, cap: u64) -> Result<()> {
        let cap = cap.min(u32::MAX as u64);
        if limit > cap {
            return Err(Error::Capacity {
                what: "sieve limit",
                requested: limit,
                cap,
            });
        }
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be at least 2, got {limit}")));
        }
        Ok(())
    }

    fn build(limit: usize, parallel: bool) -> Self {
        let base = small_primes(limit.isqrt());
        let mut spf = vec![0u32; limit + 1];
        let fill = |(idx, chunk): (usize, &mut [u32])| {
            let lo = idx * BUILD_SEGMENT;
            let hi = lo + chunk.len();
            for &p in &base {
                if p * p >= hi {
                    break;
                }
                let mut m = (p * p).max(lo.div_ceil(p) * p);
                while m < hi {
                    let slot = &mut chunk[m - lo];
                    if *slot == 0 {
                        *slot = p as u32;
                    }
                    m += p;
                }
            }
            for (i, slot) in chunk.iter_mut().enumerate() {
                if *slot == 0 && lo + i >= 2 {
                    *slot = (lo + i) as u32;
                }
            }
        };
        if parallel {
            spf.par_chunks_mut(BUILD_SEGMENT).enumerate().for_each(fill);
        } else {
            spf.chunks_mut(BUILD_SEGMENT).enumerate().for_each(fill);
        }
        FactorSieve {
            limit: limit as u64,
            spf,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Raw table; index `n` holds the smallest prime factor of `n` (0 for
    /// `n < 2`).
    pub fn spf_table(&self) -> &[u32] {
        &self.spf
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::range("n", n as f64, self.limit));
        }
        Ok(())
    }

    /// Smallest prime factor of `2 ≤ n ≤ limit`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check_index(n)?;
        if n < 2 {
            return Err(Error::domain("1 has no prime factor"));
        }
        Ok(self.spf[n as usize] as u64)
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// Splits `n ≥ 2` as `p^ν · m` with `p` its smallest prime and `p ∤ m`.
    /// No range check.
    #[inline]
    pub(crate) fn split_smallest(&self, n: usize) -> (usize, u32, usize, usize) {
        let p = self.spf[n] as usize;
        let mut m = n / p;
        let mut nu = 1;
        let mut pk = p;
        while m % p == 0 {
            m /= p;
            nu += 1;
            pk *= p;
        }
        (p, nu, pk, m)
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        self.check_index(n)?;
        let mut pairs = Vec::new();
        let mut rest = n as usize;
        while rest > 1 {
            let (p, nu, _, m) = self.split_smallest(rest);
            pairs.push((p as u64, nu));
            rest = m;
        }
        Ok(Factorization { pairs })
    }

    /// `Λ(n)`: `log p` if `n = p^ν`, otherwise 0 (including `n = 1`).
    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.von_mangoldt_unchecked(n as usize))
    }

    #[inline]
    pub(crate) fn von_mangoldt_unchecked(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let (p, _, _, m) = self.split_smallest(n);
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    /// If `n = p^ν` with `ν ≥ 1`, returns `(p, ν)`.
    pub fn prime_power(&self, n: u64) -> Option<(u64, u32)> {
        if n < 2 || n > self.limit {
            return None;
        }
        let (p, nu, _, m) = self.split_smallest(n as usize);
        (m == 1).then_some((p as u64, nu))
    }

    /// Primes `p ≤ bound` in increasing order (`bound` clipped to the limit).
    pub fn primes_up_to(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        let bound = bound.min(self.limit) as usize;
        (2..=bound)
            .filter(move |&n| self.spf[n] as usize == n)
            .map(|n| n as u64)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes_up_to(self.limit)
    }

    pub fn prime_count(&self) -> usize {
        self.primes().count()
    }
}

/// Plain Eratosthenes for the base primes `≤ n`.
pub(crate) fn small_primes(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_up_to_ten() {
        let s = FactorSieve::new(10).unwrap();
        assert_eq!(&s.spf_table()[2..], &[2, 3, 2, 5, 2, 7, 2, 3, 2]);
    }

    #[test]
    fn smallest_limit() {
        let s = FactorSieve::new(2).unwrap();
        assert_eq!(s.spf(2).unwrap(), 2);
        assert!(FactorSieve::new(1).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        match FactorSieve::with_cap(1_000, 999) {
            Err(Error::Capacity { cap, .. }) => assert_eq!(cap, 999),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn factorize_examples() {
        let s = FactorSieve::new(10_000_000).unwrap();
        assert_eq!(s.factorize(12).unwrap().pairs, vec![(2, 2), (3, 1)]);
        assert!(s.factorize(1).unwrap().is_empty());
        let primorial: u64 = [2u64, 3, 5, 7, 11, 13, 17, 19].iter().product();
        assert_eq!(primorial, 9_699_690);
        let f = s.factorize(primorial).unwrap();
        assert_eq!(
            f.pairs,
            [2, 3, 5, 7, 11, 13, 17, 19].map(|p| (p, 1)).to_vec()
        );
        assert!(matches!(s.factorize(10_000_001), Err(Error::Range { .. })));
    }

    #[test]
    fn von_mangoldt_examples() {
        let s = FactorSieve::new(100).unwrap();
        assert!((s.von_mangoldt(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(s.von_mangoldt(6).unwrap(), 0.0);
        assert_eq!(s.von_mangoldt(1).unwrap(), 0.0);
        assert!(s.von_mangoldt(101).is_err());
    }

    #[test]
    fn reconstruction_up_to_ten_thousand() {
        let s = FactorSieve::new(10_000).unwrap();
        for n in 1..=10_000u64 {
            let f = s.factorize(n).unwrap();
            assert_eq!(f.product(), n);
            assert!(f.pairs.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|&(p, e)| s.is_prime(p) && e >= 1));
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = FactorSieve::new(1_000_003).unwrap();
        let b = FactorSieve::new_sequential(1_000_003).unwrap();
        assert_eq!(a.spf_table(), b.spf_table());
    }
}
