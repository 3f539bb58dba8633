//! Compensated summation with a fixed, thread-count independent reduction
//! order.
//!
//! Long sums are cut into segments of [`SEGMENT`] terms. Each segment is
//! summed with Neumaier's algorithm and the segment totals are merged in
//! segment order, so the result is bit-identical whether the segments were
//! evaluated on one thread or many.

use rayon::prelude::*;

/// Terms per reduction segment.
pub const SEGMENT: usize = 1 << 15;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both of its parts.
    #[inline]
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of `term(i)` for `i` in `start..end`, segment-parallel with
/// a deterministic merge.
pub fn par_sum_range<F>(start: usize, end: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if end <= start {
        return 0.0;
    }
    let nseg = (end - start).div_ceil(SEGMENT);
    let partials: Vec<Neumaier> = (0..nseg)
        .into_par_iter()
        .map(|s| {
            let lo = start + s * SEGMENT;
            let hi = (lo + SEGMENT).min(end);
            (lo..hi).map(&term).collect()
        })
        .collect();
    let mut acc = Neumaier::new();
    for p in &partials {
        acc.merge(p);
    }
    acc.total()
}

/// Sequential compensated sum over the same segmentation as
/// [`par_sum_range`]; the two agree bit for bit.
pub fn seq_sum_range<F>(start: usize, end: usize, term: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let mut acc = Neumaier::new();
    let mut lo = start;
    while lo < end {
        let hi = (lo + SEGMENT).min(end);
        let seg: Neumaier = (lo..hi).map(&term).collect();
        acc.merge(&seg);
        lo = hi;
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.total(), 2.0);
        let naive: f64 = [1.0, 1e100, 1.0, -1e100].iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn harmonic_sum_matches_sequential_bitwise() {
        let n = 200_000;
        let a = par_sum_range(1, n, |i| 1.0 / i as f64);
        let b = seq_sum_range(1, n, |i| 1.0 / i as f64);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(par_sum_range(5, 5, |_| 1.0), 0.0);
        assert_eq!(seq_sum_range(7, 3, |_| 1.0), 0.0);
    }
}
