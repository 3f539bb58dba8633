//! Number-theoretic transforms over a handful of NTT-friendly primes, and
//! Garner reconstruction of signed 128-bit integers from their residues.

/// Moduli `c·2^k + 1` with `2^23 | p − 1` and product about `1.08·10^44`.
pub(crate) const MODULI: [u64; 5] = [998_244_353, 167_772_161, 469_762_049, 754_974_721, 1_811_939_329];

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("a prime modulus has a primitive root")
}

fn transform<const P: u64>(a: &mut [u64], root: u64, invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(root, (P - 1) / len as u64, P);
        if invert {
            w = inv_mod(w, P);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % P;
                lo[k] = if u + v >= P { u + v - P } else { u + v };
                hi[k] = if u >= v { u - v } else { u + P - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = inv_mod(n as u64, P);
        for x in a.iter_mut() {
            *x = *x * n_inv % P;
        }
    }
}

/// `a²` truncated to `a.len()` coefficients, modulo `P`.
fn square_truncated<const P: u64>(a: &[u64], root: u64) -> Vec<u64> {
    let keep = a.len();
    let size = (2 * keep).next_power_of_two().max(2);
    let mut buf = vec![0u64; size];
    buf[..keep].copy_from_slice(a);
    transform::<P>(&mut buf, root, false);
    for x in buf.iter_mut() {
        *x = *x * *x % P;
    }
    transform::<P>(&mut buf, root, true);
    buf.truncate(keep);
    buf
}

fn fourth_power<const P: u64>(series: &[i64]) -> Vec<u64> {
    let root = primitive_root(P);
    let reduced: Vec<u64> = series.iter().map(|&c| c.rem_euclid(P as i64) as u64).collect();
    let sq = square_truncated::<P>(&reduced, root);
    square_truncated::<P>(&sq, root)
}

/// Residues of `series⁴` (truncated to `series.len()`) modulo each entry of
/// [`MODULI`].
pub(crate) fn fourth_power_residues(series: &[i64]) -> [Vec<u64>; 5] {
    let (r01, r234) = rayon::join(
        || rayon::join(|| fourth_power::<{ MODULI[0] }>(series), || fourth_power::<{ MODULI[1] }>(series)),
        || {
            rayon::join(
                || fourth_power::<{ MODULI[2] }>(series),
                || {
                    rayon::join(
                        || fourth_power::<{ MODULI[3] }>(series),
                        || fourth_power::<{ MODULI[4] }>(series),
                    )
                },
            )
        },
    );
    let ((a, b), (c, (d, e))) = (r01, r234);
    [a, b, c, d, e]
}

/// Precomputed Garner constants for [`MODULI`].
pub(crate) struct Garner {
    inv: [[u64; 5]; 5],
}

impl Garner {
    pub(crate) fn new() -> Self {
        let mut inv = [[0u64; 5]; 5];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate().take(i) {
                *slot = inv_mod(MODULI[j] % MODULI[i], MODULI[i]);
            }
        }
        Garner { inv }
    }

    /// The unique integer in `(−M/2, M/2]` with the given residues, or `None`
    /// if it does not fit in an `i128`.
    pub(crate) fn reconstruct(&self, residues: [u64; 5]) -> Option<i128> {
        let mut digits = [0u64; 5];
        for i in 0..5 {
            let m = MODULI[i];
            let mut x = residues[i] % m;
            for j in 0..i {
                x = (x + m - digits[j] % m) % m * self.inv[i][j] % m;
            }
            digits[i] = x;
        }
        // compare against the mixed-radix digits of (M − 1)/2, top digit first;
        // each modulus is odd so those digits are (m_i − 1)/2
        let mut negative = false;
        for i in (0..5).rev() {
            let half = (MODULI[i] - 1) / 2;
            if digits[i] != half {
                negative = digits[i] > half;
                break;
            }
        }
        let mut acc: i128 = 0;
        for i in (0..5).rev() {
            let d = if negative { MODULI[i] - 1 - digits[i] } else { digits[i] };
            acc = acc.checked_mul(MODULI[i] as i128)?.checked_add(d as i128)?;
        }
        if negative {
            acc.checked_add(1).map(|v| -v)
        } else {
            Some(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_support_large_transforms() {
        for &p in &MODULI {
            assert_eq!((p - 1) % (1 << 23), 0);
            let g = primitive_root(p);
            assert_eq!(pow_mod(g, p - 1, p), 1);
        }
    }

    #[test]
    fn garner_round_trips_signed_values() {
        let g = Garner::new();
        let samples: [i128; 7] = [0, 1, -1, 123_456_789, -987_654_321_012_345, i128::from(i64::MAX) * 1_000_003, -(1i128 << 120)];
        for &v in &samples {
            let res = MODULI.map(|m| v.rem_euclid(m as i128) as u64);
            assert_eq!(g.reconstruct(res), Some(v));
        }
    }

    #[test]
    fn fourth_power_matches_schoolbook() {
        let series: Vec<i64> = vec![1, -3, 5, 0, -7, 2, 9, -1];
        let n = series.len();
        let mut sq = vec![0i128; n];
        for i in 0..n {
            for j in 0..n - i {
                sq[i + j] += series[i] as i128 * series[j] as i128;
            }
        }
        let mut q = vec![0i128; n];
        for i in 0..n {
            for j in 0..n - i {
                q[i + j] += sq[i] * sq[j];
            }
        }
        let res = fourth_power_residues(&series);
        let g = Garner::new();
        for k in 0..n {
            let r = [res[0][k], res[1][k], res[2][k], res[3][k], res[4][k]];
            assert_eq!(g.reconstruct(r), Some(q[k]));
        }
    }
}
