//! Prime sieves, factorization, valuations and prime-sum primitives.

use crate::{Error, Result};
use rayon::prelude::*;

/// Hard cap on sieve size; a least-prime-factor table stores one u32 per
/// integer, so this bounds the table at ~1 GiB.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 28;

/// Canonical prime-power decomposition of a positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` with primes strictly increasing, exponents >= 1.
    pub parts: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn recompose(&self) -> u64 {
        self.parts
            .iter()
            .fold(1u64, |acc, &(p, k)| acc * p.pow(k))
    }
}

/// Least-prime-factor sieve up to `limit`, plus the ascending prime list.
///
/// Immutable after construction; all lookups are pure reads, so a table can
/// be shared freely across threads.
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    smallest_factor: Vec<u32>,
}

/// Builds a [`PrimeTable`] with a linear (Euler) least-prime-factor sieve.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Argument(format!("sieve limit must be >= 2, got {limit}")));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds memory budget {MAX_SIEVE_LIMIT}"
        )));
    }
    let n = limit as usize;
    let mut lpf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::with_capacity(n / (n.ilog2().max(1) as usize) + 16);
    for i in 2..=n {
        if lpf[i] == 0 {
            lpf[i] = i as u32;
            primes.push(i as u32);
        }
        let li = lpf[i] as usize;
        for &p in primes.iter() {
            let p = p as usize;
            if p > li || p * i > n {
                break;
            }
            lpf[p * i] = p as u32;
        }
    }
    Ok(PrimeTable { limit, primes, smallest_factor: lpf })
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.smallest_factor[n as usize] as u64 == n
    }

    /// Least prime factor of `n` (`n >= 2`).
    pub fn lpf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::OutOfRange(format!("lpf({n}) outside [2, {}]", self.limit)));
        }
        Ok(self.smallest_factor[n as usize] as u64)
    }

    /// Primes `p` with `lo <= p <= hi` (inclusive bounds) as a subslice.
    pub fn primes_between(&self, lo: u64, hi: u64) -> &[u32] {
        let lo = lo.max(2);
        let start = self.primes.partition_point(|&p| (p as u64) < lo);
        let end = self.primes.partition_point(|&p| p as u64 <= hi.min(self.limit));
        &self.primes[start..end]
    }
}

/// Factorizes `n` by repeated least-prime-factor division.
pub fn factorize(n: u64, table: &PrimeTable) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Argument("factorize(0) is undefined".into()));
    }
    if n > table.limit {
        return Err(Error::OutOfRange(format!("{n} exceeds sieve limit {}", table.limit)));
    }
    let mut parts = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = table.smallest_factor[m as usize] as u64;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        parts.push((p, k));
    }
    Ok(Factorization { n, parts })
}

/// `nu_p(n)`: the largest `b >= 0` with `p^b | n`.
pub fn valuation(n: u64, p: u64) -> u32 {
    debug_assert!(n >= 1 && p >= 2);
    let mut m = n;
    let mut b = 0;
    while m % p == 0 {
        m /= p;
        b += 1;
    }
    b
}

/// Kahan compensated accumulator; summation order is fixed by the caller.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Chunk width used by the deterministic parallel prime reductions. Fixed
/// independently of the thread count so that results are bit-identical for
/// any parallelism level.
const CHUNK: usize = 1 << 15;

/// `sum over primes lo <= p <= hi of weight(p)/p`.
///
/// Chunks of the ascending prime list are summed with Kahan compensation and
/// merged in chunk order, so the result does not depend on the number of
/// worker threads.
pub fn prime_reciprocal_sum<W>(table: &PrimeTable, lo: u64, hi: u64, weight: W) -> Result<f64>
where
    W: Fn(u64) -> f64 + Sync,
{
    if hi > table.limit {
        return Err(Error::OutOfRange(format!("hi={hi} exceeds sieve limit {}", table.limit)));
    }
    if lo > hi {
        return Err(Error::Argument(format!("lo={lo} > hi={hi}")));
    }
    let primes = table.primes_between(lo, hi);
    let partials: Vec<f64> = primes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = Kahan::new();
            for &p in chunk {
                let p = p as u64;
                acc.add(weight(p) / p as f64);
            }
            acc.value()
        })
        .collect();
    let mut total = Kahan::new();
    for v in partials {
        total.add(v);
    }
    Ok(total.value())
}

/// Primes in `[lo, hi]` by a segmented sieve; independent of any
/// least-prime-factor table, usable beyond its limit.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 2;
    let base = simple_primes(root);
    let mut out = Vec::new();
    const SEG: u64 = 1 << 18;
    let mut start = lo;
    let mut mark = vec![false; SEG as usize];
    while start <= hi {
        let end = (start + SEG - 1).min(hi);
        let len = (end - start + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                mark[(j - start) as usize] = true;
                j += p;
            }
        }
        for i in 0..len {
            if !mark[i] {
                let n = start + i as u64;
                if n >= 2 {
                    out.push(n);
                }
            }
        }
        start = end + 1;
    }
    out
}

fn simple_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

/// `base^exp mod m` (m >= 1).
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Euler's totient by trial division (for small moduli).
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small_limits() {
        let t = sieve(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        let t2 = sieve(2).unwrap();
        assert_eq!(t2.primes(), &[2]);
    }

    #[test]
    fn sieve_100_has_25_primes() {
        // Oracle: trial division.
        let by_trial: Vec<u64> = (2..=100u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        let t = sieve(100).unwrap();
        assert_eq!(t.primes().len(), 25);
        let sieved: Vec<u64> = t.primes().iter().map(|&p| p as u64).collect();
        assert_eq!(sieved, by_trial);
    }

    #[test]
    fn sieve_matches_trial_division_to_1e4() {
        let t = sieve(10_000).unwrap();
        for n in 2..=10_000u64 {
            let trial_prime = (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(t.is_prime(n), trial_prime, "disagree at {n}");
        }
    }

    #[test]
    fn sieve_rejects_over_budget() {
        assert!(matches!(sieve(MAX_SIEVE_LIMIT + 1), Err(Error::Resource(_))));
    }

    #[test]
    fn factorize_examples() {
        let t = sieve(3000).unwrap();
        assert!(factorize(1, &t).unwrap().parts.is_empty());
        assert_eq!(factorize(12, &t).unwrap().parts, vec![(2, 2), (3, 1)]);
        let f = factorize(2016, &t).unwrap();
        assert_eq!(f.parts, vec![(2, 5), (3, 2), (7, 1)]);
        assert_eq!(f.recompose(), 2016);
        assert!(matches!(factorize(3001, &t), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn factorize_recomposes_to_1e5() {
        let t = sieve(100_000).unwrap();
        for n in 1..=100_000u64 {
            assert_eq!(factorize(n, &t).unwrap().recompose(), n);
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(12, 2), 2);
        assert_eq!(valuation(12, 5), 0);
        assert_eq!(valuation(1 << 10, 2), 10);
    }

    #[test]
    fn valuation_additive_under_coprime_multiplication() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
            let mut n: u64 = rng.gen_range(1..10_000);
            while n % p == 0 {
                n = rng.gen_range(1..10_000);
            }
            let k = rng.gen_range(0..6u32);
            assert_eq!(valuation(n * p.pow(k), p), valuation(n, p) + k);
        }
    }

    #[test]
    fn reciprocal_sum_hand_value() {
        let t = sieve(100).unwrap();
        let s = prime_reciprocal_sum(&t, 2, 10, |_| 1.0).unwrap();
        let expect = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0;
        assert!((s - expect).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_sum_matches_mertens() {
        let t = sieve(1_000_000).unwrap();
        let s = prime_reciprocal_sum(&t, 2, 1_000_000, |_| 1.0).unwrap();
        let expect = (1_000_000f64).ln().ln() + 0.2615;
        assert!((s - expect).abs() < 0.01, "s={s} expect~{expect}");
    }

    #[test]
    fn reciprocal_sum_monotone_in_hi() {
        let t = sieve(10_000).unwrap();
        let mut last = 0.0;
        for hi in [10u64, 100, 1000, 10_000] {
            let s = prime_reciprocal_sum(&t, 2, hi, |_| 1.0).unwrap();
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn segmented_range_agrees_with_table() {
        let t = sieve(50_000).unwrap();
        let seg = primes_in_range(20_000, 30_000);
        let tab: Vec<u64> = t.primes_between(20_000, 30_000).iter().map(|&p| p as u64).collect();
        assert_eq!(seg, tab);
    }

    #[test]
    fn helper_arithmetic() {
        assert_eq!(gcd_u64(12, 18), 6);
        assert_eq!(lcm_u64(4, 6), 12);
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
