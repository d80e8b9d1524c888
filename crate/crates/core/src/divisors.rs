//! Factorization and divisor-power sums for 64-bit integers.
//!
//! Trial division runs over a prime table up to 10^6 (built once); cofactors
//! left over are split with deterministic Miller–Rabin and Brent's variant of
//! Pollard's rho.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{int, Rational};
use crate::error::{out_of_range, Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::with_capacity(78_498);
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Prime factorization with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn least_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// `σ_k(n)` for any integer `k`, exact.
    pub fn sigma(&self, k: i32) -> Rational {
        let positive = sigma_nonneg(&self.factors, k.unsigned_abs());
        if k >= 0 {
            int(positive)
        } else {
            Rational::new(positive, BigInt::from(self.n).pow(k.unsigned_abs()))
        }
    }
}

fn sigma_nonneg(factors: &[(u64, u32)], k: u32) -> BigInt {
    factors.iter().fold(BigInt::one(), |acc, &(p, e)| {
        let pk = BigInt::from(p).pow(k);
        // 1 + p^k + p^{2k} + ... + p^{ek}
        let mut term = BigInt::one();
        let mut sum = BigInt::one();
        for _ in 0..e {
            term *= &pk;
            sum += &term;
        }
        acc * sum
    })
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(out_of_range("n", ">= 1", 0));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        let p = u64::from(p);
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        let mut large = Vec::new();
        split_into(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { n, factors })
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality by plain trial division over odd candidates.
///
/// Slow and independent of both the sieve and Miller–Rabin; used to
/// re-verify sieve output.
pub fn is_prime_by_trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of an odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// `σ_k(n) = Σ_{d|n} d^k`; negative `k` yields the exact rational `σ_{−|k|}`.
pub fn sigma(n: u64, k: i32) -> Result<Rational> {
    Ok(factorize(n)?.sigma(k))
}

/// `P⁻(n)`, the least prime factor.
pub fn least_prime_factor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(out_of_range("n", ">= 2", n));
    }
    for &p in small_primes() {
        let p = u64::from(p);
        if p * p > n {
            return Ok(n);
        }
        if n % p == 0 {
            return Ok(p);
        }
    }
    let f = factorize(n)?;
    Ok(f.least_prime().expect("n >= 2 has a prime factor"))
}

/// True iff no prime square divides `n`. Zero is not squarefree.
pub fn is_squarefree(n: u64) -> bool {
    match factorize(n) {
        Ok(f) => f.is_squarefree(),
        Err(_) => false,
    }
}

/// `σ_3(n)` from a squarefree prime list, without refactoring.
pub(crate) fn sigma3_squarefree(primes: &[u64]) -> BigInt {
    primes.iter().fold(BigInt::one(), |acc, &p| {
        acc * (BigInt::from(p).pow(3) + 1u32)
    })
}

/// Distinct primes of a squarefree `n`, rejecting non-squarefree input.
pub fn squarefree_primes(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree(n));
    }
    Ok(f.primes().collect())
}
