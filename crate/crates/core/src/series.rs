//! Partial sums of `S_k = Σ σ_k(n)/n!`, factorial-normalized tail windows and
//! certified decimal expansions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{
    factorial, frac_dist, int, to_decimal, DecimalExpansion, FracDistance, Rational,
};
use crate::divisors::sigma;
use crate::error::{out_of_range, Error, Result};

/// Largest `k` accepted by the series routines.
pub const MAX_K: u32 = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesPartial {
    pub k: u32,
    pub n_terms: u64,
    /// `Σ_{n ≤ n_terms} σ_k(n)/n!`.
    pub value: Rational,
    /// `n_terms! · value`, always an integer.
    pub scaled: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailWindow {
    pub k: u32,
    pub n: u64,
    pub m: u64,
    pub value: Rational,
    pub distance: FracDistance,
}

fn sigma_int(n: u64, k: u32) -> BigInt {
    sigma(n, k as i32).expect("n >= 1").to_integer()
}

fn check_k(k: u32) -> Result<()> {
    if k > MAX_K {
        return Err(out_of_range("k", "<= 10", k));
    }
    Ok(())
}

pub fn partial_sum(k: u32, n_terms: u64) -> Result<SeriesPartial> {
    check_k(k)?;
    if n_terms == 0 {
        return Err(out_of_range("n_terms", ">= 1", 0));
    }
    // T_N = N·T_{N−1} + σ_k(N), with T_N = N!·Σ_{n≤N} σ_k(n)/n!
    let mut scaled = BigInt::zero();
    let mut fact = BigInt::one();
    for n in 1..=n_terms {
        scaled = scaled * n + sigma_int(n, k);
        fact *= n;
    }
    Ok(SeriesPartial {
        k,
        n_terms,
        value: Rational::new(scaled.clone(), fact),
        scaled,
    })
}

/// `(n−1)! · Σ_{ν ≤ n−1} σ_k(ν)/ν!`, summed term by term as rationals.
///
/// Each term `σ_k(ν)(n−1)!/ν!` is integral, so the result has denominator 1.
pub fn tail_integrality(k: u32, n: u64) -> Result<Rational> {
    check_k(k)?;
    if n < 2 {
        return Err(out_of_range("n", ">= 2", n));
    }
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    for nu in 1..n {
        fact *= nu;
        sum += Rational::new(sigma_int(nu, k), fact.clone());
    }
    Ok(sum * int(factorial(n - 1)))
}

/// `Σ_{ν=n}^{n+m−1} σ_k(ν)/(ν)_{ν−n+1}` and its distance to the nearest integer.
pub fn tail_window(k: u32, n: u64, m: u64) -> Result<TailWindow> {
    check_k(k)?;
    if n < 2 {
        return Err(out_of_range("n", ">= 2", n));
    }
    if m == 0 {
        return Err(out_of_range("m", ">= 1", 0));
    }
    let mut value = Rational::zero();
    let mut denom = BigInt::one();
    for nu in n..n + m {
        // (ν)_{ν−n+1} = ν(ν−1)⋯n
        denom *= nu;
        value += Rational::new(sigma_int(nu, k), denom.clone());
    }
    let distance = frac_dist(&value);
    Ok(TailWindow {
        k,
        n,
        m,
        value,
        distance,
    })
}

/// Window of the default length `m = k` (at least one term).
pub fn tail_window_default(k: u32, n: u64) -> Result<TailWindow> {
    tail_window(k, n, u64::from(k.max(1)))
}

/// Smallest `N` whose crude tail bound `Σ_{ν>N} ν^{k+1}/ν!` is provably
/// below `10^-(precision+1)`, together with that bound.
pub fn truncation_index(k: u32, precision: u32) -> (u64, Rational) {
    let target = Rational::new(BigInt::one(), BigInt::from(10u32).pow(precision + 1));
    let mut n = 1u64;
    loop {
        let bound = tail_bound(k, n);
        if let Some(b) = bound {
            if b < target {
                return (n, b);
            }
        }
        n += 1;
    }
}

/// Geometric bound on `Σ_{ν>n} ν^{k+1}/ν!`, available once the term ratio
/// `(ν+1)^k/ν^{k+1}` drops below 1 at `ν = n+1`.
fn tail_bound(k: u32, n: u64) -> Option<Rational> {
    let nu = n + 1;
    let ratio = Rational::new(BigInt::from(nu + 1).pow(k), BigInt::from(nu).pow(k + 1));
    if ratio >= Rational::one() {
        return None;
    }
    let first = Rational::new(BigInt::from(nu).pow(k + 1), factorial(nu));
    Some(first / (Rational::one() - ratio))
}

/// Certified truncated decimal expansion of `S_k`.
///
/// `partial ≤ S_k ≤ partial + tail`; the truncation index grows until both
/// ends truncate to the same string, so the rendered digits are exactly the
/// truncation of `S_k`.
pub fn digits(k: u32, precision: u32) -> Result<DecimalExpansion> {
    check_k(k)?;
    if precision == 0 {
        return Err(out_of_range("precision", ">= 1", 0));
    }
    const MAX_EXTRA: usize = 256;
    let (mut n, _) = truncation_index(k, precision);
    for _ in 0..MAX_EXTRA {
        let tail = tail_bound(k, n).expect("ratio only shrinks as n grows");
        let lower = partial_sum(k, n)?.value;
        let upper = lower.clone() + tail;
        let lo = to_decimal(&lower, i64::from(precision))?;
        let hi = to_decimal(&upper, i64::from(precision))?;
        if lo.digits == hi.digits {
            let error_bound = upper - lo.rendered_value();
            return Ok(DecimalExpansion {
                digits: lo.digits,
                precision,
                error_bound,
            });
        }
        n += 1;
    }
    Err(Error::Unstable(MAX_EXTRA))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use num_traits::ToPrimitive;

    #[test]
    fn partial_sum_examples() {
        let p = partial_sum(1, 3).unwrap();
        assert_eq!(p.value, ratio(19, 6));
        assert_eq!(p.scaled, BigInt::from(19));
        assert_eq!(partial_sum(0, 1).unwrap().value, int(1));
        assert_eq!(partial_sum(3, 2).unwrap().value, ratio(11, 2));
        assert!(partial_sum(11, 3).is_err());
        assert!(partial_sum(1, 0).is_err());
    }

    #[test]
    fn tail_integrality_examples() {
        assert_eq!(tail_integrality(1, 4).unwrap(), int(19));
        for k in 0..=5 {
            assert_eq!(tail_integrality(k, 2).unwrap(), int(1));
        }
        assert_eq!(tail_integrality(0, 5).unwrap(), int(59));
        assert!(tail_integrality(1, 1).is_err());
    }

    #[test]
    fn tail_integrality_is_integral() {
        for k in 0..=5 {
            for n in 2..=60 {
                assert!(tail_integrality(k, n).unwrap().is_integer(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn tail_window_examples() {
        let w = tail_window(1, 3, 2).unwrap();
        assert_eq!(w.value, ratio(23, 12));
        assert_eq!(w.distance.value(), &ratio(1, 12));
        for (k, n) in [(0u32, 5u64), (3, 17), (2, 100)] {
            let single = tail_window(k, n, 1).unwrap();
            assert_eq!(single.value, sigma(n, k as i32).unwrap() / int(n));
        }
        assert_eq!(tail_window_default(3, 13).unwrap().m, 3);
        assert!(tail_window(1, 3, 0).is_err());
    }

    #[test]
    fn telescoping_identity() {
        for k in 0..=4u32 {
            for n in 2..=12u64 {
                for big_n in n..=n + 8 {
                    let lhs = partial_sum(k, big_n).unwrap().value * int(factorial(n - 1))
                        - tail_integrality(k, n).unwrap();
                    let rhs = tail_window(k, n, big_n - n + 1).unwrap().value;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn next_term_beyond_long_window_is_small() {
        // σ_k(n+m)/(n+m)_{m+1} < 1/n once m ≥ k+2
        for k in 0..=5u32 {
            let m = u64::from(k) + 2;
            let mut denom = BigInt::one();
            for j in 2..=m + 2 {
                denom *= j;
            }
            for n in 2..=10_000u64 {
                if n > 2 {
                    // shift the product window n..=n+m by one
                    denom = denom * (n + m) / (n - 1);
                }
                let term = sigma(n + m, k as i32).unwrap() / int(denom.clone());
                assert!(term < ratio(1, n as i64), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn digits_self_consistent() {
        let short = digits(1, 5).unwrap();
        let long = digits(1, 50).unwrap();
        assert_eq!(short.digits, long.digits[..short.digits.len()]);
        let tol = Rational::new(BigInt::one(), BigInt::from(10u32).pow(50));
        assert!(long.error_bound < tol);
        assert!(!long.error_bound.is_zero());
    }

    #[test]
    fn digits_against_float_sum() {
        let d = digits(0, 10).unwrap();
        // independent oracle: 200-term float sum of τ(n)/n!
        let mut term_fact = 1.0f64;
        let mut sum = 0.0f64;
        for n in 1..=200u64 {
            term_fact /= n as f64;
            let tau = (1..=n).filter(|d| n % d == 0).count() as f64;
            sum += tau * term_fact;
        }
        let rendered = d.rendered_value().to_f64().unwrap();
        assert!((rendered - sum).abs() < 1e-8, "{rendered} vs {sum}");
    }

    #[test]
    fn truncation_bound_by_construction() {
        for k in 0..=5u32 {
            for precision in [1u32, 10, 30] {
                let (n, bound) = truncation_index(k, precision);
                let target = Rational::new(BigInt::one(), BigInt::from(10u32).pow(precision + 1));
                assert!(bound < target);
                // direct partial tail, 400 terms past N, stays under the bound
                let mut direct = Rational::zero();
                let mut fact = factorial(n);
                for nu in n + 1..=n + 400 {
                    fact *= nu;
                    direct += Rational::new(BigInt::from(nu).pow(k + 1), fact.clone());
                }
                assert!(direct <= bound);
            }
        }
    }
}
