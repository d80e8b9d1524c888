//! Slow reference implementations, kept independent of the production code
//! paths they are used to check.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{int, Rational};
use crate::scalar::Scalar;

pub use crate::divisors::is_prime_by_trial_division;

/// `Σ_{d|n} d^k` by scanning every `d ≤ n`.
pub fn sigma_by_enumeration(n: u64, k: i32) -> Rational {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| {
            let pow = BigInt::from(d).pow(k.unsigned_abs());
            if k >= 0 {
                int(pow)
            } else {
                Rational::new(BigInt::one(), pow)
            }
        })
        .sum()
}

/// Star discrepancy by testing every interval `[0, t)` and `[0, t]` with `t`
/// a sample point or 1, counting members directly. `O(N²)`.
pub fn star_discrepancy_brute<S: Scalar>(points: &[S]) -> S {
    let n = S::from_count(points.len());
    let mut best = S::zero();
    let mut consider = |count: usize, t: &S| {
        let frac = S::from_count(count) / n.clone();
        let d = if frac > *t {
            frac - t.clone()
        } else {
            t.clone() - frac
        };
        if d > best {
            best = d;
        }
    };
    let mut ends: Vec<S> = points.to_vec();
    ends.push(S::one());
    for t in &ends {
        let open = points.iter().filter(|x| *x < t).count();
        let closed = points.iter().filter(|x| *x <= t).count();
        consider(open, t);
        consider(closed, t);
    }
    best
}

/// `|Σ e(h·x_n)|` summed in reverse order with per-term phases reduced by
/// the scalar, as an independent summation order.
pub fn exp_sum_reverse<S: Scalar>(points: &[S], h: u64) -> f64 {
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for x in points.iter().rev() {
        let theta = TAU * x.frac_of_multiple(h);
        re += theta.cos();
        im += theta.sin();
    }
    re.hypot(im)
}

/// Exact central difference `Δ^j g(n) / s^j` of `g(m) = α/m²` with step `s`.
pub fn central_difference_reciprocal_square(
    alpha: &Rational,
    j: u32,
    n: &Rational,
    step: &Rational,
) -> Rational {
    let g = |m: Rational| alpha.clone() / (m.clone() * m);
    let half_j = Rational::new(BigInt::from(j), BigInt::from(2));
    let mut acc = Rational::zero();
    let mut binom = BigInt::one();
    for m in 0..=j {
        let offset = (half_j.clone() - int(m)) * step.clone();
        let term = g(n.clone() + offset) * int(binom.clone());
        if m % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        binom = binom * (j - m) / (m + 1);
    }
    let mut denom = Rational::one();
    for _ in 0..j {
        denom *= step.clone();
    }
    acc / denom
}
