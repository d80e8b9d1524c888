//! Dense polynomials over a field and the quotient polynomials `P_{k,i}`
//! defined by `(q+i−1)^k / (q+i−1)_i = P_{k,i}(q) + O(1/q)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Zero};
use serde::Serialize;

use crate::arith::{factorial, falling_factorial, frac_dist, int, rational_string, Rational};
use crate::divisors::sigma;
use crate::error::{out_of_range, Error, Result};

/// Dense polynomial; `coeffs[d]` is the coefficient of `x^d`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Num> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc * self.clone())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d_deg = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        let q_len = rem.len().saturating_sub(d_deg);
        let mut quot = vec![T::zero(); q_len];
        for shift in (0..q_len).rev() {
            let c = rem[shift + d_deg].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = rem[shift + j].clone() - c.clone() * dc.clone();
            }
            quot[shift] = c;
        }
        rem.truncate(d_deg);
        (Self::new(quot), Self::new(rem))
    }
}

impl<T: Clone + Num> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Clone + Num> One for Poly<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Clone + Num> Add for Poly<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (mut long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self.coeffs, rhs.coeffs)
        } else {
            (rhs.coeffs, self.coeffs)
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a = a.clone() + b;
        }
        Self::new(long)
    }
}

impl<T: Clone + Num> Neg for Poly<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| T::zero() - c).collect(),
        }
    }
}

impl<T: Clone + Num> Sub for Poly<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Clone + Num> Mul for Poly<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<T: Clone + Num + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{d}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with exact rational coefficients.
pub type RatPoly = Poly<Rational>;

/// `(x+i−1)^k = quotient · D + remainder` with `D(x) = (x+i−1)(x+i−2)⋯x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientDecomposition {
    pub k: u32,
    pub i: u32,
    pub quotient: RatPoly,
    pub remainder: RatPoly,
    pub divisor: RatPoly,
}

impl QuotientDecomposition {
    /// `P_{k,i}(q)`, exact.
    pub fn eval(&self, q: &BigInt) -> Rational {
        self.quotient.eval(&int(q.clone()))
    }

    /// `(x+i−1)^k − quotient·D − remainder`; zero when the decomposition is sound.
    pub fn residual(&self) -> RatPoly {
        shifted_power(self.k, self.i)
            - self.quotient.clone() * self.divisor.clone()
            - self.remainder.clone()
    }

    pub fn record(&self) -> DecompositionRecord {
        let strings = |p: &RatPoly| p.coeffs().iter().map(rational_string).collect();
        DecompositionRecord {
            k: self.k,
            i: self.i,
            quotient: strings(&self.quotient),
            remainder: strings(&self.remainder),
        }
    }
}

/// JSON form: coefficients in ascending degree as `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionRecord {
    pub k: u32,
    pub i: u32,
    pub quotient: Vec<String>,
    pub remainder: Vec<String>,
}

fn shift(i: u32) -> RatPoly {
    RatPoly::x() + RatPoly::constant(int(i64::from(i) - 1))
}

fn shifted_power(k: u32, i: u32) -> RatPoly {
    shift(i).pow(k)
}

pub const MAX_K: u32 = 10;

pub fn derive_quotient(k: u32, i: u32) -> Result<QuotientDecomposition> {
    if k == 0 || k > MAX_K {
        return Err(out_of_range("k", "1..=10", k));
    }
    if i == 0 || i > k {
        return Err(out_of_range("i", "1..=k", i));
    }
    let divisor = falling_factorial(&shift(i), u64::from(i));
    let (quotient, remainder) = shifted_power(k, i).div_rem(&divisor);
    Ok(QuotientDecomposition {
        k,
        i,
        quotient,
        remainder,
        divisor,
    })
}

/// `P_{k,i}(q)` for `q ≥ 1`.
pub fn eval_quotient(dec: &QuotientDecomposition, q: u64) -> Result<Rational> {
    if q == 0 {
        return Err(out_of_range("q", ">= 1", 0));
    }
    Ok(dec.eval(&BigInt::from(q)))
}

/// `(k!)^k`.
pub fn period_modulus(k: u32) -> BigInt {
    factorial(u64::from(k)).pow(k)
}

/// Outcome of comparing `σ_{−k}(i)·P_{k,i}` at two congruent arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodCheck {
    pub holds: bool,
    /// `σ_{−k}(i)(P_{k,i}(q1) − P_{k,i}(q2))`; an integer when `holds`.
    pub difference: Rational,
}

/// Periodicity of the fractional part of `σ_{−k}(i)·P_{k,i}(q)` modulo `(k!)^k`.
pub fn frac_period_check(k: u32, i: u32, q1: u64, q2: u64) -> Result<PeriodCheck> {
    frac_period_check_mod(k, i, q1, q2, &period_modulus(k))
}

/// As [`frac_period_check`] with an explicit modulus.
pub fn frac_period_check_mod(
    k: u32,
    i: u32,
    q1: u64,
    q2: u64,
    modulus: &BigInt,
) -> Result<PeriodCheck> {
    if !(BigInt::from(q1) - BigInt::from(q2)).is_multiple_of(modulus) {
        return Err(Error::Precondition(format!(
            "{q1} and {q2} are not congruent modulo {modulus}"
        )));
    }
    let dec = derive_quotient(k, i)?;
    let weight = sigma(u64::from(i), -(k as i32))?;
    let difference = weight * (eval_quotient(&dec, q1)? - eval_quotient(&dec, q2)?);
    Ok(PeriodCheck {
        holds: frac_dist(&difference).is_zero(),
        difference,
    })
}
