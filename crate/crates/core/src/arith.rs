//! Exact arithmetic substrate: rationals, nearest-integer distance,
//! falling factorials, truncated decimal rendering and exact comparisons
//! against fractional powers.

use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{out_of_range, Result};

/// Arbitrary-precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shorthand for an exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Distance of a rational to the nearest integer, always in `[0, 1/2]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FracDistance<T: Clone + Integer = BigInt> {
    value: Ratio<T>,
}

impl<T: Clone + Integer> FracDistance<T> {
    pub fn value(&self) -> &Ratio<T> {
        &self.value
    }

    pub fn into_value(self) -> Ratio<T> {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl<T: Clone + Integer + fmt::Display> fmt::Display for FracDistance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `‖x‖ = min_m |x − m|`, computed exactly. Ties (`x ≡ 1/2`) give exactly 1/2.
pub fn frac_dist<T: Clone + Integer + Signed>(x: &Ratio<T>) -> FracDistance<T> {
    let f = frac_part(x);
    let g = Ratio::one() - f.clone();
    FracDistance {
        value: if g < f { g } else { f },
    }
}

/// Fractional part `{x} = x − ⌊x⌋`, in `[0, 1)` for every sign of `x`.
pub fn frac_part<T: Clone + Integer>(x: &Ratio<T>) -> Ratio<T> {
    x.clone() - x.floor()
}

/// `(x)_m = x (x−1) ⋯ (x−m+1)`, the empty product for `m = 0`.
///
/// Works over any ring-like type, so the same routine builds both integer
/// falling factorials and the falling-factorial divisor polynomial.
pub fn falling_factorial<T>(x: &T, m: u64) -> T
where
    T: Clone + One + Mul<Output = T> + Sub<Output = T>,
{
    let mut acc = T::one();
    let mut cur = x.clone();
    for _ in 0..m {
        acc = acc * cur.clone();
        cur = cur - T::one();
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// Truncated decimal rendering of an exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalExpansion {
    pub digits: String,
    pub precision: u32,
    /// `|rendered − true| ≤ error_bound ≤ 10^-precision`.
    pub error_bound: Rational,
}

impl DecimalExpansion {
    /// The rendered string as an exact rational.
    pub fn rendered_value(&self) -> Rational {
        parse_decimal(&self.digits).expect("rendered decimals always parse")
    }
}

impl fmt::Display for DecimalExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digits)
    }
}

/// Render `x` truncated (toward zero) to `digits` fractional digits.
pub fn to_decimal(x: &Rational, digits: i64) -> Result<DecimalExpansion> {
    if digits < 1 {
        return Err(out_of_range("digits", ">= 1", digits));
    }
    let precision =
        u32::try_from(digits).map_err(|_| out_of_range("digits", "<= u32::MAX", digits))?;
    let scale = BigInt::from(10u32).pow(precision);
    let magnitude = x.abs();
    let scaled = (magnitude.clone() * int(scale.clone()))
        .trunc()
        .to_integer();
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    let digits_str = format!("{sign}{whole}.{frac:0>width$}", width = precision as usize);
    let error_bound = magnitude - Rational::new(scaled, scale);
    Ok(DecimalExpansion {
        digits: digits_str,
        precision,
        error_bound,
    })
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let value = Rational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -value } else { value })
}

/// Parse `"a/b"` or `"a"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `"num/den"` form used in every serialized report.
pub fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Exact integer power of a rational.
pub fn rational_pow(x: &Rational, e: u32) -> Rational {
    Rational::new_raw(x.numer().pow(e), x.denom().pow(e))
}

/// `scale · base^exponent` with a rational exponent, compared exactly
/// against rationals by clearing the exponent's denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerBound {
    pub scale: Rational,
    pub base: BigInt,
    pub exponent: Rational,
}

impl PowerBound {
    pub fn new(scale: Rational, base: impl Into<BigInt>, exponent: Rational) -> Self {
        let base = base.into();
        assert!(base.is_positive(), "power bound base must be positive");
        assert!(scale.is_positive(), "power bound scale must be positive");
        PowerBound {
            scale,
            base,
            exponent,
        }
    }

    /// `base^exponent` with unit scale.
    pub fn power(base: impl Into<BigInt>, exponent: Rational) -> Self {
        Self::new(Rational::one(), base, exponent)
    }

    /// Exact `x ≤ bound`.
    pub fn admits(&self, x: &Rational) -> bool {
        if !x.is_positive() {
            return true;
        }
        let c = self
            .exponent
            .denom()
            .to_u32()
            .expect("exponent denominator fits in u32");
        let a = self.exponent.numer();
        let lhs = rational_pow(x, c);
        let rhs = rational_pow(&self.scale, c);
        let a_abs = a.abs().to_u32().expect("exponent numerator fits in u32");
        let base_pow = int(self.base.pow(a_abs));
        if a.is_negative() {
            lhs * base_pow <= rhs
        } else {
            lhs <= rhs * base_pow
        }
    }

    /// Exact `x > bound`.
    pub fn exceeded_by(&self, x: &Rational) -> bool {
        !self.admits(x)
    }

    pub fn approx(&self) -> f64 {
        let s = self.scale.to_f64().unwrap_or(f64::NAN);
        let b = self.base.to_f64().unwrap_or(f64::NAN);
        let e = self.exponent.to_f64().unwrap_or(f64::NAN);
        s * b.powf(e)
    }
}

impl fmt::Display for PowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale.is_one() {
            write!(f, "{}^({})", self.base, self.exponent)
        } else {
            write!(f, "{}*{}^({})", self.scale, self.base, self.exponent)
        }
    }
}
