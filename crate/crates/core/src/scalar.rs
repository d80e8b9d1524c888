//! Scalar abstraction for the point-set computations: `f32`, `f64`, or the
//! exact [`Rational`].

use std::fmt::Debug;

use num_traits::{Num, ToPrimitive};

use crate::arith::{frac_part, int, Rational};

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    fn from_count(n: usize) -> Self;

    /// Nearest representable value; exact for [`Rational`].
    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// `{h·x}` as `f64`; the product is reduced exactly for [`Rational`].
    fn frac_of_multiple(&self, h: u64) -> f64;
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_count(n: usize) -> Self {
                n as $t
            }

            fn from_rational(r: &Rational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                f64::from(*self)
            }

            fn frac_of_multiple(&self, h: u64) -> f64 {
                let v = f64::from(*self) * h as f64;
                v - v.floor()
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Rational {
    fn from_count(n: usize) -> Self {
        int(n)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn frac_of_multiple(&self, h: u64) -> f64 {
        let v = frac_part(&(self.clone() * int(h)));
        ToPrimitive::to_f64(&v).unwrap_or(f64::NAN)
    }
}
