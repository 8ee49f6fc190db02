//! Scalar abstraction shared by every numerical module.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Everything needed from the number type comes from nalgebra's `RealField`
/// (transcendental functions, ordering, constants) plus num-traits
/// conversions. Extended reals are represented by IEEE infinities.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding if needed.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite or infinite f64 literal is always representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize is always representable")
    }

    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }

    fn neg_infinity() -> Self {
        Self::lit(f64::NEG_INFINITY)
    }

    fn is_pos_infinite(self) -> bool {
        !self.is_finite() && self > Self::zero()
    }

    fn is_neg_infinite(self) -> bool {
        !self.is_finite() && self < Self::zero()
    }

    /// Lossy conversion for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the type.
    fn machine_eps() -> Self {
        Self::default_epsilon()
    }

    /// `max(target, factor * machine_eps)`: a requested tolerance that is
    /// never tighter than the type can resolve.
    fn tol(target: f64, factor: f64) -> Self {
        let floor = Self::machine_eps() * Self::lit(factor);
        Self::lit(target).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

pub(crate) fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `log2(exp2(a) + exp2(b))` without overflow; `-inf` is the additive identity.
pub fn log2_add_exp2<T: Real>(a: T, b: T) -> T {
    if a.is_neg_infinite() {
        return b;
    }
    if b.is_neg_infinite() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (T::one() + (lo - hi).exp2()).log2()
}

/// Stable `log2(sum_i exp2(x_i))`. Empty input gives `-inf`.
pub fn log2_sum_exp2<T: Real, I: IntoIterator<Item = T>>(terms: I) -> T {
    let terms: Vec<T> = terms.into_iter().collect();
    let max = terms
        .iter()
        .copied()
        .fold(T::neg_infinity(), |m, x| if x > m { x } else { m });
    if max.is_neg_infinite() {
        return max;
    }
    let sum = terms
        .iter()
        .fold(T::zero(), |acc, &x| acc + (x - max).exp2());
    max + sum.log2()
}

/// `-x log2 x` with `0 log 0 = 0`.
pub fn eta<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}
