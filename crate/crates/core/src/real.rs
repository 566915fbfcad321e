//! Scalar traits.
//!
//! [`Real`] is the floating-point type the integrators run in (`f32`, `f64`, or
//! any other `num_traits::Float`, such as a double-double type).
//! [`Scalar`] is the smaller ring-like surface a potential needs so that it can
//! be evaluated both on plain reals and on the truncated Taylor types of
//! [`crate::derivop`].

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{Float, NumCast};

/// Floating point type usable by the integrators.
pub trait Real:
    Float
    + Debug
    + Display
    + Default
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// Converts a literal; every literal used in this crate is representable.
    fn lit(x: f64) -> Self {
        // NumCast rather than FromPrimitive: some float crates leave
        // `from_f64` at its truncating default.
        <Self as NumCast>::from(x).expect("literal representable in scalar type")
    }

    /// Converts an exact rational coefficient.
    ///
    /// One residual correction makes the quotient accurate for types whose
    /// division is only good to `f64` precision while multiplication is exact.
    fn from_ratio(r: Ratio<i64>) -> Self {
        let (n, d) = (Self::lit(*r.numer() as f64), Self::lit(*r.denom() as f64));
        let q = n / d;
        q + (n - q * d) / d
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// About 32 significant digits.
#[cfg(feature = "double-double")]
pub type DoubleDouble = twofloat::TwoFloat;

#[cfg(feature = "double-double")]
impl Real for twofloat::TwoFloat {}

/// Arithmetic needed to evaluate a potential on reals or on jets.
///
/// Potentials written against this trait are automatically differentiable by
/// the generic oracle. Only ring operations are required; built-in models are
/// polynomial.
pub trait Scalar<T: Real>:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: T) -> Self;

    fn scale(self, c: T) -> Self;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T: Real> Scalar<T> for T {
    fn constant(c: T) -> Self {
        c
    }

    fn scale(self, c: T) -> Self {
        self * c
    }

    fn powi(&self, n: u32) -> Self {
        Float::powi(*self, n as i32)
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).map(|(&x, &y)| x * y))
}

/// `n / d` in `T`, accurate to the precision of `T`.
pub fn ratio<T: Real>(n: i64, d: i64) -> T {
    T::from_ratio(Ratio::new(n, d))
}

/// `Σ` without requiring `std::iter::Sum`, which foreign float types may lack.
pub fn sum<T: Real>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter().fold(T::zero(), |a, b| a + b)
}

pub(crate) fn sup_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conversion() {
        let r = Ratio::new(17i64, 20160);
        assert!((f64::from_ratio(r) - 17.0 / 20160.0).abs() < 1e-18);
        assert!((f32::from_ratio(Ratio::new(-1, 12)) + 1.0 / 12.0).abs() < 1e-7);
    }

    #[test]
    fn scalar_powi_on_reals() {
        assert_eq!(Scalar::<f64>::powi(&2.0, 3), 8.0);
        assert_eq!(<f64 as Scalar<f64>>::scale(3.0, 0.5), 1.5);
    }

    #[cfg(feature = "double-double")]
    #[test]
    fn double_double_conversions() {
        assert_eq!(DoubleDouble::lit(0.5), twofloat::TwoFloat::from_f64(0.5));
        for (n, d) in [(1, 20), (1, 2000), (-17, 20160), (1, 3)] {
            let q: DoubleDouble = ratio(n, d);
            let resid = q * DoubleDouble::lit(d as f64) - DoubleDouble::lit(n as f64);
            assert!(resid.abs() < DoubleDouble::lit(1e-30), "{n}/{d}");
        }
    }
}
