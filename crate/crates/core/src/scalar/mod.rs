//! Scalar substrate: complex doubles, exact complex numbers over Q and Q(√2),
//! and truncated multivariate jets.

mod exact;
mod jet;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};

pub use exact::{exact_to_c64, rat, rc, ExactComplex, QSqrt2, RationalComplex};
pub use jet::Jet;

/// Ring operations shared by every matrix entry type.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
}

impl<T> Scalar for Complex<T>
where
    T: Clone + Num + Neg<Output = T> + Debug,
{
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }

    fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Scalars that admit the analytic operations group functions need
/// (principal log, rational powers) on top of ring arithmetic.
///
/// A [`Jet`] with zero variables behaves exactly like a [`Complex64`], so group
/// functions written against this trait evaluate numerically and
/// differentiate through the same code.
pub trait Analytic: Scalar {
    fn constant(z: Complex64) -> Self;

    /// Base (order-0) value.
    fn value(&self) -> Complex64;

    fn scale(&self, c: Complex64) -> Self;

    fn ln(&self) -> Result<Self>;

    fn powq(&self, a: &BigRational) -> Result<Self>;

    fn recip(&self) -> Result<Self>;
}

pub(crate) fn rational_to_f64(a: &BigRational) -> f64 {
    a.to_f64().unwrap_or(f64::NAN)
}

fn integer_power<S: Scalar>(x: &S, a: &BigRational) -> Option<S> {
    if !a.is_integer() {
        return None;
    }
    let e = a.to_integer().to_i64()?;
    let mut base = x.clone();
    let mut acc = S::one();
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        k >>= 1;
    }
    (e >= 0).then_some(acc)
}

impl Analytic for Complex64 {
    fn constant(z: Complex64) -> Self {
        z
    }

    fn value(&self) -> Complex64 {
        *self
    }

    fn scale(&self, c: Complex64) -> Self {
        self * c
    }

    fn ln(&self) -> Result<Self> {
        if *self == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("log of zero".into()));
        }
        Ok(Complex64::ln(*self))
    }

    fn powq(&self, a: &BigRational) -> Result<Self> {
        if let Some(p) = integer_power(self, a) {
            return Ok(p);
        }
        if *self == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("zero raised to power {a}")));
        }
        Ok((Complex64::ln(*self) * rational_to_f64(a)).exp())
    }

    fn recip(&self) -> Result<Self> {
        if *self == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Complex64::new(1.0, 0.0) / self)
    }
}
