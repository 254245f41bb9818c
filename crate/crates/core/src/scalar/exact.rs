use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Complex number with exact rational parts.
pub type RationalComplex = Complex<BigRational>;

/// Complex number whose parts live in Q(√2).
pub type ExactComplex = Complex<QSqrt2>;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rc(re: BigRational, im: BigRational) -> RationalComplex {
    Complex::new(re, im)
}

/// An element `a + b·√2` of the real quadratic field Q(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QSqrt2 { a, b: BigRational::zero() }
    }

    pub fn sqrt2() -> Self {
        QSqrt2 { a: BigRational::zero(), b: BigRational::one() }
    }

    /// 1/√2 = √2/2.
    pub fn inv_sqrt2() -> Self {
        QSqrt2 { a: BigRational::zero(), b: rat(1, 2) }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Field norm a² − 2b²; zero only for the zero element.
    fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(2.into()) * &self.b * &self.b
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt2", self.b),
            (false, false) => write!(f, "{}+{}*sqrt2", self.a, self.b),
        }
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(2.into());
        QSqrt2 {
            a: &self.a * &o.a + two * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Div for QSqrt2 {
    type Output = QSqrt2;
    fn div(self, o: QSqrt2) -> QSqrt2 {
        let n = o.norm();
        let conj = QSqrt2 { a: o.a / &n, b: -o.b / &n };
        self * conj
    }
}

impl Rem for QSqrt2 {
    type Output = QSqrt2;
    /// Q(√2) is a field, so every division is exact.
    fn rem(self, _o: QSqrt2) -> QSqrt2 {
        QSqrt2::zero()
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { a: -self.a, b: -self.b }
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        QSqrt2 { a: BigRational::zero(), b: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        QSqrt2 { a: BigRational::one(), b: BigRational::zero() }
    }
}

impl Num for QSqrt2 {
    type FromStrRadixErr = num_rational::ParseRatioError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(QSqrt2::rational)
    }
}

impl QSqrt2 {
    pub fn is_negative(&self) -> bool {
        // sign of a + b√2 without leaving exact arithmetic
        match (self.a.is_negative(), self.b.is_negative()) {
            (true, true) => true,
            (false, false) => false,
            _ => {
                let two = BigRational::from_integer(2.into());
                let lhs = &self.a * &self.a;
                let rhs = two * &self.b * &self.b;
                if self.a.is_negative() { lhs > rhs } else { rhs > lhs }
            }
        }
    }
}

pub fn exact_to_c64(z: &ExactComplex) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.re.to_f64(), z.im.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let s = QSqrt2::sqrt2();
        assert_eq!(s.clone() * s, QSqrt2::rational(rat(2, 1)));
        let h = QSqrt2::inv_sqrt2();
        assert_eq!(h.clone() * h, QSqrt2::rational(rat(1, 2)));
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = QSqrt2::new(rat(3, 7), rat(-2, 5));
        let y = QSqrt2::new(rat(1, 3), rat(4, 9));
        assert_eq!((x.clone() * y.clone()) / y, x);
    }

    #[test]
    fn sign_detection() {
        assert!(QSqrt2::new(rat(1, 1), rat(-1, 1)).is_negative());
        assert!(!QSqrt2::new(rat(-1, 1), rat(1, 1)).is_negative());
        assert!(!QSqrt2::new(rat(3, 2), rat(-1, 1)).is_negative());
    }

    #[test]
    fn rationals_are_normalized() {
        let x = rat(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
    }
}
