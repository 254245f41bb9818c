use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use smallvec::{smallvec, SmallVec};

use super::{integer_power, rational_to_f64, Analytic, Scalar};
use crate::error::{Error, Result};

type Coeffs = SmallVec<[Complex64; 9]>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated Taylor polynomial in `k` nilpotent variables `t_0..t_{k-1}` with
/// `t_i³ = 0`, i.e. each variable appears with degree at most two.
///
/// The coefficient of `Π t_i^{d_i}` is stored at index `Σ d_i·3^i`, so the
/// last variable is the most significant base-3 digit and a jet in fewer
/// variables is a prefix of its promotion.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: usize,
    coeffs: Coeffs,
}

fn pow3(k: usize) -> usize {
    3usize.pow(k as u32)
}

/// Base-3 addition of two multi-indices has no carry iff every variable's
/// combined degree stays ≤ 2.
#[inline]
fn no_carry(mut i: usize, mut j: usize) -> bool {
    while i > 0 && j > 0 {
        if i % 3 + j % 3 > 2 {
            return false;
        }
        i /= 3;
        j /= 3;
    }
    true
}

impl Jet {
    pub fn constant(value: Complex64) -> Self {
        Jet { nvars: 0, coeffs: smallvec![value] }
    }

    /// `base + t_var` in `nvars` variables.
    pub fn variable(base: Complex64, var: usize, nvars: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range for {nvars} variables");
        let mut j = Jet::constant(base).promoted(nvars);
        j.coeffs[pow3(var)] = Complex64::new(1.0, 0.0);
        j
    }

    /// Univariate jet `c0 + c1·t + c2·t²`.
    pub fn univariate(c0: Complex64, c1: Complex64, c2: Complex64) -> Self {
        Jet { nvars: 1, coeffs: smallvec![c0, c1, c2] }
    }

    pub fn from_coeffs(nvars: usize, coeffs: &[Complex64]) -> Self {
        assert_eq!(coeffs.len(), pow3(nvars), "coefficient count must be 3^nvars");
        Jet { nvars, coeffs: coeffs.iter().copied().collect() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `Π t_i^{degrees[i]}`; missing trailing degrees are zero.
    pub fn coeff(&self, degrees: &[usize]) -> Complex64 {
        let mut idx = 0;
        for (i, &d) in degrees.iter().enumerate() {
            assert!(d <= 2, "degree {d} exceeds truncation order");
            if d > 0 && i >= self.nvars {
                return ZERO;
            }
            idx += d * pow3(i);
        }
        self.coeffs[idx]
    }

    pub fn promoted(&self, nvars: usize) -> Self {
        if nvars <= self.nvars {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(pow3(nvars), ZERO);
        Jet { nvars, coeffs }
    }

    /// The coefficient of `t_last^degree`, as a jet in the remaining variables.
    pub fn last_var_coeff(&self, degree: usize) -> Jet {
        assert!(self.nvars > 0, "constant jet has no variables");
        assert!(degree <= 2);
        let stride = pow3(self.nvars - 1);
        Jet {
            nvars: self.nvars - 1,
            coeffs: self.coeffs[degree * stride..(degree + 1) * stride].iter().copied().collect(),
        }
    }

    /// `self · t_var^degree`, where `self` does not depend on `t_var` or later variables.
    pub fn times_new_var(&self, var: usize, degree: usize, nvars: usize) -> Jet {
        assert!(self.nvars <= var && var < nvars && degree <= 2);
        let mut out = Jet::constant(ZERO).promoted(nvars);
        let shift = degree * pow3(var);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i + shift] = *c;
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| *c == ZERO)
    }

    fn aligned(a: &Jet, b: &Jet) -> (Jet, Jet) {
        let n = a.nvars.max(b.nvars);
        (a.promoted(n), b.promoted(n))
    }

    /// Nilpotent part divided by the base value, `u = (x − x₀)/x₀`.
    fn relative_increment(&self) -> Result<(Complex64, Jet)> {
        let x0 = self.coeffs[0];
        if x0 == ZERO {
            return Err(Error::Domain(format!(
                "jet base value is zero (jet with {} variables)",
                self.nvars
            )));
        }
        let mut u = self.scale(Complex64::new(1.0, 0.0) / x0);
        u.coeffs[0] = ZERO;
        Ok((x0, u))
    }

    /// Σ_{m≥0} w_m u^m; the series terminates because u^{2k+1} = 0.
    fn nilpotent_series(u: &Jet, weight: impl Fn(usize) -> Complex64) -> Jet {
        let mut acc = Jet::constant(weight(0)).promoted(u.nvars);
        let mut power = Jet::constant(Complex64::new(1.0, 0.0)).promoted(u.nvars);
        for m in 1..=2 * u.nvars {
            power = power * u.clone();
            if power.coeffs.iter().all(|c| *c == ZERO) {
                break;
            }
            acc = acc + power.scale(weight(m));
        }
        acc
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let (mut a, b) = if self.nvars >= o.nvars { (self, o) } else { (o, self) };
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        if self.nvars == 0 {
            return o.scale(self.coeffs[0]);
        }
        if o.nvars == 0 {
            return self.scale(o.coeffs[0]);
        }
        let (a, b) = Jet::aligned(&self, &o);
        let mut out: Coeffs = smallvec![ZERO; a.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == ZERO {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if *y != ZERO && no_carry(i, j) {
                    out[i + j] += x * y;
                }
            }
        }
        Jet { nvars: a.nvars, coeffs: out }
    }
}

impl Scalar for Jet {
    fn zero() -> Self {
        Jet::constant(ZERO)
    }

    fn one() -> Self {
        Jet::constant(Complex64::new(1.0, 0.0))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Conjugates every coefficient (the variables are real parameters).
    fn conj(&self) -> Self {
        Jet { nvars: self.nvars, coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }
}

impl Analytic for Jet {
    fn constant(z: Complex64) -> Self {
        Jet::constant(z)
    }

    fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn scale(&self, c: Complex64) -> Self {
        Jet { nvars: self.nvars, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    fn ln(&self) -> Result<Self> {
        let (x0, u) = self.relative_increment()?;
        // log(x₀(1+u)) = log x₀ + Σ (−1)^{m+1} u^m / m
        let mut out = Jet::nilpotent_series(&u, |m| {
            if m == 0 {
                ZERO
            } else {
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                Complex64::new(sign / m as f64, 0.0)
            }
        });
        out.coeffs[0] = x0.ln();
        Ok(out)
    }

    fn powq(&self, a: &BigRational) -> Result<Self> {
        if let Some(p) = integer_power(self, a) {
            return Ok(p);
        }
        let (x0, u) = self.relative_increment()?;
        let af = rational_to_f64(a);
        // (1+u)^a = Σ binom(a, m) u^m
        let series = Jet::nilpotent_series(&u, |m| {
            let mut c = 1.0;
            for i in 0..m {
                c *= (af - i as f64) / (i + 1) as f64;
            }
            Complex64::new(c, 0.0)
        });
        Ok(series.scale((x0.ln() * af).exp()))
    }

    fn recip(&self) -> Result<Self> {
        let (x0, u) = self.relative_increment()?;
        let series = Jet::nilpotent_series(&u, |m| {
            Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        });
        Ok(series.scale(Complex64::new(1.0, 0.0) / x0))
    }
}
