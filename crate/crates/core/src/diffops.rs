//! Laplace–Beltrami operator τ, conformality operator κ and iterated τ^p on
//! matrix groups, evaluated exactly through jets along `t ↦ x·exp(tZ)`.
//!
//! For a nilpotent jet variable `t` (t³ = 0) the one-parameter subgroup is the
//! polynomial `I + tZ + t²Z²/2`, so no series truncation enters the
//! derivatives. Left-invariant fields of a bi-invariant (or naturally
//! reductive, for `Z ∈ m`) metric satisfy `∇_Z Z = 0`, hence
//! `τ(f) = Σ_Z Z²(f)` over an orthonormal basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::AlgebraBasis;
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{Analytic, Jet, Scalar};

/// Default cap on `(dim basis)^p` jet evaluations.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// A scalar function on a matrix group, polymorphic in the entry type so that
/// feeding jets yields the jet of the composition.
pub trait GroupFunction: Sync {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S>;

    /// Whether the function is claimed to be right-invariant under the isotropy subgroup.
    fn k_invariant(&self) -> bool {
        false
    }
}

impl<F: GroupFunction> GroupFunction for &F {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S> {
        (**self).eval(x)
    }
    fn k_invariant(&self) -> bool {
        (**self).k_invariant()
    }
}

/// The coordinate function `x ↦ x_{jα}` (1-based indices).
#[derive(Clone, Copy, Debug)]
pub struct Coordinate {
    pub j: usize,
    pub alpha: usize,
}

impl GroupFunction for Coordinate {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S> {
        if self.j == 0 || self.alpha == 0 || self.j > x.rows() || self.alpha > x.cols() {
            return Err(Error::Usage(format!(
                "coordinate ({}, {}) outside {}x{} matrix",
                self.j,
                self.alpha,
                x.rows(),
                x.cols()
            )));
        }
        Ok(x[(self.j - 1, self.alpha - 1)].clone())
    }
}

/// `x ↦ trace(x)`.
#[derive(Clone, Copy, Debug)]
pub struct Trace;

impl GroupFunction for Trace {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S> {
        x.trace()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub Complex64);

impl GroupFunction for Constant {
    fn eval<S: Analytic>(&self, _x: &Matrix<S>) -> Result<S> {
        Ok(S::constant(self.0))
    }
    fn k_invariant(&self) -> bool {
        true
    }
}

/// Point-wise product of two group functions.
#[derive(Clone, Copy, Debug)]
pub struct Product<F, G>(pub F, pub G);

impl<F: GroupFunction, G: GroupFunction> GroupFunction for Product<F, G> {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S> {
        Ok(self.0.eval(x)? * self.1.eval(x)?)
    }
}

/// `x·(I + tZ + t²Z²/2)` with `t` the jet variable `var`; entries of `x` must
/// not depend on `var` or later variables.
fn along(x: &Matrix<Jet>, z: &CMatrix, var: usize) -> Result<Matrix<Jet>> {
    let xz = x.mul_const(z)?;
    let xzz = xz.mul_const(&z.scale_re(0.5))?;
    let nvars = var + 1;
    Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
        x[(i, j)].promoted(nvars)
            + xz[(i, j)].times_new_var(var, 1, nvars)
            + xzz[(i, j)].times_new_var(var, 2, nvars)
    }))
}

fn with_direction(err: Error, idx: usize) -> Error {
    match err {
        Error::Domain(msg) => Error::Domain(format!("{msg} (basis direction {idx})")),
        other => other,
    }
}

/// `(f(x), Z(f)(x), Z²(f)(x))`: value, first and second derivative of
/// `t ↦ f(x·exp(tZ))` at `t = 0`.
pub fn directional_jet<F: GroupFunction>(f: &F, x: &CMatrix, z: &CMatrix) -> Result<(Complex64, Complex64, Complex64)> {
    let j = f.eval(&along(&Matrix::<Jet>::lift(x), z, 0)?)?.promoted(1);
    Ok((j.coeff(&[0]), j.coeff(&[1]), j.coeff(&[2]) * 2.0))
}

/// First and second derivatives of the matrix-valued map `F` along every basis
/// direction: entry `i` holds `(Z_i(F)(x), Z_i²(F)(x))`. With `F` the identity
/// these are the derivatives of all coordinate functions at once.
pub fn matrix_map_derivatives(
    x: &CMatrix,
    basis: &AlgebraBasis,
    map: impl Fn(&Matrix<Jet>) -> Result<Matrix<Jet>>,
) -> Result<Vec<(CMatrix, CMatrix)>> {
    let lifted = Matrix::<Jet>::lift(x);
    basis
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let m = map(&along(&lifted, z, 0)?).map_err(|e| with_direction(e, idx))?;
            let d1 = m.map(|j| j.promoted(1).coeff(&[1]));
            let d2 = m.map(|j| j.promoted(1).coeff(&[2]) * 2.0);
            Ok((d1, d2))
        })
        .collect()
}

fn check_budget(dirs: usize, p: usize, budget: u128) -> Result<()> {
    let required = (dirs as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

/// Σ_Z Z²(τ^{p−1} f) evaluated at a jet-valued point whose entries use
/// variables `0..depth`.
fn laplacian_power<F: GroupFunction>(f: &F, x: &Matrix<Jet>, depth: usize, dirs: &[CMatrix], p: usize) -> Result<Jet> {
    if p == 0 {
        return f.eval(x);
    }
    let mut acc = Jet::zero();
    for (idx, z) in dirs.iter().enumerate() {
        let y = along(x, z, depth)?;
        let inner = laplacian_power(f, &y, depth + 1, dirs, p - 1).map_err(|e| with_direction(e, idx))?;
        acc = acc + inner.promoted(depth + 1).last_var_coeff(2).scale(Complex64::new(2.0, 0.0));
    }
    Ok(acc)
}

/// `τ^p(f)(x)` using nested jet variables, one per application of τ.
pub fn tau_iterated_with_budget<F: GroupFunction>(
    f: &F,
    x: &CMatrix,
    basis: &AlgebraBasis,
    p: usize,
    budget: u128,
) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::Usage("tau_iterated needs p >= 1".into()));
    }
    check_budget(basis.len(), p, budget)?;
    Ok(laplacian_power(f, &Matrix::<Jet>::lift(x), 0, &basis.elements, p)?.value())
}

pub fn tau_iterated<F: GroupFunction>(f: &F, x: &CMatrix, basis: &AlgebraBasis, p: usize) -> Result<Complex64> {
    tau_iterated_with_budget(f, x, basis, p, DEFAULT_BUDGET)
}

/// `τ(f)(x) = Σ_Z Z²(f)(x)`.
pub fn tau<F: GroupFunction>(f: &F, x: &CMatrix, basis: &AlgebraBasis) -> Result<Complex64> {
    tau_iterated(f, x, basis, 1)
}

/// `κ(f, g)(x) = Σ_Z Z(f)(x)·Z(g)(x)`, complex bilinear.
pub fn kappa<F: GroupFunction, G: GroupFunction>(f: &F, g: &G, x: &CMatrix, basis: &AlgebraBasis) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, z) in basis.iter().enumerate() {
        let (_, df, _) = directional_jet(f, x, z).map_err(|e| with_direction(e, idx))?;
        let (_, dg, _) = directional_jet(g, x, z).map_err(|e| with_direction(e, idx))?;
        acc += df * dg;
    }
    Ok(acc)
}

/// `(f(x), τ(f)(x), κ(f, f)(x))` from a single jet evaluation per direction.
pub fn tau_and_kappa<F: GroupFunction>(f: &F, x: &CMatrix, basis: &AlgebraBasis) -> Result<(Complex64, Complex64, Complex64)> {
    let value = f.eval(x)?;
    let mut t = Complex64::new(0.0, 0.0);
    let mut k = Complex64::new(0.0, 0.0);
    for (idx, z) in basis.iter().enumerate() {
        let (_, d1, d2) = directional_jet(f, x, z).map_err(|e| with_direction(e, idx))?;
        t += d2;
        k += d1 * d1;
    }
    Ok((value, t, k))
}

fn sign_factor(sign: i8) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::Usage(format!("sign must be +1 or -1, got {sign}"))),
    }
}

/// `sign·Σ_{Z ∈ m}` second derivative of `f` along `x·exp(t·iZ)`.
///
/// With `sign = +1` this is the Laplacian of the non-compact dual (the
/// directions `i·m` are orthonormal there); with `sign = −1` it recovers the
/// compact Laplacian of a holomorphic `f`.
pub fn tau_subspace<F: GroupFunction>(f: &F, x: &CMatrix, m_basis: &AlgebraBasis, sign: i8) -> Result<Complex64> {
    tau_subspace_iterated(f, x, m_basis, sign, 1, DEFAULT_BUDGET)
}

pub fn tau_subspace_iterated<F: GroupFunction>(
    f: &F,
    x: &CMatrix,
    m_basis: &AlgebraBasis,
    sign: i8,
    p: usize,
    budget: u128,
) -> Result<Complex64> {
    let s = sign_factor(sign)?;
    let v = tau_iterated_with_budget(f, x, &m_basis.times_i(), p, budget)?;
    Ok(v * s.powi(p as i32))
}

/// `sign·Σ_{Z ∈ m} (iZ)(f)·(iZ)(g)`.
pub fn kappa_subspace<F: GroupFunction, G: GroupFunction>(
    f: &F,
    g: &G,
    x: &CMatrix,
    m_basis: &AlgebraBasis,
    sign: i8,
) -> Result<Complex64> {
    Ok(kappa(f, g, x, &m_basis.times_i())? * sign_factor(sign)?)
}
