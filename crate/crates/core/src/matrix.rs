//! Dense row-major matrices over any [`Scalar`].

use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{Analytic, ExactComplex, QSqrt2, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Complex double matrix.
pub type CMatrix = Matrix<Complex64>;

/// Matrix over Q(√2) + i·Q(√2).
pub type ExactMatrix = Matrix<ExactComplex>;

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Elementary matrix `E_rs` (0-based) of size n×n.
    pub fn elementary(n: usize, r: usize, s: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == r && j == s { S::one() } else { S::zero() })
    }

    /// Standard complex structure `[[0, I_n], [−I_n, 0]]`.
    pub fn complex_structure(n: usize) -> Self {
        Self::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j == i + n {
                S::one()
            } else if i >= n && j + n == i {
                -S::one()
            } else {
                S::zero()
            }
        })
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let n = a.rows;
        for m in [a, b, c, d] {
            if m.rows != n || m.cols != n {
                return Err(Error::Shape { op: "block", lhs_rows: n, lhs_cols: n, rhs_rows: m.rows, rhs_cols: m.cols });
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| {
            let blk = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[(i % n, j % n)].clone()
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    fn shape_err(&self, op: &'static str, o: &Self) -> Error {
        Error::Shape { op, lhs_rows: self.rows, lhs_cols: self.cols, rhs_rows: o.rows, rhs_cols: o.cols }
    }

    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(self.shape_err("matmul", o));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, "add", |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, "sub", |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, o: &Self, op: &'static str, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(self.shape_err(op, o));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| c.clone() * x.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Result<S> {
        if !self.is_square() {
            return Err(Error::Usage(format!("trace of non-square {}x{} matrix", self.rows, self.cols)));
        }
        Ok((0..self.rows).fold(S::zero(), |acc, i| acc + self[(i, i)].clone()))
    }

    /// `trace(self · other*)`; its real part is the metric `Re trace(ZW*)`.
    pub fn hs_inner(&self, o: &Self) -> Result<S> {
        if self.shape() != o.shape() {
            return Err(self.shape_err("inner", o));
        }
        Ok(self.data.iter().zip(&o.data).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.conj()))
    }

    /// Commutator `[self, o]`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        self.matmul(o)?.sub(&o.matmul(self)?)
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

impl<S: Analytic> Matrix<S> {
    /// Right multiplication by a constant complex matrix.
    pub fn mul_const(&self, o: &CMatrix) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape {
                op: "matmul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: o.rows,
                rhs_cols: o.cols,
            });
        }
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| {
                let b = o[(k, j)];
                if b == Complex64::new(0.0, 0.0) {
                    acc
                } else {
                    acc + self[(i, k)].scale(b)
                }
            })
        }))
    }

    /// Left multiplication by a constant complex matrix.
    pub fn const_mul(a: &CMatrix, x: &Self) -> Result<Self> {
        Ok(x.transpose().mul_const(&a.transpose())?.transpose())
    }

    pub fn lift(m: &CMatrix) -> Self {
        m.map(|z| S::constant(*z))
    }

    /// Base values of every entry.
    pub fn values(&self) -> CMatrix {
        self.map(Analytic::value)
    }
}

impl CMatrix {
    /// Entrywise maximum modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, o: &CMatrix) -> f64 {
        assert_eq!(self.shape(), o.shape());
        self.data.iter().zip(&o.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// The metric `g(Z, W) = Re trace(Z W*)`.
    pub fn metric(&self, o: &CMatrix) -> f64 {
        self.hs_inner(o).map(|z| z.re).unwrap_or(f64::NAN)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<Complex64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn det(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Usage(format!("determinant of non-square {}x{} matrix", self.rows, self.cols)));
        }
        Ok(self.to_nalgebra().determinant())
    }

    /// Matrix exponential (Padé scaling and squaring).
    pub fn expm(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::Usage(format!("exponential of non-square {}x{} matrix", self.rows, self.cols)));
        }
        Ok(Self::from_nalgebra(&self.to_nalgebra().exp()))
    }

    pub fn scale_re(&self, c: f64) -> CMatrix {
        self.map(|z| z * c)
    }

    pub fn times_i(&self) -> CMatrix {
        self.map(|z| z * Complex64::new(0.0, 1.0))
    }
}

impl ExactMatrix {
    pub fn to_c64(&self) -> CMatrix {
        self.map(crate::scalar::exact_to_c64)
    }

    /// Exact `Re trace(Z W*)`.
    pub fn metric_exact(&self, o: &ExactMatrix) -> Result<QSqrt2> {
        self.hs_inner(o).map(|z| z.re)
    }
}
