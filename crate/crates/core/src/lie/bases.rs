use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{GroupFamily, GroupSpec, SpaceFamily, SymmetricSpace};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{ExactComplex, QSqrt2, Scalar};

/// Scalars in which the orthonormal generators can be written down.
pub trait BasisField: Scalar {
    fn i() -> Self;
    fn from_int(k: i64) -> Self;
    /// `1/√k`, if representable.
    fn inv_sqrt(k: u64) -> Option<Self>;
}

impl BasisField for Complex64 {
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_int(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }
    fn inv_sqrt(k: u64) -> Option<Self> {
        Some(Complex64::new(1.0 / (k as f64).sqrt(), 0.0))
    }
}

impl BasisField for ExactComplex {
    fn i() -> Self {
        Complex::new(QSqrt2::zero(), QSqrt2::one())
    }
    fn from_int(k: i64) -> Self {
        Complex::new(QSqrt2::rational(BigRational::from_integer(k.into())), QSqrt2::zero())
    }
    /// Only `k = m²` and `k = 2m²` lie in Q(√2).
    fn inv_sqrt(k: u64) -> Option<Self> {
        let root = |v: u64| {
            let r = (v as f64).sqrt().round() as u64;
            (r * r == v).then_some(r)
        };
        let re = if let Some(m) = root(k) {
            QSqrt2::rational(crate::scalar::rat(1, m as i64))
        } else if k.is_multiple_of(2) {
            let m = root(k / 2)?;
            // 1/(m√2) = √2/(2m)
            QSqrt2::new(BigRational::zero(), crate::scalar::rat(1, 2 * m as i64))
        } else {
            return None;
        };
        Some(Complex::new(re, QSqrt2::zero()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    X,
    Y,
    D,
}

/// The generators `X_rs = (E_rs + E_sr)/√2`, `Y_rs = (E_rs − E_sr)/√2` and
/// `D_r = E_rr` of size `n`. Indices are 1-based; `s` is ignored for `D`.
pub fn generator<S: BasisField>(kind: GeneratorKind, r: usize, s: usize, n: usize) -> Result<Matrix<S>> {
    match kind {
        GeneratorKind::D => {
            if r == 0 || r > n {
                return Err(Error::Usage(format!("D_{r} needs 1 <= r <= {n}")));
            }
            Ok(Matrix::elementary(n, r - 1, r - 1))
        }
        GeneratorKind::X | GeneratorKind::Y => {
            if !(1 <= r && r < s && s <= n) {
                return Err(Error::Usage(format!("{kind:?}_{{{r},{s}}} needs 1 <= r < s <= {n}")));
            }
            let h = S::inv_sqrt(2).expect("1/sqrt2 is representable");
            let sign = if kind == GeneratorKind::X { h.clone() } else { -h.clone() };
            Ok(Matrix::from_fn(n, n, |i, j| {
                if i == r - 1 && j == s - 1 {
                    h.clone()
                } else if i == s - 1 && j == r - 1 {
                    sign.clone()
                } else {
                    S::zero()
                }
            }))
        }
    }
}

/// An ordered list of algebra elements, orthonormal for `Re trace(Z W*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraBasis<S = Complex64> {
    pub elements: Vec<Matrix<S>>,
}

impl<S: Scalar> AlgebraBasis<S> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matrix<S>> {
        self.elements.iter()
    }
}

impl AlgebraBasis<ExactComplex> {
    pub fn to_c64(&self) -> AlgebraBasis {
        AlgebraBasis { elements: self.elements.iter().map(Matrix::to_c64).collect() }
    }
}

impl AlgebraBasis {
    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.metric(b) - target).abs());
            }
        }
        worst
    }

    /// The same elements multiplied by `i`.
    pub fn times_i(&self) -> AlgebraBasis {
        AlgebraBasis { elements: self.elements.iter().map(CMatrix::times_i).collect() }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |r| (r + 1..=n).map(move |s| (r, s)))
}

fn gen<S: BasisField>(kind: GeneratorKind, r: usize, s: usize, n: usize) -> Matrix<S> {
    generator(kind, r, s, n).expect("indices enumerated in range")
}

/// `(1/√(t(t+1)))·(D_1 + … + D_t − t·D_{t+1})`, t = 1..n−1.
fn traceless_diagonal<S: BasisField>(t: usize, n: usize) -> Result<Matrix<S>> {
    let c = S::inv_sqrt((t * (t + 1)) as u64).ok_or_else(|| {
        Error::Usage(format!("1/sqrt({}) is not representable in this scalar field", t * (t + 1)))
    })?;
    let mut m = Matrix::zeros(n, n);
    for k in 0..t {
        m.set(k, k, c.clone());
    }
    m.set(t, t, c * S::from_int(-(t as i64)));
    Ok(m)
}

fn half_block<S: BasisField>(a: &Matrix<S>, b: &Matrix<S>, c: &Matrix<S>, d: &Matrix<S>) -> Matrix<S> {
    let h = S::inv_sqrt(2).expect("1/sqrt2 is representable");
    Matrix::block(a, b, c, d).expect("equal block sizes").scale(&h)
}

fn so_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    pairs(n).map(|(r, s)| gen(GeneratorKind::Y, r, s, n)).collect()
}

fn i_sym_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    pairs(n).map(|(r, s)| gen::<S>(GeneratorKind::X, r, s, n).scale(&S::i())).collect()
}

fn i_traceless_diag_basis<S: BasisField>(n: usize) -> Result<Vec<Matrix<S>>> {
    (1..n).map(|t| Ok(traceless_diagonal::<S>(t, n)?.scale(&S::i()))).collect()
}

fn diag_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    (1..=n).map(|t| gen(GeneratorKind::D, t, t, n)).collect()
}

fn sym_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    pairs(n).map(|(r, s)| gen(GeneratorKind::X, r, s, n)).collect()
}

/// u(n) embedded through `x + iy ↦ [[x, y], [−y, x]]`.
fn embedded_un_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    let z = Matrix::<S>::zeros(n, n);
    let mut out = Vec::new();
    for y in so_basis::<S>(n) {
        out.push(half_block(&y, &z, &z, &y));
    }
    for x in sym_basis::<S>(n).into_iter().chain(diag_basis::<S>(n)) {
        out.push(half_block(&z, &x, &x.neg(), &z));
    }
    out
}

/// The seven-family orthonormal basis of sp(n), in the order
/// `[Y,0;0,Y]`, `[iX,0;0,−iX]`, `[iD,0;0,−iD]`, `[0,X;−X,0]`, `[0,iX;iX,0]`,
/// `[0,D;−D,0]`, `[0,iD;iD,0]` (each scaled by 1/√2).
fn sp_basis<S: BasisField>(n: usize) -> Vec<Matrix<S>> {
    let z = Matrix::<S>::zeros(n, n);
    let i = S::i();
    let mut out = Vec::new();
    for y in so_basis::<S>(n) {
        out.push(half_block(&y, &z, &z, &y));
    }
    for x in sym_basis::<S>(n) {
        let ix = x.scale(&i);
        out.push(half_block(&ix, &z, &z, &ix.neg()));
    }
    for d in diag_basis::<S>(n) {
        let id = d.scale(&i);
        out.push(half_block(&id, &z, &z, &id.neg()));
    }
    for x in sym_basis::<S>(n) {
        out.push(half_block(&z, &x, &x.neg(), &z));
    }
    for x in sym_basis::<S>(n) {
        let ix = x.scale(&i);
        out.push(half_block(&z, &ix, &ix, &z));
    }
    for d in diag_basis::<S>(n) {
        out.push(half_block(&z, &d, &d.neg(), &z));
    }
    for d in diag_basis::<S>(n) {
        let id = d.scale(&i);
        out.push(half_block(&z, &id, &id, &z));
    }
    out
}

/// Orthonormal basis of the Lie algebra of `spec`.
pub fn basis_g<S: BasisField>(spec: GroupSpec) -> Result<AlgebraBasis<S>> {
    let spec = GroupSpec::new(spec.family, spec.n)?;
    let n = spec.n;
    let elements = match spec.family {
        GroupFamily::SO => so_basis(n),
        GroupFamily::SU => {
            let mut v = so_basis(n);
            v.extend(i_sym_basis(n));
            v.extend(i_traceless_diag_basis(n)?);
            v
        }
        GroupFamily::Sp => sp_basis(n),
        GroupFamily::UInSO2n | GroupFamily::UInSpn => embedded_un_basis(n),
    };
    debug_assert_eq!(elements.len(), spec.dimension());
    Ok(AlgebraBasis { elements })
}

/// Cartan decomposition `g = k ⊕ m` of a symmetric pair; returns `(k, m)`.
pub fn cartan_decomposition<S: BasisField>(space: SymmetricSpace) -> Result<(AlgebraBasis<S>, AlgebraBasis<S>)> {
    let space = SymmetricSpace::new(space.family, space.n)?;
    let n = space.n;
    let k = basis_g::<S>(space.subgroup())?;
    let z = Matrix::<S>::zeros(n, n);
    let i = S::i();
    let m = match space.family {
        SpaceFamily::SUnSOn => {
            let mut v = i_sym_basis(n);
            v.extend(i_traceless_diag_basis(n)?);
            v
        }
        SpaceFamily::SpnUn => {
            let mut v = Vec::new();
            for x in sym_basis::<S>(n).into_iter().chain(diag_basis::<S>(n)) {
                let ix = x.scale(&i);
                v.push(half_block(&ix, &z, &z, &ix.neg()));
            }
            for x in sym_basis::<S>(n).into_iter().chain(diag_basis::<S>(n)) {
                let ix = x.scale(&i);
                v.push(half_block(&z, &ix, &ix, &z));
            }
            v
        }
        SpaceFamily::SO2nUn => {
            let mut v = Vec::new();
            for y in so_basis::<S>(n) {
                v.push(half_block(&y, &z, &z, &y.neg()));
            }
            for y in so_basis::<S>(n) {
                v.push(half_block(&z, &y, &y, &z));
            }
            v
        }
        SpaceFamily::SU2nSpn => {
            // [[A, B], [B̄, −Ā]] with A ∈ su(n) and B complex skew-symmetric
            let mut v = Vec::new();
            for y in so_basis::<S>(n) {
                v.push(half_block(&y, &z, &z, &y.neg()));
            }
            for a in i_sym_basis::<S>(n).into_iter().chain(i_traceless_diag_basis::<S>(n)?) {
                v.push(half_block(&a, &z, &z, &a));
            }
            for y in so_basis::<S>(n) {
                v.push(half_block(&z, &y, &y, &z));
            }
            for y in so_basis::<S>(n) {
                let iy = y.scale(&i);
                v.push(half_block(&z, &iy, &iy.neg(), &z));
            }
            v
        }
    };
    Ok((k, AlgebraBasis { elements: m }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn c64_basis(family: GroupFamily, n: usize) -> AlgebraBasis {
        basis_g::<Complex64>(GroupSpec::new(family, n).unwrap()).unwrap()
    }

    #[test]
    fn y12_matches_definition() {
        let y = generator::<Complex64>(GeneratorKind::Y, 1, 2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((y[(0, 1)].re - h).abs() < 1e-15);
        assert!((y[(1, 0)].re + h).abs() < 1e-15);
        assert_eq!(y[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn generator_index_preconditions() {
        assert!(generator::<Complex64>(GeneratorKind::X, 2, 1, 3).is_err());
        assert!(generator::<Complex64>(GeneratorKind::Y, 1, 1, 3).is_err());
        assert!(generator::<Complex64>(GeneratorKind::Y, 1, 4, 3).is_err());
        assert!(generator::<Complex64>(GeneratorKind::D, 0, 0, 3).is_err());
    }

    #[test]
    fn x_and_y_are_orthogonal_exactly() {
        for (r, s) in pairs(4) {
            let x = generator::<ExactComplex>(GeneratorKind::X, r, s, 4).unwrap();
            let y = generator::<ExactComplex>(GeneratorKind::Y, r, s, 4).unwrap();
            let t = x.matmul(&y.transpose()).unwrap().trace().unwrap();
            assert!(crate::scalar::Scalar::is_zero(&t));
        }
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(c64_basis(GroupFamily::SO, 3).len(), 3);
        assert_eq!(c64_basis(GroupFamily::SU, 3).len(), 8);
        assert_eq!(c64_basis(GroupFamily::Sp, 2).len(), 10);
        for n in 2..=6 {
            for family in [GroupFamily::SO, GroupFamily::SU, GroupFamily::Sp, GroupFamily::UInSO2n] {
                let spec = GroupSpec::new(family, n).unwrap();
                assert_eq!(c64_basis(family, n).len(), spec.dimension(), "{spec}");
            }
        }
    }

    #[test]
    fn sp2_elements_satisfy_both_algebra_conditions() {
        let j = CMatrix::complex_structure(2);
        for z in c64_basis(GroupFamily::Sp, 2).iter() {
            let sym = z.transpose().matmul(&j).unwrap().add(&j.matmul(z).unwrap()).unwrap();
            assert!(sym.max_abs() < 1e-15);
            assert!(z.add(&z.conj_transpose()).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn orthonormal_up_to_n6() {
        for n in 2..=6 {
            for family in [GroupFamily::SO, GroupFamily::SU, GroupFamily::Sp, GroupFamily::UInSpn] {
                assert!(c64_basis(family, n).orthonormality_residual() < 1e-12, "{family}({n})");
            }
        }
    }

    #[test]
    fn exact_sp_basis_is_exactly_orthonormal() {
        let b = basis_g::<ExactComplex>(GroupSpec::new(GroupFamily::Sp, 3).unwrap()).unwrap();
        for (i, a) in b.iter().enumerate() {
            for (j, c) in b.iter().enumerate() {
                let expected = QSqrt2::rational(rat(if i == j { 1 } else { 0 }, 1));
                assert_eq!(a.metric_exact(c).unwrap(), expected);
            }
        }
    }

    #[test]
    fn exact_su3_is_not_representable() {
        assert!(basis_g::<ExactComplex>(GroupSpec::new(GroupFamily::SU, 3).unwrap()).is_err());
        assert!(basis_g::<ExactComplex>(GroupSpec::new(GroupFamily::SU, 2).unwrap()).is_ok());
    }

    #[test]
    fn cartan_sizes() {
        let sizes = |family, n| {
            let (k, m) = cartan_decomposition::<Complex64>(SymmetricSpace::new(family, n).unwrap()).unwrap();
            (k.len(), m.len())
        };
        assert_eq!(sizes(SpaceFamily::SUnSOn, 3), (3, 5));
        assert_eq!(sizes(SpaceFamily::SpnUn, 2), (4, 6));
        assert_eq!(sizes(SpaceFamily::SO2nUn, 3), (9, 6));
        assert_eq!(sizes(SpaceFamily::SU2nSpn, 2), (10, 5));
    }
}
