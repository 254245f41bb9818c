use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{basis_g, cartan_decomposition, AlgebraBasis, GroupFamily, GroupSpec, SymmetricSpace};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// A group element `exp(Σ c_i Z_i)` together with the coefficients that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSample {
    pub coeffs: Vec<f64>,
    pub point: CMatrix,
}

fn gaussian_coeffs<R: Rng + ?Sized>(count: usize, rng: &mut R, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Usage(format!("sigma must be positive, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Usage(e.to_string()))?;
    Ok((0..count).map(|_| normal.sample(rng)).collect())
}

fn combination(basis: &AlgebraBasis, coeffs: &[f64]) -> Result<CMatrix> {
    let size = basis.elements.first().map_or(0, CMatrix::rows);
    basis
        .iter()
        .zip(coeffs)
        .try_fold(CMatrix::zeros(size, size), |acc, (z, &c)| acc.add(&z.scale_re(c)))
}

/// Rebuilds `exp(Σ c_i Z_i)` from stored coefficients.
pub fn point_from_coeffs(spec: GroupSpec, coeffs: &[f64]) -> Result<CMatrix> {
    let basis = basis_g::<Complex64>(spec)?;
    if coeffs.len() != basis.len() {
        return Err(Error::Usage(format!(
            "{spec} needs {} coefficients, got {}",
            basis.len(),
            coeffs.len()
        )));
    }
    combination(&basis, coeffs)?.expm()
}

/// Samples `exp(Σ c_i Z_i)` with `c_i ~ N(0, sigma²)` over the basis of `spec`.
pub fn sample<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R, sigma: f64) -> Result<GroupSample> {
    let coeffs = gaussian_coeffs(spec.dimension(), rng, sigma)?;
    let point = point_from_coeffs(spec, &coeffs)?;
    Ok(GroupSample { coeffs, point })
}

/// A point `exp(Σ a_i K_i)·exp(Σ b_j (i·M_j))` of the non-compact dual.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSample {
    pub k_coeffs: Vec<f64>,
    pub m_coeffs: Vec<f64>,
    pub point: CMatrix,
}

pub fn sample_dual<R: Rng + ?Sized>(space: SymmetricSpace, rng: &mut R, sigma: f64) -> Result<DualSample> {
    let (k, m) = cartan_decomposition::<Complex64>(space)?;
    let k_coeffs = gaussian_coeffs(k.len(), rng, sigma)?;
    let m_coeffs = gaussian_coeffs(m.len(), rng, sigma)?;
    let point = dual_point(space, &k_coeffs, &m_coeffs)?;
    Ok(DualSample { k_coeffs, m_coeffs, point })
}

pub(crate) fn dual_point(space: SymmetricSpace, k_coeffs: &[f64], m_coeffs: &[f64]) -> Result<CMatrix> {
    let (k, m) = cartan_decomposition::<Complex64>(space)?;
    let kk = combination(&k, k_coeffs)?.expm()?;
    let mm = combination(&m.times_i(), m_coeffs)?.expm()?;
    kk.matmul(&mm)
}

/// Embeds a unitary `x + iy` as the real block matrix `[[x, y], [−y, x]]`.
pub fn embed_un(u: &CMatrix) -> Result<CMatrix> {
    if !u.is_square() {
        return Err(Error::Usage(format!("embedding needs a square matrix, got {:?}", u.shape())));
    }
    let x = u.map(|z| Complex64::new(z.re, 0.0));
    let y = u.map(|z| Complex64::new(z.im, 0.0));
    CMatrix::block(&x, &y, &y.neg(), &x)
}

/// Named max-norm residuals of the group-defining equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    /// ‖x x* − I‖
    pub unitarity: f64,
    /// |det x − 1|
    pub determinant: f64,
    /// ‖x J x^t − J‖, for the symplectic families.
    pub symplectic: Option<f64>,
    /// max |Im x|, for the real families.
    pub reality: Option<f64>,
    /// Deviation from the `[[x, y], [−y, x]]` block pattern, for embedded U(n).
    pub block_form: Option<f64>,
}

impl MembershipReport {
    pub fn max(&self) -> f64 {
        [Some(self.unitarity), Some(self.determinant), self.symplectic, self.reality, self.block_form]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

pub fn membership_check(spec: GroupSpec, x: &CMatrix) -> Result<MembershipReport> {
    let size = spec.matrix_size();
    if x.shape() != (size, size) {
        return Err(Error::Usage(format!("{spec} needs {size}x{size} matrices, got {:?}", x.shape())));
    }
    let id = CMatrix::identity(size);
    let unitarity = x.matmul(&x.conj_transpose())?.max_abs_diff(&id);
    let determinant = (x.det()? - Complex64::new(1.0, 0.0)).norm();
    let symplectic = match spec.family {
        GroupFamily::Sp | GroupFamily::UInSpn => {
            let j = CMatrix::complex_structure(spec.n);
            Some(x.matmul(&j)?.matmul(&x.transpose())?.max_abs_diff(&j))
        }
        _ => None,
    };
    let reality = match spec.family {
        GroupFamily::SO | GroupFamily::UInSO2n | GroupFamily::UInSpn => {
            Some(x.entries().iter().fold(0.0, |m: f64, z| m.max(z.im.abs())))
        }
        _ => None,
    };
    let block_form = match spec.family {
        GroupFamily::UInSO2n | GroupFamily::UInSpn => {
            let n = spec.n;
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((x[(i, j)] - x[(i + n, j + n)]).norm());
                    worst = worst.max((x[(i, j + n)] + x[(i + n, j)]).norm());
                }
            }
            Some(worst)
        }
        _ => None,
    };
    Ok(MembershipReport { unitarity, determinant, symplectic, reality, block_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::SpaceFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn identity_has_zero_residuals() {
        for family in [GroupFamily::SO, GroupFamily::SU, GroupFamily::Sp, GroupFamily::UInSO2n] {
            let spec = GroupSpec::new(family, 3).unwrap();
            let r = membership_check(spec, &CMatrix::identity(spec.matrix_size())).unwrap();
            assert_eq!(r.max(), 0.0, "{spec}");
        }
    }

    #[test]
    fn tiny_sigma_gives_identity() {
        let spec = GroupSpec::new(GroupFamily::SU, 3).unwrap();
        let s = sample(spec, &mut rng(), 1e-14).unwrap();
        assert!(s.point.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn samples_are_members() {
        let mut r = rng();
        for (family, n) in [
            (GroupFamily::SU, 3),
            (GroupFamily::SO, 6),
            (GroupFamily::Sp, 2),
            (GroupFamily::Sp, 3),
            (GroupFamily::UInSO2n, 3),
            (GroupFamily::UInSpn, 2),
        ] {
            let spec = GroupSpec::new(family, n).unwrap();
            let s = sample(spec, &mut r, 0.5).unwrap();
            let rep = membership_check(spec, &s.point).unwrap();
            assert!(rep.max() <= 1e-10, "{spec}: {rep:?}");
        }
    }

    #[test]
    fn non_unitary_diag_residual() {
        let x = CMatrix::from_rows(vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        ])
        .unwrap();
        let rep = membership_check(GroupSpec::new(GroupFamily::SU, 2).unwrap(), &x).unwrap();
        assert_eq!(rep.unitarity, 3.0);
        assert_eq!(rep.determinant, 0.0);
    }

    #[test]
    fn embedded_unitaries_land_in_so2n_and_spn() {
        let mut r = rng();
        for n in 2..=4 {
            let u = {
                // a random U(n) element: SU(n) sample times a phase
                let s = sample(GroupSpec::new(GroupFamily::SU, n).unwrap(), &mut r, 0.7).unwrap();
                s.point.scale(&Complex64::from_polar(1.0, 0.3))
            };
            let x = embed_un(&u).unwrap();
            let so = membership_check(GroupSpec::new(GroupFamily::SO, 2 * n).unwrap(), &x).unwrap();
            let sp = membership_check(GroupSpec::new(GroupFamily::Sp, n).unwrap(), &x).unwrap();
            assert!(so.max() <= 1e-12 && sp.max() <= 1e-12, "{so:?} {sp:?}");
        }
    }

    #[test]
    fn dual_sample_su2_is_in_sl2_and_not_unitary() {
        let space = SymmetricSpace::new(SpaceFamily::SUnSOn, 2).unwrap();
        let d = sample_dual(space, &mut rng(), 0.5).unwrap();
        assert!((d.point.det().unwrap() - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
        let id = CMatrix::identity(2);
        assert!(d.point.matmul(&d.point.conj_transpose()).unwrap().max_abs_diff(&id) > 1e-3);
    }

    #[test]
    fn pure_m_dual_point_is_real_symmetric_positive() {
        let space = SymmetricSpace::new(SpaceFamily::SUnSOn, 3).unwrap();
        let mut r = rng();
        let d = sample_dual(space, &mut r, 0.4).unwrap();
        let x = dual_point(space, &vec![0.0; d.k_coeffs.len()], &d.m_coeffs).unwrap();
        assert!(x.entries().iter().all(|z| z.im.abs() < 1e-14));
        assert!(x.max_abs_diff(&x.transpose()) < 1e-14);
        // leading principal minors positive
        for k in 1..=3 {
            let minor = CMatrix::from_fn(k, k, |i, j| x[(i, j)]);
            assert!(minor.det().unwrap().re > 0.0);
        }
    }

    #[test]
    fn zero_coefficients_give_identity_dual_point() {
        let space = SymmetricSpace::new(SpaceFamily::SpnUn, 2).unwrap();
        let x = dual_point(space, &[0.0; 4], &[0.0; 6]).unwrap();
        assert!(x.max_abs_diff(&CMatrix::identity(4)) == 0.0);
    }

    #[test]
    fn sigma_must_be_positive() {
        let spec = GroupSpec::new(GroupFamily::SO, 3).unwrap();
        assert!(sample(spec, &mut rng(), 0.0).is_err());
        assert!(sample(spec, &mut rng(), -1.0).is_err());
    }
}
