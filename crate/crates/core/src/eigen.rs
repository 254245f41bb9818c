//! The four families of K-invariant eigenfunctions, their eigenvalues, and
//! sample-based verification on the compact groups and on the non-compact duals.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::diffops::{kappa_subspace, tau_and_kappa, tau_subspace, tau_subspace_iterated, GroupFunction, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::formal::{build_phi_p, Composed};
use crate::lie::{
    basis_g, cartan_decomposition, generator, point_from_coeffs, sample, sample_dual, GeneratorKind, SpaceFamily,
    SymmetricSpace,
};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{rat, rc, Analytic, RationalComplex};

/// Tolerance for the isotropy condition `a₁² + a₂² + a₃² = 0`.
pub const ISOTROPY_TOL: f64 = 1e-12;
/// Points with `|φ(x)|` below this are excluded from relative statistics.
pub const PHI_FLOOR: f64 = 1e-10;
/// Random K elements tested per sample point.
pub const K_SAMPLES: usize = 5;

/// Parameters of one eigenfunction: the vector `a` and, for the two
/// skew-symmetric families, the indices `1 ≤ r < s < q ≤ 2n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSpec {
    pub space: SymmetricSpace,
    pub a: Vec<Complex64>,
    pub indices: Option<(usize, usize, usize)>,
}

fn uses_indices(family: SpaceFamily) -> bool {
    matches!(family, SpaceFamily::SO2nUn | SpaceFamily::SU2nSpn)
}

fn vector_len(space: SymmetricSpace) -> usize {
    match space.family {
        SpaceFamily::SUnSOn => space.n,
        SpaceFamily::SpnUn => 2 * space.n,
        SpaceFamily::SO2nUn | SpaceFamily::SU2nSpn => 3,
    }
}

pub fn isotropy_defect(a: &[Complex64]) -> Complex64 {
    a.iter().map(|x| x * x).sum()
}

impl EigenfunctionSpec {
    pub fn new(space: SymmetricSpace, a: Vec<Complex64>, indices: Option<(usize, usize, usize)>) -> Result<Self> {
        let spec = Self::new_unchecked(space, a, indices);
        spec.validate()?;
        Ok(spec)
    }

    /// Skips validation; used to build negative controls.
    pub fn new_unchecked(space: SymmetricSpace, a: Vec<Complex64>, indices: Option<(usize, usize, usize)>) -> Self {
        EigenfunctionSpec { space, a, indices }
    }

    pub fn validate(&self) -> Result<()> {
        let space = SymmetricSpace::new(self.space.family, self.space.n)?;
        let len = vector_len(space);
        if self.a.len() != len {
            return Err(Error::Validation(format!("{space}: a must have length {len}, got {}", self.a.len())));
        }
        if self.a.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::Validation(format!("{space}: a must be non-zero")));
        }
        if uses_indices(space.family) {
            let (r, s, q) = self
                .indices
                .ok_or_else(|| Error::Validation(format!("{space}: indices r < s < q are required")))?;
            if !(1 <= r && r < s && s < q && q <= 2 * space.n) {
                return Err(Error::Validation(format!(
                    "{space}: indices must satisfy 1 <= r < s < q <= {}, got ({r}, {s}, {q})",
                    2 * space.n
                )));
            }
        }
        if space.family == SpaceFamily::SO2nUn {
            let d = isotropy_defect(&self.a).norm();
            if d > ISOTROPY_TOL {
                return Err(Error::Validation(format!(
                    "{space}: a must be isotropic (a1^2 + a2^2 + a3^2 = 0), defect {d:e}"
                )));
            }
        }
        Ok(())
    }
}

/// `A = a aᵗ` for SU(n)/SO(n) and Sp(n)/U(n); `A = a₁Y_rs + a₂Y_rq + a₃Y_sq`
/// for SO(2n)/U(n) and SU(2n)/Sp(n).
pub fn build_matrix_a(spec: &EigenfunctionSpec) -> Result<CMatrix> {
    spec.validate()?;
    Ok(matrix_a_unchecked(spec))
}

fn matrix_a_unchecked(spec: &EigenfunctionSpec) -> CMatrix {
    match spec.space.family {
        SpaceFamily::SUnSOn | SpaceFamily::SpnUn => {
            let m = spec.a.len();
            CMatrix::from_fn(m, m, |i, j| spec.a[i] * spec.a[j])
        }
        SpaceFamily::SO2nUn | SpaceFamily::SU2nSpn => {
            let size = 2 * spec.space.n;
            let (r, s, q) = spec.indices.expect("validated indices");
            [(r, s), (r, q), (s, q)]
                .iter()
                .zip(&spec.a)
                .fold(CMatrix::zeros(size, size), |acc, (&(i, j), c)| {
                    let y = generator::<Complex64>(GeneratorKind::Y, i, j, size).expect("validated indices");
                    acc.add(&y.scale(c)).expect("same size")
                })
        }
    }
}

/// `φ(g) = trace(gᵗ A g)` or `trace(gᵗ A g J_n)`.
#[derive(Clone, Debug)]
pub struct Eigenfunction {
    pub spec: EigenfunctionSpec,
    pub a_matrix: CMatrix,
    pub complex_structure: Option<CMatrix>,
}

impl Eigenfunction {
    pub fn size(&self) -> usize {
        self.a_matrix.rows()
    }
}

pub fn build_eigenfunction(spec: &EigenfunctionSpec) -> Result<Eigenfunction> {
    spec.validate()?;
    Ok(eigenfunction_unchecked(spec))
}

/// Builds φ without validating `spec`, so that invariant violations can be observed.
pub fn eigenfunction_unchecked(spec: &EigenfunctionSpec) -> Eigenfunction {
    let complex_structure = uses_indices(spec.space.family).then(|| CMatrix::complex_structure(spec.space.n));
    Eigenfunction { spec: spec.clone(), a_matrix: matrix_a_unchecked(spec), complex_structure }
}

impl GroupFunction for Eigenfunction {
    fn eval<S: Analytic>(&self, g: &Matrix<S>) -> Result<S> {
        let m = self.size();
        if g.shape() != (m, m) {
            return Err(Error::Usage(format!(
                "{} eigenfunction needs {m}x{m} matrices, got {:?}",
                self.spec.space,
                g.shape()
            )));
        }
        let ag = Matrix::<S>::const_mul(&self.a_matrix, g)?;
        let agj = match &self.complex_structure {
            Some(j) => ag.mul_const(j)?,
            None => ag,
        };
        // trace(gᵗ M) = Σ g_{jr} M_{jr}
        let mut acc = S::zero();
        for (x, y) in g.entries().iter().zip(agj.entries()) {
            acc = acc + x.clone() * y.clone();
        }
        Ok(acc)
    }

    fn k_invariant(&self) -> bool {
        true
    }
}

/// Exact `(λ, μ)` with `τφ = λφ` and `κ(φ, φ) = μφ²`.
pub fn expected_eigenvalues(space: SymmetricSpace) -> (RationalComplex, RationalComplex) {
    let n = space.n as i64;
    let (lambda, mu) = match space.family {
        SpaceFamily::SUnSOn => (rat(-2 * (n * n + n - 2), n), rat(-4 * (n - 1), n)),
        SpaceFamily::SpnUn => (rat(-2 * (n + 1), 1), rat(-2, 1)),
        SpaceFamily::SO2nUn => (rat(-2 * (n - 1), 1), rat(-1, 1)),
        SpaceFamily::SU2nSpn => (rat(-2 * (2 * n * n - n - 1), n), rat(-2 * (n - 1), n)),
    };
    (rc(lambda, rat(0, 1)), rc(mu, rat(0, 1)))
}

pub(crate) fn rc_to_c64(z: &RationalComplex) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// A random valid parameter set. Isotropic vectors come from the
/// parametrization `(u² − v², i(u² + v²), 2uv)` of the isotropic cone.
pub fn random_spec<R: Rng + ?Sized>(space: SymmetricSpace, rng: &mut R) -> Result<EigenfunctionSpec> {
    let space = SymmetricSpace::new(space.family, space.n)?;
    loop {
        let a: Vec<Complex64> = match space.family {
            SpaceFamily::SO2nUn => {
                let (u, v) = (complex_normal(rng), complex_normal(rng));
                vec![u * u - v * v, Complex64::new(0.0, 1.0) * (u * u + v * v), 2.0 * u * v]
            }
            _ => (0..vector_len(space)).map(|_| complex_normal(rng)).collect(),
        };
        if a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-6 {
            continue;
        }
        let indices = uses_indices(space.family).then(|| {
            let mut idx = rand::seq::index::sample(rng, 2 * space.n, 3).into_vec();
            idx.sort_unstable();
            (idx[0] + 1, idx[1] + 1, idx[2] + 1)
        });
        return EigenfunctionSpec::new(space, a, indices);
    }
}

/// The worst sample of a verification run, replayable from its coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenWitness {
    pub group_coeffs: Vec<f64>,
    pub tau_residual: f64,
    pub kappa_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSummary {
    pub samples: usize,
    pub excluded: usize,
    /// max |τφ − λφ| / max(1, |φ|)
    pub tau_residual: f64,
    /// max |κ(φ,φ) − μφ²| / max(1, |φ|)
    pub kappa_residual: f64,
    /// max |φ(xk) − φ(x)| / max(1, |φ|)
    pub k_invariance_residual: f64,
    pub max_abs_phi: f64,
    pub pass: bool,
    pub warning: Option<String>,
    /// Sample attaining `tau_residual`.
    pub worst_tau: Option<EigenWitness>,
    /// Sample attaining `kappa_residual`.
    pub worst_kappa: Option<EigenWitness>,
}

/// Normalized residuals `(τ, κ)` of φ at one point.
pub fn eigen_residuals_at(phi: &Eigenfunction, x: &CMatrix) -> Result<(Complex64, f64, f64)> {
    let basis = basis_g::<Complex64>(phi.spec.space.group())?;
    let (lambda, mu) = expected_eigenvalues(phi.spec.space);
    let (lambda, mu) = (rc_to_c64(&lambda), rc_to_c64(&mu));
    let (value, t, k) = tau_and_kappa(phi, x, &basis)?;
    let scale = value.norm().max(1.0);
    Ok((value, (t - lambda * value).norm() / scale, (k - mu * value * value).norm() / scale))
}

/// Signed defect `κ(φ,φ) − μφ²` at `x`.
pub fn kappa_defect(phi: &Eigenfunction, x: &CMatrix) -> Result<Complex64> {
    let basis = basis_g::<Complex64>(phi.spec.space.group())?;
    let (_, mu) = expected_eigenvalues(phi.spec.space);
    let (value, _, k) = tau_and_kappa(phi, x, &basis)?;
    Ok(k - rc_to_c64(&mu) * value * value)
}

/// `−Σ A_jk A_kj + Σ A_jβ A_jβ`: the constant the Kronecker deltas of the
/// SO coordinate formula contribute to `κ(φ,φ)`; zero for isotropic `a`.
pub fn isotropy_term(a: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a[(j, k)] * a[(j, k)] - a[(j, k)] * a[(k, j)];
        }
    }
    acc
}

/// Recomputes the residuals of a stored witness.
pub fn replay_eigen(spec: &EigenfunctionSpec, witness: &EigenWitness) -> Result<(f64, f64)> {
    let phi = eigenfunction_unchecked(spec);
    let x = point_from_coeffs(spec.space.group(), &witness.group_coeffs)?;
    let (_, t, k) = eigen_residuals_at(&phi, &x)?;
    Ok((t, k))
}

/// Checks `τφ = λφ`, `κ(φ,φ) = μφ²` and K-invariance at `samples` random points.
pub fn verify_eigen<R: Rng + ?Sized>(
    spec: &EigenfunctionSpec,
    samples: usize,
    tol: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<EigenSummary> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!("tol must be positive, got {tol}")));
    }
    let phi = eigenfunction_unchecked(spec);
    let group = spec.space.group();
    let subgroup = spec.space.subgroup();
    let mut summary = EigenSummary {
        samples,
        excluded: 0,
        tau_residual: 0.0,
        kappa_residual: 0.0,
        k_invariance_residual: 0.0,
        max_abs_phi: 0.0,
        pass: true,
        warning: None,
        worst_tau: None,
        worst_kappa: None,
    };
    if samples == 0 {
        summary.warning = Some("no samples requested; pass is vacuous".into());
        return Ok(summary);
    }
    for _ in 0..samples {
        let g = sample(group, rng, sigma)?;
        let (value, rt, rk) = eigen_residuals_at(&phi, &g.point)?;
        summary.max_abs_phi = summary.max_abs_phi.max(value.norm());
        let mut rinv: f64 = 0.0;
        for _ in 0..K_SAMPLES {
            let k = sample(subgroup, rng, sigma)?;
            let moved = phi.eval(&g.point.matmul(&k.point)?)?;
            rinv = rinv.max((moved - value).norm() / value.norm().max(1.0));
        }
        if value.norm() < PHI_FLOOR {
            summary.excluded += 1;
            continue;
        }
        let witness = EigenWitness { group_coeffs: g.coeffs, tau_residual: rt, kappa_residual: rk };
        if summary.worst_tau.is_none() || rt > summary.tau_residual {
            summary.worst_tau = Some(witness.clone());
        }
        if summary.worst_kappa.is_none() || rk > summary.kappa_residual {
            summary.worst_kappa = Some(witness);
        }
        summary.tau_residual = summary.tau_residual.max(rt);
        summary.kappa_residual = summary.kappa_residual.max(rk);
        summary.k_invariance_residual = summary.k_invariance_residual.max(rinv);
    }
    if summary.max_abs_phi <= 1e-6 {
        summary.warning = Some("phi vanished at every sample; properness not certified".into());
    }
    summary.pass = summary.tau_residual <= tol && summary.kappa_residual <= tol && summary.k_invariance_residual <= tol;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualSummary {
    pub samples: usize,
    pub resampled: usize,
    /// max |τ*φ + λφ| / max(1, |φ|)
    pub tau_residual: f64,
    /// max |κ*(φ,φ) + μφ²| / max(1, |φ|)
    pub kappa_residual: f64,
    /// max |τ*²(Φ₂*)| with Φ₂* built from `(−λ, −μ)`.
    pub phi2_residual: f64,
    pub pass: bool,
}

/// φ must avoid the branch cut of log and its own zero set.
pub fn on_admissible_domain(value: Complex64) -> bool {
    value.norm() >= PHI_FLOOR && !(value.im == 0.0 && value.re <= 0.0)
}

/// Verifies the sign-flipped eigen-equations on the non-compact dual and the
/// biharmonicity of the dual `Φ₂`.
pub fn verify_dual<R: Rng + ?Sized>(
    spec: &EigenfunctionSpec,
    samples: usize,
    tol: f64,
    phi2_tol: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<DualSummary> {
    let phi = eigenfunction_unchecked(spec);
    let (_, m) = cartan_decomposition::<Complex64>(spec.space)?;
    let (lambda, mu) = expected_eigenvalues(spec.space);
    let (dual_lambda, dual_mu) = (-lambda.clone(), -mu.clone());
    let one = rc(rat(1, 1), rat(0, 1));
    let phi2 = build_phi_p(2, &dual_lambda, &dual_mu, &one, &one)?;
    let composed = Composed { formal: &phi2, inner: &phi };
    let (dl, dm) = (rc_to_c64(&dual_lambda), rc_to_c64(&dual_mu));

    let mut out = DualSummary { samples, resampled: 0, tau_residual: 0.0, kappa_residual: 0.0, phi2_residual: 0.0, pass: true };
    for _ in 0..samples {
        let (x, value) = loop {
            let d = sample_dual(spec.space, rng, sigma)?;
            let v = phi.eval(&d.point)?;
            if on_admissible_domain(v) {
                break (d.point, v);
            }
            out.resampled += 1;
        };
        let scale = value.norm().max(1.0);
        let t = tau_subspace(&phi, &x, &m, 1)?;
        let k = kappa_subspace(&phi, &phi, &x, &m, 1)?;
        out.tau_residual = out.tau_residual.max((t - dl * value).norm() / scale);
        out.kappa_residual = out.kappa_residual.max((k - dm * value * value).norm() / scale);
        let t2 = tau_subspace_iterated(&composed, &x, &m, 1, 2, DEFAULT_BUDGET)?;
        out.phi2_residual = out.phi2_residual.max(t2.norm());
    }
    out.pass = out.tau_residual <= tol && out.kappa_residual <= tol && out.phi2_residual <= phi2_tol;
    Ok(out)
}
