//! Stand-alone checks of the auxiliary identities behind the eigenfunction
//! constructions: coordinate-function formulas, generator sums, the symplectic
//! κ decomposition, the skew-symmetric index lemma and a few matrix facts.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::diffops::{kappa, matrix_map_derivatives, Coordinate};
use crate::error::{Error, Result};
use crate::lie::{basis_g, generator, sample, BasisField, GeneratorKind, GroupFamily, GroupSpec};
use crate::matrix::{CMatrix, ExactMatrix, Matrix};
use crate::scalar::{rat, ExactComplex, Jet, QSqrt2, Scalar};

/// Every identity the suite knows about. A run that omits one of these is incomplete.
pub const IDENTITY_NAMES: &[&str] = &[
    "coordinate_so",
    "coordinate_su",
    "coordinate_sp",
    "generator_sum_x",
    "generator_sum_y",
    "generator_sum_d",
    "sp_kappa_decomposition",
    "sp_kappa_decomposition_numeric",
    "skew_lemma",
    "skew_lemma_negative_control",
    "sp_invariant_form",
    "symmetric_skew_traceless",
    "un_embedding_determinant",
    "phi_identities_su",
    "phi_identities_sp",
    "phi_identities_so2n",
];

/// Spread of the Gaussian algebra coefficients used for sample points.
pub const POINT_SIGMA: f64 = 1.0;
/// Random index tuples used once exhaustive enumeration gets large.
pub const RANDOM_TUPLES: usize = 50;
pub const SKEW_TOL: f64 = 1e-12;
pub const NEGATIVE_CONTROL_GAP: f64 = 0.1;
/// Largest tolerated fraction of all-distinct draws that come within the gap.
pub const NEGATIVE_CONTROL_MAX_MISS: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheckResult {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub residual: f64,
    pub pass: bool,
    pub exact: bool,
    pub note: Option<String>,
}

impl IdentityCheckResult {
    fn numeric(name: &str, params: BTreeMap<String, String>, residual: f64, tol: f64) -> Self {
        let mut params = params;
        params.insert("tol".into(), format!("{tol:e}"));
        IdentityCheckResult { name: name.into(), params, residual, pass: residual <= tol, exact: false, note: None }
    }

    fn exact(name: &str, params: BTreeMap<String, String>, residual: f64) -> Self {
        IdentityCheckResult { name: name.into(), params, residual, pass: residual == 0.0, exact: true, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Names from [`IDENTITY_NAMES`] that have no result in `results`.
pub fn missing_identities(results: &[IdentityCheckResult]) -> Vec<&'static str> {
    IDENTITY_NAMES.iter().copied().filter(|name| !results.iter().any(|r| r.name == *name)).collect()
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn exact_residual(got: &ExactMatrix, want: &ExactMatrix) -> f64 {
    if got == want {
        0.0
    } else {
        got.to_c64().max_abs_diff(&want.to_c64()).max(f64::MIN_POSITIVE)
    }
}

fn half() -> ExactComplex {
    ExactComplex::new(QSqrt2::rational(rat(1, 2)), QSqrt2::rational(rat(0, 1)))
}

fn kronecker(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

fn generator_sum(kind: GeneratorKind, n: usize, alpha: usize, beta: usize) -> Result<ExactMatrix> {
    let e = ExactMatrix::elementary(n, alpha - 1, beta - 1);
    let pairs: Vec<(usize, usize)> = match kind {
        GeneratorKind::D => (1..=n).map(|t| (t, t)).collect(),
        _ => (1..=n).flat_map(|r| (r + 1..=n).map(move |s| (r, s))).collect(),
    };
    pairs.into_iter().try_fold(ExactMatrix::zeros(n, n), |acc, (r, s)| {
        let g = generator::<ExactComplex>(kind, r, s, n)?;
        acc.add(&g.matmul(&e)?.matmul(&g.transpose())?)
    })
}

/// Expected value of `Σ G E_αβ Gᵗ` over one generator family. For `X` the
/// coefficient of `E_βα` is `(−1)^δ/2`; see [`generator_sum_x_as_printed`].
fn generator_sum_expected(kind: GeneratorKind, n: usize, alpha: usize, beta: usize) -> ExactMatrix {
    let d = kronecker(alpha, beta);
    let e_ba = ExactMatrix::elementary(n, beta - 1, alpha - 1);
    let id = ExactMatrix::identity(n);
    let dhalf = |m: &ExactMatrix| m.scale(&half()).scale(&ExactComplex::from_int(d));
    match kind {
        GeneratorKind::X => {
            let sign = if d == 1 { -1 } else { 1 };
            dhalf(&id).add(&e_ba.scale(&half()).scale(&ExactComplex::from_int(sign))).expect("same size")
        }
        GeneratorKind::Y => dhalf(&id).sub(&e_ba.scale(&half())).expect("same size"),
        GeneratorKind::D => e_ba.scale(&ExactComplex::from_int(d)),
    }
}

/// Largest exact discrepancy between `Σ X E_αβ Xᵗ` and the variant with
/// coefficient `(−1)^δ` (no factor ½) on `E_βα`.
pub fn generator_sum_x_as_printed(n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for alpha in 1..=n {
        for beta in 1..=n {
            let d = kronecker(alpha, beta);
            let sign = if d == 1 { -1 } else { 1 };
            let want = ExactMatrix::identity(n)
                .scale(&half())
                .scale(&ExactComplex::from_int(d))
                .add(&ExactMatrix::elementary(n, beta - 1, alpha - 1).scale(&ExactComplex::from_int(sign)))?;
            worst = worst.max(exact_residual(&generator_sum(GeneratorKind::X, n, alpha, beta)?, &want));
        }
    }
    Ok(worst)
}

/// Exact check of the three generator-sum identities for all `1 ≤ α, β ≤ n`.
pub fn check_generator_sums(n: usize) -> Result<[IdentityCheckResult; 3]> {
    if n < 2 {
        return Err(Error::Usage(format!("generator sums need n >= 2, got {n}")));
    }
    let run = |kind: GeneratorKind, name: &str| -> Result<IdentityCheckResult> {
        let mut worst: f64 = 0.0;
        for alpha in 1..=n {
            for beta in 1..=n {
                let got = generator_sum(kind, n, alpha, beta)?;
                worst = worst.max(exact_residual(&got, &generator_sum_expected(kind, n, alpha, beta)));
            }
        }
        Ok(IdentityCheckResult::exact(name, params([("n", n.to_string())]), worst))
    };
    let printed = generator_sum_x_as_printed(n)?;
    Ok([
        run(GeneratorKind::X, "generator_sum_x")?
            .with_note(format!("with coefficient (-1)^delta instead of (-1)^delta/2 on E_ba the residual is {printed}")),
        run(GeneratorKind::Y, "generator_sum_y")?,
        run(GeneratorKind::D, "generator_sum_d")?,
    ])
}

fn index_tuples<R: Rng + ?Sized>(size: usize, exhaustive: bool, rng: &mut R) -> Vec<[usize; 4]> {
    if exhaustive {
        let mut out = Vec::with_capacity(size.pow(4));
        for j in 0..size {
            for a in 0..size {
                for k in 0..size {
                    for b in 0..size {
                        out.push([j, a, k, b]);
                    }
                }
            }
        }
        out
    } else {
        (0..RANDOM_TUPLES).map(|_| std::array::from_fn(|_| rng.random_range(0..size))).collect()
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Expected `τ(x_jα)/x_jα` and `κ(x_jα, x_kβ)` for the standard representation.
fn coordinate_formulas(spec: GroupSpec, x: &CMatrix, t: [usize; 4]) -> (f64, Complex64) {
    let [j, a, k, b] = t;
    let n = spec.n as f64;
    match spec.family {
        GroupFamily::SO => (
            -(n - 1.0) / 2.0,
            -0.5 * (x[(j, b)] * x[(k, a)] - real((kronecker(j, k) * kronecker(a, b)) as f64)),
        ),
        GroupFamily::SU => ((1.0 - n * n) / n, -x[(j, b)] * x[(k, a)] + x[(j, a)] * x[(k, b)] / n),
        _ => {
            let jn = CMatrix::complex_structure(spec.n);
            (-(2.0 * n + 1.0) / 2.0, -0.5 * x[(j, b)] * x[(k, a)] + 0.5 * jn[(j, k)] * jn[(a, b)])
        }
    }
}

fn tau_and_kappa_tables(derivs: &[(CMatrix, CMatrix)], size: usize) -> (CMatrix, impl Fn(usize, usize, usize, usize) -> Complex64 + '_) {
    let tau = derivs.iter().fold(CMatrix::zeros(size, size), |acc, (_, d2)| acc.add(d2).expect("same size"));
    let kap = move |j, a, k, b| derivs.iter().map(|(d1, _)| d1[(j, a)] * d1[(k, b)]).sum();
    (tau, kap)
}

/// Checks `τ` and `κ` of the matrix coordinates of SO(n), SU(n) or Sp(n) at
/// `samples` random points, over all index tuples when `n ≤ 3`.
pub fn check_coordinate_identities<R: Rng + ?Sized>(
    spec: GroupSpec,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IdentityCheckResult> {
    let name = match spec.family {
        GroupFamily::SO => "coordinate_so",
        GroupFamily::SU => "coordinate_su",
        GroupFamily::Sp => "coordinate_sp",
        other => return Err(Error::Usage(format!("coordinate identities need SO, SU or Sp, got {other}"))),
    };
    let size = spec.matrix_size();
    let basis = basis_g::<Complex64>(spec)?;
    let tuples = index_tuples(size, spec.n <= 3, rng);
    let mut worst: f64 = 0.0;
    let mut correction: f64 = 0.0;
    for _ in 0..samples {
        let x = sample(spec, rng, POINT_SIGMA)?.point;
        let derivs = matrix_map_derivatives(&x, &basis, |m| Ok(m.clone()))?;
        let (tau, kap) = tau_and_kappa_tables(&derivs, size);
        for &t in &tuples {
            let [j, a, k, b] = t;
            let (eig, want) = coordinate_formulas(spec, &x, t);
            worst = worst.max((tau[(j, a)] - eig * x[(j, a)]).norm());
            worst = worst.max((kap(j, a, k, b) - want).norm());
            if spec.family == GroupFamily::Sp {
                let jn = CMatrix::complex_structure(spec.n);
                correction = correction.max((jn[(j, k)] * jn[(a, b)]).norm() * 0.5);
            }
        }
    }
    let mut result = IdentityCheckResult::numeric(
        name,
        params([
            ("group", spec.to_string()),
            ("points", samples.to_string()),
            ("tuples", tuples.len().to_string()),
        ]),
        worst,
        tol,
    );
    if spec.family == GroupFamily::Sp {
        result = result.with_note(format!("largest correction term (J_n)_jk (J_n)_ab / 2 exercised: {correction}"));
    }
    Ok(result)
}

/// `Σ_{Q∈B} Q E_αβ Qᵗ` over the orthonormal basis of sp(n), in exact arithmetic.
pub fn sp_basis_sum(n: usize, alpha: usize, beta: usize) -> Result<ExactMatrix> {
    let basis = basis_g::<ExactComplex>(GroupSpec::new(GroupFamily::Sp, n)?)?;
    Ok(sp_basis_sum_with(&basis_columns(basis.iter()), 2 * n, alpha, beta))
}

type SparseColumn = Vec<(usize, ExactComplex)>;

fn basis_columns<'a>(elements: impl Iterator<Item = &'a ExactMatrix>) -> Vec<Vec<SparseColumn>> {
    elements
        .map(|q| {
            (0..q.cols())
                .map(|c| (0..q.rows()).filter(|&r| !q[(r, c)].is_zero()).map(|r| (r, q[(r, c)].clone())).collect())
                .collect()
        })
        .collect()
}

fn sp_basis_sum_with(columns: &[Vec<SparseColumn>], size: usize, alpha: usize, beta: usize) -> ExactMatrix {
    // Q E_αβ Qᵗ is the outer product of columns α and β of Q
    let mut acc = ExactMatrix::zeros(size, size);
    for q in columns {
        for (r, u) in &q[alpha - 1] {
            for (s, v) in &q[beta - 1] {
                let cur = acc[(*r, *s)].clone();
                acc.set(*r, *s, cur + u.clone() * v.clone());
            }
        }
    }
    acc
}

/// `−½E_βα + ½(J_n)_αβ J_n`.
pub fn sp_basis_sum_expected(n: usize, alpha: usize, beta: usize) -> ExactMatrix {
    let jn = ExactMatrix::complex_structure(n);
    let e_ba = ExactMatrix::elementary(2 * n, beta - 1, alpha - 1);
    e_ba.scale(&half()).neg().add(&jn.scale(&(half() * jn[(alpha - 1, beta - 1)].clone()))).expect("same size")
}

/// Block case 1..4 of `(α, β)`: upper/lower half for each index.
pub fn block_case(n: usize, alpha: usize, beta: usize) -> u8 {
    match (alpha <= n, beta <= n) {
        (true, true) => 1,
        (true, false) => 2,
        (false, true) => 3,
        (false, false) => 4,
    }
}

/// Exact block decomposition of `Σ Q E_αβ Qᵗ` for every `(α, β)`, and numeric
/// agreement of `(q S qᵗ)_jk` with [`kappa`] at sampled points.
pub fn check_kappa_basis_decomposition<R: Rng + ?Sized>(
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<[IdentityCheckResult; 2]> {
    let spec = GroupSpec::new(GroupFamily::Sp, n)?;
    let size = 2 * n;
    let exact_basis = basis_g::<ExactComplex>(spec)?;
    let columns = basis_columns(exact_basis.iter());
    let mut sums = Vec::with_capacity(size * size);
    let mut worst: f64 = 0.0;
    let mut cases = [0usize; 4];
    for alpha in 1..=size {
        for beta in 1..=size {
            let got = sp_basis_sum_with(&columns, size, alpha, beta);
            worst = worst.max(exact_residual(&got, &sp_basis_sum_expected(n, alpha, beta)));
            cases[block_case(n, alpha, beta) as usize - 1] += 1;
            sums.push(got.to_c64());
        }
    }
    let exact = IdentityCheckResult::exact(
        "sp_kappa_decomposition",
        params([("n", n.to_string()), ("cases", format!("{cases:?}"))]),
        worst,
    );

    let basis = exact_basis.to_c64();
    let tuples = index_tuples(size, false, rng);
    let mut numeric: f64 = 0.0;
    for _ in 0..samples {
        let q = sample(spec, rng, POINT_SIGMA)?.point;
        for &[j, a, k, b] in &tuples {
            let conj = q.matmul(&sums[a * size + b])?.matmul(&q.transpose())?;
            let direct = kappa(&Coordinate { j: j + 1, alpha: a + 1 }, &Coordinate { j: k + 1, alpha: b + 1 }, &q, &basis)?;
            numeric = numeric.max((conj[(j, k)] - direct).norm());
        }
    }
    let numeric = IdentityCheckResult::numeric(
        "sp_kappa_decomposition_numeric",
        params([("n", n.to_string()), ("points", samples.to_string()), ("tuples", tuples.len().to_string())]),
        numeric,
        tol,
    );
    Ok([exact, numeric])
}

fn random_skew<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut g = || Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    let a = CMatrix::from_fn(n, n, |_, _| g());
    a.sub(&a.transpose()).expect("square")
}

/// `|Φ_jβΦ_kα + Φ_jkΦ_αβ − Φ_jαΦ_kβ|` for 0-based indices.
pub fn skew_lemma_residual(phi: &CMatrix, [j, a, k, b]: [usize; 4]) -> f64 {
    (phi[(j, b)] * phi[(k, a)] + phi[(j, k)] * phi[(a, b)] - phi[(j, a)] * phi[(k, b)]).norm()
}

/// The index lemma for skew-symmetric matrices with a forced index
/// coincidence, plus the all-distinct negative control (needs `n ≥ 4`).
pub fn check_skew_lemma<R: Rng + ?Sized>(samples: usize, n: usize, rng: &mut R) -> Result<[IdentityCheckResult; 2]> {
    if n < 3 {
        return Err(Error::Usage(format!("skew lemma needs n >= 3, got {n}")));
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = random_skew(n, rng);
        let mut t: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..n));
        let pair = sample_indices(rng, 4, 2).into_vec();
        t[pair[1]] = t[pair[0]];
        worst = worst.max(skew_lemma_residual(&phi, t));
    }
    let coincident = IdentityCheckResult::numeric(
        "skew_lemma",
        params([("n", n.to_string()), ("draws", samples.to_string())]),
        worst,
        SKEW_TOL,
    );

    let control_params = params([
        ("n", n.to_string()),
        ("draws", samples.to_string()),
        ("gap", NEGATIVE_CONTROL_GAP.to_string()),
    ]);
    let control = if n < 4 {
        IdentityCheckResult::numeric("skew_lemma_negative_control", control_params, 0.0, NEGATIVE_CONTROL_MAX_MISS)
            .with_note("all-distinct tuples need n >= 4; control not exercised")
    } else {
        let mut small = 0usize;
        for _ in 0..samples {
            let phi = random_skew(n, rng);
            let idx = sample_indices(rng, n, 4).into_vec();
            if skew_lemma_residual(&phi, [idx[0], idx[1], idx[2], idx[3]]) <= NEGATIVE_CONTROL_GAP {
                small += 1;
            }
        }
        let miss_rate = if samples == 0 { 0.0 } else { small as f64 / samples as f64 };
        IdentityCheckResult::numeric("skew_lemma_negative_control", control_params, miss_rate, NEGATIVE_CONTROL_MAX_MISS)
            .with_note(format!("fraction of all-distinct draws with residual <= {NEGATIVE_CONTROL_GAP}"))
    };
    Ok([coincident, control])
}

/// `q J_n qᵗ = J_n` at sampled `q ∈ Sp(n)`.
pub fn check_sp_invariant_form<R: Rng + ?Sized>(n: usize, samples: usize, tol: f64, rng: &mut R) -> Result<IdentityCheckResult> {
    let spec = GroupSpec::new(GroupFamily::Sp, n)?;
    let jn = CMatrix::complex_structure(n);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let q = sample(spec, rng, POINT_SIGMA)?.point;
        worst = worst.max(q.matmul(&jn)?.matmul(&q.transpose())?.max_abs_diff(&jn));
    }
    Ok(IdentityCheckResult::numeric(
        "sp_invariant_form",
        params([("n", n.to_string()), ("points", samples.to_string())]),
        worst,
        tol,
    ))
}

/// `trace(A J_n) = 0` exactly for random rational symmetric `A`.
pub fn check_symmetric_skew_traceless<R: Rng + ?Sized>(n: usize, draws: usize, rng: &mut R) -> Result<IdentityCheckResult> {
    if n < 1 {
        return Err(Error::Usage("n must be positive".into()));
    }
    let jn = ExactMatrix::complex_structure(n);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let size = 2 * n;
        let mut a = ExactMatrix::zeros(size, size);
        for i in 0..size {
            for j in i..size {
                let mut q = || QSqrt2::rational(rat(rng.random_range(-20..=20), rng.random_range(1..=9)));
                let v = ExactComplex::new(q(), q());
                a.set(i, j, v.clone());
                a.set(j, i, v);
            }
        }
        let t = a.matmul(&jn)?.trace()?;
        if !t.is_zero() {
            worst = worst.max(crate::scalar::exact_to_c64(&t).norm().max(f64::MIN_POSITIVE));
        }
    }
    Ok(IdentityCheckResult::exact(
        "symmetric_skew_traceless",
        params([("n", n.to_string()), ("draws", draws.to_string())]),
        worst,
    ))
}

/// `|det(x + iy)|² = det([[x, y], [−y, x]])` for random real `x, y`, relative to the left side.
pub fn check_embedding_determinant<R: Rng + ?Sized>(n: usize, draws: usize, tol: f64, rng: &mut R) -> Result<IdentityCheckResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let mut g = || real(StandardNormal.sample(rng));
        let x = CMatrix::from_fn(n, n, |_, _| g());
        let y = CMatrix::from_fn(n, n, |_, _| g());
        let lhs = x.add(&y.times_i())?.det()?.norm_sqr();
        let rhs = CMatrix::block(&x, &y, &y.neg(), &x)?.det()?;
        worst = worst.max((rhs - real(lhs)).norm() / lhs.max(1.0));
    }
    Ok(IdentityCheckResult::numeric(
        "un_embedding_determinant",
        params([("n", n.to_string()), ("draws", draws.to_string())]),
        worst,
        tol,
    ))
}

/// Which `K`-invariant matrix map the Φ identities concern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMap {
    /// `Φ(z) = z zᵗ` on SU(n)
    SymmetricSU,
    /// `Φ(q) = q qᵗ` on Sp(n)
    SymmetricSp,
    /// `Φ(x) = x J_n xᵗ` on SO(2n)
    SkewSO2n,
}

impl PhiMap {
    fn name(self) -> &'static str {
        match self {
            PhiMap::SymmetricSU => "phi_identities_su",
            PhiMap::SymmetricSp => "phi_identities_sp",
            PhiMap::SkewSO2n => "phi_identities_so2n",
        }
    }

    fn group(self, n: usize) -> Result<GroupSpec> {
        match self {
            PhiMap::SymmetricSU => GroupSpec::new(GroupFamily::SU, n),
            PhiMap::SymmetricSp => GroupSpec::new(GroupFamily::Sp, n),
            PhiMap::SkewSO2n => GroupSpec::new(GroupFamily::SO, 2 * n),
        }
    }

    fn apply(self, n: usize, m: &Matrix<Jet>) -> Result<Matrix<Jet>> {
        match self {
            PhiMap::SymmetricSU | PhiMap::SymmetricSp => m.matmul(&m.transpose()),
            PhiMap::SkewSO2n => m.mul_const(&CMatrix::complex_structure(n))?.matmul(&m.transpose()),
        }
    }

    /// `τ(Φ_jα) / Φ_jα` and `κ(Φ_jα, Φ_kβ)` as claimed.
    fn formulas(self, n: usize, phi: &CMatrix, [j, a, k, b]: [usize; 4]) -> (f64, Complex64) {
        let nf = n as f64;
        let jn = CMatrix::complex_structure(n);
        match self {
            PhiMap::SymmetricSU => (
                -2.0 * (nf * nf + nf - 2.0) / nf,
                -2.0 * phi[(j, b)] * phi[(k, a)] - 2.0 * phi[(j, k)] * phi[(a, b)] + 4.0 / nf * phi[(j, a)] * phi[(k, b)],
            ),
            PhiMap::SymmetricSp => (
                -2.0 * (nf + 1.0),
                -(phi[(k, a)] * phi[(j, b)] + phi[(j, k)] * phi[(a, b)]) + jn[(a, k)] * jn[(j, b)] + jn[(j, k)] * jn[(a, b)],
            ),
            PhiMap::SkewSO2n => (
                -2.0 * (nf - 1.0),
                -(phi[(j, b)] * phi[(k, a)] + phi[(j, k)] * phi[(a, b)])
                    - real((kronecker(k, a) * kronecker(j, b) - kronecker(j, k) * kronecker(a, b)) as f64),
            ),
        }
    }
}

/// `τ` and `κ` of the entries of Φ, which drive the eigenfunction proofs.
pub fn check_phi_identities<R: Rng + ?Sized>(
    map: PhiMap,
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IdentityCheckResult> {
    let spec = map.group(n)?;
    let size = spec.matrix_size();
    let basis = basis_g::<Complex64>(spec)?;
    let tuples = index_tuples(size, size <= 4, rng);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = sample(spec, rng, POINT_SIGMA)?.point;
        let phi = map.apply(n, &Matrix::<Jet>::lift(&x))?.values();
        let derivs = matrix_map_derivatives(&x, &basis, |m| map.apply(n, m))?;
        let (tau, kap) = tau_and_kappa_tables(&derivs, size);
        for &t in &tuples {
            let [j, a, k, b] = t;
            let (eig, want) = map.formulas(n, &phi, t);
            worst = worst.max((tau[(j, a)] - eig * phi[(j, a)]).norm());
            worst = worst.max((kap(j, a, k, b) - want).norm());
        }
    }
    Ok(IdentityCheckResult::numeric(
        map.name(),
        params([
            ("group", spec.to_string()),
            ("points", samples.to_string()),
            ("tuples", tuples.len().to_string()),
        ]),
        worst,
        tol,
    ))
}
