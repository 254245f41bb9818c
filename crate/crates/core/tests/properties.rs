use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lieharm::diffops::{directional_jet, kappa, tau, tau_and_kappa, tau_subspace, Coordinate, GroupFunction, Product};
use lieharm::eigen::{build_eigenfunction, on_admissible_domain, random_spec, verify_eigen, EigenfunctionSpec};
use lieharm::formal::{evaluate_formal, tau_formal, Composed, FormalSum};
use lieharm::identities::{check_phi_identities, PhiMap};
use lieharm::lie::{
    basis_g, cartan_decomposition, membership_check, sample, AlgebraBasis, GroupFamily, GroupSpec, SpaceFamily,
    SymmetricSpace,
};
use lieharm::scalar::{rat, rc, Analytic, ExactComplex, Jet, QSqrt2, RationalComplex};
use lieharm::{CMatrix, ExactMatrix, Matrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn space(family: SpaceFamily, n: usize) -> SymmetricSpace {
    SymmetricSpace::new(family, n).unwrap()
}

fn arb_c(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, lo..hi).prop_map(|(a, b)| c(a, b))
}

fn arb_jet() -> impl Strategy<Value = Jet> {
    // base away from zero, two variables
    (0.5f64..2.0, 0.0f64..std::f64::consts::TAU, prop::collection::vec(arb_c(-1.0, 1.0), 8)).prop_map(|(r, th, rest)| {
        let mut coeffs = vec![Complex64::from_polar(r, th)];
        coeffs.extend(rest);
        Jet::from_coeffs(2, &coeffs)
    })
}

fn max_coeff_diff(a: &Jet, b: &Jet) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn arb_qsqrt2() -> impl Strategy<Value = QSqrt2> {
    (-6i64..6, 1i64..4, -6i64..6, 1i64..4).prop_map(|(a, b, x, y)| QSqrt2::new(rat(a, b), rat(x, y)))
}

fn arb_exact(n: usize) -> impl Strategy<Value = ExactMatrix> {
    prop::collection::vec((arb_qsqrt2(), arb_qsqrt2()), n * n)
        .prop_map(move |v| ExactMatrix::from_fn(n, n, |i, j| ExactComplex::new(v[i * n + j].0.clone(), v[i * n + j].1.clone())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_pow_times_inverse_pow_is_one(x in arb_jet(), p in -7i64..7, q in 1i64..5) {
        let a = rat(p, q);
        let prod = x.powq(&a).unwrap() * x.powq(&-a).unwrap();
        let mut one = vec![c(0.0, 0.0); 9];
        one[0] = c(1.0, 0.0);
        prop_assert!(max_coeff_diff(&prod, &Jet::from_coeffs(2, &one)) <= 1e-11);
    }

    #[test]
    fn jet_log_of_pow_scales(x in arb_jet(), p in -7i64..7, q in 1i64..5) {
        let a = rat(p, q);
        let af = p as f64 / q as f64;
        let lhs = x.powq(&a).unwrap().ln().unwrap();
        let rhs = x.ln().unwrap().scale(c(af, 0.0));
        for (k, (u, v)) in lhs.coeffs().iter().zip(rhs.coeffs()).enumerate() {
            if k == 0 {
                let turns = (u - v) / c(0.0, 2.0 * std::f64::consts::PI);
                prop_assert!((turns - c(turns.re.round(), 0.0)).norm() <= 1e-12);
            } else {
                prop_assert!((u - v).norm() <= 1e-12 * v.norm().max(1.0));
            }
        }
    }

    #[test]
    fn exact_adjoint_reverses_products(a in arb_exact(3), b in arb_exact(3)) {
        let lhs = a.matmul(&b).unwrap().conj_transpose();
        let rhs = b.conj_transpose().matmul(&a.conj_transpose()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sampled_points_are_group_members(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (family, n) in [(GroupFamily::SU, 3), (GroupFamily::Sp, 2), (GroupFamily::SO, 4), (GroupFamily::UInSO2n, 2)] {
            let spec = GroupSpec::new(family, n).unwrap();
            let x = sample(spec, &mut rng, 1.0).unwrap().point;
            prop_assert!(membership_check(spec, &x).unwrap().max() <= 1e-12);
        }
    }

    #[test]
    fn phi_scales_with_a(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for family in SpaceFamily::ALL {
            let s = space(family, 2);
            let spec = random_spec(s, &mut rng).unwrap();
            let doubled = EigenfunctionSpec::new(s, spec.a.iter().map(|z| z * 2.0).collect(), spec.indices).unwrap();
            let x = sample(s.group(), &mut rng, 0.7).unwrap().point;
            let v1 = build_eigenfunction(&spec).unwrap().eval(&x).unwrap();
            let v2 = build_eigenfunction(&doubled).unwrap().eval(&x).unwrap();
            let factor = match family {
                SpaceFamily::SUnSOn | SpaceFamily::SpnUn => 4.0,
                _ => 2.0,
            };
            prop_assert!((v2 - v1 * factor).norm() <= 1e-12 * v1.norm().max(1.0));
        }
    }
}

/// `trace(pᵗ A p)` along the quadratic path `p(t) = x(I + tZ + t²Z²/2)`.
#[test]
fn jet_coefficients_match_central_differences_on_quadratic_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = space(SpaceFamily::SUnSOn, 3);
    let basis = basis_g::<Complex64>(s.group()).unwrap();
    for _ in 0..10 {
        let phi = build_eigenfunction(&random_spec(s, &mut rng).unwrap()).unwrap();
        let x = sample(s.group(), &mut rng, 0.8).unwrap().point;
        for z in basis.iter() {
            let path = |t: f64| {
                let step = CMatrix::identity(3).add(&z.scale_re(t)).unwrap().add(&z.matmul(z).unwrap().scale_re(t * t / 2.0)).unwrap();
                phi.eval(&x.matmul(&step).unwrap()).unwrap()
            };
            let (v, d1, d2) = directional_jet(&phi, &x, z).unwrap();
            let h = 1e-4;
            let fd1 = (path(h) - path(-h)) / (2.0 * h);
            let fd2 = (path(h) - 2.0 * path(0.0) + path(-h)) / (h * h);
            let scale = v.norm().max(d1.norm()).max(d2.norm());
            assert!((d1 - fd1).norm() <= 1e-6 * scale, "{d1} vs {fd1}");
            assert!((d2 - fd2).norm() <= 1e-6 * scale, "{d2} vs {fd2}");
        }
    }
}

#[test]
fn second_derivative_matches_differences_along_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for family in SpaceFamily::ALL {
        let s = space(family, 2);
        let basis = basis_g::<Complex64>(s.group()).unwrap();
        let phi = build_eigenfunction(&random_spec(s, &mut rng).unwrap()).unwrap();
        let x = sample(s.group(), &mut rng, 0.8).unwrap().point;
        for z in basis.iter() {
            let f = |t: f64| phi.eval(&x.matmul(&z.scale_re(t).expm().unwrap()).unwrap()).unwrap();
            let (v, _, d2) = directional_jet(&phi, &x, z).unwrap();
            let h = 1e-4;
            let fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            assert!((d2 - fd2).norm() <= 1e-5 * d2.norm().max(v.norm()), "{family}: {d2} vs {fd2}");
        }
    }
}

fn projection_residual(z: &CMatrix, basis: &AlgebraBasis) -> f64 {
    let proj = basis.iter().fold(CMatrix::zeros(z.rows(), z.cols()), |acc, b| acc.add(&b.scale_re(z.metric(b))).unwrap());
    z.sub(&proj).unwrap().max_abs()
}

#[test]
fn cartan_bracket_relations() {
    for family in SpaceFamily::ALL {
        for n in 2..=4 {
            let (k, m) = cartan_decomposition::<Complex64>(space(family, n)).unwrap();
            let mut worst: f64 = 0.0;
            for a in k.iter() {
                for b in k.iter() {
                    worst = worst.max(projection_residual(&a.bracket(b).unwrap(), &k));
                }
                for b in m.iter() {
                    worst = worst.max(projection_residual(&a.bracket(b).unwrap(), &m));
                }
            }
            for a in m.iter() {
                for b in m.iter() {
                    worst = worst.max(projection_residual(&a.bracket(b).unwrap(), &k));
                }
            }
            assert!(worst <= 1e-12, "{family}:{n} bracket residual {worst}");
        }
    }
}

fn remixed(basis: &AlgebraBasis, rng: &mut ChaCha8Rng) -> AlgebraBasis {
    use rand_distr::{Distribution, StandardNormal};
    let d = basis.len();
    let g = CMatrix::from_fn(d, d, |_, _| c(StandardNormal.sample(rng), 0.0));
    let o = g.sub(&g.transpose()).unwrap().expm().unwrap();
    AlgebraBasis {
        elements: (0..d)
            .map(|i| {
                basis.iter().enumerate().fold(CMatrix::zeros(basis.elements[0].rows(), basis.elements[0].cols()), |acc, (j, b)| {
                    acc.add(&b.scale(&o[(i, j)])).unwrap()
                })
            })
            .collect(),
    }
}

#[test]
fn tau_and_kappa_do_not_depend_on_the_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for s in [space(SpaceFamily::SUnSOn, 3), space(SpaceFamily::SO2nUn, 2), space(SpaceFamily::SpnUn, 2)] {
        let basis = basis_g::<Complex64>(s.group()).unwrap();
        let other = remixed(&basis, &mut rng);
        assert!(other.orthonormality_residual() <= 1e-12);
        let phi = build_eigenfunction(&random_spec(s, &mut rng).unwrap()).unwrap();
        for _ in 0..20 {
            let x = sample(s.group(), &mut rng, 0.8).unwrap().point;
            let (v, t1, k1) = tau_and_kappa(&phi, &x, &basis).unwrap();
            let (_, t2, k2) = tau_and_kappa(&phi, &x, &other).unwrap();
            let scale = v.norm().max(1.0);
            assert!((t1 - t2).norm() <= 1e-10 * scale && (k1 - k2).norm() <= 1e-10 * scale * scale);
        }
    }
}

#[test]
fn k_invariant_functions_descend() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for family in SpaceFamily::ALL {
        for n in 2..=3 {
            let s = space(family, n);
            let (k, m) = cartan_decomposition::<Complex64>(s).unwrap();
            let basis = basis_g::<Complex64>(s.group()).unwrap();
            let phi = build_eigenfunction(&random_spec(s, &mut rng).unwrap()).unwrap();
            for _ in 0..5 {
                let x = sample(s.group(), &mut rng, 0.8).unwrap().point;
                let (v, full, _) = tau_and_kappa(&phi, &x, &basis).unwrap();
                let scale = v.norm().max(1.0);
                for z in k.iter() {
                    let (_, d1, d2) = directional_jet(&phi, &x, z).unwrap();
                    assert!(d1.norm() <= 1e-10 * scale && d2.norm() <= 1e-10 * scale, "{s}");
                }
                let on_m = tau_subspace(&phi, &x, &m, -1).unwrap();
                assert!((full - on_m).norm() <= 1e-10 * scale, "{s}");
            }
        }
    }
}

#[test]
fn product_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for spec in [GroupSpec::new(GroupFamily::SU, 3).unwrap(), GroupSpec::new(GroupFamily::Sp, 2).unwrap()] {
        let basis = basis_g::<Complex64>(spec).unwrap();
        let f = Coordinate { j: 1, alpha: 2 };
        let g = Coordinate { j: 2, alpha: 2 };
        for _ in 0..10 {
            let x = sample(spec, &mut rng, 1.0).unwrap().point;
            let lhs = tau(&Product(f, g), &x, &basis).unwrap();
            let rhs = tau(&f, &x, &basis).unwrap() * g.eval(&x).unwrap()
                + 2.0 * kappa(&f, &g, &x, &basis).unwrap()
                + f.eval(&x).unwrap() * tau(&g, &x, &basis).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9);
        }
    }
}

#[test]
fn k_invariance_all_families_up_to_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for family in SpaceFamily::ALL {
        for n in 2..=4 {
            let spec = random_spec(space(family, n), &mut rng).unwrap();
            let s = verify_eigen(&spec, 20, 1e-8, 0.5, &mut rng).unwrap();
            assert!(s.k_invariance_residual <= 1e-10, "{family}:{n} {}", s.k_invariance_residual);
        }
    }
}

#[test]
fn symmetric_phi_kappa_identity_on_su3() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let r = check_phi_identities(PhiMap::SymmetricSU, 3, 10, 1e-9, &mut rng).unwrap();
    assert!(r.pass, "{r:?}");
}

fn random_formal_sum(rng: &mut ChaCha8Rng) -> FormalSum {
    use rand::Rng;
    let terms = rng.random_range(1..=3);
    (0..terms).fold(FormalSum::zero(), |acc, _| {
        let coeff = rc(rat(rng.random_range(-5..=5), rng.random_range(1..=4)), rat(rng.random_range(-3..=3), 2));
        let a = rat(rng.random_range(-4..=4), rng.random_range(1..=2));
        acc.add(&FormalSum::term(coeff, a, rng.random_range(0..=2)))
    })
}

/// `ψ = φ^s` is again an eigenfunction, with `(λs + μs(s−1), μs²)`; random `s`
/// therefore gives random rational `(λ, μ)` realized by an actual function.
#[test]
fn formal_tau_matches_numeric_tau() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let s3 = space(SpaceFamily::SUnSOn, 3);
    let basis = basis_g::<Complex64>(s3.group()).unwrap();
    let (lambda, mu): (RationalComplex, RationalComplex) = (rc(rat(-20, 3), rat(0, 1)), rc(rat(-8, 3), rat(0, 1)));
    for _ in 0..8 {
        let phi = build_eigenfunction(&random_spec(s3, &mut rng).unwrap()).unwrap();
        let s: BigRational = rat(rng.random_range(1..=5) * if rng.random_bool(0.5) { 1 } else { -1 }, rng.random_range(1..=3));
        let sc = rc(s.clone(), rat(0, 1));
        let one = rc(rat(1, 1), rat(0, 1));
        let l2 = lambda.clone() * sc.clone() + mu.clone() * sc.clone() * (sc.clone() - one.clone());
        let m2 = mu.clone() * sc.clone() * sc.clone();
        let power = FormalSum::term(one.clone(), s, 0);
        let psi = Composed { formal: &power, inner: &phi };
        let sum = random_formal_sum(&mut rng);
        let outer = Composed { formal: &sum, inner: &psi };
        let expected_sum = tau_formal(&sum, &l2, &m2);
        let mut checked = 0;
        while checked < 10 {
            let x = sample(s3.group(), &mut rng, 0.6).unwrap().point;
            let w = psi.eval(&x).unwrap();
            if !on_admissible_domain(phi.eval(&x).unwrap()) || !on_admissible_domain(w) {
                continue;
            }
            let numeric = tau(&outer, &x, &basis).unwrap();
            let formal = evaluate_formal(&expected_sum, &w).unwrap();
            assert!((numeric - formal).norm() <= 1e-7 * formal.norm().max(1.0), "{sum}: {numeric} vs {formal}");
            checked += 1;
        }
    }
}

#[test]
fn matrix_roundtrip_through_jets() {
    let x = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
    assert_eq!(Matrix::<Jet>::lift(&x).values(), x);
}
