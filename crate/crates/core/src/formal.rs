//! Exact algebra of linear combinations of `φ^a (log φ)^b`.
//!
//! For an eigenfunction (`τφ = λφ`, `κ(φ,φ) = μφ²`) the chain rule
//! `τ(F∘φ) = F′(φ)τ(φ) + F″(φ)κ(φ,φ)` maps this algebra into itself, so
//! iterated Laplacians of the p-harmonic candidates can be computed and
//! compared with zero exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::diffops::GroupFunction;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Analytic, RationalComplex};

/// Key of a monomial `φ^a L^b` with `L = log φ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub a: BigRational,
    pub b: u32,
}

/// Canonical exact sum `Σ c·φ^a·(log φ)^b`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<Monomial, RationalComplex>,
}

fn rc_zero() -> RationalComplex {
    Complex::new(BigRational::zero(), BigRational::zero())
}

fn rc_from(q: BigRational) -> RationalComplex {
    Complex::new(q, BigRational::zero())
}

fn rc_is_zero(c: &RationalComplex) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

fn to_c64(c: &RationalComplex) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    /// The single term `coeff·φ^a·L^b`.
    pub fn term(coeff: RationalComplex, a: BigRational, b: u32) -> Self {
        let mut s = FormalSum::zero();
        s.add_term(Monomial { a, b }, coeff);
        s
    }

    /// The constant function 1.
    pub fn one() -> Self {
        FormalSum::term(rc_from(BigRational::one()), BigRational::zero(), 0)
    }

    fn add_term(&mut self, key: Monomial, coeff: RationalComplex) {
        if rc_is_zero(&coeff) {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(rc_zero);
        *entry = entry.clone() + coeff;
        if rc_is_zero(entry) {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalComplex)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: &BigRational, b: u32) -> RationalComplex {
        self.terms.get(&Monomial { a: a.clone(), b }).cloned().unwrap_or_else(rc_zero)
    }

    pub fn add(&self, o: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RationalComplex) -> FormalSum {
        let mut out = FormalSum::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Distinct φ-exponents and the largest log-power present.
    pub fn footprint(&self) -> (Vec<BigRational>, Option<u32>) {
        let mut exps: Vec<BigRational> = self.terms.keys().map(|k| k.a.clone()).collect();
        exps.dedup();
        (exps, self.terms.keys().map(|k| k.b).max())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    q.to_string()
}

fn fmt_coeff(c: &RationalComplex) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re),
        (true, false) => format!("{}i", fmt_rational(&c.im)),
        (false, false) => {
            let sign = if c.im.is_negative() { '-' } else { '+' };
            format!("({}{}{}i)", fmt_rational(&c.re), sign, fmt_rational(&c.im.abs()))
        }
    }
}

/// Stable text form: `c * phi^(a) * log^b` terms joined by ` + `, ordered by
/// `(a, b)`; the empty sum prints as `0`.
impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("{} * phi^({}) * log^{}", fmt_coeff(c), fmt_rational(&k.a), k.b))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn q(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Applies τ termwise:
/// `τ(φ^a L^b) = [λa + μa(a−1)] φ^a L^b + [λb + μb(2a−1)] φ^a L^{b−1} + μb(b−1) φ^a L^{b−2}`.
pub fn tau_formal(s: &FormalSum, lambda: &RationalComplex, mu: &RationalComplex) -> FormalSum {
    let mut out = FormalSum::zero();
    for (k, c) in &s.terms {
        let a = rc_from(k.a.clone());
        let b = rc_from(q(k.b as i64));
        let one = rc_from(q(1));
        let two = rc_from(q(2));

        let c0 = lambda.clone() * a.clone() + mu.clone() * a.clone() * (a.clone() - one.clone());
        out.add_term(k.clone(), c.clone() * c0);
        if k.b >= 1 {
            let c1 = lambda.clone() * b.clone() + mu.clone() * b.clone() * (two * a.clone() - one.clone());
            out.add_term(Monomial { a: k.a.clone(), b: k.b - 1 }, c.clone() * c1);
        }
        if k.b >= 2 {
            let c2 = mu.clone() * b.clone() * (b - one);
            out.add_term(Monomial { a: k.a.clone(), b: k.b - 2 }, c.clone() * c2);
        }
    }
    out
}

/// Which of the three constructions applies to `(λ, μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiCase {
    /// μ = 0, λ ≠ 0: `c₁ L^{p−1}`
    MuZero,
    /// μ ≠ 0, λ = μ: `c₁ L^{2p−1} + c₂ L^{2p−2}`
    LambdaEqualsMu,
    /// μ ≠ 0, λ ≠ μ: `c₁ φ^{1−λ/μ} L^{p−1} + c₂ L^{p−1}`
    Generic,
}

pub fn phi_case(lambda: &RationalComplex, mu: &RationalComplex) -> Result<PhiCase> {
    match (rc_is_zero(lambda), rc_is_zero(mu)) {
        (true, true) => Err(Error::Validation("lambda and mu are both zero".into())),
        (_, true) => Ok(PhiCase::MuZero),
        _ if lambda == mu => Ok(PhiCase::LambdaEqualsMu),
        _ => Ok(PhiCase::Generic),
    }
}

/// The exponent `1 − λ/μ`; must be rational.
pub fn generic_exponent(lambda: &RationalComplex, mu: &RationalComplex) -> Result<BigRational> {
    let ratio = lambda.clone() / mu.clone();
    if !ratio.im.is_zero() {
        return Err(Error::Validation(format!("lambda/mu = {} is not real rational", fmt_coeff(&ratio))));
    }
    Ok(BigRational::one() - ratio.re)
}

/// The candidate proper p-harmonic function built from an eigenfunction with eigenvalues `(λ, μ)`.
pub fn build_phi_p(
    p: u32,
    lambda: &RationalComplex,
    mu: &RationalComplex,
    c1: &RationalComplex,
    c2: &RationalComplex,
) -> Result<FormalSum> {
    if p == 0 {
        return Err(Error::Validation("p must be at least 1".into()));
    }
    let zero = BigRational::zero();
    Ok(match phi_case(lambda, mu)? {
        PhiCase::MuZero => FormalSum::term(c1.clone(), zero, p - 1),
        PhiCase::LambdaEqualsMu => {
            FormalSum::term(c1.clone(), zero.clone(), 2 * p - 1).add(&FormalSum::term(c2.clone(), zero, 2 * p - 2))
        }
        PhiCase::Generic => {
            let a = generic_exponent(lambda, mu)?;
            FormalSum::term(c1.clone(), a, p - 1).add(&FormalSum::term(c2.clone(), zero, p - 1))
        }
    })
}

/// Outcome of iterating τ on a formal sum.
#[derive(Clone, Debug, PartialEq)]
pub struct PHarmonicCertificate {
    pub p: u32,
    /// τ^p(S) is the empty sum.
    pub null_at_p: bool,
    /// τ^{p−1}(S) has a nonzero coefficient.
    pub nonzero_at_p_minus_1: bool,
    /// τ^{p−1}(S).
    pub witness: FormalSum,
}

impl PHarmonicCertificate {
    pub fn is_proper(&self) -> bool {
        self.null_at_p && self.nonzero_at_p_minus_1
    }
}

pub fn tau_formal_iterated(s: &FormalSum, lambda: &RationalComplex, mu: &RationalComplex, k: u32) -> FormalSum {
    (0..k).fold(s.clone(), |acc, _| tau_formal(&acc, lambda, mu))
}

pub fn verify_p_harmonic(s: &FormalSum, lambda: &RationalComplex, mu: &RationalComplex, p: u32) -> Result<PHarmonicCertificate> {
    if p == 0 {
        return Err(Error::Validation("p must be at least 1".into()));
    }
    let witness = tau_formal_iterated(s, lambda, mu, p - 1);
    let last = tau_formal(&witness, lambda, mu);
    Ok(PHarmonicCertificate {
        p,
        null_at_p: last.is_zero(),
        nonzero_at_p_minus_1: !witness.is_zero(),
        witness,
    })
}

/// Builds `Φ_p` and certifies it, checking after every τ step that only the
/// exponents `{0, 1 − λ/μ}` and log-powers up to `2p − 1` occur.
pub fn certify_phi_p(
    p: u32,
    lambda: &RationalComplex,
    mu: &RationalComplex,
    c1: &RationalComplex,
    c2: &RationalComplex,
) -> Result<(FormalSum, PHarmonicCertificate)> {
    let phi_p = build_phi_p(p, lambda, mu, c1, c2)?;
    let mut allowed = vec![BigRational::zero()];
    if phi_case(lambda, mu)? == PhiCase::Generic {
        allowed.push(generic_exponent(lambda, mu)?);
    }
    let mut current = phi_p.clone();
    for step in 0..=p {
        let (exps, max_b) = current.footprint();
        if exps.iter().any(|a| !allowed.contains(a)) || max_b.is_some_and(|b| b > 2 * p - 1) {
            return Err(Error::Validation(format!("tau^{step} of Phi_{p} left the closed footprint: {current}")));
        }
        if step < p {
            current = tau_formal(&current, lambda, mu);
        }
    }
    let cert = verify_p_harmonic(&phi_p, lambda, mu, p)?;
    Ok((phi_p, cert))
}

/// `Σ c·w^a·(log w)^b` with principal branches.
pub fn evaluate_formal<S: Analytic>(s: &FormalSum, w: &S) -> Result<S> {
    if w.value() == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("formal sum evaluated at phi = 0".into()));
    }
    let log = w.ln()?;
    let mut acc = S::zero();
    for (k, c) in &s.terms {
        let mut t = if k.a.is_zero() { S::one() } else { w.powq(&k.a)? };
        for _ in 0..k.b {
            t = t * log.clone();
        }
        acc = acc + t.scale(to_c64(c));
    }
    Ok(acc)
}

/// `x ↦ S(f(x))`: a formal sum composed with a group function.
#[derive(Clone, Debug)]
pub struct Composed<'a, F> {
    pub formal: &'a FormalSum,
    pub inner: F,
}

impl<F: GroupFunction> GroupFunction for Composed<'_, F> {
    fn eval<S: Analytic>(&self, x: &Matrix<S>) -> Result<S> {
        evaluate_formal(self.formal, &self.inner.eval(x)?)
    }

    fn k_invariant(&self) -> bool {
        self.inner.k_invariant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rc, Jet};
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> RationalComplex {
        rc(rat(n, d), rat(0, 1))
    }

    fn log_phi() -> FormalSum {
        FormalSum::term(r(1, 1), rat(0, 1), 1)
    }

    fn phi() -> FormalSum {
        FormalSum::term(r(1, 1), rat(1, 1), 0)
    }

    #[test]
    fn certified_cases() {
        for (l, m) in [(r(-20, 3), r(-8, 3)), (r(-3, 1), r(0, 1)), (r(-2, 1), r(-2, 1))] {
            for p in 1..=6 {
                let (_, cert) = certify_phi_p(p, &l, &m, &r(1, 1), &r(1, 1)).unwrap();
                assert!(cert.is_proper(), "p={p}");
            }
        }
    }

    #[test]
    fn tau_of_log_is_lambda_minus_mu() {
        let (l, m) = (r(-20, 3), r(-8, 3));
        let t = tau_formal(&log_phi(), &l, &m);
        assert_eq!(t, FormalSum::term(r(-4, 1), rat(0, 1), 0));
    }

    #[test]
    fn tau_of_phi_is_lambda_phi() {
        let (l, m) = (r(-6, 1), r(-2, 1));
        assert_eq!(tau_formal(&phi(), &l, &m), phi().scale(&l));
    }

    #[test]
    fn generic_power_is_harmonic() {
        let (l, m) = (r(-20, 3), r(-8, 3));
        let a = generic_exponent(&l, &m).unwrap();
        assert_eq!(a, rat(-3, 2));
        assert!(tau_formal(&FormalSum::term(r(1, 1), a, 0), &l, &m).is_zero());
    }

    #[test]
    fn phi_p_examples() {
        let one = r(1, 1);
        let zero = r(0, 1);
        let s = build_phi_p(1, &r(-6, 1), &r(-2, 1), &one, &one).unwrap();
        assert_eq!(s.to_string(), "1 * phi^(-2) * log^0 + 1 * phi^(0) * log^0");

        let s = build_phi_p(2, &one, &zero, &one, &zero).unwrap();
        assert_eq!(s, log_phi());

        let s = build_phi_p(2, &one, &one, &one, &zero).unwrap();
        assert_eq!(s, FormalSum::term(one.clone(), rat(0, 1), 3));

        assert!(matches!(build_phi_p(2, &zero, &zero, &one, &one), Err(Error::Validation(_))));
    }

    #[test]
    fn phi_is_never_polyharmonic() {
        let (l, m) = (r(-4, 1), r(-2, 1));
        for p in 1..=6 {
            let cert = verify_p_harmonic(&phi(), &l, &m, p).unwrap();
            assert!(!cert.null_at_p);
        }
    }

    #[test]
    fn constant_is_harmonic() {
        let cert = verify_p_harmonic(&FormalSum::one(), &r(-4, 1), &r(-2, 1), 1).unwrap();
        assert!(cert.is_proper());
    }

    #[test]
    fn evaluate_examples() {
        let s = phi().add(&FormalSum::one());
        let v = evaluate_formal(&s, &Complex64::new(2.0, 0.0)).unwrap();
        assert!((v - 3.0).norm() < 1e-15);
        let v = evaluate_formal(&log_phi(), &Complex64::new(std::f64::consts::E, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        assert!(evaluate_formal(&log_phi(), &Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn evaluate_on_jets_matches_chain_rule() {
        // d/dt log(2 + 3t) at 0 = 3/2
        let w = Jet::univariate(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0));
        let v = evaluate_formal(&log_phi(), &w).unwrap();
        assert!((v.coeff(&[1]) - 1.5).norm() < 1e-15);
    }

    #[test]
    fn complex_coefficients_print_stably() {
        let s = FormalSum::term(rc(rat(1, 2), rat(-3, 4)), rat(-5, 2), 3)
            .add(&FormalSum::term(rc(rat(0, 1), rat(2, 1)), rat(0, 1), 1));
        assert_eq!(s.to_string(), "(1/2-3/4i) * phi^(-5/2) * log^3 + 2i * phi^(0) * log^1");
    }

    fn arb_rc() -> impl Strategy<Value = RationalComplex> {
        (-20i64..20, 1i64..8, -20i64..20, 1i64..8).prop_map(|(a, b, c, d)| rc(rat(a, b), rat(c, d)))
    }

    fn arb_sum() -> impl Strategy<Value = FormalSum> {
        prop::collection::vec((arb_rc(), -6i64..6, 1i64..4, 0u32..5), 0..5).prop_map(|ts| {
            ts.into_iter()
                .fold(FormalSum::zero(), |acc, (c, an, ad, b)| acc.add(&FormalSum::term(c, rat(an, ad), b)))
        })
    }

    proptest! {
        #[test]
        fn tau_formal_is_linear(s in arb_sum(), t in arb_sum(), al in arb_rc(), be in arb_rc(),
                                l in arb_rc(), m in arb_rc()) {
            let lhs = tau_formal(&s.scale(&al).add(&t.scale(&be)), &l, &m);
            let rhs = tau_formal(&s, &l, &m).scale(&al).add(&tau_formal(&t, &l, &m).scale(&be));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sums_are_canonical(s in arb_sum()) {
            prop_assert!(s.terms().all(|(_, c)| !rc_is_zero(c)));
            prop_assert!(s.add(&s.scale(&r(-1, 1))).is_zero());
        }
    }
}
