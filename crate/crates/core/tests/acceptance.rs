//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use lieharm::eigen::{eigenfunction_unchecked, isotropy_defect, kappa_defect, verify_eigen, EigenfunctionSpec};
use lieharm::harness::{run, Record, RunConfig, Suite, VerificationReport};
use lieharm::identities::{check_generator_sums, check_kappa_basis_decomposition, check_skew_lemma};
use lieharm::lie::{sample, SpaceFamily, SymmetricSpace};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn config(suite: Suite) -> RunConfig {
    RunConfig { suites: vec![suite], ..RunConfig::default() }
}

fn timed_run(cfg: &RunConfig) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let report = run(cfg).expect("suite runs");
    (report, start.elapsed())
}

fn named<'a>(report: &'a VerificationReport, name: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
    report.records.iter().filter(move |r| r.name == name)
}

fn worst(report: &VerificationReport, name: &str) -> f64 {
    named(report, name).map(|r| r.residual).fold(0.0, f64::max)
}

fn count(report: &VerificationReport, name: &str) -> usize {
    named(report, name).count()
}

fn eigen_spaces(report: &VerificationReport) -> usize {
    let mut spaces: Vec<&str> = named(report, "eigen.tau").filter_map(|r| r.params["space"].as_str()).collect();
    spaces.sort();
    spaces.dedup();
    spaces.len()
}

fn eigen_equations(report: &VerificationReport, elapsed: Duration) -> Outcome {
    let (t, k) = (worst(report, "eigen.tau"), worst(report, "eigen.kappa"));
    let records = count(report, "eigen.tau");
    let pass = t <= 1e-8 && k <= 1e-8 && records == 36 && eigen_spaces(report) == 12 && elapsed <= Duration::from_secs(120);
    outcome(pass, format!("12 spaces x 3 draws x 50 points, tau {t:.1e}, kappa {k:.1e}, {:.1} s", elapsed.as_secs_f64()))
}

fn k_invariance(report: &VerificationReport) -> Outcome {
    let r = worst(report, "eigen.k_invariance");
    outcome(r <= 1e-10 && count(report, "eigen.k_invariance") == 36, format!("max |phi(xk) - phi(x)| {r:.1e}"))
}

fn pharmonic() -> Outcome {
    let mut cfg = config(Suite::Pharmonic);
    cfg.p_max = 6;
    let (report, elapsed) = timed_run(&cfg);
    let certs: Vec<&Record> = named(&report, "pharmonic.certificate").collect();
    let synthetic = certs.iter().filter(|r| r.params["space"].as_str().is_some_and(|s| s.starts_with("synthetic:"))).count();
    let family = certs.len() - synthetic;
    let failed = certs.iter().filter(|r| !r.pass).count();
    let pass = family == 96 && synthetic == 12 && failed == 0 && elapsed <= Duration::from_secs(10);
    outcome(pass, format!("{family} family + {synthetic} synthetic certificates, {failed} failed, {:.2} s", elapsed.as_secs_f64()))
}

fn crosscheck() -> Outcome {
    let cfg = config(Suite::Crosscheck);
    let (report, elapsed) = timed_run(&cfg);
    let at_two = |name| named(&report, name).filter(|r| r.params["p"] == 2).map(|r| r.residual).fold(0.0, f64::max);
    let spaces = named(&report, "crosscheck.tau_p").filter(|r| r.params["p"] == 2).count();
    let skipped = report.records.iter().any(|r| r.note.as_deref().is_some_and(|n| n.starts_with("skipped")));
    let (null, matched) = (at_two("crosscheck.tau_p"), worst(&report, "crosscheck.formal_match"));
    let pass = spaces == 2 && !skipped && null <= 1e-6 && matched <= 1e-7 && elapsed <= Duration::from_secs(60);
    outcome(pass, format!("|tau^2| {null:.1e}, formal match {matched:.1e}, {:.1} s", elapsed.as_secs_f64()))
}

fn coordinate_identities() -> Outcome {
    let (report, _) = timed_run(&config(Suite::Identities));
    let names = ["identities.coordinate_so", "identities.coordinate_su", "identities.coordinate_sp"];
    let records: Vec<&Record> = names.iter().flat_map(|n| named(&report, n)).collect();
    let r = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let pass = records.len() == 6 && records.iter().all(|r| r.pass && r.params["tol"] == 1e-9);
    outcome(pass, format!("{} groups, 20 points, max residual {r:.1e}", records.len()))
}

fn generator_sums() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut results = Vec::new();
    for n in 2..=6 {
        results.extend(check_generator_sums(n).expect("generator sums"));
        let [exact, _] = check_kappa_basis_decomposition(n, 0, 1e-9, &mut rng).expect("decomposition");
        results.push(exact);
    }
    let elapsed = start.elapsed();
    let nonzero = results.iter().filter(|r| r.residual != 0.0 || !r.exact).count();
    let pass = nonzero == 0 && elapsed <= Duration::from_secs(5);
    outcome(pass, format!("{} exact checks for n = 2..6, {nonzero} nonzero, {:.2} s", results.len(), elapsed.as_secs_f64()))
}

fn skew_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let [coincident, control] = check_skew_lemma(1000, 6, &mut rng).expect("skew lemma");
    let pass = coincident.residual <= 1e-12 && control.residual <= 0.1;
    outcome(
        pass,
        format!(
            "coincident max {:.1e}, all-distinct within 0.1 in {:.1}% of draws",
            coincident.residual,
            100.0 * control.residual
        ),
    )
}

fn non_isotropic_control() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_unscaled: f64 = 0.0;
    let mut worst_normalized: f64 = 0.0;
    let mut dual_ok = true;
    for n in [2usize, 3] {
        let a = vec![Complex64::new(1.0, 0.3), Complex64::new(-0.4, 0.7), Complex64::new(0.5, -0.2)];
        let sum_sq: Complex64 = a.iter().map(|z| z * z).sum();
        assert!(isotropy_defect(&a).norm() > 0.1);
        let indices = Some((1, 2, 2 * n));
        let so = SymmetricSpace::new(SpaceFamily::SO2nUn, n).unwrap();
        let normalized = eigenfunction_unchecked(&EigenfunctionSpec::new_unchecked(so, a.clone(), indices));
        let mut unscaled = normalized.clone();
        unscaled.a_matrix = unscaled.a_matrix.scale_re(std::f64::consts::SQRT_2);
        for _ in 0..20 {
            let x = sample(so.group(), &mut rng, 0.8).unwrap().point;
            // residual μφ² − κ against the predicted −4Σa²
            let residual = -kappa_defect(&unscaled, &x).unwrap();
            worst_unscaled = worst_unscaled.max((residual + 4.0 * sum_sq).norm());
            let residual = -kappa_defect(&normalized, &x).unwrap();
            worst_normalized = worst_normalized.max((residual + 2.0 * sum_sq).norm());
        }
        let su = SymmetricSpace::new(SpaceFamily::SU2nSpn, n).unwrap();
        let spec = EigenfunctionSpec::new(su, a, indices).expect("SU(2n)/Sp(n) accepts any a");
        let s = verify_eigen(&spec, 50, 1e-8, 0.5, &mut rng).unwrap();
        dual_ok &= s.pass;
    }
    let pass = worst_unscaled <= 1e-9 && dual_ok;
    outcome(
        pass,
        format!(
            "SO(2n)/U(n) n=2,3: |(mu phi^2 - kappa) + 4 sum a^2| {worst_unscaled:.1e} (normalized generators: offset 2 sum a^2 to {worst_normalized:.1e}); SU(2n)/Sp(n) eigen {}",
            if dual_ok { "ok" } else { "failed" }
        ),
    )
}

fn duality() -> Outcome {
    let (report, elapsed) = timed_run(&config(Suite::Dual));
    let (t, k, p2) = (worst(&report, "dual.tau"), worst(&report, "dual.kappa"), worst(&report, "dual.phi2"));
    let sigma_ok = named(&report, "dual.tau").all(|r| r.params["sigma"] == 0.2);
    let pass = count(&report, "dual.tau") == 6 && sigma_ok && t <= 1e-7 && k <= 1e-7 && p2 <= 1e-5 && elapsed <= Duration::from_secs(60);
    outcome(pass, format!("tau {t:.1e}, kappa {k:.1e}, |tau^2 Phi_2| {p2:.1e}, {:.1} s", elapsed.as_secs_f64()))
}

fn stripped(report: &VerificationReport) -> String {
    let mut v = serde_json::to_value(report).unwrap();
    v["timestamp"] = Value::Null;
    for r in v["records"].as_array_mut().unwrap() {
        r["ms"] = Value::Null;
    }
    v.to_string()
}

fn determinism() -> Outcome {
    let cfg = RunConfig { seed: 42, ..RunConfig::default() };
    let (a, _) = timed_run(&cfg);
    let (b, _) = timed_run(&RunConfig { jobs: Some(2), ..cfg });
    outcome(stripped(&a) == stripped(&b) && !a.records.is_empty(), format!("{} records compared", a.records.len()))
}

fn main() {
    let (eigen, eigen_time) = timed_run(&config(Suite::Eigen));
    type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("eigen equations", Box::new(|| eigen_equations(&eigen, eigen_time))),
        ("K-invariance", Box::new(|| k_invariance(&eigen))),
        ("exact p-harmonicity", Box::new(pharmonic)),
        ("symbolic-numeric cross-check", Box::new(crosscheck)),
        ("coordinate-function identities", Box::new(coordinate_identities)),
        ("generator sums and symplectic decomposition", Box::new(generator_sums)),
        ("skew-symmetric index lemma", Box::new(skew_lemma)),
        ("non-isotropic negative control", Box::new(non_isotropic_control)),
        ("duality", Box::new(duality)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (label, check)) in criteria.into_iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<46} {}  {}", i + 1, label, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
