//! Suite composition and execution.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{RunConfig, SpaceSel, Suite};
use super::report::{report_write, Record, VerificationReport};
use super::rng::substream;
use crate::diffops::{tau_iterated_with_budget, GroupFunction};
use crate::eigen::{
    eigenfunction_unchecked, expected_eigenvalues, on_admissible_domain, random_spec, replay_eigen,
    verify_dual, verify_eigen, EigenWitness, EigenfunctionSpec,
};
use crate::error::{Error, Result};
use crate::formal::{build_phi_p, certify_phi_p, evaluate_formal, tau_formal_iterated, Composed};
use crate::identities::{
    check_coordinate_identities, check_embedding_determinant, check_generator_sums, check_kappa_basis_decomposition,
    check_phi_identities, check_skew_lemma, check_sp_invariant_form, check_symmetric_skew_traceless,
    missing_identities, IdentityCheckResult, PhiMap,
};
use crate::lie::{basis_g, sample, GroupFamily, SpaceFamily, SymmetricSpace};
use crate::scalar::{rat, rc, RationalComplex};

/// Random parameter draws per space in the eigen and dual suites.
pub const EIGEN_DRAWS: u64 = 3;
/// K-invariance tolerance relative to the suite tolerance (1e-10 at the default 1e-8).
pub const K_TOL_FACTOR: f64 = 1e-2;
/// Dual Φ₂ tolerance relative to the dual suite tolerance (1e-5 at 1e-7).
pub const PHI2_TOL_FACTOR: f64 = 1e2;
/// Formal/numeric agreement tolerance relative to the crosscheck tolerance (1e-7 at 1e-6).
pub const MATCH_TOL_FACTOR: f64 = 1e-1;
/// Highest iterate compared numerically in the crosscheck suite.
pub const CROSSCHECK_P: u32 = 2;
/// Largest n for the exact identity checks.
pub const EXACT_MAX_N: usize = 6;
pub const SKEW_DRAWS: usize = 1000;
pub const SKEW_N: usize = 6;
/// Sample points for the numeric half of the symplectic κ decomposition (n ≤ 3).
pub const KAPPA_POINTS: usize = 10;

const ALL_234: &[usize] = &[2, 3, 4];
const ALL_2345: &[usize] = &[2, 3, 4, 5];

pub const EIGEN_DEFAULTS: &[(SpaceFamily, &[usize])] = &[
    (SpaceFamily::SUnSOn, ALL_234),
    (SpaceFamily::SpnUn, ALL_234),
    (SpaceFamily::SO2nUn, ALL_234),
    (SpaceFamily::SU2nSpn, ALL_234),
];
pub const DUAL_DEFAULTS: &[(SpaceFamily, &[usize])] = &[(SpaceFamily::SUnSOn, &[2, 3])];
pub const PHARMONIC_DEFAULTS: &[(SpaceFamily, &[usize])] = &[
    (SpaceFamily::SUnSOn, ALL_2345),
    (SpaceFamily::SpnUn, ALL_2345),
    (SpaceFamily::SO2nUn, ALL_2345),
    (SpaceFamily::SU2nSpn, ALL_2345),
];
pub const CROSSCHECK_DEFAULTS: &[(SpaceFamily, &[usize])] = &[(SpaceFamily::SUnSOn, &[3]), (SpaceFamily::SpnUn, &[2])];
pub const IDENTITY_DEFAULTS: &[(GroupFamily, &[usize])] =
    &[(GroupFamily::SO, &[3, 4]), (GroupFamily::SU, &[2, 3]), (GroupFamily::Sp, &[2, 3])];

type TaskFn = Box<dyn Fn() -> Result<Vec<Record>> + Send + Sync>;

struct Task {
    label: String,
    run: TaskFn,
}

fn task(label: String, run: impl Fn() -> Result<Vec<Record>> + Send + Sync + 'static) -> Task {
    Task { label, run: Box::new(run) }
}

fn c64_json(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn eigen_witness(spec: &EigenfunctionSpec, w: &EigenWitness, kind: &str) -> Value {
    json!({
        "kind": kind,
        "space": spec.space.to_string(),
        "a": spec.a.iter().map(c64_json).collect::<Vec<_>>(),
        "indices": spec.indices.map(|(r, s, q)| vec![r, s, q]),
        "group_coeffs": w.group_coeffs,
    })
}

fn space_from_str(s: &str) -> Result<SymmetricSpace> {
    let sel: SpaceSel = s.parse()?;
    match (sel.family, sel.n) {
        (super::config::Family::Space(f), Some(n)) => SymmetricSpace::new(f, n),
        _ => Err(Error::Usage(format!("witness space '{s}' is not a symmetric space with n"))),
    }
}

/// Recomputes the residual recorded with an eigen witness.
pub fn replay_witness(witness: &Value) -> Result<f64> {
    let bad = |what: &str| Error::Usage(format!("malformed witness: {what}"));
    let space = space_from_str(witness["space"].as_str().ok_or_else(|| bad("space"))?)?;
    let a = witness["a"]
        .as_array()
        .ok_or_else(|| bad("a"))?
        .iter()
        .map(|z| Some(Complex64::new(z.get(0)?.as_f64()?, z.get(1)?.as_f64()?)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("a"))?;
    let indices = match &witness["indices"] {
        Value::Null => None,
        Value::Array(v) if v.len() == 3 => {
            let i = |k: usize| v[k].as_u64().map(|x| x as usize).ok_or_else(|| bad("indices"));
            Some((i(0)?, i(1)?, i(2)?))
        }
        _ => return Err(bad("indices")),
    };
    let group_coeffs = witness["group_coeffs"]
        .as_array()
        .ok_or_else(|| bad("group_coeffs"))?
        .iter()
        .map(Value::as_f64)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("group_coeffs"))?;
    let spec = EigenfunctionSpec::new_unchecked(space, a, indices);
    let w = EigenWitness { group_coeffs, tau_residual: 0.0, kappa_residual: 0.0 };
    let (t, k) = replay_eigen(&spec, &w)?;
    match witness["kind"].as_str() {
        Some("tau") => Ok(t),
        Some("kappa") => Ok(k),
        _ => Err(bad("kind")),
    }
}

fn eigen_tasks(cfg: &RunConfig) -> Result<Vec<Task>> {
    let p = cfg.params(Suite::Eigen);
    let seed = cfg.seed;
    let mut tasks = Vec::new();
    for space in cfg.resolve_spaces(EIGEN_DEFAULTS)? {
        for draw in 0..EIGEN_DRAWS {
            tasks.push(task(format!("eigen/{space}/{draw}"), move || {
                let mut rng = substream(seed, &format!("eigen/{space}"), draw);
                let spec = random_spec(space, &mut rng)?;
                let s = verify_eigen(&spec, p.samples, p.tol, p.sigma, &mut rng)?;
                let base = |name: &str, residual: f64, tol: f64| {
                    let mut r = Record::new(name, residual, residual <= tol)
                        .param("space", space.to_string())
                        .param("draw", draw)
                        .param("samples", p.samples)
                        .param("tol", tol);
                    if s.excluded > 0 {
                        r = r.note(format!("{} samples with |phi| < 1e-10 excluded", s.excluded));
                    }
                    if let Some(w) = &s.warning {
                        r = r.note(w.clone());
                    }
                    r
                };
                let mut tau = base("eigen.tau", s.tau_residual, p.tol);
                let mut kap = base("eigen.kappa", s.kappa_residual, p.tol);
                if !tau.pass {
                    tau.witness = s.worst_tau.as_ref().map(|w| eigen_witness(&spec, w, "tau"));
                }
                if !kap.pass {
                    kap.witness = s.worst_kappa.as_ref().map(|w| eigen_witness(&spec, w, "kappa"));
                }
                let kinv = base("eigen.k_invariance", s.k_invariance_residual, p.tol * K_TOL_FACTOR);
                Ok(vec![tau, kap, kinv])
            }));
        }
    }
    Ok(tasks)
}

fn dual_tasks(cfg: &RunConfig) -> Result<Vec<Task>> {
    let p = cfg.params(Suite::Dual);
    let seed = cfg.seed;
    let mut tasks = Vec::new();
    for space in cfg.resolve_spaces(DUAL_DEFAULTS)? {
        for draw in 0..EIGEN_DRAWS {
            tasks.push(task(format!("dual/{space}/{draw}"), move || {
                let mut rng = substream(seed, &format!("dual/{space}"), draw);
                let spec = random_spec(space, &mut rng)?;
                let phi2_tol = p.tol * PHI2_TOL_FACTOR;
                let s = verify_dual(&spec, p.samples, p.tol, phi2_tol, p.sigma, &mut rng)?;
                let rec = |name: &str, residual: f64, tol: f64| {
                    Record::new(name, residual, residual <= tol)
                        .param("space", space.to_string())
                        .param("draw", draw)
                        .param("samples", p.samples)
                        .param("sigma", p.sigma)
                        .param("tol", tol)
                };
                Ok(vec![
                    rec("dual.tau", s.tau_residual, p.tol),
                    rec("dual.kappa", s.kappa_residual, p.tol),
                    rec("dual.phi2", s.phi2_residual, phi2_tol),
                ])
            }));
        }
    }
    Ok(tasks)
}

fn certificate_records(label: String, lambda: RationalComplex, mu: RationalComplex, p_max: u32) -> Result<Vec<Record>> {
    let one = rc(rat(1, 1), rat(0, 1));
    let mut out = Vec::new();
    for p in 1..=p_max {
        let (phi, cert) = certify_phi_p(p, &lambda, &mu, &one, &one)?;
        let mut r = Record::new("pharmonic.certificate", if cert.is_proper() { 0.0 } else { 1.0 }, cert.is_proper())
            .param("space", label.clone())
            .param("p", p);
        if !cert.null_at_p {
            r = r.note(format!("tau^p of {phi} is not zero"));
        } else if !cert.nonzero_at_p_minus_1 {
            r = r.note(format!("tau^(p-1) of {phi} vanishes"));
        }
        out.push(r);
    }
    Ok(out)
}

fn pharmonic_tasks(cfg: &RunConfig) -> Result<Vec<Task>> {
    let p_max = cfg.p_max;
    let mut tasks = Vec::new();
    for space in cfg.resolve_spaces(PHARMONIC_DEFAULTS)? {
        tasks.push(task(format!("pharmonic/{space}"), move || {
            let (lambda, mu) = expected_eigenvalues(space);
            certificate_records(space.to_string(), lambda, mu, p_max)
        }));
    }
    let synthetic = [("synthetic:mu_zero", rat(-3, 1), rat(0, 1)), ("synthetic:lambda_equals_mu", rat(-2, 1), rat(-2, 1))];
    for (label, l, m) in synthetic {
        tasks.push(task(format!("pharmonic/{label}"), move || {
            let zero = rat(0, 1);
            certificate_records(label.to_string(), rc(l.clone(), zero.clone()), rc(m.clone(), zero), p_max)
        }));
    }
    Ok(tasks)
}

fn crosscheck_tasks(cfg: &RunConfig) -> Result<Vec<Task>> {
    let params = cfg.params(Suite::Crosscheck);
    let (seed, budget) = (cfg.seed, cfg.budget);
    let mut tasks = Vec::new();
    for space in cfg.resolve_spaces(CROSSCHECK_DEFAULTS)? {
        for p in 1..=cfg.p_max.min(CROSSCHECK_P) {
            tasks.push(task(format!("crosscheck/{space}/{p}"), move || {
                crosscheck(space, p, params.samples, params.tol, params.sigma, seed, budget)
            }));
        }
    }
    Ok(tasks)
}

fn crosscheck(space: SymmetricSpace, p: u32, samples: usize, tol: f64, sigma: f64, seed: u64, budget: u128) -> Result<Vec<Record>> {
    let match_tol = tol * MATCH_TOL_FACTOR;
    let rec = |name: &str, residual: f64, pass: bool, t: f64| {
        Record::new(name, residual, pass)
            .param("space", space.to_string())
            .param("p", p)
            .param("samples", samples)
            .param("tol", t)
    };
    let group = space.group();
    let required = (group.dimension() as u128).checked_pow(p).unwrap_or(u128::MAX);
    if required > budget {
        let note = format!("skipped (budget): {required} evaluations > {budget}");
        return Ok(vec![
            rec("crosscheck.tau_p", 0.0, true, tol).note(note.clone()),
            rec("crosscheck.formal_match", 0.0, true, match_tol).note(note),
        ]);
    }
    let mut rng = substream(seed, &format!("crosscheck/{space}"), u64::from(p));
    let spec = random_spec(space, &mut rng)?;
    let phi = eigenfunction_unchecked(&spec);
    let basis = basis_g::<Complex64>(group)?;
    let (lambda, mu) = expected_eigenvalues(space);
    let one = rc(rat(1, 1), rat(0, 1));
    let phi_p = build_phi_p(p, &lambda, &mu, &one, &one)?;
    let iterates: Vec<_> = (1..=p).map(|k| tau_formal_iterated(&phi_p, &lambda, &mu, k)).collect();
    let composed = Composed { formal: &phi_p, inner: &phi };
    let (mut null_residual, mut match_residual): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let (x, value) = loop {
            let x = sample(group, &mut rng, sigma)?.point;
            let v = phi.eval(&x)?;
            if on_admissible_domain(v) {
                break (x, v);
            }
        };
        for (k, formal) in (1..=p).zip(&iterates) {
            let numeric = tau_iterated_with_budget(&composed, &x, &basis, k as usize, budget)?;
            let expected = evaluate_formal(formal, &value)?;
            match_residual = match_residual.max((numeric - expected).norm() / expected.norm().max(1.0));
            if k == p {
                null_residual = null_residual.max(numeric.norm());
            }
        }
    }
    Ok(vec![
        rec("crosscheck.tau_p", null_residual, null_residual <= tol, tol),
        rec("crosscheck.formal_match", match_residual, match_residual <= match_tol, match_tol),
    ])
}

fn identity_record(r: IdentityCheckResult) -> Record {
    let mut rec = Record::new(format!("identities.{}", r.name), r.residual, r.pass).param("exact", r.exact);
    for (k, v) in r.params {
        let value = match v.parse::<i64>() {
            Ok(i) => Value::from(i),
            Err(_) => match v.parse::<f64>() {
                Ok(f) if k == "tol" || k == "gap" => Value::from(f),
                _ => Value::from(v),
            },
        };
        rec.params.insert(k, value);
    }
    rec.note = r.note;
    rec
}

fn identity_tasks(cfg: &RunConfig) -> Result<Vec<Task>> {
    let p = cfg.params(Suite::Identities);
    let seed = cfg.seed;
    let mut tasks = Vec::new();
    let wrap = |results: Vec<IdentityCheckResult>| Ok(results.into_iter().map(identity_record).collect());
    for group in cfg.resolve_groups(IDENTITY_DEFAULTS)? {
        tasks.push(task(format!("identities/coordinate/{group}"), move || {
            let mut rng = substream(seed, &format!("identities/coordinate/{group}"), 0);
            wrap(vec![check_coordinate_identities(group, p.samples, p.tol, &mut rng)?])
        }));
    }
    for n in 2..=EXACT_MAX_N {
        tasks.push(task(format!("identities/generator_sums/{n}"), move || wrap(check_generator_sums(n)?.to_vec())));
        tasks.push(task(format!("identities/sp_kappa/{n}"), move || {
            let mut rng = substream(seed, "identities/sp_kappa", n as u64);
            let points = if n <= 3 { KAPPA_POINTS.min(p.samples) } else { 0 };
            let [exact, numeric] = check_kappa_basis_decomposition(n, points, p.tol, &mut rng)?;
            wrap(if points > 0 { vec![exact, numeric] } else { vec![exact] })
        }));
        tasks.push(task(format!("identities/traceless/{n}"), move || {
            let mut rng = substream(seed, "identities/traceless", n as u64);
            wrap(vec![check_symmetric_skew_traceless(n, p.samples, &mut rng)?])
        }));
    }
    tasks.push(task("identities/skew_lemma".into(), move || {
        let mut rng = substream(seed, "identities/skew_lemma", 0);
        wrap(check_skew_lemma(SKEW_DRAWS, SKEW_N, &mut rng)?.to_vec())
    }));
    for n in [2usize, 3] {
        tasks.push(task(format!("identities/sp_form/{n}"), move || {
            let mut rng = substream(seed, "identities/sp_form", n as u64);
            wrap(vec![check_sp_invariant_form(n, p.samples, p.tol, &mut rng)?])
        }));
    }
    for n in [2usize, 3, 4] {
        tasks.push(task(format!("identities/embedding_det/{n}"), move || {
            let mut rng = substream(seed, "identities/embedding_det", n as u64);
            wrap(vec![check_embedding_determinant(n, p.samples, p.tol, &mut rng)?])
        }));
    }
    for (map, n) in [(PhiMap::SymmetricSU, 2), (PhiMap::SymmetricSU, 3), (PhiMap::SymmetricSp, 2), (PhiMap::SkewSO2n, 2), (PhiMap::SkewSO2n, 3)] {
        tasks.push(task(format!("identities/phi/{map:?}/{n}"), move || {
            let mut rng = substream(seed, &format!("identities/phi/{map:?}"), n as u64);
            wrap(vec![check_phi_identities(map, n, p.samples, p.tol, &mut rng)?])
        }));
    }
    Ok(tasks)
}

/// Adds the completeness record of the identity suite.
fn registry_record(records: &[Record], restricted: bool) -> Record {
    let present: Vec<IdentityCheckResult> = records
        .iter()
        .filter_map(|r| r.name.strip_prefix("identities."))
        .map(|name| IdentityCheckResult {
            name: name.to_string(),
            params: Default::default(),
            residual: 0.0,
            pass: true,
            exact: true,
            note: None,
        })
        .collect();
    let missing = missing_identities(&present);
    let mut r = Record::new("identities.registry", missing.len() as f64, missing.is_empty() || restricted);
    if !missing.is_empty() {
        r = r.note(format!(
            "not exercised{}: {}",
            if restricted { " (restricted by --space)" } else { "" },
            missing.join(", ")
        ));
    }
    r
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs the selected suites and, if `config.out` is set, writes the report.
pub fn run(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut warnings = Vec::new();
    if suites.is_empty() {
        warnings.push("no suites selected; the report is vacuously passing".to_string());
    }
    let mut tasks = Vec::new();
    for &suite in &suites {
        let t = match suite {
            Suite::Eigen => eigen_tasks(config)?,
            Suite::Dual => dual_tasks(config)?,
            Suite::Pharmonic => pharmonic_tasks(config)?,
            Suite::Crosscheck => crosscheck_tasks(config)?,
            Suite::Identities => identity_tasks(config)?,
        };
        if config.spaces.is_some() && t.is_empty() {
            warnings.push(format!("suite {suite}: no applicable --space entries"));
        }
        tasks.extend(t);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<Result<Vec<Record>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let result = (t.run)();
                let ms = start.elapsed().as_millis() as u64;
                match result {
                    Ok(mut recs) => {
                        recs.iter_mut().for_each(|r| r.ms = ms);
                        Ok(recs)
                    }
                    Err(e @ (Error::Usage(_) | Error::Validation(_) | Error::Io(_))) => Err(e),
                    Err(e) => Ok(vec![Record {
                        ms,
                        ..Record::new(format!("error.{}", t.label), f64::INFINITY, false).note(e.to_string())
                    }]),
                }
            })
            .collect()
    });
    let mut records = Vec::new();
    for o in outcomes {
        records.extend(o?);
    }
    if suites.contains(&Suite::Identities) {
        let restricted = config.spaces.is_some();
        records.push(registry_record(&records, restricted));
    }
    let config_echo = serde_json::to_value(config).map_err(|e| Error::Io(e.to_string()))?;
    let report = VerificationReport::new(config_echo, records, warnings, now_secs());
    if let Some(path) = &config.out {
        report_write(&report, path)?;
    }
    Ok(report)
}

/// 0 when every record passes, 1 otherwise.
pub fn exit_code(report: &VerificationReport) -> i32 {
    if report.pass {
        0
    } else {
        1
    }
}
