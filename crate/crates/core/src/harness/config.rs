//! Run configuration and its layering.
//!
//! Precedence, lowest first: built-in defaults, config-file global keys,
//! config-file `[suite]` sections, `LIEHARM_*` environment variables, CLI
//! flags. Setting a global key discards every lower-layer value of that key,
//! including per-suite ones, so `--tol 1e-20` really applies everywhere.
//!
//! Config files are flat `key = value` lines. `#` starts a comment, `[eigen]`
//! style headers open a per-suite section. Per-suite sections accept only
//! `samples`, `tol` and `sigma`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::diffops::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::lie::{GroupFamily, GroupSpec, SpaceFamily, SymmetricSpace};

pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SIGMA: f64 = 0.5;
pub const DEFAULT_P_MAX: u32 = 4;
pub const DEFAULT_SEED: u64 = 42;
pub const ENV_PREFIX: &str = "LIEHARM_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eigen,
    Dual,
    Pharmonic,
    Identities,
    Crosscheck,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Eigen, Suite::Dual, Suite::Pharmonic, Suite::Identities, Suite::Crosscheck];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eigen => "eigen",
            Suite::Dual => "dual",
            Suite::Pharmonic => "pharmonic",
            Suite::Identities => "identities",
            Suite::Crosscheck => "crosscheck",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown suite '{s}'")))
    }
}

/// A `--space` entry: a symmetric space or (for the identity suite) a group
/// family, optionally with a fixed `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Space(SpaceFamily),
    Group(GroupFamily),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Space(s) => write!(f, "{s}"),
            Family::Group(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceSel {
    pub family: Family,
    pub n: Option<usize>,
}

impl fmt::Display for SpaceSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) => write!(f, "{}:{n}", self.family),
            None => write!(f, "{}", self.family),
        }
    }
}

impl Serialize for SpaceSel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for SpaceSel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, n) = match s.split_once(':') {
            Some((name, n)) => (name, Some(parse_n(n)?)),
            None => (s, None),
        };
        let family = match name.parse::<SpaceFamily>() {
            Ok(f) => Family::Space(f),
            Err(_) => match name.parse::<GroupFamily>() {
                Ok(g @ (GroupFamily::SO | GroupFamily::SU | GroupFamily::Sp)) => Family::Group(g),
                _ => {
                    return Err(Error::Usage(format!(
                        "unknown space '{name}' (expected SUn_SOn, Spn_Un, SO2n_Un, SU2n_Spn, SO, SU or Sp)"
                    )))
                }
            },
        };
        Ok(SpaceSel { family, n })
    }
}

fn parse_n(s: &str) -> Result<usize> {
    let n: usize = s.trim().parse().map_err(|_| Error::Usage(format!("invalid n '{s}'")))?;
    if n < 2 {
        return Err(Error::Usage(format!("n must be at least 2, got {n}")));
    }
    Ok(n)
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Usage(format!("invalid value '{value}' for {key}")))
}

/// Per-suite overrides of the sampling parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SuiteOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// Effective sampling parameters of one suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteParams {
    pub samples: usize,
    pub tol: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    /// `None` means each suite's default selection.
    pub spaces: Option<Vec<SpaceSel>>,
    /// Values of n used for entries without one.
    pub n: Option<Vec<usize>>,
    pub p_max: u32,
    pub samples: usize,
    pub tol: f64,
    pub sigma: f64,
    pub seed: u64,
    pub budget: u128,
    pub overrides: BTreeMap<Suite, SuiteOverrides>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut overrides = BTreeMap::new();
        overrides.insert(Suite::Dual, SuiteOverrides { samples: None, tol: Some(1e-7), sigma: Some(0.2) });
        overrides.insert(Suite::Crosscheck, SuiteOverrides { samples: Some(10), tol: Some(1e-6), sigma: None });
        overrides.insert(Suite::Identities, SuiteOverrides { samples: Some(20), tol: Some(1e-9), sigma: None });
        RunConfig {
            suites: Suite::ALL.to_vec(),
            spaces: None,
            n: None,
            p_max: DEFAULT_P_MAX,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            sigma: DEFAULT_SIGMA,
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            overrides,
            out: None,
            jobs: None,
        }
    }
}

/// Keys accepted everywhere; `p-max` is an alias of `p_max`.
pub const KEYS: &[&str] = &["suites", "space", "n", "p_max", "samples", "tol", "sigma", "seed", "budget", "out", "jobs"];

impl RunConfig {
    /// Applies one global `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "suites" if value.eq_ignore_ascii_case("all") => self.suites = Suite::ALL.to_vec(),
            "suites" => self.suites = parse_list(value, str::parse)?,
            "space" | "spaces" => self.spaces = Some(parse_list(value, str::parse)?),
            "n" => self.n = Some(parse_list(value, parse_n)?),
            "p_max" => self.p_max = parse_num(&key, value)?,
            "seed" => self.seed = parse_num(&key, value)?,
            "budget" => self.budget = parse_num(&key, value)?,
            "jobs" => self.jobs = Some(parse_num(&key, value)?),
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            "samples" | "tol" | "sigma" => {
                match key.as_str() {
                    "samples" => self.samples = parse_num(&key, value)?,
                    "tol" => self.tol = parse_num(&key, value)?,
                    _ => self.sigma = parse_num(&key, value)?,
                }
                for o in self.overrides.values_mut() {
                    match key.as_str() {
                        "samples" => o.samples = None,
                        "tol" => o.tol = None,
                        _ => o.sigma = None,
                    }
                }
            }
            _ => return Err(Error::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a per-suite setting from a `[suite]` section.
    pub fn set_for(&mut self, suite: Suite, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        let o = self.overrides.entry(suite).or_default();
        match key.as_str() {
            "samples" => o.samples = Some(parse_num(&key, value)?),
            "tol" => o.tol = Some(parse_num(&key, value)?),
            "sigma" => o.sigma = Some(parse_num(&key, value)?),
            _ => return Err(Error::Usage(format!("key '{key}' cannot be set per suite (section [{suite}])"))),
        }
        Ok(())
    }

    /// Applies a config file: global keys first, then sections.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let mut global = Vec::new();
        let mut sectioned = Vec::new();
        let mut section: Option<Suite> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(name.trim().parse().map_err(|e: Error| Error::Usage(format!("line {}: {e}", lineno + 1)))?);
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            match section {
                None => global.push((k.to_string(), v.to_string())),
                Some(s) => sectioned.push((s, k.to_string(), v.to_string())),
            }
        }
        for (k, v) in global {
            self.set(&k, &v)?;
        }
        for (s, k, v) in sectioned {
            self.set_for(s, &k, &v)?;
        }
        Ok(())
    }

    /// Applies `LIEHARM_<KEY>` variables, e.g. `LIEHARM_SEED` or `LIEHARM_P_MAX`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<()>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut found: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| {
                let key = k.as_ref().strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
                KEYS.contains(&key.as_str()).then(|| (key, v.as_ref().to_string()))
            })
            .collect();
        found.sort();
        for (k, v) in found {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn params(&self, suite: Suite) -> SuiteParams {
        let o = self.overrides.get(&suite).copied().unwrap_or_default();
        SuiteParams {
            samples: o.samples.unwrap_or(self.samples),
            tol: o.tol.unwrap_or(self.tol),
            sigma: o.sigma.unwrap_or(self.sigma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if self.p_max < 1 {
            return Err(Error::Usage("p_max must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Usage("budget must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Usage("jobs must be positive".into()));
        }
        for suite in Suite::ALL {
            let p = self.params(suite);
            if p.samples == 0 {
                return Err(Error::Usage(format!("samples must be positive ({suite})")));
            }
            positive(&format!("tol ({suite})"), p.tol)?;
            positive(&format!("sigma ({suite})"), p.sigma)?;
        }
        Ok(())
    }

    /// Symmetric spaces the suite runs on, given its default selection.
    pub fn resolve_spaces(&self, defaults: &[(SpaceFamily, &[usize])]) -> Result<Vec<SymmetricSpace>> {
        let mut out = Vec::new();
        match &self.spaces {
            None => {
                for (family, ns) in defaults {
                    for &n in self.n.as_deref().unwrap_or(ns) {
                        out.push(SymmetricSpace::new(*family, n)?);
                    }
                }
            }
            Some(sel) => {
                for s in sel {
                    if let Family::Space(family) = s.family {
                        let fallback = defaults.iter().find(|(f, _)| *f == family).map(|(_, ns)| *ns).unwrap_or(&[2, 3]);
                        let ns: Vec<usize> = match s.n {
                            Some(n) => vec![n],
                            None => self.n.clone().unwrap_or_else(|| fallback.to_vec()),
                        };
                        for n in ns {
                            out.push(SymmetricSpace::new(family, n)?);
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Groups for the coordinate-identity checks.
    pub fn resolve_groups(&self, defaults: &[(GroupFamily, &[usize])]) -> Result<Vec<GroupSpec>> {
        let mut out = Vec::new();
        match &self.spaces {
            None => {
                for (family, ns) in defaults {
                    for &n in self.n.as_deref().unwrap_or(ns) {
                        out.push(GroupSpec::new(*family, n)?);
                    }
                }
            }
            Some(sel) => {
                for s in sel {
                    if let Family::Group(family) = s.family {
                        let fallback = defaults.iter().find(|(f, _)| *f == family).map(|(_, ns)| *ns).unwrap_or(&[2, 3]);
                        let ns: Vec<usize> = match s.n {
                            Some(n) => vec![n],
                            None => self.n.clone().unwrap_or_else(|| fallback.to_vec()),
                        };
                        for n in ns {
                            out.push(GroupSpec::new(family, n)?);
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}
