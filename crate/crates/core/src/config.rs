//! Run configuration: a small TOML file naming the module `T(A^a, V)`, the
//! window, the seed and the checks to run, with per-check overrides.
//!
//! ```toml
//! m = 1
//! n = 1
//! a = [1]            # integers or "p/q" strings
//! rep = "natural"    # natural | trivial | tensor(..) | sum(..) | file:path
//! D = 3
//! seed = 7
//! checks = ["pi2", "descent"]
//!
//! [check.descent]
//! trials = 20
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::glmn::RepDescriptor;
use crate::scalar::{format_scalar, parse_scalar};
use crate::verifier::{CheckId, CheckParams, DEFAULT_SEED};
use crate::whittaker::ModuleSpec;
use crate::witt::BracketMode;
use crate::{aw::TauConvention, whittaker::ActionRule, Shape};

/// Environment variable that replaces the built-in default seed.
pub const SEED_ENV: &str = "SUPERWITT_SEED";

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
enum Rational {
    Int(i64),
    Text(String),
}

impl Rational {
    fn normalize(&self) -> Result<String> {
        match self {
            Rational::Int(v) => Ok(v.to_string()),
            Rational::Text(s) => Ok(format_scalar(&parse_scalar(s)?)),
        }
    }
}

/// Per-check settings; absent keys keep the global or built-in value.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckOverride {
    pub m: Option<usize>,
    pub n: Option<usize>,
    a: Option<Vec<Rational>>,
    pub rep: Option<String>,
    #[serde(rename = "D")]
    pub window: Option<usize>,
    pub degree: Option<usize>,
    pub trials: Option<usize>,
    pub r_max: Option<u32>,
    pub seed: Option<u64>,
    pub bracket_mode: Option<BracketMode>,
    pub tau: Option<TauConvention>,
    pub action_rule: Option<ActionRule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    m: usize,
    n: usize,
    a: Vec<Rational>,
    rep: String,
    #[serde(rename = "D")]
    window: Option<usize>,
    seed: Option<u64>,
    checks: Option<Vec<String>>,
    #[serde(default)]
    check: BTreeMap<String, CheckOverride>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub m: usize,
    pub n: usize,
    /// Normalized rational literals.
    pub a: Vec<String>,
    /// Descriptor with file paths made absolute.
    pub rep: String,
    pub window: Option<usize>,
    pub seed: Option<u64>,
    pub checks: Vec<CheckId>,
    pub overrides: BTreeMap<CheckId, CheckOverride>,
}

fn normalize_a(a: &[Rational]) -> Result<Vec<String>> {
    a.iter().map(Rational::normalize).collect()
}

impl Config {
    /// Parses and validates configuration text; relative rep files resolve
    /// against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Config> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let a = normalize_a(&raw.a)?;
        if a.len() != raw.m {
            return Err(Error::Config(format!("a has {} entries but m = {}", a.len(), raw.m)));
        }
        let resolve = |rep: &str| -> Result<String> {
            let d = RepDescriptor::parse(rep)?;
            Ok(match base {
                Some(b) => d.resolve_paths(b),
                None => d,
            }
            .to_string())
        };
        let rep = resolve(&raw.rep)?;
        let checks = match raw.checks {
            Some(ids) => ids.iter().map(|s| s.parse()).collect::<Result<Vec<CheckId>>>()?,
            None => CheckId::ALL.to_vec(),
        };
        let mut overrides = BTreeMap::new();
        for (name, mut o) in raw.check {
            let id: CheckId = name.parse()?;
            if let Some(r) = &o.rep {
                o.rep = Some(resolve(r)?);
            }
            if let Some(a) = &o.a {
                o.a = Some(
                    a.iter()
                        .map(|r| r.normalize().map(Rational::Text))
                        .collect::<Result<_>>()?,
                );
            }
            overrides.insert(id, o);
        }
        let config = Config {
            m: raw.m,
            n: raw.n,
            a,
            rep,
            window: raw.window,
            seed: raw.seed,
            checks,
            overrides,
        };
        config.module_spec()?;
        for id in &config.checks {
            config.params(*id, None)?.validate()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text, path.parent())
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.m, self.n)
    }

    /// The module described by the global keys.
    pub fn module_spec(&self) -> Result<ModuleSpec> {
        let rep = RepDescriptor::parse(&self.rep)?.build(self.shape(), None)?;
        let a = self.a.iter().map(|s| parse_scalar(s)).collect::<Result<_>>()?;
        ModuleSpec::new(a, rep)
    }

    /// Parameters for `id`: built-in defaults, then the global keys, then
    /// the `[check.<id>]` section. The seed comes from `seed_flag`, the
    /// override, the global key, [`SEED_ENV`] or the built-in default, in
    /// that order.
    pub fn params(&self, id: CheckId, seed_flag: Option<u64>) -> Result<CheckParams> {
        let mut p = CheckParams::defaults(id);
        p.m = self.m;
        p.n = self.n;
        p.a = self.a.clone();
        p.rep = self.rep.clone();
        if let Some(d) = self.window {
            p.window = d;
        }
        let mut seed = self.seed;
        if let Some(o) = self.overrides.get(&id) {
            if let Some(v) = o.m {
                p.m = v;
            }
            if let Some(v) = o.n {
                p.n = v;
            }
            if let Some(v) = &o.a {
                p.a = normalize_a(v)?;
            }
            if let Some(v) = &o.rep {
                p.rep = v.clone();
            }
            if let Some(v) = o.window {
                p.window = v;
            }
            if let Some(v) = o.degree {
                p.degree = v;
            }
            if let Some(v) = o.trials {
                p.trials = v;
            }
            if let Some(v) = o.r_max {
                p.r_max = v;
            }
            if let Some(v) = o.bracket_mode {
                p.bracket_mode = v;
            }
            if let Some(v) = o.tau {
                p.tau = v;
            }
            if let Some(v) = o.action_rule {
                p.action_rule = v;
            }
            seed = o.seed.or(seed);
        }
        p.seed = seed_flag.or(seed).unwrap_or_else(default_seed);
        p.validate()?;
        Ok(p)
    }
}

/// [`SEED_ENV`] when set to an integer, else the built-in default.
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
