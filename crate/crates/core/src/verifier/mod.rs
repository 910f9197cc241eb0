//! Window-scale certification of the algebraic identities: each check sweeps
//! a parameter grid (exhaustively where feasible, seeded-random otherwise)
//! and returns a [`Report`] with a replayable counterexample on failure.

mod algebra;
mod modules;
mod weights;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::aw::TauConvention;
use crate::error::{Error, Result};
use crate::glmn::RepDescriptor;
use crate::scalar::{self, parse_scalar, Scalar};
use crate::superalgebra::Shape;
use crate::whittaker::{ActionRule, ModuleSpec, TensorElement, Window};
use crate::witt::BracketMode;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CheckId {
    Jacobi,
    BracketOracle,
    WeylRelations,
    ModuleAxioms,
    Pi2,
    KTCommute,
    GlRealization,
    WhittakerDim,
    WRecurrence,
    WAnnihilation,
    WeightingBounded,
    Descent,
    SimplicityProbe,
}

impl CheckId {
    pub const ALL: [CheckId; 13] = [
        CheckId::Jacobi,
        CheckId::BracketOracle,
        CheckId::WeylRelations,
        CheckId::ModuleAxioms,
        CheckId::Pi2,
        CheckId::KTCommute,
        CheckId::GlRealization,
        CheckId::WhittakerDim,
        CheckId::WRecurrence,
        CheckId::WAnnihilation,
        CheckId::WeightingBounded,
        CheckId::Descent,
        CheckId::SimplicityProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Jacobi => "jacobi",
            CheckId::BracketOracle => "bracket-oracle",
            CheckId::WeylRelations => "weyl-relations",
            CheckId::ModuleAxioms => "module-axioms",
            CheckId::Pi2 => "pi2",
            CheckId::KTCommute => "k-t-commute",
            CheckId::GlRealization => "gl-realization",
            CheckId::WhittakerDim => "whittaker-dim",
            CheckId::WRecurrence => "w-recurrence",
            CheckId::WAnnihilation => "w-annihilation",
            CheckId::WeightingBounded => "weighting-bounded",
            CheckId::Descent => "descent",
            CheckId::SimplicityProbe => "simplicity-probe",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            let known: Vec<_> = CheckId::ALL.iter().map(|c| c.as_str()).collect();
            Error::Config(format!("unknown check {s:?} (known: {})", known.join(", ")))
        })
    }
}

impl Serialize for CheckId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CheckId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything a check needs; a report embeds it so failures can be replayed.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    pub m: usize,
    pub n: usize,
    /// Whittaker type, one rational literal per even variable.
    pub a: Vec<String>,
    /// Descriptor of the `gl(m|n)`-module `V`.
    pub rep: String,
    /// Truncation degree `D` of the module window.
    pub window: usize,
    /// Degree bound of the swept basis elements.
    pub degree: usize,
    /// Number of seeded random cases where the grid is sampled.
    pub trials: usize,
    /// Largest `r` searched by the annihilation checks.
    pub r_max: u32,
    pub seed: u64,
    #[serde(default)]
    pub bracket_mode: BracketMode,
    #[serde(default)]
    pub tau: TauConvention,
    #[serde(default)]
    pub action_rule: ActionRule,
}

pub const DEFAULT_SEED: u64 = 20240611;

impl CheckParams {
    /// The grid each check runs on when nothing is overridden.
    pub fn defaults(id: CheckId) -> Self {
        let base = |m: usize, n: usize, a: &[&str], window: usize, degree: usize| CheckParams {
            m,
            n,
            a: a.iter().map(|s| s.to_string()).collect(),
            rep: "natural".into(),
            window,
            degree,
            trials: 0,
            r_max: 0,
            seed: DEFAULT_SEED,
            bracket_mode: BracketMode::Corrected,
            tau: TauConvention::Inversions,
            action_rule: ActionRule::Koszul,
        };
        match id {
            CheckId::Jacobi => CheckParams {
                trials: 2000,
                ..base(2, 2, &["1", "1"], 0, 2)
            },
            CheckId::BracketOracle => base(2, 2, &["1", "1"], 0, 3),
            CheckId::WeylRelations => CheckParams {
                trials: 500,
                ..base(2, 2, &["1", "1"], 0, 4)
            },
            CheckId::ModuleAxioms => base(1, 1, &["1"], 3, 2),
            CheckId::Pi2 => base(1, 1, &["1"], 4, 2),
            CheckId::KTCommute => base(1, 1, &["1"], 3, 2),
            CheckId::GlRealization => base(2, 2, &["1", "-1"], 2, 3),
            CheckId::WhittakerDim => base(2, 2, &["1", "-1"], 2, 0),
            CheckId::WRecurrence => CheckParams {
                r_max: 4,
                ..base(1, 1, &["1"], 4, 1)
            },
            CheckId::WAnnihilation => CheckParams {
                r_max: 8,
                ..base(1, 1, &["1"], 2, 2)
            },
            CheckId::WeightingBounded => CheckParams {
                trials: 20,
                ..base(1, 1, &["1"], 2, 2)
            },
            CheckId::Descent => CheckParams {
                trials: 100,
                ..base(2, 1, &["1", "1"], 3, 0)
            },
            CheckId::SimplicityProbe => CheckParams {
                trials: 50,
                ..base(1, 1, &["1"], 2, 0)
            },
        }
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.m, self.n)
    }

    /// Moves to `W(m|n)`; a Whittaker type of the wrong length becomes all ones.
    pub fn with_shape(mut self, m: usize, n: usize) -> Self {
        if self.a.len() != m {
            self.a = vec!["1".into(); m];
        }
        self.m = m;
        self.n = n;
        self
    }

    pub fn a_values(&self) -> Result<Vec<Scalar>> {
        self.a.iter().map(|s| parse_scalar(s)).collect()
    }

    pub fn rep_descriptor(&self) -> Result<RepDescriptor> {
        RepDescriptor::parse(&self.rep)
    }

    /// `T(A^a, V)` for these parameters.
    pub fn module_spec(&self) -> Result<ModuleSpec> {
        let rep = self.rep_descriptor()?.build(self.shape(), None)?;
        ModuleSpec::with_rule(self.a_values()?, rep, self.action_rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.m {
            return Err(Error::Config(format!(
                "a has {} entries but m = {}",
                self.a.len(),
                self.m
            )));
        }
        self.a_values()?;
        self.rep_descriptor()?;
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        use rand::SeedableRng;
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// Offending inputs and the two sides that disagree, all in expression
/// syntax.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub inputs: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub note: String,
}

impl Counterexample {
    pub fn new(inputs: Vec<String>, lhs: impl fmt::Display, rhs: impl fmt::Display, note: impl Into<String>) -> Self {
        Counterexample {
            inputs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            note: note.into(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub id: CheckId,
    pub params: CheckParams,
    pub status: Status,
    pub cases: u64,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    pub seed: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One status line, as printed by `verify`.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{:<5} {:<18} cases={} elapsed={}ms",
            self.status.to_string().to_uppercase(),
            self.id.as_str(),
            self.cases,
            self.elapsed_ms
        );
        if let Some(cx) = &self.counterexample {
            s.push_str(&format!("\n      {}: inputs [{}]", cx.note, cx.inputs.join(", ")));
            s.push_str(&format!("\n      lhs = {}\n      rhs = {}", cx.lhs, cx.rhs));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!("\n      error: {e}"));
        }
        s
    }
}

/// What a check body returns; timing and status are filled in by [`run_check`].
#[derive(Default)]
pub(crate) struct Outcome {
    cases: u64,
    counterexample: Option<Counterexample>,
    details: Option<Value>,
}

impl Outcome {
    fn pass(cases: u64) -> Self {
        Outcome {
            cases,
            ..Default::default()
        }
    }

    fn fail(cases: u64, cx: Counterexample) -> Self {
        Outcome {
            cases,
            counterexample: Some(cx),
            details: None,
        }
    }

    fn from_search(cases: u64, cx: Option<Counterexample>) -> Self {
        Outcome {
            cases,
            counterexample: cx,
            details: None,
        }
    }

    fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }
}

pub fn run_check(id: CheckId, params: &CheckParams) -> Report {
    let start = Instant::now();
    let result = params.validate().and_then(|_| match id {
        CheckId::Jacobi => algebra::check_jacobi(params),
        CheckId::BracketOracle => algebra::check_bracket_oracle(params),
        CheckId::WeylRelations => algebra::check_weyl_relations(params),
        CheckId::ModuleAxioms => modules::check_module_axioms(params),
        CheckId::Pi2 => modules::check_pi2(params),
        CheckId::KTCommute => modules::check_k_t_commute(params),
        CheckId::GlRealization => modules::check_gl_realization(params),
        CheckId::WhittakerDim => modules::check_whittaker_dim(params),
        CheckId::WRecurrence => weights::check_w_recurrence(params),
        CheckId::WAnnihilation => weights::check_w_annihilation(params),
        CheckId::WeightingBounded => weights::check_weighting_bounded(params),
        CheckId::Descent => modules::check_descent(params),
        CheckId::SimplicityProbe => modules::simplicity_probe(params),
    });
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (status, cases, counterexample, error, details) = match result {
        Ok(o) => {
            let status = if o.counterexample.is_some() {
                Status::Fail
            } else {
                Status::Pass
            };
            (status, o.cases, o.counterexample, None, o.details)
        }
        Err(e) => (Status::Error, 0, None, Some(e.to_string()), None),
    };
    Report {
        id,
        params: params.clone(),
        status,
        cases,
        elapsed_ms,
        counterexample,
        error,
        details,
        seed: params.seed,
    }
}

/// Runs independent checks concurrently; the output keeps the input order.
pub fn run_checks(jobs: Vec<(CheckId, CheckParams)>) -> Vec<Report> {
    crate::par_map(jobs, |(id, p)| run_check(id, &p))
}

// ---------------------------------------------------------------- helpers

/// First `Some` in order, so parallel sweeps report deterministically.
pub(crate) fn first_failure<T>(results: Vec<(u64, Option<T>)>) -> (u64, Option<T>) {
    let mut cases = 0;
    let mut found = None;
    for (c, f) in results {
        if found.is_none() {
            cases += c;
            found = f;
        }
    }
    (cases, found)
}

/// Random nonzero window element with a few small integer coefficients.
pub(crate) fn random_element(rng: &mut ChaCha8Rng, window: &Window, terms: usize) -> TensorElement {
    loop {
        let mut coords = vec![scalar::zero(); window.len()];
        for _ in 0..terms {
            let i = rng.gen_range(0..window.len());
            let c: i64 = rng.gen_range(-3..=3);
            coords[i] += scalar::int(c);
        }
        let x = window.element(&coords);
        if !x.is_zero() {
            return x;
        }
    }
}
