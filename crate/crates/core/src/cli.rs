//! Command-line front end. Exit codes: 0 when everything passed, 1 when a
//! check failed or a computation was rejected, 2 for usage and
//! configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aw::TauConvention;
use crate::config::{default_seed, Config};
use crate::error::{Error, Result};
use crate::expr::{bracket_exprs, infer_shape, parse_expr_with, Expr};
use crate::glmn::RepDescriptor;
use crate::operator::{Atom, OperatorWord};
use crate::scalar::parse_scalar;
use crate::verifier::{run_checks, CheckId, CheckParams};
use crate::whittaker::{
    act_word, descent, twisted_act, weighting_act, weighting_reduce, whittaker_space, ActionRule, ModuleSpec, PbwBasis,
    TensorElement,
};
use crate::witt::BracketMode;
use crate::{report::ReportDocument, Shape};

#[derive(Parser, Debug)]
#[command(
    name = "superwitt",
    version,
    about = "Exact computations in W(m|n) and its Whittaker modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bracket of two vector fields, extended elements or `a . x` terms.
    Bracket {
        left: String,
        right: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Corrected)]
        mode: ModeArg,
    },
    /// Action of an operator on a tensor element or on a polynomial of `A^a`.
    Act {
        op: String,
        elem: String,
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Basis of the Whittaker vectors in the window.
    Wh {
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Projection of an element onto the Whittaker vectors.
    Descent {
        elem: String,
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Class of an element in the weight space `M^r`, optionally acted on.
    Weighting {
        elem: String,
        /// Weight, comma separated (one integer per even variable).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        r: Vec<i64>,
        /// Vector field applied to the class.
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Run one check or `all`.
    Verify {
        check: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Print the JSON report instead of status lines.
        #[arg(long)]
        json: bool,
    },
    /// Run the configured checks and write the JSON report.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Zero timings and pin the timestamp for byte-stable output.
        #[arg(long)]
        stable: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Corrected,
    Verbatim,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TauArg {
    Inversions,
    Flipped,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Koszul,
    Unsigned,
    MutatedOddSum,
}

#[derive(Args, Debug, Default)]
struct ModuleArgs {
    /// Configuration file describing the module.
    #[arg(long, alias = "config")]
    spec: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Whittaker type, comma separated rationals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<String>>,
    #[arg(long)]
    rep: Option<String>,
    /// Window degree D.
    #[arg(long = "window", alias = "D")]
    window: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<String>>,
    #[arg(long)]
    rep: Option<String>,
    #[arg(long = "window", alias = "D")]
    window: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    r_max: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    tau: Option<TauArg>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
}

/// Result of a command: whether everything passed.
type Outcome = Result<bool>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidRep(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Bracket {
            left,
            right,
            m,
            n,
            mode,
        } => bracket(&left, &right, m, n, mode, out),
        Command::Act { op, elem, module } => act(&op, &elem, &module, out),
        Command::Wh { module } => {
            let (spec, window) = module.build(&[])?;
            for w in whittaker_space(&spec, window)? {
                writeln!(out, "{w}").map_err(io)?;
            }
            Ok(true)
        }
        Command::Descent { elem, module } => {
            let (spec, _) = module.build(&[&elem])?;
            let x = tensor(&elem, &spec)?;
            writeln!(out, "{}", descent(&spec, &x)?).map_err(io)?;
            Ok(true)
        }
        Command::Weighting { elem, r, field, module } => weighting(&elem, &r, field.as_deref(), &module, out),
        Command::Verify { check, params, json } => verify(&check, &params, json, out),
        Command::Report {
            out: path,
            config,
            seed,
            stable,
        } => report(&path, config, seed, stable, out),
    }
}

fn shape_for(texts: &[&str], m: Option<usize>, n: Option<usize>) -> Result<Shape> {
    let inferred = infer_shape(texts)?;
    Ok(Shape::new(m.unwrap_or(inferred.m), n.unwrap_or(inferred.n)))
}

fn bracket(left: &str, right: &str, m: Option<usize>, n: Option<usize>, mode: ModeArg, out: &mut dyn Write) -> Outcome {
    let shape = shape_for(&[left, right], m, n)?;
    let x = parse_expr_with(left, shape, None)?;
    let y = parse_expr_with(right, shape, None)?;
    let mode = match mode {
        ModeArg::Corrected => BracketMode::Corrected,
        ModeArg::Verbatim => BracketMode::Verbatim,
    };
    let result = bracket_exprs(&x, &y, mode)?;
    writeln!(out, "{result}").map_err(io)?;
    Ok(true)
}

impl ModuleArgs {
    /// The module and window: config file first, flags on top, shape
    /// inferred from `texts` when neither gives it.
    fn build(&self, texts: &[&str]) -> Result<(ModuleSpec, usize)> {
        let config = self.spec.as_deref().map(Config::load).transpose()?;
        let inferred = infer_shape(texts)?;
        let m = self.m.or(config.as_ref().map(|c| c.m)).unwrap_or(inferred.m);
        let n = self.n.or(config.as_ref().map(|c| c.n)).unwrap_or(inferred.n);
        let a = match (&self.a, &config) {
            (Some(a), _) => a.clone(),
            (None, Some(c)) if c.m == m => c.a.clone(),
            _ => vec!["1".to_string(); m],
        };
        let rep = self
            .rep
            .clone()
            .or(config.as_ref().map(|c| c.rep.clone()))
            .unwrap_or_else(|| "natural".into());
        let window = self.window.or(config.as_ref().and_then(|c| c.window)).unwrap_or(2);
        let shape = Shape::new(m, n);
        let rep = RepDescriptor::parse(&rep)?.build(shape, None)?;
        let a = a.iter().map(|s| parse_scalar(s)).collect::<Result<_>>()?;
        Ok((
            ModuleSpec::new(a, rep).map_err(|e| Error::Config(e.to_string()))?,
            window,
        ))
    }
}

fn tensor(text: &str, spec: &ModuleSpec) -> Result<TensorElement> {
    match parse_expr_with(text, spec.shape(), Some(spec.dim_v()))? {
        Expr::Tensor(t) => Ok(t),
        Expr::Poly(p) if p.is_zero() => Ok(TensorElement::zero(spec.shape(), spec.dim_v())),
        other => Err(Error::InvalidArgument(format!(
            "expected a tensor element, got a {}",
            other.kind()
        ))),
    }
}

/// Rewrites vector-field atoms `t^α ξ_I ∂` as `t^α ξ_I . ∂`.
fn as_weyl(w: &OperatorWord) -> OperatorWord {
    let shape = w.shape();
    let mut out = OperatorWord::zero(shape);
    for (atoms, c) in w.terms() {
        let mut word = Vec::new();
        for a in atoms {
            match a {
                Atom::Witt(b) => {
                    word.push(Atom::Mul(b.mono.clone()));
                    word.push(Atom::from_slot(b.slot));
                }
                other => word.push(other.clone()),
            }
        }
        out.add_assign(&OperatorWord::word(shape, word).scale(c));
    }
    out
}

fn act(op: &str, elem: &str, module: &ModuleArgs, out: &mut dyn Write) -> Outcome {
    let (spec, _) = module.build(&[op, elem])?;
    let shape = spec.shape();
    let w = parse_expr_with(op, shape, None)?
        .to_word()
        .ok_or_else(|| Error::InvalidArgument("the operator cannot be a tensor element".into()))?;
    let target = parse_expr_with(elem, shape, Some(spec.dim_v()))?;
    let result = match target {
        Expr::Tensor(t) => Expr::Tensor(act_word(&spec, &w, &t)?),
        Expr::Poly(p) => Expr::Poly(twisted_act(&spec, &as_weyl(&w), &p)?),
        other => return Err(Error::InvalidArgument(format!("cannot act on a {}", other.kind()))),
    };
    writeln!(out, "{result}").map_err(io)?;
    Ok(true)
}

fn weighting(elem: &str, r: &[i64], field: Option<&str>, module: &ModuleArgs, out: &mut dyn Write) -> Outcome {
    let texts: Vec<&str> = std::iter::once(elem).chain(field).collect();
    let (spec, window) = module.build(&texts)?;
    let x = tensor(elem, &spec)?;
    let pbw = PbwBasis::new(&spec, window.max(x.max_t_degree() + 1))?;
    let mut coset = weighting_reduce(&pbw, &x, r)?;
    if let Some(f) = field {
        let Expr::Witt(g) = parse_expr_with(f, spec.shape(), None)? else {
            return Err(Error::InvalidArgument("--field must be a vector field".into()));
        };
        let mut acc: Option<crate::whittaker::WeightCoset> = None;
        for (b, c) in g.terms() {
            let mut part = weighting_act(&pbw, b, &coset)?;
            part.coords.iter_mut().for_each(|v| *v *= c);
            acc = Some(match acc {
                None => part,
                Some(mut a) if a.weight == part.weight => {
                    a.coords.iter_mut().zip(&part.coords).for_each(|(x, y)| *x += y);
                    a
                }
                Some(_) => return Err(Error::InvalidArgument("--field must be weight-homogeneous".into())),
            });
        }
        if let Some(a) = acc {
            coset = a;
        }
    }
    let coords: Vec<String> = coset.coords.iter().map(crate::scalar::format_scalar).collect();
    writeln!(out, "weight {:?}", coset.weight).map_err(io)?;
    writeln!(out, "coordinates [{}]", coords.join(", ")).map_err(io)?;
    writeln!(out, "{}", coset.lift(&pbw)).map_err(io)?;
    Ok(true)
}

impl ParamArgs {
    fn params(&self, id: CheckId) -> Result<CheckParams> {
        let mut p = match &self.config {
            Some(path) => Config::load(path)?.params(id, self.seed)?,
            None => {
                let mut p = CheckParams::defaults(id);
                p.seed = self.seed.unwrap_or_else(default_seed);
                p
            }
        };
        let (m, n) = (self.m.unwrap_or(p.m), self.n.unwrap_or(p.n));
        p = p.with_shape(m, n);
        if let Some(a) = &self.a {
            p.a = a.clone();
        }
        if let Some(r) = &self.rep {
            p.rep = r.clone();
        }
        if let Some(v) = self.window {
            p.window = v;
        }
        if let Some(v) = self.degree {
            p.degree = v;
        }
        if let Some(v) = self.trials {
            p.trials = v;
        }
        if let Some(v) = self.r_max {
            p.r_max = v;
        }
        if let Some(v) = self.mode {
            p.bracket_mode = match v {
                ModeArg::Corrected => BracketMode::Corrected,
                ModeArg::Verbatim => BracketMode::Verbatim,
            };
        }
        if let Some(v) = self.tau {
            p.tau = match v {
                TauArg::Inversions => TauConvention::Inversions,
                TauArg::Flipped => TauConvention::Flipped,
            };
        }
        if let Some(v) = self.rule {
            p.action_rule = match v {
                RuleArg::Koszul => ActionRule::Koszul,
                RuleArg::Unsigned => ActionRule::Unsigned,
                RuleArg::MutatedOddSum => ActionRule::MutatedOddSum,
            };
        }
        p.validate()?;
        Ok(p)
    }
}

fn verify(check: &str, args: &ParamArgs, json: bool, out: &mut dyn Write) -> Outcome {
    let ids: Vec<CheckId> = if check == "all" {
        match &args.config {
            Some(path) => Config::load(path)?.checks,
            None => CheckId::ALL.to_vec(),
        }
    } else {
        vec![check.parse()?]
    };
    let jobs = ids
        .into_iter()
        .map(|id| Ok((id, args.params(id)?)))
        .collect::<Result<Vec<_>>>()?;
    let seed = jobs.first().map(|(_, p)| p.seed).unwrap_or_else(default_seed);
    let reports = run_checks(jobs);
    let doc = ReportDocument::new(reports, seed, false);
    if json {
        write!(out, "{}", doc.to_json()).map_err(io)?;
    } else {
        for r in &doc.checks {
            writeln!(out, "{}", r.summary()).map_err(io)?;
        }
    }
    Ok(doc.all_passed())
}

fn report(path: &Path, config: Option<PathBuf>, seed: Option<u64>, stable: bool, out: &mut dyn Write) -> Outcome {
    let (jobs, doc_seed) = match config {
        Some(cfg) => {
            let c = Config::load(&cfg)?;
            let jobs = c
                .checks
                .iter()
                .map(|&id| Ok((id, c.params(id, seed)?)))
                .collect::<Result<Vec<_>>>()?;
            let doc_seed = seed.or(c.seed).unwrap_or_else(default_seed);
            (jobs, doc_seed)
        }
        None => {
            let s = seed.unwrap_or_else(default_seed);
            let jobs = CheckId::ALL
                .iter()
                .map(|&id| {
                    let mut p = CheckParams::defaults(id);
                    p.seed = s;
                    (id, p)
                })
                .collect();
            (jobs, s)
        }
    };
    let doc = ReportDocument::new(run_checks(jobs), doc_seed, stable);
    doc.write(path)?;
    for r in &doc.checks {
        writeln!(out, "{}", r.summary()).map_err(io)?;
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(doc.all_passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<&str> = std::iter::once("superwitt").chain(args.iter().copied()).collect();
        let code = run_command(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(run(&["bracket", "dt1", "t1*dt1"]), (0, "dt1\n".into(), String::new()));
        let (code, out, _) = run(&["bracket", "t1 . dt1", "dt1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "-dt1");
        let (code, out, _) = run(&["bracket", "t1*dt1", "t1^2"]);
        assert_eq!((code, out.trim()), (0, "2*t1^2"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["bracket", "dt1"]).0, 2);
        assert_eq!(run(&["verify", "jacobi", "--bogus"]).0, 2);
        assert_eq!(run(&["bracket", "dt1", "t1 +"]).0, 2);
        assert_eq!(run(&["verify", "nope"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn module_commands() {
        let (code, out, _) = run(&["act", "dt1", "t1 @ e1", "--m", "1", "--n", "0", "--a", "2"]);
        assert_eq!((code, out.trim()), (0, "1 @ e1 + 2*t1 @ e1"));
        let (code, out, _) = run(&["wh", "--m", "1", "--n", "1", "--a", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2);
        let (code, out, _) = run(&["descent", "t1 @ e1", "--m", "1", "--n", "0"]);
        assert_eq!((code, out.trim()), (0, "0"));
        let (code, out, _) = run(&["weighting", "t1 @ e1", "--r", "-1", "--m", "1", "--n", "0"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("weight [-1]"));
        let (code, _, err) = run(&["weighting", "1 @ e1", "--r", "0", "--m", "1", "--n", "0", "--a", "0"]);
        assert_eq!(code, 1, "{err}");
    }
}
