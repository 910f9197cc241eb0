//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one status line, even when all of them pass.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use serde_json::Value;
use superwitt::expr::{infer_shape, parse_expr_with};
use superwitt::glmn::RepDescriptor;
use superwitt::report::ReportDocument;
use superwitt::scalar::parse_scalar;
use superwitt::verifier::{run_check, CheckId, CheckParams, Report, Status};
use superwitt::whittaker::{weight_space_dim, whittaker_space, ModuleSpec};
use superwitt::witt::BracketMode;
use superwitt::Shape;

type Outcome = Result<String, String>;

struct Criterion {
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expect_status(id: CheckId, p: &CheckParams, status: Status) -> Result<Report, String> {
    let r = run_check(id, p);
    ensure(r.status == status, || format!("expected {status}, got {}", r.summary()))?;
    if status == Status::Fail {
        ensure(r.counterexample.is_some(), || {
            format!("{id} failed without a counterexample")
        })?;
    }
    Ok(r)
}

fn passes(id: CheckId, p: &CheckParams) -> Result<Report, String> {
    expect_status(id, p, Status::Pass)
}

fn module(m: usize, n: usize, a: &[&str], rep: &str) -> ModuleSpec {
    let shape = Shape::new(m, n);
    let rep = RepDescriptor::parse(rep).unwrap().build(shape, None).unwrap();
    ModuleSpec::new(a.iter().map(|s| parse_scalar(s).unwrap()).collect(), rep).unwrap()
}

fn jacobi() -> Outcome {
    let p = CheckParams::defaults(CheckId::Jacobi);
    ensure((p.m, p.n, p.degree) == (2, 2, 2), || format!("unexpected grid {p:?}"))?;
    let r = passes(CheckId::Jacobi, &p)?;
    let mut mutated = CheckParams::defaults(CheckId::Jacobi).with_shape(1, 1);
    mutated.degree = 1;
    mutated.bracket_mode = BracketMode::Mutated(0);
    expect_status(CheckId::Jacobi, &mutated, Status::Fail)?;
    Ok(format!("{} cases, mutated table caught", r.cases))
}

fn bracket_oracle() -> Outcome {
    let p = CheckParams::defaults(CheckId::BracketOracle);
    ensure((p.m, p.n, p.degree) == (2, 2, 3), || format!("unexpected grid {p:?}"))?;
    let r = passes(CheckId::BracketOracle, &p)?;
    let verbatim = CheckParams {
        bracket_mode: BracketMode::Verbatim,
        ..p
    };
    let f = expect_status(CheckId::BracketOracle, &verbatim, Status::Fail)?;
    let cx = f.counterexample.unwrap();
    Ok(format!(
        "{} pairs agree; verbatim [{}] = {} vs {}",
        r.cases,
        cx.inputs[..2].join(", "),
        cx.lhs,
        cx.rhs
    ))
}

fn weyl() -> Outcome {
    let p = CheckParams::defaults(CheckId::WeylRelations);
    ensure(p.trials == 500, || "expected 500 words".into())?;
    let r = passes(CheckId::WeylRelations, &p)?;
    Ok(format!("{} cases", r.cases))
}

fn pi2() -> Outcome {
    let p = CheckParams::defaults(CheckId::Pi2);
    ensure(
        (p.m, p.n, p.a.as_slice(), p.rep.as_str(), p.degree, p.window)
            == (1, 1, &["1".to_string()][..], "natural", 2, 4),
        || format!("unexpected grid {p:?}"),
    )?;
    let r = passes(CheckId::Pi2, &p)?;
    Ok(format!("{} cases", r.cases))
}

fn k_t_commute() -> Outcome {
    let p = CheckParams::defaults(CheckId::KTCommute);
    ensure((p.degree, p.window) == (2, 3), || format!("unexpected grid {p:?}"))?;
    let r = passes(CheckId::KTCommute, &p)?;
    Ok(format!("{} cases", r.cases))
}

fn gl_realization() -> Outcome {
    let p = CheckParams::defaults(CheckId::GlRealization);
    ensure((p.m, p.n) == (2, 2), || format!("unexpected grid {p:?}"))?;
    let r = passes(CheckId::GlRealization, &p)?;
    Ok(format!("{} cases over all m,n <= 2", r.cases))
}

fn whittaker_dim() -> Outcome {
    // dim V: natural is m+n, its tensor square (m+n)^2
    let cases: [(usize, usize, &[&str], &str, usize); 3] = [
        (1, 1, &["1"], "natural", 2),
        (2, 2, &["1", "-1"], "natural", 4),
        (2, 1, &["2", "3"], "tensor(natural,natural)", 9),
    ];
    for (m, n, a, rep, dim) in cases {
        let mut p = CheckParams::defaults(CheckId::WhittakerDim).with_shape(m, n);
        p.a = a.iter().map(|s| s.to_string()).collect();
        p.rep = rep.into();
        p.window = 2;
        passes(CheckId::WhittakerDim, &p)?;
        let spec = module(m, n, a, rep);
        for d in 2..=4 {
            let got = whittaker_space(&spec, d).map_err(|e| e.to_string())?.len();
            ensure(got == dim, || {
                format!("({m},{n},{rep}) at D={d}: dim Wh = {got}, expected {dim}")
            })?;
        }
    }
    Ok("dims 2, 4, 9 at D = 2, 3, 4".into())
}

fn descent() -> Outcome {
    let p = CheckParams::defaults(CheckId::Descent);
    ensure(
        (p.m, p.n, p.a.clone(), p.window, p.trials) == (2, 1, vec!["1".to_string(), "1".to_string()], 3, 100),
        || format!("unexpected grid {p:?}"),
    )?;
    let r = passes(CheckId::Descent, &p)?;
    Ok(format!("{} cases", r.cases))
}

fn weight_multiplicity() -> Outcome {
    for (m, n) in [(1, 1), (2, 1)] {
        let mut p = CheckParams::defaults(CheckId::WeightingBounded).with_shape(m, n);
        p.degree = 2;
        passes(CheckId::WeightingBounded, &p)?;
        // rank of the free module: 2^n * dim V with dim V = m+n
        let rank = (1usize << n) * (m + n);
        let spec = module(m, n, &vec!["1"; m], "natural");
        let box_points: Vec<Vec<i64>> = if m == 1 {
            (-2..=2).map(|r| vec![r]).collect()
        } else {
            (-2..=2).flat_map(|a| (-2..=2).map(move |b| vec![a, b])).collect()
        };
        for r in box_points {
            let d = weight_space_dim(&spec, &r, 3).map_err(|e| e.to_string())?;
            ensure(d == rank, || format!("({m},{n}) r={r:?}: dim {d}, expected {rank}"))?;
        }
    }
    Ok("dim M^r = 4 and 6 on the whole box".into())
}

fn w_recurrence() -> Outcome {
    let p = CheckParams::defaults(CheckId::WRecurrence);
    ensure((p.r_max, p.window) == (4, 4), || format!("unexpected grid {p:?}"))?;
    let r = passes(CheckId::WRecurrence, &p)?;
    Ok(format!("{} cases", r.cases))
}

fn w_annihilation() -> Outcome {
    let p = CheckParams::defaults(CheckId::WAnnihilation);
    ensure((p.m, p.n, p.degree, p.r_max) == (1, 1, 2, 8), || {
        format!("unexpected grid {p:?}")
    })?;
    let r = passes(CheckId::WAnnihilation, &p)?;
    let table = r
        .details
        .as_ref()
        .and_then(|d| d.get("minimal_r"))
        .cloned()
        .unwrap_or(Value::Null);
    let fixture: Value =
        serde_json::from_str(&std::fs::read_to_string(common::fixture("w_annihilation_minimal_r.json")).unwrap())
            .unwrap();
    ensure(table == fixture, || format!("minimal r table changed: {table}"))?;
    let control = CheckParams { r_max: 0, ..p };
    expect_status(CheckId::WAnnihilation, &control, Status::Fail)?;
    Ok(format!("{} cases, table matches fixture, r_max=0 fails", r.cases))
}

fn cli_contract() -> Outcome {
    let corpus = std::fs::read_to_string(common::fixture("expr_corpus.txt")).unwrap();
    let mut lines = 0;
    for line in corpus.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (input, expected) = line.split_once("=>").map_or((line, line), |(i, e)| (i, e));
        let (input, expected) = (input.trim(), expected.trim());
        let shape = infer_shape(&[input, expected]).map_err(|e| e.to_string())?;
        let e = parse_expr_with(input, shape, Some(3)).map_err(|e| format!("{input}: {e}"))?;
        ensure(e.to_string() == expected, || format!("{input} printed as {e}"))?;
        ensure(parse_expr_with(expected, shape, Some(3)).ok() == Some(e), || {
            format!("{expected} does not reparse")
        })?;
        lines += 1;
    }
    let shape = Shape::new(2, 3);
    let mut rng = common::rng(0x5eed);
    for _ in 0..1000 {
        let text = common::random_expression(&mut rng, 2, 3, 3);
        let e = parse_expr_with(&text, shape, Some(3)).map_err(|e| format!("{text}: {e}"))?;
        let again = parse_expr_with(&e.to_string(), shape, Some(3)).map_err(|err| format!("{e}: {err}"))?;
        ensure(again == e, || format!("{text} does not round trip"))?;
    }

    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(common::fixture("report.schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for (i, config) in ["small.toml", "small.toml", "failing.toml"].into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.json"));
        let cfg = common::fixture(config);
        let (code, _, err) = common::run(&[
            "report",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--stable",
        ]);
        ensure(code == if config == "failing.toml" { 1 } else { 0 }, || {
            format!("report {config}: exit {code} {err}")
        })?;
        let text = std::fs::read_to_string(&path).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        ensure(validator.is_valid(&v), || {
            format!("{config} report violates the schema")
        })?;
        ReportDocument::from_json(&text).map_err(|e| e.to_string())?;
        bytes.push(text);
    }
    ensure(bytes[0] == bytes[1], || "stable report differs between runs".into())?;

    let codes = [
        (common::run(&["bracket", "dt1", "t1*dt1"]), 0, Some("dt1\n")),
        (common::run(&["verify", "jacobi", "--m", "1", "--n", "1"]), 0, None),
        (common::run(&["verify", "jacobi", "--no-such-flag"]), 2, None),
        (
            common::run(&[
                "verify",
                "all",
                "--config",
                common::fixture("failing.toml").to_str().unwrap(),
            ]),
            1,
            None,
        ),
    ];
    for ((code, out, _), want, text) in codes {
        ensure(code == want, || format!("exit {code}, expected {want}"))?;
        if let Some(t) = text {
            ensure(out == t, || format!("printed {out:?}, expected {t:?}"))?;
        }
    }
    Ok(format!(
        "{lines} corpus lines, 1000 seeded expressions, schema valid, byte-stable"
    ))
}

const CRITERIA: [Criterion; 12] = [
    Criterion {
        title: "super-Jacobi in W(2|2), degree <= 2",
        budget: Duration::from_secs(120),
        run: jacobi,
    },
    Criterion {
        title: "bracket table vs derivation oracle",
        budget: Duration::from_secs(120),
        run: bracket_oracle,
    },
    Criterion {
        title: "Weyl relations and normal order",
        budget: Duration::from_secs(30),
        run: weyl,
    },
    Criterion {
        title: "pi2 is an operator homomorphism",
        budget: Duration::from_secs(120),
        run: pi2,
    },
    Criterion {
        title: "[K,T] = 0",
        budget: Duration::from_secs(60),
        run: k_t_commute,
    },
    Criterion {
        title: "gl(m|n) realized on Wh",
        budget: Duration::from_secs(60),
        run: gl_realization,
    },
    Criterion {
        title: "dim Wh = dim V",
        budget: Duration::from_secs(120),
        run: whittaker_dim,
    },
    Criterion {
        title: "descent and PBW round trip",
        budget: Duration::from_secs(180),
        run: descent,
    },
    Criterion {
        title: "weight multiplicity 2^n dim V",
        budget: Duration::from_secs(120),
        run: weight_multiplicity,
    },
    Criterion {
        title: "w recurrence, formal and on T",
        budget: Duration::from_secs(60),
        run: w_recurrence,
    },
    Criterion {
        title: "w annihilation, pinned minimal r",
        budget: Duration::from_secs(300),
        run: w_annihilation,
    },
    Criterion {
        title: "command line, expressions, reports",
        budget: Duration::from_secs(60),
        run: cli_contract,
    },
];

fn main() {
    let mut failed = 0;
    for (i, c) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed > c.budget {
                Err(format!("took {elapsed:.1?}, budget {:?}", c.budget))
            } else {
                Ok(msg)
            }
        });
        let (tag, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "{tag} {:>2} {:<38} {:>7.2}s  {msg}",
            i + 1,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
