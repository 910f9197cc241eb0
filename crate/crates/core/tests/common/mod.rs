#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Runs the command line in-process and returns (exit code, stdout, stderr).
pub fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("superwitt").chain(args.iter().copied()).collect();
    let code = superwitt::cli::run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn coefficient(rng: &mut ChaCha8Rng) -> String {
    let p: i64 = rng.gen_range(1..=7);
    match rng.gen_range(0..4) {
        0 => String::new(),
        1 => format!("{p}*"),
        _ => format!("{p}/{}*", rng.gen_range(1..=5)),
    }
}

/// Polynomial factors over `t1..tm`, `x1..xn`, joined by `*`. May be empty.
fn mono_factors(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=m {
        match rng.gen_range(0..4) {
            0 | 1 => {}
            2 => out.push(format!("t{i}")),
            _ => out.push(format!("t{i}^{}", rng.gen_range(2..4))),
        }
    }
    let mut odd: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
    if odd.len() > 1 && rng.gen_bool(0.5) {
        let list: Vec<String> = odd.iter().map(|j| j.to_string()).collect();
        out.push(format!("x{{{}}}", list.join(",")));
    } else {
        odd.shuffle(rng);
        out.extend(odd.iter().map(|j| format!("x{j}")));
    }
    out
}

fn derivation(rng: &mut ChaCha8Rng, m: usize, n: usize) -> String {
    let k = rng.gen_range(0..m + n);
    if k < m {
        format!("dt{}", k + 1)
    } else {
        format!("dx{}", k - m + 1)
    }
}

fn chunk(rng: &mut ChaCha8Rng, m: usize, n: usize, der: bool) -> String {
    let mut f = mono_factors(rng, m, n);
    if der {
        f.push(derivation(rng, m, n));
    }
    if f.is_empty() {
        f.push("1".into());
    }
    f.join("*")
}

/// A random expression over `t1..t{m}`, `x1..x{n}` and, for tensors,
/// `e1..e{dim}`. Every output is in the grammar.
pub fn random_expression(rng: &mut ChaCha8Rng, m: usize, n: usize, dim: usize) -> String {
    let kind = rng.gen_range(0..5);
    let terms = rng.gen_range(1..=4);
    let mut text = String::new();
    for t in 0..terms {
        let neg = rng.gen_bool(0.4);
        text.push_str(match (t, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        text.push_str(&coefficient(rng));
        let body = match kind {
            0 => chunk(rng, m, n, false),
            1 => chunk(rng, m, n, true),
            2 => {
                let der = rng.gen_bool(0.5);
                chunk(rng, m, n, der)
            }
            3 => {
                let len = rng.gen_range(1..=3);
                (0..len)
                    .map(|_| {
                        let der = rng.gen_bool(0.5);
                        chunk(rng, m, n, der)
                    })
                    .collect::<Vec<_>>()
                    .join(" . ")
            }
            _ => format!("{} @ e{}", chunk(rng, m, n, false), rng.gen_range(1..=dim)),
        };
        text.push_str(&body);
    }
    text
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
