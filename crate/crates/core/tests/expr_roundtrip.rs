mod common;

use superwitt::expr::{infer_shape, parse_expr_with};
use superwitt::Shape;

#[test]
fn golden_corpus() {
    let text = std::fs::read_to_string(common::fixture("expr_corpus.txt")).unwrap();
    let mut checked = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (input, expected) = match line.split_once("=>") {
            Some((i, e)) => (i.trim(), e.trim()),
            None => (line.trim(), line.trim()),
        };
        let shape = infer_shape(&[input, expected]).unwrap();
        let e = parse_expr_with(input, shape, Some(3)).unwrap_or_else(|err| panic!("{input}: {err}"));
        let printed = e.to_string();
        assert_eq!(printed, expected, "printing {input}");
        let again = parse_expr_with(&printed, shape, Some(3)).unwrap();
        assert_eq!(again, e, "reparsing {printed}");
        checked += 1;
    }
    assert!(checked >= 40);
}

#[test]
fn seeded_expressions_round_trip() {
    let shape = Shape::new(2, 3);
    let mut rng = common::rng(0x5eed);
    for _ in 0..1000 {
        let text = common::random_expression(&mut rng, 2, 3, 3);
        let e = parse_expr_with(&text, shape, Some(3)).unwrap_or_else(|err| panic!("{text}: {err}"));
        let printed = e.to_string();
        let again = parse_expr_with(&printed, shape, Some(3)).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(again, e, "{text} printed as {printed}");
        assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let shape = Shape::new(2, 3);
    for (text, line, column) in [
        ("t1 + ", 1, 6),
        ("x{3,1}", 1, 5),
        ("t1 +\n  *t2", 2, 3),
        ("1/0*t1", 1, 3),
    ] {
        match parse_expr_with(text, shape, Some(3)) {
            Err(superwitt::Error::Parse { line: l, column: c, .. }) => {
                assert_eq!((l, c), (line, column), "{text:?}")
            }
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}
