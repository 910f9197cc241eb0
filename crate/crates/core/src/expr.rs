//! Text syntax for polynomials, vector fields, operator words and tensor
//! elements.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := chunk ('.' chunk)* ['@' e<j>]
//! chunk  := factor ('*' factor)*          a derivation may only come last
//! factor := p | p/q | t<k>['^'<e>] | x<k> | x{i,j,..} | dt<k> | dx<k>
//! ```
//!
//! A single chunk is a polynomial term or a vector field `t^α ξ_I ∂`;
//! chunks joined by `.` form a composition word (rightmost acts first), so
//! `a . x` is the dressed element `a.x`; `@ e<j>` tensors a polynomial term
//! with the `j`-th basis vector of `V`. Indices are 1-based.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::aw::{aw_bracket, AWElement};
use crate::error::{Error, Result};
use crate::operator::{Atom, OperatorWord};
use crate::scalar::{format_scalar, Scalar};
use crate::superalgebra::{Exponent, Monomial, OddSet, Shape, SuperPoly};
use crate::whittaker::TensorElement;
use crate::witt::{tilde_bracket, witt_bracket_with, BracketMode, DerSlot, TildeElement, WittBasis, WittElement};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Poly(SuperPoly),
    Witt(WittElement),
    /// Element `x + a` of `A ⋊ W` with both parts nonzero.
    Tilde(TildeElement),
    /// Combination of words, at least one of length two or more.
    Op(OperatorWord),
    Tensor(TensorElement),
}

impl Expr {
    pub fn shape(&self) -> Shape {
        match self {
            Expr::Poly(p) => p.shape(),
            Expr::Witt(w) => w.shape(),
            Expr::Tilde(t) => t.shape(),
            Expr::Op(o) => o.shape(),
            Expr::Tensor(t) => t.shape(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Expr::Poly(_) => "polynomial",
            Expr::Witt(_) => "vector field",
            Expr::Tilde(_) => "extended element",
            Expr::Op(_) => "operator word",
            Expr::Tensor(_) => "tensor element",
        }
    }

    /// Any non-tensor expression as a combination of words.
    pub fn to_word(&self) -> Option<OperatorWord> {
        match self {
            Expr::Poly(p) => Some(OperatorWord::from_poly(p)),
            Expr::Witt(w) => Some(OperatorWord::from_witt(w)),
            Expr::Tilde(t) => Some(
                OperatorWord::from_witt(&t.der)
                    .checked_add(&OperatorWord::from_poly(&t.fun))
                    .expect("same shape"),
            ),
            Expr::Op(o) => Some(o.clone()),
            Expr::Tensor(_) => None,
        }
    }

    /// Reads the expression as an element of `A ⋊ W`.
    pub fn to_tilde(&self) -> Option<TildeElement> {
        match self {
            Expr::Poly(p) => Some(TildeElement::from_fun(p.clone())),
            Expr::Witt(w) => Some(TildeElement::from_der(w.clone())),
            Expr::Tilde(t) => Some(t.clone()),
            _ => None,
        }
    }

    /// Reads the expression as an element of `AW` (`a . x` terms).
    pub fn to_aw(&self) -> Option<AWElement> {
        let shape = self.shape();
        match self {
            Expr::Witt(w) => Some(AWElement::from_witt(w)),
            Expr::Op(o) => {
                let mut e = AWElement::zero(shape);
                for (atoms, c) in o.terms() {
                    let (a, x) = match atoms.as_slice() {
                        [Atom::Mul(a), x] => (a.clone(), x),
                        [x] => (Monomial::one(shape.m), x),
                        _ => return None,
                    };
                    let x = match x {
                        Atom::Witt(b) => b.clone(),
                        Atom::Dt(i) => WittBasis::new(Monomial::one(shape.m), DerSlot::T(*i)),
                        Atom::Dxi(j) => WittBasis::new(Monomial::one(shape.m), DerSlot::Xi(*j)),
                        Atom::Mul(_) => return None,
                    };
                    e.add_term(a, x, c.clone());
                }
                Some(e)
            }
            _ => None,
        }
    }

    pub fn from_tilde(t: TildeElement) -> Expr {
        match (t.fun.is_zero(), t.der.is_zero()) {
            (_, true) => Expr::Poly(t.fun),
            (true, false) => Expr::Witt(t.der),
            _ => Expr::Tilde(t),
        }
    }

    /// Canonical variant for a word combination: words of length `<= 1`
    /// collapse to polynomials, vector fields or extended elements.
    pub fn from_word(w: OperatorWord) -> Expr {
        let shape = w.shape();
        if w.terms().keys().any(|atoms| atoms.len() > 1) {
            return Expr::Op(w);
        }
        let mut fun = SuperPoly::zero(shape);
        let mut der = WittElement::zero(shape);
        for (atoms, c) in w.terms() {
            match atoms.first() {
                None => fun.add_term(Monomial::one(shape.m), c.clone()),
                Some(Atom::Mul(m)) => fun.add_term(m.clone(), c.clone()),
                Some(Atom::Dt(i)) => der.add_term(WittBasis::new(Monomial::one(shape.m), DerSlot::T(*i)), c.clone()),
                Some(Atom::Dxi(j)) => der.add_term(WittBasis::new(Monomial::one(shape.m), DerSlot::Xi(*j)), c.clone()),
                Some(Atom::Witt(b)) => der.add_term(b.clone(), c.clone()),
            }
        }
        Expr::from_tilde(TildeElement { fun, der })
    }

    pub fn from_aw(e: &AWElement) -> Expr {
        Expr::from_word(e.to_word())
    }
}

/// Bracket in the smallest structure holding both sides: `W`, then
/// `A ⋊ W`, then `AW`. `mode` only affects brackets of two vector fields.
pub fn bracket_exprs(x: &Expr, y: &Expr, mode: BracketMode) -> Result<Expr> {
    match (x, y) {
        (Expr::Witt(a), Expr::Witt(b)) => Ok(Expr::Witt(witt_bracket_with(a, b, mode)?)),
        (Expr::Tensor(_), _) | (_, Expr::Tensor(_)) => {
            Err(Error::InvalidArgument("cannot bracket tensor elements".into()))
        }
        _ => match (x.to_tilde(), y.to_tilde()) {
            (Some(a), Some(b)) => Ok(Expr::from_tilde(tilde_bracket(&a, &b)?)),
            _ => match (x.to_aw(), y.to_aw()) {
                (Some(a), Some(b)) => Ok(Expr::from_aw(&aw_bracket(&a, &b)?)),
                _ => Err(Error::InvalidArgument(format!(
                    "cannot bracket a {} with a {}",
                    x.kind(),
                    y.kind()
                ))),
            },
        },
    }
}

// ---------------------------------------------------------------- printing

fn format_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exp.as_slice().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("t{}", i + 1)),
            _ => parts.push(format!("t{}^{}", i + 1, e)),
        }
    }
    for j in m.odd.iter() {
        parts.push(format!("x{}", j + 1));
    }
    parts.join("*")
}

fn format_slot(s: DerSlot) -> String {
    match s {
        DerSlot::T(i) => format!("dt{}", i + 1),
        DerSlot::Xi(j) => format!("dx{}", j + 1),
    }
}

fn format_field(b: &WittBasis) -> String {
    let m = format_monomial(&b.mono);
    if m.is_empty() {
        format_slot(b.slot)
    } else {
        format!("{m}*{}", format_slot(b.slot))
    }
}

fn format_atom(a: &Atom) -> String {
    match a {
        Atom::Mul(m) => {
            let s = format_monomial(m);
            if s.is_empty() {
                "1".into()
            } else {
                s
            }
        }
        Atom::Dt(i) => format_slot(DerSlot::T(*i)),
        Atom::Dxi(j) => format_slot(DerSlot::Xi(*j)),
        Atom::Witt(b) => format_field(b),
    }
}

/// Joins signed terms: `body` is the term without coefficient (empty for a
/// bare scalar).
struct TermWriter {
    out: String,
}

impl TermWriter {
    fn new() -> Self {
        TermWriter { out: String::new() }
    }

    fn push(&mut self, c: &Scalar, body: &str) {
        let neg = c.is_negative();
        let abs = c.abs();
        if self.out.is_empty() {
            if neg {
                self.out.push('-');
            }
        } else {
            self.out.push_str(if neg { " - " } else { " + " });
        }
        if body.is_empty() {
            self.out.push_str(&format_scalar(&abs));
        } else if abs.is_one() {
            self.out.push_str(body);
        } else {
            self.out.push_str(&format_scalar(&abs));
            self.out.push('*');
            self.out.push_str(body);
        }
    }

    fn finish(self) -> String {
        if self.out.is_empty() {
            "0".into()
        } else {
            self.out
        }
    }
}

pub fn format_poly(p: &SuperPoly) -> String {
    let mut w = TermWriter::new();
    for (m, c) in p.terms() {
        w.push(c, &format_monomial(m));
    }
    w.finish()
}

pub fn format_witt(x: &WittElement) -> String {
    let mut w = TermWriter::new();
    for (b, c) in x.terms() {
        w.push(c, &format_field(b));
    }
    w.finish()
}

pub fn format_tilde(t: &TildeElement) -> String {
    let mut w = TermWriter::new();
    for (b, c) in t.der.terms() {
        w.push(c, &format_field(b));
    }
    for (m, c) in t.fun.terms() {
        w.push(c, &format_monomial(m));
    }
    w.finish()
}

pub fn format_word(o: &OperatorWord) -> String {
    let mut w = TermWriter::new();
    for (atoms, c) in o.terms() {
        let body: Vec<String> = atoms.iter().map(format_atom).collect();
        w.push(c, &body.join(" . "));
    }
    w.finish()
}

pub fn format_aw(e: &AWElement) -> String {
    format_word(&e.to_word())
}

pub fn format_tensor(x: &TensorElement) -> String {
    let mut w = TermWriter::new();
    for ((m, k), c) in x.terms() {
        let mono = format_monomial(m);
        let body = if mono.is_empty() {
            if c.abs().is_one() {
                format!("1 @ e{}", k + 1)
            } else {
                format!("{} @ e{}", format_scalar(&c.abs()), k + 1)
            }
        } else {
            format!("{mono} @ e{}", k + 1)
        };
        if mono.is_empty() {
            let sign = if c.is_negative() { -Scalar::one() } else { Scalar::one() };
            w.push(&sign, &body);
        } else {
            w.push(c, &body);
        }
    }
    w.finish()
}

pub fn format_expr(e: &Expr) -> String {
    match e {
        Expr::Poly(p) => format_poly(p),
        Expr::Witt(w) => format_witt(w),
        Expr::Tilde(t) => format_tilde(t),
        Expr::Op(o) => format_word(o),
        Expr::Tensor(t) => format_tensor(t),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_expr(self))
    }
}

macro_rules! display_via {
    ($t:ty, $f:ident) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&$f(self))
            }
        }
    };
}

display_via!(SuperPoly, format_poly);
display_via!(WittElement, format_witt);
display_via!(TildeElement, format_tilde);
display_via!(OperatorWord, format_word);
display_via!(AWElement, format_aw);
display_via!(TensorElement, format_tensor);

// ----------------------------------------------------------------- lexing

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Num(String),
    Slash,
    T(usize),
    X(usize),
    XSet(Vec<usize>),
    Dt(usize),
    Dx(usize),
    E(usize),
    Caret,
    Star,
    Plus,
    Minus,
    Dot,
    At,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number {s}"),
            Tok::Slash => "`/`".into(),
            Tok::T(k) => format!("t{k}"),
            Tok::X(k) => format!("x{k}"),
            Tok::XSet(_) => "odd set".into(),
            Tok::Dt(k) => format!("dt{k}"),
            Tok::Dx(k) => format!("dx{k}"),
            Tok::E(k) => format!("e{k}"),
            Tok::Caret => "`^`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::At => "`@`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    let read_index = |i: &mut usize, col: &mut usize, line: usize, start_col: usize| -> Result<usize> {
        let begin = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
            *col += 1;
        }
        if begin == *i {
            return Err(parse_error(line, start_col, "missing index", &["index >= 1"]));
        }
        let s: String = chars[begin..*i].iter().collect();
        match s.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(parse_error(
                line,
                start_col,
                format!("invalid index {s}"),
                &["index >= 1"],
            )),
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '.' => Some(Tok::Dot),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            Tok::Num(chars[begin..i].iter().collect())
        } else if c == 't' {
            i += 1;
            col += 1;
            Tok::T(read_index(&mut i, &mut col, tl, tc)?)
        } else if c == 'e' {
            i += 1;
            col += 1;
            Tok::E(read_index(&mut i, &mut col, tl, tc)?)
        } else if c == 'd' && matches!(chars.get(i + 1), Some('t') | Some('x')) {
            let even = chars[i + 1] == 't';
            i += 2;
            col += 2;
            let k = read_index(&mut i, &mut col, tl, tc)?;
            if even {
                Tok::Dt(k)
            } else {
                Tok::Dx(k)
            }
        } else if c == 'x' && chars.get(i + 1) == Some(&'{') {
            i += 2;
            col += 2;
            let mut set = Vec::new();
            loop {
                while i < chars.len() && chars[i] == ' ' {
                    i += 1;
                    col += 1;
                }
                let ic = col;
                let k = read_index(&mut i, &mut col, tl, ic)?;
                if let Some(&prev) = set.last() {
                    if k <= prev {
                        return Err(parse_error(
                            tl,
                            ic,
                            "odd index sets must be strictly ascending",
                            &[&format!("index > {prev}")],
                        ));
                    }
                }
                set.push(k);
                while i < chars.len() && chars[i] == ' ' {
                    i += 1;
                    col += 1;
                }
                match chars.get(i) {
                    Some(',') => {
                        i += 1;
                        col += 1;
                    }
                    Some('}') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    _ => return Err(parse_error(tl, col, "unterminated odd set", &["`,`", "`}`"])),
                }
            }
            Tok::XSet(set)
        } else if c == 'x' {
            i += 1;
            col += 1;
            Tok::X(read_index(&mut i, &mut col, tl, tc)?)
        } else {
            return Err(parse_error(
                tl,
                tc,
                format!("unexpected character {c:?}"),
                &["number", "t<k>", "x<k>", "x{..}", "dt<k>", "dx<k>", "e<j>", "operator"],
            ));
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

// ---------------------------------------------------------------- parsing

const FACTOR: &[&str] = &["number", "t<k>", "x<k>", "x{..}", "dt<k>", "dx<k>"];

/// One `*`-chunk: coefficient, monomial (`None` when it squared to zero),
/// optional trailing derivation.
struct Chunk {
    coef: Scalar,
    mono: Option<Monomial>,
    slot: Option<DerSlot>,
}

enum Term {
    Word(Scalar, Vec<Atom>),
    Tensor(Scalar, Monomial, usize),
    Zero,
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    shape: Shape,
    dim: Option<usize>,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err(&self, at: &Spanned, message: impl Into<String>, expected: &[&str]) -> Error {
        parse_error(at.line, at.column, message, expected)
    }

    fn unexpected(&self, expected: &[&str]) -> Error {
        let at = self.peek();
        self.err(at, format!("unexpected {}", at.tok.describe()), expected)
    }

    fn even_index(&self, at: &Spanned, k: usize) -> Result<usize> {
        if k > self.shape.m {
            return Err(self.err(
                at,
                format!("t{k} out of range for m = {}", self.shape.m),
                &[&format!("index <= {}", self.shape.m)],
            ));
        }
        Ok(k - 1)
    }

    fn odd_index(&self, at: &Spanned, k: usize) -> Result<usize> {
        if k > self.shape.n {
            return Err(self.err(
                at,
                format!("x{k} out of range for n = {}", self.shape.n),
                &[&format!("index <= {}", self.shape.n)],
            ));
        }
        Ok(k - 1)
    }

    fn number(&mut self) -> Result<Scalar> {
        let at = self.bump();
        let Tok::Num(num) = &at.tok else { unreachable!() };
        let num: num_bigint::BigInt = num.parse().expect("digits");
        if self.peek().tok == Tok::Slash {
            self.bump();
            let dt = self.bump();
            let Tok::Num(den) = &dt.tok else {
                return Err(self.err(&dt, format!("unexpected {}", dt.tok.describe()), &["denominator"]));
            };
            let den: num_bigint::BigInt = den.parse().expect("digits");
            if den.is_zero() {
                return Err(self.err(&dt, "zero denominator", &["nonzero denominator"]));
            }
            return Ok(Scalar::new(num, den));
        }
        Ok(Scalar::from_integer(num))
    }

    fn chunk(&mut self) -> Result<Chunk> {
        let m = self.shape.m;
        let mut coef = Scalar::one();
        let mut mono = Some(Monomial::one(m));
        let mut slot = None;
        loop {
            let at = self.peek().clone();
            if slot.is_some() {
                return Err(self.err(
                    &at,
                    "a derivation must be the last factor of a product",
                    &["`.`", "`+`", "`-`", "`@`", "end of input"],
                ));
            }
            let factor: Option<Monomial> = match at.tok.clone() {
                Tok::Num(_) => {
                    coef *= self.number()?;
                    None
                }
                Tok::T(k) => {
                    self.bump();
                    let i = self.even_index(&at, k)?;
                    let mut e = 1u32;
                    if self.peek().tok == Tok::Caret {
                        self.bump();
                        let et = self.bump();
                        let Tok::Num(s) = &et.tok else {
                            return Err(self.err(&et, format!("unexpected {}", et.tok.describe()), &["exponent"]));
                        };
                        e = s
                            .parse()
                            .map_err(|_| self.err(&et, "exponent too large", &["exponent"]))?;
                    }
                    Some(Monomial::new(Exponent::zeros(m).with_added(i, e), OddSet::EMPTY))
                }
                Tok::X(k) => {
                    self.bump();
                    let j = self.odd_index(&at, k)?;
                    Some(Monomial::xi(m, j))
                }
                Tok::XSet(ks) => {
                    self.bump();
                    let mut idx = Vec::with_capacity(ks.len());
                    for k in ks {
                        idx.push(self.odd_index(&at, k)?);
                    }
                    Some(Monomial::new(Exponent::zeros(m), OddSet::from_ascending(&idx)?))
                }
                Tok::Dt(k) => {
                    self.bump();
                    slot = Some(DerSlot::T(self.even_index(&at, k)?));
                    None
                }
                Tok::Dx(k) => {
                    self.bump();
                    slot = Some(DerSlot::Xi(self.odd_index(&at, k)?));
                    None
                }
                _ => return Err(self.unexpected(FACTOR)),
            };
            if let (Some(f), Some(cur)) = (factor, mono.as_ref()) {
                let (s, prod) = cur.mul(&f);
                if s == 0 {
                    mono = None;
                } else {
                    if s < 0 {
                        coef = -coef;
                    }
                    mono = Some(prod);
                }
            }
            if self.peek().tok == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Chunk { coef, mono, slot })
    }

    fn term(&mut self) -> Result<Term> {
        let first_at = self.peek().clone();
        let mut chunks = vec![self.chunk()?];
        while self.peek().tok == Tok::Dot {
            self.bump();
            chunks.push(self.chunk()?);
        }
        if self.peek().tok == Tok::At {
            let at = self.bump();
            let et = self.bump();
            let Tok::E(j) = et.tok else {
                return Err(self.err(&et, format!("unexpected {}", et.tok.describe()), &["e<j>"]));
            };
            if chunks.len() != 1 || chunks[0].slot.is_some() {
                return Err(self.err(
                    &first_at,
                    "only a polynomial term can be tensored with a vector",
                    &["polynomial term"],
                ));
            }
            if let Some(d) = self.dim {
                if j > d {
                    return Err(self.err(
                        &et,
                        format!("e{j} out of range for dim V = {d}"),
                        &[&format!("index <= {d}")],
                    ));
                }
            }
            let _ = at;
            let c = chunks.pop().unwrap();
            return Ok(match c.mono {
                Some(mono) => Term::Tensor(c.coef, mono, j - 1),
                None => Term::Zero,
            });
        }
        let mut coef = Scalar::one();
        let mut atoms = Vec::with_capacity(chunks.len());
        for c in chunks {
            coef *= c.coef;
            let Some(mono) = c.mono else {
                return Ok(Term::Zero);
            };
            atoms.push(match c.slot {
                Some(slot) => Atom::Witt(WittBasis::new(mono, slot)),
                None => Atom::Mul(mono),
            });
        }
        Ok(Term::Word(coef, atoms))
    }

    fn expr(&mut self) -> Result<Expr> {
        let shape = self.shape;
        let mut words = OperatorWord::zero(shape);
        let mut tensor: Vec<((Monomial, usize), Scalar)> = Vec::new();
        let mut saw_word = false;
        let mut saw_tensor = false;
        let mut negative = match self.peek().tok {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let at = self.peek().clone();
            let term = self.term()?;
            let sign = if negative { -Scalar::one() } else { Scalar::one() };
            match term {
                Term::Word(c, atoms) => {
                    if saw_tensor {
                        return Err(self.err(&at, "cannot mix tensor and operator terms", &["`@ e<j>`"]));
                    }
                    saw_word = true;
                    words.add_word(atoms, c * sign);
                }
                Term::Tensor(c, mono, k) => {
                    if saw_word {
                        return Err(self.err(&at, "cannot mix tensor and operator terms", &["operator term"]));
                    }
                    saw_tensor = true;
                    tensor.push(((mono, k), c * sign));
                }
                Term::Zero => {}
            }
            match self.peek().tok {
                Tok::Plus => negative = false,
                Tok::Minus => negative = true,
                Tok::Eof => break,
                _ => return Err(self.unexpected(&["`+`", "`-`", "`.`", "`*`", "`@`", "end of input"])),
            }
            self.bump();
        }
        if saw_tensor {
            let dim = self
                .dim
                .unwrap_or_else(|| tensor.iter().map(|((_, k), _)| k + 1).max().unwrap_or(1));
            let t = TensorElement::from_terms(shape, dim, tensor)?;
            // a vanishing tensor prints as `0`, which reads back as a polynomial
            return Ok(if t.is_zero() {
                Expr::Poly(SuperPoly::zero(shape))
            } else {
                Expr::Tensor(t)
            });
        }
        Ok(Expr::from_word(words))
    }
}

/// Parses `text` over `A(m|n)`; tensor elements take the dimension of `V`
/// from the largest `e<j>` present.
pub fn parse_expr(text: &str, shape: Shape) -> Result<Expr> {
    parse_expr_with(text, shape, None)
}

/// As [`parse_expr`], validating `e<j>` against a known `dim V`.
pub fn parse_expr_with(text: &str, shape: Shape, dim: Option<usize>) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        shape,
        dim,
        _text: text,
    };
    p.expr()
}

/// Smallest `(m|n)` in which every variable mentioned in `texts` exists.
pub fn infer_shape(texts: &[&str]) -> Result<Shape> {
    let mut shape = Shape::new(0, 0);
    for text in texts {
        for s in lex(text)? {
            match s.tok {
                Tok::T(k) | Tok::Dt(k) => shape.m = shape.m.max(k),
                Tok::X(k) | Tok::Dx(k) => shape.n = shape.n.max(k),
                Tok::XSet(ks) => shape.n = shape.n.max(ks.into_iter().max().unwrap_or(0)),
                _ => {}
            }
        }
    }
    Ok(shape)
}
