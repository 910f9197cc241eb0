//! The general linear Lie superalgebra `gl(m|n)` and its finite-dimensional
//! representations.

use std::fmt;
use std::path::Path;

use crate::error::{check_shape, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{self, format_scalar, parse_scalar, Scalar};
use crate::superalgebra::{koszul_negative, Parity, Shape};

/// Parity of the elementary matrix `E_{i,j}` (0-based indices).
pub fn elementary_parity(shape: Shape, i: usize, j: usize) -> Parity {
    Parity::from_bit((i < shape.m) != (j < shape.m))
}

/// Block-graded `(m+n) × (m+n)` matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperMatrix {
    shape: Shape,
    data: Matrix,
}

impl SuperMatrix {
    pub fn new(shape: Shape, data: Matrix) -> Result<Self> {
        let k = shape.gl_size();
        if data.rows() != k || data.cols() != k {
            return Err(Error::InvalidArgument(format!(
                "expected a {k}x{k} matrix for gl{shape}"
            )));
        }
        Ok(SuperMatrix { shape, data })
    }

    pub fn zero(shape: Shape) -> Self {
        let k = shape.gl_size();
        SuperMatrix {
            shape,
            data: Matrix::zeros(k, k),
        }
    }

    /// `E_{i,j}` with 0-based indices.
    pub fn elementary(shape: Shape, i: usize, j: usize) -> Self {
        SuperMatrix {
            shape,
            data: Matrix::unit(shape.gl_size(), i, j),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.data
    }

    /// Even and odd block parts.
    pub fn split_parity(&self) -> [SuperMatrix; 2] {
        let mut parts = [Self::zero(self.shape), Self::zero(self.shape)];
        let k = self.shape.gl_size();
        for r in 0..k {
            for c in 0..k {
                let v = self.data.get(r, c);
                if !num_traits::Zero::is_zero(v) {
                    let p = elementary_parity(self.shape, r, c).bit() as usize;
                    parts[p].data.set(r, c, v.clone());
                }
            }
        }
        parts
    }

    pub fn parity(&self) -> Option<Parity> {
        let [even, odd] = self.split_parity();
        match (even.data.is_zero(), odd.data.is_zero()) {
            (_, true) => Some(Parity::Even),
            (true, false) => Some(Parity::Odd),
            _ => None,
        }
    }
}

/// `[X, Y] = XY − (−1)^{|X||Y|} YX` on homogeneous parts.
pub fn gl_bracket(x: &SuperMatrix, y: &SuperMatrix) -> Result<SuperMatrix> {
    check_shape(x.shape, y.shape)?;
    let mut out = Matrix::zeros(x.shape.gl_size(), x.shape.gl_size());
    for (px, xp) in x.split_parity().iter().enumerate() {
        for (py, yp) in y.split_parity().iter().enumerate() {
            let sign = scalar::sign(px == 1 && py == 1);
            let term = xp.data.mul(&yp.data).sub(&yp.data.mul(&xp.data).scale(&sign));
            out = out.add(&term);
        }
    }
    Ok(SuperMatrix {
        shape: x.shape,
        data: out,
    })
}

/// Finite-dimensional `gl(m|n)`-module given by the images of all `E_{i,j}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rep {
    shape: Shape,
    parities: Vec<Parity>,
    /// `action[i * (m+n) + j] = ρ(E_{i,j})`.
    action: Vec<Matrix>,
}

/// A basis pair on which `ρ` fails to be a homomorphism, or a matrix of the
/// wrong parity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepViolation {
    pub left: (usize, usize),
    pub right: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for RepViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.left;
        match self.right {
            Some((c, d)) => write!(f, "E{},{} with E{},{}: {}", a + 1, b + 1, c + 1, d + 1, self.message),
            None => write!(f, "E{},{}: {}", a + 1, b + 1, self.message),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepCheck {
    pub pairs_checked: usize,
    pub violation: Option<RepViolation>,
}

impl RepCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl Rep {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    /// `ρ(E_{i,j})`, 0-based.
    pub fn matrix(&self, i: usize, j: usize) -> &Matrix {
        &self.action[i * self.shape.gl_size() + j]
    }

    /// `ρ(X)` for an arbitrary supermatrix.
    pub fn image(&self, x: &SuperMatrix) -> Result<Matrix> {
        check_shape(self.shape, x.shape)?;
        let k = self.shape.gl_size();
        let mut out = Matrix::zeros(self.dim(), self.dim());
        for i in 0..k {
            for j in 0..k {
                let c = x.data.get(i, j);
                if !num_traits::Zero::is_zero(c) {
                    out = out.add(&self.matrix(i, j).scale(c));
                }
            }
        }
        Ok(out)
    }

    /// Every `ρ(E_{i,i})` is diagonal in the chosen basis.
    pub fn has_weight_basis(&self) -> bool {
        (0..self.shape.gl_size()).all(|i| self.matrix(i, i).is_diagonal())
    }

    fn unchecked(shape: Shape, parities: Vec<Parity>, action: Vec<Matrix>) -> Self {
        Rep {
            shape,
            parities,
            action,
        }
    }
}

/// The standard module `C^{m|n}`.
pub fn natural_rep(shape: Shape) -> Result<Rep> {
    let k = shape.gl_size();
    if k == 0 {
        return Err(Error::InvalidRep("natural module needs m + n >= 1".into()));
    }
    let parities = (0..k).map(|i| Parity::from_bit(i >= shape.m)).collect();
    let mut action = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            action.push(Matrix::unit(k, i, j));
        }
    }
    Ok(Rep::unchecked(shape, parities, action))
}

/// The one-dimensional even module with zero action.
pub fn trivial_rep(shape: Shape) -> Rep {
    let k = shape.gl_size();
    Rep::unchecked(shape, vec![Parity::Even], vec![Matrix::zeros(1, 1); k * k])
}

/// `ρ(x)(u ⊗ v) = ρ_R(x)u ⊗ v + (−1)^{|x||u|} u ⊗ ρ_S(x)v`.
pub fn tensor_rep(r: &Rep, s: &Rep) -> Result<Rep> {
    check_shape(r.shape, s.shape)?;
    let shape = r.shape;
    let k = shape.gl_size();
    let mut parities = Vec::with_capacity(r.dim() * s.dim());
    for pu in &r.parities {
        for pv in &s.parities {
            parities.push(*pu + *pv);
        }
    }
    let id_s = Matrix::identity(s.dim());
    let mut action = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let px = elementary_parity(shape, i, j);
            let mut signs = Matrix::zeros(r.dim(), r.dim());
            for (u, pu) in r.parities.iter().enumerate() {
                signs.set(u, u, scalar::sign(koszul_negative(px, *pu)));
            }
            let m = r.matrix(i, j).kron(&id_s).add(&signs.kron(s.matrix(i, j)));
            action.push(m);
        }
    }
    Ok(Rep::unchecked(shape, parities, action))
}

/// Block-diagonal `R ⊕ S`.
pub fn direct_sum_rep(r: &Rep, s: &Rep) -> Result<Rep> {
    check_shape(r.shape, s.shape)?;
    let mut parities = r.parities.clone();
    parities.extend_from_slice(&s.parities);
    let action = r.action.iter().zip(&s.action).map(|(a, b)| a.block_diag(b)).collect();
    Ok(Rep::unchecked(r.shape, parities, action))
}

/// Builds a module from user-supplied matrices (row-major in `E_{i,j}`
/// order), rejecting anything that is not a representation.
pub fn custom_rep(shape: Shape, parities: Vec<Parity>, matrices: Vec<Matrix>) -> Result<Rep> {
    let k = shape.gl_size();
    let d = parities.len();
    if d == 0 {
        return Err(Error::InvalidRep("dimension must be positive".into()));
    }
    if matrices.len() != k * k {
        return Err(Error::InvalidRep(format!(
            "expected {} matrices, got {}",
            k * k,
            matrices.len()
        )));
    }
    if let Some(bad) = matrices.iter().position(|a| a.rows() != d || a.cols() != d) {
        return Err(Error::InvalidRep(format!(
            "matrix for E{},{} is not {d}x{d}",
            bad / k + 1,
            bad % k + 1
        )));
    }
    let rep = Rep::unchecked(shape, parities, matrices);
    match verify_rep(&rep).violation {
        None => Ok(rep),
        Some(v) => Err(Error::InvalidRep(v.to_string())),
    }
}

/// Checks parity compatibility and `ρ([x,y]) = [ρ(x), ρ(y)]` on all basis pairs.
pub fn verify_rep(rep: &Rep) -> RepCheck {
    let shape = rep.shape;
    let k = shape.gl_size();
    for i in 0..k {
        for j in 0..k {
            let px = elementary_parity(shape, i, j);
            let a = rep.matrix(i, j);
            for r in 0..rep.dim() {
                for c in 0..rep.dim() {
                    let flips = rep.parities[r] != rep.parities[c];
                    if !num_traits::Zero::is_zero(a.get(r, c)) && flips != px.is_odd() {
                        return RepCheck {
                            pairs_checked: 0,
                            violation: Some(RepViolation {
                                left: (i, j),
                                right: None,
                                message: format!("entry ({}, {}) has the wrong parity", r + 1, c + 1),
                            }),
                        };
                    }
                }
            }
        }
    }
    let mut pairs = 0;
    for i in 0..k {
        for j in 0..k {
            for p in 0..k {
                for q in 0..k {
                    pairs += 1;
                    let x = SuperMatrix::elementary(shape, i, j);
                    let y = SuperMatrix::elementary(shape, p, q);
                    let lhs = rep.image(&gl_bracket(&x, &y).expect("same shape")).expect("same shape");
                    let (a, b) = (rep.matrix(i, j), rep.matrix(p, q));
                    let neg = koszul_negative(elementary_parity(shape, i, j), elementary_parity(shape, p, q));
                    let rhs = a.mul(b).sub(&b.mul(a).scale(&scalar::sign(neg)));
                    if lhs != rhs {
                        return RepCheck {
                            pairs_checked: pairs,
                            violation: Some(RepViolation {
                                left: (i, j),
                                right: Some((p, q)),
                                message: "bracket is not preserved".into(),
                            }),
                        };
                    }
                }
            }
        }
    }
    RepCheck {
        pairs_checked: pairs,
        violation: None,
    }
}

/// Parses the matrix file format:
///
/// ```text
/// 2 0 1
/// E 1 1 : 1 0 0 0
/// E 1 2 : 0 1 0 0
/// ...
/// ```
///
/// The header gives the dimension and the parity of each basis vector; each
/// following line gives `ρ(E_{i,j})` (1-based) in row-major order. Blank
/// lines and lines starting with `#` are ignored.
pub fn parse_rep_file(shape: Shape, text: &str) -> Result<Rep> {
    let k = shape.gl_size();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let bad = |line: usize, msg: String| Error::InvalidRep(format!("line {line}: {msg}"));
    let (hl, header) = lines.next().ok_or_else(|| Error::InvalidRep("empty file".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| bad(hl, format!("bad header token {w:?}"))))
        .collect::<Result<_>>()?;
    let (&d, ps) = nums.split_first().ok_or_else(|| bad(hl, "missing dimension".into()))?;
    if ps.len() != d || ps.iter().any(|&p| p > 1) {
        return Err(bad(hl, format!("expected {d} parities in {{0,1}}")));
    }
    let parities: Vec<Parity> = ps.iter().map(|&p| Parity::from_bit(p == 1)).collect();
    let mut slots: Vec<Option<Matrix>> = vec![None; k * k];
    for (ln, line) in lines {
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| bad(ln, "expected `E i j : entries`".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 3 || head[0] != "E" {
            return Err(bad(ln, "expected `E i j`".into()));
        }
        let idx = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if (1..=k).contains(&v) => Ok(v - 1),
                _ => Err(bad(ln, format!("index {s:?} outside 1..{k}"))),
            }
        };
        let (i, j) = (idx(head[1])?, idx(head[2])?);
        let entries: Vec<Scalar> = body
            .split_whitespace()
            .map(parse_scalar)
            .collect::<Result<_>>()
            .map_err(|e| bad(ln, e.to_string()))?;
        if entries.len() != d * d {
            return Err(bad(ln, format!("expected {} entries, got {}", d * d, entries.len())));
        }
        if slots[i * k + j].is_some() {
            return Err(bad(ln, format!("E{},{} given twice", i + 1, j + 1)));
        }
        let rows = entries.chunks(d).map(|c| c.to_vec()).collect();
        slots[i * k + j] = Some(Matrix::from_rows(rows));
    }
    let mut matrices = Vec::with_capacity(k * k);
    for (idx, s) in slots.into_iter().enumerate() {
        matrices.push(s.ok_or_else(|| Error::InvalidRep(format!("missing E{},{}", idx / k + 1, idx % k + 1)))?);
    }
    custom_rep(shape, parities, matrices)
}

/// Renders a module in the matrix file format.
pub fn format_rep_file(rep: &Rep) -> String {
    let k = rep.shape.gl_size();
    let mut out = rep.dim().to_string();
    for p in &rep.parities {
        out.push_str(&format!(" {}", p.bit()));
    }
    out.push('\n');
    for i in 0..k {
        for j in 0..k {
            let a = rep.matrix(i, j);
            let entries: Vec<String> = (0..rep.dim())
                .flat_map(|r| (0..rep.dim()).map(move |c| (r, c)))
                .map(|(r, c)| format_scalar(a.get(r, c)))
                .collect();
            out.push_str(&format!("E {} {} : {}\n", i + 1, j + 1, entries.join(" ")));
        }
    }
    out
}

/// `natural | trivial | tensor(a,b) | sum(a,b) | file:path`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RepDescriptor {
    Natural,
    Trivial,
    Tensor(Box<RepDescriptor>, Box<RepDescriptor>),
    Sum(Box<RepDescriptor>, Box<RepDescriptor>),
    File(String),
}

impl RepDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let (d, rest) = Self::parse_prefix(text.trim())?;
        if !rest.trim().is_empty() {
            return Err(Error::Config(format!("trailing input in rep descriptor: {rest:?}")));
        }
        Ok(d)
    }

    fn parse_prefix(text: &str) -> Result<(Self, &str)> {
        let text = text.trim_start();
        if let Some(path) = text.strip_prefix("file:") {
            let end = path.find([',', ')']).unwrap_or(path.len());
            return Ok((RepDescriptor::File(path[..end].trim().to_string()), &path[end..]));
        }
        for (kw, is_tensor) in [("tensor", true), ("sum", false)] {
            if let Some(rest) = text.strip_prefix(kw) {
                let rest = rest
                    .trim_start()
                    .strip_prefix('(')
                    .ok_or_else(|| Error::Config(format!("expected `(` after {kw}")))?;
                let (a, rest) = Self::parse_prefix(rest)?;
                let rest = rest
                    .trim_start()
                    .strip_prefix(',')
                    .ok_or_else(|| Error::Config(format!("expected `,` in {kw}(..)")))?;
                let (b, rest) = Self::parse_prefix(rest)?;
                let rest = rest
                    .trim_start()
                    .strip_prefix(')')
                    .ok_or_else(|| Error::Config(format!("expected `)` closing {kw}(..)")))?;
                let d = if is_tensor {
                    RepDescriptor::Tensor(Box::new(a), Box::new(b))
                } else {
                    RepDescriptor::Sum(Box::new(a), Box::new(b))
                };
                return Ok((d, rest));
            }
        }
        for (kw, d) in [("natural", RepDescriptor::Natural), ("trivial", RepDescriptor::Trivial)] {
            if let Some(rest) = text.strip_prefix(kw) {
                return Ok((d, rest));
            }
        }
        Err(Error::Config(format!(
            "unknown rep descriptor {text:?} (expected natural, trivial, tensor(..), sum(..) or file:path)"
        )))
    }

    /// Rewrites relative `file:` paths against `base`.
    pub fn resolve_paths(&self, base: &Path) -> RepDescriptor {
        match self {
            RepDescriptor::File(p) if Path::new(p).is_relative() => {
                RepDescriptor::File(base.join(p).display().to_string())
            }
            RepDescriptor::Tensor(a, b) => {
                RepDescriptor::Tensor(Box::new(a.resolve_paths(base)), Box::new(b.resolve_paths(base)))
            }
            RepDescriptor::Sum(a, b) => {
                RepDescriptor::Sum(Box::new(a.resolve_paths(base)), Box::new(b.resolve_paths(base)))
            }
            other => other.clone(),
        }
    }

    /// Builds the module; relative file paths resolve against `base`.
    pub fn build(&self, shape: Shape, base: Option<&Path>) -> Result<Rep> {
        match self {
            RepDescriptor::Natural => natural_rep(shape),
            RepDescriptor::Trivial => Ok(trivial_rep(shape)),
            RepDescriptor::Tensor(a, b) => tensor_rep(&a.build(shape, base)?, &b.build(shape, base)?),
            RepDescriptor::Sum(a, b) => direct_sum_rep(&a.build(shape, base)?, &b.build(shape, base)?),
            RepDescriptor::File(p) => {
                let path = match base {
                    Some(dir) if Path::new(p).is_relative() => dir.join(p),
                    _ => Path::new(p).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_rep_file(shape, &text)
            }
        }
    }
}

impl fmt::Display for RepDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepDescriptor::Natural => f.write_str("natural"),
            RepDescriptor::Trivial => f.write_str("trivial"),
            RepDescriptor::Tensor(a, b) => write!(f, "tensor({a},{b})"),
            RepDescriptor::Sum(a, b) => write!(f, "sum({a},{b})"),
            RepDescriptor::File(p) => write!(f, "file:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let s = Shape::new(1, 1);
        let e = |i, j| SuperMatrix::elementary(s, i, j);
        let s2 = Shape::new(2, 0);
        assert_eq!(
            gl_bracket(&SuperMatrix::elementary(s2, 0, 0), &SuperMatrix::elementary(s2, 0, 1)).unwrap(),
            SuperMatrix::elementary(s2, 0, 1)
        );
        let sum = SuperMatrix::new(s, Matrix::identity(2)).unwrap();
        assert_eq!(gl_bracket(&e(0, 1), &e(1, 0)).unwrap(), sum);
        assert_eq!(gl_bracket(&e(0, 0), &e(0, 0)).unwrap(), SuperMatrix::zero(s));
    }

    #[test]
    fn classical_structure_constants() {
        for (m, n) in [(1, 1), (2, 1), (2, 2), (0, 2)] {
            let s = Shape::new(m, n);
            let k = s.gl_size();
            for i in 0..k {
                for j in 0..k {
                    for p in 0..k {
                        for q in 0..k {
                            let got = gl_bracket(&SuperMatrix::elementary(s, i, j), &SuperMatrix::elementary(s, p, q))
                                .unwrap();
                            let mut want = Matrix::zeros(k, k);
                            if j == p {
                                want = want.add(&Matrix::unit(k, i, q));
                            }
                            if q == i {
                                let neg = koszul_negative(elementary_parity(s, i, j), elementary_parity(s, p, q));
                                want = want.sub(&Matrix::unit(k, p, j).scale(&scalar::sign(neg)));
                            }
                            assert_eq!(got.matrix(), &want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn constructions_verify() {
        let s = Shape::new(1, 1);
        let nat = natural_rep(s).unwrap();
        assert_eq!(nat.dim(), 2);
        assert_eq!(nat.parities(), &[Parity::Even, Parity::Odd]);
        assert!(verify_rep(&natural_rep(Shape::new(2, 2)).unwrap()).passed());
        let t = tensor_rep(&nat, &nat).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.parities()[1], Parity::Odd);
        assert_eq!(t.parities()[3], Parity::Even);
        assert!(verify_rep(&t).passed());
        let sum = direct_sum_rep(&nat, &trivial_rep(s)).unwrap();
        assert_eq!(sum.dim(), 3);
        assert!(verify_rep(&sum).passed());
        assert!(verify_rep(&trivial_rep(s)).passed());
        assert!(natural_rep(Shape::new(0, 0)).is_err());
    }

    #[test]
    fn custom_and_file_round_trip() {
        let s = Shape::new(1, 1);
        let nat = natural_rep(s).unwrap();
        let text = format_rep_file(&nat);
        assert_eq!(parse_rep_file(s, &text).unwrap(), nat);
        let mutated = text.replacen("E 1 2 : 0 1 0 0", "E 1 2 : 0 -1 0 0", 1);
        assert_ne!(mutated, text);
        let err = parse_rep_file(s, &mutated).unwrap_err();
        assert!(matches!(err, Error::InvalidRep(_)));
        let missing: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(parse_rep_file(s, &missing)
            .unwrap_err()
            .to_string()
            .contains("missing E2,2"));
    }

    #[test]
    fn descriptors() {
        let d = RepDescriptor::parse("tensor(natural, sum(trivial,natural))").unwrap();
        assert_eq!(d.to_string(), "tensor(natural,sum(trivial,natural))");
        assert_eq!(d.build(Shape::new(1, 1), None).unwrap().dim(), 6);
        assert!(RepDescriptor::parse("nat").is_err());
        assert!(RepDescriptor::parse("sum(natural)").is_err());
    }
}
