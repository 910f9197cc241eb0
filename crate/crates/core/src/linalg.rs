//! Exact linear algebra over ℚ.
//!
//! Elimination is fraction-free: rows are scaled to primitive integer vectors
//! and combined with integer multipliers, so no rational arithmetic happens
//! inside the reduction loop. Rationals only reappear when a kernel vector or
//! solution is read off the reduced rows.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{self, Scalar};

/// Dense matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| scalar::format_scalar(self.get(r, c))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// The matrix unit with a single 1 at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, Scalar::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn scale(&self, k: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, Scalar)>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for row in self.sparse_rows() {
            e.insert(&row);
        }
        e.rank()
    }

    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut e = Echelon::new(self.cols);
        for row in self.sparse_rows() {
            e.insert(&row);
        }
        e.kernel()
    }

    /// Exact inverse, or `None` when singular or non-square.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut e = Echelon::new(2 * n);
        for (r, mut row) in self.sparse_rows().into_iter().enumerate() {
            row.push((n + r, Scalar::one()));
            e.insert(&row);
        }
        if e.pivot_columns().take_while(|&c| c < n).count() != n {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for (c, row) in &e.pivots {
            let lead = Scalar::from_integer(row[0].1.clone());
            for (k, v) in row.iter().skip(1) {
                out.set(*c, k - n, Scalar::from_integer(v.clone()) / &lead);
            }
        }
        Some(out)
    }

    /// Some solution of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let n = self.cols;
        let mut e = Echelon::new(n + 1);
        for (mut row, rhs) in self.sparse_rows().into_iter().zip(b) {
            if !rhs.is_zero() {
                row.push((n, rhs.clone()));
            }
            e.insert(&row);
        }
        if e.pivots.contains_key(&n) {
            return None;
        }
        let mut x = vec![Scalar::zero(); n];
        for (c, row) in &e.pivots {
            if let Some((_, v)) = row.iter().find(|(k, _)| *k == n) {
                x[*c] = Scalar::new(v.clone(), row[0].1.clone());
            }
        }
        Some(x)
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Incremental fraction-free Gauss–Jordan reduction.
///
/// Invariant: every stored row is primitive, its leading entry sits in its
/// pivot column, and it has zeros in all other pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

fn to_integer_row(row: &[(usize, Scalar)]) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, v) in row {
        lcm = lcm.lcm(v.denom());
    }
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    out.sort_by_key(|(c, _)| *c);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    if row.first().is_some_and(|(_, v)| v.is_negative()) {
        for (_, v) in row.iter_mut() {
            *v = -&*v;
        }
    }
}

/// `ka * a - kb * b`, dropping zeros.
fn combine(a: &IntRow, ka: &BigInt, b: &IntRow, kb: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|x| x.0);
        let cb = b.get(j).map(|x| x.0);
        match (ca, cb) {
            (Some(x), Some(y)) if x == y => {
                let v = ka * &a[i].1 - kb * &b[j].1;
                if !v.is_zero() {
                    out.push((x, v));
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push((x, ka * &a[i].1));
                i += 1;
            }
            (Some(x), None) => {
                out.push((x, ka * &a[i].1));
                i += 1;
            }
            (_, Some(y)) => {
                out.push((y, -(kb * &b[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn entry(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce(&self, mut row: IntRow) -> IntRow {
        let present: Vec<usize> = row
            .iter()
            .map(|(c, _)| *c)
            .filter(|c| self.pivots.contains_key(c))
            .collect();
        for c in present {
            let Some(v) = entry(&row, c).cloned() else {
                continue;
            };
            let p = &self.pivots[&c];
            let lead = &p[0].1;
            let g = lead.gcd(&v);
            row = combine(&row, &(lead / &g), p, &(&v / &g));
        }
        make_primitive(&mut row);
        row
    }

    /// Adds a row; returns `true` when it increased the rank.
    pub fn insert(&mut self, row: &[(usize, Scalar)]) -> bool {
        debug_assert!(row.iter().all(|(c, _)| *c < self.cols));
        let row = self.reduce(to_integer_row(row));
        if row.is_empty() {
            return false;
        }
        let c = row[0].0;
        let lead = row[0].1.clone();
        for q in self.pivots.values_mut() {
            if let Some(v) = entry(q, c).cloned() {
                let g = lead.gcd(&v);
                *q = combine(q, &(&lead / &g), &row, &(&v / &g));
                make_primitive(q);
            }
        }
        self.pivots.insert(c, row);
        true
    }

    /// Whether `row` lies in the row space.
    pub fn contains(&self, row: &[(usize, Scalar)]) -> bool {
        self.reduce(to_integer_row(row)).is_empty()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|c| !self.pivots.contains_key(c)) {
            let mut x = vec![Scalar::zero(); self.cols];
            x[f] = Scalar::one();
            for (c, row) in &self.pivots {
                if let Some(v) = entry(row, f) {
                    x[*c] = -Scalar::new(v.clone(), row[0].1.clone());
                }
            }
            out.push(x);
        }
        out
    }
}
