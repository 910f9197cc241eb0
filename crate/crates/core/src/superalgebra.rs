//! The supercommutative algebra `A(m|n) = C[t_1..t_m] ⊗ Λ(ξ_1..ξ_n)` over ℚ.
//!
//! Indices are 0-based in code and 1-based in every printed form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{check_shape, Error, Result};
use crate::scalar::{self, Scalar};

/// Number of even (`m`) and odd (`n`) variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shape {
    pub m: usize,
    pub n: usize,
}

impl Shape {
    pub const fn new(m: usize, n: usize) -> Self {
        Shape { m, n }
    }

    /// Size of the block matrices of `gl(m|n)`.
    pub fn gl_size(&self) -> usize {
        self.m + self.n
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.m, self.n)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() != rhs.is_odd())
    }
}

/// `(-1)^{|a||b|}` is negative exactly when both are odd.
pub fn koszul_negative(a: Parity, b: Parity) -> bool {
    a.is_odd() && b.is_odd()
}

/// Parity classification of a (possibly inhomogeneous) element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolyParity {
    Even,
    Odd,
    Mixed,
}

/// Multi-index of t-degrees.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Exponent(SmallVec<[u32; 4]>);

impl Exponent {
    pub fn zeros(m: usize) -> Self {
        Exponent(SmallVec::from_elem(0, m))
    }

    pub fn unit(m: usize, i: usize) -> Self {
        let mut e = Self::zeros(m);
        e.0[i] = 1;
        e
    }

    pub fn from_slice(v: &[u32]) -> Self {
        Exponent(SmallVec::from_slice(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn plus(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Exponent) -> Option<Exponent> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Exponent(out))
    }

    pub fn with_added(&self, i: usize, k: u32) -> Exponent {
        let mut e = self.clone();
        e.0[i] += k;
        e
    }

    pub fn with_lowered(&self, i: usize) -> Option<Exponent> {
        let mut e = self.clone();
        e.0[i] = e.0[i].checked_sub(1)?;
        Some(e)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All `β` with `0 <= β <= self` componentwise.
    pub fn sub_exponents(&self) -> Vec<Exponent> {
        let mut out = vec![Exponent::zeros(self.len())];
        for i in 0..self.len() {
            let mut next = Vec::with_capacity(out.len() * (self.0[i] as usize + 1));
            for e in &out {
                for k in 0..=self.0[i] {
                    next.push(e.with_added(i, k));
                }
            }
            out = next;
        }
        out
    }

    /// Product of coordinatewise binomial coefficients `C(self, beta)`.
    pub fn binomial(&self, beta: &Exponent) -> Scalar {
        self.0
            .iter()
            .zip(&beta.0)
            .fold(scalar::one(), |acc, (&a, &b)| acc * scalar::binomial(a, b))
    }

    /// `Π r_i^{s_i}` with `0^0 = 1`.
    pub fn evaluate(&self, point: &[i64]) -> Scalar {
        self.0
            .iter()
            .zip(point)
            .fold(scalar::one(), |acc, (&s, &r)| acc * scalar::pow_i64(r, s))
    }
}

/// Graded-lexicographic comparison; `t1` sorts before `t2` among equal degrees.
fn cmp_deglex(a: &Exponent, b: &Exponent) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| b.0.cmp(&a.0))
}

/// All exponents of total degree `<= d`, in canonical order.
pub fn exponents_up_to(m: usize, d: usize) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; m];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if i == cur.len() {
            out.push(Exponent::from_slice(cur));
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d as u32, &mut cur, &mut out);
    out.sort_by(cmp_deglex);
    out
}

/// A set of odd indices, stored as a bitmask (so `n <= 32`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct OddSet(pub u32);

impl OddSet {
    pub const EMPTY: OddSet = OddSet(0);

    pub fn singleton(j: usize) -> Self {
        OddSet(1 << j)
    }

    /// Builds a set from strictly ascending indices.
    pub fn from_ascending(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(
                    "odd index sets must be strictly ascending".into(),
                ));
            }
        }
        for &i in indices {
            if i >= 32 {
                return Err(Error::IndexOutOfRange {
                    what: "odd variable",
                    index: i,
                    bound: 32,
                });
            }
            mask |= 1 << i;
        }
        Ok(OddSet(mask))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.len() % 2 == 1)
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn without(self, j: usize) -> Self {
        OddSet(self.0 & !(1 << j))
    }

    pub fn with(self, j: usize) -> Self {
        OddSet(self.0 | (1 << j))
    }

    pub fn minus(self, other: OddSet) -> Self {
        OddSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: OddSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Zero-based position of `j` in the ascending listing (`I(j)`).
    pub fn position(self, j: usize) -> usize {
        (self.0 & ((1u32 << j) - 1)).count_ones() as usize
    }

    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&j| self.contains(j))
    }

    /// Every subset, in bitmask order.
    pub fn subsets(self) -> Vec<OddSet> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u32;
        loop {
            out.push(OddSet(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out
    }

    pub fn all(n: usize) -> Vec<OddSet> {
        (0..(1u32 << n)).map(OddSet).collect()
    }
}

/// Sign and support of `ξ_I ξ_J`: `(0, ∅)` when the sets meet, otherwise
/// `(±1, I ∪ J)` with sign `(-1)^{#{(i,j) ∈ I×J : i > j}}`.
pub fn merge_sign(i: OddSet, j: OddSet) -> (i8, OddSet) {
    if i.0 & j.0 != 0 {
        return (0, OddSet::EMPTY);
    }
    let inversions: u32 = j
        .iter()
        .map(|b| i.0.checked_shr(b as u32 + 1).unwrap_or(0).count_ones())
        .sum();
    let s = if inversions.is_multiple_of(2) { 1 } else { -1 };
    (s, OddSet(i.0 | j.0))
}

/// Basis monomial `t^α ξ_I`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub exp: Exponent,
    pub odd: OddSet,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_deglex(&self.exp, &other.exp).then_with(|| self.odd.cmp(&other.odd))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(m: usize) -> Self {
        Monomial {
            exp: Exponent::zeros(m),
            odd: OddSet::EMPTY,
        }
    }

    pub fn new(exp: Exponent, odd: OddSet) -> Self {
        Monomial { exp, odd }
    }

    pub fn t(m: usize, i: usize) -> Self {
        Monomial::new(Exponent::unit(m, i), OddSet::EMPTY)
    }

    pub fn xi(m: usize, j: usize) -> Self {
        Monomial::new(Exponent::zeros(m), OddSet::singleton(j))
    }

    pub fn is_one(&self) -> bool {
        self.exp.is_zero() && self.odd.is_empty()
    }

    pub fn parity(&self) -> Parity {
        self.odd.parity()
    }

    /// `|α| + |I|`, the filtration degree used for `𝔪^k`.
    pub fn total_degree(&self) -> usize {
        self.exp.degree() as usize + self.odd.len()
    }

    pub fn t_degree(&self) -> usize {
        self.exp.degree() as usize
    }

    /// `self * other` as `(sign, monomial)`; sign 0 means the product vanishes.
    pub fn mul(&self, other: &Monomial) -> (i8, Monomial) {
        let (s, odd) = merge_sign(self.odd, other.odd);
        (
            s,
            Monomial {
                exp: self.exp.plus(&other.exp),
                odd,
            },
        )
    }

    pub fn fits(&self, shape: Shape) -> bool {
        self.exp.len() == shape.m && self.odd.max_index().is_none_or(|j| j < shape.n)
    }
}

/// Every monomial with t-degree `<= d`, in canonical order.
pub fn monomials_up_to(shape: Shape, d: usize) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = exponents_up_to(shape.m, d)
        .into_iter()
        .flat_map(|e| {
            OddSet::all(shape.n)
                .into_iter()
                .map(move |odd| Monomial::new(e.clone(), odd))
        })
        .collect();
    out.sort();
    out
}

/// Adds `c * key` to a sparse combination, dropping zeros.
pub(crate) fn accumulate<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub(crate) fn signed(s: i8, c: Scalar) -> Scalar {
    if s < 0 {
        -c
    } else {
        c
    }
}

/// Finitely supported element of `A(m|n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SuperPoly {
    shape: Shape,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SuperPoly {
    pub fn zero(shape: Shape) -> Self {
        SuperPoly {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(shape: Shape) -> Self {
        Self::constant(shape, scalar::one())
    }

    pub fn constant(shape: Shape, c: Scalar) -> Self {
        Self::term(shape, Monomial::one(shape.m), c)
    }

    pub fn term(shape: Shape, mono: Monomial, c: Scalar) -> Self {
        debug_assert!(mono.fits(shape));
        let mut p = Self::zero(shape);
        accumulate(&mut p.terms, mono, c);
        p
    }

    pub fn monomial(shape: Shape, mono: Monomial) -> Self {
        Self::term(shape, mono, scalar::one())
    }

    pub fn t(shape: Shape, i: usize) -> Self {
        Self::monomial(shape, Monomial::t(shape.m, i))
    }

    pub fn xi(shape: Shape, j: usize) -> Self {
        Self::monomial(shape, Monomial::xi(shape.m, j))
    }

    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(shape);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, c: Scalar) {
        accumulate(&mut self.terms, mono, c);
    }

    pub fn coefficient(&self, mono: &Monomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.shape.m))
    }

    /// Membership in the augmentation ideal `𝔪` (zero constant term).
    pub fn in_augmentation_ideal(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn max_t_degree(&self) -> usize {
        self.terms.keys().map(Monomial::t_degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Scalar) -> SuperPoly {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        SuperPoly {
            shape: self.shape,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &SuperPoly) -> Result<SuperPoly> {
        check_shape(self.shape, other.shape)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &SuperPoly) -> Result<SuperPoly> {
        check_shape(self.shape, other.shape)?;
        let mut out = Self::zero(self.shape);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (s, mono) = a.mul(b);
                if s != 0 {
                    out.add_term(mono, signed(s, ca * cb));
                }
            }
        }
        Ok(out)
    }

    /// `∂/∂t_i`.
    pub fn partial_t(&self, i: usize) -> Result<SuperPoly> {
        if i >= self.shape.m {
            return Err(Error::IndexOutOfRange {
                what: "even variable",
                index: i,
                bound: self.shape.m,
            });
        }
        let mut out = Self::zero(self.shape);
        for (mono, c) in &self.terms {
            let a = mono.exp.get(i);
            if a > 0 {
                let exp = mono.exp.with_lowered(i).expect("positive exponent");
                out.add_term(Monomial::new(exp, mono.odd), c * scalar::int(a as i64));
            }
        }
        Ok(out)
    }

    /// `∂/∂ξ_j`, the odd left derivation: `ξ_I ↦ (-1)^{I(j)} ξ_{I∖j}`.
    pub fn partial_xi(&self, j: usize) -> Result<SuperPoly> {
        if j >= self.shape.n {
            return Err(Error::IndexOutOfRange {
                what: "odd variable",
                index: j,
                bound: self.shape.n,
            });
        }
        let mut out = Self::zero(self.shape);
        for (mono, c) in &self.terms {
            if mono.odd.contains(j) {
                let negative = mono.odd.position(j) % 2 == 1;
                out.add_term(
                    Monomial::new(mono.exp.clone(), mono.odd.without(j)),
                    scalar::sign(negative) * c,
                );
            }
        }
        Ok(out)
    }

    pub fn parity_of(&self) -> PolyParity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            match m.parity() {
                Parity::Even => even = true,
                Parity::Odd => odd = true,
            }
        }
        match (even, odd) {
            (_, false) => PolyParity::Even,
            (false, true) => PolyParity::Odd,
            (true, true) => PolyParity::Mixed,
        }
    }

    /// Splits into `(even part, odd part)`.
    pub fn split_parity(&self) -> (SuperPoly, SuperPoly) {
        let mut even = Self::zero(self.shape);
        let mut odd = Self::zero(self.shape);
        for (m, c) in &self.terms {
            match m.parity() {
                Parity::Even => even.add_term(m.clone(), c.clone()),
                Parity::Odd => odd.add_term(m.clone(), c.clone()),
            }
        }
        (even, odd)
    }
}

impl Add for &SuperPoly {
    type Output = SuperPoly;
    /// Panics on shape mismatch; see [`SuperPoly::checked_add`].
    fn add(self, rhs: &SuperPoly) -> SuperPoly {
        self.checked_add(rhs).expect("shape mismatch in SuperPoly addition")
    }
}

impl Sub for &SuperPoly {
    type Output = SuperPoly;
    fn sub(self, rhs: &SuperPoly) -> SuperPoly {
        self + &(-rhs)
    }
}

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        self.scale(&-scalar::one())
    }
}

impl Mul for &SuperPoly {
    type Output = SuperPoly;
    /// Panics on shape mismatch; see [`SuperPoly::checked_mul`].
    fn mul(self, rhs: &SuperPoly) -> SuperPoly {
        self.checked_mul(rhs).expect("shape mismatch in SuperPoly product")
    }
}
