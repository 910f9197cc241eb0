//! Formal operator words: compositions of multiplications, coordinate
//! derivations and Witt basis terms, used to evaluate elements of `Ū` and of
//! the Weyl superalgebra on modules.

use std::collections::BTreeMap;

use crate::error::{check_shape, Error, Result};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{accumulate, koszul_negative, signed, Exponent, Monomial, OddSet, Parity, Shape, SuperPoly};
use crate::witt::{ensure_slot, witt_act, DerSlot, WittBasis, WittElement};

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Atom {
    /// Left multiplication by an `A`-monomial.
    Mul(Monomial),
    /// `∂/∂t_i` as a Weyl generator.
    Dt(usize),
    /// `∂/∂ξ_j` as a Weyl generator.
    Dxi(usize),
    /// A Witt basis term acting through the module structure.
    Witt(WittBasis),
}

impl Atom {
    pub fn parity(&self) -> Parity {
        match self {
            Atom::Mul(m) => m.parity(),
            Atom::Dt(_) => Parity::Even,
            Atom::Dxi(_) => Parity::Odd,
            Atom::Witt(b) => b.parity(),
        }
    }

    pub fn is_weyl(&self) -> bool {
        !matches!(self, Atom::Witt(_))
    }

    pub fn from_slot(slot: DerSlot) -> Atom {
        match slot {
            DerSlot::T(i) => Atom::Dt(i),
            DerSlot::Xi(j) => Atom::Dxi(j),
        }
    }

    fn check(&self, shape: Shape) -> Result<()> {
        let ok = match self {
            Atom::Mul(m) => m.fits(shape),
            Atom::Dt(i) => return ensure_slot(shape, DerSlot::T(*i)),
            Atom::Dxi(j) => return ensure_slot(shape, DerSlot::Xi(*j)),
            Atom::Witt(b) => b.fits(shape),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("atom does not fit shape {shape}")))
        }
    }
}

/// Brings a word into canonical form: unit multiplications vanish, adjacent
/// multiplications merge, and `1·∂` Witt terms become Weyl derivations.
/// Returns the accumulated sign, or `None` when the word is zero.
pub fn canonical_word(shape: Shape, word: Vec<Atom>) -> Option<(i8, Vec<Atom>)> {
    let mut sign = 1i8;
    let mut out: Vec<Atom> = Vec::with_capacity(word.len());
    for atom in word {
        let atom = match atom {
            Atom::Witt(b) if b.mono.is_one() => Atom::from_slot(b.slot),
            Atom::Mul(m) if m.is_one() => continue,
            other => other,
        };
        if let (Atom::Mul(next), Some(Atom::Mul(prev))) = (&atom, out.last()) {
            let (s, merged) = prev.mul(next);
            if s == 0 {
                return None;
            }
            sign *= s;
            out.pop();
            if !merged.is_one() {
                out.push(Atom::Mul(merged));
            }
            continue;
        }
        out.push(atom);
    }
    let _ = shape;
    Some((sign, out))
}

/// Finite linear combination of words. A word `[a_1, …, a_k]` denotes the
/// product `a_1 a_2 ⋯ a_k`, so `a_k` acts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OperatorWord {
    shape: Shape,
    terms: BTreeMap<Vec<Atom>, Scalar>,
}

impl OperatorWord {
    pub fn zero(shape: Shape) -> Self {
        OperatorWord {
            shape,
            terms: BTreeMap::new(),
        }
    }

    /// The empty word.
    pub fn identity(shape: Shape) -> Self {
        Self::word(shape, Vec::new())
    }

    pub fn word(shape: Shape, atoms: Vec<Atom>) -> Self {
        let mut w = Self::zero(shape);
        w.add_word(atoms, scalar::one());
        w
    }

    pub fn atom(shape: Shape, atom: Atom) -> Self {
        Self::word(shape, vec![atom])
    }

    /// Validates every atom against the shape.
    pub fn checked(shape: Shape, terms: impl IntoIterator<Item = (Vec<Atom>, Scalar)>) -> Result<Self> {
        let mut w = Self::zero(shape);
        for (atoms, c) in terms {
            for a in &atoms {
                a.check(shape)?;
            }
            w.add_word(atoms, c);
        }
        Ok(w)
    }

    pub fn from_witt(x: &WittElement) -> Self {
        let mut w = Self::zero(x.shape());
        for (b, c) in x.terms() {
            w.add_word(vec![Atom::Witt(b.clone())], c.clone());
        }
        w
    }

    pub fn from_poly(p: &SuperPoly) -> Self {
        let mut w = Self::zero(p.shape());
        for (m, c) in p.terms() {
            w.add_word(vec![Atom::Mul(m.clone())], c.clone());
        }
        w
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Atom>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_word(&mut self, atoms: Vec<Atom>, c: Scalar) {
        if let Some((s, atoms)) = canonical_word(self.shape, atoms) {
            accumulate(&mut self.terms, atoms, signed(s, c));
        }
    }

    pub fn add_assign(&mut self, other: &OperatorWord) {
        for (w, c) in &other.terms {
            accumulate(&mut self.terms, w.clone(), c.clone());
        }
    }

    pub fn scale(&self, k: &Scalar) -> OperatorWord {
        let mut w = Self::zero(self.shape);
        for (atoms, c) in &self.terms {
            accumulate(&mut w.terms, atoms.clone(), c * k);
        }
        w
    }

    pub fn checked_add(&self, other: &OperatorWord) -> Result<OperatorWord> {
        check_shape(self.shape, other.shape)?;
        let mut w = self.clone();
        w.add_assign(other);
        Ok(w)
    }

    pub fn checked_sub(&self, other: &OperatorWord) -> Result<OperatorWord> {
        self.checked_add(&other.scale(&-scalar::one()))
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &OperatorWord) -> Result<OperatorWord> {
        check_shape(self.shape, other.shape)?;
        let mut w = Self::zero(self.shape);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut atoms = a.clone();
                atoms.extend(b.iter().cloned());
                w.add_word(atoms, ca * cb);
            }
        }
        Ok(w)
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|w| word_parity(w));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn split_parity(&self) -> [OperatorWord; 2] {
        let mut parts = [Self::zero(self.shape), Self::zero(self.shape)];
        for (w, c) in &self.terms {
            accumulate(&mut parts[word_parity(w).bit() as usize].terms, w.clone(), c.clone());
        }
        parts
    }

    pub fn is_weyl(&self) -> bool {
        self.terms.keys().all(|w| w.iter().all(Atom::is_weyl))
    }

    /// Maximal number of `t`-degrees a word can add when applied.
    pub fn max_degree_gain(&self) -> usize {
        self.terms
            .keys()
            .map(|w| {
                w.iter()
                    .map(|a| match a {
                        Atom::Mul(m) => m.t_degree(),
                        Atom::Witt(b) => b.mono.t_degree(),
                        _ => 0,
                    })
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }

    /// Evaluates the word on `A(m|n)` with Witt atoms acting as derivations
    /// and Weyl atoms acting by their defining action.
    pub fn act_poly(&self, p: &SuperPoly) -> Result<SuperPoly> {
        check_shape(self.shape, p.shape())?;
        let mut out = SuperPoly::zero(self.shape);
        for (w, c) in &self.terms {
            let mut v = p.clone();
            for atom in w.iter().rev() {
                if v.is_zero() {
                    break;
                }
                v = act_atom_poly(self.shape, atom, &v)?;
            }
            out = &out + &v.scale(c);
        }
        Ok(out)
    }
}

pub fn word_parity(w: &[Atom]) -> Parity {
    w.iter().fold(Parity::Even, |acc, a| acc + a.parity())
}

fn act_atom_poly(shape: Shape, atom: &Atom, p: &SuperPoly) -> Result<SuperPoly> {
    match atom {
        Atom::Mul(m) => SuperPoly::monomial(shape, m.clone()).checked_mul(p),
        Atom::Dt(i) => p.partial_t(*i),
        Atom::Dxi(j) => p.partial_xi(*j),
        Atom::Witt(b) => witt_act(&WittElement::basis(shape, b.clone()), p),
    }
}

/// `u v − (−1)^{|u||v|} v u`, expanded over homogeneous parts.
pub fn supercommutator(u: &OperatorWord, v: &OperatorWord) -> Result<OperatorWord> {
    check_shape(u.shape, v.shape)?;
    let mut out = OperatorWord::zero(u.shape);
    for up in u.split_parity() {
        for vp in v.split_parity() {
            let (Some(pu), Some(pv)) = (up.parity(), vp.parity()) else {
                continue;
            };
            let uv = up.compose(&vp)?;
            let vu = vp.compose(&up)?;
            out.add_assign(&uv);
            out.add_assign(&vu.scale(&-scalar::sign(koszul_negative(pu, pv))));
        }
    }
    Ok(out)
}

/// Parameters of `w^{r,j,∂,∂′}_{α,β,I,J}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WParams {
    pub alpha: Exponent,
    pub beta: Exponent,
    pub left_odd: OddSet,
    pub right_odd: OddSet,
    pub r: u32,
    pub j: usize,
    pub left: DerSlot,
    pub right: DerSlot,
}

/// `Σ_{i=0}^r (−1)^i C(r,i) (t^{α+(r−i)e_j} ξ_I ∂) ∘ (t^{β+i e_j} ξ_J ∂′)`.
pub fn w_element(shape: Shape, p: &WParams) -> Result<OperatorWord> {
    if p.j >= shape.m {
        return Err(Error::IndexOutOfRange {
            what: "even variable",
            index: p.j,
            bound: shape.m,
        });
    }
    ensure_slot(shape, p.left)?;
    ensure_slot(shape, p.right)?;
    let left_mono = Monomial::new(p.alpha.clone(), p.left_odd);
    let right_mono = Monomial::new(p.beta.clone(), p.right_odd);
    if !left_mono.fits(shape) || !right_mono.fits(shape) {
        return Err(Error::InvalidArgument(format!(
            "w-element exponents do not fit shape {shape}"
        )));
    }
    let mut w = OperatorWord::zero(shape);
    for i in 0..=p.r {
        let c = scalar::sign(i % 2 == 1) * scalar::binomial(p.r, i);
        let x = WittBasis::new(Monomial::new(p.alpha.with_added(p.j, p.r - i), p.left_odd), p.left);
        let y = WittBasis::new(Monomial::new(p.beta.with_added(p.j, i), p.right_odd), p.right);
        w.add_word(vec![Atom::Witt(x), Atom::Witt(y)], c);
    }
    Ok(w)
}

/// `w^r_{α+e_j,β} − w^r_{α,β+e_j} − w^{r+1}_{α,β}`; zero as a formal sum.
pub fn w_recurrence_defect(shape: Shape, p: &WParams) -> Result<OperatorWord> {
    let mut shifted_left = p.clone();
    shifted_left.alpha = p.alpha.with_added(p.j, 1);
    let mut shifted_right = p.clone();
    shifted_right.beta = p.beta.with_added(p.j, 1);
    let mut next = p.clone();
    next.r = p.r + 1;
    w_element(shape, &shifted_left)?
        .checked_sub(&w_element(shape, &shifted_right)?)?
        .checked_sub(&w_element(shape, &next)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: u32) -> WParams {
        WParams {
            alpha: Exponent::zeros(1),
            beta: Exponent::zeros(1),
            left_odd: OddSet::EMPTY,
            right_odd: OddSet::EMPTY,
            r,
            j: 0,
            left: DerSlot::T(0),
            right: DerSlot::Xi(0),
        }
    }

    #[test]
    fn canonicalisation() {
        let s = Shape::new(1, 2);
        let w = OperatorWord::word(
            s,
            vec![
                Atom::Mul(Monomial::xi(1, 1)),
                Atom::Mul(Monomial::xi(1, 0)),
                Atom::Witt(WittBasis::new(Monomial::one(1), DerSlot::T(0))),
            ],
        );
        let key = vec![
            Atom::Mul(Monomial::new(
                Exponent::zeros(1),
                OddSet::from_ascending(&[0, 1]).unwrap(),
            )),
            Atom::Dt(0),
        ];
        assert_eq!(w.terms().get(&key), Some(&-scalar::one()));
        let dead = OperatorWord::word(s, vec![Atom::Mul(Monomial::xi(1, 0)), Atom::Mul(Monomial::xi(1, 0))]);
        assert!(dead.is_zero());
    }

    #[test]
    fn w_element_examples() {
        let s = Shape::new(1, 1);
        let w0 = w_element(s, &params(0)).unwrap();
        assert_eq!(w0, OperatorWord::word(s, vec![Atom::Dt(0), Atom::Dxi(0)]));
        let w1 = w_element(s, &params(1)).unwrap();
        let t1dt1 = Atom::Witt(WittBasis::new(Monomial::t(1, 0), DerSlot::T(0)));
        let t1dx1 = Atom::Witt(WittBasis::new(Monomial::t(1, 0), DerSlot::Xi(0)));
        let mut expected = OperatorWord::word(s, vec![t1dt1, Atom::Dxi(0)]);
        expected.add_word(vec![Atom::Dt(0), t1dx1], -scalar::one());
        assert_eq!(w1, expected);
        for r in 0..4 {
            assert!(w_recurrence_defect(s, &params(r)).unwrap().is_zero());
        }
        let mut bad = params(0);
        bad.j = 1;
        assert!(w_element(s, &bad).is_err());
    }

    #[test]
    fn act_poly_composes_right_to_left() {
        let s = Shape::new(1, 0);
        let t1 = SuperPoly::t(s, 0);
        let w = OperatorWord::word(s, vec![Atom::Dt(0), Atom::Mul(Monomial::t(1, 0))]);
        // ∂t(t · t) = 2t
        assert_eq!(w.act_poly(&t1).unwrap(), t1.scale(&scalar::int(2)));
        let c = supercommutator(
            &OperatorWord::atom(s, Atom::Dt(0)),
            &OperatorWord::atom(s, Atom::Mul(Monomial::t(1, 0))),
        )
        .unwrap();
        assert_eq!(c.act_poly(&t1).unwrap(), t1);
    }
}
