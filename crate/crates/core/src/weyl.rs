//! Normal ordering in the Weyl superalgebra `K(m|n)`: every element is
//! written uniquely as `Σ c · t^α ξ_I ∂t^γ ∂ξ_K`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::operator::{Atom, OperatorWord};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{accumulate, merge_sign, signed, Exponent, Monomial, OddSet, Shape};

/// Key of a normally ordered term `t^α ξ_I ∂t^γ ∂ξ_K`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct NormalKey {
    pub mult: Monomial,
    pub dt: Exponent,
    pub dxi: OddSet,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylNormal {
    shape: Shape,
    terms: BTreeMap<NormalKey, Scalar>,
}

impl WeylNormal {
    pub fn one(shape: Shape) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            NormalKey {
                mult: Monomial::one(shape.m),
                dt: Exponent::zeros(shape.m),
                dxi: OddSet::EMPTY,
            },
            scalar::one(),
        );
        WeylNormal { shape, terms }
    }

    pub fn zero(shape: Shape) -> Self {
        WeylNormal {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<NormalKey, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Back to a word: multiplication, then `∂t` powers, then `∂ξ` in
    /// ascending order.
    pub fn to_word(&self) -> OperatorWord {
        let mut w = OperatorWord::zero(self.shape);
        for (k, c) in &self.terms {
            let mut atoms = vec![Atom::Mul(k.mult.clone())];
            for i in 0..self.shape.m {
                atoms.extend(std::iter::repeat_n(Atom::Dt(i), k.dt.get(i) as usize));
            }
            atoms.extend(k.dxi.iter().map(Atom::Dxi));
            w.add_word(atoms, c.clone());
        }
        w
    }

    fn times_t(&self, i: usize) -> WeylNormal {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            let raised = NormalKey {
                mult: Monomial::new(k.mult.exp.with_added(i, 1), k.mult.odd),
                ..k.clone()
            };
            accumulate(&mut out.terms, raised, c.clone());
            if let Some(lower) = k.dt.with_lowered(i) {
                let g = scalar::int(k.dt.get(i) as i64);
                let key = NormalKey { dt: lower, ..k.clone() };
                accumulate(&mut out.terms, key, c * g);
            }
        }
        out
    }

    fn times_dt(&self, i: usize) -> WeylNormal {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            let key = NormalKey {
                dt: k.dt.with_added(i, 1),
                ..k.clone()
            };
            accumulate(&mut out.terms, key, c.clone());
        }
        out
    }

    fn times_dxi(&self, j: usize) -> WeylNormal {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            let (s, merged) = merge_sign(k.dxi, OddSet::singleton(j));
            if s == 0 {
                continue;
            }
            let key = NormalKey {
                dxi: merged,
                ..k.clone()
            };
            accumulate(&mut out.terms, key, signed(s, c.clone()));
        }
        out
    }

    fn times_xi(&self, j: usize) -> WeylNormal {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.terms {
            // ∂ξ_K ξ_j = (−1)^{|K|} ξ_j ∂ξ_K + (−1)^{|K|−p} ∂ξ_{K∖j} when j is
            // the p-th element of K.
            let (s, merged) = merge_sign(k.mult.odd, OddSet::singleton(j));
            if s != 0 {
                let key = NormalKey {
                    mult: Monomial::new(k.mult.exp.clone(), merged),
                    ..k.clone()
                };
                let v = signed(s, c.clone()) * scalar::sign(k.dxi.len() % 2 == 1);
                accumulate(&mut out.terms, key, v);
            }
            if k.dxi.contains(j) {
                let p = k.dxi.position(j) + 1;
                let key = NormalKey {
                    dxi: k.dxi.without(j),
                    ..k.clone()
                };
                accumulate(&mut out.terms, key, c * scalar::sign((k.dxi.len() - p) % 2 == 1));
            }
        }
        out
    }

    fn times_atom(&self, atom: &Atom) -> Result<WeylNormal> {
        Ok(match atom {
            Atom::Mul(m) => {
                let mut acc = self.clone();
                for i in 0..self.shape.m {
                    for _ in 0..m.exp.get(i) {
                        acc = acc.times_t(i);
                    }
                }
                for j in m.odd.iter() {
                    acc = acc.times_xi(j);
                }
                acc
            }
            Atom::Dt(i) => self.times_dt(*i),
            Atom::Dxi(j) => self.times_dxi(*j),
            Atom::Witt(_) => return Err(Error::NonWeylAtom(format!("{atom:?}"))),
        })
    }
}

/// Normal form of a combination of Weyl words.
pub fn weyl_normal_order(w: &OperatorWord) -> Result<WeylNormal> {
    let shape = w.shape();
    let mut out = WeylNormal::zero(shape);
    for (atoms, c) in w.terms() {
        let mut acc = WeylNormal::one(shape);
        for atom in atoms {
            acc = acc.times_atom(atom)?;
            if acc.is_zero() {
                break;
            }
        }
        for (k, v) in acc.terms {
            accumulate(&mut out.terms, k, v * c);
        }
    }
    Ok(out)
}

/// Every defining relation of `K(m|n)` as a pair of words whose difference
/// must vanish, labelled for reports. The Clifford relation is taken in the
/// super-symmetric form `∂ξ_k ξ_l + ξ_l ∂ξ_k = δ_{kl}`, and even generators
/// commute with odd ones.
pub fn weyl_relations(shape: Shape) -> Vec<(String, OperatorWord)> {
    let m = shape.m;
    let t = |i: usize| Atom::Mul(Monomial::t(m, i));
    let xi = |j: usize| Atom::Mul(Monomial::xi(m, j));
    let word = |a: Vec<Atom>| OperatorWord::word(shape, a);
    let one = OperatorWord::identity(shape);
    let comm = |a: Atom, b: Atom, anti: bool| {
        let ab = word(vec![a.clone(), b.clone()]);
        let ba = word(vec![b, a]);
        let sgn = if anti { scalar::one() } else { -scalar::one() };
        ab.checked_add(&ba.scale(&sgn)).expect("same shape")
    };
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            out.push((
                format!("[dt{},dt{}]", i + 1, j + 1),
                comm(Atom::Dt(i), Atom::Dt(j), false),
            ));
            out.push((format!("[t{},t{}]", i + 1, j + 1), comm(t(i), t(j), false)));
            let mut r = comm(Atom::Dt(i), t(j), false);
            if i == j {
                r = r.checked_sub(&one).unwrap();
            }
            out.push((format!("[dt{},t{}]-δ", i + 1, j + 1), r));
        }
        for k in 0..shape.n {
            out.push((format!("[t{},x{}]", i + 1, k + 1), comm(t(i), xi(k), false)));
            out.push((
                format!("[dt{},dx{}]", i + 1, k + 1),
                comm(Atom::Dt(i), Atom::Dxi(k), false),
            ));
            out.push((format!("[t{},dx{}]", i + 1, k + 1), comm(t(i), Atom::Dxi(k), false)));
            out.push((format!("[dt{},x{}]", i + 1, k + 1), comm(Atom::Dt(i), xi(k), false)));
        }
    }
    for k in 0..shape.n {
        for l in 0..shape.n {
            out.push((
                format!("[dx{},dx{}]", k + 1, l + 1),
                comm(Atom::Dxi(k), Atom::Dxi(l), true),
            ));
            out.push((format!("[x{},x{}]", k + 1, l + 1), comm(xi(k), xi(l), true)));
            let mut r = comm(Atom::Dxi(k), xi(l), true);
            if k == l {
                r = r.checked_sub(&one).unwrap();
            }
            out.push((format!("[dx{},x{}]-δ", k + 1, l + 1), r));
        }
    }
    out
}

/// The Clifford relation exactly as displayed, `∂ξ_k ξ_l + ξ_k ∂ξ_l − δ_{kl}`;
/// it is not a relation of the faithful action once `k ≠ l`.
pub fn verbatim_clifford(shape: Shape, k: usize, l: usize) -> OperatorWord {
    let m = shape.m;
    let a = OperatorWord::word(shape, vec![Atom::Dxi(k), Atom::Mul(Monomial::xi(m, l))]);
    let b = OperatorWord::word(shape, vec![Atom::Mul(Monomial::xi(m, k)), Atom::Dxi(l)]);
    let mut r = a.checked_add(&b).unwrap();
    if k == l {
        r = r.checked_sub(&OperatorWord::identity(shape)).unwrap();
    }
    r
}
