//! The Lie superalgebra `AW` of `A`-dressed vector fields `a.x`, and the
//! elements `X_{α,I,∂}` spanning its subalgebra `T`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_shape, Error, Result};
use crate::operator::{Atom, OperatorWord};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{
    accumulate, koszul_negative, merge_sign, signed, Exponent, Monomial, OddSet, Parity, Shape, SuperPoly,
};
use crate::witt::{ensure_slot, witt_act, witt_bracket, DerSlot, WittBasis, WittElement};

/// Finite combination of dressed terms `a.x` (`a` an `A`-monomial, `x` a
/// basis vector field).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AWElement {
    shape: Shape,
    terms: BTreeMap<(Monomial, WittBasis), Scalar>,
}

impl AWElement {
    pub fn zero(shape: Shape) -> Self {
        AWElement {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(shape: Shape, a: Monomial, x: WittBasis, c: Scalar) -> Self {
        let mut e = Self::zero(shape);
        e.add_term(a, x, c);
        e
    }

    /// `1.x` for every term of `x`.
    pub fn from_witt(x: &WittElement) -> Self {
        let mut e = Self::zero(x.shape());
        for (b, c) in x.terms() {
            e.add_term(Monomial::one(x.shape().m), b.clone(), c.clone());
        }
        e
    }

    /// `a.x` with `a` a polynomial, expanded termwise.
    pub fn dress(a: &SuperPoly, x: &WittElement) -> Result<Self> {
        check_shape(a.shape(), x.shape())?;
        let mut e = Self::zero(a.shape());
        for (m, ca) in a.terms() {
            for (b, cx) in x.terms() {
                e.add_term(m.clone(), b.clone(), ca * cx);
            }
        }
        Ok(e)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, WittBasis), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: Monomial, x: WittBasis, c: Scalar) {
        accumulate(&mut self.terms, (a, x), c);
    }

    pub fn add_assign(&mut self, other: &AWElement) {
        for ((a, x), c) in &other.terms {
            self.add_term(a.clone(), x.clone(), c.clone());
        }
    }

    pub fn scale(&self, k: &Scalar) -> AWElement {
        let mut e = Self::zero(self.shape);
        for ((a, x), c) in &self.terms {
            e.add_term(a.clone(), x.clone(), c * k);
        }
        e
    }

    pub fn checked_add(&self, other: &AWElement) -> Result<AWElement> {
        check_shape(self.shape, other.shape)?;
        let mut e = self.clone();
        e.add_assign(other);
        Ok(e)
    }

    pub fn checked_sub(&self, other: &AWElement) -> Result<AWElement> {
        self.checked_add(&other.scale(&-scalar::one()))
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|(a, x)| a.parity() + x.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// The operator `a ∘ x` for each term.
    pub fn to_word(&self) -> OperatorWord {
        let mut w = OperatorWord::zero(self.shape);
        for ((a, x), c) in &self.terms {
            w.add_word(vec![Atom::Mul(a.clone()), Atom::Witt(x.clone())], c.clone());
        }
        w
    }
}

fn dressed(shape: Shape, out: &mut AWElement, a: &SuperPoly, x: &WittElement, k: &Scalar) {
    debug_assert_eq!(a.shape(), shape);
    for (m, ca) in a.terms() {
        for (b, cx) in x.terms() {
            out.add_term(m.clone(), b.clone(), ca * cx * k);
        }
    }
}

/// `[a.x, b.y] = a·x(b).y − (−1)^{|a.x||b.y|} b·y(a).x + (−1)^{|x||b|} ab.[x, y]`.
pub fn aw_bracket(u: &AWElement, v: &AWElement) -> Result<AWElement> {
    check_shape(u.shape, v.shape)?;
    let shape = u.shape;
    let mut out = AWElement::zero(shape);
    for ((a, x), cu) in &u.terms {
        let ap = SuperPoly::monomial(shape, a.clone());
        let xe = WittElement::basis(shape, x.clone());
        let pu = a.parity() + x.parity();
        for ((b, y), cv) in &v.terms {
            let bp = SuperPoly::monomial(shape, b.clone());
            let ye = WittElement::basis(shape, y.clone());
            let pv = b.parity() + y.parity();
            let k = cu * cv;
            let xb = witt_act(&xe, &bp)?;
            dressed(shape, &mut out, &(&ap * &xb), &ye, &k);
            let ya = witt_act(&ye, &ap)?;
            let k2 = -&k * scalar::sign(koszul_negative(pu, pv));
            dressed(shape, &mut out, &(&bp * &ya), &xe, &k2);
            let k3 = &k * scalar::sign(koszul_negative(x.parity(), b.parity()));
            dressed(shape, &mut out, &(&ap * &bp), &witt_bracket(&xe, &ye)?, &k3);
        }
    }
    Ok(out)
}

/// Sign convention for `τ(J, I∖J)` inside `X_{α,I,∂}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauConvention {
    /// Inversions of the concatenation `J, I∖J`.
    #[default]
    Inversions,
    /// Inversions of `I∖J, J`; kept to show that the choice matters.
    Flipped,
}

/// `X_{α,I,∂} = Σ_{β≤α, J⊆I} (−1)^{|β|+|J|+τ(J,I∖J)} C(α,β) (t^β ξ_J).(t^{α−β} ξ_{I∖J} ∂)`.
pub fn x_element(shape: Shape, alpha: &Exponent, odd: OddSet, slot: DerSlot) -> Result<AWElement> {
    x_element_with(shape, alpha, odd, slot, TauConvention::Inversions)
}

pub fn x_element_with(
    shape: Shape,
    alpha: &Exponent,
    odd: OddSet,
    slot: DerSlot,
    tau: TauConvention,
) -> Result<AWElement> {
    ensure_slot(shape, slot)?;
    if alpha.len() != shape.m || !Monomial::new(alpha.clone(), odd).fits(shape) {
        return Err(Error::InvalidArgument(format!("monomial does not fit shape {shape}")));
    }
    if alpha.degree() as usize + odd.len() == 0 {
        return Err(Error::InvalidArgument("X element needs |α| + |I| > 0".into()));
    }
    let mut out = AWElement::zero(shape);
    for beta in alpha.sub_exponents() {
        let rest = alpha.minus(&beta).expect("beta <= alpha");
        let binom = alpha.binomial(&beta);
        for j_set in odd.subsets() {
            let k_set = odd.minus(j_set);
            let (s, _) = match tau {
                TauConvention::Inversions => merge_sign(j_set, k_set),
                TauConvention::Flipped => merge_sign(k_set, j_set),
            };
            let neg = (beta.degree() as usize + j_set.len()) % 2 == 1;
            let c = signed(s, scalar::sign(neg) * &binom);
            out.add_term(
                Monomial::new(beta.clone(), j_set),
                WittBasis::new(Monomial::new(rest.clone(), k_set), slot),
                c,
            );
        }
    }
    Ok(out)
}

/// The linear map `𝔪△ → T`, `t^α ξ_I ∂ ↦ X_{α,I,∂}`.
pub fn pi2(x: &WittElement) -> Result<AWElement> {
    pi2_with(x, TauConvention::Inversions)
}

pub fn pi2_with(x: &WittElement, tau: TauConvention) -> Result<AWElement> {
    let mut out = AWElement::zero(x.shape());
    for (b, c) in x.terms() {
        let xe = x_element_with(x.shape(), &b.mono.exp, b.mono.odd, b.slot, tau)?;
        out.add_assign(&xe.scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(shape: Shape, exp: &[u32], odd: &[usize], slot: DerSlot) -> WittBasis {
        let b = WittBasis::new(
            Monomial::new(Exponent::from_slice(exp), OddSet::from_ascending(odd).unwrap()),
            slot,
        );
        assert!(b.fits(shape));
        b
    }

    #[test]
    fn bracket_examples() {
        let s = Shape::new(2, 0);
        let one = Monomial::one(2);
        let dt1 = AWElement::term(s, one.clone(), basis(s, &[0, 0], &[], DerSlot::T(0)), scalar::one());
        let t1_dt1 = AWElement::term(
            s,
            Monomial::t(2, 0),
            basis(s, &[0, 0], &[], DerSlot::T(0)),
            scalar::one(),
        );
        assert_eq!(aw_bracket(&dt1, &t1_dt1).unwrap(), dt1);
        let t2_dt2 = AWElement::term(
            s,
            Monomial::t(2, 1),
            basis(s, &[0, 0], &[], DerSlot::T(1)),
            scalar::one(),
        );
        assert!(aw_bracket(&t1_dt1, &t2_dt2).unwrap().is_zero());
        let x = WittElement::basis(s, basis(s, &[1, 0], &[], DerSlot::T(0)));
        let y = WittElement::basis(s, basis(s, &[0, 2], &[], DerSlot::T(0)));
        assert_eq!(
            aw_bracket(&AWElement::from_witt(&x), &AWElement::from_witt(&y)).unwrap(),
            AWElement::from_witt(&witt_bracket(&x, &y).unwrap())
        );
    }

    #[test]
    fn x_element_examples() {
        let s = Shape::new(1, 1);
        let x = x_element(s, &Exponent::from_slice(&[1]), OddSet::EMPTY, DerSlot::T(0)).unwrap();
        let mut expected = AWElement::zero(s);
        expected.add_term(Monomial::one(1), basis(s, &[1], &[], DerSlot::T(0)), scalar::one());
        expected.add_term(Monomial::t(1, 0), basis(s, &[0], &[], DerSlot::T(0)), -scalar::one());
        assert_eq!(x, expected);

        let x = x_element(s, &Exponent::from_slice(&[0]), OddSet::singleton(0), DerSlot::Xi(0)).unwrap();
        let mut expected = AWElement::zero(s);
        expected.add_term(Monomial::one(1), basis(s, &[0], &[0], DerSlot::Xi(0)), scalar::one());
        expected.add_term(Monomial::xi(1, 0), basis(s, &[0], &[], DerSlot::Xi(0)), -scalar::one());
        assert_eq!(x, expected);

        assert!(x_element(s, &Exponent::zeros(1), OddSet::EMPTY, DerSlot::T(0)).is_err());
    }

    #[test]
    fn tau_only_matters_with_two_odd_indices() {
        let s = Shape::new(0, 2);
        let i = OddSet::from_ascending(&[0, 1]).unwrap();
        let a = x_element_with(s, &Exponent::zeros(0), i, DerSlot::Xi(0), TauConvention::Inversions).unwrap();
        let b = x_element_with(s, &Exponent::zeros(0), i, DerSlot::Xi(0), TauConvention::Flipped).unwrap();
        assert_ne!(a, b);
        let s1 = Shape::new(1, 1);
        let a = x_element_with(
            s1,
            &Exponent::from_slice(&[1]),
            OddSet::singleton(0),
            DerSlot::T(0),
            TauConvention::Inversions,
        )
        .unwrap();
        let b = x_element_with(
            s1,
            &Exponent::from_slice(&[1]),
            OddSet::singleton(0),
            DerSlot::T(0),
            TauConvention::Flipped,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn aw_jacobi_small() {
        let s = Shape::new(1, 1);
        let mut elems = Vec::new();
        for a in crate::superalgebra::monomials_up_to(s, 1) {
            for x in crate::witt::witt_basis_up_to(s, 1) {
                elems.push(AWElement::term(s, a.clone(), x, scalar::one()));
            }
        }
        for a in &elems {
            for b in &elems {
                let ab = aw_bracket(a, b).unwrap();
                let ba = aw_bracket(b, a).unwrap();
                let neg = !koszul_negative(a.parity().unwrap(), b.parity().unwrap());
                assert_eq!(ab, ba.scale(&scalar::sign(neg)));
            }
        }
        for a in elems.iter().step_by(3) {
            for b in elems.iter().step_by(2) {
                for c in &elems {
                    let pa = a.parity().unwrap();
                    let pb = b.parity().unwrap();
                    let lhs = aw_bracket(a, &aw_bracket(b, c).unwrap()).unwrap();
                    let r1 = aw_bracket(&aw_bracket(a, b).unwrap(), c).unwrap();
                    let r2 = aw_bracket(b, &aw_bracket(a, c).unwrap())
                        .unwrap()
                        .scale(&scalar::sign(koszul_negative(pa, pb)));
                    assert!(lhs.checked_sub(&r1).unwrap().checked_sub(&r2).unwrap().is_zero());
                }
            }
        }
    }
}
