//! The Witt superalgebra `W(m|n)` of superderivations of `A(m|n)`, and the
//! semidirect product `A ⋊ W`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_shape, Error, Result};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{
    accumulate, koszul_negative, merge_sign, monomials_up_to, signed, Monomial, OddSet, Parity, Shape, SuperPoly,
};

/// Which coordinate derivation a basis vector field carries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum DerSlot {
    /// `∂/∂t_i`
    T(usize),
    /// `∂/∂ξ_j`
    Xi(usize),
}

impl DerSlot {
    pub fn parity(self) -> Parity {
        match self {
            DerSlot::T(_) => Parity::Even,
            DerSlot::Xi(_) => Parity::Odd,
        }
    }

    pub fn fits(self, shape: Shape) -> bool {
        match self {
            DerSlot::T(i) => i < shape.m,
            DerSlot::Xi(j) => j < shape.n,
        }
    }

    pub fn all(shape: Shape) -> Vec<DerSlot> {
        (0..shape.m)
            .map(DerSlot::T)
            .chain((0..shape.n).map(DerSlot::Xi))
            .collect()
    }

    /// Column of this slot in `gl(m|n)` (`i` for `∂t_i`, `m + j` for `∂ξ_j`).
    pub fn gl_index(self, shape: Shape) -> usize {
        match self {
            DerSlot::T(i) => i,
            DerSlot::Xi(j) => shape.m + j,
        }
    }

    /// Applies the coordinate derivation to a polynomial.
    pub fn apply(self, p: &SuperPoly) -> Result<SuperPoly> {
        match self {
            DerSlot::T(i) => p.partial_t(i),
            DerSlot::Xi(j) => p.partial_xi(j),
        }
    }
}

/// Basis vector field `t^α ξ_I ∂`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct WittBasis {
    pub mono: Monomial,
    pub slot: DerSlot,
}

impl WittBasis {
    pub fn new(mono: Monomial, slot: DerSlot) -> Self {
        WittBasis { mono, slot }
    }

    pub fn parity(&self) -> Parity {
        self.mono.parity() + self.slot.parity()
    }

    pub fn fits(&self, shape: Shape) -> bool {
        self.mono.fits(shape) && self.slot.fits(shape)
    }
}

/// Every basis vector field with t-degree `<= d`.
pub fn witt_basis_up_to(shape: Shape, d: usize) -> Vec<WittBasis> {
    let monos = monomials_up_to(shape, d);
    let mut out = Vec::with_capacity(monos.len() * shape.gl_size());
    for mono in monos {
        for slot in DerSlot::all(shape) {
            out.push(WittBasis::new(mono.clone(), slot));
        }
    }
    out
}

/// Basis of `𝔪^k △` restricted to `k <= |α| + |I| <= d`.
pub fn filtered_basis(shape: Shape, min: usize, max: usize) -> Vec<WittBasis> {
    witt_basis_up_to(shape, max)
        .into_iter()
        .filter(|b| (min..=max).contains(&b.mono.total_degree()))
        .collect()
}

/// Finitely supported element of `W(m|n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WittElement {
    shape: Shape,
    terms: BTreeMap<WittBasis, Scalar>,
}

impl WittElement {
    pub fn zero(shape: Shape) -> Self {
        WittElement {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(shape: Shape, b: WittBasis) -> Self {
        Self::term(shape, b, scalar::one())
    }

    pub fn term(shape: Shape, b: WittBasis, c: Scalar) -> Self {
        debug_assert!(b.fits(shape));
        let mut w = Self::zero(shape);
        accumulate(&mut w.terms, b, c);
        w
    }

    /// `p · ∂`, the polynomial coefficient times a coordinate derivation.
    pub fn from_poly(p: &SuperPoly, slot: DerSlot) -> Self {
        let mut w = Self::zero(p.shape());
        for (m, c) in p.terms() {
            w.add_term(WittBasis::new(m.clone(), slot), c.clone());
        }
        w
    }

    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = (WittBasis, Scalar)>) -> Self {
        let mut w = Self::zero(shape);
        for (b, c) in terms {
            w.add_term(b, c);
        }
        w
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<WittBasis, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: WittBasis, c: Scalar) {
        accumulate(&mut self.terms, b, c);
    }

    pub fn add_assign(&mut self, other: &WittElement) {
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c.clone());
        }
    }

    pub fn scale(&self, k: &Scalar) -> WittElement {
        let mut w = Self::zero(self.shape);
        for (b, c) in &self.terms {
            w.add_term(b.clone(), c * k);
        }
        w
    }

    pub fn checked_add(&self, other: &WittElement) -> Result<WittElement> {
        check_shape(self.shape, other.shape)?;
        let mut w = self.clone();
        w.add_assign(other);
        Ok(w)
    }

    pub fn checked_sub(&self, other: &WittElement) -> Result<WittElement> {
        self.checked_add(&other.scale(&-scalar::one()))
    }

    /// Parity if homogeneous (`None` for zero or mixed elements).
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(WittBasis::parity);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn split_parity(&self) -> [WittElement; 2] {
        let mut parts = [Self::zero(self.shape), Self::zero(self.shape)];
        for (b, c) in &self.terms {
            parts[b.parity().bit() as usize].add_term(b.clone(), c.clone());
        }
        parts
    }

    /// All coefficients lie in `𝔪^k`.
    pub fn in_filtration(&self, k: usize) -> bool {
        self.terms.keys().all(|b| b.mono.total_degree() >= k)
    }

    /// Collects `Σ f_∂ ∂` by slot, i.e. the coefficient polynomial of each derivation.
    pub fn coefficient_polys(&self) -> BTreeMap<DerSlot, SuperPoly> {
        let mut out: BTreeMap<DerSlot, SuperPoly> = BTreeMap::new();
        for (b, c) in &self.terms {
            out.entry(b.slot)
                .or_insert_with(|| SuperPoly::zero(self.shape))
                .add_term(b.mono.clone(), c.clone());
        }
        out
    }
}

/// The superderivation action `x(p)`.
pub fn witt_act(x: &WittElement, p: &SuperPoly) -> Result<SuperPoly> {
    check_shape(x.shape, p.shape())?;
    let mut out = SuperPoly::zero(p.shape());
    for (slot, coeff) in x.coefficient_polys() {
        let dp = slot.apply(p)?;
        if !dp.is_zero() {
            out = &out + &(&coeff * &dp);
        }
    }
    Ok(out)
}

/// How the structure-constant table treats the `δ`-terms that lack a
/// `t^{α+β}` factor when transcribed literally.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketMode {
    /// Every term carries its `t^{α+β}` factor.
    #[default]
    Corrected,
    /// The `δ_{j,I}` terms of the mixed and odd–odd formulas drop `t^{α+β}`.
    Verbatim,
    /// Flips the sign of the second term of formula `k % 3`; used to confirm
    /// that the checks detect a corrupted table.
    Mutated(u8),
}

fn poly_times_slot(
    shape: Shape,
    out: &mut WittElement,
    c: Scalar,
    exp: crate::superalgebra::Exponent,
    left: OddSet,
    right: OddSet,
    slot: DerSlot,
) {
    let (s, odd) = merge_sign(left, right);
    if s == 0 || c.is_zero() {
        return;
    }
    debug_assert!(slot.fits(shape));
    out.add_term(WittBasis::new(Monomial::new(exp, odd), slot), signed(s, c));
}

/// Bracket of two basis vector fields from the closed structure constants.
pub fn bracket_basis(shape: Shape, x: &WittBasis, y: &WittBasis, mode: BracketMode) -> WittElement {
    let (a, i_set) = (&x.mono.exp, x.mono.odd);
    let (b, j_set) = (&y.mono.exp, y.mono.odd);
    let mut out = WittElement::zero(shape);
    let flip = |formula: u8| -> Scalar {
        match mode {
            BracketMode::Mutated(k) if k % 3 == formula => -scalar::one(),
            _ => scalar::one(),
        }
    };
    let keep_t = !matches!(mode, BracketMode::Verbatim);
    let delta_exp = |sum: crate::superalgebra::Exponent| {
        if keep_t {
            sum
        } else {
            crate::superalgebra::Exponent::zeros(shape.m)
        }
    };
    match (x.slot, y.slot) {
        (DerSlot::T(i), DerSlot::T(j)) => {
            // β_i t^{α+β-e_i} ξ_I ξ_J ∂t_j − α_j t^{α+β-e_j} ξ_I ξ_J ∂t_i
            let sum = a.plus(b);
            if b.get(i) > 0 {
                let e = sum.with_lowered(i).unwrap();
                poly_times_slot(
                    shape,
                    &mut out,
                    scalar::int(b.get(i) as i64),
                    e,
                    i_set,
                    j_set,
                    DerSlot::T(j),
                );
            }
            if a.get(j) > 0 {
                let e = sum.with_lowered(j).unwrap();
                let c = -scalar::int(a.get(j) as i64) * flip(0);
                poly_times_slot(shape, &mut out, c, e, i_set, j_set, DerSlot::T(i));
            }
        }
        (DerSlot::T(i), DerSlot::Xi(j)) => {
            // β_i t^{α+β-e_i} ξ_I ξ_J ∂ξ_j
            //   − (−1)^{|I|(|J|−1)} (−1)^{I(j)} δ_{j∈I} t^{α+β} ξ_J ξ_{I∖j} ∂t_i
            let sum = a.plus(b);
            if b.get(i) > 0 {
                let e = sum.with_lowered(i).unwrap();
                poly_times_slot(
                    shape,
                    &mut out,
                    scalar::int(b.get(i) as i64),
                    e,
                    i_set,
                    j_set,
                    DerSlot::Xi(j),
                );
            }
            if i_set.contains(j) {
                let neg = (i_set.len() * (j_set.len() + 1) + i_set.position(j)) % 2 == 1;
                let c = -scalar::sign(neg) * flip(1);
                poly_times_slot(
                    shape,
                    &mut out,
                    c,
                    delta_exp(sum),
                    j_set,
                    i_set.without(j),
                    DerSlot::T(i),
                );
            }
        }
        (DerSlot::Xi(i), DerSlot::Xi(j)) => {
            // (−1)^{J(i)} δ_{i∈J} t^{α+β} ξ_I ξ_{J∖i} ∂ξ_j
            //   − (−1)^{I(j)} (−1)^{(|I|−1)(|J|−1)} δ_{j∈I} t^{α+β} ξ_J ξ_{I∖j} ∂ξ_i
            let sum = a.plus(b);
            if j_set.contains(i) {
                let c = scalar::sign(j_set.position(i) % 2 == 1);
                poly_times_slot(shape, &mut out, c, sum.clone(), i_set, j_set.without(i), DerSlot::Xi(j));
            }
            if i_set.contains(j) {
                let neg = (i_set.position(j) + (i_set.len() + 1) * (j_set.len() + 1)) % 2 == 1;
                let c = -scalar::sign(neg) * flip(2);
                poly_times_slot(
                    shape,
                    &mut out,
                    c,
                    delta_exp(sum),
                    j_set,
                    i_set.without(j),
                    DerSlot::Xi(i),
                );
            }
        }
        (DerSlot::Xi(_), DerSlot::T(_)) => {
            // Super-antisymmetry: [x, y] = −(−1)^{|x||y|} [y, x].
            let swapped = bracket_basis(shape, y, x, mode);
            let neg = !koszul_negative(x.parity(), y.parity());
            return swapped.scale(&scalar::sign(neg));
        }
    }
    out
}

/// Lie superbracket on `W(m|n)` (bilinear extension of the structure constants).
pub fn witt_bracket(x: &WittElement, y: &WittElement) -> Result<WittElement> {
    witt_bracket_with(x, y, BracketMode::Corrected)
}

pub fn witt_bracket_with(x: &WittElement, y: &WittElement, mode: BracketMode) -> Result<WittElement> {
    check_shape(x.shape, y.shape)?;
    let mut out = WittElement::zero(x.shape);
    for (bx, cx) in &x.terms {
        for (by, cy) in &y.terms {
            let k = cx * cy;
            for (b, c) in bracket_basis(x.shape, bx, by, mode).terms {
                out.add_term(b, c * &k);
            }
        }
    }
    Ok(out)
}

/// Independent route to the bracket: form the supercommutator of the two
/// operators on `A(m|n)` and read the resulting derivation off its values
/// on the generators `t_i`, `ξ_j`.
pub fn bracket_oracle(x: &WittElement, y: &WittElement) -> Result<WittElement> {
    check_shape(x.shape, y.shape)?;
    let shape = x.shape;
    let mut out = WittElement::zero(shape);
    for xp in x.split_parity() {
        for yp in y.split_parity() {
            let (Some(px), Some(py)) = (xp.parity(), yp.parity()) else {
                continue;
            };
            let sign = scalar::sign(koszul_negative(px, py));
            let generators = (0..shape.m)
                .map(|i| (SuperPoly::t(shape, i), DerSlot::T(i)))
                .chain((0..shape.n).map(|j| (SuperPoly::xi(shape, j), DerSlot::Xi(j))));
            for (g, slot) in generators {
                let xy = witt_act(&xp, &witt_act(&yp, &g)?)?;
                let yx = witt_act(&yp, &witt_act(&xp, &g)?)?;
                let value = &xy - &yx.scale(&sign);
                out.add_assign(&WittElement::from_poly(&value, slot));
            }
        }
    }
    Ok(out)
}

/// Element `a + x` of `A ⋊ W`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TildeElement {
    pub fun: SuperPoly,
    pub der: WittElement,
}

impl TildeElement {
    pub fn new(fun: SuperPoly, der: WittElement) -> Result<Self> {
        check_shape(fun.shape(), der.shape())?;
        Ok(TildeElement { fun, der })
    }

    pub fn from_der(der: WittElement) -> Self {
        TildeElement {
            fun: SuperPoly::zero(der.shape()),
            der,
        }
    }

    pub fn from_fun(fun: SuperPoly) -> Self {
        TildeElement {
            der: WittElement::zero(fun.shape()),
            fun,
        }
    }

    pub fn shape(&self) -> Shape {
        self.fun.shape()
    }

    pub fn is_zero(&self) -> bool {
        self.fun.is_zero() && self.der.is_zero()
    }

    pub fn add(&self, other: &TildeElement) -> Result<TildeElement> {
        Ok(TildeElement {
            fun: self.fun.checked_add(&other.fun)?,
            der: self.der.checked_add(&other.der)?,
        })
    }

    pub fn scale(&self, k: &Scalar) -> TildeElement {
        TildeElement {
            fun: self.fun.scale(k),
            der: self.der.scale(k),
        }
    }
}

/// `[x + a, y + b] = [x, y] + x(b) − (−1)^{|y||a|} y(a)`; `A` is abelian.
pub fn tilde_bracket(u: &TildeElement, v: &TildeElement) -> Result<TildeElement> {
    check_shape(u.shape(), v.shape())?;
    let der = witt_bracket(&u.der, &v.der)?;
    let mut fun = witt_act(&u.der, &v.fun)?;
    let (a_even, a_odd) = u.fun.split_parity();
    for y in v.der.split_parity() {
        let Some(py) = y.parity() else { continue };
        for (a, pa) in [(&a_even, Parity::Even), (&a_odd, Parity::Odd)] {
            if a.is_zero() {
                continue;
            }
            let ya = witt_act(&y, a)?;
            fun = &fun - &ya.scale(&scalar::sign(koszul_negative(py, pa)));
        }
    }
    Ok(TildeElement { fun, der })
}

/// Rejects elements that are not of the given shape.
pub(crate) fn ensure_slot(shape: Shape, slot: DerSlot) -> Result<()> {
    if slot.fits(shape) {
        Ok(())
    } else {
        let (index, bound, what) = match slot {
            DerSlot::T(i) => (i, shape.m, "even derivation"),
            DerSlot::Xi(j) => (j, shape.n, "odd derivation"),
        };
        Err(Error::IndexOutOfRange { what, index, bound })
    }
}
