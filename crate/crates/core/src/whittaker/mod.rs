//! Tensor modules `T(A^a, V) = A^a ⊗ V`: the twisted Weyl action on `A^a`,
//! the `AW`-action on the tensor product, and exact solvers for Whittaker
//! vectors inside truncation windows.

mod pbw;

pub use pbw::{cartan, weight_space_dim, weighting_act, weighting_reduce, PbwBasis, WeightCoset};

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_shape, Error, Result};
use crate::glmn::{elementary_parity, Rep};
use crate::linalg::Echelon;
use crate::operator::{Atom, OperatorWord};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{
    accumulate, koszul_negative, monomials_up_to, signed, Monomial, OddSet, Parity, Shape, SuperPoly,
};
use crate::witt::{DerSlot, WittBasis};

/// Which sign rule the extra `gl(m|n)` terms of the tensor action use.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionRule {
    /// The matrix factor passes `p` with sign `(−1)^{|E||p|}`.
    #[default]
    Koszul,
    /// No sign when the matrix factor passes `p`.
    Unsigned,
    /// Koszul rule with the sign of the odd sum flipped.
    MutatedOddSum,
}

/// Parameters of `T(A^a, V)`.
#[derive(Clone, Debug)]
pub struct ModuleSpec {
    shape: Shape,
    a: Vec<Scalar>,
    rep: Rep,
    rule: ActionRule,
    /// Sparse columns of every `ρ(E_{i,j})`: `columns[e][c] = [(row, value)]`.
    columns: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl ModuleSpec {
    pub fn new(a: Vec<Scalar>, rep: Rep) -> Result<Self> {
        Self::with_rule(a, rep, ActionRule::Koszul)
    }

    pub fn with_rule(a: Vec<Scalar>, rep: Rep, rule: ActionRule) -> Result<Self> {
        let shape = rep.shape();
        if a.len() != shape.m {
            return Err(Error::InvalidArgument(format!(
                "Whittaker type has {} entries, expected m = {}",
                a.len(),
                shape.m
            )));
        }
        let k = shape.gl_size();
        let mut columns = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mat = rep.matrix(i, j);
                let cols = (0..rep.dim())
                    .map(|c| {
                        (0..rep.dim())
                            .filter(|&r| !mat.get(r, c).is_zero())
                            .map(|r| (r, mat.get(r, c).clone()))
                            .collect()
                    })
                    .collect();
                columns.push(cols);
            }
        }
        Ok(ModuleSpec {
            shape,
            a,
            rep,
            rule,
            columns,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn a(&self) -> &[Scalar] {
        &self.a
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn rule(&self) -> ActionRule {
        self.rule
    }

    pub fn dim_v(&self) -> usize {
        self.rep.dim()
    }

    /// Every `a_i ≠ 0`.
    pub fn non_singular(&self) -> bool {
        self.a.iter().all(|x| !x.is_zero())
    }

    /// Same module with another type `a`.
    pub fn with_a(&self, a: Vec<Scalar>) -> Result<Self> {
        Self::with_rule(a, self.rep.clone(), self.rule)
    }

    fn column(&self, row: usize, col: usize, c: usize) -> &[(usize, Scalar)] {
        &self.columns[row * self.shape.gl_size() + col][c]
    }
}

/// Finitely supported element `Σ c · (t^α ξ_I) ⊗ e_k` of `T(A^a, V)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TensorElement {
    shape: Shape,
    dim: usize,
    terms: BTreeMap<(Monomial, usize), Scalar>,
}

impl TensorElement {
    pub fn zero(shape: Shape, dim: usize) -> Self {
        TensorElement {
            shape,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(shape: Shape, dim: usize, mono: Monomial, k: usize) -> Self {
        Self::term(shape, dim, mono, k, scalar::one())
    }

    pub fn term(shape: Shape, dim: usize, mono: Monomial, k: usize, c: Scalar) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut x = Self::zero(shape, dim);
        x.add_term(mono, k, c);
        x
    }

    /// `p ⊗ e_k`.
    pub fn pure(p: &SuperPoly, dim: usize, k: usize) -> Self {
        let mut x = Self::zero(p.shape(), dim);
        for (m, c) in p.terms() {
            x.add_term(m.clone(), k, c.clone());
        }
        x
    }

    /// Validated construction from terms.
    pub fn from_terms(
        shape: Shape,
        dim: usize,
        terms: impl IntoIterator<Item = ((Monomial, usize), Scalar)>,
    ) -> Result<Self> {
        let mut x = Self::zero(shape, dim);
        for ((m, k), c) in terms {
            if k >= dim {
                return Err(Error::IndexOutOfRange {
                    what: "module basis vector",
                    index: k,
                    bound: dim,
                });
            }
            if !m.fits(shape) {
                return Err(Error::InvalidArgument(format!("monomial does not fit shape {shape}")));
            }
            x.add_term(m, k, c);
        }
        Ok(x)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, usize), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, k: usize, c: Scalar) {
        accumulate(&mut self.terms, (mono, k), c);
    }

    pub fn add_assign(&mut self, other: &TensorElement) {
        for ((m, k), c) in &other.terms {
            self.add_term(m.clone(), *k, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &TensorElement, k: &Scalar) {
        for ((m, i), c) in &other.terms {
            self.add_term(m.clone(), *i, c * k);
        }
    }

    pub fn scale(&self, k: &Scalar) -> TensorElement {
        let mut x = Self::zero(self.shape, self.dim);
        x.add_scaled(self, k);
        x
    }

    pub fn checked_add(&self, other: &TensorElement) -> Result<TensorElement> {
        check_shape(self.shape, other.shape)?;
        if self.dim != other.dim {
            return Err(Error::InvalidArgument(format!(
                "module dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        let mut x = self.clone();
        x.add_assign(other);
        Ok(x)
    }

    pub fn checked_sub(&self, other: &TensorElement) -> Result<TensorElement> {
        self.checked_add(&other.scale(&-scalar::one()))
    }

    pub fn max_t_degree(&self) -> usize {
        self.terms.keys().map(|(m, _)| m.t_degree()).max().unwrap_or(0)
    }

    /// Parity if homogeneous, given the parities of the basis of `V`.
    pub fn parity(&self, parities: &[Parity]) -> Option<Parity> {
        let mut it = self.terms.keys().map(|(m, k)| m.parity() + parities[*k]);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }
}

fn check_element(spec: &ModuleSpec, x: &TensorElement) -> Result<()> {
    check_shape(spec.shape, x.shape)?;
    if x.dim != spec.dim_v() {
        return Err(Error::InvalidArgument(format!(
            "element lives in dimension {}, module has {}",
            x.dim,
            spec.dim_v()
        )));
    }
    Ok(())
}

/// `σ_a`: `∂t_i ↦ ∂t_i + a_i`, every other Weyl generator fixed.
pub fn sigma_a(spec: &ModuleSpec, atom: &Atom) -> Result<OperatorWord> {
    let shape = spec.shape;
    let mut w = OperatorWord::atom(shape, atom.clone());
    match atom {
        Atom::Dt(i) => w.add_word(Vec::new(), spec.a[*i].clone()),
        Atom::Witt(_) => return Err(Error::NonWeylAtom(format!("{atom:?}"))),
        _ => {}
    }
    Ok(w)
}

fn twisted_atom(spec: &ModuleSpec, atom: &Atom, p: &SuperPoly) -> Result<SuperPoly> {
    match atom {
        Atom::Mul(m) => SuperPoly::monomial(spec.shape, m.clone()).checked_mul(p),
        Atom::Dt(i) => Ok(&p.partial_t(*i)? + &p.scale(&spec.a[*i])),
        Atom::Dxi(j) => p.partial_xi(*j),
        Atom::Witt(_) => Err(Error::NonWeylAtom(format!("{atom:?}"))),
    }
}

/// Action of a Weyl word on `A^a`, i.e. on `A` after twisting by `σ_a`.
pub fn twisted_act(spec: &ModuleSpec, w: &OperatorWord, p: &SuperPoly) -> Result<SuperPoly> {
    check_shape(spec.shape, w.shape())?;
    check_shape(spec.shape, p.shape())?;
    let mut out = SuperPoly::zero(spec.shape);
    for (atoms, c) in w.terms() {
        let mut v = p.clone();
        for atom in atoms.iter().rev() {
            v = twisted_atom(spec, atom, &v)?;
            if v.is_zero() {
                break;
            }
        }
        out = &out + &v.scale(c);
    }
    Ok(out)
}

/// One generator acting on `T(A^a, V)`: multiplications and Weyl
/// derivations act on the `A^a` factor, Witt terms by the tensor action
///
/// `t^α ξ_I ∂ · (p ⊗ v) = (t^α ξ_I σ_a(∂) p) ⊗ v
///     + Σ_k α_k (t^{α−e_k} ξ_I p) ⊗ E_{k,∂} v
///     + (−1)^{|I|−1} Σ_k (∂ξ_k(t^α ξ_I) p) ⊗ E_{m+k,∂} v`.
pub fn act_generator(spec: &ModuleSpec, atom: &Atom, x: &TensorElement) -> Result<TensorElement> {
    check_element(spec, x)?;
    let Atom::Witt(b) = atom else {
        let mut out = TensorElement::zero(spec.shape, x.dim);
        for ((m, k), c) in &x.terms {
            let q = twisted_atom(spec, atom, &SuperPoly::monomial(spec.shape, m.clone()))?;
            for (mm, cc) in q.terms() {
                out.add_term(mm.clone(), *k, cc * c);
            }
        }
        return Ok(out);
    };
    if !b.fits(spec.shape) {
        return Err(Error::InvalidArgument(format!(
            "vector field does not fit shape {}",
            spec.shape
        )));
    }
    Ok(act_witt(spec, b, x))
}

fn act_witt(spec: &ModuleSpec, b: &WittBasis, x: &TensorElement) -> TensorElement {
    let shape = spec.shape;
    let m = shape.m;
    let col = b.slot.gl_index(shape);
    let coeff_poly = SuperPoly::monomial(shape, b.mono.clone());
    let alpha = &b.mono.exp;
    let odd = b.mono.odd;
    // Coefficients of the matrix terms: (row of E, monomial, sign).
    let mut extra: Vec<(usize, Monomial, Scalar)> = Vec::new();
    for k in 0..m {
        if let Some(lower) = alpha.with_lowered(k) {
            extra.push((k, Monomial::new(lower, odd), scalar::int(alpha.get(k) as i64)));
        }
    }
    let odd_sign = {
        let neg = odd.len().is_multiple_of(2);
        let flip = spec.rule == ActionRule::MutatedOddSum;
        scalar::sign(neg != flip)
    };
    for k in 0..shape.n {
        if odd.contains(k) {
            let s = scalar::sign(odd.position(k) % 2 == 1);
            extra.push((m + k, Monomial::new(alpha.clone(), odd.without(k)), s * &odd_sign));
        }
    }
    let mut out = TensorElement::zero(shape, x.dim);
    for ((p, c), coeff) in &x.terms {
        let pp = SuperPoly::monomial(shape, p.clone());
        let dp = match b.slot {
            DerSlot::T(i) => &pp.partial_t(i).expect("slot fits") + &pp.scale(&spec.a[i]),
            DerSlot::Xi(j) => pp.partial_xi(j).expect("slot fits"),
        };
        if !dp.is_zero() {
            for (mm, cc) in (&coeff_poly * &dp).terms() {
                out.add_term(mm.clone(), *c, cc * coeff);
            }
        }
        for (row, mono, s) in &extra {
            let (sg, prod) = mono.mul(p);
            if sg == 0 {
                continue;
            }
            let parity_e = elementary_parity(shape, *row, col);
            let koszul = spec.rule != ActionRule::Unsigned && koszul_negative(parity_e, p.parity());
            let base = signed(sg, s * coeff) * scalar::sign(koszul);
            for (r, v) in spec.column(*row, col, *c) {
                out.add_term(prod.clone(), *r, &base * v);
            }
        }
    }
    out
}

/// Applies a word right to left.
pub fn act_word(spec: &ModuleSpec, w: &OperatorWord, x: &TensorElement) -> Result<TensorElement> {
    check_shape(spec.shape, w.shape())?;
    check_element(spec, x)?;
    let mut out = TensorElement::zero(spec.shape, x.dim);
    for (atoms, c) in w.terms() {
        let mut v = x.clone();
        for atom in atoms.iter().rev() {
            if v.is_zero() {
                break;
            }
            v = act_generator(spec, atom, &v)?;
        }
        out.add_scaled(&v, c);
    }
    Ok(out)
}

/// The finite-dimensional subspace of `T(A^a, V)` of t-degree `<= d`, with
/// basis `(t^α ξ_I) ⊗ e_k` ordered by monomial then `k`.
#[derive(Clone, Debug)]
pub struct Window {
    shape: Shape,
    dim: usize,
    degree: usize,
    keys: Vec<(Monomial, usize)>,
    index: HashMap<(Monomial, usize), usize>,
}

impl Window {
    pub fn new(shape: Shape, dim: usize, degree: usize) -> Self {
        let keys: Vec<(Monomial, usize)> = monomials_up_to(shape, degree)
            .into_iter()
            .flat_map(|m| (0..dim).map(move |k| (m.clone(), k)))
            .collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Window {
            shape,
            dim,
            degree,
            keys,
            index,
        }
    }

    pub fn for_spec(spec: &ModuleSpec, degree: usize) -> Self {
        Self::new(spec.shape, spec.dim_v(), degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn basis_element(&self, i: usize) -> TensorElement {
        let (m, k) = &self.keys[i];
        TensorElement::basis(self.shape, self.dim, m.clone(), *k)
    }

    pub fn spanning_set(&self) -> Vec<TensorElement> {
        (0..self.len()).map(|i| self.basis_element(i)).collect()
    }

    pub fn key(&self, i: usize) -> &(Monomial, usize) {
        &self.keys[i]
    }

    pub fn position(&self, mono: &Monomial, k: usize) -> Option<usize> {
        self.index.get(&(mono.clone(), k)).copied()
    }

    /// Sparse coordinates; fails if `x` has terms outside the window.
    pub fn coordinates(&self, x: &TensorElement) -> Result<Vec<(usize, Scalar)>> {
        let mut out = Vec::with_capacity(x.terms.len());
        for ((m, k), c) in &x.terms {
            match self.index.get(&(m.clone(), *k)) {
                Some(&i) => out.push((i, c.clone())),
                None => {
                    return Err(Error::WindowExceeded {
                        degree: m.t_degree(),
                        bound: self.degree,
                    })
                }
            }
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    pub fn dense(&self, x: &TensorElement) -> Result<Vec<Scalar>> {
        let mut v = vec![scalar::zero(); self.len()];
        for (i, c) in self.coordinates(x)? {
            v[i] = c;
        }
        Ok(v)
    }

    pub fn element(&self, coords: &[Scalar]) -> TensorElement {
        let mut x = TensorElement::zero(self.shape, self.dim);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let (m, k) = &self.keys[i];
                x.add_term(m.clone(), *k, c.clone());
            }
        }
        x
    }
}

/// Largest t-degree an annihilator word may add before the solver refuses it.
pub const ANN_DEGREE_GAIN_LIMIT: usize = 8;

/// Joint kernel `{x ∈ window : f.x = 0 ∀ f ∈ ops}`, as an exact basis.
pub fn ann_space(spec: &ModuleSpec, ops: &[OperatorWord], degree: usize) -> Result<Vec<TensorElement>> {
    let window = Window::for_spec(spec, degree);
    for op in ops {
        check_shape(spec.shape, op.shape())?;
        let gain = op.max_degree_gain();
        if gain > ANN_DEGREE_GAIN_LIMIT {
            return Err(Error::WindowExceeded {
                degree: degree + gain,
                bound: degree + ANN_DEGREE_GAIN_LIMIT,
            });
        }
    }
    let images: Vec<Vec<TensorElement>> = crate::par_map((0..window.len()).collect(), |col| {
        let b = window.basis_element(col);
        ops.iter().map(|op| act_word(spec, op, &b)).collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut rows: BTreeMap<(usize, Monomial, usize), Vec<(usize, Scalar)>> = BTreeMap::new();
    for (col, imgs) in images.into_iter().enumerate() {
        for (o, img) in imgs.into_iter().enumerate() {
            for ((m, k), c) in img.terms {
                rows.entry((o, m, k)).or_default().push((col, c));
            }
        }
    }
    let mut ech = Echelon::new(window.len());
    for row in rows.values() {
        ech.insert(row);
    }
    Ok(ech.kernel().iter().map(|v| window.element(v)).collect())
}

/// `∂t_i − a_i` as a word.
pub fn shifted_dt(spec: &ModuleSpec, i: usize) -> OperatorWord {
    let mut w = OperatorWord::atom(spec.shape, Atom::Dt(i));
    w.add_word(Vec::new(), -spec.a[i].clone());
    w
}

/// `Wh_a` inside the window: common kernel of `∂t_i − a_i` and `∂ξ_j`.
pub fn whittaker_space(spec: &ModuleSpec, degree: usize) -> Result<Vec<TensorElement>> {
    let mut ops: Vec<OperatorWord> = (0..spec.shape.m).map(|i| shifted_dt(spec, i)).collect();
    ops.extend((0..spec.shape.n).map(|j| OperatorWord::atom(spec.shape, Atom::Dxi(j))));
    ann_space(spec, &ops, degree)
}

/// Generalized Whittaker vectors of height `<= height_bound` in every even
/// direction: `(∂t_i − a_i)^{h+1} x = 0`.
pub fn generalized_whittaker_space(
    spec: &ModuleSpec,
    degree: usize,
    height_bound: usize,
) -> Result<Vec<TensorElement>> {
    let ops: Vec<OperatorWord> = (0..spec.shape.m)
        .map(|i| {
            let d = shifted_dt(spec, i);
            let mut p = OperatorWord::identity(spec.shape);
            for _ in 0..=height_bound {
                p = p.compose(&d).expect("same shape");
            }
            p
        })
        .collect();
    ann_space(spec, &ops, degree)
}

/// `min{k : (∂t_i − a_i)^{k+1} x = 0}`.
pub fn height(spec: &ModuleSpec, x: &TensorElement, i: usize) -> Result<usize> {
    check_element(spec, x)?;
    if i >= spec.shape.m {
        return Err(Error::IndexOutOfRange {
            what: "even variable",
            index: i,
            bound: spec.shape.m,
        });
    }
    if x.is_zero() {
        return Err(Error::InvalidArgument("height of the zero vector".into()));
    }
    let d = shifted_dt(spec, i);
    let mut k = 0;
    let mut y = act_word(spec, &d, x)?;
    while !y.is_zero() {
        k += 1;
        y = act_word(spec, &d, &y)?;
    }
    Ok(k)
}

/// Projects onto `Wh_a`: first `x ↦ x − ξ_j ∂ξ_j x` for each odd index,
/// then `x ↦ Σ_k ((−1)^k / k!) t_i^k (∂t_i − a_i)^k x` for each even index.
pub fn descent(spec: &ModuleSpec, x: &TensorElement) -> Result<TensorElement> {
    check_element(spec, x)?;
    let shape = spec.shape;
    let m = shape.m;
    let mut x = x.clone();
    for j in 0..shape.n {
        let d = act_generator(spec, &Atom::Dxi(j), &x)?;
        let c = act_generator(spec, &Atom::Mul(Monomial::xi(m, j)), &d)?;
        x = x.checked_sub(&c)?;
    }
    for i in 0..m {
        let d = shifted_dt(spec, i);
        let mut out = x.clone();
        let mut power = act_word(spec, &d, &x)?;
        let mut k = 1u32;
        while !power.is_zero() {
            let mut lifted = power.clone();
            for _ in 0..k {
                lifted = act_generator(spec, &Atom::Mul(Monomial::t(m, i)), &lifted)?;
            }
            let c = scalar::sign(k % 2 == 1) / scalar::factorial(k);
            out.add_scaled(&lifted, &c);
            power = act_word(spec, &d, &power)?;
            k += 1;
        }
        x = out;
    }
    Ok(x)
}

/// `ξ_I ⊗ e_k`, the free generators over `C[h]`, ordered by `(I, k)`.
pub fn generalized_whittaker_basis(spec: &ModuleSpec) -> Vec<TensorElement> {
    let m = spec.shape.m;
    let mut out = Vec::new();
    for odd in OddSet::all(spec.shape.n) {
        for k in 0..spec.dim_v() {
            out.push(TensorElement::basis(
                spec.shape,
                spec.dim_v(),
                Monomial::new(crate::superalgebra::Exponent::zeros(m), odd),
                k,
            ));
        }
    }
    out
}

/// Whether every element of `xs` lies in the span of `basis`.
pub fn spans(window: &Window, basis: &[TensorElement], xs: &[TensorElement]) -> Result<bool> {
    let mut ech = Echelon::new(window.len());
    for b in basis {
        ech.insert(&window.coordinates(b)?);
    }
    for x in xs {
        if !ech.contains(&window.coordinates(x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glmn::{natural_rep, trivial_rep};
    use crate::superalgebra::Exponent;

    fn spec(m: usize, n: usize, a: &[i64]) -> ModuleSpec {
        let rep = natural_rep(Shape::new(m, n)).unwrap();
        ModuleSpec::new(a.iter().map(|&v| scalar::int(v)).collect(), rep).unwrap()
    }

    #[test]
    fn sigma_and_twisted_action() {
        let s = spec(1, 1, &[2]);
        let sh = s.shape();
        let w = sigma_a(&s, &Atom::Dt(0)).unwrap();
        let one = SuperPoly::one(sh);
        assert_eq!(w.act_poly(&one).unwrap(), one.scale(&scalar::int(2)));
        let mut expected = OperatorWord::atom(sh, Atom::Dt(0));
        expected.add_word(Vec::new(), scalar::int(2));
        assert_eq!(w, expected);
        assert_eq!(
            twisted_act(&s, &OperatorWord::atom(sh, Atom::Dt(0)), &one).unwrap(),
            one.scale(&scalar::int(2))
        );
        let t1 = SuperPoly::t(sh, 0);
        assert_eq!(twisted_act(&s, &shifted_dt(&s, 0), &t1).unwrap(), one);
        let x1 = OperatorWord::atom(sh, Atom::Mul(Monomial::xi(1, 0)));
        assert_eq!(twisted_act(&s, &x1, &one).unwrap(), SuperPoly::xi(sh, 0));
        let zero = s.with_a(vec![scalar::zero()]).unwrap();
        assert_eq!(
            sigma_a(&zero, &Atom::Dt(0)).unwrap(),
            OperatorWord::atom(sh, Atom::Dt(0))
        );
    }

    #[test]
    fn generator_examples() {
        let s = spec(1, 1, &[3]);
        let sh = s.shape();
        let v = |k| TensorElement::basis(sh, 2, Monomial::one(1), k);
        let dt = Atom::Witt(WittBasis::new(Monomial::one(1), DerSlot::T(0)));
        assert_eq!(act_generator(&s, &dt, &v(1)).unwrap(), v(1).scale(&scalar::int(3)));
        let t1dt1 = Atom::Witt(WittBasis::new(Monomial::t(1, 0), DerSlot::T(0)));
        let mut expected = TensorElement::term(sh, 2, Monomial::t(1, 0), 0, scalar::int(3));
        expected.add_term(Monomial::one(1), 0, scalar::one());
        assert_eq!(act_generator(&s, &t1dt1, &v(0)).unwrap(), expected);
        let x1dx1 = Atom::Witt(WittBasis::new(Monomial::xi(1, 0), DerSlot::Xi(0)));
        assert_eq!(act_generator(&s, &x1dx1, &v(1)).unwrap(), v(1));
        assert!(act_generator(&s, &x1dx1, &v(0)).unwrap().is_zero());
        let mult = Atom::Mul(Monomial::xi(1, 0));
        let p = TensorElement::basis(sh, 2, Monomial::t(1, 0), 1);
        assert_eq!(
            act_generator(&s, &mult, &p).unwrap(),
            TensorElement::basis(
                sh,
                2,
                Monomial::new(Exponent::from_slice(&[1]), OddSet::singleton(0)),
                1
            )
        );
    }

    #[test]
    fn x_element_on_constants_is_matrix_action() {
        let s = spec(1, 1, &[5]);
        let x = crate::aw::x_element(s.shape(), &Exponent::from_slice(&[1]), OddSet::EMPTY, DerSlot::T(0)).unwrap();
        let v = TensorElement::basis(s.shape(), 2, Monomial::one(1), 0);
        assert_eq!(act_word(&s, &x.to_word(), &v).unwrap(), v);
    }

    #[test]
    fn whittaker_spaces() {
        let s = spec(1, 1, &[1]);
        let wh = whittaker_space(&s, 2).unwrap();
        assert_eq!(wh.len(), 2);
        assert!(wh
            .iter()
            .all(|x| x.max_t_degree() == 0 && x.terms().keys().all(|(m, _)| m.is_one())));
        assert_eq!(whittaker_space(&s, 0).unwrap(), wh);
        assert_eq!(generalized_whittaker_space(&s, 2, 0).unwrap().len(), 4);
        let triv = ModuleSpec::new(vec![scalar::int(-2)], trivial_rep(Shape::new(1, 1))).unwrap();
        assert_eq!(whittaker_space(&triv, 3).unwrap().len(), 1);
        let s20 = spec(2, 0, &[1, 1]);
        assert_eq!(
            generalized_whittaker_space(&s20, 2, 0).unwrap(),
            whittaker_space(&s20, 2).unwrap()
        );
    }

    #[test]
    fn ann_of_odd_derivations() {
        let s = spec(1, 1, &[1]);
        let ops = vec![OperatorWord::atom(s.shape(), Atom::Dxi(0))];
        assert_eq!(ann_space(&s, &ops, 2).unwrap().len(), 3 * 2);
        assert_eq!(ann_space(&s, &[], 2).unwrap().len(), Window::for_spec(&s, 2).len());
    }

    #[test]
    fn heights_and_descent() {
        let s = spec(1, 1, &[7]);
        let sh = s.shape();
        let t = |d: u32, k| TensorElement::basis(sh, 2, Monomial::new(Exponent::from_slice(&[d]), OddSet::EMPTY), k);
        assert_eq!(height(&s, &t(0, 0), 0).unwrap(), 0);
        assert_eq!(height(&s, &t(2, 0), 0).unwrap(), 2);
        let xi = TensorElement::basis(sh, 2, Monomial::xi(1, 0), 0);
        assert_eq!(height(&s, &xi, 0).unwrap(), 0);
        assert!(height(&s, &TensorElement::zero(sh, 2), 0).is_err());

        let x = t(0, 1).checked_add(&t(1, 1)).unwrap();
        assert_eq!(descent(&s, &x).unwrap(), t(0, 1));
        let y = t(0, 0).checked_add(&xi).unwrap();
        assert_eq!(descent(&s, &y).unwrap(), t(0, 0));
        let z = t(3, 0).checked_add(&t(0, 1)).unwrap();
        let d = descent(&s, &z).unwrap();
        assert_eq!(descent(&s, &d).unwrap(), d);
    }

    #[test]
    fn unsigned_rule_breaks_module_law() {
        // [ξ1 ∂t1, ξ1] = 0 in W̃, so ξ1∂t1 must supercommute with ξ1 on T.
        let rep = natural_rep(Shape::new(1, 1)).unwrap();
        for (rule, ok) in [(ActionRule::Koszul, true), (ActionRule::Unsigned, false)] {
            let s = ModuleSpec::with_rule(vec![scalar::one()], rep.clone(), rule).unwrap();
            let sh = s.shape();
            let x = OperatorWord::atom(sh, Atom::Witt(WittBasis::new(Monomial::xi(1, 0), DerSlot::T(0))));
            let a = OperatorWord::atom(sh, Atom::Mul(Monomial::xi(1, 0)));
            let c = crate::operator::supercommutator(&x, &a).unwrap();
            let all_zero = Window::for_spec(&s, 1)
                .spanning_set()
                .iter()
                .all(|v| act_word(&s, &c, v).unwrap().is_zero());
            assert_eq!(all_zero, ok, "{rule:?}");
        }
    }
}
