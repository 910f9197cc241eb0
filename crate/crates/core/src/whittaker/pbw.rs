//! The basis `{h^s u_j}` of `T(A^a, V)` over the Cartan elements
//! `h_i = t_i ∂t_i`, and the weight quotients `M^r = M / I_r M`.

use num_traits::Zero;

use super::{act_generator, generalized_whittaker_basis, ModuleSpec, TensorElement, Window};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Matrix};
use crate::operator::Atom;
use crate::scalar::{self, Scalar};
use crate::superalgebra::{exponents_up_to, Exponent, Monomial};
use crate::witt::{DerSlot, WittBasis};

/// `h_i = t_i ∂t_i` as an atom.
pub fn cartan(m: usize, i: usize) -> Atom {
    Atom::Witt(WittBasis::new(Monomial::t(m, i), DerSlot::T(i)))
}

/// Transition data between the monomial basis of a window and the basis
/// `{h^s u_j : |s| <= D}`.
#[derive(Clone, Debug)]
pub struct PbwBasis {
    spec: ModuleSpec,
    window: Window,
    exps: Vec<Exponent>,
    units: Vec<TensorElement>,
    /// Column `s * units + j` holds the window coordinates of `h^s u_j`.
    transition: Matrix,
    inverse: Matrix,
}

impl PbwBasis {
    pub fn new(spec: &ModuleSpec, degree: usize) -> Result<Self> {
        if !spec.non_singular() {
            return Err(Error::SingularType);
        }
        let shape = spec.shape();
        let window = Window::for_spec(spec, degree);
        let exps = exponents_up_to(shape.m, degree);
        let units = generalized_whittaker_basis(spec);
        let u = units.len();
        let n = window.len();
        debug_assert_eq!(exps.len() * u, n);
        // h^s u_j = h_i h^{s−e_i} u_j with i the first nonzero coordinate.
        let mut images: Vec<Vec<TensorElement>> = Vec::with_capacity(exps.len());
        let position = |e: &Exponent| exps.iter().position(|x| x == e).expect("graded order");
        for (si, s) in exps.iter().enumerate() {
            let row = if si == 0 {
                units.clone()
            } else {
                let i = (0..shape.m).find(|&i| s.get(i) > 0).expect("nonzero exponent");
                let prev = &images[position(&s.with_lowered(i).unwrap())];
                prev.iter()
                    .map(|x| act_generator(spec, &cartan(shape.m, i), x))
                    .collect::<Result<Vec<_>>>()?
            };
            images.push(row);
        }
        let mut transition = Matrix::zeros(n, n);
        for (si, row) in images.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                for (r, c) in window.coordinates(x)? {
                    transition.set(r, si * u + j, c);
                }
            }
        }
        let inverse = transition
            .inverse()
            .ok_or_else(|| Error::SingularMatrix(format!("transition matrix of size {n} at degree {degree}")))?;
        Ok(PbwBasis {
            spec: spec.clone(),
            window,
            exps,
            units,
            transition,
            inverse,
        })
    }

    pub fn spec(&self) -> &ModuleSpec {
        &self.spec
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn units(&self) -> &[TensorElement] {
        &self.units
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    /// Coefficients `c_{s,j}` with `x = Σ c_{s,j} h^s u_j`.
    pub fn rewrite(&self, x: &TensorElement) -> Result<Vec<Scalar>> {
        Ok(self.inverse.apply(&self.window.dense(x)?))
    }

    /// `Σ c_{s,j} h^s u_j` back in the monomial basis.
    pub fn reconstruct(&self, coeffs: &[Scalar]) -> TensorElement {
        self.window.element(&self.transition.apply(coeffs))
    }
}

/// Class of an element in `M^r`, in coordinates for `{u_j + I_r M}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightCoset {
    pub weight: Vec<i64>,
    pub coords: Vec<Scalar>,
}

impl WeightCoset {
    pub fn unit(weight: Vec<i64>, len: usize, j: usize) -> Self {
        let mut coords = vec![scalar::zero(); len];
        coords[j] = scalar::one();
        WeightCoset { weight, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Representative `Σ coords_j u_j`.
    pub fn lift(&self, pbw: &PbwBasis) -> TensorElement {
        let spec = &pbw.spec;
        let mut x = TensorElement::zero(spec.shape(), spec.dim_v());
        for (c, u) in self.coords.iter().zip(&pbw.units) {
            if !c.is_zero() {
                x.add_scaled(u, c);
            }
        }
        x
    }
}

/// Reduces `x` modulo `I_r M`: `h^s u_j ↦ r^s u_j`.
pub fn weighting_reduce(pbw: &PbwBasis, x: &TensorElement, r: &[i64]) -> Result<WeightCoset> {
    let m = pbw.spec.shape().m;
    if r.len() != m {
        return Err(Error::InvalidArgument(format!(
            "weight has {} entries, expected {m}",
            r.len()
        )));
    }
    let c = pbw.rewrite(x)?;
    let u = pbw.units.len();
    let mut coords = vec![scalar::zero(); u];
    for (si, s) in pbw.exps.iter().enumerate() {
        let rs = s.evaluate(r);
        if rs.is_zero() {
            continue;
        }
        for (j, out) in coords.iter_mut().enumerate() {
            let v = &c[si * u + j];
            if !v.is_zero() {
                *out += v * &rs;
            }
        }
    }
    Ok(WeightCoset {
        weight: r.to_vec(),
        coords,
    })
}

/// `t^α ξ_I ∂ : M^s → M^{s+α−e_i}` (for `∂t_i`) or `M^{s+α}` (for `∂ξ_j`).
pub fn weighting_act(pbw: &PbwBasis, g: &WittBasis, c: &WeightCoset) -> Result<WeightCoset> {
    let shape = pbw.spec.shape();
    if !g.fits(shape) {
        return Err(Error::InvalidArgument(format!(
            "vector field does not fit shape {shape}"
        )));
    }
    let mut target: Vec<i64> = c
        .weight
        .iter()
        .zip(g.mono.exp.as_slice())
        .map(|(s, a)| s + *a as i64)
        .collect();
    if let DerSlot::T(i) = g.slot {
        target[i] -= 1;
    }
    let y = act_generator(&pbw.spec, &Atom::Witt(g.clone()), &c.lift(pbw))?;
    weighting_reduce(pbw, &y, &target)
}

/// `dim M^r` computed from scratch: the window of degree `D` modulo the
/// images `(h_i − r_i)·b` of the degree `D − 1` window.
pub fn weight_space_dim(spec: &ModuleSpec, r: &[i64], degree: usize) -> Result<usize> {
    let shape = spec.shape();
    if r.len() != shape.m {
        return Err(Error::InvalidArgument(format!(
            "weight has {} entries, expected {}",
            r.len(),
            shape.m
        )));
    }
    let window = Window::for_spec(spec, degree);
    let mut ech = Echelon::new(window.len());
    if degree > 0 {
        let lower = Window::for_spec(spec, degree - 1);
        for b in lower.spanning_set() {
            for (i, ri) in r.iter().enumerate() {
                let mut y = act_generator(spec, &cartan(shape.m, i), &b)?;
                y.add_scaled(&b, &-scalar::int(*ri));
                ech.insert(&window.coordinates(&y)?);
            }
        }
    }
    Ok(window.len() - ech.rank())
}
