//! Checks on the tensor modules `T(A^a, V)`: the module axioms, `π₂`,
//! `[K, T] = 0`, the `gl(m|n)` realization on Whittaker vectors, their
//! dimension, descent, and the cyclicity probe.

use serde_json::json;

use super::{first_failure, random_element, CheckParams, Counterexample, Outcome};
use crate::aw::{aw_bracket, pi2_with, x_element, x_element_with, AWElement};
use crate::error::Result;
use crate::expr::{format_aw, format_tensor, format_witt, format_word};
use crate::glmn::RepDescriptor;
use crate::linalg::Echelon;
use crate::operator::{supercommutator, Atom, OperatorWord};
use crate::superalgebra::{monomials_up_to, Exponent, Monomial, OddSet, Shape, SuperPoly};
use crate::whittaker::{act_word, descent, shifted_dt, whittaker_space, ModuleSpec, PbwBasis, TensorElement, Window};
use crate::witt::{witt_act, witt_basis_up_to, witt_bracket, DerSlot, WittBasis, WittElement};

/// Two operators that must agree on every vector of the window.
struct OpCase {
    inputs: Vec<String>,
    lhs: OperatorWord,
    rhs: OperatorWord,
}

fn verify_cases(
    spec: &ModuleSpec,
    vecs: &[TensorElement],
    cases: Vec<OpCase>,
    note: &str,
) -> Result<(u64, Option<Counterexample>)> {
    let results = crate::par_map(cases, |case| -> Result<(u64, Option<Counterexample>)> {
        let diff = case.lhs.checked_sub(&case.rhs)?;
        for (k, v) in vecs.iter().enumerate() {
            if act_word(spec, &diff, v)?.is_zero() {
                continue;
            }
            let mut inputs = case.inputs.clone();
            inputs.push(format_tensor(v));
            let lhs = act_word(spec, &case.lhs, v)?;
            let rhs = act_word(spec, &case.rhs, v)?;
            let cx = Counterexample::new(inputs, format_tensor(&lhs), format_tensor(&rhs), note);
            return Ok((k as u64 + 1, Some(cx)));
        }
        Ok((vecs.len() as u64, None))
    });
    Ok(first_failure(results.into_iter().collect::<Result<Vec<_>>>()?))
}

fn witt_word(shape: Shape, b: &WittBasis) -> OperatorWord {
    OperatorWord::atom(shape, Atom::Witt(b.clone()))
}

fn aw_basis(shape: Shape, degree: usize) -> Vec<AWElement> {
    let mut out = Vec::new();
    for a in monomials_up_to(shape, degree) {
        for x in witt_basis_up_to(shape, degree) {
            out.push(AWElement::term(shape, a.clone(), x, crate::scalar::one()));
        }
    }
    out
}

/// Basis of `𝔪△` (fields whose coefficient has positive total degree).
fn positive_basis(shape: Shape, degree: usize) -> Vec<WittBasis> {
    witt_basis_up_to(shape, degree)
        .into_iter()
        .filter(|b| b.mono.total_degree() > 0)
        .collect()
}

/// Bracket compatibility, `A`-associativity, the `A ⋊ W` relation
/// `[x, q] = x(q)` and the `AW` bracket, all as operator identities on the
/// window.
pub(super) fn check_module_axioms(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let vecs = Window::for_spec(&spec, p.window).spanning_set();
    let wb = witt_basis_up_to(shape, p.degree);
    let monos = monomials_up_to(shape, p.degree);
    let mut total = 0;

    let mut cases = Vec::new();
    for x in &wb {
        for y in &wb {
            let xe = WittElement::basis(shape, x.clone());
            let ye = WittElement::basis(shape, y.clone());
            cases.push(OpCase {
                inputs: vec![format_witt(&xe), format_witt(&ye)],
                lhs: OperatorWord::from_witt(&witt_bracket(&xe, &ye)?),
                rhs: supercommutator(&witt_word(shape, x), &witt_word(shape, y))?,
            });
        }
    }
    let (c, f) = verify_cases(&spec, &vecs, cases, "[x,y] acts as the supercommutator")?;
    total += c;
    if f.is_some() {
        return Ok(Outcome::from_search(total, f));
    }

    let mut cases = Vec::new();
    for x in &wb {
        for q in &monos {
            let xe = WittElement::basis(shape, x.clone());
            let qp = SuperPoly::monomial(shape, q.clone());
            cases.push(OpCase {
                inputs: vec![format_witt(&xe), qp.to_string()],
                lhs: OperatorWord::from_poly(&witt_act(&xe, &qp)?),
                rhs: supercommutator(&witt_word(shape, x), &OperatorWord::from_poly(&qp))?,
            });
        }
    }
    for q in &monos {
        for r in &monos {
            let qp = SuperPoly::monomial(shape, q.clone());
            let rp = SuperPoly::monomial(shape, r.clone());
            cases.push(OpCase {
                inputs: vec![qp.to_string(), rp.to_string()],
                lhs: OperatorWord::from_poly(&(&qp * &rp)),
                rhs: OperatorWord::from_poly(&qp).compose(&OperatorWord::from_poly(&rp))?,
            });
        }
    }
    let (c, f) = verify_cases(&spec, &vecs, cases, "A-module and [x,q] = x(q)")?;
    total += c;
    if f.is_some() {
        return Ok(Outcome::from_search(total, f));
    }

    let ab = aw_basis(shape, p.degree.min(1));
    let mut cases = Vec::new();
    for u in &ab {
        for v in &ab {
            cases.push(OpCase {
                inputs: vec![format_aw(u), format_aw(v)],
                lhs: aw_bracket(u, v)?.to_word(),
                rhs: supercommutator(&u.to_word(), &v.to_word())?,
            });
        }
    }
    let (c, f) = verify_cases(&spec, &vecs, cases, "AW bracket acts as the supercommutator")?;
    total += c;
    Ok(Outcome::from_search(total, f).with_details(json!({
        "window_dim": vecs.len(),
        "witt_basis": wb.len(),
        "aw_basis": ab.len(),
    })))
}

/// `π₂([u, v])` against the supercommutator of `π₂(u)` and `π₂(v)`, both
/// formally in `AW` and as operators on the window.
pub(super) fn check_pi2(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let vecs = Window::for_spec(&spec, p.window).spanning_set();
    let basis = positive_basis(shape, p.degree);
    let xs: Vec<AWElement> = basis
        .iter()
        .map(|b| pi2_with(&WittElement::basis(shape, b.clone()), p.tau))
        .collect::<Result<_>>()?;
    let mut cases = Vec::new();
    let mut formal = 0u64;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let ue = WittElement::basis(shape, u.clone());
            let ve = WittElement::basis(shape, v.clone());
            let image = pi2_with(&witt_bracket(&ue, &ve)?, p.tau)?;
            let formal_rhs = aw_bracket(&xs[i], &xs[j])?;
            formal += 1;
            if image != formal_rhs {
                let cx = Counterexample::new(
                    vec![format_witt(&ue), format_witt(&ve)],
                    format_aw(&image),
                    format_aw(&formal_rhs),
                    "pi2([u,v]) vs [pi2(u), pi2(v)] in AW",
                );
                return Ok(Outcome::fail(formal, cx));
            }
            cases.push(OpCase {
                inputs: vec![format_witt(&ue), format_witt(&ve)],
                lhs: image.to_word(),
                rhs: supercommutator(&xs[i].to_word(), &xs[j].to_word())?,
            });
        }
    }
    let (c, f) = verify_cases(&spec, &vecs, cases, "pi2([u,v]) vs [pi2(u), pi2(v)] on the module")?;
    Ok(Outcome::from_search(formal + c, f).with_details(json!({
        "basis": basis.len(),
        "window_dim": vecs.len(),
    })))
}

fn weyl_atoms(shape: Shape) -> Vec<Atom> {
    let m = shape.m;
    let mut atoms = Vec::new();
    for i in 0..m {
        atoms.push(Atom::Mul(Monomial::t(m, i)));
        atoms.push(Atom::Dt(i));
    }
    for j in 0..shape.n {
        atoms.push(Atom::Mul(Monomial::xi(m, j)));
        atoms.push(Atom::Dxi(j));
    }
    atoms
}

/// Every `X_{α,I,∂}` supercommutes with every Weyl generator on the window;
/// `t_1 ∂t_1` against `∂t_1` is the control that must not commute.
pub(super) fn check_k_t_commute(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let vecs = Window::for_spec(&spec, p.window).spanning_set();
    let zero = OperatorWord::zero(shape);
    let mut cases = Vec::new();
    for b in positive_basis(shape, p.degree) {
        let x = x_element(shape, &b.mono.exp, b.mono.odd, b.slot)?;
        for atom in weyl_atoms(shape) {
            let a = OperatorWord::atom(shape, atom);
            cases.push(OpCase {
                inputs: vec![format_aw(&x), format_word(&a)],
                lhs: supercommutator(&x.to_word(), &a)?,
                rhs: zero.clone(),
            });
        }
    }
    let (cases_run, f) = verify_cases(&spec, &vecs, cases, "[X, k] = 0")?;
    if f.is_some() {
        return Ok(Outcome::from_search(cases_run, f));
    }
    if shape.m == 0 {
        return Ok(Outcome::pass(cases_run));
    }
    let h = WittBasis::new(Monomial::t(shape.m, 0), DerSlot::T(0));
    let control = supercommutator(&witt_word(shape, &h), &OperatorWord::atom(shape, Atom::Dt(0)))?;
    let mut witness = None;
    for v in &vecs {
        let y = act_word(&spec, &control, v)?;
        if !y.is_zero() {
            witness = Some((v.clone(), y));
            break;
        }
    }
    let Some((v, y)) = witness else {
        let cx = Counterexample::new(
            vec!["t1*dt1".into(), "dt1".into()],
            "0",
            "nonzero",
            "control: t1*dt1 and dt1 commute on the whole window, so the window cannot separate operators",
        );
        return Ok(Outcome::fail(cases_run, cx));
    };
    Ok(Outcome::pass(cases_run + 1).with_details(json!({
        "control": { "operator": format_word(&control), "vector": format_tensor(&v), "image": format_tensor(&y) }
    })))
}

fn constant_vectors(spec: &ModuleSpec) -> Vec<TensorElement> {
    let shape = spec.shape();
    (0..spec.dim_v())
        .map(|k| TensorElement::basis(shape, spec.dim_v(), Monomial::one(shape.m), k))
        .collect()
}

fn sub_spec(p: &CheckParams, shape: Shape) -> Result<ModuleSpec> {
    let rep = RepDescriptor::parse(&p.rep)?.build(shape, None)?;
    let a = p.a_values()?.into_iter().take(shape.m).collect();
    ModuleSpec::with_rule(a, rep, p.action_rule)
}

fn realization_on(spec: &ModuleSpec, p: &CheckParams) -> Result<(u64, Option<Counterexample>)> {
    let shape = spec.shape();
    let m = shape.m;
    let wh = whittaker_space(spec, p.window)?;
    let window = Window::for_spec(spec, p.window);
    let consts = constant_vectors(spec);
    let mut cases = 1u64;
    if wh.len() != spec.dim_v() || !crate::whittaker::spans(&window, &wh, &consts)? {
        let cx = Counterexample::new(
            vec![format!("m={} n={}", m, shape.n)],
            format!("dim Wh = {}", wh.len()),
            format!("span of 1 @ e_k, dim {}", spec.dim_v()),
            "Whittaker vectors are not the constants",
        );
        return Ok((cases, Some(cx)));
    }
    let mut degree_one: Vec<(Exponent, OddSet, usize)> = Vec::new();
    for k in 0..m {
        degree_one.push((Exponent::unit(m, k), OddSet::EMPTY, k));
    }
    for j in 0..shape.n {
        degree_one.push((Exponent::zeros(m), OddSet::singleton(j), m + j));
    }
    let shape_tag = format!("m={} n={}", m, shape.n);
    for (alpha, odd, row) in &degree_one {
        for slot in DerSlot::all(shape) {
            let x = x_element(shape, alpha, *odd, slot)?;
            let word = x.to_word();
            let e = spec.rep().matrix(*row, slot.gl_index(shape));
            for (c, v) in consts.iter().enumerate() {
                cases += 1;
                let got = act_word(spec, &word, v)?;
                let mut want = TensorElement::zero(shape, spec.dim_v());
                for r in 0..spec.dim_v() {
                    want.add_term(Monomial::one(m), r, e.get(r, c).clone());
                }
                if got != want {
                    let cx = Counterexample::new(
                        vec![format_aw(&x), format_tensor(v), shape_tag.clone()],
                        format_tensor(&got),
                        format_tensor(&want),
                        format!("degree-one X acts on Wh as E({},{})", row + 1, slot.gl_index(shape) + 1),
                    );
                    return Ok((cases, Some(cx)));
                }
            }
        }
    }
    for b in witt_basis_up_to(shape, p.degree) {
        if b.mono.total_degree() < 2 {
            continue;
        }
        let x = x_element(shape, &b.mono.exp, b.mono.odd, b.slot)?;
        let word = x.to_word();
        for v in &consts {
            cases += 1;
            let got = act_word(spec, &word, v)?;
            if !got.is_zero() {
                let cx = Counterexample::new(
                    vec![format_aw(&x), format_tensor(v), shape_tag.clone()],
                    format_tensor(&got),
                    "0",
                    "X of degree >= 2 annihilates Wh",
                );
                return Ok((cases, Some(cx)));
            }
        }
    }
    Ok((cases, None))
}

/// Degree-one `X`'s act on `Wh` through the matrices of `V`, and higher
/// ones kill it, for every shape `(m'|n') <= (m|n)` with `m' >= 1`.
pub(super) fn check_gl_realization(p: &CheckParams) -> Result<Outcome> {
    let mut total = 0;
    let mut shapes = Vec::new();
    for m in 1..=p.m {
        for n in 0..=p.n {
            let shape = Shape::new(m, n);
            let spec = sub_spec(p, shape)?;
            let (c, f) = realization_on(&spec, p)?;
            total += c;
            if f.is_some() {
                return Ok(Outcome::from_search(total, f));
            }
            shapes.push(format!("{m}|{n}"));
        }
    }
    Ok(Outcome::pass(total).with_details(json!({ "shapes": shapes })))
}

/// `dim Wh = dim V` on three consecutive windows, spanned by `1 ⊗ V`.
pub(super) fn check_whittaker_dim(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let consts = constant_vectors(&spec);
    let mut dims = Vec::new();
    for d in p.window..=p.window + 2 {
        let wh = whittaker_space(&spec, d)?;
        dims.push(wh.len());
        let window = Window::for_spec(&spec, d);
        if wh.len() != spec.dim_v() || !crate::whittaker::spans(&window, &wh, &consts)? {
            let cx = Counterexample::new(
                vec![format!("D={d}")],
                format!("dim Wh = {}", wh.len()),
                format!("dim V = {}", spec.dim_v()),
                "Whittaker space differs from 1 @ V",
            );
            return Ok(Outcome::fail(dims.len() as u64, cx));
        }
    }
    Ok(Outcome::pass(dims.len() as u64).with_details(json!({ "dim_v": spec.dim_v(), "dims": dims })))
}

fn whittaker_ops(spec: &ModuleSpec) -> Vec<OperatorWord> {
    let shape = spec.shape();
    let mut ops: Vec<OperatorWord> = (0..shape.m).map(|i| shifted_dt(spec, i)).collect();
    ops.extend((0..shape.n).map(|j| OperatorWord::atom(shape, Atom::Dxi(j))));
    ops
}

/// Seeded random elements descend into `Wh`, descent is idempotent and
/// fixes `1 ⊗ V`, and the `{h^s u_j}` rewrite round-trips exactly.
pub(super) fn check_descent(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let pbw = PbwBasis::new(&spec, p.window)?;
    let window = pbw.window().clone();
    let ops = whittaker_ops(&spec);
    let mut cases = 0;
    for v in constant_vectors(&spec) {
        cases += 1;
        let d = descent(&spec, &v)?;
        if d != v {
            let cx = Counterexample::new(
                vec![format_tensor(&v)],
                format_tensor(&d),
                format_tensor(&v),
                "descent fixes Wh",
            );
            return Ok(Outcome::fail(cases, cx));
        }
    }
    let mut rng = p.rng();
    let samples: Vec<TensorElement> = (0..p.trials).map(|_| random_element(&mut rng, &window, 6)).collect();
    let results = crate::par_map(samples, |x| -> Result<(u64, Option<Counterexample>)> {
        let d = descent(&spec, &x)?;
        for op in &ops {
            let y = act_word(&spec, op, &d)?;
            if !y.is_zero() {
                let cx = Counterexample::new(
                    vec![format_tensor(&x), format_word(op)],
                    format_tensor(&y),
                    "0",
                    format!("descent(x) = {} is not a Whittaker vector", format_tensor(&d)),
                );
                return Ok((1, Some(cx)));
            }
        }
        let dd = descent(&spec, &d)?;
        if dd != d {
            let cx = Counterexample::new(
                vec![format_tensor(&x)],
                format_tensor(&dd),
                format_tensor(&d),
                "descent is idempotent",
            );
            return Ok((1, Some(cx)));
        }
        let back = pbw.reconstruct(&pbw.rewrite(&x)?);
        if back != x {
            let cx = Counterexample::new(
                vec![format_tensor(&x)],
                format_tensor(&back),
                format_tensor(&x),
                "PBW rewrite round trip",
            );
            return Ok((1, Some(cx)));
        }
        Ok((1, None))
    });
    let (c, f) = first_failure(results.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(Outcome::from_search(cases + c, f).with_details(json!({
        "transition_size": pbw.transition().rows(),
    })))
}

/// Closure of `span{x}` under `∂t_i − a_i`, `∂ξ_j` and the degree-one
/// `X`'s, which preserve the window.
fn closure(spec: &ModuleSpec, window: &Window, gens: &[OperatorWord], x: &TensorElement) -> Result<Echelon> {
    let mut ech = Echelon::new(window.len());
    ech.insert(&window.coordinates(x)?);
    let mut queue = vec![x.clone()];
    while let Some(v) = queue.pop() {
        for g in gens {
            let y = act_word(spec, g, &v)?;
            if !y.is_zero() && ech.insert(&window.coordinates(&y)?) {
                queue.push(y);
            }
        }
    }
    Ok(ech)
}

/// Cyclicity evidence: from seeded nonzero vectors, the generated
/// submodule reaches `Wh`. A reducible `V` yields a proper invariant
/// subspace missing part of `Wh`, reported as a failure.
pub(super) fn simplicity_probe(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let window = Window::for_spec(&spec, p.window);
    let mut gens = whittaker_ops(&spec);
    for k in 0..shape.m {
        for slot in DerSlot::all(shape) {
            gens.push(x_element(shape, &Exponent::unit(shape.m, k), OddSet::EMPTY, slot)?.to_word());
        }
    }
    for j in 0..shape.n {
        for slot in DerSlot::all(shape) {
            gens.push(x_element_with(shape, &Exponent::zeros(shape.m), OddSet::singleton(j), slot, p.tau)?.to_word());
        }
    }
    let consts = constant_vectors(&spec);
    let mut seeds = vec![consts[0].clone()];
    let mut rng = p.rng();
    seeds.extend((0..p.trials).map(|_| random_element(&mut rng, &window, 4)));
    let results = crate::par_map(seeds, |x| -> Result<(u64, Option<Counterexample>)> {
        let ech = closure(&spec, &window, &gens, &x)?;
        for w in &consts {
            if !ech.contains(&window.coordinates(w)?) {
                let cx = Counterexample::new(
                    vec![format_tensor(&x)],
                    format!("invariant subspace of dim {}", ech.rank()),
                    format!("missing Whittaker vector {}", format_tensor(w)),
                    "generated subspace is proper and misses Wh",
                );
                return Ok((1, Some(cx)));
            }
        }
        Ok((1, None))
    });
    let (c, f) = first_failure(results.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(Outcome::from_search(c, f).with_details(json!({ "generators": gens.len(), "window_dim": window.len() })))
}

#[cfg(test)]
mod tests {
    use super::super::{run_check, CheckId, Status};
    use super::*;
    use crate::aw::TauConvention;
    use crate::whittaker::ActionRule;

    #[test]
    fn module_axioms_and_controls() {
        let mut p = CheckParams::defaults(CheckId::ModuleAxioms);
        p.window = 2;
        p.degree = 1;
        let r = run_check(CheckId::ModuleAxioms, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.action_rule = ActionRule::MutatedOddSum;
        assert_eq!(run_check(CheckId::ModuleAxioms, &p).status, Status::Fail);
        p.action_rule = ActionRule::Unsigned;
        assert_eq!(run_check(CheckId::ModuleAxioms, &p).status, Status::Fail);
        p.action_rule = ActionRule::Koszul;
        p.rep = "trivial".into();
        assert_eq!(run_check(CheckId::ModuleAxioms, &p).status, Status::Pass);
    }

    #[test]
    fn pi2_small_and_flipped() {
        let mut p = CheckParams::defaults(CheckId::Pi2);
        p.window = 2;
        p.degree = 1;
        let r = run_check(CheckId::Pi2, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.n = 2;
        let r = run_check(CheckId::Pi2, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.tau = TauConvention::Flipped;
        assert_eq!(run_check(CheckId::Pi2, &p).status, Status::Fail);
    }

    #[test]
    fn k_t_and_realization() {
        let mut p = CheckParams::defaults(CheckId::KTCommute);
        p.window = 2;
        p.degree = 1;
        let r = run_check(CheckId::KTCommute, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        assert!(r.details.unwrap()["control"].is_object());
        let mut g = CheckParams::defaults(CheckId::GlRealization);
        g.m = 1;
        g.n = 1;
        g.a = vec!["1".into()];
        g.window = 1;
        g.degree = 2;
        let r = run_check(CheckId::GlRealization, &g);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
    }

    #[test]
    fn whittaker_dims() {
        let mut p = CheckParams::defaults(CheckId::WhittakerDim);
        p.m = 1;
        p.n = 1;
        p.a = vec!["1".into()];
        p.window = 1;
        let r = run_check(CheckId::WhittakerDim, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.rep = "trivial".into();
        let r = run_check(CheckId::WhittakerDim, &p);
        assert_eq!(r.details.unwrap()["dims"], json!([1, 1, 1]));
    }

    #[test]
    fn descent_and_singular_type() {
        let mut p = CheckParams::defaults(CheckId::Descent);
        p.window = 2;
        p.trials = 10;
        let r = run_check(CheckId::Descent, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.a = vec!["0".into(), "1".into()];
        let r = run_check(CheckId::Descent, &p);
        assert_eq!(r.status, Status::Error);
    }

    #[test]
    fn probe_detects_reducible_v() {
        let mut p = CheckParams::defaults(CheckId::SimplicityProbe);
        p.trials = 10;
        let r = run_check(CheckId::SimplicityProbe, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.rep = "sum(trivial,trivial)".into();
        let r = run_check(CheckId::SimplicityProbe, &p);
        assert_eq!(r.status, Status::Fail);
        assert!(r.counterexample.unwrap().lhs.starts_with("invariant subspace"));
    }
}
