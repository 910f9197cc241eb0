//! Bracket-level checks: super-Jacobi, the structure-constant oracle and the
//! Weyl relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::{first_failure, CheckParams, Counterexample, Outcome};
use crate::aw::{aw_bracket, AWElement};
use crate::error::Result;
use crate::expr::{format_aw, format_tilde, format_witt, format_word};
use crate::operator::{Atom, OperatorWord};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{koszul_negative, monomials_up_to, Monomial, Parity, Shape, SuperPoly};
use crate::weyl::{verbatim_clifford, weyl_normal_order, weyl_relations};
use crate::witt::{
    bracket_basis, bracket_oracle, tilde_bracket, witt_basis_up_to, TildeElement, WittBasis, WittElement,
};

type Sparse<K> = BTreeMap<K, Scalar>;
/// Products `[x, -]` and `[-, x]` of one basis element with all others.
type Sides<K> = (HashMap<K, Sparse<K>>, HashMap<K, Sparse<K>>);
/// A failing pair with both sides.
type PairFailure<K> = ([K; 2], Sparse<K>, Sparse<K>);

fn add_scaled<K: Ord + Clone>(acc: &mut Sparse<K>, v: &Sparse<K>, k: &Scalar) {
    for (key, c) in v {
        let e = acc.entry(key.clone()).or_insert_with(scalar::zero);
        *e += c * k;
        if e.is_zero() {
            acc.remove(key);
        }
    }
}

/// Failing triple `(a, b, c)` with both sides of the Jacobi identity.
struct JacobiFailure<K> {
    triple: [K; 3],
    lhs: Sparse<K>,
    rhs: Sparse<K>,
}

/// `[a,[b,c]] = [[a,b],c] + (−1)^{|a||b|}[b,[a,c]]` over all triples of
/// `basis`, evaluated from cached tables of the brackets it needs.
fn jacobi_sweep<K, B, P>(basis: &[K], bracket: B, parity: P) -> (u64, Option<JacobiFailure<K>>)
where
    K: Ord + Clone + Hash + Send + Sync,
    B: Fn(&K, &K) -> Sparse<K> + Sync + Send,
    P: Fn(&K) -> Parity + Sync,
{
    let n = basis.len();
    let table: Vec<Vec<Sparse<K>>> = crate::par_map((0..n).collect(), |b| {
        basis.iter().map(|c| bracket(&basis[b], c)).collect()
    });
    let inner: Vec<K> = table
        .iter()
        .flatten()
        .flat_map(|v| v.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // left[x][k] = [basis_x, k], right[x][k] = [k, basis_x].
    let sides: Vec<Sides<K>> = crate::par_map((0..n).collect(), |x| {
        let left = inner.iter().map(|k| (k.clone(), bracket(&basis[x], k))).collect();
        let right = inner.iter().map(|k| (k.clone(), bracket(k, &basis[x]))).collect();
        (left, right)
    });
    let parities: Vec<Parity> = basis.iter().map(&parity).collect();
    let results = crate::par_map((0..n).collect(), |a| {
        let mut cases = 0u64;
        for b in 0..n {
            for c in 0..n {
                cases += 1;
                let mut lhs = Sparse::new();
                for (k, v) in &table[b][c] {
                    add_scaled(&mut lhs, &sides[a].0[k], v);
                }
                let mut rhs = Sparse::new();
                for (k, v) in &table[a][b] {
                    add_scaled(&mut rhs, &sides[c].1[k], v);
                }
                let s = scalar::sign(koszul_negative(parities[a], parities[b]));
                for (k, v) in &table[a][c] {
                    add_scaled(&mut rhs, &sides[b].0[k], &(v * &s));
                }
                if lhs != rhs {
                    let triple = [basis[a].clone(), basis[b].clone(), basis[c].clone()];
                    return (cases, Some(JacobiFailure { triple, lhs, rhs }));
                }
            }
        }
        (cases, None)
    });
    first_failure(results)
}

/// Pairs violating `[x,y] = −(−1)^{|x||y|}[y,x]`.
fn antisymmetry_sweep<K, B, P>(basis: &[K], bracket: B, parity: P) -> (u64, Option<PairFailure<K>>)
where
    K: Ord + Clone + Send + Sync,
    B: Fn(&K, &K) -> Sparse<K> + Sync + Send,
    P: Fn(&K) -> Parity + Sync,
{
    let n = basis.len();
    let results = crate::par_map((0..n).collect(), |x| {
        for y in x..n {
            let xy = bracket(&basis[x], &basis[y]);
            let mut yx = Sparse::new();
            let s = -scalar::sign(koszul_negative(parity(&basis[x]), parity(&basis[y])));
            add_scaled(&mut yx, &bracket(&basis[y], &basis[x]), &s);
            if xy != yx {
                return ((y - x + 1) as u64, Some(([basis[x].clone(), basis[y].clone()], xy, yx)));
            }
        }
        ((n - x) as u64, None)
    });
    first_failure(results)
}

fn witt_of(shape: Shape, v: &Sparse<WittBasis>) -> WittElement {
    WittElement::from_terms(shape, v.iter().map(|(k, c)| (k.clone(), c.clone())))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum TildeKey {
    Fun(Monomial),
    Der(WittBasis),
}

fn tilde_of(shape: Shape, v: &Sparse<TildeKey>) -> TildeElement {
    let mut fun = SuperPoly::zero(shape);
    let mut der = WittElement::zero(shape);
    for (k, c) in v {
        match k {
            TildeKey::Fun(m) => fun.add_term(m.clone(), c.clone()),
            TildeKey::Der(b) => der.add_term(b.clone(), c.clone()),
        }
    }
    TildeElement { fun, der }
}

fn tilde_sparse(t: &TildeElement) -> Sparse<TildeKey> {
    let mut out = Sparse::new();
    for (m, c) in t.fun.terms() {
        out.insert(TildeKey::Fun(m.clone()), c.clone());
    }
    for (b, c) in t.der.terms() {
        out.insert(TildeKey::Der(b.clone()), c.clone());
    }
    out
}

fn jacobi_cx<K: Ord + Clone>(f: JacobiFailure<K>, show: impl Fn(&Sparse<K>) -> String, what: &str) -> Counterexample {
    let inputs = f
        .triple
        .iter()
        .map(|k| show(&Sparse::from([(k.clone(), scalar::one())])))
        .collect();
    Counterexample::new(
        inputs,
        show(&f.lhs),
        show(&f.rhs),
        format!("{what}: [a,[b,c]] vs [[a,b],c] + (-1)^(|a||b|)[b,[a,c]]"),
    )
}

fn antisym_cx<K: Ord + Clone>(
    pair: [K; 2],
    lhs: Sparse<K>,
    rhs: Sparse<K>,
    show: impl Fn(&Sparse<K>) -> String,
    what: &str,
) -> Counterexample {
    let inputs = pair
        .iter()
        .map(|k| show(&Sparse::from([(k.clone(), scalar::one())])))
        .collect();
    Counterexample::new(
        inputs,
        show(&lhs),
        show(&rhs),
        format!("{what}: [x,y] vs -(-1)^(|x||y|)[y,x]"),
    )
}

/// Super-antisymmetry and super-Jacobi for `W` and `A ⋊ W` exhaustively on
/// degree-bounded bases, and for `AW` on seeded random triples.
pub(super) fn check_jacobi(p: &CheckParams) -> Result<Outcome> {
    let shape = p.shape();
    let mode = p.bracket_mode;
    let mut cases = 0;
    let mut details = serde_json::Map::new();

    let wb = witt_basis_up_to(shape, p.degree);
    let wbr = |x: &WittBasis, y: &WittBasis| bracket_basis(shape, x, y, mode).terms().clone();
    let wpar = |x: &WittBasis| x.parity();
    let wshow = |v: &Sparse<WittBasis>| format_witt(&witt_of(shape, v));
    let (c, f) = jacobi_sweep(&wb, wbr, wpar);
    cases += c;
    details.insert("witt_basis".into(), json!(wb.len()));
    if let Some(f) = f {
        return Ok(Outcome::fail(cases, jacobi_cx(f, wshow, "W")));
    }
    let (c, f) = antisymmetry_sweep(&wb, wbr, wpar);
    cases += c;
    if let Some((pair, l, r)) = f {
        return Ok(Outcome::fail(cases, antisym_cx(pair, l, r, wshow, "W")));
    }

    let mut tb: Vec<TildeKey> = monomials_up_to(shape, p.degree)
        .into_iter()
        .map(TildeKey::Fun)
        .collect();
    tb.extend(wb.iter().cloned().map(TildeKey::Der));
    let tbr = |x: &TildeKey, y: &TildeKey| {
        let u = tilde_of(shape, &Sparse::from([(x.clone(), scalar::one())]));
        let v = tilde_of(shape, &Sparse::from([(y.clone(), scalar::one())]));
        tilde_sparse(&tilde_bracket(&u, &v).expect("same shape"))
    };
    let tpar = |k: &TildeKey| match k {
        TildeKey::Fun(m) => m.parity(),
        TildeKey::Der(b) => b.parity(),
    };
    let tshow = |v: &Sparse<TildeKey>| format_tilde(&tilde_of(shape, v));
    let (c, f) = jacobi_sweep(&tb, tbr, tpar);
    cases += c;
    details.insert("tilde_basis".into(), json!(tb.len()));
    if let Some(f) = f {
        return Ok(Outcome::fail(cases, jacobi_cx(f, tshow, "A⋊W")));
    }
    let (c, f) = antisymmetry_sweep(&tb, tbr, tpar);
    cases += c;
    if let Some((pair, l, r)) = f {
        return Ok(Outcome::fail(cases, antisym_cx(pair, l, r, tshow, "A⋊W")));
    }

    // AW: the basis is a product of two bases, so triples are sampled.
    let aw_degree = p.degree.min(1);
    let mut ab = Vec::new();
    for a in monomials_up_to(shape, aw_degree) {
        for x in witt_basis_up_to(shape, aw_degree) {
            ab.push(AWElement::term(shape, a.clone(), x, scalar::one()));
        }
    }
    let mut rng = p.rng();
    let triples: Vec<[AWElement; 3]> = (0..p.trials)
        .map(|_| [0, 1, 2].map(|_| ab.choose(&mut rng).expect("nonempty basis").clone()))
        .collect();
    let results = crate::par_map(triples, |[a, b, c]| -> Result<(u64, Option<Counterexample>)> {
        let pa = a.parity().expect("basis element");
        let pb = b.parity().expect("basis element");
        let ab_ = aw_bracket(&a, &b)?;
        let ba = aw_bracket(&b, &a)?.scale(&-scalar::sign(koszul_negative(pa, pb)));
        if ab_ != ba {
            let cx = Counterexample::new(
                vec![format_aw(&a), format_aw(&b)],
                format_aw(&ab_),
                format_aw(&ba),
                "AW: [x,y] vs -(-1)^(|x||y|)[y,x]",
            );
            return Ok((1, Some(cx)));
        }
        let lhs = aw_bracket(&a, &aw_bracket(&b, &c)?)?;
        let rhs = aw_bracket(&ab_, &c)?
            .checked_add(&aw_bracket(&b, &aw_bracket(&a, &c)?)?.scale(&scalar::sign(koszul_negative(pa, pb))))?;
        if lhs != rhs {
            let cx = Counterexample::new(
                vec![format_aw(&a), format_aw(&b), format_aw(&c)],
                format_aw(&lhs),
                format_aw(&rhs),
                "AW: [a,[b,c]] vs [[a,b],c] + (-1)^(|a||b|)[b,[a,c]]",
            );
            return Ok((1, Some(cx)));
        }
        Ok((1, None))
    });
    let (c, f) = first_failure(results.into_iter().collect::<Result<Vec<_>>>()?);
    cases += c;
    details.insert("aw_samples".into(), json!(p.trials));
    Ok(Outcome::from_search(cases, f).with_details(details.into()))
}

/// Structure constants against the commutator of the two operators on `A`,
/// over every pair of basis fields in every shape up to `(m|n)`.
pub(super) fn check_bracket_oracle(p: &CheckParams) -> Result<Outcome> {
    let mut cases = 0;
    let mut shapes = Vec::new();
    for m in 0..=p.m {
        for n in 0..=p.n {
            if m + n > 0 {
                shapes.push(Shape::new(m, n));
            }
        }
    }
    for shape in &shapes {
        let shape = *shape;
        let basis = witt_basis_up_to(shape, p.degree);
        let results = crate::par_map(
            (0..basis.len()).collect(),
            |i| -> Result<(u64, Option<Counterexample>)> {
                let x = WittElement::basis(shape, basis[i].clone());
                for (k, yb) in basis.iter().enumerate() {
                    let y = WittElement::basis(shape, yb.clone());
                    let table = bracket_basis(shape, &basis[i], yb, p.bracket_mode);
                    let oracle = bracket_oracle(&x, &y)?;
                    if table != oracle {
                        let cx = Counterexample::new(
                            vec![format_witt(&x), format_witt(&y), format!("m={} n={}", shape.m, shape.n)],
                            format_witt(&table),
                            format_witt(&oracle),
                            "structure constants vs operator commutator",
                        );
                        return Ok((k as u64 + 1, Some(cx)));
                    }
                }
                Ok((basis.len() as u64, None))
            },
        );
        let (c, f) = first_failure(results.into_iter().collect::<Result<Vec<_>>>()?);
        cases += c;
        if f.is_some() {
            return Ok(Outcome::from_search(cases, f));
        }
    }
    let names: Vec<String> = shapes.iter().map(|s| format!("{}|{}", s.m, s.n)).collect();
    Ok(Outcome::pass(cases).with_details(json!({ "shapes": names })))
}

fn random_word(rng: &mut impl Rng, shape: Shape, max_len: usize) -> Vec<Atom> {
    let m = shape.m;
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len)
        .map(|_| {
            let even = shape.n == 0 || (shape.m > 0 && rng.gen_bool(0.5));
            let derivative = rng.gen_bool(0.5);
            match (even, derivative) {
                (true, true) => Atom::Dt(rng.gen_range(0..m)),
                (true, false) => Atom::Mul(Monomial::t(m, rng.gen_range(0..m))),
                (false, true) => Atom::Dxi(rng.gen_range(0..shape.n)),
                (false, false) => Atom::Mul(Monomial::xi(m, rng.gen_range(0..shape.n))),
            }
        })
        .collect()
}

/// Every defining relation normal-orders to zero, and normal ordering is
/// idempotent on seeded random words.
pub(super) fn check_weyl_relations(p: &CheckParams) -> Result<Outcome> {
    let shape = p.shape();
    let mut cases = 0;
    let relations = weyl_relations(shape);
    for (label, rel) in &relations {
        cases += 1;
        let nf = weyl_normal_order(rel)?;
        if !nf.is_zero() {
            let cx = Counterexample::new(
                vec![label.clone(), format_word(rel)],
                format_word(&nf.to_word()),
                "0",
                "relation does not normal-order to zero",
            );
            return Ok(Outcome::fail(cases, cx));
        }
    }
    let mut rng = p.rng();
    for _ in 0..p.trials {
        cases += 1;
        let coef = scalar::int(rng.gen_range(1..=5));
        let w = OperatorWord::word(shape, random_word(&mut rng, shape, p.degree)).scale(&coef);
        let once = weyl_normal_order(&w)?;
        let twice = weyl_normal_order(&once.to_word())?;
        if once != twice {
            let cx = Counterexample::new(
                vec![format_word(&w)],
                format_word(&once.to_word()),
                format_word(&twice.to_word()),
                "normal ordering is not idempotent",
            );
            return Ok(Outcome::fail(cases, cx));
        }
    }
    // The Clifford relation written with ξ_k ∂ξ_l instead of ξ_l ∂ξ_k is not
    // a relation once k ≠ l; record the witness.
    let control = (shape.n >= 2).then(|| {
        let w = verbatim_clifford(shape, 0, 1);
        let nf = weyl_normal_order(&w).expect("Weyl word");
        json!({ "word": format_word(&w), "normal_form": format_word(&nf.to_word()) })
    });
    Ok(Outcome::pass(cases).with_details(json!({
        "relations": relations.len(),
        "verbatim_clifford": control,
    })))
}

#[cfg(test)]
mod tests {
    use super::super::{run_check, CheckId, Status};
    use super::*;
    use crate::witt::BracketMode;

    fn small(id: CheckId, m: usize, n: usize, degree: usize) -> CheckParams {
        let mut p = CheckParams::defaults(id);
        p.m = m;
        p.n = n;
        p.a = vec!["1".into(); m];
        p.degree = degree;
        p.trials = p.trials.min(200);
        p
    }

    #[test]
    fn jacobi_small_and_mutated() {
        let r = run_check(CheckId::Jacobi, &small(CheckId::Jacobi, 1, 1, 1));
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        let r = run_check(CheckId::Jacobi, &small(CheckId::Jacobi, 1, 0, 2));
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        for k in 0..3 {
            let mut p = small(CheckId::Jacobi, 1, 1, 1);
            p.bracket_mode = BracketMode::Mutated(k);
            let r = run_check(CheckId::Jacobi, &p);
            assert_eq!(r.status, Status::Fail, "mutation {k}");
            assert_eq!(r.counterexample.unwrap().inputs.len(), 3, "mutation {k}");
        }
    }

    #[test]
    fn oracle_modes() {
        let p = small(CheckId::BracketOracle, 1, 1, 2);
        assert_eq!(run_check(CheckId::BracketOracle, &p).status, Status::Pass);
        let mut v = p.clone();
        v.bracket_mode = BracketMode::Verbatim;
        let r = run_check(CheckId::BracketOracle, &v);
        assert_eq!(r.status, Status::Fail);
        // Fields with constant coefficients bracket to zero.
        let mut d = p;
        d.degree = 0;
        assert_eq!(run_check(CheckId::BracketOracle, &d).status, Status::Pass);
    }

    #[test]
    fn weyl_small() {
        let r = run_check(CheckId::WeylRelations, &small(CheckId::WeylRelations, 1, 2, 4));
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        assert!(r.details.unwrap()["verbatim_clifford"].is_object());
    }
}
