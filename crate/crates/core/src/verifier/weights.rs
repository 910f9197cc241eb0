//! Checks built on the elements `w^{r,j,∂,∂′}_{α,β,I,J}` and on the weight
//! quotients `M^r`.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::json;

use super::{first_failure, random_element, CheckParams, Counterexample, Outcome};
use crate::error::{Error, Result};
use crate::expr::{format_tensor, format_witt, format_word};
use crate::operator::{w_element, w_recurrence_defect, Atom, OperatorWord, WParams};
use crate::scalar::{self, Scalar};
use crate::superalgebra::{exponents_up_to, OddSet, Shape};
use crate::whittaker::{
    act_generator, act_word, weight_space_dim, weighting_act, weighting_reduce, ModuleSpec, PbwBasis, WeightCoset,
    Window,
};
use crate::witt::{witt_basis_up_to, DerSlot, WittBasis, WittElement};

fn slot_name(s: DerSlot) -> String {
    match s {
        DerSlot::T(i) => format!("dt{}", i + 1),
        DerSlot::Xi(j) => format!("dx{}", j + 1),
    }
}

/// Table key `"∂,∂′,j"`, e.g. `"dt1,dx1,j1"`.
fn table_key(left: DerSlot, right: DerSlot, j: usize) -> String {
    format!("{},{},j{}", slot_name(left), slot_name(right), j + 1)
}

fn describe(p: &WParams) -> String {
    format!(
        "w(r={}, j={}, alpha={:?}, beta={:?}, I={:?}, J={:?}, {}, {})",
        p.r,
        p.j + 1,
        p.alpha.as_slice(),
        p.beta.as_slice(),
        p.left_odd.iter().map(|k| k + 1).collect::<Vec<_>>(),
        p.right_odd.iter().map(|k| k + 1).collect::<Vec<_>>(),
        slot_name(p.left),
        slot_name(p.right),
    )
}

/// Every `w`-parameter with `r = 0` and `|α|, |β| <= degree`.
fn w_grid(shape: Shape, degree: usize) -> Vec<WParams> {
    let m = shape.m;
    let mut out = Vec::new();
    for j in 0..m {
        for left in DerSlot::all(shape) {
            for right in DerSlot::all(shape) {
                for alpha in exponents_up_to(m, degree) {
                    for beta in exponents_up_to(m, degree) {
                        for left_odd in OddSet::all(shape.n) {
                            for right_odd in OddSet::all(shape.n) {
                                out.push(WParams {
                                    alpha: alpha.clone(),
                                    beta: beta.clone(),
                                    left_odd,
                                    right_odd,
                                    r: 0,
                                    j,
                                    left,
                                    right,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The recurrence `w^r_{α+e_j,β} − w^r_{α,β+e_j} = w^{r+1}_{α,β}` as formal
/// words and, term by term, as operators on the window.
pub(super) fn check_w_recurrence(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let vecs = Window::for_spec(&spec, p.window).spanning_set();
    let mut jobs = Vec::new();
    for base in w_grid(shape, p.degree) {
        for r in 0..=p.r_max {
            jobs.push(WParams { r, ..base.clone() });
        }
    }
    let results = crate::par_map(jobs, |w| -> Result<(u64, Option<Counterexample>)> {
        let defect = w_recurrence_defect(shape, &w)?;
        if !defect.is_zero() {
            let cx = Counterexample::new(
                vec![describe(&w)],
                format_word(&defect),
                "0",
                "formal recurrence defect",
            );
            return Ok((1, Some(cx)));
        }
        let mut left = w.clone();
        left.alpha = w.alpha.with_added(w.j, 1);
        let mut right = w.clone();
        right.beta = w.beta.with_added(w.j, 1);
        let mut next = w.clone();
        next.r += 1;
        let (lw, rw, nw) = (
            w_element(shape, &left)?,
            w_element(shape, &right)?,
            w_element(shape, &next)?,
        );
        for v in &vecs {
            let lhs = act_word(&spec, &lw, v)?.checked_sub(&act_word(&spec, &rw, v)?)?;
            let rhs = act_word(&spec, &nw, v)?;
            if lhs != rhs {
                let cx = Counterexample::new(
                    vec![describe(&w), format_tensor(v)],
                    format_tensor(&lhs),
                    format_tensor(&rhs),
                    "operator recurrence on the window",
                );
                return Ok((1 + vecs.len() as u64, Some(cx)));
            }
        }
        Ok((1 + vecs.len() as u64, None))
    });
    let (c, f) = first_failure(results.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(Outcome::from_search(c, f))
}

/// Smallest `r <= r_max` for which `kills(r)` holds, or the witness for
/// `r_max` when none does.
fn minimal_r<W>(r_max: u32, mut kills: impl FnMut(u32) -> Result<Option<W>>) -> Result<std::result::Result<u32, W>> {
    let mut last = None;
    for r in 0..=r_max {
        match kills(r)? {
            None => return Ok(Ok(r)),
            Some(w) => last = Some(w),
        }
    }
    Ok(Err(last.expect("r_max >= 0 runs at least once")))
}

type Table = BTreeMap<String, u32>;

/// Mode (i): `w` acting on the untwisted weight module `T(A, V)`.
fn annihilation_on_module(
    p: &CheckParams,
    spec: &ModuleSpec,
) -> Result<(u64, std::result::Result<Table, Counterexample>)> {
    let shape = spec.shape();
    let vecs = Window::for_spec(spec, p.window).spanning_set();
    let grid = w_grid(shape, p.degree);
    let results = crate::par_map(
        grid,
        |w| -> Result<(u64, String, std::result::Result<u32, Counterexample>)> {
            let mut cases = 0;
            let found = minimal_r(p.r_max, |r| {
                let wr = w_element(shape, &WParams { r, ..w.clone() })?;
                for v in &vecs {
                    cases += 1;
                    let y = act_word(spec, &wr, v)?;
                    if !y.is_zero() {
                        let cx = Counterexample::new(
                            vec![describe(&WParams { r, ..w.clone() }), format_tensor(v)],
                            format_tensor(&y),
                            "0",
                            format!("no r <= {} annihilates the window", p.r_max),
                        );
                        return Ok(Some(cx));
                    }
                }
                Ok(None)
            })?;
            Ok((cases, table_key(w.left, w.right, w.j), found))
        },
    );
    collect_table(results)
}

/// Cases run, table key, and the minimal `r` or the failure at `r_max`.
type Entry = (u64, String, std::result::Result<u32, Counterexample>);

fn collect_table(results: Vec<Result<Entry>>) -> Result<(u64, std::result::Result<Table, Counterexample>)> {
    let mut table = Table::new();
    let mut cases = 0;
    for res in results {
        let (c, key, found) = res?;
        cases += c;
        match found {
            Ok(r) => {
                let e = table.entry(key).or_insert(0);
                *e = (*e).max(r);
            }
            Err(cx) => return Ok((cases, Err(cx))),
        }
    }
    Ok((cases, Ok(table)))
}

fn add_coords(acc: &mut [Scalar], c: &WeightCoset, k: &Scalar) {
    for (a, v) in acc.iter_mut().zip(&c.coords) {
        *a += v * k;
    }
}

/// Mode (ii): `w` acting on the weight spaces `M^s` of `𝔚(M)` for
/// `M = T(A^a, V)`, from every unit coset with `s ∈ {−1, 0, 1}^m`.
fn annihilation_on_cosets(
    p: &CheckParams,
    spec: &ModuleSpec,
    degree: usize,
) -> Result<(u64, std::result::Result<Table, Counterexample>)> {
    let shape = spec.shape();
    let m = shape.m;
    let pbw = PbwBasis::new(spec, degree + p.r_max as usize)?;
    let units = pbw.units().len();
    let weights: Vec<Vec<i64>> = exponents_up_to(m, 2 * m)
        .into_iter()
        .filter(|e| e.as_slice().iter().all(|&x| x <= 2))
        .map(|e| e.as_slice().iter().map(|&x| x as i64 - 1).collect())
        .collect();
    let grid = w_grid(shape, degree);
    let results = crate::par_map(
        grid,
        |w| -> Result<(u64, String, std::result::Result<u32, Counterexample>)> {
            let mut cases = 0;
            let found = minimal_r(p.r_max, |r| {
                for s in &weights {
                    for u in 0..units {
                        cases += 1;
                        let start = WeightCoset::unit(s.clone(), units, u);
                        let mut acc = vec![scalar::zero(); units];
                        let mut target = None;
                        for i in 0..=r {
                            let c = scalar::sign(i % 2 == 1) * scalar::binomial(r, i);
                            let x = WittBasis::new(
                                crate::Monomial::new(w.alpha.with_added(w.j, r - i), w.left_odd),
                                w.left,
                            );
                            let y =
                                WittBasis::new(crate::Monomial::new(w.beta.with_added(w.j, i), w.right_odd), w.right);
                            let out = weighting_act(&pbw, &x, &weighting_act(&pbw, &y, &start)?)?;
                            add_coords(&mut acc, &out, &c);
                            target = Some(out.weight);
                        }
                        if acc.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                            let coset = WeightCoset {
                                weight: target.unwrap_or_default(),
                                coords: acc,
                            };
                            let cx = Counterexample::new(
                                vec![
                                    describe(&WParams { r, ..w.clone() }),
                                    format!("u{} at weight {:?}", u + 1, s),
                                ],
                                format_tensor(&coset.lift(&pbw)),
                                "0",
                                format!("no r <= {} annihilates the weight cosets", p.r_max),
                            );
                            return Ok(Some(cx));
                        }
                    }
                }
                Ok(None)
            })?;
            Ok((cases, table_key(w.left, w.right, w.j), found))
        },
    );
    collect_table(results)
}

/// Existence of a finite annihilating `r` for every `(∂, ∂′, j)`, with the
/// minimal values reported as tables for both modes.
pub(super) fn check_w_annihilation(p: &CheckParams) -> Result<Outcome> {
    let base = p.module_spec()?;
    let shape = base.shape();
    if !base.rep().has_weight_basis() {
        return Err(Error::InvalidArgument(
            "w-annihilation needs a representation with a weight basis".into(),
        ));
    }
    let untwisted = base.with_a(vec![scalar::zero(); shape.m])?;
    let (c1, t1) = annihilation_on_module(p, &untwisted)?;
    let mode_i = match t1 {
        Ok(t) => t,
        Err(cx) => return Ok(Outcome::fail(c1, cx)),
    };
    let (c2, mode_ii) = if base.non_singular() {
        let (c, t) = annihilation_on_cosets(p, &base, p.degree.min(1))?;
        match t {
            Ok(t) => (c, json!(t)),
            Err(cx) => return Ok(Outcome::fail(c1 + c, cx)),
        }
    } else {
        (0, json!("skipped: singular Whittaker type"))
    };
    Ok(Outcome::pass(c1 + c2).with_details(json!({
        "minimal_r": { "mode_i": mode_i, "mode_ii": mode_ii },
    })))
}

/// `dim M^r = 2^n dim V` on the box `|r_i| <= degree`, plus seeded spot
/// checks that reduction and the coset action ignore the representative.
pub(super) fn check_weighting_bounded(p: &CheckParams) -> Result<Outcome> {
    let spec = p.module_spec()?;
    let shape = spec.shape();
    let m = shape.m;
    let rank = (1usize << shape.n) * spec.dim_v();
    let d = p.degree as u32;
    let weights: Vec<Vec<i64>> = exponents_up_to(m, 2 * p.degree * m)
        .into_iter()
        .filter(|e| e.as_slice().iter().all(|&x| x <= 2 * d))
        .map(|e| e.as_slice().iter().map(|&x| x as i64 - p.degree as i64).collect())
        .collect();
    let dims = crate::par_map(weights.clone(), |r| weight_space_dim(&spec, &r, p.window));
    let mut cases = 0;
    for (r, dim) in weights.iter().zip(dims) {
        cases += 1;
        let dim = dim?;
        if dim != rank {
            let cx = Counterexample::new(
                vec![format!("r={r:?}"), format!("D={}", p.window)],
                format!("dim M^r = {dim}"),
                format!("2^n dim V = {rank}"),
                "weight space dimension",
            );
            return Ok(Outcome::fail(cases, cx));
        }
    }
    if p.window == 0 || m == 0 {
        return Ok(Outcome::pass(cases).with_details(json!({ "rank": rank })));
    }
    let pbw = PbwBasis::new(&spec, p.window)?;
    let lower = Window::for_spec(&spec, p.window - 1);
    let fields: Vec<WittBasis> = witt_basis_up_to(shape, 1);
    let mut rng = p.rng();
    for _ in 0..p.trials {
        cases += 1;
        let s = weights[rng.gen_range(0..weights.len())].clone();
        let x = random_element(&mut rng, &lower, 4);
        let y = random_element(&mut rng, &lower, 4);
        let i = rng.gen_range(0..m);
        let mut shifted = x.clone();
        shifted.add_assign(&act_generator(&spec, &crate::whittaker::cartan(m, i), &y)?);
        shifted.add_scaled(&y, &-scalar::int(s[i]));
        let cx0 = weighting_reduce(&pbw, &x, &s)?;
        let cx1 = weighting_reduce(&pbw, &shifted, &s)?;
        if cx0 != cx1 {
            let cx = Counterexample::new(
                vec![format_tensor(&x), format_tensor(&shifted), format!("r={s:?}")],
                format_tensor(&cx0.lift(&pbw)),
                format_tensor(&cx1.lift(&pbw)),
                "reduction depends on the representative",
            );
            return Ok(Outcome::fail(cases, cx));
        }
        let g = &fields[rng.gen_range(0..fields.len())];
        let via_coset = weighting_act(&pbw, g, &cx0)?;
        let direct = weighting_reduce(
            &pbw,
            &act_word(&spec, &OperatorWord::atom(shape, Atom::Witt(g.clone())), &x)?,
            &via_coset.weight,
        )?;
        if via_coset != direct {
            let gx = WittElement::basis(shape, g.clone());
            let cx = Counterexample::new(
                vec![format_witt(&gx), format_tensor(&x), format!("r={s:?}")],
                format_tensor(&via_coset.lift(&pbw)),
                format_tensor(&direct.lift(&pbw)),
                "coset action depends on the representative",
            );
            return Ok(Outcome::fail(cases, cx));
        }
    }
    Ok(Outcome::pass(cases).with_details(json!({ "rank": rank, "weights": weights.len() })))
}

#[cfg(test)]
mod tests {
    use super::super::{run_check, CheckId, Status};
    use super::*;

    #[test]
    fn recurrence_small() {
        let mut p = CheckParams::defaults(CheckId::WRecurrence);
        p.window = 2;
        p.r_max = 2;
        let r = run_check(CheckId::WRecurrence, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
    }

    #[test]
    fn annihilation_and_control() {
        let mut p = CheckParams::defaults(CheckId::WAnnihilation);
        p.degree = 1;
        p.window = 1;
        let r = run_check(CheckId::WAnnihilation, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.r_max = 0;
        assert_eq!(run_check(CheckId::WAnnihilation, &p).status, Status::Fail);
    }

    #[test]
    fn weighting_small() {
        let mut p = CheckParams::defaults(CheckId::WeightingBounded);
        p.degree = 1;
        p.trials = 5;
        let r = run_check(CheckId::WeightingBounded, &p);
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        p.rep = "trivial".into();
        p.n = 0;
        let r = run_check(CheckId::WeightingBounded, &p);
        assert_eq!(r.details.unwrap()["rank"], json!(1));
    }
}
