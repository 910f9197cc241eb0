//! Browser bindings: bracket two expressions, list Whittaker vectors, and
//! tabulate weight multiplicities for a heatmap.

use serde_json::json;
use superwitt::expr::{bracket_exprs, infer_shape, parse_expr_with};
use superwitt::glmn::RepDescriptor;
use superwitt::scalar::parse_scalar;
use superwitt::whittaker::{weight_space_dim, whittaker_space, ModuleSpec};
use superwitt::witt::BracketMode;
use superwitt::{Result, Shape};
use wasm_bindgen::prelude::*;

fn module(m: usize, n: usize, a: &str, rep: &str) -> Result<ModuleSpec> {
    let shape = Shape::new(m, n);
    let a = a
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_scalar)
        .collect::<Result<Vec<_>>>()?;
    if a.len() != m {
        return Err(superwitt::Error::InvalidArgument(format!(
            "a needs {m} entries, got {}",
            a.len()
        )));
    }
    ModuleSpec::new(a, RepDescriptor::parse(rep)?.build(shape, None)?)
}

pub fn bracket_text(left: &str, right: &str) -> Result<String> {
    let shape = infer_shape(&[left, right])?;
    let x = parse_expr_with(left, shape, None)?;
    let y = parse_expr_with(right, shape, None)?;
    Ok(bracket_exprs(&x, &y, BracketMode::Corrected)?.to_string())
}

pub fn whittaker_lines(m: usize, n: usize, a: &str, rep: &str, window: usize) -> Result<Vec<String>> {
    let spec = module(m, n, a, rep)?;
    Ok(whittaker_space(&spec, window)?
        .iter()
        .map(ToString::to_string)
        .collect())
}

/// `dim M^r` for every `r` with `|r_i| <= radius`, as JSON
/// `{"m", "radius", "rank", "cells": [{"r": [..], "dim": k}]}`. Only
/// `m <= 2` fits on a plane.
pub fn weight_table(m: usize, n: usize, a: &str, rep: &str, radius: i64, window: usize) -> Result<String> {
    if !(1..=2).contains(&m) {
        return Err(superwitt::Error::InvalidArgument(
            "the heatmap needs m = 1 or m = 2".into(),
        ));
    }
    let spec = module(m, n, a, rep)?;
    let axis: Vec<i64> = (-radius..=radius).collect();
    let points: Vec<Vec<i64>> = if m == 1 {
        axis.iter().map(|&x| vec![x]).collect()
    } else {
        axis.iter()
            .flat_map(|&y| axis.iter().map(move |&x| vec![x, y]))
            .collect()
    };
    let mut cells = Vec::with_capacity(points.len());
    for r in points {
        let dim = weight_space_dim(&spec, &r, window)?;
        cells.push(json!({ "r": r, "dim": dim }));
    }
    let rank = (1usize << n) * spec.dim_v();
    Ok(json!({ "m": m, "radius": radius, "rank": rank, "cells": cells }).to_string())
}

fn js(e: superwitt::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn bracket(left: &str, right: &str) -> std::result::Result<String, JsError> {
    bracket_text(left, right).map_err(js)
}

#[wasm_bindgen(js_name = whittakerBasis)]
pub fn whittaker_basis(m: usize, n: usize, a: &str, rep: &str, window: usize) -> std::result::Result<String, JsError> {
    whittaker_lines(m, n, a, rep, window).map(|l| l.join("\n")).map_err(js)
}

#[wasm_bindgen(js_name = weightMultiplicities)]
pub fn weight_multiplicities(
    m: usize,
    n: usize,
    a: &str,
    rep: &str,
    radius: i32,
    window: usize,
) -> std::result::Result<String, JsError> {
    weight_table(m, n, a, rep, radius as i64, window).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_of_vector_fields() {
        assert_eq!(bracket_text("dt1", "t1*dt1").unwrap(), "dt1");
        assert!(bracket_text("dt1", "t1 +").is_err());
    }

    #[test]
    fn whittaker_vectors_of_natural_module() {
        assert_eq!(
            whittaker_lines(1, 1, "1", "natural", 2).unwrap(),
            vec!["1 @ e1", "1 @ e2"]
        );
        assert!(whittaker_lines(2, 1, "1", "natural", 2).is_err());
    }

    #[test]
    fn heatmap_is_flat() {
        let v: serde_json::Value = serde_json::from_str(&weight_table(2, 1, "1,1", "natural", 1, 2).unwrap()).unwrap();
        let cells = v["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 9);
        assert!(cells.iter().all(|c| c["dim"] == v["rank"]));
        assert_eq!(v["rank"], 6);
    }
}
