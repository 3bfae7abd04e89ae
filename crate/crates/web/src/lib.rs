//! Browser bindings for the phase-diagram explorer.
//!
//! Every export returns a `String` (JSON or SVG) and reports failures as
//! `{"error": "..."}`, so the same functions run natively in tests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use hlx_core::normest::{estimate_norm, AscentConfig, MethodChoice, NormPolicy};
use hlx_core::plot::phase_diagram_svg;
use hlx_core::theory::{classify_with, constants_table, DEFAULT_EPSILON};
use hlx_core::{ExtendedReal, Family, ParamPoint, ScalarField};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Entry budget for tensors built in the page.
pub const BROWSER_ENTRY_BUDGET: usize = 1 << 20;

/// Restarts used by the browser norm explorer.
pub const BROWSER_RESTARTS: usize = 16;

fn error_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| format!("{what}: {e}"))
}

fn classify_inner(m: u32, r: f64, p: &str, field: &str) -> Result<Value, String> {
    let p: ExtendedReal = parse(p, "p")?;
    let field: ScalarField = parse(field, "field")?;
    let pt = ParamPoint::new(m, r, p).map_err(|e| e.to_string())?;
    let verdict = classify_with(&pt, field, DEFAULT_EPSILON);
    let mut v = serde_json::to_value(verdict).map_err(|e| e.to_string())?;
    v["constant"] = json!(constants_table(&pt, field));
    Ok(v)
}

/// Region, exponent window and constant for `(m, r, p)`; `p` may be `"inf"`.
#[wasm_bindgen]
pub fn classify_point(m: u32, r: f64, p: &str, field: &str) -> String {
    match classify_inner(m, r, p, field) {
        Ok(v) => v.to_string(),
        Err(e) => error_json(e),
    }
}

/// SVG map of the `(p, r)` plane for degree `m`.
#[wasm_bindgen]
pub fn phase_diagram(m: u32, r_max: f64, p_max: f64, cells: u32) -> String {
    if m < 2 || !(r_max > 1.0) || !(p_max > 1.0) {
        return error_json("need m ≥ 2, r_max > 1 and p_max > 1");
    }
    phase_diagram_svg(m, r_max, p_max, cells as usize)
}

fn norm_inner(family: &str, m: u32, n: u32, p: &str, seed: u32, method: &str) -> Result<Value, String> {
    let family: Family = parse(family, "family")?;
    let p: ExtendedReal = parse(p, "p")?;
    let method: MethodChoice = parse(method, "method")?;
    let t = family
        .build(m as usize, n as usize, ScalarField::Real, seed as u64, BROWSER_ENTRY_BUDGET)
        .map_err(|e| e.to_string())?;
    let policy = NormPolicy {
        ascent: AscentConfig { restarts: BROWSER_RESTARTS, seed: seed as u64, ..Default::default() },
        ..Default::default()
    };
    let est = estimate_norm(&t, p, method, &policy).map_err(|e| e.to_string())?;
    Ok(json!({
        "value": est.value,
        "method": est.method,
        "is_exact": est.is_exact,
        "converged": est.converged,
        "witness": est.witness,
    }))
}

/// Operator norm of a generated real form on the ℓ_p ball.
#[wasm_bindgen]
pub fn operator_norm(family: &str, m: u32, n: u32, p: &str, seed: u32, method: &str) -> String {
    match norm_inner(family, m, n, p, seed, method) {
        Ok(v) => v.to_string(),
        Err(e) => error_json(e),
    }
}
