//! Browser bindings: each export takes plain strings or numbers and
//! returns a JSON string.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use triortho_core::distance::{d_max_table, z_distance};
use triortho_core::level3::is_level3_divisible;
use triortho_core::magic::{run_shots, Convention, ProtocolConfig, Variant};
use triortho_core::triortho::{even_descendant, indicator_to_generator, DescendantCode, Parity};
use triortho_core::RMPolynomial;

const CAP: usize = 5;
/// Keeps the page responsive.
const MAX_VARS: usize = 7;
const MAX_SHOTS: usize = 20_000;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn error(e: impl ToString) -> String {
    to_json(&json!({ "error": e.to_string() }))
}

fn distances(s: &triortho_core::triortho::TriorthogonalSpace, parity: Parity) -> Result<Vec<Option<usize>>, String> {
    Ok(d_max_table(s, parity, CAP).map_err(|e| e.to_string())?.into_values().map(|d| d.value).collect())
}

/// Weight, divisibility and best descendant distances of the space with
/// indicator polynomial `poly` on `m` variables.
#[wasm_bindgen]
pub fn analyze_polynomial(poly: &str, m: usize) -> String {
    let run = || -> Result<String, String> {
        if !(4..=MAX_VARS).contains(&m) {
            return Err(format!("m must be between 4 and {MAX_VARS}"));
        }
        let p = RMPolynomial::parse(poly, Some(m)).map_err(|e| e.to_string())?;
        let s = indicator_to_generator(&p).map_err(|e| e.to_string())?;
        let div = is_level3_divisible(&s);
        Ok(to_json(&json!({
            "polynomial": p.to_string(),
            "c": s.c(),
            "r": s.r(),
            "unital": s.is_unital(),
            "divisible_level3": div.divisible,
            "witness": div.witness,
            "dmax_even": distances(&s, Parity::Even)?,
            "dmax_odd": distances(&s, Parity::Odd)?,
        })))
    };
    run().unwrap_or_else(error)
}

/// Verifies a `G1 --- G0` matrix and computes its Z distance.
#[wasm_bindgen]
pub fn check_code(text: &str) -> String {
    match DescendantCode::parse(text) {
        Ok(code) => {
            let d = z_distance(&code, CAP).ok().and_then(|d| d.value);
            to_json(&json!({ "triorthogonal": true, "n": code.n(), "k": code.k(), "d": d, "cap": CAP }))
        }
        Err(triortho_core::Error::NotTriorthogonal) => to_json(&json!({ "triorthogonal": false })),
        Err(e) => error(e),
    }
}

/// Runs the 15-to-1 protocol on the shortest descendant of the
/// 16-column space.
#[wasm_bindgen]
pub fn simulate_15_to_1(shots: usize, noise: f64, seed: u64, delayed: bool) -> String {
    let run = || -> Result<String, String> {
        if !(0.0..=1.0).contains(&noise) {
            return Err("noise must lie in [0, 1]".into());
        }
        let s = indicator_to_generator(&RMPolynomial::one(4)).map_err(|e| e.to_string())?;
        let code = even_descendant(&s, &[0]).map_err(|e| e.to_string())?;
        let variant = if delayed { Variant::Delayed } else { Variant::Standard };
        let config = ProtocolConfig { variant, noise, convention: Convention::Minus };
        let summary = run_shots(&code, &config, shots.min(MAX_SHOTS), seed).map_err(|e| e.to_string())?;
        Ok(to_json(&summary))
    };
    run().unwrap_or_else(error)
}
