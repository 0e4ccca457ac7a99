//! Browser bindings for the interactive demo page (`www/index.html`).
//!
//! Three operations are exported, each taking and returning JSON strings so
//! the page needs no binding glue beyond `JSON.parse`. Errors come back as
//! `{"error": "..."}` rather than exceptions. All arithmetic stays exact on
//! the Rust side; decimal companions are attached for drawing only.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use hyperconvo::axioms::{haar, verify_hypergroup};
use hyperconvo::deformation::{build_max_deformation, u_from_v, VSequence};
use hyperconvo::duality::{
    character_table, dual_convolution_closed, dual_convolution_solve, BetaSequence, DualPoint,
};
use hyperconvo::rational::Rational;

fn err(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Reads the weight sequence selected by the page: either the one-parameter
/// family (`{"a": "1/3", "window": N}`) or explicit weights
/// (`{"v": ["1", "2", ...]}`).
fn v_from_request(request: &Value) -> Result<VSequence, String> {
    if let Some(a_text) = request.get("a").and_then(Value::as_str) {
        let window = request
            .get("window")
            .and_then(Value::as_u64)
            .ok_or("missing window")? as usize;
        let a = Rational::parse(a_text).map_err(|e| e.to_string())?;
        return VSequence::dunkl_ramirez(&a, window).map_err(|e| e.to_string());
    }
    if let Some(values) = request.get("v").and_then(Value::as_array) {
        let parsed: Result<Vec<Rational>, String> = values
            .iter()
            .map(|v| {
                let text = v.as_str().ok_or("v entries must be strings")?;
                Rational::parse(text).map_err(|e| e.to_string())
            })
            .collect();
        return VSequence::new(parsed?).map_err(|e| e.to_string());
    }
    Err("request needs either \"a\" + \"window\" or \"v\"".into())
}

fn rational_pair(r: &Rational) -> Value {
    json!({ "exact": r.to_string(), "approx": r.to_f64() })
}

fn deformation_summary_impl(request: &str) -> Result<String, String> {
    let request: Value = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let v = v_from_request(&request)?;
    let structure = build_max_deformation(&v).map_err(|e| e.to_string())?;
    let window = v.last_index();

    let verification = verify_hypergroup(&structure, window);
    let lambda = haar(&structure).map_err(|e| e.to_string())?;
    let u = u_from_v(&v);

    let diagonals: Vec<Value> = (1..=window)
        .map(|n| {
            let q = structure.diagonal(n).expect("in window");
            json!({
                "n": n,
                "weights": q.iter()
                    .map(|(j, w)| json!({ "at": j, "weight": rational_pair(w) }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();

    Ok(json!({
        "window": window,
        "v": v.values().iter().map(rational_pair).collect::<Vec<_>>(),
        "u": u.values().iter().map(rational_pair).collect::<Vec<_>>(),
        "haar": (0..=window)
            .map(|n| rational_pair(lambda.get(n).expect("complete")))
            .collect::<Vec<_>>(),
        "diagonals": diagonals,
        "verified": verification.all_pass(),
        "triples_checked": verification.triples_checked,
    })
    .to_string())
}

fn character_table_impl(request: &str) -> Result<String, String> {
    let request: Value = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let v = v_from_request(&request)?;
    let table = character_table(&v);
    let rows: Vec<Value> = table
        .iter_rows()
        .map(|(point, row)| {
            json!({
                "label": match point {
                    DualPoint::Finite(k) => format!("chi_{k}"),
                    DualPoint::Infinity => "chi_inf".to_string(),
                },
                "values": row.iter().map(rational_pair).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({ "points": table.points(), "rows": rows }).to_string())
}

fn dual_convolution_impl(request: &str) -> Result<String, String> {
    let request: Value = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let v = v_from_request(&request)?;
    let beta = BetaSequence::from_v(&v);
    let parse_point = |key: &str| -> Result<DualPoint, String> {
        match request.get(key) {
            None => Err(format!("missing {key}")),
            Some(Value::Number(n)) => Ok(DualPoint::Finite(n.as_u64().ok_or("bad index")? as usize)),
            Some(Value::String(s)) => s.parse().map_err(|e: hyperconvo::Error| e.to_string()),
            Some(_) => Err(format!("bad {key}")),
        }
    };
    let m = parse_point("m")?;
    let n = parse_point("n").unwrap_or(m);
    let trunc = request.get("trunc").and_then(Value::as_u64).unwrap_or(16) as usize;

    let measure = dual_convolution_closed(m, n, &beta, trunc).map_err(|e| e.to_string())?;
    let solve_agrees = match (m, n) {
        (DualPoint::Finite(a), DualPoint::Finite(b)) if a == b => {
            let solved = dual_convolution_solve(a, &beta, trunc).map_err(|e| e.to_string())?;
            Some(solved.gamma == measure.gamma && solved.tail_mass == measure.tail_mass)
        }
        _ => None,
    };
    Ok(json!({
        "m": m.to_string(),
        "n": n.to_string(),
        "trunc": trunc,
        "gamma": measure.gamma.iter()
            .map(|(j, g)| json!({ "at": j, "weight": rational_pair(g) }))
            .collect::<Vec<_>>(),
        "tail_mass": rational_pair(&measure.tail_mass),
        "infinity_mass": rational_pair(&measure.infinity_mass),
        "self_atom": measure.self_atom,
        "solve_agrees": solve_agrees,
    })
    .to_string())
}

/// Builds the deformation for the requested weights, verifies the axioms on
/// the whole window, and returns diagonals, Haar weights and increments.
#[wasm_bindgen]
pub fn deformation_summary(request: &str) -> String {
    deformation_summary_impl(request).unwrap_or_else(err)
}

/// The character table for the requested weights.
#[wasm_bindgen]
pub fn characters(request: &str) -> String {
    character_table_impl(request).unwrap_or_else(err)
}

/// One dual convolution `δ_{χ_m} * δ_{χ_n}`, expanded exactly with tail
/// mass, cross-checked against the triangular solve on the diagonal.
#[wasm_bindgen]
pub fn dual_convolution(request: &str) -> String {
    dual_convolution_impl(request).unwrap_or_else(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_for_the_one_parameter_family() {
        let out = deformation_summary(r#"{ "a": "1/3", "window": 6 }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert!(value.get("error").is_none(), "{out}");
        assert_eq!(value["verified"], true);
        assert_eq!(value["haar"][2]["exact"], "6");
        assert_eq!(value["diagonals"][0]["weights"][0]["weight"]["exact"], "1/2");
    }

    #[test]
    fn summary_for_explicit_weights() {
        let out = deformation_summary(r#"{ "v": ["1", "2", "3"] }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["verified"], true);
        assert_eq!(value["u"][1]["exact"], "0");
    }

    #[test]
    fn invalid_weights_come_back_as_error_objects() {
        let out = deformation_summary(r#"{ "v": ["1", "1", "1"] }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert!(value["error"].as_str().unwrap().contains("/values/2"));
    }

    #[test]
    fn character_rows() {
        let out = characters(r#"{ "a": "1/3", "window": 4 }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["rows"][0]["values"][1]["exact"], "-1/2");
        assert_eq!(value["rows"][4]["label"], "chi_inf");
    }

    #[test]
    fn dual_convolution_decay() {
        let out =
            dual_convolution(r#"{ "a": "1/2", "window": 20, "m": 0, "trunc": 8 }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["gamma"][0]["weight"]["exact"], "1/2");
        assert_eq!(value["tail_mass"]["exact"], "1/256");
        assert_eq!(value["solve_agrees"], true);
        assert_eq!(value["self_atom"], false);
    }

    #[test]
    fn dual_min_rule() {
        let out = dual_convolution(r#"{ "a": "1/3", "window": 10, "m": 2, "n": 7 }"#);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["gamma"][0]["at"], 2);
        assert_eq!(value["tail_mass"]["exact"], "0");
    }
}
