//! JSON input formats.
//!
//! Two document kinds are accepted, both tagged `"schema": "hyperconvo/1"`:
//!
//! Semigroup tables:
//!
//! ```json
//! { "schema": "hyperconvo/1",
//!   "elements": ["0", "1", "2"], "identity": 0,
//!   "table": [[0,1,2],[1,1,2],[2,2,2]], "sentinel": null }
//! ```
//!
//! Deformation specs:
//!
//! ```json
//! { "schema": "hyperconvo/1",
//!   "base": "zplus:8",
//!   "kind": "v",
//!   "values": ["1", "2", "6", "18", ...],
//!   "window": 8 }
//! ```
//!
//! `base` is either a named table (`"zmax:K"`, `"zplus:N"`, `"ex2.2:R"`,
//! `"ex2.3:W"`, `"maxsum:T,W"`) or a path to a semigroup JSON file,
//! resolved by the caller-supplied loader. `kind` selects how `values` are
//! read: `"v"` / `"u"` weight sequences, `"dunkl_ramirez"` with
//! `values: ["a"]`, `"raw"` with `values` an object mapping element indices
//! to measures, or `"chebyshev1"` / `"chebyshev2"` (no base, `window`
//! required). Validation failures carry a JSON-pointer location.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::deformation::{
    build_chebyshev, v_from_u, ConvolutionStructure, DeformationSpec, USequence, VSequence,
};
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::rational::Rational;
use crate::semigroup::{build_named_example, SemigroupTable};
use crate::SCHEMA;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemigroupFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub elements: Vec<String>,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub sentinel: Option<usize>,
}

fn check_schema(schema: &Option<String>) -> Result<()> {
    match schema {
        None => Ok(()),
        Some(s) if s == SCHEMA => Ok(()),
        Some(s) => Err(Error::invalid(
            "/schema",
            format!("unsupported schema {s:?}, expected {SCHEMA:?}"),
        )),
    }
}

pub fn semigroup_from_json(text: &str) -> Result<SemigroupTable> {
    let file: SemigroupFile = serde_json::from_str(text)
        .map_err(|e| Error::invalid("/", format!("malformed JSON: {e}")))?;
    check_schema(&file.schema)?;
    SemigroupTable::new(file.elements, file.identity, file.table, file.sentinel)
}

pub fn semigroup_to_json(table: &SemigroupTable) -> String {
    let file = SemigroupFile {
        schema: Some(SCHEMA.to_string()),
        elements: table.names().to_vec(),
        identity: table.identity(),
        table: (0..table.len())
            .map(|m| (0..table.len()).map(|n| table.product(m, n)).collect())
            .collect(),
        sentinel: table.sentinel(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// A base reference: named example with parameters, or a file path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseRef {
    Named { name: String, params: Vec<usize> },
    Path(String),
}

/// `"zmax:4"` → named; anything ending in `.json` → path.
pub fn parse_base_ref(s: &str) -> Result<BaseRef> {
    if s.ends_with(".json") {
        return Ok(BaseRef::Path(s.to_string()));
    }
    let (name, params) = match s.split_once(':') {
        None => (s, Vec::new()),
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .map(|p| {
                    p.trim().parse::<usize>().map_err(|_| {
                        Error::invalid("/base", format!("bad parameter {p:?} in base {s:?}"))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            (name, params)
        }
    };
    Ok(BaseRef::Named {
        name: name.to_string(),
        params,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformationSpecFile {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub base: Option<String>,
    pub kind: String,
    #[serde(default)]
    pub values: serde_json::Value,
    #[serde(default)]
    pub window: Option<usize>,
}

/// A fully resolved input: the structure to verify, plus the deformation
/// data when the input was a deformation (Chebyshev fixtures have none) and
/// the weight sequence when one parameterizes it.
#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub kind: String,
    pub structure: ConvolutionStructure,
    pub spec: Option<DeformationSpec>,
    pub v: Option<VSequence>,
}

fn rationals_from_values(values: &serde_json::Value, pointer: &str) -> Result<Vec<Rational>> {
    let arr = values
        .as_array()
        .ok_or_else(|| Error::invalid(pointer, "expected an array of rationals"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                _ => {
                    return Err(Error::invalid(
                        format!("{pointer}/{i}"),
                        "expected a rational string or integer",
                    ))
                }
            };
            Rational::parse(&text)
                .map_err(|e| Error::invalid(format!("{pointer}/{i}"), e.to_string()))
        })
        .collect()
}

fn raw_q_from_values(
    values: &serde_json::Value,
) -> Result<BTreeMap<usize, FiniteMeasure>> {
    let obj = values.as_object().ok_or_else(|| {
        Error::invalid(
            "/values",
            "raw specs map element indices to measures, e.g. {\"1\": {\"0\": \"1/2\", \"1\": \"1/2\"}}",
        )
    })?;
    let mut q = BTreeMap::new();
    for (key, measure) in obj {
        let n: usize = key.parse().map_err(|_| {
            Error::invalid(format!("/values/{key}"), "key must be an element index")
        })?;
        let entries = measure.as_object().ok_or_else(|| {
            Error::invalid(
                format!("/values/{key}"),
                "expected an object mapping indices to rationals",
            )
        })?;
        let mut parsed = Vec::new();
        for (j_key, w) in entries {
            let j: usize = j_key.parse().map_err(|_| {
                Error::invalid(
                    format!("/values/{key}/{j_key}"),
                    "key must be an element index",
                )
            })?;
            let text = match w {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(num) => num.to_string(),
                _ => {
                    return Err(Error::invalid(
                        format!("/values/{key}/{j_key}"),
                        "expected a rational string or integer",
                    ))
                }
            };
            let weight = Rational::parse(&text)
                .map_err(|e| Error::invalid(format!("/values/{key}/{j_key}"), e.to_string()))?;
            parsed.push((j, weight));
        }
        q.insert(
            n,
            FiniteMeasure::from_entries(parsed)
                .map_err(|e| Error::invalid(format!("/values/{key}"), e.to_string()))?,
        );
    }
    Ok(q)
}

fn resolve_base(
    file: &DeformationSpecFile,
    default_window: Option<usize>,
    load: &dyn Fn(&str) -> Result<String>,
) -> Result<SemigroupTable> {
    match &file.base {
        Some(base) => match parse_base_ref(base)? {
            BaseRef::Named { name, params } => build_named_example(&name, &params),
            BaseRef::Path(path) => semigroup_from_json(&load(&path)?),
        },
        None => {
            let window = file.window.or(default_window).ok_or_else(|| {
                Error::invalid("/window", "window is required when base is omitted")
            })?;
            build_named_example("zplus", &[window])
        }
    }
}

/// Parses and resolves a deformation spec document. `load` fetches the
/// contents of base files referenced by path.
pub fn deformation_from_json(
    text: &str,
    load: &dyn Fn(&str) -> Result<String>,
) -> Result<ParsedInput> {
    let file: DeformationSpecFile = serde_json::from_str(text)
        .map_err(|e| Error::invalid("/", format!("malformed JSON: {e}")))?;
    check_schema(&file.schema)?;

    match file.kind.as_str() {
        "v" | "u" => {
            let values = rationals_from_values(&file.values, "/values")?;
            let v = if file.kind == "v" {
                VSequence::new(values)?
            } else {
                v_from_u(&USequence::new(values).map_err(|e| match e {
                    Error::Invalid { pointer, message } => Error::Invalid { pointer, message },
                    other => other,
                })?)
            };
            if let Some(w) = file.window {
                if w != v.last_index() {
                    return Err(Error::invalid(
                        "/window",
                        format!(
                            "window {w} disagrees with the sequence length (expected {})",
                            v.last_index()
                        ),
                    ));
                }
            }
            let base = resolve_base(&file, Some(v.last_index()), load)?;
            let spec = DeformationSpec::from_v(base, &v)?;
            let structure = ConvolutionStructure::from_deformation_spec(&spec)?;
            Ok(ParsedInput {
                kind: file.kind,
                structure,
                spec: Some(spec),
                v: Some(v),
            })
        }
        "dunkl_ramirez" | "dr" => {
            let values = rationals_from_values(&file.values, "/values")?;
            if values.len() != 1 {
                return Err(Error::invalid(
                    "/values",
                    "dunkl_ramirez takes exactly one value, the parameter a",
                ));
            }
            let window = file.window.ok_or_else(|| {
                Error::invalid("/window", "dunkl_ramirez requires a window")
            })?;
            let v = VSequence::dunkl_ramirez(&values[0], window)?;
            let base = resolve_base(&file, Some(window), load)?;
            let spec = DeformationSpec::from_v(base, &v)?;
            let structure = ConvolutionStructure::from_deformation_spec(&spec)?;
            Ok(ParsedInput {
                kind: "dunkl_ramirez".into(),
                structure,
                spec: Some(spec),
                v: Some(v),
            })
        }
        "raw" => {
            let q = raw_q_from_values(&file.values)?;
            let base = resolve_base(&file, None, load)?;
            let spec = DeformationSpec::new(base, q);
            let structure = ConvolutionStructure::from_deformation_spec(&spec)?;
            Ok(ParsedInput {
                kind: "raw".into(),
                structure,
                spec: Some(spec),
                v: None,
            })
        }
        "chebyshev1" | "chebyshev2" => {
            let window = file.window.ok_or_else(|| {
                Error::invalid("/window", "chebyshev fixtures require a window")
            })?;
            let kind = if file.kind == "chebyshev1" { 1 } else { 2 };
            Ok(ParsedInput {
                kind: file.kind,
                structure: build_chebyshev(kind, window)?,
                spec: None,
                v: None,
            })
        }
        other => Err(Error::invalid(
            "/kind",
            format!(
                "unknown kind {other:?}; expected v, u, raw, dunkl_ramirez, chebyshev1 or chebyshev2"
            ),
        )),
    }
}

/// Loader for inputs that must not touch the filesystem.
pub fn no_file_loader(path: &str) -> Result<String> {
    Err(Error::invalid(
        "/base",
        format!("file base {path:?} not available in this context"),
    ))
}
