//! Command-line front end: ingest semigroup tables and deformation specs,
//! dispatch to the builders and verifiers, and emit machine-readable
//! reports.
//!
//! Exit codes: 0 — all requested checks passed; 1 — a property or
//! verification failed (the report carries a witness); 2 — usage or input
//! error.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use hyperconvo::axioms::{
    check_equivalence_conditions, haar, verify_haar_invariance, verify_hypergroup,
    verify_semiconvo, EquivalenceReport, VerificationReport,
};
use hyperconvo::deformation::{
    check_main_conditions, check_max_conditions, ConditionReport, ConvolutionStructure,
    DeformationSpec,
};
use hyperconvo::duality::{
    character_table, double_dual_table, dual_convolution_closed, dual_convolution_solve,
    BetaSequence, DualPoint,
};
use hyperconvo::io::{deformation_from_json, semigroup_from_json, ParsedInput};
use hyperconvo::semigroup::classify;
use hyperconvo::{Error, Rational, SCHEMA};

#[derive(Parser)]
#[command(name = "hyperconvo", version, about = "Exact deformations of commutative semigroups into semiconvos and hypergroups: builders, axiom verifiers, Haar measures and dual objects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the artifact to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add display-only decimal companions next to rational values; never
    /// used in any comparison.
    #[arg(long)]
    decimal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on semigroup Cayley tables.
    Semigroup {
        #[command(subcommand)]
        cmd: SemigroupCmd,
    },
    /// Build candidate deformations and check the theorem conditions.
    Deform {
        #[command(subcommand)]
        cmd: DeformCmd,
    },
    /// Verify the semiconvo (and optionally hypergroup) axioms by
    /// exhaustive enumeration over the window.
    Verify {
        spec: PathBuf,
        /// Largest element index to include; defaults to the whole window.
        #[arg(long)]
        window: Option<usize>,
        /// Also check the involution and support axioms.
        #[arg(long)]
        hypergroup: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the Haar weights λ(n) = 1/(δ_n*δ_n)(e).
    Haar {
        spec: PathBuf,
        /// Cross-check translation invariance up to this window.
        #[arg(long)]
        invariance_window: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dual objects: character tables, dual convolutions, double duals.
    Dual {
        #[command(subcommand)]
        cmd: DualCmd,
    },
    /// Full pipeline on one input: conditions, verification, Haar and
    /// equivalence report, wrapped in a reproducible run manifest.
    Report {
        spec: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        /// Recorded in the manifest; reruns with identical inputs and seed
        /// emit byte-identical output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum SemigroupCmd {
    /// Validate a Cayley table and emit its structural classification.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum DeformCmd {
    /// Build the convolution structure described by a deformation spec and
    /// emit its deformed diagonal.
    Build {
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the deformation conditions (max-semigroup or general
    /// commutative, dispatched on the base) with per-condition witnesses.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum DualCmd {
    /// Emit the character table as CSV: one row per character, columns are
    /// base points.
    Characters {
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expand δ_{χ_m} * δ_{χ_n} exactly, with tail mass, by both the closed
    /// form and the triangular solve.
    Convolve {
        spec: PathBuf,
        /// Dual index, or "inf".
        #[arg(long)]
        m: String,
        /// Second dual index; defaults to m.
        #[arg(long)]
        n: Option<String>,
        /// Number of coefficients retained past the base index.
        #[arg(long, default_value_t = 48)]
        trunc: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Emit the double dual table ξ_n(k) = χ_k(n) as CSV.
    Double {
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    schema: &'static str,
    command: String,
    inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trunc: Option<usize>,
    seed: u64,
    results: serde_json::Value,
}

/// Outcome of a subcommand: the artifact text, a one-line summary, and
/// whether every requested check passed.
struct Outcome {
    artifact: String,
    summary: String,
    pass: bool,
}

fn digest_of(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a file, recording its digest for the manifest.
fn read_tracked(path: &Path, inputs: &RefCell<Vec<InputDigest>>) -> anyhow::Result<String> {
    let bytes = fs::read(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    inputs.borrow_mut().push(InputDigest {
        path: path.display().to_string(),
        sha256: digest_of(&bytes),
    });
    String::from_utf8(bytes).map_err(|e| anyhow::anyhow!("{} is not UTF-8: {e}", path.display()))
}

fn load_input(path: &Path, inputs: &RefCell<Vec<InputDigest>>) -> anyhow::Result<ParsedInput> {
    let text = read_tracked(path, inputs)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loader = |base: &str| -> hyperconvo::Result<String> {
        let base_path = dir.join(base);
        read_tracked(&base_path, inputs).map_err(|e| Error::Invalid {
            pointer: "/base".into(),
            message: e.to_string(),
        })
    };
    Ok(deformation_from_json(&text, &loader)?)
}

fn decimal_map(values: &serde_json::Value) -> serde_json::Value {
    match values {
        serde_json::Value::String(s) => Rational::parse(s)
            .map(|r| serde_json::json!(r.to_f64()))
            .unwrap_or(serde_json::Value::Null),
        serde_json::Value::Object(map) => serde_json::Value::Object(
            map.iter().map(|(k, v)| (k.clone(), decimal_map(v))).collect(),
        ),
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.iter().map(decimal_map).collect())
        }
        other => other.clone(),
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn characters_csv(v: &hyperconvo::deformation::VSequence) -> String {
    let table = character_table(v);
    let mut csv = String::from("character");
    for n in 0..table.points() {
        csv.push_str(&format!(",{n}"));
    }
    csv.push('\n');
    for (point, row) in table.iter_rows() {
        let label = match point {
            DualPoint::Finite(k) => format!("chi_{k}"),
            DualPoint::Infinity => "chi_inf".to_string(),
        };
        csv.push_str(&label);
        for value in row {
            csv.push_str(&format!(",{value}"));
        }
        csv.push('\n');
    }
    csv
}

fn double_dual_csv(beta: &BetaSequence) -> String {
    let table = double_dual_table(beta);
    let mut csv = String::from("point");
    for k in 0..beta.len() {
        csv.push_str(&format!(",chi_{k}"));
    }
    csv.push_str(",chi_inf\n");
    for (n, row) in table.rows().iter().enumerate() {
        csv.push_str(&format!("xi_{n}"));
        for value in row {
            csv.push_str(&format!(",{value}"));
        }
        csv.push_str(",1\n");
    }
    csv
}

fn diagonal_json(structure: &ConvolutionStructure, spec: Option<&DeformationSpec>) -> serde_json::Value {
    let q: serde_json::Value = match spec {
        Some(spec) => serde_json::to_value(&spec.q).expect("serializable"),
        None => serde_json::Value::Null,
    };
    serde_json::json!({
        "schema": SCHEMA,
        "elements": structure.names(),
        "identity": structure.identity(),
        "hermitian": structure.is_hermitian(),
        "q": q,
    })
}

fn dispatch_conditions(spec: &DeformationSpec) -> hyperconvo::Result<ConditionReport> {
    match check_max_conditions(spec) {
        Err(Error::Unsupported(_)) => check_main_conditions(spec),
        other => other,
    }
}

fn run_verify(
    input: &ParsedInput,
    window: Option<usize>,
    hypergroup: bool,
) -> (VerificationReport, usize) {
    let w = window.unwrap_or(input.structure.len() - 1);
    let report = if hypergroup {
        verify_hypergroup(&input.structure, w)
    } else {
        verify_semiconvo(&input.structure, w)
    };
    (report, w)
}

fn cmd_classify(file: &Path, inputs: &RefCell<Vec<InputDigest>>) -> anyhow::Result<Outcome> {
    let text = read_tracked(file, inputs)?;
    let table = semigroup_from_json(&text)?;
    let classification = classify(&table);
    let value = serde_json::json!({
        "schema": SCHEMA,
        "elements": table.names(),
        "classification": classification,
    });
    Ok(Outcome {
        artifact: pretty(&value),
        summary: format!(
            "classified {} elements: {} idempotents, {} units, inverse_free={}, action_free={}",
            table.len(),
            classification.idempotents.len(),
            classification.units.len(),
            classification.inverse_free,
            classification.action_free,
        ),
        pass: true,
    })
}

fn cmd_deform_build(input: &ParsedInput) -> Outcome {
    let value = diagonal_json(&input.structure, input.spec.as_ref());
    Outcome {
        artifact: pretty(&value),
        summary: format!(
            "built {} structure on {} elements",
            input.kind,
            input.structure.len()
        ),
        pass: true,
    }
}

fn cmd_deform_check(input: &ParsedInput) -> anyhow::Result<Outcome> {
    let spec = input
        .spec
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("this input has no deformation data to check"))?;
    let report = dispatch_conditions(spec)?;
    let equivalence = check_equivalence_conditions(spec).ok();
    let failed: Vec<&str> = report
        .conditions
        .iter()
        .filter(|c| c.status == hyperconvo::deformation::ConditionStatus::Fail)
        .map(|c| c.id.as_str())
        .collect();
    let value = serde_json::json!({
        "schema": SCHEMA,
        "report": report,
        "equivalence": equivalence,
    });
    Ok(Outcome {
        artifact: pretty(&value),
        summary: if failed.is_empty() {
            format!("all conditions hold ({:?} checker)", report.checker)
        } else {
            format!("failed conditions: {}", failed.join(", "))
        },
        pass: failed.is_empty(),
    })
}

fn cmd_verify(input: &ParsedInput, window: Option<usize>, hypergroup: bool) -> Outcome {
    let (report, w) = run_verify(input, window, hypergroup);
    let pass = report.all_pass();
    let value = serde_json::json!({
        "schema": SCHEMA,
        "verification": report,
    });
    Outcome {
        artifact: pretty(&value),
        summary: if pass {
            format!(
                "axioms verified on window 0..={w} ({} triples exact)",
                report.triples_checked
            )
        } else {
            "verification found a counterexample; see the report".to_string()
        },
        pass,
    }
}

fn cmd_haar(
    input: &ParsedInput,
    invariance_window: Option<usize>,
    decimal: bool,
) -> anyhow::Result<Outcome> {
    let lambda = haar(&input.structure)?;
    let invariance = match invariance_window {
        Some(w) => Some(verify_haar_invariance(&input.structure, &lambda, w)?),
        None => None,
    };
    let mut value = serde_json::json!({
        "schema": SCHEMA,
        "haar": lambda,
        "invariance": invariance,
    });
    if decimal {
        let companions = decimal_map(&value["haar"]["values"]);
        value["haar_decimal"] = companions;
    }
    let pass = invariance.as_ref().is_none_or(|inv| inv.pass);
    Ok(Outcome {
        artifact: pretty(&value),
        summary: format!(
            "Haar weights on {} elements{}",
            lambda.values.len(),
            match &invariance {
                Some(inv) if inv.pass =>
                    format!("; invariance exact on {} pairs", inv.pairs_checked),
                Some(_) => "; INVARIANCE FAILED".to_string(),
                None => String::new(),
            }
        ),
        pass,
    })
}

fn require_v(input: &ParsedInput) -> anyhow::Result<&hyperconvo::deformation::VSequence> {
    input.v.as_ref().ok_or_else(|| {
        anyhow::anyhow!(
            "dual operations need a weight-parameterized max deformation (kind v, u or dunkl_ramirez)"
        )
    })
}

fn cmd_dual_characters(input: &ParsedInput) -> anyhow::Result<Outcome> {
    let v = require_v(input)?;
    Ok(Outcome {
        artifact: characters_csv(v),
        summary: format!(
            "character table: {} finite rows plus chi_inf over {} points",
            v.last_index(),
            v.len()
        ),
        pass: true,
    })
}

fn cmd_dual_convolve(
    input: &ParsedInput,
    m: &str,
    n: Option<&str>,
    trunc: usize,
    decimal: bool,
) -> anyhow::Result<Outcome> {
    let v = require_v(input)?;
    let beta = BetaSequence::from_v(v);
    let m: DualPoint = m.parse()?;
    let n: DualPoint = match n {
        Some(n) => n.parse()?,
        None => m,
    };
    let measure = dual_convolution_closed(m, n, &beta, trunc)?;
    // independent route, reported alongside for diagonal convolutions
    let solve_agrees = match (m, n) {
        (DualPoint::Finite(a), DualPoint::Finite(b)) if a == b => {
            let solved = dual_convolution_solve(a, &beta, trunc)?;
            Some(solved.gamma == measure.gamma && solved.tail_mass == measure.tail_mass)
        }
        _ => None,
    };
    let mut value = serde_json::json!({
        "schema": SCHEMA,
        "m": m.to_string(),
        "n": n.to_string(),
        "trunc": trunc,
        "gamma": measure.gamma,
        "tail_mass": measure.tail_mass,
        "infinity_mass": measure.infinity_mass,
        "self_atom": measure.self_atom,
        "triangular_solve_agrees": solve_agrees,
    });
    if decimal {
        value["gamma_decimal"] = decimal_map(&value["gamma"]);
        value["tail_mass_decimal"] = decimal_map(&value["tail_mass"]);
    }
    let pass = solve_agrees.is_none_or(|b| b);
    Ok(Outcome {
        artifact: pretty(&value),
        summary: format!(
            "dual convolution at ({m}, {n}): {} retained coefficients, tail mass {}",
            measure.gamma.len(),
            measure.tail_mass
        ),
        pass,
    })
}

fn cmd_dual_double(input: &ParsedInput) -> anyhow::Result<Outcome> {
    let v = require_v(input)?;
    let beta = BetaSequence::from_v(v);
    Ok(Outcome {
        artifact: double_dual_csv(&beta),
        summary: format!(
            "double dual table: {} rows over {} dual points plus chi_inf",
            beta.len() + 1,
            beta.len()
        ),
        pass: true,
    })
}

fn cmd_report(input: &ParsedInput, window: Option<usize>) -> anyhow::Result<serde_json::Value> {
    let w = window.unwrap_or(input.structure.len() - 1);
    let conditions = match &input.spec {
        Some(spec) => Some(dispatch_conditions(spec)?),
        None => None,
    };
    let equivalence: Option<EquivalenceReport> = input
        .spec
        .as_ref()
        .and_then(|spec| check_equivalence_conditions(spec).ok());
    let verification = verify_hypergroup(&input.structure, w);
    let haar_result = match haar(&input.structure) {
        Ok(lambda) => {
            let invariance = verify_haar_invariance(&input.structure, &lambda, w)?;
            serde_json::json!({ "haar": lambda, "invariance": invariance })
        }
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    Ok(serde_json::json!({
        "kind": input.kind,
        "elements": input.structure.len(),
        "conditions": conditions,
        "equivalence": equivalence,
        "verification": verification,
        "haar": haar_result,
    }))
}

fn report_pass(results: &serde_json::Value) -> bool {
    let conditions_ok = results["conditions"].is_null()
        || results["conditions"]["all_pass"].as_bool().unwrap_or(false);
    let verification_ok = results["verification"]["associativity"]["status"] == "pass"
        && results["verification"]["identity"]["status"] == "pass";
    conditions_ok && verification_ok
}

fn write_outcome(outcome: &Outcome, output: &OutputArgs) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => {
            fs::write(path, &outcome.artifact)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
            eprintln!("{} -> {}", outcome.summary, path.display());
        }
        None => {
            print!("{}", outcome.artifact);
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<(Outcome, OutputArgs)> {
    let inputs = RefCell::new(Vec::new());
    match cli.command {
        Command::Semigroup {
            cmd: SemigroupCmd::Classify { file, output },
        } => Ok((cmd_classify(&file, &inputs)?, output)),
        Command::Deform { cmd } => match cmd {
            DeformCmd::Build { spec, output } => {
                let input = load_input(&spec, &inputs)?;
                Ok((cmd_deform_build(&input), output))
            }
            DeformCmd::Check { spec, output } => {
                let input = load_input(&spec, &inputs)?;
                Ok((cmd_deform_check(&input)?, output))
            }
        },
        Command::Verify {
            spec,
            window,
            hypergroup,
            output,
        } => {
            let input = load_input(&spec, &inputs)?;
            Ok((cmd_verify(&input, window, hypergroup), output))
        }
        Command::Haar {
            spec,
            invariance_window,
            output,
        } => {
            let input = load_input(&spec, &inputs)?;
            Ok((cmd_haar(&input, invariance_window, output.decimal)?, output))
        }
        Command::Dual { cmd } => match cmd {
            DualCmd::Characters { spec, output } => {
                let input = load_input(&spec, &inputs)?;
                Ok((cmd_dual_characters(&input)?, output))
            }
            DualCmd::Convolve {
                spec,
                m,
                n,
                trunc,
                output,
            } => {
                let input = load_input(&spec, &inputs)?;
                Ok((
                    cmd_dual_convolve(&input, &m, n.as_deref(), trunc, output.decimal)?,
                    output,
                ))
            }
            DualCmd::Double { spec, output } => {
                let input = load_input(&spec, &inputs)?;
                Ok((cmd_dual_double(&input)?, output))
            }
        },
        Command::Report {
            spec,
            window,
            seed,
            output,
        } => {
            let input = load_input(&spec, &inputs)?;
            let results = cmd_report(&input, window)?;
            let pass = report_pass(&results);
            let manifest = RunManifest {
                schema: SCHEMA,
                command: "report".into(),
                inputs: inputs.take(),
                window,
                trunc: None,
                seed,
                results,
            };
            let outcome = Outcome {
                artifact: pretty(&manifest),
                summary: if pass {
                    "report complete: conditions and verification pass".into()
                } else {
                    "report complete: failures recorded in the manifest".into()
                },
                pass,
            };
            Ok((outcome, output))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, output)) => {
            if let Err(e) = write_outcome(&outcome, &output) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
