//! Command-line front end. Every run reads JSON documents, performs one
//! operation, and writes a single JSON document to stdout. Exit 0 means
//! pass or found, 1 means a violation or failure certificate was produced,
//! 2 means the invocation or its inputs were unusable.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::density::{density_search, DensityError, NumericEmbedding, INITIAL_DENOMINATOR};
use crate::field::FieldElement;
use crate::gamma::GammaTable;
use crate::indep::{dependence_certificate, find_witness, witness_independence, Verdict};
use crate::json::{
    cocycle_violations_doc, table_violations_doc, CorldReportDoc, DecomposeReportDoc,
    GammaVectorDoc, SequenceDoc, SpecDoc, SystemReportDoc, TableDoc,
};
use crate::parser::parse_element;
use crate::rational::render_rational;
use crate::sequence::DerivationSequence;
use crate::system::{
    check_corld_conditions, check_system, decompose_solution, solve_next, SolveError,
};

#[derive(Parser)]
#[command(name = "leibniz", about = "Exact workbench for higher-order derivation systems")]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Weight tables: validation, cocycle check, factorization
    #[command(subcommand)]
    Gamma(GammaCmd),
    /// First-order derivations and their iterates
    #[command(subcommand)]
    Deriv(DerivCmd),
    /// Order-n systems: checks, defects, solver, decomposition
    #[command(subcommand)]
    System(SystemCmd),
    /// Independence certificates and the density search
    #[command(subcommand)]
    Indep(IndepCmd),
}

#[derive(Subcommand)]
enum GammaCmd {
    /// Check symmetry, boundary values, and domain of a table
    Validate {
        #[arg(long)]
        table: PathBuf,
    },
    /// Check the cocycle identity over the full domain
    Cocycle {
        #[arg(long)]
        table: PathBuf,
    },
    /// Factor the table through a gamma vector
    Factorize {
        #[arg(long)]
        table: PathBuf,
    },
    /// Build the table gamma(i+j)/(gamma(i) gamma(j))
    Synthesize {
        #[arg(long)]
        gamma: PathBuf,
    },
    /// Check that every order has a nonzero interior weight
    OrderCondition {
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum DerivCmd {
    /// Apply the derivation to an expression
    Apply {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        expr: String,
    },
    /// Apply the k-fold iterate to an expression
    Iterate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Subcommand)]
enum SystemCmd {
    /// Verify the order-k product rules on seeded random pairs
    Check {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the Leibniz defect D_k(x, y)
    Defect {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Check the defect identities behind next-order solvability
    Corld {
        #[arg(long)]
        seq: PathBuf,
        /// Weight table covering one order beyond the sequence
        /// (default: the sequence's own table)
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extend the sequence by one order
    SolveNext {
        #[arg(long)]
        seq: PathBuf,
        /// Weight table covering the new order
        /// (default: the sequence's own table)
        #[arg(long)]
        table: Option<PathBuf>,
        /// Values for the new term on generators, as a JSON object of
        /// expressions, for example {"t":"1"}; unnamed generators get 0
        #[arg(long)]
        choices: Option<String>,
    },
    /// Split the top solver term into a scaled iterate plus a derivation
    Decompose {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum IndepCmd {
    /// Witness determinant at given points, or a seeded search for one
    Witness {
        #[arg(long)]
        seq: PathBuf,
        /// Evaluate at these points instead of searching (repeatable)
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long, default_value_t = 4)]
        bound: u32,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact rational dependence among the terms on a monomial basis
    Certificate {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Approximate a target vector by a graph vector at an embedding
    Density {
        #[arg(long)]
        seq: PathBuf,
        /// Generator values as a JSON object, e.g. {"t":3.141592653589793}
        #[arg(long)]
        embed: String,
        /// Target vector as a JSON array of length n+1
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 6)]
        bound: u32,
        #[arg(long, default_value_t = INITIAL_DENOMINATOR)]
        max_denominator: u64,
    },
}

struct Outcome {
    ok: bool,
    doc: serde_json::Value,
}

fn pass(doc: serde_json::Value) -> Result<Outcome, String> {
    Ok(Outcome { ok: true, doc })
}

fn fail(doc: serde_json::Value) -> Result<Outcome, String> {
    Ok(Outcome { ok: false, doc })
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.group) {
        Ok(outcome) => {
            println!("{}", outcome.doc);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn read_table(path: &Path) -> Result<GammaTable, String> {
    read_json::<TableDoc>(path)?.to_table().map_err(|e| e.to_string())
}

fn read_sequence(path: &Path) -> Result<DerivationSequence, String> {
    read_json::<SequenceDoc>(path)?.to_sequence().map_err(|e| e.to_string())
}

fn table_for_order(
    seq: &DerivationSequence,
    override_path: Option<PathBuf>,
    needed: usize,
) -> Result<GammaTable, String> {
    let table = match override_path {
        Some(path) => read_table(&path)?,
        None => seq.gamma().clone(),
    };
    if table.n() < needed {
        return Err(format!(
            "table covers orders up to {}, but order {} is needed",
            table.n(),
            needed
        ));
    }
    Ok(table)
}

fn dispatch(group: Group) -> Result<Outcome, String> {
    match group {
        Group::Gamma(cmd) => run_gamma(cmd),
        Group::Deriv(cmd) => run_deriv(cmd),
        Group::System(cmd) => run_system(cmd),
        Group::Indep(cmd) => run_indep(cmd),
    }
}

fn run_gamma(cmd: GammaCmd) -> Result<Outcome, String> {
    match cmd {
        GammaCmd::Validate { table } => {
            let doc: TableDoc = read_json(&table)?;
            let raw = doc.raw_entries().map_err(|e| e.to_string())?;
            match GammaTable::validate(doc.n, &raw) {
                Ok(t) => pass(json!({
                    "n": t.n(),
                    "ok": true,
                    "entries": TableDoc::from_table(&t).entries,
                })),
                Err(violations) => fail(json!({
                    "n": doc.n,
                    "ok": false,
                    "violations": table_violations_doc(&violations),
                })),
            }
        }
        GammaCmd::Cocycle { table } => {
            let t = read_table(&table)?;
            let report = t.check_cocycle();
            let ok = report.passed();
            let doc = json!({
                "n": t.n(),
                "ok": ok,
                "violations": cocycle_violations_doc(&report),
            });
            if ok {
                pass(doc)
            } else {
                fail(doc)
            }
        }
        GammaCmd::Factorize { table } => {
            let t = read_table(&table)?;
            match t.factorize() {
                Ok(v) => pass(serde_json::to_value(GammaVectorDoc::from_vector(&v)).unwrap()),
                Err(crate::gamma::FactorizeError::ZeroEntry { i, j }) => fail(json!({
                    "error": "zero-entry",
                    "i": i,
                    "j": j,
                })),
                Err(crate::gamma::FactorizeError::Mismatch {
                    i,
                    j,
                    table_value,
                    synthesized_value,
                }) => fail(json!({
                    "error": "mismatch",
                    "i": i,
                    "j": j,
                    "table": render_rational(&table_value),
                    "synthesized": render_rational(&synthesized_value),
                })),
            }
        }
        GammaCmd::Synthesize { gamma } => {
            let v = read_json::<GammaVectorDoc>(&gamma)?
                .to_vector()
                .map_err(|e| e.to_string())?;
            pass(serde_json::to_value(TableDoc::from_table(&v.synthesize())).unwrap())
        }
        GammaCmd::OrderCondition { table } => {
            let t = read_table(&table)?;
            let ok = t.check_order_condition();
            let failing: Vec<usize> = (2..=t.n())
                .filter(|&k| (1..k).all(|l| num_traits::Zero::is_zero(&t.get(l, k - l))))
                .collect();
            let doc = json!({"n": t.n(), "ok": ok, "failing": failing});
            if ok {
                pass(doc)
            } else {
                fail(doc)
            }
        }
    }
}

fn run_deriv(cmd: DerivCmd) -> Result<Outcome, String> {
    match cmd {
        DerivCmd::Apply { spec, expr } => {
            let d = read_json::<SpecDoc>(&spec)?.to_spec().map_err(|e| e.to_string())?;
            let x = parse_element(&expr, d.generators()).map_err(|e| e.to_string())?;
            pass(json!({
                "input": x.to_string(),
                "result": d.apply(&x).to_string(),
            }))
        }
        DerivCmd::Iterate { spec, expr, order } => {
            let d = read_json::<SpecDoc>(&spec)?.to_spec().map_err(|e| e.to_string())?;
            let x = parse_element(&expr, d.generators()).map_err(|e| e.to_string())?;
            pass(json!({
                "input": x.to_string(),
                "order": order,
                "result": d.iterate(order, &x).to_string(),
            }))
        }
    }
}

fn run_system(cmd: SystemCmd) -> Result<Outcome, String> {
    match cmd {
        SystemCmd::Check { seq, samples, seed } => {
            let s = read_sequence(&seq)?;
            let report = check_system(&s, s.gamma(), samples, seed);
            let ok = report.passed();
            let doc = serde_json::to_value(SystemReportDoc::from_report(&report)).unwrap();
            if ok {
                pass(doc)
            } else {
                fail(doc)
            }
        }
        SystemCmd::Defect { seq, order, x, y } => {
            let s = read_sequence(&seq)?;
            if order < 1 || order > s.n() + 1 || order > s.gamma().n() {
                return Err(format!(
                    "defect order must lie in 1..={} (table covers {})",
                    s.n() + 1,
                    s.gamma().n()
                ));
            }
            let gens = s.base().generators();
            let xe = parse_element(&x, gens).map_err(|e| e.to_string())?;
            let ye = parse_element(&y, gens).map_err(|e| e.to_string())?;
            let d = s.defect_with(s.gamma(), order, &xe, &ye);
            pass(json!({
                "k": order,
                "x": xe.to_string(),
                "y": ye.to_string(),
                "defect": d.to_string(),
            }))
        }
        SystemCmd::Corld {
            seq,
            table,
            samples,
            seed,
        } => {
            let s = read_sequence(&seq)?;
            let t = table_for_order(&s, table, s.n() + 1)?;
            let report = check_corld_conditions(&s, &t, samples, seed);
            let ok = report.passed();
            let doc = serde_json::to_value(CorldReportDoc::from_report(&report)).unwrap();
            if ok {
                pass(doc)
            } else {
                fail(doc)
            }
        }
        SystemCmd::SolveNext { seq, table, choices } => {
            let s = read_sequence(&seq)?;
            let t = table_for_order(&s, table, s.n() + 1)?;
            let gens = s.base().generators();
            let mut parsed = BTreeMap::new();
            if let Some(text) = choices {
                let raw: BTreeMap<String, String> =
                    serde_json::from_str(&text).map_err(|e| format!("choices: {}", e))?;
                for (name, expr) in raw {
                    let value = parse_element(&expr, gens).map_err(|e| e.to_string())?;
                    parsed.insert(name, value);
                }
            }
            match solve_next(&s, &t, &parsed) {
                Ok(extended) => {
                    pass(serde_json::to_value(SequenceDoc::from_sequence(&extended)).unwrap())
                }
                Err(SolveError::CocycleFailure(report)) => fail(json!({
                    "error": "cocycle-failure",
                    "violations": cocycle_violations_doc(&report),
                })),
                Err(SolveError::PrefixCheckFailure(report)) => fail(json!({
                    "error": "prefix-check-failure",
                    "report": SystemReportDoc::from_report(&report),
                })),
                Err(e) => Err(e.to_string()),
            }
        }
        SystemCmd::Decompose { seq, samples, seed } => {
            let s = read_sequence(&seq)?;
            let report = decompose_solution(&s, samples, seed).map_err(|e| e.to_string())?;
            let ok = report.passed();
            let doc = serde_json::to_value(DecomposeReportDoc::from_report(
                &report,
                s.base().generators(),
            ))
            .unwrap();
            if ok {
                pass(doc)
            } else {
                fail(doc)
            }
        }
    }
}

fn run_indep(cmd: IndepCmd) -> Result<Outcome, String> {
    match cmd {
        IndepCmd::Witness {
            seq,
            points,
            bound,
            budget,
            seed,
        } => {
            let s = read_sequence(&seq)?;
            let gens = s.base().generators();
            if !points.is_empty() {
                if points.len() != s.n() + 1 {
                    return Err(format!(
                        "need {} points for order {}, got {}",
                        s.n() + 1,
                        s.n(),
                        points.len()
                    ));
                }
                let parsed: Vec<FieldElement> = points
                    .iter()
                    .map(|p| parse_element(p, gens).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                let (verdict, matrix) = witness_independence(&s, &parsed);
                let doc = json!({
                    "verdict": match verdict {
                        Verdict::Independent => "independent",
                        Verdict::Inconclusive => "inconclusive",
                    },
                    "points": render_elements(matrix.points()),
                    "matrix": matrix.entries().iter().map(|row| render_elements(row)).collect::<Vec<_>>(),
                    "det": matrix.det().to_string(),
                });
                if verdict == Verdict::Independent {
                    pass(doc)
                } else {
                    fail(doc)
                }
            } else {
                match find_witness(&s, bound, budget.max(1), seed) {
                    Ok(found) => pass(json!({
                        "verdict": "independent",
                        "points": render_elements(found.matrix.points()),
                        "det": found.matrix.det().to_string(),
                        "attempts": found.attempts,
                        "seed": seed,
                    })),
                    Err(exhausted) => fail(json!({
                        "verdict": "exhausted",
                        "attempts": exhausted.attempts,
                        "seed": seed,
                    })),
                }
            }
        }
        IndepCmd::Certificate { seq, bound } => {
            let s = read_sequence(&seq)?;
            match dependence_certificate(&s, bound.max(1)) {
                Some(c) => pass(json!({
                    "basis_bound": bound,
                    "coefficients": c.iter().map(render_rational).collect::<Vec<_>>(),
                })),
                None => fail(json!({
                    "basis_bound": bound,
                    "coefficients": serde_json::Value::Null,
                })),
            }
        }
        IndepCmd::Density {
            seq,
            embed,
            target,
            eps,
            bound,
            max_denominator,
        } => {
            let s = read_sequence(&seq)?;
            let gens = s.base().generators();
            let raw: BTreeMap<String, f64> =
                serde_json::from_str(&embed).map_err(|e| format!("embed: {}", e))?;
            let embedding = NumericEmbedding::new(gens, &raw).map_err(|e| e.to_string())?;
            let target: Vec<f64> =
                serde_json::from_str(&target).map_err(|e| format!("target: {}", e))?;
            if target.len() != s.n() + 1 {
                return Err(format!(
                    "target must have length {}, got {}",
                    s.n() + 1,
                    target.len()
                ));
            }
            if !(eps > 0.0) {
                return Err("eps must be positive".to_string());
            }
            match density_search(&s, &embedding, &target, eps, bound, max_denominator.max(1)) {
                Ok(res) => pass(json!({
                    "witness": res.witness.to_string(),
                    "image": res.image,
                    "target": res.target,
                    "error": res.error,
                    "embedding": raw,
                })),
                Err(DensityError::SingularSelection { needed, got }) => fail(json!({
                    "failure": "singular-selection",
                    "needed": needed,
                    "got": got,
                })),
                Err(DensityError::RetriesExhausted { best, retries }) => fail(json!({
                    "failure": "retries-exhausted",
                    "best": best,
                    "retries": retries,
                })),
            }
        }
    }
}

fn render_elements(elements: &[FieldElement]) -> Vec<String> {
    elements.iter().map(|e| e.to_string()).collect()
}
