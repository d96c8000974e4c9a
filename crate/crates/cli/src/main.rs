//! `gabriel`: reads a fixture document, runs one computation, prints a
//! report. Exit codes: 0 all verdicts pass, 1 some verdict failed,
//! 2 the document did not parse, 3 the computation raised an error.

mod doc;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use run::{Bounds, Outcome};

#[derive(Parser)]
#[command(
    name = "gabriel",
    version,
    about = "Gabriel topologies, completions and contramodules over small rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation depth [default: 4].
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Sample seed [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample size or ideal cap, depending on the command.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check T0-T4' (and T4 over finite rings) for the document's base.
    CheckAxioms { document: PathBuf },
    /// Close the document's ideals under the Gabriel axioms.
    Saturate { document: PathBuf },
    /// The ring of quotients and its perfectness certificates.
    QuotientRing { document: PathBuf },
    /// Levels of the completion of the ring and of each module.
    Complete { document: PathBuf },
    /// Δ of each module and the five-term sequence.
    Delta { document: PathBuf },
    /// The maps β and θ between Δ and the completion.
    Compare { document: PathBuf },
    /// Membership of each module in U^⊥.
    Perp { document: PathBuf },
    /// End(U/R) against the completed ring.
    EndoRing { document: PathBuf },
    /// U-strong flatness and U-weak cotorsion of each module.
    StronglyFlat { document: PathBuf },
    /// The bounded-degree monomial counterexample to T4.
    RegressCorrigendum { document: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms { .. } => "check-axioms",
            Command::Saturate { .. } => "saturate",
            Command::QuotientRing { .. } => "quotient-ring",
            Command::Complete { .. } => "complete",
            Command::Delta { .. } => "delta",
            Command::Compare { .. } => "compare",
            Command::Perp { .. } => "perp",
            Command::EndoRing { .. } => "endo-ring",
            Command::StronglyFlat { .. } => "strongly-flat",
            Command::RegressCorrigendum { .. } => "regress-corrigendum",
        }
    }

    fn document(&self) -> Option<&PathBuf> {
        match self {
            Command::CheckAxioms { document }
            | Command::Saturate { document }
            | Command::QuotientRing { document }
            | Command::Complete { document }
            | Command::Delta { document }
            | Command::Compare { document }
            | Command::Perp { document }
            | Command::EndoRing { document }
            | Command::StronglyFlat { document } => Some(document),
            Command::RegressCorrigendum { document } => document.as_ref(),
        }
    }
}

enum Failure {
    Parse(String),
    Compute(gabriel::Error),
}

fn error_kind(e: &gabriel::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn execute(cli: &Cli) -> Result<(Value, Outcome), Failure> {
    let document = match cli.command.document() {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
            Some(
                doc::parse(&text)
                    .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let opts = document.as_ref().map(|d| &d.options);
    let bounds = Bounds {
        depth: cli.depth.or(opts.and_then(|o| o.depth)).unwrap_or(4),
        seed: cli.seed.or(opts.and_then(|o| o.seed)).unwrap_or(0),
        budget: cli.budget.or(opts.and_then(|o| o.budget)),
    };
    if bounds.depth == 0 {
        return Err(Failure::Parse("--depth must be at least 1".into()));
    }
    let header = json!({
        "command": cli.command.name(),
        "ring": document.as_ref().map(|d| d.ring.to_string()),
        "bounds": { "depth": bounds.depth, "seed": bounds.seed, "budget": bounds.budget },
    });
    if let Command::RegressCorrigendum { .. } = cli.command {
        let (vars, max_power) = opts
            .and_then(|o| o.corrigendum.as_ref())
            .map_or((6, 4), |c| (c.vars, c.max_power));
        return Ok((
            header,
            run::regress_corrigendum_cmd(vars, max_power, bounds),
        ));
    }
    let document = document.expect("document required");
    let fixture = document
        .fixture(bounds.depth)
        .map_err(|e| Failure::Parse(e.to_string()))?;
    let outcome = match &cli.command {
        Command::CheckAxioms { .. } => run::check_axioms_cmd(&fixture, bounds),
        Command::Saturate { .. } => {
            let rounds = document.options.rounds.unwrap_or(3);
            let default = if fixture.handle.is_commutative() {
                "identity"
            } else {
                "contained_base"
            };
            run::saturate_cmd(
                &fixture,
                bounds,
                rounds,
                document.options.witness.as_deref().unwrap_or(default),
            )
        }
        Command::QuotientRing { .. } => run::quotient_ring_cmd(&fixture, bounds),
        Command::Complete { .. } => run::complete_cmd(&fixture, bounds),
        Command::Delta { .. } => run::delta_cmd(&fixture, bounds),
        Command::Compare { .. } => run::compare_cmd(&fixture, bounds),
        Command::Perp { .. } => run::perp_cmd(&fixture, bounds),
        Command::EndoRing { .. } => run::endo_ring_cmd(&fixture, bounds),
        Command::StronglyFlat { .. } => run::strongly_flat_cmd(&fixture, bounds),
        Command::RegressCorrigendum { .. } => unreachable!(),
    }
    .map_err(Failure::Compute)?;
    Ok((header, outcome))
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || x.is_array() && !is_flat(x) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if x.is_object() || x.is_array() && !is_flat(x) {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn is_flat(v: &Value) -> bool {
    v.as_array().is_some_and(|a| {
        a.iter()
            .all(|x| !x.is_object() && (!x.is_array() || is_flat(x)))
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn emit(format: Format, v: &Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("json")),
        Format::Text => {
            let mut out = String::new();
            render_text(v, 0, &mut out);
            print!("{out}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((mut header, outcome)) => {
            header["status"] = json!(if outcome.failed { "failed" } else { "ok" });
            header["report"] = outcome.report;
            emit(cli.format, &header);
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            emit(
                cli.format,
                &json!({ "command": cli.command.name(), "status": "parse-error", "error": msg }),
            );
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            emit(
                cli.format,
                &json!({ "command": cli.command.name(), "status": "error", "error": { "kind": error_kind(&e), "message": e.to_string() } }),
            );
            ExitCode::from(3)
        }
    }
}
