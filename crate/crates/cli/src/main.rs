//! `idts`: check, normalize and transform inductive data type systems.
//!
//! Exit codes: 0 success or accepted, 1 negative verdict on well-formed input,
//! 2 parse, type or usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use idts::interp::{erase, s_positive};
use idts::rewrite::{NormalizeOptions, Strategy};
use idts::schema::{check_system, SchemaReport, SystemVerdict};
use idts::signature::ValidationReport;
use idts::syntax::{parse_type, spec_of, Document, LoadError, SpecFile};
use idts::transforms::{currify, encode_conditional, generate_recursors, TransformError};
use idts::{Term, Type};

#[derive(Parser)]
#[command(name = "idts", version, about = "Inductive data type systems workbench")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// JSON mirroring the report structures.
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the signature and check every rule against the schema.
    Check {
        file: PathBuf,
        /// Print closure derivations and variable access paths.
        #[arg(long)]
        explain: bool,
    },
    /// Normalize a term, or a named term of the file.
    Normalize {
        file: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long, default_value = "outermost")]
        strategy: Strategy,
        #[arg(long)]
        trace: bool,
    },
    /// Print the file extended with the recursors of a type's mutual class.
    Recursors {
        file: PathBuf,
        #[arg(long = "class")]
        class: String,
        #[arg(long)]
        target: String,
    },
    /// Print the file extended with the curried form of a symbol.
    Currify {
        file: PathBuf,
        #[arg(long)]
        symbol: String,
    },
    /// Print the file with every conditional rule encoded unconditionally.
    EncodeCond { file: PathBuf },
    /// Collapse the subterms that are not positive for an inductive type.
    Erase {
        file: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long)]
        wrt: String,
    },
}

/// A failed command: message plus exit code.
struct Failure {
    code: u8,
    message: String,
    /// Structured payload, printed instead of the message in structured mode.
    payload: Option<serde_json::Value>,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
        payload: None,
    }
}

fn verdict(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
        payload: None,
    }
}

fn transform_failure(e: TransformError) -> Failure {
    match e {
        TransformError::NotStrictlyPositive(_) => verdict(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn validation_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    for (name, p) in &report.positivity {
        let class = match (p.strictly_positive, p.basic) {
            (true, true) => "strictly positive, basic",
            (true, false) => "strictly positive",
            (false, _) => "not strictly positive",
        };
        out.push_str(&format!("type {name}: {class}\n"));
        for v in &p.violations {
            out.push_str(&format!("  {}\n", v.reason));
        }
    }
    for i in &report.issues {
        out.push_str(&format!("error: {i}\n"));
    }
    for n in &report.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| {
        let message = match &e {
            LoadError::Signature(v) => format!("{}: {e}\n{}", path.display(), validation_text(&v.report)),
            _ => format!("{}:{e}", path.display()),
        };
        let payload = match &e {
            LoadError::Signature(v) => json!({ "signature": &*v.report, "error": e.to_string() }),
            _ => json!({ "error": e.to_string() }),
        };
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message,
            payload: Some(payload),
        }
    })
}

/// A named term of the file, or the text elaborated as a term.
fn input_term(doc: &Document, expr: &str) -> Result<Term, Failure> {
    if let Some(t) = doc.terms.get(expr) {
        return Ok(t.clone());
    }
    doc.term(expr).map_err(|e| usage(format!("term: {e}")))
}

fn inductive(doc: &Document, name: &str) -> Result<Type, Failure> {
    if doc.signature().is_inductive(name) {
        Ok(Type::ind(name))
    } else {
        Err(usage(format!("{name} is not an inductive type")))
    }
}

fn check_text(doc: &Document, report: &SchemaReport, explain: bool) -> String {
    let mut out = validation_text(&doc.validation);
    for w in &doc.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for r in &report.rules {
        let status = if r.accepted { "accepted" } else { "rejected" };
        let tag = if r.constructor_headed { " (constructor-headed)" } else { "" };
        out.push_str(&format!("rule {}: {status}{tag}  {}\n", r.index, r.rule));
        if let Some(d) = &r.diagnosis {
            out.push_str(&format!("  at {d}\n"));
        }
        if explain {
            for v in &r.variables {
                match &v.access {
                    Some(p) => out.push_str(&format!("  {} accessible via {p}\n", v.var)),
                    None => out.push_str(&format!("  {} not accessible\n", v.var)),
                }
            }
            for d in r.derivations() {
                for line in d.to_string().lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            }
        }
    }
    let accepted = report.rules.iter().filter(|r| r.accepted).count();
    out.push_str(&format!("{accepted}/{} rules accepted\n", report.rules.len()));
    out.push_str(&format!("verdict: {}\n", report.verdict));
    out
}

fn print_spec(spec: &SpecFile) -> String {
    spec.to_string()
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let structured = cli.format == Format::Structured;
    match &cli.command {
        Command::Check { file, explain } => {
            let doc = load(file)?;
            let report = check_system(&doc.system);
            let out = if structured {
                let warnings: Vec<String> = doc.warnings.iter().map(|w| w.to_string()).collect();
                json!({ "signature": doc.validation, "schema": report, "warnings": warnings }).to_string()
            } else {
                check_text(&doc, &report, *explain)
            };
            if report.verdict == SystemVerdict::NotGuaranteed {
                return Err(Failure {
                    code: 1,
                    message: out,
                    payload: None,
                });
            }
            Ok(out)
        }
        Command::Normalize {
            file,
            expr,
            fuel,
            strategy,
            trace,
        } => {
            let doc = load(file)?;
            let t = input_term(&doc, expr)?;
            let opts = NormalizeOptions {
                fuel: *fuel,
                strategy: *strategy,
                record_trace: *trace || structured,
            };
            match doc.system.normalize(&t, &opts) {
                Ok(n) if structured => Ok(json!({
                    "normal_form": n.normal_form,
                    "steps": n.steps,
                    "trace": n.trace,
                })
                .to_string()),
                Ok(n) if *trace => Ok(format!("{}{}", n.trace, n.normal_form)),
                Ok(n) => Ok(n.normal_form.to_string()),
                Err(e) => Err(Failure {
                    code: 1,
                    message: format!("{e}\nlast term: {}", e.last),
                    payload: Some(json!({ "error": e.to_string(), "fuel": e.fuel, "last": e.last })),
                }),
            }
        }
        Command::Recursors { file, class, target } => {
            let doc = load(file)?;
            let target = parse_type(target).map_err(|e| usage(format!("target: {e}")))?;
            let bundle = generate_recursors(doc.signature(), class, &target).map_err(transform_failure)?;
            let mut spec = doc.spec.clone();
            spec.statements.extend(bundle.delta.statements());
            if structured {
                let rules: Vec<String> = bundle.delta.rules.iter().map(|r| r.to_string()).collect();
                Ok(json!({ "recursors": bundle.recursors, "rules": rules, "spec": print_spec(&spec) }).to_string())
            } else {
                Ok(print_spec(&spec))
            }
        }
        Command::Currify { file, symbol } => {
            let doc = load(file)?;
            let delta = currify(doc.signature(), symbol).map_err(transform_failure)?;
            let mut spec = doc.spec.clone();
            spec.statements.extend(delta.statements());
            if structured {
                let rules: Vec<String> = delta.rules.iter().map(|r| r.to_string()).collect();
                Ok(json!({ "rules": rules, "spec": print_spec(&spec) }).to_string())
            } else {
                Ok(print_spec(&spec))
            }
        }
        Command::EncodeCond { file } => {
            let doc = load(file)?;
            let enc = encode_conditional(doc.signature(), doc.rules()).map_err(transform_failure)?;
            let mut spec = spec_of(&enc.delta.extend(doc.signature().declarations()), &enc.rules);
            spec.statements.extend(
                doc.spec
                    .statements
                    .iter()
                    .filter(|s| matches!(s, idts::syntax::Statement::Term { .. }))
                    .cloned(),
            );
            if structured {
                Ok(json!({ "rewritten": enc.rewritten, "spec": print_spec(&spec) }).to_string())
            } else {
                Ok(print_spec(&spec))
            }
        }
        Command::Erase { file, expr, wrt } => {
            let doc = load(file)?;
            let t = input_term(&doc, expr)?;
            inductive(&doc, wrt)?;
            let erased = erase(&t, wrt);
            if structured {
                Ok(json!({
                    "term": t,
                    "wrt": wrt,
                    "positive": s_positive(&t, wrt),
                    "erased": erased,
                })
                .to_string())
            } else {
                Ok(erased.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let structured = cli.format == Format::Structured;
    match run(&cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(f) => {
            match (&f.payload, structured) {
                (Some(p), true) => emit(&p.to_string()),
                _ if f.code == 1 => emit(&f.message),
                _ => eprintln!("error: {}", f.message.trim_end()),
            }
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout; a closed pipe ends output silently.
fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", text.trim_end());
}
