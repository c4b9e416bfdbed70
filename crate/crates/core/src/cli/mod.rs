//! Command-line front end: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! input errors (unreadable or malformed documents, exceeded guards).

pub mod commands;
pub mod document;
pub mod generate;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::extension::{DEFAULT_ELEMENT_GUARD, DEFAULT_EQUIVALENCE_GUARD};
use crate::linalg::DEFAULT_TOL;
use crate::spectral::DEFAULT_SPECTRAL_GUARD;
use commands::Report;
use document::{emit, parse, ExtensionDocument, Loaded};
use generate::DEFAULT_GENERATE_GUARD;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cartanlab", version, about = "Finite Cartan pairs from inverse monoid extensions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Phase order; overrides the document unless it carries a cocycle.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Size guard for the running command.
    #[arg(long, global = true, env = "CARTANLAB_GUARD")]
    guard: Option<u64>,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also write the machine-readable output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of the file written by --out.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the monoid axioms and the cocycle.
    Validate { doc: PathBuf },
    /// Build and check an order-preserving section.
    Section { doc: PathBuf },
    /// Build the matrix representation and check its identities.
    Represent { doc: PathBuf },
    /// Run the operator-algebra oracle.
    Oracle { doc: PathBuf },
    /// Enumerate spectral sets and match them with bimodules.
    Spectral { doc: PathBuf },
    /// List and verify maximal subdiagonal spectral monoids.
    Msd { doc: PathBuf },
    /// List and verify maximal triangular spectral monoids.
    Mtr { doc: PathBuf },
    /// Decide whether two extensions are equivalent.
    Equiv { a: PathBuf, b: PathBuf },
    /// Emit a generated document.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// All partial bijections on n atoms.
    Rook { n: usize },
    /// Partial bijections inside the blocks of a partition such as 0,1|2.
    Eqrel { partition: String },
    /// Disjoint union of two documents.
    Product { a: PathBuf, b: PathBuf },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Format { .. } | Error::SizeGuard { .. } | Error::AtomMismatch { .. } => 2,
        Error::Closure(_) | Error::Domain(_) | Error::Orthogonality { .. } | Error::InvariantViolation(_) => 1,
    }
}

fn in_file(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Format { location, message } => {
            Error::format(format!("{}: {location}", path.display()), message)
        }
        other => other,
    }
}

fn read_document(path: &Path, k: Option<u32>) -> Result<ExtensionDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
    let mut doc = parse(&text).map_err(in_file(path))?;
    if let Some(k) = k {
        if doc.cocycle.is_some() && k != doc.k {
            return Err(Error::format(
                "--k",
                format!("document carries a cocycle for k = {}", doc.k),
            ));
        }
        doc.k = k;
    }
    Ok(doc)
}

fn load(path: &Path, k: Option<u32>) -> Result<Loaded> {
    read_document(path, k)?.load().map_err(in_file(path))
}

/// What a command produced: a report, or a document/dump to print as is.
enum Output {
    Report(Report, Option<String>),
    Document(String),
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let guard = cli.guard.map(u128::from);
    let spectral_guard = guard.map_or(DEFAULT_SPECTRAL_GUARD, |g| g as usize);
    let element_guard = guard.unwrap_or(DEFAULT_ELEMENT_GUARD);
    let tol = cli.tol;
    let report = |r: Report| Ok(Output::Report(r, None));
    match &cli.command {
        Command::Validate { doc } => report(commands::validate(&load(doc, cli.k)?)?),
        Command::Section { doc } => report(commands::section(&load(doc, cli.k)?)?),
        Command::Represent { doc } => {
            let loaded = load(doc, cli.k)?;
            let (r, dump) = commands::represent(&loaded, element_guard, tol, cli.format == Format::Json)?;
            Ok(Output::Report(r, Some(dump)))
        }
        Command::Oracle { doc } => report(commands::oracle(&load(doc, cli.k)?, element_guard, tol)?),
        Command::Spectral { doc } => report(commands::spectral(&load(doc, cli.k)?, spectral_guard, tol)?),
        Command::Msd { doc } => report(commands::msd_report(&load(doc, cli.k)?, spectral_guard, tol)?),
        Command::Mtr { doc } => report(commands::mtr_report(&load(doc, cli.k)?, spectral_guard, tol)?),
        Command::Equiv { a, b } => {
            let size = guard.map_or(DEFAULT_EQUIVALENCE_GUARD, |g| g as usize);
            report(commands::equiv(&load(a, cli.k)?, &load(b, cli.k)?, size)?)
        }
        Command::Gen { kind } => {
            let g = guard.unwrap_or(DEFAULT_GENERATE_GUARD);
            let k = cli.k.unwrap_or(1);
            let doc = match kind {
                GenKind::Rook { n } => generate::rook(*n, k, g)?,
                GenKind::Eqrel { partition } => generate::eqrel(&generate::parse_partition(partition)?, k, g)?,
                GenKind::Product { a, b } => {
                    generate::product(&read_document(a, cli.k)?, &read_document(b, cli.k)?, g)?
                }
            };
            Ok(Output::Document(emit(&doc)))
        }
    }
}

/// Runs one invocation without touching the process's stdout or exit status.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (code, stdout, file) = match dispatch(&cli) {
        Ok(Output::Report(r, attachment)) => {
            let file = attachment.unwrap_or_else(|| match cli.format {
                Format::Text => r.text(),
                Format::Json => r.json(),
            });
            (if r.passed { 0 } else { 1 }, r.text(), file)
        }
        Ok(Output::Document(text)) => (0, text.clone(), text),
        Err(e) => {
            return Outcome {
                code: exit_code(&e),
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &file) {
            return Outcome {
                code: 2,
                stdout,
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            };
        }
    }
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}
