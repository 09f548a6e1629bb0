//! Session-file front end: equivalence checks, normal forms, DOT export and
//! the axiom soundness suite.

pub mod dot;
pub mod session;

use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;
use wgkat_core::axioms::{check_axiom, default_signature, mutant, run_corpus};
use wgkat_core::equivalence::{check_equivalence, normal_form};
use wgkat_core::semantics::{explore, SemanticsError};
use wgkat_core::semiring::SemiringId;

pub use session::{Session, SessionError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{file}:{line}:1: {source}")]
    Semantics {
        file: String,
        line: usize,
        #[source]
        source: SemanticsError,
    },
    #[error("{file}: no binding named `{name}`")]
    Unbound { file: String, name: String },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

pub fn load(path: &Path, max_tests: usize) -> Result<Session, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    Ok(Session::parse_with_cap(&shown, &text, max_tests)?)
}

/// Runs every check in file order. Returns whether all assertions held.
pub fn run_check(s: &Session, quiet: bool, out: &mut impl Write) -> Result<bool, CliError> {
    let mut failed = 0;
    for c in &s.checks {
        let v = check_equivalence(&s.signature, s.semiring, &c.lhs, &c.rhs).map_err(|source| {
            CliError::Semantics {
                file: s.file.clone(),
                line: c.line,
                source,
            }
        })?;
        let held = v.equivalent == c.expect_equal;
        if !held {
            failed += 1;
        }
        if !quiet || !held {
            let verdict = if v.equivalent {
                "EQUIVALENT"
            } else {
                "NOT EQUIVALENT"
            };
            let status = if held { "ok" } else { "ASSERTION FAILED" };
            writeln!(
                out,
                "{}:{}: {verdict} ({} states, {} blocks, {} refinement rounds) {status}: {}",
                s.file, c.line, v.states, v.blocks, v.iterations, c
            )?;
        }
    }
    if !quiet {
        writeln!(
            out,
            "{} checks, {} passed, {failed} failed",
            s.checks.len(),
            s.checks.len() - failed
        )?;
    }
    Ok(failed == 0)
}

fn binding<'a>(
    s: &'a Session,
    name: &str,
) -> Result<(&'a wgkat_core::syntax::Expr, usize), CliError> {
    match (s.bindings.get(name), s.binding_lines.get(name)) {
        (Some(e), Some(&line)) => Ok((e, line)),
        _ => Err(CliError::Unbound {
            file: s.file.clone(),
            name: name.to_string(),
        }),
    }
}

pub fn run_nf(s: &Session, name: &str, out: &mut impl Write) -> Result<(), CliError> {
    let (e, line) = binding(s, name)?;
    let nf = normal_form(&s.signature, s.semiring, e).map_err(|source| CliError::Semantics {
        file: s.file.clone(),
        line,
        source,
    })?;
    writeln!(out, "{nf}")?;
    Ok(())
}

pub fn run_dot(s: &Session, name: &str, out: &mut impl Write) -> Result<(), CliError> {
    let (e, line) = binding(s, name)?;
    let aut = explore(&s.signature, s.semiring, e).map_err(|source| CliError::Semantics {
        file: s.file.clone(),
        line,
        source,
    })?;
    out.write_all(dot::render(&aut, &s.signature).as_bytes())?;
    Ok(())
}

/// Runs the axiom corpus, or only the unsound control when `control` is
/// set. Returns whether every instance passed.
pub fn run_axioms(
    semirings: &[SemiringId],
    seed: u64,
    count: usize,
    control: bool,
    quiet: bool,
    out: &mut impl Write,
) -> Result<bool, CliError> {
    let sig = default_signature();
    // generated instances are always well formed; this only surfaces bugs
    let wrap = |source| CliError::Semantics {
        file: "<axioms>".into(),
        line: 1,
        source,
    };
    let mut all_ok = true;
    for &sr in semirings {
        let reports = if control {
            vec![check_axiom(&mutant(), &sig, sr, seed, count).map_err(wrap)?]
        } else {
            run_corpus(&sig, sr, seed, count).map_err(wrap)?
        };
        for r in reports {
            all_ok &= r.ok();
            if !quiet || !r.ok() {
                writeln!(
                    out,
                    "{sr:<21} {:<11} {:>4}/{:<4} {}",
                    r.name,
                    r.passed,
                    r.total,
                    if r.ok() { "ok" } else { "FAILED" }
                )?;
            }
            if let Some((l, rr)) = &r.counterexample {
                writeln!(out, "  counterexample: {l}  vs  {rr}")?;
            }
        }
    }
    Ok(all_ok)
}
