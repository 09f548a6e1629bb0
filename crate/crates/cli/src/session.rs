//! Line-oriented session files.
//!
//! ```text
//! # comment
//! semiring tropical
//! tests t u
//! actions p q
//! outputs v
//! let body = 1 [1,2] v
//! check body^^3 ; v == @2 ; v
//! check @0 != 0
//! ```
//!
//! Declarations must precede the first `let` or `check`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;
use wgkat_core::semiring::SemiringId;
use wgkat_core::syntax::{ParseError, Parser, Signature, SignatureError, DEFAULT_MAX_TESTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{0}` is declared twice")]
    Redeclared(&'static str),
    #[error("`{0}` must come before any `let` or `check`")]
    LateDeclaration(&'static str),
    #[error("no semiring declared before the first expression")]
    MissingSemiring,
    #[error("`semiring` takes exactly one name")]
    SemiringArity,
    #[error(transparent)]
    Semiring(#[from] wgkat_core::semiring::SemiringError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("`{0}` is already bound")]
    Rebound(String),
    #[error("`{0}` is already declared as a test, action or output")]
    ShadowsSignature(String),
    #[error("{0}")]
    Parse(String),
}

/// A session error with its location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}:{col}: {kind}")]
pub struct SessionError {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub kind: SessionErrorKind,
}

/// One `check` line.
#[derive(Debug, Clone)]
pub struct Check {
    pub line: usize,
    pub lhs: wgkat_core::syntax::Expr,
    pub rhs: wgkat_core::syntax::Expr,
    /// `true` for `==`, `false` for `!=`.
    pub expect_equal: bool,
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub file: String,
    pub semiring: SemiringId,
    pub signature: Signature,
    pub bindings: HashMap<String, wgkat_core::syntax::Expr>,
    /// Line of each `let`.
    pub binding_lines: HashMap<String, usize>,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Decls {
    semiring: Option<SemiringId>,
    tests: Option<Vec<String>>,
    actions: Option<Vec<String>>,
    outputs: Option<Vec<String>>,
    /// Where `tests` was declared; signature errors are reported there.
    tests_at: Option<(usize, usize)>,
}

/// Splits off the first whitespace-delimited word, returning it, its
/// 1-based column, and the remainder.
fn first_word(line: &str) -> Option<(&str, usize)> {
    let start = line.find(|c: char| !c.is_whitespace())?;
    let rest = &line[start..];
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    Some((&rest[..end], start + 1))
}

fn words(line: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    for w in line.split_whitespace() {
        let at = line[i..].find(w).expect("word comes from line") + i;
        out.push((w, at + 1));
        i = at + w.len();
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl Session {
    pub fn parse(file: &str, text: &str) -> Result<Self, SessionError> {
        Self::parse_with_cap(file, text, DEFAULT_MAX_TESTS)
    }

    /// Parses with an explicit cap on the number of primitive tests.
    pub fn parse_with_cap(file: &str, text: &str, max_tests: usize) -> Result<Self, SessionError> {
        let err = |line: usize, col: usize, kind: SessionErrorKind| SessionError {
            file: file.to_string(),
            line,
            col,
            kind,
        };
        let from_parse = |e: ParseError| SessionError {
            file: file.to_string(),
            line: e.line,
            col: e.col,
            kind: SessionErrorKind::Parse(e.kind.to_string()),
        };

        let mut decls = Decls::default();
        let mut frozen: Option<(SemiringId, Signature)> = None;
        let mut bindings = HashMap::new();
        let mut binding_lines = HashMap::new();
        let mut checks = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = strip_comment(raw);
            let Some((head, col)) = first_word(line) else {
                continue;
            };
            match head {
                "semiring" | "tests" | "actions" | "outputs" => {
                    let name: &'static str = match head {
                        "semiring" => "semiring",
                        "tests" => "tests",
                        "actions" => "actions",
                        _ => "outputs",
                    };
                    if frozen.is_some() {
                        return Err(err(lineno, col, SessionErrorKind::LateDeclaration(name)));
                    }
                    let args = words(line);
                    let args = &args[1..];
                    let names = || args.iter().map(|(w, _)| w.to_string()).collect::<Vec<_>>();
                    let slot_taken = match name {
                        "semiring" => decls.semiring.is_some(),
                        "tests" => decls.tests.is_some(),
                        "actions" => decls.actions.is_some(),
                        _ => decls.outputs.is_some(),
                    };
                    if slot_taken {
                        return Err(err(lineno, col, SessionErrorKind::Redeclared(name)));
                    }
                    match name {
                        "semiring" => {
                            let [(id, at)] = args else {
                                return Err(err(lineno, col, SessionErrorKind::SemiringArity));
                            };
                            let sr = id
                                .parse::<SemiringId>()
                                .map_err(|e| err(lineno, *at, e.into()))?;
                            decls.semiring = Some(sr);
                        }
                        "tests" => {
                            decls.tests = Some(names());
                            decls.tests_at = Some((lineno, col));
                        }
                        "actions" => decls.actions = Some(names()),
                        _ => decls.outputs = Some(names()),
                    }
                }
                "let" | "check" => {
                    if frozen.is_none() {
                        let sr = decls
                            .semiring
                            .ok_or_else(|| err(lineno, col, SessionErrorKind::MissingSemiring))?;
                        let sig = Signature::with_max_tests(
                            decls.tests.take().unwrap_or_default(),
                            decls.actions.take().unwrap_or_default(),
                            decls.outputs.take().unwrap_or_default(),
                            max_tests,
                        )
                        .map_err(|e| {
                            let (l, c) = decls.tests_at.unwrap_or((lineno, col));
                            err(l, c, e.into())
                        })?;
                        frozen = Some((sr, sig));
                    }
                    let (sr, sig) = frozen.as_ref().expect("frozen above");
                    let mut p = Parser::at_line(line, lineno, sig, *sr)
                        .map_err(from_parse)?
                        .with_bindings(&bindings);
                    p.ident().map_err(from_parse)?;
                    if head == "let" {
                        let (l, c) = p.position();
                        let name = p.ident().map_err(from_parse)?;
                        if bindings.contains_key(&name) {
                            return Err(err(l, c, SessionErrorKind::Rebound(name)));
                        }
                        if sig.classify(&name).is_some() {
                            return Err(err(l, c, SessionErrorKind::ShadowsSignature(name)));
                        }
                        p.assign().map_err(from_parse)?;
                        let e = p.expr().map_err(from_parse)?;
                        p.expect_end().map_err(from_parse)?;
                        binding_lines.insert(name.clone(), lineno);
                        bindings.insert(name, e);
                    } else {
                        let lhs = p.expr().map_err(from_parse)?;
                        let expect_equal = p.relation().map_err(from_parse)?;
                        let rhs = p.expr().map_err(from_parse)?;
                        p.expect_end().map_err(from_parse)?;
                        let text = line[col - 1 + "check".len()..].trim().to_string();
                        checks.push(Check {
                            line: lineno,
                            lhs,
                            rhs,
                            expect_equal,
                            text,
                        });
                    }
                }
                other => {
                    return Err(err(
                        lineno,
                        col,
                        SessionErrorKind::UnknownDirective(other.to_string()),
                    ))
                }
            }
        }

        let (semiring, signature) = match frozen {
            Some(f) => f,
            None => {
                let sr = decls
                    .semiring
                    .ok_or_else(|| err(1, 1, SessionErrorKind::MissingSemiring))?;
                let sig = Signature::with_max_tests(
                    decls.tests.unwrap_or_default(),
                    decls.actions.unwrap_or_default(),
                    decls.outputs.unwrap_or_default(),
                    max_tests,
                )
                .map_err(|e| {
                    let (l, c) = decls.tests_at.unwrap_or((1, 1));
                    err(l, c, e.into())
                })?;
                (sr, sig)
            }
        };
        Ok(Session {
            file: file.to_string(),
            semiring,
            signature,
            bindings,
            binding_lines,
            checks,
        })
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
