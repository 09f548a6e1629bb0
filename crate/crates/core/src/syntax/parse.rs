//! Recursive-descent parser for the concrete syntax.
//!
//! ```text
//! expr    := choice
//! choice  := seq ( "+[" bexp "]" seq | "[" weight "," weight "]" seq )?
//! seq     := prim ( ";" prim )*
//! prim    := "@" weight | ident | "0" | "1" | "(" expr ")" | prim "^(" bexp ")" | prim "^^" INT
//! bexp    := bterm ( "+" bterm )*
//! bterm   := bfact ( "." bfact )*
//! bfact   := "!" bfact | "0" | "1" | ident | "(" bexp ")"
//! ```
//!
//! A primary that parses as a Boolean test (including compound tests such as
//! `!t` or `(t + u)`) becomes an assertion. Choices do not associate: nested
//! choices need parentheses. Sequencing nests to the right.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{BExp, Expr, NameKind, Signature};
use crate::semiring::{SemiringError, SemiringId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    BadChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("`{0}` is not a primitive test")]
    NotATest(String),
    #[error("choice operators do not associate; add parentheses")]
    ChainedChoice,
    #[error("repetition count must be a positive integer")]
    BadRepetition,
    #[error(transparent)]
    Weight(#[from] SemiringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Semi,
    LBracket,
    RBracket,
    Comma,
    At,
    Bang,
    Dot,
    Slash,
    Minus,
    Plus,
    PlusBracket,
    LoopOpen,
    Power,
    Assign,
    EqEq,
    NotEq,
    Num(String),
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Semi => "`;`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::At => "`@`",
            Tok::Bang => "`!`",
            Tok::Dot => "`.`",
            Tok::Slash => "`/`",
            Tok::Minus => "`-`",
            Tok::Plus => "`+`",
            Tok::PlusBracket => "`+[`",
            Tok::LoopOpen => "`^(`",
            Tok::Power => "`^^`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::NotEq => "`!=`",
            Tok::Num(n) => return write!(f, "number `{n}`"),
            Tok::Ident(i) => return write!(f, "`{i}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, first_line, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ';' => Tok::Semi,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '@' => Tok::At,
            '.' => Tok::Dot,
            '/' => Tok::Slash,
            '-' => Tok::Minus,
            '!' if chars.get(i + 1) == Some(&'=') => {
                advance(1, &mut i, &mut col);
                Tok::NotEq
            }
            '!' => Tok::Bang,
            '=' if chars.get(i + 1) == Some(&'=') => {
                advance(1, &mut i, &mut col);
                Tok::EqEq
            }
            '=' => Tok::Assign,
            '+' => {
                // `+[` may contain spaces: a bracket can never start a test
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '\n' && chars[j].is_whitespace() {
                    j += 1;
                }
                if chars.get(j) == Some(&'[') {
                    advance(j - i, &mut i, &mut col);
                    Tok::PlusBracket
                } else {
                    Tok::Plus
                }
            }
            '^' => match chars.get(i + 1) {
                Some('(') => {
                    advance(1, &mut i, &mut col);
                    Tok::LoopOpen
                }
                Some('^') => {
                    advance(1, &mut i, &mut col);
                    Tok::Power
                }
                _ => {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseErrorKind::BadChar('^'),
                    })
                }
            },
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Num(chars[start..i].iter().collect()),
                    line: start_line,
                    col: start_col,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: start_line,
                    col: start_col,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::BadChar(other),
                })
            }
        };
        advance(1, &mut i, &mut col);
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Token-level parser over one piece of text. Most callers want [`parse`].
pub struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
    semiring: SemiringId,
    bindings: Option<&'a HashMap<String, Expr>>,
}

impl<'a> Parser<'a> {
    pub fn new(text: &str, sig: &'a Signature, semiring: SemiringId) -> Result<Self, ParseError> {
        Self::at_line(text, 1, sig, semiring)
    }

    /// Like [`Parser::new`], numbering the first line of `text` as `line`.
    pub fn at_line(
        text: &str,
        line: usize,
        sig: &'a Signature,
        semiring: SemiringId,
    ) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, line)?,
            pos: 0,
            sig,
            semiring,
            bindings: None,
        })
    }

    /// Identifiers bound here expand to their expression.
    pub fn with_bindings(mut self, bindings: &'a HashMap<String, Expr>) -> Self {
        self.bindings = Some(bindings);
        self
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    /// Position of the next token.
    pub fn position(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::PlusBracket | Tok::LBracket => Err(self.error_here(ParseErrorKind::ChainedChoice)),
            _ => Err(self.unexpected("end of input")),
        }
    }

    /// Consumes a bare identifier.
    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    /// Consumes `=`.
    pub fn assign(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::Assign)
    }

    /// Consumes `==` (returns `true`) or `!=` (returns `false`).
    pub fn relation(&mut self) -> Result<bool, ParseError> {
        match self.peek() {
            Tok::EqEq => {
                self.bump();
                Ok(true)
            }
            Tok::NotEq => {
                self.bump();
                Ok(false)
            }
            Tok::PlusBracket | Tok::LBracket => Err(self.error_here(ParseErrorKind::ChainedChoice)),
            _ => Err(self.unexpected("`==` or `!=`")),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.seq()?;
        match self.peek() {
            Tok::PlusBracket => {
                self.bump();
                let b = self.bexp()?;
                self.expect(Tok::RBracket)?;
                let rhs = self.seq()?;
                Ok(Expr::guarded(lhs, b, rhs))
            }
            Tok::LBracket => {
                self.bump();
                let r = self.weight()?;
                self.expect(Tok::Comma)?;
                let s = self.weight()?;
                self.expect(Tok::RBracket)?;
                let rhs = self.seq()?;
                Ok(Expr::weighted(lhs, r, s, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn seq(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.prim()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            items.push(self.prim()?);
        }
        let mut acc = items.pop().expect("at least one item");
        while let Some(e) = items.pop() {
            acc = Expr::seq(e, acc);
        }
        Ok(acc)
    }

    fn prim(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Tok::LoopOpen => {
                    self.bump();
                    let b = self.bexp()?;
                    self.expect(Tok::RParen)?;
                    e = Expr::looping(e, b);
                }
                Tok::Power => {
                    self.bump();
                    let n = match self.peek().clone() {
                        Tok::Num(n) => n
                            .parse::<usize>()
                            .ok()
                            .filter(|n| *n >= 1)
                            .ok_or_else(|| self.error_here(ParseErrorKind::BadRepetition))?,
                        _ => return Err(self.error_here(ParseErrorKind::BadRepetition)),
                    };
                    self.bump();
                    e = Expr::power(e, n);
                }
                _ => return Ok(e),
            }
        }
    }

    fn starts_test(&self) -> bool {
        match self.peek() {
            Tok::Bang | Tok::LParen => true,
            Tok::Num(n) => n == "0" || n == "1",
            Tok::Ident(name) => {
                !self.is_bound(name) && matches!(self.sig.classify(name), Some(NameKind::Test(_)))
            }
            _ => false,
        }
    }

    fn is_bound(&self, name: &str) -> bool {
        self.bindings.is_some_and(|b| b.contains_key(name))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        if self.starts_test() {
            let save = self.pos;
            match self.bexp() {
                Ok(b) => return Ok(Expr::Test(b)),
                Err(err) => {
                    if self.toks[save].tok == Tok::LParen {
                        self.pos = save;
                    } else {
                        return Err(err);
                    }
                }
            }
        }
        match self.peek().clone() {
            Tok::At => {
                self.bump();
                Ok(Expr::scale(self.weight()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(e)
                    }
                    Tok::PlusBracket | Tok::LBracket => {
                        Err(self.error_here(ParseErrorKind::ChainedChoice))
                    }
                    _ => Err(self.unexpected("`)`")),
                }
            }
            Tok::Ident(name) => {
                if let Some(e) = self.bindings.and_then(|b| b.get(&name)) {
                    let e = e.clone();
                    self.bump();
                    return Ok(e);
                }
                let e = match self.sig.classify(&name) {
                    Some(NameKind::Action) => Expr::action(&name),
                    Some(NameKind::Output) => Expr::output(&name),
                    _ => return Err(self.error_here(ParseErrorKind::UnknownIdentifier(name))),
                };
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    pub fn bexp(&mut self) -> Result<BExp, ParseError> {
        let mut acc = self.bterm()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = BExp::or(acc, self.bterm()?);
        }
        Ok(acc)
    }

    fn bterm(&mut self) -> Result<BExp, ParseError> {
        let mut acc = self.bfact()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            acc = BExp::and(acc, self.bfact()?);
        }
        Ok(acc)
    }

    fn bfact(&mut self) -> Result<BExp, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(BExp::not(self.bfact()?))
            }
            Tok::Num(n) if n == "0" => {
                self.bump();
                Ok(BExp::False)
            }
            Tok::Num(n) if n == "1" => {
                self.bump();
                Ok(BExp::True)
            }
            Tok::Ident(name) => match self.sig.classify(&name) {
                Some(NameKind::Test(_)) => {
                    self.bump();
                    Ok(BExp::prim(&name))
                }
                Some(_) => Err(self.error_here(ParseErrorKind::NotATest(name))),
                None => Err(self.error_here(ParseErrorKind::UnknownIdentifier(name))),
            },
            Tok::LParen => {
                self.bump();
                let b = self.bexp()?;
                self.expect(Tok::RParen)?;
                Ok(b)
            }
            _ => Err(self.unexpected("a test")),
        }
    }

    fn weight(&mut self) -> Result<crate::semiring::Weight, ParseError> {
        let (line, col) = self.position();
        let mut text = String::new();
        if *self.peek() == Tok::Minus {
            self.bump();
            text.push('-');
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                text.push_str(&n);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Num(d) => {
                            self.bump();
                            text.push('/');
                            text.push_str(&d);
                        }
                        _ => return Err(self.unexpected("a denominator")),
                    }
                }
            }
            Tok::Ident(i) if i == "inf" => {
                self.bump();
                text.push_str("inf");
            }
            _ => return Err(self.unexpected("a weight")),
        }
        self.semiring.parse_weight(&text).map_err(|e| ParseError {
            line,
            col,
            kind: e.into(),
        })
    }
}

/// Parses a complete expression.
pub fn parse(text: &str, sig: &Signature, semiring: SemiringId) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, sig, semiring)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a complete Boolean test.
pub fn parse_bexp(text: &str, sig: &Signature) -> Result<BExp, ParseError> {
    let mut p = Parser::new(text, sig, SemiringId::Boolean)?;
    let b = p.bexp()?;
    p.expect_end()?;
    Ok(b)
}
