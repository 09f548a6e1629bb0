//! The two-sorted expression language: Boolean tests over a finite set of
//! primitive tests, and weighted guarded programs built from actions, outputs,
//! guarded choice, weighted choice, sequencing and guarded loops.

mod parse;
mod pretty;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::Weight;

pub use parse::{parse, parse_bexp, ParseError, ParseErrorKind, Parser};

/// Identifier shared between the signature and expression trees.
pub type Name = Arc<str>;

/// Default cap on the number of primitive tests (64 atoms).
pub const DEFAULT_MAX_TESTS: usize = 6;

const RESERVED: [&str; 5] = ["0", "1", "if", "while", "inf"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("`{0}` is declared more than once")]
    Duplicate(String),
    #[error("{count} primitive tests exceed the cap of {cap}")]
    TooManyTests { count: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("unknown test `{0}`")]
    UnknownTest(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown output `{0}`")]
    UnknownOutput(String),
}

/// What a declared identifier denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Test(usize),
    Action,
    Output,
}

/// The primitive tests (ordered), actions and outputs an expression may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    tests: Vec<Name>,
    actions: BTreeSet<Name>,
    outputs: BTreeSet<Name>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new<T, A, O>(tests: T, actions: A, outputs: O) -> Result<Self, SignatureError>
    where
        T: IntoIterator,
        T::Item: AsRef<str>,
        A: IntoIterator,
        A::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        Self::with_max_tests(tests, actions, outputs, DEFAULT_MAX_TESTS)
    }

    pub fn with_max_tests<T, A, O>(
        tests: T,
        actions: A,
        outputs: O,
        max_tests: usize,
    ) -> Result<Self, SignatureError>
    where
        T: IntoIterator,
        T::Item: AsRef<str>,
        A: IntoIterator,
        A::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        let mut check = |s: &str| -> Result<Name, SignatureError> {
            if RESERVED.contains(&s) {
                return Err(SignatureError::Reserved(s.to_string()));
            }
            if !is_identifier(s) {
                return Err(SignatureError::InvalidName(s.to_string()));
            }
            if !seen.insert(s.to_string()) {
                return Err(SignatureError::Duplicate(s.to_string()));
            }
            Ok(Name::from(s))
        };
        let tests = tests
            .into_iter()
            .map(|t| check(t.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let actions = actions
            .into_iter()
            .map(|t| check(t.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let outputs = outputs
            .into_iter()
            .map(|t| check(t.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        // hard limit of the u64 atom representation
        let cap = max_tests.min(63);
        if tests.len() > cap {
            return Err(SignatureError::TooManyTests {
                count: tests.len(),
                cap,
            });
        }
        Ok(Signature {
            tests,
            actions,
            outputs,
        })
    }

    pub fn tests(&self) -> &[Name] {
        &self.tests
    }

    pub fn actions(&self) -> impl Iterator<Item = &Name> {
        self.actions.iter()
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Name> {
        self.outputs.iter()
    }

    pub fn classify(&self, name: &str) -> Option<NameKind> {
        if let Some(i) = self.tests.iter().position(|t| &**t == name) {
            Some(NameKind::Test(i))
        } else if self.actions.contains(name) {
            Some(NameKind::Action)
        } else if self.outputs.contains(name) {
            Some(NameKind::Output)
        } else {
            None
        }
    }

    /// All `2^|T|` atoms, in binary counting order over the declared tests.
    /// The first declared test is the most significant bit.
    pub fn atoms(&self) -> Vec<Atom> {
        let width = self.tests.len() as u8;
        (0..1u64 << width)
            .map(|bits| Atom { bits, width })
            .collect()
    }

    pub fn atom_count(&self) -> usize {
        1 << self.tests.len()
    }

    /// Truth-table evaluation of `b` under the assignment `atom`.
    pub fn entails(&self, atom: &Atom, b: &BExp) -> Result<bool, NameError> {
        Ok(match b {
            BExp::False => false,
            BExp::True => true,
            BExp::Prim(t) => match self.classify(t) {
                Some(NameKind::Test(i)) => atom.holds(i),
                _ => return Err(NameError::UnknownTest(t.to_string())),
            },
            BExp::Not(b) => !self.entails(atom, b)?,
            BExp::Or(b, c) => self.entails(atom, b)? || self.entails(atom, c)?,
            BExp::And(b, c) => self.entails(atom, b)? && self.entails(atom, c)?,
        })
    }

    /// The conjunction of literals that denotes exactly `atom`.
    pub fn atom_bexp(&self, atom: &Atom) -> BExp {
        self.tests
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let p = BExp::Prim(t.clone());
                if atom.holds(i) {
                    p
                } else {
                    BExp::not(p)
                }
            })
            .reduce(BExp::and)
            .unwrap_or(BExp::True)
    }

    pub fn check_bexp(&self, b: &BExp) -> Result<(), NameError> {
        match b {
            BExp::False | BExp::True => Ok(()),
            BExp::Prim(t) => match self.classify(t) {
                Some(NameKind::Test(_)) => Ok(()),
                _ => Err(NameError::UnknownTest(t.to_string())),
            },
            BExp::Not(b) => self.check_bexp(b),
            BExp::Or(b, c) | BExp::And(b, c) => {
                self.check_bexp(b)?;
                self.check_bexp(c)
            }
        }
    }

    /// Checks that every name in `e` resolves with the right kind.
    pub fn check_expr(&self, e: &Expr) -> Result<(), NameError> {
        match e {
            Expr::Test(b) => self.check_bexp(b),
            Expr::Action(p) => match self.classify(p) {
                Some(NameKind::Action) => Ok(()),
                _ => Err(NameError::UnknownAction(p.to_string())),
            },
            Expr::Output(v) => match self.classify(v) {
                Some(NameKind::Output) => Ok(()),
                _ => Err(NameError::UnknownOutput(v.to_string())),
            },
            Expr::GuardedChoice(e, b, f) => {
                self.check_bexp(b)?;
                self.check_expr(e)?;
                self.check_expr(f)
            }
            Expr::WeightedChoice(e, _, _, f) | Expr::Seq(e, f) => {
                self.check_expr(e)?;
                self.check_expr(f)
            }
            Expr::Loop(e, b) => {
                self.check_bexp(b)?;
                self.check_expr(e)
            }
        }
    }
}

/// A total truth assignment to the primitive tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    bits: u64,
    width: u8,
}

impl Atom {
    /// Truth value of the `i`-th declared test.
    pub fn holds(&self, i: usize) -> bool {
        debug_assert!(i < self.width as usize);
        self.bits >> (self.width as usize - 1 - i) & 1 == 1
    }

    /// Position in [`Signature::atoms`].
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }
}

/// Boolean tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BExp {
    False,
    True,
    Prim(Name),
    Not(Box<BExp>),
    Or(Box<BExp>, Box<BExp>),
    And(Box<BExp>, Box<BExp>),
}

impl BExp {
    pub fn prim(name: &str) -> BExp {
        BExp::Prim(Name::from(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: BExp) -> BExp {
        BExp::Not(Box::new(b))
    }

    pub fn or(b: BExp, c: BExp) -> BExp {
        BExp::Or(Box::new(b), Box::new(c))
    }

    pub fn and(b: BExp, c: BExp) -> BExp {
        BExp::And(Box::new(b), Box::new(c))
    }
}

/// Weighted guarded programs. Children are shared so that derivatives can
/// reuse sub-terms without copying.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    /// `assert b`
    Test(BExp),
    /// `do p`
    Action(Name),
    /// `return v`
    Output(Name),
    /// `if b then e else f`, written `e +[b] f`
    GuardedChoice(Arc<Expr>, BExp, Arc<Expr>),
    /// `e` with weight `r` and `f` with weight `s`, written `e [r, s] f`
    WeightedChoice(Arc<Expr>, Weight, Weight, Arc<Expr>),
    /// `e ; f`
    Seq(Arc<Expr>, Arc<Expr>),
    /// `while b do e`, written `e^(b)`
    Loop(Arc<Expr>, BExp),
}

impl Expr {
    pub fn one() -> Expr {
        Expr::Test(BExp::True)
    }

    pub fn zero() -> Expr {
        Expr::Test(BExp::False)
    }

    pub fn test(b: BExp) -> Expr {
        Expr::Test(b)
    }

    pub fn action(p: &str) -> Expr {
        Expr::Action(Name::from(p))
    }

    pub fn output(v: &str) -> Expr {
        Expr::Output(Name::from(v))
    }

    pub fn guarded(e: Expr, b: BExp, f: Expr) -> Expr {
        Expr::GuardedChoice(Arc::new(e), b, Arc::new(f))
    }

    pub fn weighted(e: Expr, r: Weight, s: Weight, f: Expr) -> Expr {
        Expr::WeightedChoice(Arc::new(e), r, s, Arc::new(f))
    }

    pub fn seq(e: Expr, f: Expr) -> Expr {
        Expr::Seq(Arc::new(e), Arc::new(f))
    }

    pub fn looping(e: Expr, b: BExp) -> Expr {
        Expr::Loop(Arc::new(e), b)
    }

    /// Scaling `@r`, i.e. `1 [r, 0] 0`.
    pub fn scale(r: Weight) -> Expr {
        let zero = r.semiring().zero();
        Expr::weighted(Expr::one(), r, zero, Expr::zero())
    }

    /// If this is the desugared form of `@r`, returns `r`.
    pub fn as_scaling(&self) -> Option<&Weight> {
        match self {
            Expr::WeightedChoice(e, r, s, f)
                if s.is_zero()
                    && **e == Expr::Test(BExp::True)
                    && **f == Expr::Test(BExp::False) =>
            {
                Some(r)
            }
            _ => None,
        }
    }

    /// `e ; e ; ... ; e` (`n >= 1` copies), nested to the right.
    pub fn power(e: Expr, n: usize) -> Expr {
        assert!(n >= 1, "n-fold composition needs n >= 1");
        let e = Arc::new(e);
        let mut acc = e.clone();
        for _ in 1..n {
            acc = Arc::new(Expr::Seq(e.clone(), acc));
        }
        Arc::try_unwrap(acc).unwrap_or_else(|a| (*a).clone())
    }

    /// The state-count bound: `#(b) = #(v) = 1`, `#(p) = 2`, binary operators
    /// add, loops inherit the body's bound.
    pub fn size_bound(&self) -> u64 {
        match self {
            Expr::Test(_) | Expr::Output(_) => 1,
            Expr::Action(_) => 2,
            Expr::GuardedChoice(e, _, f) | Expr::WeightedChoice(e, _, _, f) | Expr::Seq(e, f) => {
                e.size_bound() + f.size_bound()
            }
            Expr::Loop(e, _) => e.size_bound(),
        }
    }

    /// Number of syntax-tree nodes (guards count as one node).
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Test(_) | Expr::Action(_) | Expr::Output(_) => 1,
            Expr::GuardedChoice(e, _, f) | Expr::WeightedChoice(e, _, _, f) | Expr::Seq(e, f) => {
                1 + e.node_count() + f.node_count()
            }
            Expr::Loop(e, _) => 1 + e.node_count(),
        }
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        pretty::write_bexp(f, self, 0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        pretty::write_expr(f, self, 0)
    }
}

/// Pretty-prints `e` in the concrete syntax accepted by [`parse`].
pub fn pretty(e: &Expr) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig2() -> Signature {
        Signature::new(["t1", "t2"], ["p"], ["v"]).unwrap()
    }

    #[test]
    fn atom_enumeration() {
        let empty = Signature::new(Vec::<&str>::new(), ["p"], ["v"]).unwrap();
        assert_eq!(empty.atoms().len(), 1);
        assert!(empty.entails(&empty.atoms()[0], &BExp::True).unwrap());

        let one = Signature::new(["t"], ["p"], ["v"]).unwrap();
        let at = one.atoms();
        assert_eq!(at.len(), 2);
        assert!(!at[0].holds(0));
        assert!(at[1].holds(0));

        let at = sig2().atoms();
        let pattern: Vec<(bool, bool)> = at.iter().map(|a| (a.holds(0), a.holds(1))).collect();
        assert_eq!(
            pattern,
            vec![(false, false), (false, true), (true, false), (true, true)]
        );
    }

    #[test]
    fn entailment_examples() {
        let sig = sig2();
        let a = sig.atoms()[2]; // t1, !t2
        let or = BExp::or(BExp::prim("t1"), BExp::prim("t2"));
        assert!(sig.entails(&a, &or).unwrap());
        for at in sig.atoms() {
            assert!(sig.entails(&at, &BExp::True).unwrap());
            assert!(!sig.entails(&at, &BExp::False).unwrap());
        }
        let one = Signature::new(["t1"], ["p"], ["v"]).unwrap();
        let b = BExp::and(BExp::not(BExp::prim("t1")), BExp::True);
        assert!(one.entails(&one.atoms()[0], &b).unwrap());
        assert_eq!(
            sig.entails(&a, &BExp::prim("nope")),
            Err(NameError::UnknownTest("nope".into()))
        );
    }

    #[test]
    fn atom_bexp_selects_exactly_one_atom() {
        let sig = sig2();
        for a in sig.atoms() {
            let b = sig.atom_bexp(&a);
            for c in sig.atoms() {
                assert_eq!(sig.entails(&c, &b).unwrap(), a == c);
            }
        }
    }

    #[test]
    fn signature_validation() {
        assert_eq!(
            Signature::new(["if"], ["p"], ["v"]),
            Err(SignatureError::Reserved("if".into()))
        );
        assert_eq!(
            Signature::new(["t"], ["t"], ["v"]),
            Err(SignatureError::Duplicate("t".into()))
        );
        assert!(matches!(
            Signature::new(["a", "b", "c", "d", "e", "f", "g"], ["p"], ["v"]),
            Err(SignatureError::TooManyTests { count: 7, cap: 6 })
        ));
        assert!(
            Signature::with_max_tests(["a", "b", "c", "d", "e", "f", "g"], ["p"], ["v"], 7).is_ok()
        );
        assert!(matches!(
            Signature::new(["3x"], ["p"], ["v"]),
            Err(SignatureError::InvalidName(_))
        ));
    }

    #[test]
    fn size_bound_examples() {
        let p = Expr::action("p");
        assert_eq!(p.size_bound(), 2);
        assert_eq!(Expr::looping(p.clone(), BExp::prim("t")).size_bound(), 2);
        assert_eq!(Expr::seq(p, Expr::output("v")).size_bound(), 3);
    }

    #[test]
    fn power_nests_to_the_right() {
        let p = Expr::action("p");
        assert_eq!(Expr::power(p.clone(), 1), p);
        assert_eq!(
            Expr::power(p.clone(), 3),
            Expr::seq(p.clone(), Expr::seq(p.clone(), p))
        );
    }
}
