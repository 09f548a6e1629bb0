//! Randomized soundness checks of the equational axioms and derived facts.
//!
//! Each axiom instance is a list of equations that must all be decided
//! equivalent. Rules with premises are instantiated so that the premise
//! holds by construction; the premise is checked as well as the conclusion.

use crate::equivalence::equivalent;
use crate::gen::Gen;
use crate::semantics::SemanticsError;
use crate::semiring::{SemiringId, Weight};
use crate::syntax::{BExp, Expr, Signature};

/// Nesting depth of generated sub-expressions.
pub const DEPTH: u32 = 4;

type Equation = (Expr, Expr);
type Builder = fn(&mut Gen) -> Vec<Equation>;

pub struct Axiom {
    pub name: &'static str,
    build: Builder,
}

impl Axiom {
    /// Draws one instance.
    pub fn instantiate(&self, g: &mut Gen) -> Vec<Equation> {
        (self.build)(g)
    }
}

fn t(b: BExp) -> Expr {
    Expr::Test(b)
}

fn at(r: Weight) -> Expr {
    Expr::scale(r)
}

fn seq(e: Expr, f: Expr) -> Expr {
    Expr::seq(e, f)
}

fn gc(e: Expr, b: BExp, f: Expr) -> Expr {
    Expr::guarded(e, b, f)
}

fn wc(e: Expr, r: Weight, s: Weight, f: Expr) -> Expr {
    Expr::weighted(e, r, s, f)
}

fn e(g: &mut Gen) -> Expr {
    g.expr(DEPTH)
}

fn b(g: &mut Gen) -> BExp {
    g.bexp(2)
}

fn w(g: &mut Gen) -> Weight {
    g.weight()
}

fn one(g: &Gen) -> Weight {
    g.semiring().one()
}

fn zero(g: &Gen) -> Weight {
    g.semiring().zero()
}

fn output(g: &mut Gen) -> Expr {
    use rand::seq::IteratorRandom;
    let sig = g.signature().clone();
    let v = sig.outputs().choose(g.rng()).expect("outputs").clone();
    Expr::Output(v)
}

macro_rules! axiom {
    ($name:literal, |$g:ident| $body:expr) => {
        Axiom {
            name: $name,
            build: |$g: &mut Gen| $body,
        }
    };
}

/// The axioms and derived facts, in a fixed order.
pub fn corpus() -> Vec<Axiom> {
    vec![
        axiom!("G1", |g| {
            let (x, c) = (e(g), b(g));
            vec![(gc(x.clone(), c, x.clone()), x)]
        }),
        axiom!("G2", |g| {
            let (x, c, y) = (e(g), b(g), e(g));
            vec![(
                gc(x.clone(), c.clone(), y.clone()),
                gc(seq(t(c.clone()), x), c, y),
            )]
        }),
        axiom!("G3", |g| {
            let (x, c, y) = (e(g), b(g), e(g));
            vec![(gc(x.clone(), c.clone(), y.clone()), gc(y, BExp::not(c), x))]
        }),
        axiom!("G4", |g| {
            let (x, c, y, d, z) = (e(g), b(g), e(g), b(g), e(g));
            vec![(
                gc(gc(x.clone(), c.clone(), y.clone()), d.clone(), z.clone()),
                gc(x, BExp::and(c, d.clone()), gc(y, d, z)),
            )]
        }),
        axiom!("D1", |g| {
            let (x, r, s, y, c, z) = (e(g), w(g), w(g), e(g), b(g), e(g));
            vec![(
                wc(
                    x.clone(),
                    r.clone(),
                    s.clone(),
                    gc(y.clone(), c.clone(), z.clone()),
                ),
                gc(wc(x.clone(), r.clone(), s.clone(), y), c, wc(x, r, s, z)),
            )]
        }),
        axiom!("D2", |g| {
            let (x, r, s, y, tw, u, z) = (e(g), w(g), w(g), e(g), w(g), w(g), e(g));
            let o = one(g);
            vec![(
                wc(
                    x.clone(),
                    r.clone(),
                    s.clone(),
                    wc(y.clone(), tw.clone(), u.clone(), z.clone()),
                ),
                wc(x, r, o, wc(y, &s * &tw, &s * &u, z)),
            )]
        }),
        axiom!("D3", |g| {
            let (c, x, r, s, y) = (b(g), e(g), w(g), w(g), e(g));
            vec![(
                seq(t(c.clone()), wc(x.clone(), r.clone(), s.clone(), y.clone())),
                seq(t(c.clone()), wc(seq(t(c.clone()), x), r, s, seq(t(c), y))),
            )]
        }),
        axiom!("S1", |g| {
            let x = e(g);
            vec![
                (seq(Expr::one(), x.clone()), x.clone()),
                (seq(x.clone(), Expr::one()), x),
            ]
        }),
        axiom!("S2", |g| {
            let (x, y, z) = (e(g), e(g), e(g));
            vec![(seq(seq(x.clone(), y.clone()), z.clone()), seq(x, seq(y, z)))]
        }),
        axiom!("S3", |g| {
            let x = e(g);
            vec![(seq(Expr::zero(), x), Expr::zero())]
        }),
        axiom!("S4", |g| {
            let (x, r, s, y, z) = (e(g), w(g), w(g), e(g), e(g));
            vec![(
                seq(wc(x.clone(), r.clone(), s.clone(), y.clone()), z.clone()),
                wc(seq(x, z.clone()), r, s, seq(y, z)),
            )]
        }),
        axiom!("S5", |g| {
            let (x, c, y, z) = (e(g), b(g), e(g), e(g));
            vec![(
                seq(gc(x.clone(), c.clone(), y.clone()), z.clone()),
                gc(seq(x, z.clone()), c, seq(y, z)),
            )]
        }),
        axiom!("S6", |g| {
            let (v, x) = (output(g), e(g));
            vec![(seq(v.clone(), x), v)]
        }),
        axiom!("S7", |g| {
            let (c, d) = (b(g), b(g));
            vec![(seq(t(c.clone()), t(d.clone())), t(BExp::and(c, d)))]
        }),
        axiom!("L1", |g| {
            let (x, c) = (e(g), b(g));
            let l = Expr::looping(x.clone(), c.clone());
            vec![(l.clone(), gc(seq(x, l), c, Expr::one()))]
        }),
        axiom!("L2", |g| {
            // premise holds syntactically: x = (f [r,s] 1) +[c] h
            let (f, r, s, c, h, d) = (e(g), w(g), w(g), b(g), e(g), b(g));
            let x = gc(
                wc(f.clone(), r.clone(), s.clone(), Expr::one()),
                c.clone(),
                h,
            );
            let l = Expr::looping(x, d.clone());
            let k = &s.star() * &r;
            vec![(
                seq(t(c.clone()), l.clone()),
                seq(t(c), gc(seq(at(k), seq(f, l)), d, Expr::one())),
            )]
        }),
        axiom!("C1", |g| vec![(at(one(g)), Expr::one())]),
        axiom!("C2", |g| {
            let x = e(g);
            let z = zero(g);
            vec![(seq(at(z.clone()), x), at(z))]
        }),
        axiom!("W1", |g| {
            let (x, r, s) = (e(g), w(g), w(g));
            vec![(
                wc(x.clone(), r.clone(), s.clone(), x.clone()),
                seq(at(&r + &s), x),
            )]
        }),
        axiom!("W2", |g| {
            let (x, r, s, y) = (e(g), w(g), w(g), e(g));
            vec![(
                wc(x.clone(), r.clone(), s.clone(), y.clone()),
                wc(y, s, r, x),
            )]
        }),
        axiom!("W3", |g| {
            let (x, r, s, y, tw, u, z) = (e(g), w(g), w(g), e(g), w(g), w(g), e(g));
            let o = one(g);
            vec![(
                wc(
                    x.clone(),
                    r.clone(),
                    s.clone(),
                    wc(y.clone(), tw.clone(), u.clone(), z.clone()),
                ),
                wc(wc(x, r, &s * &tw, y), o, &s * &u, z),
            )]
        }),
        axiom!("W4", |g| {
            let (x, r, u, s, y) = (e(g), w(g), w(g), w(g), e(g));
            vec![(
                wc(x.clone(), &r * &u, s.clone(), y.clone()),
                wc(seq(at(u), x), r, s, y),
            )]
        }),
        axiom!("F1", |g| {
            // x never accepts immediately; h unrolls x^(c);f once, so it
            // satisfies the premise whenever the rule is sound
            let (x, c, f) = (g.productive(DEPTH - 1), b(g), e(g));
            let l = seq(Expr::looping(x.clone(), c.clone()), f.clone());
            let h = gc(seq(x.clone(), l.clone()), c.clone(), f.clone());
            vec![(h.clone(), gc(seq(x, h.clone()), c, f)), (h, l)]
        }),
        axiom!("DF1", |g| {
            let (tw, x, r, s, y) = (w(g), e(g), w(g), w(g), e(g));
            vec![(
                seq(
                    at(tw.clone()),
                    wc(x.clone(), r.clone(), s.clone(), y.clone()),
                ),
                wc(x, &tw * &r, &tw * &s, y),
            )]
        }),
        axiom!("DF2", |g| {
            let (x, c, y, d, z) = (e(g), b(g), e(g), b(g), e(g));
            vec![(
                gc(x.clone(), c.clone(), gc(y.clone(), d.clone(), z.clone())),
                gc(gc(x, c.clone(), y), BExp::or(c, d), z),
            )]
        }),
        axiom!("DF3", |g| {
            let (x, c) = (e(g), b(g));
            vec![(gc(x.clone(), c.clone(), Expr::zero()), seq(t(c), x))]
        }),
        axiom!("DF4", |g| {
            let (c, x, y) = (b(g), e(g), e(g));
            vec![(seq(t(c.clone()), gc(x.clone(), c.clone(), y)), seq(t(c), x))]
        }),
        axiom!("DF5", |g| {
            let (x, c, y, r, s, z) = (e(g), b(g), e(g), w(g), w(g), e(g));
            vec![(
                wc(
                    gc(x.clone(), c.clone(), y.clone()),
                    r.clone(),
                    s.clone(),
                    z.clone(),
                ),
                gc(wc(x, r.clone(), s.clone(), z.clone()), c, wc(y, r, s, z)),
            )]
        }),
        axiom!("DF6", |g| {
            let (x, c, y, r, s, z, h) = (e(g), b(g), e(g), w(g), w(g), e(g), e(g));
            vec![(
                wc(
                    gc(x.clone(), c.clone(), y.clone()),
                    r.clone(),
                    s.clone(),
                    gc(z.clone(), c.clone(), h.clone()),
                ),
                gc(wc(x, r.clone(), s.clone(), z), c, wc(y, r, s, h)),
            )]
        }),
        axiom!("DF7", |g| {
            let (x, y) = (e(g), e(g));
            vec![(gc(x.clone(), BExp::True, y), x)]
        }),
        axiom!("DF8", |g| {
            let (c, x, d, y) = (b(g), e(g), b(g), e(g));
            vec![(
                seq(t(c.clone()), gc(x.clone(), d.clone(), y.clone())),
                gc(seq(t(c.clone()), x), d, seq(t(c), y)),
            )]
        }),
        axiom!("DF9", |g| {
            let (c, x, d, y) = (b(g), e(g), b(g), e(g));
            vec![(
                seq(t(c.clone()), gc(x.clone(), d.clone(), y.clone())),
                seq(t(c.clone()), gc(seq(t(c), x), d, y)),
            )]
        }),
        axiom!("DF10", |g| {
            let (r, s) = (w(g), w(g));
            vec![(seq(at(r.clone()), at(s.clone())), at(&r * &s))]
        }),
        axiom!("DF11", |g| {
            let (r, x, c, y) = (w(g), e(g), b(g), e(g));
            vec![(
                seq(at(r.clone()), gc(x.clone(), c.clone(), y.clone())),
                gc(seq(at(r.clone()), x), c, seq(at(r), y)),
            )]
        }),
        axiom!("DF12", |g| {
            let (x, r, s) = (e(g), w(g), w(g));
            let z = zero(g);
            vec![(wc(x.clone(), r.clone(), s, at(z)), seq(at(r), x))]
        }),
        axiom!("DF13", |g| {
            let (c, x, r, s, y) = (b(g), e(g), w(g), w(g), e(g));
            vec![(
                seq(t(c.clone()), wc(x.clone(), r.clone(), s.clone(), y.clone())),
                seq(t(c.clone()), wc(seq(t(c), x), r, s, y)),
            )]
        }),
        axiom!("DF14", |g| {
            let (h, s, tw, x, r, u) = (e(g), w(g), w(g), e(g), w(g), w(g));
            let z = zero(g);
            vec![(
                wc(
                    h.clone(),
                    s.clone(),
                    tw.clone(),
                    wc(x.clone(), r.clone(), u, at(z)),
                ),
                wc(h, s, &tw * &r, x),
            )]
        }),
    ]
}

/// W4 with `r` and `s` swapped on the right-hand side only. Unsound.
pub fn mutant() -> Axiom {
    axiom!("W4-swapped", |g| {
        let (x, r, u, s, y) = (e(g), w(g), w(g), w(g), e(g));
        vec![(
            wc(x.clone(), &r * &u, s.clone(), y.clone()),
            wc(seq(at(u), x), s, r, y),
        )]
    })
}

/// Signature used for axiom instances.
pub fn default_signature() -> Signature {
    Signature::new(["t", "u"], ["p", "q"], ["v", "w"]).expect("fixed signature is valid")
}

/// Outcome for one axiom over a batch of instances.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// First failing equation, if any.
    pub counterexample: Option<Equation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

/// Checks `count` random instances of `axiom`.
pub fn check_axiom(
    axiom: &Axiom,
    sig: &Signature,
    sr: SemiringId,
    seed: u64,
    count: usize,
) -> Result<AxiomReport, SemanticsError> {
    let mut g = Gen::new(seed, sig, sr);
    let mut report = AxiomReport {
        name: axiom.name,
        passed: 0,
        total: count,
        counterexample: None,
    };
    for _ in 0..count {
        let mut ok = true;
        for (lhs, rhs) in axiom.instantiate(&mut g) {
            if !equivalent(sig, sr, &lhs, &rhs)? {
                ok = false;
                if report.counterexample.is_none() {
                    report.counterexample = Some((lhs, rhs));
                }
                break;
            }
        }
        if ok {
            report.passed += 1;
        }
    }
    Ok(report)
}

/// Runs the whole corpus. Each axiom gets its own stream derived from `seed`.
pub fn run_corpus(
    sig: &Signature,
    sr: SemiringId,
    seed: u64,
    count: usize,
) -> Result<Vec<AxiomReport>, SemanticsError> {
    corpus()
        .iter()
        .enumerate()
        .map(|(i, ax)| {
            check_axiom(
                ax,
                sig,
                sr,
                seed.wrapping_add(i as u64 * 0x9E37_79B9),
                count,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_has_all_names() {
        let names: Vec<&str> = corpus().iter().map(|a| a.name).collect();
        assert_eq!(names.len(), 23 + 14);
        for n in ["G1", "D3", "S7", "L2", "C2", "W4", "F1", "DF1", "DF14"] {
            assert!(names.contains(&n), "{n}");
        }
    }

    #[test]
    fn small_batch_passes() {
        let sig = default_signature();
        for sr in [SemiringId::Boolean, SemiringId::ExtNaturals] {
            for r in run_corpus(&sig, sr, 1, 5).unwrap() {
                assert!(r.ok(), "{} over {sr}: {:?}", r.name, r.counterexample);
            }
        }
    }

    #[test]
    fn mutant_is_caught() {
        let sig = default_signature();
        let r = check_axiom(&mutant(), &sig, SemiringId::ExtNaturals, 5, 50).unwrap();
        assert!(!r.ok());
    }
}
