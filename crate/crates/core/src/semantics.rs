//! Operational semantics: derivatives, the immediate-acceptance weight `E`,
//! and exploration of the reachable automaton.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::{SemiringId, Weight};
use crate::syntax::{Atom, Expr, NameError, Signature};
use crate::weighting::{Target, Weighting};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Name(#[from] NameError),
    #[error("weight `{weight}` does not belong to the {expected} semiring")]
    Carrier {
        weight: Weight,
        expected: SemiringId,
    },
    #[error("exploration reached {states} states, above the syntactic bound {bound}")]
    StateBound { states: usize, bound: u64 },
    #[error("state {state} has {found} transition rows, expected {expected}")]
    BadRow {
        state: usize,
        found: usize,
        expected: usize,
    },
    #[error("transition of state {state} points to missing state {target}")]
    DanglingStep { state: usize, target: usize },
}

/// One-step behavior with continuations still given as expressions.
pub type Derivative = Weighting<Arc<Expr>>;

fn check_carrier(e: &Expr, sr: SemiringId) -> Result<(), SemanticsError> {
    match e {
        Expr::Test(_) | Expr::Action(_) | Expr::Output(_) => Ok(()),
        Expr::WeightedChoice(e, r, s, f) => {
            for w in [r, s] {
                if w.semiring() != sr {
                    return Err(SemanticsError::Carrier {
                        weight: w.clone(),
                        expected: sr,
                    });
                }
            }
            check_carrier(e, sr)?;
            check_carrier(f, sr)
        }
        Expr::GuardedChoice(e, _, f) | Expr::Seq(e, f) => {
            check_carrier(e, sr)?;
            check_carrier(f, sr)
        }
        Expr::Loop(e, _) => check_carrier(e, sr),
    }
}

/// Checks names against `sig` and weights against `sr`.
pub fn validate(e: &Expr, sig: &Signature, sr: SemiringId) -> Result<(), SemanticsError> {
    sig.check_expr(e)?;
    check_carrier(e, sr)
}

/// Weight of immediate acceptance of `e` under `atom`, by its own recursion.
pub fn ee(sig: &Signature, sr: SemiringId, e: &Expr, atom: &Atom) -> Result<Weight, NameError> {
    Ok(match e {
        Expr::Action(_) | Expr::Output(_) => sr.zero(),
        Expr::Test(b) => {
            if sig.entails(atom, b)? {
                sr.one()
            } else {
                sr.zero()
            }
        }
        Expr::GuardedChoice(e, b, f) => {
            if sig.entails(atom, b)? {
                ee(sig, sr, e, atom)?
            } else {
                ee(sig, sr, f, atom)?
            }
        }
        Expr::WeightedChoice(e, r, s, f) => {
            &(r * &ee(sig, sr, e, atom)?) + &(s * &ee(sig, sr, f, atom)?)
        }
        Expr::Seq(e, f) => &ee(sig, sr, e, atom)? * &ee(sig, sr, f, atom)?,
        Expr::Loop(_, b) => {
            if sig.entails(atom, b)? {
                sr.zero()
            } else {
                sr.one()
            }
        }
    })
}

/// The derivative of `e` under `atom`.
pub fn derivative(
    sig: &Signature,
    sr: SemiringId,
    e: &Arc<Expr>,
    atom: &Atom,
) -> Result<Derivative, NameError> {
    Ok(match &**e {
        Expr::Test(b) => {
            let x = if sig.entails(atom, b)? {
                Target::Accept
            } else {
                Target::Reject
            };
            Weighting::dirac(sr, x)
        }
        Expr::Output(v) => Weighting::dirac(sr, Target::Output(v.clone())),
        Expr::Action(p) => Weighting::dirac(sr, Target::Step(p.clone(), Arc::new(Expr::one()))),
        Expr::GuardedChoice(e, b, f) => {
            if sig.entails(atom, b)? {
                derivative(sig, sr, e, atom)?
            } else {
                derivative(sig, sr, f, atom)?
            }
        }
        Expr::WeightedChoice(e, r, s, f) => {
            let de = derivative(sig, sr, e, atom)?.scale(r);
            let df = derivative(sig, sr, f, atom)?.scale(s);
            de.sum(&df)
        }
        Expr::Seq(e, f) => {
            let de = derivative(sig, sr, e, atom)?;
            let df = if de.get(&Target::Accept).is_zero() {
                Weighting::empty(sr)
            } else {
                derivative(sig, sr, f, atom)?
            };
            de.lin_apply(|x| match x {
                Target::Accept => df.clone(),
                Target::Step(p, e2) => Weighting::dirac(
                    sr,
                    Target::Step(p.clone(), Arc::new(Expr::Seq(e2.clone(), f.clone()))),
                ),
                other => Weighting::dirac(sr, other.clone()),
            })
        }
        Expr::Loop(body, b) => {
            if !sig.entails(atom, b)? {
                return Ok(Weighting::dirac(sr, Target::Accept));
            }
            let db = derivative(sig, sr, body, atom)?;
            let k = db.get(&Target::Accept).star();
            let mut out = Weighting::empty(sr);
            for (x, w) in db.iter() {
                let y = match x {
                    Target::Accept => continue,
                    Target::Step(p, e2) => {
                        Target::Step(p.clone(), Arc::new(Expr::Seq(e2.clone(), e.clone())))
                    }
                    other => other.clone(),
                };
                out.add_at(y, &(&k * w));
            }
            out
        }
    })
}

/// A finite automaton: one weighting per state and atom, with step targets
/// given as state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    semiring: SemiringId,
    atoms: Vec<Atom>,
    /// Expression behind each state; empty for hand-built automata.
    exprs: Vec<Arc<Expr>>,
    trans: Vec<Vec<Weighting<usize>>>,
    roots: Vec<usize>,
}

impl Automaton {
    /// Builds an automaton from an explicit transition table indexed by
    /// `[state][atom]`.
    pub fn from_table(
        semiring: SemiringId,
        atoms: Vec<Atom>,
        trans: Vec<Vec<Weighting<usize>>>,
    ) -> Result<Self, SemanticsError> {
        let n = trans.len();
        for (state, row) in trans.iter().enumerate() {
            if row.len() != atoms.len() {
                return Err(SemanticsError::BadRow {
                    state,
                    found: row.len(),
                    expected: atoms.len(),
                });
            }
            for w in row {
                for (x, _) in w.iter() {
                    if let Target::Step(_, t) = x {
                        if *t >= n {
                            return Err(SemanticsError::DanglingStep { state, target: *t });
                        }
                    }
                }
            }
        }
        Ok(Automaton {
            semiring,
            atoms,
            exprs: Vec::new(),
            trans,
            roots: if n > 0 { vec![0] } else { vec![] },
        })
    }

    pub fn semiring(&self) -> SemiringId {
        self.semiring
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    /// Transition weighting of `state` under the `atom`-th atom.
    pub fn transition(&self, state: usize, atom: usize) -> &Weighting<usize> {
        &self.trans[state][atom]
    }

    /// Expression a state was derived from, if the automaton was explored.
    pub fn expr(&self, state: usize) -> Option<&Arc<Expr>> {
        self.exprs.get(state)
    }

    /// State indices of the explored roots, in the order given.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }
}

/// Explores the automaton reachable from `e`; `e` is state 0.
pub fn explore(sig: &Signature, sr: SemiringId, e: &Expr) -> Result<Automaton, SemanticsError> {
    explore_many(sig, sr, std::slice::from_ref(e))
}

/// Explores from several roots with one shared interning table, so that
/// structurally equal states are merged.
pub fn explore_many(
    sig: &Signature,
    sr: SemiringId,
    roots: &[Expr],
) -> Result<Automaton, SemanticsError> {
    for e in roots {
        validate(e, sig, sr)?;
    }
    let bound: u64 = roots.iter().map(Expr::size_bound).sum();
    let atoms = sig.atoms();
    let mut index: HashMap<Arc<Expr>, usize> = HashMap::new();
    let mut exprs: Vec<Arc<Expr>> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |e: Arc<Expr>,
                      exprs: &mut Vec<Arc<Expr>>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, SemanticsError> {
        if let Some(&i) = index.get(&e) {
            return Ok(i);
        }
        let i = exprs.len();
        if i as u64 >= bound {
            return Err(SemanticsError::StateBound {
                states: i + 1,
                bound,
            });
        }
        index.insert(e.clone(), i);
        exprs.push(e);
        queue.push_back(i);
        Ok(i)
    };

    let mut root_ids = Vec::with_capacity(roots.len());
    for e in roots {
        root_ids.push(intern(Arc::new(e.clone()), &mut exprs, &mut queue)?);
    }

    let mut trans: Vec<Vec<Weighting<usize>>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let e = exprs[s].clone();
        let mut row = Vec::with_capacity(atoms.len());
        for atom in &atoms {
            let d = derivative(sig, sr, &e, atom)?;
            let mut w = Weighting::empty(sr);
            for (x, r) in d.iter() {
                let y = match x {
                    Target::Step(p, e2) => {
                        Target::Step(p.clone(), intern(e2.clone(), &mut exprs, &mut queue)?)
                    }
                    Target::Accept => Target::Accept,
                    Target::Reject => Target::Reject,
                    Target::Output(v) => Target::Output(v.clone()),
                };
                w.add_at(y, r);
            }
            row.push(w);
        }
        // breadth-first order means states are processed in index order
        debug_assert_eq!(trans.len(), s);
        trans.push(row);
    }

    Ok(Automaton {
        semiring: sr,
        atoms,
        exprs,
        trans,
        roots: root_ids,
    })
}
