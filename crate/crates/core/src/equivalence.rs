//! Bisimilarity by partition refinement, expression equivalence, and the
//! one-step normal form.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::sync::Arc;

use crate::semantics::{derivative, explore_many, validate, Automaton, SemanticsError};
use crate::semiring::{SemiringId, Weight};
use crate::syntax::{Expr, Name, Signature};
use crate::weighting::Target;

/// Assignment of states to blocks. Blocks are numbered in order of their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block: Vec<usize>,
    count: usize,
    iterations: usize,
}

impl Partition {
    /// Builds a partition from arbitrary block labels, renumbering them.
    pub fn from_labels<K: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let block: Vec<usize> = labels
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition {
            count: ids.len(),
            block,
            iterations: 0,
        }
    }

    pub fn block_of(&self, state: usize) -> usize {
        self.block[state]
    }

    pub fn block_count(&self) -> usize {
        self.count
    }

    /// Refinement rounds that produced this partition.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    /// Members of each block, in block order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (s, &b) in self.block.iter().enumerate() {
            out[b].push(s);
        }
        out
    }
}

fn push_weight(out: &mut String, w: &Weight) {
    // Display is canonical: reduced fractions, `inf`, `-inf`
    let _ = write!(out, "{w}");
}

/// Canonical encoding of a state's one-step behavior. Step weights are
/// aggregated per (action, block) when `blocks` is given and omitted
/// otherwise. Equal encodings mean equal behavior up to `blocks`.
pub fn state_signature(aut: &Automaton, state: usize, blocks: Option<&Partition>) -> Vec<u8> {
    let mut out = String::new();
    for a in 0..aut.atoms().len() {
        let w = aut.transition(state, a);
        let _ = write!(out, "#{a}");
        let mut steps: BTreeMap<(&Name, usize), Weight> = BTreeMap::new();
        for (x, r) in w.iter() {
            match x {
                Target::Accept => {
                    out.push_str("|A:");
                    push_weight(&mut out, r);
                }
                Target::Reject => {
                    out.push_str("|R:");
                    push_weight(&mut out, r);
                }
                Target::Output(v) => {
                    let _ = write!(out, "|O{v}:");
                    push_weight(&mut out, r);
                }
                Target::Step(p, t) => {
                    if let Some(part) = blocks {
                        let key = (p, part.block_of(*t));
                        let acc = steps.remove(&key).map_or_else(|| r.clone(), |old| &old + r);
                        steps.insert(key, acc);
                    }
                }
            }
        }
        for ((p, b), r) in steps {
            if !r.is_zero() {
                let _ = write!(out, "|S{p}>{b}:");
                push_weight(&mut out, &r);
            }
        }
    }
    out.into_bytes()
}

/// Groups states by their accept, reject and output weights only.
pub fn initial_partition(aut: &Automaton) -> Partition {
    Partition::from_labels((0..aut.state_count()).map(|s| state_signature(aut, s, None)))
}

/// One global splitting round against the blocks of `p`.
pub fn refine(aut: &Automaton, p: &Partition) -> Partition {
    let mut next = Partition::from_labels(
        (0..aut.state_count()).map(|s| (p.block_of(s), state_signature(aut, s, Some(p)))),
    );
    next.iterations = p.iterations + 1;
    next
}

/// Refines from the initial partition until the block count is stable.
/// The result groups exactly the bisimilar states.
pub fn coarsest_bisimulation(aut: &Automaton) -> Partition {
    let mut p = initial_partition(aut);
    loop {
        let q = refine(aut, &p);
        if q.count == p.count {
            return q;
        }
        p = q;
    }
}

pub fn bisimilar(aut: &Automaton, s: usize, t: usize) -> bool {
    let p = coarsest_bisimulation(aut);
    p.block_of(s) == p.block_of(t)
}

/// Result of an equivalence check, with the work it took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub equivalent: bool,
    pub states: usize,
    pub blocks: usize,
    pub iterations: usize,
}

/// Decides bisimilarity of two expressions over one shared automaton.
pub fn check_equivalence(
    sig: &Signature,
    sr: SemiringId,
    e: &Expr,
    f: &Expr,
) -> Result<Verdict, SemanticsError> {
    let aut = explore_many(sig, sr, &[e.clone(), f.clone()])?;
    let (s, t) = (aut.roots()[0], aut.roots()[1]);
    if s == t {
        return Ok(Verdict {
            equivalent: true,
            states: aut.state_count(),
            blocks: aut.state_count(),
            iterations: 0,
        });
    }
    let p = coarsest_bisimulation(&aut);
    Ok(Verdict {
        equivalent: p.block_of(s) == p.block_of(t),
        states: aut.state_count(),
        blocks: p.block_count(),
        iterations: p.iterations(),
    })
}

pub fn equivalent(
    sig: &Signature,
    sr: SemiringId,
    e: &Expr,
    f: &Expr,
) -> Result<bool, SemanticsError> {
    Ok(check_equivalence(sig, sr, e, f)?.equivalent)
}

fn target_expr(x: &Target<Arc<Expr>>) -> Expr {
    match x {
        Target::Accept => Expr::one(),
        Target::Reject => Expr::zero(),
        Target::Output(v) => Expr::Output(v.clone()),
        Target::Step(p, f) => Expr::Seq(Arc::new(Expr::Action(p.clone())), f.clone()),
    }
}

/// One unrolling of `e`: a guarded sum over all atoms of weighted sums over
/// the support of each derivative.
pub fn normal_form(sig: &Signature, sr: SemiringId, e: &Expr) -> Result<Expr, SemanticsError> {
    validate(e, sig, sr)?;
    let e = Arc::new(e.clone());
    let mut branches = Vec::new();
    for atom in sig.atoms() {
        let d = derivative(sig, sr, &e, &atom)?;
        let terms: Vec<(Weight, Expr)> =
            d.iter().map(|(x, w)| (w.clone(), target_expr(x))).collect();
        let sum = match terms.split_last() {
            // empty sum: the zero weighting
            None => Expr::seq(Expr::scale(sr.zero()), Expr::zero()),
            Some(((w, last), init)) => {
                let mut acc = Expr::seq(Expr::scale(w.clone()), last.clone());
                for (w, t) in init.iter().rev() {
                    acc = Expr::weighted(t.clone(), w.clone(), sr.one(), acc);
                }
                acc
            }
        };
        branches.push((sig.atom_bexp(&atom), sum));
    }
    let mut acc = Expr::zero();
    for (b, sum) in branches.into_iter().rev() {
        acc = Expr::guarded(sum, b, acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use crate::weighting::Weighting;

    fn nat(n: i64) -> Weight {
        SemiringId::ExtNaturals.int(n).unwrap()
    }

    /// The three-state automaton with two atoms from the worked example:
    /// x1 rejects with 4 and steps to x2, outputs or steps elsewhere; x2 and
    /// x3 accept with 15 everywhere.
    fn example_automaton() -> Automaton {
        let sr = SemiringId::ExtNaturals;
        let sig = Signature::new(["t"], ["p1", "p2", "p3"], ["v"]).unwrap();
        let mut alpha = Weighting::empty(sr);
        alpha.add_at(Target::Reject, &nat(4));
        alpha.add_at(Target::Step("p1".into(), 1), &nat(3));
        let mut beta = Weighting::empty(sr);
        beta.add_at(Target::Output("v".into()), &nat(1));
        beta.add_at(Target::Step("p2".into(), 1), &nat(5));
        beta.add_at(Target::Step("p3".into(), 2), &nat(2));
        let mut acc = Weighting::empty(sr);
        acc.add_at(Target::Accept, &nat(15));
        let trans = vec![
            vec![alpha, beta],
            vec![acc.clone(), acc.clone()],
            vec![acc.clone(), acc],
        ];
        Automaton::from_table(sr, sig.atoms(), trans).unwrap()
    }

    #[test]
    fn example_initial_partition_and_bisimilarity() {
        let aut = example_automaton();
        let p = initial_partition(&aut);
        assert_eq!(p.blocks(), vec![vec![0], vec![1, 2]]);
        assert!(bisimilar(&aut, 1, 2));
        assert!(!bisimilar(&aut, 0, 1));
        for s in 0..3 {
            assert!(bisimilar(&aut, s, s));
        }
        let steps = aut.transition(0, 1).mass(Target::is_step);
        assert_eq!(steps, nat(5 + 2));
    }

    #[test]
    fn split_on_step_destination() {
        // s0 and s1 agree on outputs but step into different blocks
        let sr = SemiringId::ExtNaturals;
        let sig = Signature::new::<[&str; 0], _, _>([], ["p"], ["v"]).unwrap();
        let mut to_self = Weighting::empty(sr);
        to_self.add_at(Target::Step("p".into(), 0), &nat(3));
        let mut to_two = Weighting::empty(sr);
        to_two.add_at(Target::Step("p".into(), 2), &nat(3));
        let acc = Weighting::dirac(sr, Target::Accept);
        let aut = Automaton::from_table(
            sr,
            sig.atoms(),
            vec![vec![to_self], vec![to_two], vec![acc]],
        )
        .unwrap();
        let p0 = initial_partition(&aut);
        assert_eq!(p0.block_count(), 2);
        let p1 = refine(&aut, &p0);
        assert_eq!(p1.blocks(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(refine(&aut, &p1).blocks(), p1.blocks());
    }

    #[test]
    fn abort_scaling_and_divergence_differ() {
        let sig = Signature::new(["t"], ["p"], ["v"]).unwrap();
        for sr in SemiringId::ALL {
            let zero = Expr::zero();
            // scaling by the semiring zero, which is `@inf` in tropical
            let at0 = Expr::scale(sr.zero());
            let div = parse("(1)^(1)", &sig, sr).unwrap();
            assert!(!equivalent(&sig, sr, &at0, &zero).unwrap(), "{sr}");
            assert!(!equivalent(&sig, sr, &div, &zero).unwrap(), "{sr}");
            assert!(equivalent(&sig, sr, &div, &at0).unwrap(), "{sr}");
        }
    }

    #[test]
    fn normal_form_shapes() {
        let sig = Signature::new(["t"], ["p"], ["v"]).unwrap();
        let sr = SemiringId::Tropical;
        let nf = normal_form(&sig, sr, &Expr::action("p")).unwrap();
        assert_eq!(nf.to_string(), "@0 ; p ; 1 +[!t] (@0 ; p ; 1 +[t] 0)");
        let nf = normal_form(&sig, sr, &Expr::one()).unwrap();
        assert_eq!(nf.to_string(), "@0 ; 1 +[!t] (@0 ; 1 +[t] 0)");
        let nf = normal_form(
            &sig,
            SemiringId::Boolean,
            &Expr::looping(Expr::one(), crate::syntax::BExp::True),
        )
        .unwrap();
        assert_eq!(nf.to_string(), "@0 ; 0 +[!t] (@0 ; 0 +[t] 0)");
        for text in ["p ; v", "(p [1, 2] v)^(t)", "1 [3, 4] 0"] {
            let e = parse(text, &sig, sr).unwrap();
            let nf = normal_form(&sig, sr, &e).unwrap();
            assert!(equivalent(&sig, sr, &nf, &e).unwrap(), "{text}");
            assert_eq!(parse(&nf.to_string(), &sig, sr).unwrap(), nf);
        }
    }

    #[test]
    fn ski_rental_three_days_two_to_buy() {
        let sig = Signature::new::<[&str; 0], _, _>([], ["p"], ["v"]).unwrap();
        let sr = SemiringId::Tropical;
        let e = parse("(1 [1,2] v)^^3 ; v", &sig, sr).unwrap();
        let f = parse("@2 ; v", &sig, sr).unwrap();
        assert!(equivalent(&sig, sr, &e, &f).unwrap());
    }
}
