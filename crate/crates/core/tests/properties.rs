use std::sync::Arc;

use proptest::prelude::*;

use wgkat_core::axioms::default_signature;
use wgkat_core::equivalence::{
    coarsest_bisimulation, equivalent, initial_partition, refine, Partition,
};
use wgkat_core::gen::Gen;
use wgkat_core::semantics::{derivative, ee, explore, Automaton};
use wgkat_core::semiring::SemiringId;
use wgkat_core::syntax::{parse, parse_bexp, BExp, Expr, Signature};
use wgkat_core::weighting::{Target, Weighting};

fn semiring() -> impl Strategy<Value = SemiringId> {
    proptest::sample::select(SemiringId::ALL.to_vec())
}

fn gen_for(seed: u64, sr: SemiringId) -> (Signature, Gen) {
    let sig = default_signature();
    let g = Gen::new(seed, &sig, sr);
    (sig, g)
}

/// The weighted-choice rule written out entry by entry.
fn weighted_choice_by_hand(
    sr: SemiringId,
    de: &Weighting<Arc<Expr>>,
    r: &wgkat_core::semiring::Weight,
    df: &Weighting<Arc<Expr>>,
    s: &wgkat_core::semiring::Weight,
) -> Weighting<Arc<Expr>> {
    let mut keys: Vec<Target<Arc<Expr>>> = de.iter().map(|(x, _)| x.clone()).collect();
    keys.extend(df.iter().map(|(x, _)| x.clone()));
    keys.sort();
    keys.dedup();
    let mut out = Weighting::empty(sr);
    for x in keys {
        let v = &(r * &de.get(&x)) + &(s * &df.get(&x));
        out.add_at(x, &v);
    }
    out
}

fn is_stable(aut: &Automaton, p: &Partition) -> bool {
    refine(aut, p).block_count() == p.block_count()
}

fn merged(p: &Partition, a: usize, b: usize) -> Partition {
    Partition::from_labels((0..p.len()).map(|s| {
        let k = p.block_of(s);
        if k == b {
            a
        } else {
            k
        }
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pretty_then_parse_is_identity(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let e = g.expr(4);
        let text = e.to_string();
        prop_assert_eq!(parse(&text, &sig, sr).unwrap(), e, "{}", text);
    }

    #[test]
    fn bexp_round_trip_and_partition(seed in any::<u64>()) {
        let (sig, mut g) = gen_for(seed, SemiringId::Boolean);
        let b = g.bexp(4);
        prop_assert_eq!(parse_bexp(&b.to_string(), &sig).unwrap(), b.clone());
        let not_b = BExp::not(b.clone());
        for atom in sig.atoms() {
            let yes = sig.entails(&atom, &b).unwrap();
            let no = sig.entails(&atom, &not_b).unwrap();
            prop_assert!(yes != no);
            // every atom entails exactly its own literal conjunction
            prop_assert!(sig.entails(&atom, &sig.atom_bexp(&atom)).unwrap());
        }
    }

    #[test]
    fn boolean_algebra_laws(seed in any::<u64>()) {
        let (sig, mut g) = gen_for(seed, SemiringId::Boolean);
        let (a, b, c) = (g.bexp(3), g.bexp(3), g.bexp(3));
        let laws = [
            (BExp::not(BExp::or(a.clone(), b.clone())), BExp::and(BExp::not(a.clone()), BExp::not(b.clone()))),
            (BExp::and(a.clone(), BExp::or(b.clone(), c.clone())), BExp::or(BExp::and(a.clone(), b.clone()), BExp::and(a.clone(), c.clone()))),
            (BExp::or(a.clone(), BExp::and(b.clone(), c.clone())), BExp::and(BExp::or(a.clone(), b.clone()), BExp::or(a.clone(), c.clone()))),
            (BExp::or(a.clone(), BExp::not(a.clone())), BExp::True),
            (BExp::and(a.clone(), BExp::not(a.clone())), BExp::False),
            (BExp::not(BExp::not(a.clone())), a.clone()),
        ];
        for atom in sig.atoms() {
            for (l, r) in &laws {
                prop_assert_eq!(sig.entails(&atom, l).unwrap(), sig.entails(&atom, r).unwrap());
            }
        }
    }

    #[test]
    fn guard_locality(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let (e, f, b) = (g.expr(3), g.expr(3), g.bexp(2));
        let gc = Arc::new(Expr::guarded(e.clone(), b.clone(), f.clone()));
        let (e, f) = (Arc::new(e), Arc::new(f));
        for atom in sig.atoms() {
            let picked = if sig.entails(&atom, &b).unwrap() { &e } else { &f };
            prop_assert_eq!(
                derivative(&sig, sr, &gc, &atom).unwrap(),
                derivative(&sig, sr, picked, &atom).unwrap()
            );
        }
    }

    #[test]
    fn weighted_choice_linearity(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let (e, f, r, s) = (g.expr(3), g.expr(3), g.weight(), g.weight());
        let wc = Arc::new(Expr::weighted(e.clone(), r.clone(), s.clone(), f.clone()));
        let (e, f) = (Arc::new(e), Arc::new(f));
        for atom in sig.atoms() {
            let de = derivative(&sig, sr, &e, &atom).unwrap();
            let df = derivative(&sig, sr, &f, &atom).unwrap();
            let got = derivative(&sig, sr, &wc, &atom).unwrap();
            prop_assert!(got.is_well_formed());
            prop_assert_eq!(got, weighted_choice_by_hand(sr, &de, &r, &df, &s));
        }
    }

    #[test]
    fn loop_unrolls_when_body_does_not_accept(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let (e, b) = (g.expr(3), g.bexp(2));
        let l = Expr::looping(e.clone(), b.clone());
        let unrolled = Arc::new(Expr::guarded(Expr::seq(e.clone(), l.clone()), b, Expr::one()));
        let l = Arc::new(l);
        for atom in sig.atoms() {
            if ee(&sig, sr, &e, &atom).unwrap().is_zero() {
                prop_assert_eq!(
                    derivative(&sig, sr, &l, &atom).unwrap(),
                    derivative(&sig, sr, &unrolled, &atom).unwrap()
                );
            }
        }
        let l = Arc::try_unwrap(l).unwrap();
        let unrolled = Arc::try_unwrap(unrolled).unwrap();
        prop_assert!(equivalent(&sig, sr, &l, &unrolled).unwrap());
    }

    #[test]
    fn exploration_is_deterministic_and_closed(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let e = g.expr(4);
        let a = explore(&sig, sr, &e).unwrap();
        prop_assert_eq!(&a, &explore(&sig, sr, &e).unwrap());
        for s in 0..a.state_count() {
            for i in 0..a.atoms().len() {
                for (x, _) in a.transition(s, i).iter() {
                    if let Target::Step(_, t) = x {
                        prop_assert!(*t < a.state_count());
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_reaches_a_maximal_stable_partition(seed in any::<u64>(), sr in semiring()) {
        let sig = Signature::new(["t"], ["p", "q"], ["v"]).unwrap();
        let mut g = Gen::new(seed, &sig, sr);
        let aut = g.automaton(8);
        let mut p = initial_partition(&aut);
        loop {
            let q = refine(&aut, &p);
            prop_assert!(q.block_count() >= p.block_count());
            if q.block_count() == p.block_count() {
                break;
            }
            p = q;
        }
        let fix = coarsest_bisimulation(&aut);
        prop_assert!(is_stable(&aut, &fix));
        prop_assert_eq!(refine(&aut, &fix).blocks(), fix.blocks());
        // the fixpoint is maximal: merging any two blocks breaks stability
        for a in 0..fix.block_count() {
            for b in a + 1..fix.block_count() {
                let m = merged(&fix, a, b);
                prop_assert!(!is_stable(&aut, &m));
            }
        }
    }

    #[test]
    fn equivalence_is_an_equivalence(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        let xs: Vec<Expr> = (0..4).map(|_| g.expr(2)).collect();
        let eq = |a: &Expr, b: &Expr| equivalent(&sig, sr, a, b).unwrap();
        for a in &xs {
            prop_assert!(eq(a, a));
            for b in &xs {
                prop_assert_eq!(eq(a, b), eq(b, a));
                for c in &xs {
                    if eq(a, b) && eq(b, c) {
                        prop_assert!(eq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_is_a_congruence(seed in any::<u64>(), sr in semiring()) {
        let (sig, mut g) = gen_for(seed, sr);
        // e and its one-step unrolling are always equivalent
        let e = g.expr(3);
        let e2 = wgkat_core::equivalence::normal_form(&sig, sr, &e).unwrap();
        let (h, f, r, s, b) = (g.expr(2), g.expr(2), g.weight(), g.weight(), g.bexp(2));
        let eq = |a: &Expr, b: &Expr| equivalent(&sig, sr, a, b).unwrap();
        prop_assert!(eq(&e, &e2));
        prop_assert!(eq(&Expr::seq(e.clone(), h.clone()), &Expr::seq(e2.clone(), h)));
        prop_assert!(eq(
            &Expr::weighted(e.clone(), r.clone(), s.clone(), f.clone()),
            &Expr::weighted(e2.clone(), r, s, f)
        ));
        prop_assert!(eq(&Expr::looping(e.clone(), b.clone()), &Expr::looping(e2, b)));
    }
}
