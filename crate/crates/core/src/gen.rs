//! Seeded random generation of weights, tests, expressions and automata.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::Automaton;
use crate::semiring::{SemiringId, Weight};
use crate::syntax::{BExp, Expr, Name, Signature};
use crate::weighting::{Target, Weighting};

/// Zero, one, infinity (when present) and two generic values.
pub fn weight_pool(sr: SemiringId) -> Vec<Weight> {
    let generic: [(i64, i64); 2] = match sr {
        SemiringId::Boolean => [(0, 1), (1, 1)],
        SemiringId::Tropical | SemiringId::Arctic | SemiringId::ExtNaturals => [(2, 1), (3, 1)],
        SemiringId::Bottleneck => [(-3, 1), (1, 2)],
        SemiringId::ExtNonnegRationals => [(1, 2), (3, 2)],
        SemiringId::Viterbi => [(1, 3), (3, 4)],
    };
    let mut pool = vec![sr.zero(), sr.one()];
    pool.extend(sr.infinity());
    for (n, d) in generic {
        pool.push(sr.ratio(n, d).expect("generic value in carrier"));
    }
    let mut seen = Vec::new();
    pool.retain(|w| {
        if seen.contains(w) {
            false
        } else {
            seen.push(w.clone());
            true
        }
    });
    pool
}

/// Deterministic generator over a fixed signature and semiring.
pub struct Gen {
    rng: ChaCha8Rng,
    sig: Signature,
    sr: SemiringId,
    pool: Vec<Weight>,
    tests: Vec<Name>,
    actions: Vec<Name>,
    outputs: Vec<Name>,
}

impl Gen {
    pub fn new(seed: u64, sig: &Signature, sr: SemiringId) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sig: sig.clone(),
            sr,
            pool: weight_pool(sr),
            tests: sig.tests().to_vec(),
            actions: sig.actions().cloned().collect(),
            outputs: sig.outputs().cloned().collect(),
        }
    }

    pub fn semiring(&self) -> SemiringId {
        self.sr
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A weight from the small pool.
    pub fn weight(&mut self) -> Weight {
        self.pool
            .choose(&mut self.rng)
            .expect("pool is never empty")
            .clone()
    }

    /// A weight from a wider range, for algebraic law checks.
    pub fn wide_weight(&mut self) -> Weight {
        let sr = self.sr;
        if self.rng.gen_bool(0.3) {
            return self.weight();
        }
        let pick = |rng: &mut ChaCha8Rng| -> Weight {
            match sr {
                SemiringId::Boolean => sr.int(rng.gen_range(0..2)).unwrap(),
                SemiringId::Tropical | SemiringId::Arctic | SemiringId::ExtNaturals => {
                    sr.int(rng.gen_range(0..20)).unwrap()
                }
                SemiringId::Bottleneck => sr
                    .ratio(rng.gen_range(-20..20), rng.gen_range(1..5))
                    .unwrap(),
                SemiringId::ExtNonnegRationals => {
                    sr.ratio(rng.gen_range(0..20), rng.gen_range(1..8)).unwrap()
                }
                SemiringId::Viterbi => {
                    let d = rng.gen_range(1..8);
                    sr.ratio(rng.gen_range(0..=d), d).unwrap()
                }
            }
        };
        pick(&mut self.rng)
    }

    /// A uniformly chosen atom.
    pub fn atom_index(&mut self) -> usize {
        self.rng.gen_range(0..self.sig.atom_count())
    }

    pub fn bexp(&mut self, depth: u32) -> BExp {
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            let k = self.rng.gen_range(0..self.tests.len() + 2);
            return match k {
                0 => BExp::False,
                1 => BExp::True,
                i => BExp::Prim(self.tests[i - 2].clone()),
            };
        }
        match self.rng.gen_range(0..3) {
            0 => BExp::not(self.bexp(depth - 1)),
            1 => BExp::or(self.bexp(depth - 1), self.bexp(depth - 1)),
            _ => BExp::and(self.bexp(depth - 1), self.bexp(depth - 1)),
        }
    }

    fn guard(&mut self) -> BExp {
        self.bexp(2)
    }

    fn leaf(&mut self) -> Expr {
        match self.rng.gen_range(0..6) {
            0 => Expr::Test(self.bexp(1)),
            1 | 2 => Expr::Action(self.actions.choose(&mut self.rng).expect("actions").clone()),
            3 => Expr::Output(self.outputs.choose(&mut self.rng).expect("outputs").clone()),
            4 => Expr::scale(self.weight()),
            _ => {
                if self.rng.gen_bool(0.5) {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
        }
    }

    /// A random expression of nesting depth at most `depth`.
    pub fn expr(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => {
                let b = self.guard();
                Expr::guarded(self.expr(d), b, self.expr(d))
            }
            1 => {
                let (r, s) = (self.weight(), self.weight());
                Expr::weighted(self.expr(d), r, s, self.expr(d))
            }
            2 | 3 => Expr::seq(self.expr(d), self.expr(d)),
            _ => {
                let b = self.guard();
                Expr::looping(self.expr(d), b)
            }
        }
    }

    /// An expression that never accepts immediately, under any atom.
    pub fn productive(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..4) {
                0 => Expr::zero(),
                1 => Expr::Output(self.outputs.choose(&mut self.rng).expect("outputs").clone()),
                _ => {
                    let p = self.actions.choose(&mut self.rng).expect("actions").clone();
                    Expr::seq(Expr::Action(p), self.expr(depth.saturating_sub(1)))
                }
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..3) {
            0 => {
                let b = self.guard();
                Expr::guarded(self.productive(d), b, self.productive(d))
            }
            1 => {
                let (r, s) = (self.weight(), self.weight());
                Expr::weighted(self.productive(d), r, s, self.productive(d))
            }
            _ => Expr::seq(self.productive(d), self.expr(d)),
        }
    }

    /// A hand-built automaton with up to `max_states` states over the
    /// signature's atoms. Step weights favour small values so that
    /// bisimilar states actually occur.
    pub fn automaton(&mut self, max_states: usize) -> Automaton {
        let n = self.rng.gen_range(1..=max_states);
        let atoms = self.sig.atoms();
        let sr = self.sr;
        let small: Vec<Weight> = [sr.one(), self.weight()].into();
        let mut trans = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = Vec::with_capacity(atoms.len());
            for _ in &atoms {
                let mut w = Weighting::empty(sr);
                for _ in 0..self.rng.gen_range(0..4) {
                    let x = match self.rng.gen_range(0..5) {
                        0 => Target::Accept,
                        1 => Target::Reject,
                        2 => Target::Output(self.outputs[0].clone()),
                        _ => Target::Step(
                            self.actions.choose(&mut self.rng).expect("actions").clone(),
                            self.rng.gen_range(0..n),
                        ),
                    };
                    let r = small.choose(&mut self.rng).expect("small").clone();
                    w.add_at(x, &r);
                }
                row.push(w);
            }
            trans.push(row);
        }
        Automaton::from_table(sr, atoms, trans).expect("generated table is well formed")
    }

    /// Four weights with `x + y = z + w`.
    pub fn refinement_instance(&mut self) -> [Weight; 4] {
        if self.rng.gen_bool(0.5) {
            let [a, b, c, d] = [(); 4].map(|_| self.wide_weight());
            return [&a + &b, &c + &d, &a + &c, &b + &d];
        }
        // rejection sampling over the small pool always terminates: x = z,
        // y = w is a solution
        loop {
            let [x, y, z, w] = [(); 4].map(|_| self.weight());
            if &x + &y == &z + &w {
                return [x, y, z, w];
            }
        }
    }
}
