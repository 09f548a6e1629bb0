//! Finitely supported weightings over transition targets.

use std::collections::BTreeMap;
use std::fmt;

use crate::semiring::{SemiringId, Weight};
use crate::syntax::Name;

/// Outcome of one step of a program, for a fixed atom.
///
/// The derived order (Accept, Reject, outputs by name, steps by action then
/// state) is the canonical order used for serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target<S> {
    Accept,
    Reject,
    Output(Name),
    Step(Name, S),
}

impl<S> Target<S> {
    pub fn map_state<T>(self, f: impl FnOnce(S) -> T) -> Target<T> {
        match self {
            Target::Accept => Target::Accept,
            Target::Reject => Target::Reject,
            Target::Output(v) => Target::Output(v),
            Target::Step(p, s) => Target::Step(p, f(s)),
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self, Target::Step(..))
    }
}

impl<S: fmt::Display> fmt::Display for Target<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Accept => f.write_str("accept"),
            Target::Reject => f.write_str("reject"),
            Target::Output(v) => write!(f, "out {v}"),
            Target::Step(p, s) => write!(f, "{p} -> {s}"),
        }
    }
}

/// A finite formal sum of targets. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weighting<S: Ord> {
    semiring: SemiringId,
    entries: BTreeMap<Target<S>, Weight>,
}

impl<S: Ord + Clone> Weighting<S> {
    pub fn empty(semiring: SemiringId) -> Self {
        Weighting {
            semiring,
            entries: BTreeMap::new(),
        }
    }

    pub fn dirac(semiring: SemiringId, x: Target<S>) -> Self {
        let mut w = Self::empty(semiring);
        w.entries.insert(x, semiring.one());
        w
    }

    pub fn semiring(&self) -> SemiringId {
        self.semiring
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Weight of `x`; zero outside the support.
    pub fn get(&self, x: &Target<S>) -> Weight {
        self.entries
            .get(x)
            .cloned()
            .unwrap_or_else(|| self.semiring.zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Target<S>, &Weight)> {
        self.entries.iter()
    }

    /// Adds `w` to the weight at `x`.
    pub fn add_at(&mut self, x: Target<S>, w: &Weight) {
        if w.is_zero() {
            return;
        }
        let merged = match self.entries.get(&x) {
            Some(old) => old + w,
            None => w.clone(),
        };
        if merged.is_zero() {
            self.entries.remove(&x);
        } else {
            self.entries.insert(x, merged);
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, w) in &other.entries {
            out.add_at(x.clone(), w);
        }
        out
    }

    /// Left scalar multiplication.
    pub fn scale(&self, r: &Weight) -> Self {
        let mut out = Self::empty(self.semiring);
        for (x, w) in &self.entries {
            out.add_at(x.clone(), &(r * w));
        }
        out
    }

    /// Total weight of the targets satisfying `pred`.
    pub fn mass(&self, mut pred: impl FnMut(&Target<S>) -> bool) -> Weight {
        self.entries
            .iter()
            .filter(|(x, _)| pred(x))
            .fold(self.semiring.zero(), |acc, (_, w)| &acc + w)
    }

    /// Linear extension of `h` applied to `self`.
    pub fn lin_apply<T: Ord + Clone>(
        &self,
        mut h: impl FnMut(&Target<S>) -> Weighting<T>,
    ) -> Weighting<T> {
        let mut out = Weighting::empty(self.semiring);
        for (x, w) in &self.entries {
            for (y, v) in h(x).entries {
                out.add_at(y, &(w * &v));
            }
        }
        out
    }

    /// Renames states; weights of targets that collide are added.
    pub fn map_states<T: Ord + Clone>(&self, mut f: impl FnMut(&S) -> T) -> Weighting<T> {
        let mut out = Weighting::empty(self.semiring);
        for (x, w) in &self.entries {
            out.add_at(x.clone().map_state(|s| f(&s)), w);
        }
        out
    }

    /// Checks the support discipline: no zero entries, one carrier.
    pub fn is_well_formed(&self) -> bool {
        self.entries
            .values()
            .all(|w| !w.is_zero() && w.semiring() == self.semiring)
    }
}

impl<S: Ord + Clone + fmt::Display> fmt::Display for Weighting<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, (x, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {w}")?;
        }
        f.write_str("}")
    }
}
