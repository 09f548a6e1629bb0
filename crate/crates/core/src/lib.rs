pub mod axioms;
pub mod equivalence;
pub mod gen;
pub mod semantics;
pub mod semiring;
pub mod syntax;
pub mod weighting;
