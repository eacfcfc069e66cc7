//! Linking types end to end: two source calculi (λ and λ^ref), their
//! linking-types extensions, an effect-typed target with exceptions, a
//! type-directed compiler, a cross-language linker and a harness for
//! probing contextual equivalence.

pub mod compiler;
pub mod equiv;
pub mod error;
pub mod eval;
pub mod gen;
pub mod linker;
pub mod linking;
pub mod registry;
pub mod source;
pub mod syntax;
pub mod target;

pub use error::{TypeError, TypeErrorKind};
pub use eval::{EvalStats, Machine, Outcome, Store, DEFAULT_FUEL};
