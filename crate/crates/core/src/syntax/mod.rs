//! Abstract and concrete syntax for the source calculi, their linking-types
//! extensions and the target language.

mod env;
mod lang;
pub mod parse;
pub mod print;
pub mod sexpr;
mod term;
mod types;

pub use env::TypeEnv;
pub use lang::{BaseLang, ExtensionId, LanguageId};
pub use parse::{
    parse, parse_file_linked, parse_file_source, parse_file_target, parse_link_type, parse_linked,
    parse_source, parse_source_type, parse_target, parse_target_type, AnyTerm, Located,
};
pub use print::{print, TypeSyntax};
pub use sexpr::{ParseError, Pos};
pub use term::{BinOp, NodePath, Term, SEQ_BINDER};
pub use types::{ArrowView, CompType, CostBound, Effect, LinkType, SourceType, TargetType};

pub type SourceTerm = Term<SourceType>;
pub type LinkTerm = Term<LinkType>;
pub type TargetTerm = Term<TargetType>;
