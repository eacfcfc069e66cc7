//! The linking-types extensions: κ+/κ−, the extended type systems and the
//! programmer-source discipline.

mod check;
mod kappa;
mod obligations;
mod programmer;

pub use check::{link_subtype, typecheck_linked, LinkJudgment};
pub use kappa::{
    foreign_constructor, kappa_minus, kappa_plus, lift_term, project_term, well_formed, KappaError,
};
pub use obligations::{check_termination, infer_cost};
pub use programmer::{check_programmer_source, reasoning_only, ProgrammerVerdict, Violation};
