use std::fmt;

use thiserror::Error;

use crate::syntax::{CostBound, Effect, NodePath};

/// A type error located at a node of the checked term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Child indices from the node up to the root; see [`TypeError::path`].
    rev_path: Vec<u32>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind) -> Self {
        TypeError {
            kind,
            rev_path: Vec::new(),
        }
    }

    pub fn mismatch(expected: impl fmt::Display, found: impl fmt::Display) -> Self {
        TypeError::new(TypeErrorKind::Mismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }

    /// Records that the error arose inside child `index` of the current node.
    pub fn in_child(mut self, index: u32) -> Self {
        self.rev_path.push(index);
        self
    }

    /// Path from the root of the checked term to the offending node.
    pub fn path(&self) -> NodePath {
        self.rev_path.iter().rev().copied().collect()
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("cannot apply a value of type {0}")]
    NotAFunction(String),
    #[error("cannot synthesize a type for parameter `{0}`; annotate the lambda")]
    CannotSynthesize(String),
    #[error("{0} is not part of this language")]
    NotInLanguage(&'static str),
    #[error("computation has effect {found} but at most {allowed} is allowed")]
    EffectMismatch { allowed: Effect, found: Effect },
    #[error("linear variable `{var}` used {uses} times (exactly once required)")]
    LinearityViolation { var: String, uses: usize },
    #[error("function does not pass the termination check")]
    TerminationCheckFailed,
    #[error("cost mismatch: annotated {expected}, inferred {inferred}")]
    CostMismatch {
        expected: CostBound,
        inferred: CostBound,
    },
    #[error("extension conflict: {0}")]
    ExtensionConflict(String),
    #[error("illegal type: {0}")]
    IllegalType(String),
    #[error("exception type mismatch: expected {expected}, found {found}")]
    ExnMismatch { expected: String, found: String },
    #[error("unknown store location {0}")]
    UnknownLocation(usize),
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for CostBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostBound::Known(n) => write!(f, "C^{n}"),
            CostBound::Unknown => f.write_str("C^•"),
        }
    }
}

/// Extension trait for tagging errors from a child check.
pub(crate) trait InChild<T> {
    fn child(self, index: u32) -> Result<T, TypeError>;
}

impl<T> InChild<T> for Result<T, TypeError> {
    fn child(self, index: u32) -> Result<T, TypeError> {
        self.map_err(|e| e.in_child(index))
    }
}
