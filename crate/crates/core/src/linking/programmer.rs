use serde::Serialize;

use crate::syntax::{BaseLang, ExtensionId, LinkTerm, NodePath, Term};

/// An extension-only term constructor found in programmer-written code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: NodePath,
    pub constructor: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgrammerVerdict {
    Ok,
    Violations(Vec<Violation>),
}

impl ProgrammerVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ProgrammerVerdict::Ok)
    }
}

/// Term constructors an extension admits for reasoning only.
pub fn reasoning_only(base: BaseLang, _ext: ExtensionId) -> &'static [&'static str] {
    if base.has_refs() {
        &[]
    } else {
        &["ref", "dereference", "assignment"]
    }
}

/// Flags every term constructor that programmers of `base` cannot write.
/// Linking-type annotations are always allowed.
pub fn check_programmer_source(
    t: &LinkTerm,
    base: BaseLang,
    ext: ExtensionId,
) -> ProgrammerVerdict {
    let forbidden = reasoning_only(base, ext);
    let mut found = Vec::new();
    let mut path = Vec::new();
    walk(t, &mut path, forbidden, &mut found);
    if found.is_empty() {
        ProgrammerVerdict::Ok
    } else {
        ProgrammerVerdict::Violations(found)
    }
}

fn walk(t: &LinkTerm, path: &mut NodePath, forbidden: &[&str], found: &mut Vec<Violation>) {
    let name = t.constructor();
    let never = matches!(t, Term::Loc(_) | Term::Throw(_) | Term::Catch { .. });
    if never || forbidden.contains(&name) {
        found.push(Violation {
            path: path.clone(),
            constructor: name,
        });
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i as u32);
        walk(c, path, forbidden, found);
        path.pop();
    }
}
