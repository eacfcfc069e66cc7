use thiserror::Error;

use crate::syntax::parse::default_arrow;
use crate::syntax::{BaseLang, ExtensionId, LinkTerm, LinkType, SourceTerm, SourceType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("{0} is not a type of λ (it mentions ref)")]
    IllegalType(SourceType),
}

/// The default embedding κ+ of `base` types into the `ext` linking types.
pub fn kappa_plus(
    ty: &SourceType,
    base: BaseLang,
    ext: ExtensionId,
) -> Result<LinkType, KappaError> {
    if !base.has_refs() && ty.mentions_ref() {
        return Err(KappaError::IllegalType(ty.clone()));
    }
    Ok(embed(ty, base, ext))
}

fn embed(ty: &SourceType, base: BaseLang, ext: ExtensionId) -> LinkType {
    match ty {
        SourceType::Unit => LinkType::Unit,
        SourceType::Int => LinkType::Int,
        SourceType::Ref(a) => LinkType::reference(embed(a, base, ext)),
        SourceType::Arrow(a, b) => {
            default_arrow(base, ext, embed(a, base, ext), embed(b, base, ext))
        }
    }
}

/// The projection κ− back to `base` types. Over λ a reference type
/// projects to its contents, as in the heap-effect table.
pub fn kappa_minus(ty: &LinkType, base: BaseLang, _ext: ExtensionId) -> SourceType {
    project(ty, base)
}

fn project(ty: &LinkType, base: BaseLang) -> SourceType {
    match ty {
        LinkType::Unit => SourceType::Unit,
        LinkType::Int => SourceType::Int,
        LinkType::Ref(a) if base.has_refs() => SourceType::reference(project(a, base)),
        LinkType::Ref(a) | LinkType::Lin(a) => project(a, base),
        LinkType::EffArrow(a, _, b)
        | LinkType::Arrow(a, b)
        | LinkType::TermArrow(a, b)
        | LinkType::CostArrow(a, _, b) => SourceType::arrow(project(a, base), project(b, base)),
    }
}

/// Whether every constructor of `ty` belongs to the `ext` grammar.
pub fn well_formed(ty: &LinkType, ext: ExtensionId) -> bool {
    foreign_constructor(ty, ext).is_none()
}

/// The first constructor of `ty` outside the `ext` grammar, if any.
pub fn foreign_constructor(ty: &LinkType, ext: ExtensionId) -> Option<&LinkType> {
    let own = match (ty, ext) {
        (LinkType::Unit | LinkType::Int | LinkType::Ref(_), _) => true,
        (LinkType::EffArrow(..), ExtensionId::HeapEffect) => true,
        (LinkType::Arrow(..), ExtensionId::Linear | ExtensionId::Terminating) => true,
        (LinkType::Lin(inner), ExtensionId::Linear) => !inner.is_linear(),
        (LinkType::TermArrow(..), ExtensionId::Terminating) => true,
        (LinkType::CostArrow(..), ExtensionId::Cost) => true,
        _ => false,
    };
    if !own {
        return Some(ty);
    }
    match ty {
        LinkType::Unit | LinkType::Int => None,
        LinkType::Ref(a) | LinkType::Lin(a) => foreign_constructor(a, ext),
        LinkType::EffArrow(a, _, b)
        | LinkType::Arrow(a, b)
        | LinkType::TermArrow(a, b)
        | LinkType::CostArrow(a, _, b) => {
            foreign_constructor(a, ext).or_else(|| foreign_constructor(b, ext))
        }
    }
}

/// Lifts a source program into the `ext` language, embedding every
/// annotation with κ+.
pub fn lift_term(t: &SourceTerm, base: BaseLang, ext: ExtensionId) -> Result<LinkTerm, KappaError> {
    t.map_types(&mut |ty| kappa_plus(ty, base, ext))
}

/// Projects an extended program onto `base` syntax, erasing ascriptions.
pub fn project_term(t: &LinkTerm, base: BaseLang, ext: ExtensionId) -> SourceTerm {
    t.strip_ascriptions()
        .map_types::<_, std::convert::Infallible>(&mut |ty| Ok(kappa_minus(ty, base, ext)))
        .unwrap_or_else(|never| match never {})
}
