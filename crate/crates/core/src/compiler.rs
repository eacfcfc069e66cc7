//! Type-directed compilation of heap-effect programs into λ^ref_exc.

use thiserror::Error;

use crate::linking::LinkJudgment;
use crate::syntax::{CompType, LinkType, TargetTerm, TargetType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("{0} has no target translation; only heap-effect linking types compile")]
    UnsupportedExtension(LinkType),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{reason}: {subterm}")]
pub struct NotExpressible {
    pub reason: &'static str,
    pub subterm: TargetType,
}

/// `⟦·⟧`: arrows keep their effect and get the empty exception type.
pub fn translate_type(ty: &LinkType) -> Result<TargetType, TranslateError> {
    Ok(match ty {
        LinkType::Unit => TargetType::Unit,
        LinkType::Int => TargetType::Int,
        LinkType::Ref(a) => TargetType::reference(translate_type(a)?),
        LinkType::EffArrow(a, eff, b) => TargetType::arrow(
            translate_type(a)?,
            CompType::new(*eff, TargetType::Void, translate_type(b)?),
        ),
        other => return Err(TranslateError::UnsupportedExtension(other.clone())),
    })
}

/// Inverts [`translate_type`], failing outside its image.
pub fn backtranslate_type(ty: &TargetType) -> Result<LinkType, NotExpressible> {
    match ty {
        TargetType::Unit => Ok(LinkType::Unit),
        TargetType::Int => Ok(LinkType::Int),
        TargetType::Ref(a) => Ok(LinkType::reference(backtranslate_type(a)?)),
        TargetType::Void => Err(NotExpressible {
            reason: "the empty type has no source counterpart",
            subterm: ty.clone(),
        }),
        TargetType::Arrow(a, comp) => {
            if comp.exn != TargetType::Void {
                return Err(NotExpressible {
                    reason: "source functions cannot raise exceptions",
                    subterm: ty.clone(),
                });
            }
            Ok(LinkType::eff_arrow(
                backtranslate_type(a)?,
                comp.effect,
                backtranslate_type(&comp.result)?,
            ))
        }
    }
}

/// Compiles a checked heap-effect program. Every annotation is translated;
/// the term structure is kept as is.
pub fn compile(judgment: &LinkJudgment) -> Result<TargetTerm, TranslateError> {
    judgment.subject.map_types(&mut translate_type)
}

/// The computation type compiled code is checked at.
pub fn compiled_comp_type(judgment: &LinkJudgment) -> Result<CompType, TranslateError> {
    Ok(CompType::new(
        judgment.effect,
        TargetType::Void,
        translate_type(&judgment.ty)?,
    ))
}
