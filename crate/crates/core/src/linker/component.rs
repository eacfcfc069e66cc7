use std::fmt;

use thiserror::Error;

use crate::compiler::{compile, compiled_comp_type, TranslateError};
use crate::error::TypeError;
use crate::linking::{
    check_programmer_source, kappa_plus, lift_term, typecheck_linked, KappaError, LinkJudgment,
    ProgrammerVerdict,
};
use crate::source::typecheck_source;
use crate::syntax::{
    parse_file_linked, parse_file_source, parse_file_target, parse_link_type, BaseLang, CompType,
    ExtensionId, LanguageId, Located, ParseError, Pos, SourceTerm, SourceType, TargetTerm, TypeEnv,
};
use crate::target::synth_target_comp;

use super::compat::Interface;

/// A problem in one component, located in its file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}:{pos}: {kind}")]
pub struct Diagnostic {
    /// File name, or `<name>` for inline components.
    pub origin: String,
    pub pos: Pos,
    pub kind: DiagnosticKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticKind {
    #[error("cannot read file: {0}")]
    Io(String),
    #[error("syntax error: expected {0}")]
    Parse(String),
    #[error("bad annotation: expected {0}")]
    Annotation(String),
    #[error("{0} takes no linking-type annotation")]
    UnexpectedAnnotation(LanguageId),
    #[error("type error: {0}")]
    Type(TypeError),
    #[error(
        "`{constructor}` is not available to {language} programmers; it exists only for reasoning"
    )]
    ReasoningOnly {
        constructor: &'static str,
        language: LanguageId,
    },
    #[error("{0}")]
    Kappa(KappaError),
    #[error("{0}")]
    Translate(TranslateError),
}

impl DiagnosticKind {
    /// Whether this is a typing problem rather than a missing or malformed file.
    pub fn is_type_error(&self) -> bool {
        !matches!(self, DiagnosticKind::Io(_))
    }
}

const START: Pos = Pos { line: 1, col: 1 };

/// A component that passed its language's checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Checked {
    Source {
        term: SourceTerm,
        ty: SourceType,
        base: BaseLang,
    },
    Linked {
        judgment: LinkJudgment,
        base: BaseLang,
        ext: ExtensionId,
    },
    Target {
        term: TargetTerm,
        comp: CompType,
    },
}

impl Checked {
    pub fn language(&self) -> LanguageId {
        match self {
            Checked::Source { base, .. } => LanguageId::from_base(*base),
            Checked::Linked { base, ext, .. } => LanguageId::extended(*base, *ext),
            Checked::Target { .. } => LanguageId::Target,
        }
    }

    pub fn interface(&self) -> Interface {
        match self {
            Checked::Source { ty, base, .. } => Interface::Source {
                ty: ty.clone(),
                base: *base,
            },
            Checked::Linked {
                judgment,
                base,
                ext,
            } => Interface::Linked {
                ty: judgment.ty.clone(),
                base: *base,
                ext: *ext,
            },
            Checked::Target { comp, .. } => Interface::Target {
                ty: comp.result.clone(),
            },
        }
    }

    /// The type to report to users.
    pub fn type_string(&self) -> String {
        match self {
            Checked::Source { ty, .. } => ty.to_string(),
            Checked::Linked { judgment, .. } => judgment.ty.to_string(),
            Checked::Target { comp, .. } => comp.to_string(),
        }
    }
}

/// A compiled component, ready for linking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub checked: Checked,
    pub code: TargetTerm,
    /// The computation type `code` checks at.
    pub comp: CompType,
}

impl Component {
    pub fn interface(&self) -> Interface {
        self.checked.interface()
    }
}

/// Parses and checks one component. Unannotated source components are
/// checked in their own language; extended ones against `annotation` and
/// the programmer-source discipline.
pub fn check_component(
    origin: &str,
    text: &str,
    language: LanguageId,
    export: Option<&str>,
    annotation: Option<&str>,
) -> Result<Checked, Diagnostic> {
    let diag = |pos: Pos, kind: DiagnosticKind| Diagnostic {
        origin: origin.to_string(),
        pos,
        kind,
    };
    let parse_err = |e: ParseError| {
        diag(
            Pos {
                line: e.line,
                col: e.col,
            },
            DiagnosticKind::Parse(e.expected),
        )
    };
    let located_type_err = |e: TypeError, pos: Pos| diag(pos, DiagnosticKind::Type(e));

    match language {
        LanguageId::Stlc | LanguageId::LamRef => {
            if annotation.is_some() {
                return Err(diag(START, DiagnosticKind::UnexpectedAnnotation(language)));
            }
            let base = language.base().expect("source languages have a base");
            let located = parse_file_source(text, base, export).map_err(parse_err)?;
            let ty = typecheck_source(&TypeEnv::new(), &located.term, base)
                .map_err(|e| located_type_err(e.clone(), at(&located, &e)))?;
            Ok(Checked::Source {
                term: located.term,
                ty,
                base,
            })
        }
        LanguageId::StlcK(ext) | LanguageId::LamRefK(ext) => {
            let base = language.base().expect("extended languages have a base");
            let ann = annotation
                .map(|a| parse_link_type(a, base, ext))
                .transpose()
                .map_err(|e| diag(START, DiagnosticKind::Annotation(e.to_string())))?;
            let located = parse_file_linked(text, base, ext, export).map_err(parse_err)?;
            if let ProgrammerVerdict::Violations(vs) =
                check_programmer_source(&located.term, base, ext)
            {
                let v = &vs[0];
                return Err(diag(
                    located.position(&v.path),
                    DiagnosticKind::ReasoningOnly {
                        constructor: v.constructor,
                        language,
                    },
                ));
            }
            let judgment =
                typecheck_linked(&TypeEnv::new(), &located.term, base, ext, ann.as_ref())
                    .map_err(|e| located_type_err(e.clone(), at(&located, &e)))?;
            Ok(Checked::Linked {
                judgment,
                base,
                ext,
            })
        }
        LanguageId::Target => {
            if annotation.is_some() {
                return Err(diag(START, DiagnosticKind::UnexpectedAnnotation(language)));
            }
            let located = parse_file_target(text, export).map_err(parse_err)?;
            let comp = synth_target_comp(&TypeEnv::new(), &located.term)
                .map_err(|e| located_type_err(e.clone(), at(&located, &e)))?;
            Ok(Checked::Target {
                term: located.term,
                comp,
            })
        }
    }
}

fn at<T>(located: &Located<T>, e: &TypeError) -> Pos {
    located.position(&e.path())
}

/// Compiles a checked component. Source components are first lifted into
/// the heap-effect extension with the default embedding.
pub fn compile_checked(
    origin: &str,
    name: &str,
    checked: Checked,
) -> Result<Component, Diagnostic> {
    let diag = |kind: DiagnosticKind| Diagnostic {
        origin: origin.to_string(),
        pos: START,
        kind,
    };
    let heap = ExtensionId::HeapEffect;
    let (code, comp) = match &checked {
        Checked::Source { term, ty, base } => {
            let lifted_ty =
                kappa_plus(ty, *base, heap).map_err(|e| diag(DiagnosticKind::Kappa(e)))?;
            let lifted =
                lift_term(term, *base, heap).map_err(|e| diag(DiagnosticKind::Kappa(e)))?;
            let j = typecheck_linked(&TypeEnv::new(), &lifted, *base, heap, Some(&lifted_ty))
                .map_err(|e| diag(DiagnosticKind::Type(e)))?;
            translate(&j).map_err(|e| diag(DiagnosticKind::Translate(e)))?
        }
        Checked::Linked { judgment, .. } => {
            translate(judgment).map_err(|e| diag(DiagnosticKind::Translate(e)))?
        }
        Checked::Target { term, comp } => (term.clone(), comp.clone()),
    };
    Ok(Component {
        name: name.to_string(),
        checked,
        code,
        comp,
    })
}

fn translate(j: &LinkJudgment) -> Result<(TargetTerm, CompType), TranslateError> {
    Ok((compile(j)?, compiled_comp_type(j)?))
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} : {} ({})",
            self.name,
            self.checked.type_string(),
            self.checked.language()
        )
    }
}
