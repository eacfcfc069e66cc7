//! Probing contextual equivalence with suites of applicative contexts.
//!
//! A context is a λ^{ref,κ} function of the hole. Two candidates are
//! distinguished when some context applied to each yields different values.
//! Failing to distinguish only ever holds relative to the suite tried.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::compiler::compile;
use crate::error::TypeError;
use crate::eval::Store;
use crate::linking::{lift_term, typecheck_linked};
use crate::syntax::{
    parse_file_linked, parse_linked, BaseLang, ExtensionId, LanguageId, LinkTerm, LinkType,
    ParseError, TargetTerm, TargetType, Term, TypeEnv,
};
use crate::target::eval_target;
use crate::Outcome;

const HEAP: ExtensionId = ExtensionId::HeapEffect;

/// A context `λh:hole. body` whose result has a base type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeContext {
    pub name: String,
    pub hole: LinkType,
    code: TargetTerm,
}

#[derive(Debug, Error)]
pub enum ContextError {
    #[error("context `{0}` must be a lambda over the hole")]
    NotALambda(String),
    #[error("context `{name}` does not typecheck: {error}")]
    IllTyped { name: String, error: TypeError },
    #[error("context `{name}` must return unit or int, not {found}")]
    NotBase { name: String, found: LinkType },
    #[error("context `{name}`: {error}")]
    Parse { name: String, error: ParseError },
    #[error("cannot read context `{name}`: {error}")]
    Io { name: String, error: std::io::Error },
}

impl ProbeContext {
    /// Checks `term`, which must be `λh:τ. e` in λ^{ref,κ} with `e` of base type.
    pub fn new(name: impl Into<String>, term: &LinkTerm) -> Result<Self, ContextError> {
        let name = name.into();
        let Term::Lam { ty: Some(hole), .. } = term else {
            return Err(ContextError::NotALambda(name));
        };
        let j = typecheck_linked(&TypeEnv::new(), term, BaseLang::LamRef, HEAP, None).map_err(
            |error| ContextError::IllTyped {
                name: name.clone(),
                error,
            },
        )?;
        let result = j.ty.as_arrow().map(|v| v.result.clone());
        if !matches!(result, Some(LinkType::Int | LinkType::Unit)) {
            return Err(ContextError::NotBase { name, found: j.ty });
        }
        let code = compile(&j).expect("heap-effect judgments compile");
        Ok(ProbeContext {
            name,
            hole: hole.clone(),
            code,
        })
    }

    /// Instantiates a template `(lam h _ body)` at `hole`.
    fn instantiate(name: &str, template: &str, hole: &LinkType) -> Result<Self, ContextError> {
        let parsed = parse_linked(template, BaseLang::LamRef, HEAP).map_err(|error| {
            ContextError::Parse {
                name: name.into(),
                error,
            }
        })?;
        let Term::Lam { param, body, .. } = parsed else {
            return Err(ContextError::NotALambda(name.into()));
        };
        ProbeContext::new(name, &Term::lam(param, hole.clone(), *body))
    }
}

/// A program to probe, in the heap-effect extension of `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub name: String,
    pub term: LinkTerm,
    pub base: BaseLang,
}

impl Candidate {
    /// Parses a candidate written in `lang`; source programs are lifted
    /// with the default embedding.
    pub fn parse(name: impl Into<String>, text: &str, lang: LanguageId) -> Result<Self, String> {
        let name = name.into();
        let base = lang
            .base()
            .ok_or_else(|| format!("{lang} programs cannot be probed"))?;
        let term = match lang {
            LanguageId::Stlc | LanguageId::LamRef => {
                let located = crate::syntax::parse_file_source(text, base, None)
                    .map_err(|e| e.to_string())?;
                lift_term(&located.term, base, HEAP).map_err(|e| e.to_string())?
            }
            LanguageId::StlcK(HEAP) | LanguageId::LamRefK(HEAP) => {
                parse_file_linked(text, base, HEAP, None)
                    .map_err(|e| e.to_string())?
                    .term
            }
            _ => {
                return Err(format!(
                    "{lang} programs cannot be compiled, so cannot be probed"
                ))
            }
        };
        Ok(Candidate { name, term, base })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Distinguished {
        context: String,
        left: TargetTerm,
        right: TargetTerm,
    },
    /// No context in the suite told the two apart. This says nothing
    /// about contexts outside the suite.
    NotDistinguished {
        tried: Vec<String>,
        /// Contexts that ran out of fuel on either side; never counted as
        /// distinctions.
        fuel_exhausted: Vec<String>,
    },
    IllTyped {
        candidate: String,
        error: TypeError,
    },
}

impl EquivVerdict {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, EquivVerdict::Distinguished { .. })
    }

    pub fn is_ill_typed(&self) -> bool {
        matches!(self, EquivVerdict::IllTyped { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            EquivVerdict::Distinguished {
                context,
                left,
                right,
            } => json!({
                "verdict": "distinguished",
                "context": context,
                "left": left.to_string(),
                "right": right.to_string(),
            }),
            EquivVerdict::NotDistinguished {
                tried,
                fuel_exhausted,
            } => json!({
                "verdict": "not-distinguished",
                "relative_to_suite": tried,
                "fuel_exhausted": fuel_exhausted,
            }),
            EquivVerdict::IllTyped { candidate, error } => json!({
                "verdict": "ill-typed",
                "candidate": candidate,
                "error": error.to_string(),
            }),
        }
    }
}

impl fmt::Display for EquivVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivVerdict::Distinguished {
                context,
                left,
                right,
            } => {
                write!(f, "distinguished by `{context}`: {left} vs {right}")
            }
            EquivVerdict::NotDistinguished {
                tried,
                fuel_exhausted,
            } => {
                write!(
                    f,
                    "not distinguished relative to suite [{}]",
                    tried.join(", ")
                )?;
                if !fuel_exhausted.is_empty() {
                    write!(f, " (out of fuel: {})", fuel_exhausted.join(", "))?;
                }
                Ok(())
            }
            EquivVerdict::IllTyped { candidate, error } => {
                write!(f, "`{candidate}` is ill-typed: {error}")
            }
        }
    }
}

/// Compiles `c` at `ty`.
fn prepare(c: &Candidate, ty: &LinkType) -> Result<TargetTerm, TypeError> {
    let j = typecheck_linked(&TypeEnv::new(), &c.term, c.base, HEAP, Some(ty))?;
    Ok(compile(&j).expect("heap-effect judgments compile"))
}

/// Runs `context` on compiled code with a fresh store.
pub fn apply(context: &ProbeContext, code: &TargetTerm, fuel: u64) -> Outcome<TargetType> {
    eval_target(
        &Term::app(context.code.clone(), code.clone()),
        Store::new(),
        fuel,
    )
}

/// Applies every context in `suite` whose hole is `ty` to both candidates.
pub fn probe(
    e1: &Candidate,
    e2: &Candidate,
    ty: &LinkType,
    suite: &[ProbeContext],
    fuel: u64,
) -> EquivVerdict {
    let mut codes = Vec::with_capacity(2);
    for c in [e1, e2] {
        match prepare(c, ty) {
            Ok(code) => codes.push(code),
            Err(error) => {
                return EquivVerdict::IllTyped {
                    candidate: c.name.clone(),
                    error,
                }
            }
        }
    }
    let mut tried = Vec::new();
    let mut fuel_exhausted = Vec::new();
    for ctx in suite.iter().filter(|c| c.hole == *ty) {
        tried.push(ctx.name.clone());
        let left = apply(ctx, &codes[0], fuel);
        let right = apply(ctx, &codes[1], fuel);
        match (left, right) {
            (Outcome::Value(l, _), Outcome::Value(r, _)) if l != r => {
                return EquivVerdict::Distinguished {
                    context: ctx.name.clone(),
                    left: l,
                    right: r,
                }
            }
            (l, r) if l.is_out_of_fuel() || r.is_out_of_fuel() => {
                fuel_exhausted.push(ctx.name.clone())
            }
            _ => {}
        }
    }
    EquivVerdict::NotDistinguished {
        tried,
        fuel_exhausted,
    }
}

/// Context templates; each is instantiated at a hole type and kept only
/// where it typechecks.
const TEMPLATES: &[(&str, &str)] = &[
    (
        "C^ref",
        "(lam h unit (let x (ref 0) (app h (lam u unit (seq (assign x (+ (deref x) 1)) (deref x))))))",
    ),
    (
        "count-calls",
        "(lam h unit (let x (ref 0) (seq (app h (lam n int (seq (assign x (+ (deref x) 1)) n))) (deref x))))",
    ),
    ("identity-argument", "(lam h unit (app h (lam n int n)))"),
    ("constant-argument", "(lam h unit (app h (lam n int 7)))"),
    ("successor-argument", "(lam h unit (+ (app h (lam n int (+ n 1))) 1))"),
    ("unit-argument", "(lam h unit (app h (lam u unit 3)))"),
];

/// The builtin contexts that typecheck with a hole of type `hole`.
pub fn builtin_suite(hole: &LinkType) -> Vec<ProbeContext> {
    TEMPLATES
        .iter()
        .filter_map(|(name, t)| ProbeContext::instantiate(name, t, hole).ok())
        .collect()
}

/// The hole types the builtin contexts were written for, with their suites.
pub fn builtin_suites() -> Vec<(LinkType, Vec<ProbeContext>)> {
    let arrow = |eff_arg, eff_body, param: LinkType| {
        LinkType::eff_arrow(
            LinkType::eff_arrow(param, eff_arg, LinkType::Int),
            eff_body,
            LinkType::Int,
        )
    };
    use crate::syntax::Effect::{Impure, Pure};
    let holes = [
        arrow(Impure, Impure, LinkType::Unit),
        arrow(Pure, Pure, LinkType::Int),
        arrow(Impure, Impure, LinkType::Int),
        arrow(Pure, Impure, LinkType::Int),
        arrow(Impure, Pure, LinkType::Int),
        LinkType::Unit,
    ];
    holes
        .into_iter()
        .map(|h| {
            let suite = builtin_suite(&h);
            (h, suite)
        })
        .collect()
}

/// Loads every `.lrefk` file in `dir` as a context, in file-name order.
pub fn load_suite(dir: &Path) -> Result<Vec<ProbeContext>, ContextError> {
    let io = |name: &str| {
        let name = name.to_string();
        move |error| ContextError::Io { name, error }
    };
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(io(&dir.display().to_string()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "lrefk"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let text = std::fs::read_to_string(p).map_err(io(&name))?;
            let term = parse_file_linked(&text, BaseLang::LamRef, HEAP, None)
                .map_err(|error| ContextError::Parse {
                    name: name.clone(),
                    error,
                })?
                .term;
            ProbeContext::new(name, &term)
        })
        .collect()
}
