use std::fmt;

use serde_json::{json, Value};

use crate::compiler::translate_type;
use crate::linking::{kappa_minus, kappa_plus};
use crate::syntax::{BaseLang, ExtensionId, LanguageId, LinkType, SourceType, TargetType};

/// What a component exposes at a linking point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interface {
    /// An unannotated source type; lifted with the default embedding.
    Source {
        ty: SourceType,
        base: BaseLang,
    },
    Linked {
        ty: LinkType,
        base: BaseLang,
        ext: ExtensionId,
    },
    Target {
        ty: TargetType,
    },
}

impl Interface {
    pub fn language(&self) -> LanguageId {
        match self {
            Interface::Source { base, .. } => LanguageId::from_base(*base),
            Interface::Linked { base, ext, .. } => LanguageId::extended(*base, *ext),
            Interface::Target { .. } => LanguageId::Target,
        }
    }

    /// The interface of the parameter, when this is a function.
    pub fn param(&self) -> Option<Interface> {
        match self {
            Interface::Source {
                ty: SourceType::Arrow(a, _),
                base,
            } => Some(Interface::Source {
                ty: (**a).clone(),
                base: *base,
            }),
            Interface::Linked { ty, base, ext } => ty.as_arrow().map(|v| Interface::Linked {
                ty: v.param.clone(),
                base: *base,
                ext: *ext,
            }),
            Interface::Target {
                ty: TargetType::Arrow(a, _),
            } => Some(Interface::Target { ty: (**a).clone() }),
            _ => None,
        }
    }

    /// How this interface reads in the language it was written in.
    pub fn source_view(&self) -> String {
        match self {
            Interface::Linked { ty, base, ext } => kappa_minus(ty, *base, *ext).to_string(),
            other => other.to_string(),
        }
    }

    /// How this interface reaches the target.
    pub fn chain(&self) -> TranslationChain {
        let language = self.language();
        match self {
            Interface::Source { ty, base } => {
                let link =
                    kappa_plus(ty, *base, ExtensionId::HeapEffect).map_err(|e| e.to_string());
                let target = link
                    .clone()
                    .and_then(|l| translate_type(&l).map_err(|e| e.to_string()));
                TranslationChain {
                    language,
                    source: Some(ty.clone()),
                    link: link.ok(),
                    target,
                }
            }
            Interface::Linked { ty, .. } => TranslationChain {
                language,
                source: None,
                link: Some(ty.clone()),
                target: translate_type(ty).map_err(|e| e.to_string()),
            },
            Interface::Target { ty } => TranslationChain {
                language,
                source: None,
                link: None,
                target: Ok(ty.clone()),
            },
        }
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interface::Source { ty, .. } => write!(f, "{ty}"),
            Interface::Linked { ty, .. } => write!(f, "{ty}"),
            Interface::Target { ty } => write!(f, "{ty}"),
        }
    }
}

/// The steps from an interface to its target type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationChain {
    pub language: LanguageId,
    pub source: Option<SourceType>,
    pub link: Option<LinkType>,
    pub target: Result<TargetType, String>,
}

impl fmt::Display for TranslationChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.language)?;
        let mut started = false;
        if let Some(s) = &self.source {
            write!(f, "{s}")?;
            started = true;
        }
        if let Some(l) = &self.link {
            if started {
                f.write_str(" ⇝κ+ ")?;
            }
            write!(f, "{l}")?;
            started = true;
        }
        if started {
            f.write_str(" ⇝⟦·⟧ ")?;
        }
        match &self.target {
            Ok(t) => write!(f, "{t}"),
            Err(why) => write!(f, "(no translation: {why})"),
        }
    }
}

impl TranslationChain {
    pub fn to_json(&self) -> Value {
        json!({
            "language": self.language.tag(),
            "source": self.source.as_ref().map(ToString::to_string),
            "link": self.link.as_ref().map(ToString::to_string),
            "target": self.target.as_ref().map(ToString::to_string).ok(),
            "error": self.target.as_ref().err(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompatVerdict {
    Compatible {
        shared: TargetType,
        client: Option<LinkType>,
    },
    Incompatible {
        client: TranslationChain,
        provider: TranslationChain,
        /// The smallest differing pieces of the two target types.
        mismatch: Option<(TargetType, TargetType)>,
    },
}

impl CompatVerdict {
    pub fn is_compatible(&self) -> bool {
        matches!(self, CompatVerdict::Compatible { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            CompatVerdict::Compatible { shared, client } => json!({
                "verdict": "compatible",
                "shared": shared.to_string(),
                "client": client.as_ref().map(ToString::to_string),
            }),
            CompatVerdict::Incompatible {
                client,
                provider,
                mismatch,
            } => json!({
                "verdict": "incompatible",
                "client": client.to_json(),
                "provider": provider.to_json(),
                "mismatch": mismatch.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]),
            }),
        }
    }
}

/// Decides whether a provider can be used where the client expects
/// `client`: both sides are translated to the target and compared
/// structurally.
pub fn check_compat(client: &Interface, provider: &Interface) -> CompatVerdict {
    let (c, p) = (client.chain(), provider.chain());
    match (&c.target, &p.target) {
        (Ok(a), Ok(b)) if a == b => CompatVerdict::Compatible {
            shared: a.clone(),
            client: c.link.clone(),
        },
        (Ok(a), Ok(b)) => {
            let mismatch = Some(first_mismatch(a, b));
            CompatVerdict::Incompatible {
                client: c,
                provider: p,
                mismatch,
            }
        }
        _ => CompatVerdict::Incompatible {
            client: c,
            provider: p,
            mismatch: None,
        },
    }
}

fn first_mismatch(a: &TargetType, b: &TargetType) -> (TargetType, TargetType) {
    match (a, b) {
        (TargetType::Ref(x), TargetType::Ref(y)) => first_mismatch(x, y),
        (TargetType::Arrow(p1, c1), TargetType::Arrow(p2, c2)) => {
            if p1 != p2 {
                first_mismatch(p1, p2)
            } else if c1.effect == c2.effect && c1.exn == c2.exn {
                first_mismatch(&c1.result, &c2.result)
            } else {
                (a.clone(), b.clone())
            }
        }
        _ => (a.clone(), b.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_link_type, parse_source_type};

    fn src(text: &str, base: BaseLang) -> Interface {
        Interface::Source {
            ty: parse_source_type(text, base).unwrap(),
            base,
        }
    }

    #[test]
    fn unannotated_client_is_incompatible_with_a_stateful_provider() {
        let client = src("(-> unit int)", BaseLang::Stlc);
        let provider = src("(-> unit int)", BaseLang::LamRef);
        let CompatVerdict::Incompatible {
            client: c,
            provider: p,
            mismatch,
        } = check_compat(&client, &provider)
        else {
            panic!("expected a mismatch")
        };
        assert_eq!(
            c.to_string(),
            "λ: unit → int ⇝κ+ unit → R^∘ int ⇝⟦·⟧ unit → E^∘_0 int"
        );
        assert_eq!(
            p.to_string(),
            "λ^ref: unit → int ⇝κ+ unit → R^• int ⇝⟦·⟧ unit → E^•_0 int"
        );
        let (a, b) = mismatch.unwrap();
        assert_eq!(
            (a.to_string(), b.to_string()),
            ("unit → E^∘_0 int".into(), "unit → E^•_0 int".into())
        );
    }

    #[test]
    fn annotated_client_is_compatible() {
        let ty = parse_link_type(
            "(-> unit (R impure int))",
            BaseLang::Stlc,
            ExtensionId::HeapEffect,
        )
        .unwrap();
        let client = Interface::Linked {
            ty: ty.clone(),
            base: BaseLang::Stlc,
            ext: ExtensionId::HeapEffect,
        };
        let provider = src("(-> unit int)", BaseLang::LamRef);
        let v = check_compat(&client, &provider);
        assert_eq!(
            v,
            CompatVerdict::Compatible {
                shared: translate_type(&ty).unwrap(),
                client: Some(ty)
            }
        );
        assert!(
            check_compat(&src("int", BaseLang::Stlc), &src("int", BaseLang::LamRef))
                .is_compatible()
        );
    }

    #[test]
    fn function_parameters_are_exposed() {
        let client = src("(-> (-> unit int) int)", BaseLang::Stlc);
        assert_eq!(client.param(), Some(src("(-> unit int)", BaseLang::Stlc)));
        assert_eq!(src("int", BaseLang::Stlc).param(), None);
    }
}
