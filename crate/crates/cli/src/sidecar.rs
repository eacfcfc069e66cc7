//! Interface sidecars: the JSON file `compile` writes next to its output,
//! read back by `compat`.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use linkc_core::linker::Interface;
use linkc_core::syntax::{
    parse_link_type, parse_source_type, parse_target_type, ExtensionId, LanguageId, TypeSyntax,
};

pub const SIDECAR_FORMAT: &str = "linkc-interface-v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format: String,
    pub name: String,
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionId>,
    /// Interface type in s-expression syntax of `language`.
    #[serde(rename = "type")]
    pub ty: String,
    /// Translated type, for reading only.
    pub target: Option<String>,
}

impl Sidecar {
    pub fn new(name: &str, interface: &Interface) -> Self {
        let language = interface.language();
        let ty = match interface {
            Interface::Source { ty, .. } => ty.to_sexpr(),
            Interface::Linked { ty, .. } => ty.to_sexpr(),
            Interface::Target { ty } => ty.to_sexpr(),
        };
        Sidecar {
            format: SIDECAR_FORMAT.into(),
            name: name.into(),
            language: language.tag().into(),
            extension: language.extension(),
            ty,
            target: interface.chain().target.ok().map(|t| t.to_string()),
        }
    }

    pub fn interface(&self) -> Result<Interface> {
        if self.format != SIDECAR_FORMAT {
            bail!(
                "unsupported interface format `{}` (expected `{SIDECAR_FORMAT}`)",
                self.format
            );
        }
        let lang =
            LanguageId::from_tag(&self.language, self.extension).map_err(anyhow::Error::msg)?;
        parse_interface(&self.ty, lang)
    }
}

/// Reads an interface type written in `lang`.
pub fn parse_interface(text: &str, lang: LanguageId) -> Result<Interface> {
    let ctx = || format!("`{text}` is not a {lang} type");
    Ok(match (lang.base(), lang.extension()) {
        (Some(base), None) => Interface::Source {
            ty: parse_source_type(text, base).with_context(ctx)?,
            base,
        },
        (Some(base), Some(ext)) => Interface::Linked {
            ty: parse_link_type(text, base, ext).with_context(ctx)?,
            base,
            ext,
        },
        _ => Interface::Target {
            ty: parse_target_type(text).with_context(ctx)?,
        },
    })
}
