use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{parse_target, ExtensionId, LanguageId, TargetTerm};

pub const MANIFEST_FORMAT: &str = "linkc-manifest-v1";

/// A whole program: components in several languages and the target
/// expression that links them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkManifest {
    pub format: String,
    pub components: Vec<ComponentDecl>,
    /// Target-language expression over the component names.
    pub main: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDecl {
    pub name: String,
    /// Source file, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Inline program text, instead of `path`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Language tag; defaults to the one implied by the file extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionId>,
    /// Name of the exported definition; defaults to the last one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export: Option<String>,
    /// Linking type of the export, in s-expression syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("malformed manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported manifest format `{0}` (expected `{MANIFEST_FORMAT}`)")]
    Format(String),
    #[error("component `{0}` is declared twice")]
    Duplicate(String),
    #[error("component `{0}` needs exactly one of `path` and `source`")]
    NoSource(String),
    #[error("component `{name}`: {reason}")]
    Language { name: String, reason: String },
    #[error("main does not parse: {0}")]
    Main(crate::syntax::ParseError),
    #[error("main mentions `{0}`, which is not a component")]
    UnknownName(String),
}

impl ComponentDecl {
    pub fn language(&self) -> Result<LanguageId, ManifestError> {
        let err = |reason: String| ManifestError::Language {
            name: self.name.clone(),
            reason,
        };
        match &self.language {
            Some(tag) => LanguageId::from_tag(tag, self.extension).map_err(err),
            None => {
                let from_path = self
                    .path
                    .as_ref()
                    .and_then(|p| p.extension())
                    .and_then(|e| e.to_str())
                    .and_then(LanguageId::from_file_extension)
                    .ok_or_else(|| err("no `language` and no recognised file extension".into()))?;
                match (from_path, self.extension) {
                    (_, None) => Ok(from_path),
                    (LanguageId::StlcK(_), Some(ext)) => Ok(LanguageId::StlcK(ext)),
                    (LanguageId::LamRefK(_), Some(ext)) => Ok(LanguageId::LamRefK(ext)),
                    _ => Err(err(format!("{from_path} takes no linking-types extension"))),
                }
            }
        }
    }
}

impl LinkManifest {
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let m: LinkManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests always serialize")
    }

    /// The parsed main expression.
    pub fn main_term(&self) -> Result<TargetTerm, ManifestError> {
        parse_target(&self.main).map_err(ManifestError::Main)
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        if self.format != MANIFEST_FORMAT {
            return Err(ManifestError::Format(self.format.clone()));
        }
        let mut names = BTreeSet::new();
        for c in &self.components {
            if !names.insert(c.name.as_str()) {
                return Err(ManifestError::Duplicate(c.name.clone()));
            }
            if c.path.is_some() == c.source.is_some() {
                return Err(ManifestError::NoSource(c.name.clone()));
            }
            c.language()?;
        }
        let main = self.main_term()?;
        if let Some(unknown) = main
            .free_vars()
            .into_iter()
            .find(|x| !names.contains(x.as_str()))
        {
            return Err(ManifestError::UnknownName(unknown));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifests_round_trip_through_json() {
        let text = r#"{
            "format": "linkc-manifest-v1",
            "components": [
                {"name": "counter", "path": "counter.lref"},
                {"name": "client", "path": "e1.stlck", "export": "client",
                 "annotation": "(-> (-> unit (R impure int)) (R impure int))"}
            ],
            "main": "(app client counter)"
        }"#;
        let m = LinkManifest::from_json(text).unwrap();
        assert_eq!(
            m.components[1].language().unwrap(),
            LanguageId::StlcK(ExtensionId::HeapEffect)
        );
        assert_eq!(LinkManifest::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn bad_manifests_are_rejected() {
        let base = |components: &str, main: &str| {
            format!(
                r#"{{"format": "linkc-manifest-v1", "components": [{components}], "main": "{main}"}}"#
            )
        };
        let one = r#"{"name": "a", "source": "1", "language": "stlc"}"#;
        assert!(LinkManifest::from_json(&base(one, "a")).is_ok());
        assert!(matches!(
            LinkManifest::from_json(&base(&format!("{one}, {one}"), "a")),
            Err(ManifestError::Duplicate(_))
        ));
        assert!(matches!(
            LinkManifest::from_json(&base(one, "(app a b)")),
            Err(ManifestError::UnknownName(n)) if n == "b"
        ));
        assert!(matches!(
            LinkManifest::from_json(r#"{"format": "v0", "components": [], "main": "1"}"#),
            Err(ManifestError::Format(_))
        ));
    }
}
