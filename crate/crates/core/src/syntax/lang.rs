use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A linking-types extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionId {
    /// Reference types and heap-effect tracking on arrows (`τ → R^ε τ`).
    HeapEffect,
    /// Linear base types `φ^L`.
    Linear,
    /// Terminating arrows `τ → τ↾`.
    Terminating,
    /// Cost-annotated arrows `τ → C^N τ` / `τ → C^• τ`.
    Cost,
}

impl ExtensionId {
    pub const ALL: [ExtensionId; 4] = [
        ExtensionId::HeapEffect,
        ExtensionId::Linear,
        ExtensionId::Terminating,
        ExtensionId::Cost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExtensionId::HeapEffect => "heap-effect",
            ExtensionId::Linear => "linear",
            ExtensionId::Terminating => "terminating",
            ExtensionId::Cost => "cost",
        }
    }
}

impl fmt::Display for ExtensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtensionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heap-effect" | "heap" | "kappa" => Ok(ExtensionId::HeapEffect),
            "linear" => Ok(ExtensionId::Linear),
            "terminating" => Ok(ExtensionId::Terminating),
            "cost" => Ok(ExtensionId::Cost),
            other => Err(format!("unknown extension `{other}`")),
        }
    }
}

/// The two unextended source calculi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseLang {
    /// Simply typed lambda calculus with `unit` and `int`.
    Stlc,
    /// `Stlc` plus ML-style mutable references.
    LamRef,
}

impl BaseLang {
    pub const ALL: [BaseLang; 2] = [BaseLang::Stlc, BaseLang::LamRef];

    pub fn has_refs(self) -> bool {
        matches!(self, BaseLang::LamRef)
    }
}

impl fmt::Display for BaseLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseLang::Stlc => "λ",
            BaseLang::LamRef => "λ^ref",
        })
    }
}

/// Every language the toolchain understands. The extension tag only exists
/// on the two linking-types languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LanguageId {
    Stlc,
    LamRef,
    StlcK(ExtensionId),
    LamRefK(ExtensionId),
    Target,
}

impl LanguageId {
    pub fn base(self) -> Option<BaseLang> {
        match self {
            LanguageId::Stlc | LanguageId::StlcK(_) => Some(BaseLang::Stlc),
            LanguageId::LamRef | LanguageId::LamRefK(_) => Some(BaseLang::LamRef),
            LanguageId::Target => None,
        }
    }

    pub fn extension(self) -> Option<ExtensionId> {
        match self {
            LanguageId::StlcK(ext) | LanguageId::LamRefK(ext) => Some(ext),
            _ => None,
        }
    }

    pub fn extended(base: BaseLang, ext: ExtensionId) -> Self {
        match base {
            BaseLang::Stlc => LanguageId::StlcK(ext),
            BaseLang::LamRef => LanguageId::LamRefK(ext),
        }
    }

    pub fn from_base(base: BaseLang) -> Self {
        match base {
            BaseLang::Stlc => LanguageId::Stlc,
            BaseLang::LamRef => LanguageId::LamRef,
        }
    }

    /// Default language for a source-file extension.
    pub fn from_file_extension(ext: &str) -> Option<Self> {
        Some(match ext {
            "stlc" => LanguageId::Stlc,
            "lref" => LanguageId::LamRef,
            "stlck" => LanguageId::StlcK(ExtensionId::HeapEffect),
            "lrefk" => LanguageId::LamRefK(ExtensionId::HeapEffect),
            "tgt" => LanguageId::Target,
            _ => return None,
        })
    }

    /// Short tag used in manifests and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            LanguageId::Stlc => "stlc",
            LanguageId::LamRef => "lref",
            LanguageId::StlcK(_) => "stlck",
            LanguageId::LamRefK(_) => "lrefk",
            LanguageId::Target => "tgt",
        }
    }

    /// Parses a language tag, attaching `ext` to the extended languages
    /// (defaulting to the heap-effect extension).
    pub fn from_tag(tag: &str, ext: Option<ExtensionId>) -> Result<Self, String> {
        let ext_or_default = ext.unwrap_or(ExtensionId::HeapEffect);
        let lang = match tag {
            "stlc" | "lambda" => LanguageId::Stlc,
            "lref" | "lamref" => LanguageId::LamRef,
            "stlck" => LanguageId::StlcK(ext_or_default),
            "lrefk" | "lamrefk" => LanguageId::LamRefK(ext_or_default),
            "tgt" | "target" => LanguageId::Target,
            other => return Err(format!("unknown language `{other}`")),
        };
        if ext.is_some() && lang.extension().is_none() {
            return Err(format!("language `{tag}` takes no linking-types extension"));
        }
        Ok(lang)
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageId::Stlc => f.write_str("λ"),
            LanguageId::LamRef => f.write_str("λ^ref"),
            LanguageId::StlcK(ext) => write!(f, "λ^κ[{ext}]"),
            LanguageId::LamRefK(ext) => write!(f, "λ^ref,κ[{ext}]"),
            LanguageId::Target => f.write_str("λ^ref_exc"),
        }
    }
}
