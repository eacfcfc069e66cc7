//! Cross-language compatibility checking, whole-program assembly and
//! execution.

mod compat;
mod component;
mod link;
mod manifest;

pub use compat::{check_compat, CompatVerdict, Interface, TranslationChain};
pub use component::{
    check_component, compile_checked, Checked, Component, Diagnostic, DiagnosticKind,
};
pub use link::{link, load_component, run, LinkError, LinkedProgram};
pub use manifest::{ComponentDecl, LinkManifest, ManifestError, MANIFEST_FORMAT};
