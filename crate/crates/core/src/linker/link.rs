use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::TypeError;
use crate::eval::{Outcome, Store};
use crate::syntax::{CompType, TargetTerm, TargetType, Term, TypeEnv};
use crate::target::{eval_target, synth_target_comp};

use super::compat::{check_compat, CompatVerdict};
use super::component::{check_component, compile_checked, Component, Diagnostic};
use super::manifest::{ComponentDecl, LinkManifest, ManifestError};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Component(#[from] Diagnostic),
    #[error(
        "`{client}` expects {expected}, which is not compatible with {found} from `{provider}`"
    )]
    Incompatible {
        client: String,
        provider: String,
        /// Source-level view of what the client expects.
        expected: String,
        /// Source-level view of what the provider offers.
        found: String,
        verdict: Box<CompatVerdict>,
    },
    #[error("the linked program does not typecheck: {0}")]
    Program(TypeError),
}

/// A closed target program assembled from a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedProgram {
    pub components: Vec<Component>,
    pub term: TargetTerm,
    pub comp: CompType,
}

/// Reads and compiles one declared component. Paths are relative to `dir`.
pub fn load_component(decl: &ComponentDecl, dir: &Path) -> Result<Component, LinkError> {
    let language = decl.language()?;
    let (origin, text) = match (&decl.path, &decl.source) {
        (Some(p), _) => {
            let full: PathBuf = dir.join(p);
            let origin = full.display().to_string();
            let text = std::fs::read_to_string(&full).map_err(|e| Diagnostic {
                origin: origin.clone(),
                pos: crate::syntax::Pos { line: 1, col: 1 },
                kind: super::component::DiagnosticKind::Io(e.to_string()),
            })?;
            (origin, text)
        }
        (None, Some(s)) => (format!("<{}>", decl.name), s.clone()),
        (None, None) => return Err(ManifestError::NoSource(decl.name.clone()).into()),
    };
    let checked = check_component(
        &origin,
        &text,
        language,
        decl.export.as_deref(),
        decl.annotation.as_deref(),
    )?;
    Ok(compile_checked(&origin, &decl.name, checked)?)
}

/// Compiles every component, checks each application of one component to
/// another for compatibility, then binds the compiled code around `main`
/// in declaration order.
pub fn link(manifest: &LinkManifest, dir: &Path) -> Result<LinkedProgram, LinkError> {
    manifest.validate()?;
    let components = manifest
        .components
        .iter()
        .map(|d| load_component(d, dir))
        .collect::<Result<Vec<_>, _>>()?;
    let main = manifest.main_term()?;
    check_uses(&main, &components)?;

    let mut term = main;
    for c in components.iter().rev() {
        term = Term::let_in(c.name.clone(), c.code.clone(), term);
    }
    let comp = synth_target_comp(&TypeEnv::new(), &term).map_err(LinkError::Program)?;
    Ok(LinkedProgram {
        components,
        term,
        comp,
    })
}

fn check_uses(main: &TargetTerm, components: &[Component]) -> Result<(), LinkError> {
    let find = |t: &TargetTerm| match t {
        Term::Var(x) => components.iter().find(|c| c.name == *x),
        _ => None,
    };
    if let Term::App(f, a) = main {
        if let (Some(client), Some(provider)) = (find(f), find(a)) {
            if let Some(expected) = client.interface().param() {
                let offered = provider.interface();
                let verdict = check_compat(&expected, &offered);
                if !verdict.is_compatible() {
                    return Err(LinkError::Incompatible {
                        client: client.name.clone(),
                        provider: provider.name.clone(),
                        expected: expected.source_view(),
                        found: offered.source_view(),
                        verdict: Box::new(verdict),
                    });
                }
            }
        }
    }
    main.children()
        .into_iter()
        .try_for_each(|c| check_uses(c, components))
}

/// Links and runs `manifest` on a fresh store.
pub fn run(
    manifest: &LinkManifest,
    dir: &Path,
    fuel: u64,
) -> Result<Outcome<TargetType>, LinkError> {
    let program = link(manifest, dir)?;
    Ok(eval_target(&program.term, Store::new(), fuel))
}
