//! Registration of linking-types extensions.
//!
//! An extension is accepted only after its κ+/κ− pair and its term grammar
//! pass the checkable extension properties on a generated type corpus.

use std::fmt;

use thiserror::Error;

use crate::gen;
use crate::linking::{kappa_minus, kappa_plus, reasoning_only, well_formed, KappaError};
use crate::syntax::{BaseLang, ExtensionId, LinkType, SourceType};

pub const DEFAULT_SEED: u64 = 0x5EED_0001;
pub const CORPUS_SIZE: usize = 1000;
pub const CORPUS_DEPTH: usize = 6;

/// Constructors programmers of `base` write directly.
pub fn programmer_constructors(base: BaseLang) -> &'static [&'static str] {
    const PURE: &[&str] = &[
        "unit",
        "integer literal",
        "variable",
        "lambda",
        "application",
        "arithmetic",
        "annotation",
    ];
    const WITH_REFS: &[&str] = &[
        "unit",
        "integer literal",
        "variable",
        "lambda",
        "application",
        "arithmetic",
        "annotation",
        "ref",
        "dereference",
        "assignment",
    ];
    if base.has_refs() {
        WITH_REFS
    } else {
        PURE
    }
}

pub type PlusFn = fn(&SourceType, BaseLang) -> Result<LinkType, KappaError>;
pub type MinusFn = fn(&LinkType, BaseLang) -> SourceType;
pub type WellFormedFn = fn(&LinkType) -> bool;
pub type ReasoningOnlyFn = fn(BaseLang) -> &'static [&'static str];

/// Everything the registry needs to know about an extension.
#[derive(Clone)]
pub struct ExtensionSpec {
    pub name: String,
    /// The builtin extension this spec describes, if any.
    pub id: Option<ExtensionId>,
    /// Linking-type constructors beyond the base grammar, for display.
    pub constructors: &'static [&'static str],
    /// Typing obligations beyond the base rules, for display.
    pub obligations: &'static [&'static str],
    pub kappa_plus: PlusFn,
    pub kappa_minus: MinusFn,
    pub well_formed: WellFormedFn,
    pub reasoning_only: ReasoningOnlyFn,
    /// Whether the compiler translates this extension's types.
    pub translates: bool,
}

impl fmt::Debug for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionSpec")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

macro_rules! builtin_fns {
    ($plus:ident, $minus:ident, $wf:ident, $ro:ident, $ext:expr) => {
        fn $plus(ty: &SourceType, base: BaseLang) -> Result<LinkType, KappaError> {
            kappa_plus(ty, base, $ext)
        }
        fn $minus(ty: &LinkType, base: BaseLang) -> SourceType {
            kappa_minus(ty, base, $ext)
        }
        fn $wf(ty: &LinkType) -> bool {
            well_formed(ty, $ext)
        }
        fn $ro(base: BaseLang) -> &'static [&'static str] {
            reasoning_only(base, $ext)
        }
    };
}

builtin_fns!(
    heap_plus,
    heap_minus,
    heap_wf,
    heap_ro,
    ExtensionId::HeapEffect
);
builtin_fns!(lin_plus, lin_minus, lin_wf, lin_ro, ExtensionId::Linear);
builtin_fns!(
    term_plus,
    term_minus,
    term_wf,
    term_ro,
    ExtensionId::Terminating
);
builtin_fns!(cost_plus, cost_minus, cost_wf, cost_ro, ExtensionId::Cost);

impl ExtensionSpec {
    pub fn builtin(id: ExtensionId) -> Self {
        let (plus, minus, wf, ro): (PlusFn, MinusFn, WellFormedFn, ReasoningOnlyFn) = match id {
            ExtensionId::HeapEffect => (heap_plus, heap_minus, heap_wf, heap_ro),
            ExtensionId::Linear => (lin_plus, lin_minus, lin_wf, lin_ro),
            ExtensionId::Terminating => (term_plus, term_minus, term_wf, term_ro),
            ExtensionId::Cost => (cost_plus, cost_minus, cost_wf, cost_ro),
        };
        let (constructors, obligations): (&[&str], &[&str]) = match id {
            ExtensionId::HeapEffect => (&["τ → R^ε τ"], &["effect of a body bounded by its arrow"]),
            ExtensionId::Linear => (&["φ^L", "τ → τ"], &["linear variables used exactly once"]),
            ExtensionId::Terminating => (
                &["τ → τ↾", "τ → τ"],
                &["bodies of ↾ arrows pass the termination check"],
            ),
            ExtensionId::Cost => (
                &["τ → C^N τ", "τ → C^• τ"],
                &["bodies of C^N arrows cost exactly N"],
            ),
        };
        ExtensionSpec {
            name: id.name().to_string(),
            id: Some(id),
            constructors,
            obligations,
            kappa_plus: plus,
            kappa_minus: minus,
            well_formed: wf,
            reasoning_only: ro,
            translates: id == ExtensionId::HeapEffect,
        }
    }

    /// κ+ = κ− = id, with no new constructors.
    pub fn identity() -> Self {
        fn plus(ty: &SourceType, base: BaseLang) -> Result<LinkType, KappaError> {
            if !base.has_refs() && ty.mentions_ref() {
                return Err(KappaError::IllegalType(ty.clone()));
            }
            Ok(embed(ty))
        }
        fn embed(ty: &SourceType) -> LinkType {
            match ty {
                SourceType::Unit => LinkType::Unit,
                SourceType::Int => LinkType::Int,
                SourceType::Ref(a) => LinkType::reference(embed(a)),
                SourceType::Arrow(a, b) => LinkType::arrow(embed(a), embed(b)),
            }
        }
        fn minus(ty: &LinkType, base: BaseLang) -> SourceType {
            kappa_minus(ty, base, ExtensionId::Linear)
        }
        fn wf(ty: &LinkType) -> bool {
            match ty {
                LinkType::Unit | LinkType::Int => true,
                LinkType::Ref(a) => wf(a),
                LinkType::Arrow(a, b) => wf(a) && wf(b),
                _ => false,
            }
        }
        fn none(_: BaseLang) -> &'static [&'static str] {
            &[]
        }
        ExtensionSpec {
            name: "identity".into(),
            id: None,
            constructors: &[],
            obligations: &[],
            kappa_plus: plus,
            kappa_minus: minus,
            well_formed: wf,
            reasoning_only: none,
            translates: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// κ−(κ+(τ)) = τ.
    RoundTrip,
    /// κ+(τ) is a type of the extension.
    Embedding,
    /// Reasoning-only constructors are not in the programmer grammar.
    Disjointness,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::RoundTrip => "κ−(κ+(τ)) = τ",
            Property::Embedding => "κ+(τ) is a well-formed linking type",
            Property::Disjointness => {
                "reasoning-only constructors are disjoint from the programmer grammar"
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "extension `{extension}` violates {property} over {base} at {counterexample} (seed {seed:#x})"
)]
pub struct RegistrationError {
    pub extension: String,
    pub property: Property,
    pub base: BaseLang,
    /// Smallest failing type found, or the offending constructor.
    pub counterexample: String,
    pub seed: u64,
}

/// What registration checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationReport {
    pub extension: String,
    pub seed: u64,
    pub types_checked: usize,
}

/// The deterministic corpus the properties are checked over.
pub fn corpus(base: BaseLang, seed: u64) -> Vec<SourceType> {
    let mut rng = gen::rng(seed ^ base as u64);
    (0..CORPUS_SIZE)
        .map(|_| gen::source_type(&mut rng, base, CORPUS_DEPTH))
        .collect()
}

fn type_property(spec: &ExtensionSpec, base: BaseLang, ty: &SourceType) -> Option<Property> {
    match (spec.kappa_plus)(ty, base) {
        Err(_) => Some(Property::Embedding),
        Ok(l) if !(spec.well_formed)(&l) => Some(Property::Embedding),
        Ok(l) if (spec.kappa_minus)(&l, base) != *ty => Some(Property::RoundTrip),
        Ok(_) => None,
    }
}

/// Candidate simplifications of `ty`, simplest first.
fn shrinks(ty: &SourceType) -> Vec<SourceType> {
    let mut out = Vec::new();
    match ty {
        SourceType::Unit => {}
        SourceType::Int => out.push(SourceType::Unit),
        SourceType::Ref(a) => {
            out.extend([SourceType::Unit, SourceType::Int, (**a).clone()]);
            out.extend(shrinks(a).into_iter().map(SourceType::reference));
        }
        SourceType::Arrow(a, b) => {
            out.extend([
                SourceType::Unit,
                SourceType::Int,
                (**a).clone(),
                (**b).clone(),
            ]);
            out.extend(
                shrinks(a)
                    .into_iter()
                    .map(|a2| SourceType::arrow(a2, (**b).clone())),
            );
            out.extend(
                shrinks(b)
                    .into_iter()
                    .map(|b2| SourceType::arrow((**a).clone(), b2)),
            );
        }
    }
    out
}

/// Greedily shrinks a failing type while it keeps failing `property`.
fn shrink(
    spec: &ExtensionSpec,
    base: BaseLang,
    property: Property,
    mut ty: SourceType,
) -> SourceType {
    'outer: loop {
        for smaller in shrinks(&ty) {
            if type_property(spec, base, &smaller) == Some(property) {
                ty = smaller;
                continue 'outer;
            }
        }
        return ty;
    }
}

/// Checks `spec` with the default seed.
pub fn register(spec: &ExtensionSpec) -> Result<RegistrationReport, RegistrationError> {
    register_with_seed(spec, DEFAULT_SEED)
}

pub fn register_with_seed(
    spec: &ExtensionSpec,
    seed: u64,
) -> Result<RegistrationReport, RegistrationError> {
    let mut checked = 0;
    for base in [BaseLang::Stlc, BaseLang::LamRef] {
        let fail = |property, counterexample: String| RegistrationError {
            extension: spec.name.clone(),
            property,
            base,
            counterexample,
            seed,
        };
        if let Some(c) = (spec.reasoning_only)(base)
            .iter()
            .find(|c| programmer_constructors(base).contains(c))
        {
            return Err(fail(Property::Disjointness, c.to_string()));
        }
        for ty in corpus(base, seed) {
            if let Some(p) = type_property(spec, base, &ty) {
                return Err(fail(p, shrink(spec, base, p, ty).to_string()));
            }
            checked += 1;
        }
    }
    Ok(RegistrationReport {
        extension: spec.name.clone(),
        seed,
        types_checked: checked,
    })
}

/// The accepted extensions. Built once, then only read.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<(ExtensionSpec, RegistrationReport)>,
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            entries: Vec::new(),
        }
    }

    /// All four shipped extensions.
    pub fn builtin() -> Result<Self, RegistrationError> {
        let mut r = Registry::new();
        for id in ExtensionId::ALL {
            r.add(ExtensionSpec::builtin(id))?;
        }
        Ok(r)
    }

    pub fn add(&mut self, spec: ExtensionSpec) -> Result<&RegistrationReport, RegistrationError> {
        let report = register(&spec)?;
        self.entries.push((spec, report));
        Ok(&self.entries.last().expect("just pushed").1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ExtensionSpec, RegistrationReport)> {
        self.entries.iter()
    }

    pub fn get(&self, name: &str) -> Option<&ExtensionSpec> {
        self.entries.iter().map(|(s, _)| s).find(|s| s.name == name)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new()
    }
}

/// One row of an extension's κ table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaRow {
    pub base: BaseLang,
    pub source: SourceType,
    pub plus: LinkType,
    pub minus: SourceType,
}

/// κ+ and κ− on representative types of each base.
pub fn kappa_table(spec: &ExtensionSpec) -> Vec<KappaRow> {
    use SourceType as S;
    let mut rows = Vec::new();
    for base in [BaseLang::Stlc, BaseLang::LamRef] {
        let mut samples = vec![
            S::Unit,
            S::Int,
            S::arrow(S::Int, S::Int),
            S::arrow(S::arrow(S::Int, S::Int), S::Int),
        ];
        if base.has_refs() {
            samples.push(S::reference(S::Int));
        }
        for source in samples {
            if let Ok(plus) = (spec.kappa_plus)(&source, base) {
                let minus = (spec.kappa_minus)(&plus, base);
                rows.push(KappaRow {
                    base,
                    source,
                    plus,
                    minus,
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broken() -> ExtensionSpec {
        fn minus(ty: &LinkType, base: BaseLang) -> SourceType {
            match ty {
                LinkType::Ref(_) => SourceType::Int,
                LinkType::EffArrow(a, _, b) => SourceType::arrow(minus(a, base), minus(b, base)),
                other => kappa_minus(other, base, ExtensionId::HeapEffect),
            }
        }
        ExtensionSpec {
            name: "broken".into(),
            id: None,
            kappa_minus: minus,
            ..ExtensionSpec::builtin(ExtensionId::HeapEffect)
        }
    }

    #[test]
    fn shipped_and_identity_extensions_register() {
        let r = Registry::builtin().unwrap();
        assert_eq!(r.iter().count(), 4);
        assert!(r
            .iter()
            .all(|(_, rep)| rep.types_checked == 2 * CORPUS_SIZE));
        assert!(register(&ExtensionSpec::identity()).is_ok());
    }

    #[test]
    fn broken_projection_is_rejected_with_a_shrunk_witness() {
        let e = register(&broken()).unwrap_err();
        assert_eq!(e.property, Property::RoundTrip);
        assert_eq!(e.base, BaseLang::LamRef);
        assert_eq!(e.counterexample, "ref unit");
        assert_eq!(register(&broken()).unwrap_err(), e);
    }

    #[test]
    fn overlapping_grammars_are_rejected() {
        fn ro(_: BaseLang) -> &'static [&'static str] {
            &["application"]
        }
        let spec = ExtensionSpec {
            reasoning_only: ro,
            ..ExtensionSpec::identity()
        };
        assert_eq!(
            register(&spec).unwrap_err().property,
            Property::Disjointness
        );
    }

    #[test]
    fn shrinking_prefers_simpler_types() {
        let big = SourceType::arrow(
            SourceType::Int,
            SourceType::reference(SourceType::arrow(SourceType::Int, SourceType::Int)),
        );
        assert_eq!(
            shrink(&broken(), BaseLang::LamRef, Property::RoundTrip, big).to_string(),
            "ref unit"
        );
    }

    #[test]
    fn kappa_tables_list_both_bases() {
        let rows = kappa_table(&ExtensionSpec::builtin(ExtensionId::HeapEffect));
        let arrow = |b| {
            rows.iter()
                .find(|r| r.base == b && r.source.to_string() == "int → int")
                .unwrap()
                .plus
                .to_string()
        };
        assert_eq!(arrow(BaseLang::Stlc), "int → R^∘ int");
        assert_eq!(arrow(BaseLang::LamRef), "int → R^• int");
    }
}
