use std::path::Path;

use linkc_core::compiler::{compile, translate_type};
use linkc_core::equiv::{apply, builtin_suites, probe, Candidate, EquivVerdict, ProbeContext};
use linkc_core::gen::{self, TermGen, TermOptions};
use linkc_core::linker::{
    check_compat, link, CompatVerdict, ComponentDecl, Interface, LinkManifest, MANIFEST_FORMAT,
};
use linkc_core::linking::{kappa_minus, project_term, typecheck_linked};
use linkc_core::registry::{register_with_seed, ExtensionSpec};
use linkc_core::syntax::{
    print, BaseLang, Effect, ExtensionId, LanguageId, LinkType, SourceType, TargetType, Term,
    TypeEnv, TypeSyntax,
};
use linkc_core::Outcome;

const HEAP: ExtensionId = ExtensionId::HeapEffect;
const BASE: BaseLang = BaseLang::LamRef;

fn linked(ty: &LinkType) -> Interface {
    Interface::Linked {
        ty: ty.clone(),
        base: BASE,
        ext: HEAP,
    }
}

fn source(ty: &LinkType) -> Interface {
    Interface::Source {
        ty: kappa_minus(ty, BASE, HEAP),
        base: BASE,
    }
}

/// Interface pairs mixing equal, projected and unrelated types.
fn pairs() -> Vec<(Interface, Interface)> {
    let mut rng = gen::rng(31);
    let mut out = Vec::new();
    for i in 0..400 {
        let a = gen::link_type(&mut rng, HEAP, 3);
        let b = gen::link_type(&mut rng, HEAP, 3);
        out.push(match i % 4 {
            0 => (linked(&a), linked(&a)),
            1 => (linked(&a), source(&a)),
            2 => (source(&a), source(&b)),
            _ => (linked(&a), linked(&b)),
        });
    }
    out
}

#[test]
fn compatibility_is_symmetric() {
    let mut compatible = 0;
    for (a, b) in pairs() {
        let there = check_compat(&a, &b).is_compatible();
        assert_eq!(there, check_compat(&b, &a).is_compatible(), "{a} / {b}");
        compatible += usize::from(there);
    }
    assert!(compatible >= 100, "only {compatible} compatible pairs");
}

/// Whether `x` and `y` sit at the same position inside `a` and `b`.
fn same_position(a: &TargetType, b: &TargetType, x: &TargetType, y: &TargetType) -> bool {
    if a == x && b == y {
        return true;
    }
    match (a, b) {
        (TargetType::Ref(p), TargetType::Ref(q)) => same_position(p, q, x, y),
        (TargetType::Arrow(p1, c1), TargetType::Arrow(p2, c2)) => {
            same_position(p1, p2, x, y) || same_position(&c1.result, &c2.result, x, y)
        }
        _ => false,
    }
}

#[test]
fn incompatibility_chains_replay() {
    let mut replayed = 0;
    for (a, b) in pairs() {
        let CompatVerdict::Incompatible {
            client,
            provider,
            mismatch,
        } = check_compat(&a, &b)
        else {
            continue;
        };
        for chain in [&client, &provider] {
            let link = chain
                .link
                .as_ref()
                .expect("heap-effect types have a link step");
            assert_eq!(
                &translate_type(link).map_err(|e| e.to_string()),
                &chain.target
            );
        }
        let (x, y) = mismatch.expect("both sides translate");
        let (ta, tb) = (client.target.unwrap(), provider.target.unwrap());
        assert_ne!(x, y);
        assert!(
            same_position(&ta, &tb, &x, &y),
            "{x} / {y} not found in {ta} / {tb}"
        );
        replayed += 1;
    }
    assert!(replayed >= 100);
}

fn inline(name: &str, lang: LanguageId, text: String) -> ComponentDecl {
    ComponentDecl {
        name: name.into(),
        path: None,
        source: Some(text),
        language: Some(lang.tag().into()),
        extension: lang.extension(),
        export: None,
        annotation: None,
    }
}

#[test]
fn compatible_interfaces_link_into_well_typed_programs() {
    let mut g = TermGen::new(32, TermOptions::default());
    let mut linked_ok = 0;
    for i in 0..150 {
        let ty = g.value_type(Effect::Pure, 2);
        let value = g.closed(&ty, Effect::Pure, 3);
        let client = Term::lam("p", ty.clone(), Term::Int(0));
        let (provider, offered) = if i % 2 == 0 {
            let mut decl = inline("provider", LanguageId::LamRefK(HEAP), print(&value));
            decl.annotation = Some(ty.to_sexpr());
            (decl, linked(&ty))
        } else {
            let text = print(&project_term(&value, BASE, HEAP));
            (inline("provider", LanguageId::LamRef, text), source(&ty))
        };
        if !check_compat(&linked(&ty), &offered).is_compatible() {
            continue;
        }
        let m = LinkManifest {
            format: MANIFEST_FORMAT.into(),
            components: vec![
                provider,
                inline("client", LanguageId::LamRefK(HEAP), print(&client)),
            ],
            main: "(app client provider)".into(),
        };
        let program = link(&m, Path::new(".")).unwrap_or_else(|e| panic!("{ty}: {e}"));
        assert_eq!(program.comp.result, TargetType::Int);
        linked_ok += 1;
    }
    assert!(linked_ok >= 75, "only {linked_ok} compatible pairs");
}

fn candidates(hole: &LinkType, seed: u64) -> Vec<Candidate> {
    let mut g = TermGen::new(seed, TermOptions::default());
    (0..8)
        .map(|i| Candidate {
            name: format!("p{i}"),
            term: g.closed(hole, Effect::Pure, 4),
            base: BASE,
        })
        .collect()
}

fn code(c: &Candidate, hole: &LinkType) -> linkc_core::syntax::TargetTerm {
    compile(&typecheck_linked(&TypeEnv::new(), &c.term, c.base, HEAP, Some(hole)).unwrap()).unwrap()
}

#[test]
fn larger_suites_keep_every_distinction_and_witnesses_replay() {
    let mut distinguished = 0;
    for (k, (hole, suite)) in builtin_suites().into_iter().enumerate() {
        let cands = candidates(&hole, 40 + k as u64);
        for a in &cands {
            for b in &cands {
                let mut seen = false;
                for n in 0..=suite.len() {
                    let v = probe(a, b, &hole, &suite[..n], 10_000);
                    assert!(!v.is_ill_typed(), "{v:?}");
                    assert!(
                        !seen || v.is_distinguished(),
                        "{} / {} lost a distinction at {n}",
                        a.term,
                        b.term
                    );
                    seen = v.is_distinguished();
                    if let EquivVerdict::Distinguished {
                        context,
                        left,
                        right,
                    } = v
                    {
                        let ctx: &ProbeContext = suite.iter().find(|c| c.name == context).unwrap();
                        for (cand, want) in [(a, left), (b, right)] {
                            let Outcome::Value(got, _) = apply(ctx, &code(cand, &hole), 10_000)
                            else {
                                panic!("witness {context} did not replay")
                            };
                            assert_eq!(got, want);
                        }
                    }
                }
                distinguished += usize::from(seen);
            }
        }
    }
    assert!(distinguished > 0);
}

#[test]
fn registration_is_deterministic_per_seed() {
    fn broken_minus(ty: &LinkType, base: BaseLang) -> SourceType {
        match ty {
            LinkType::Ref(_) => SourceType::Int,
            other => kappa_minus(other, base, HEAP),
        }
    }
    let broken = ExtensionSpec {
        name: "broken".into(),
        id: None,
        kappa_minus: broken_minus,
        ..ExtensionSpec::builtin(HEAP)
    };
    for seed in [1, 2, 0xFEED] {
        let spec = ExtensionSpec::builtin(ExtensionId::Cost);
        let a = register_with_seed(&spec, seed).unwrap();
        let b = register_with_seed(&spec, seed).unwrap();
        assert_eq!((a.seed, a.types_checked), (b.seed, b.types_checked));
        let e1 = register_with_seed(&broken, seed).unwrap_err();
        let e2 = register_with_seed(&broken, seed).unwrap_err();
        assert_eq!(e1.to_string(), e2.to_string());
        assert_eq!(e1.seed, seed);
    }
}
