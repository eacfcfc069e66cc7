use linkc_core::gen::{TargetGen, TermGen, TermOptions};
use linkc_core::linking::project_term;
use linkc_core::syntax::{
    parse_linked, parse_source, parse_target, print, BaseLang, Effect, ExtensionId, LinkType,
    TargetType, Term,
};
use proptest::prelude::*;

const HEAP: ExtensionId = ExtensionId::HeapEffect;

proptest! {
    #[test]
    fn linked_terms_round_trip(seed in any::<u64>(), depth in 0usize..=8, pure in any::<bool>()) {
        let mut g = TermGen::new(seed, TermOptions::default());
        let budget = if pure { Effect::Pure } else { Effect::Impure };
        let ty = g.value_type(budget, 2);
        let t = g.closed(&ty, budget, depth);
        let text = print(&t);
        prop_assert_eq!(parse_linked(&text, BaseLang::LamRef, HEAP).unwrap(), t);
    }

    #[test]
    fn source_terms_round_trip(seed in any::<u64>(), depth in 0usize..=8, refs in any::<bool>()) {
        let base = if refs { BaseLang::LamRef } else { BaseLang::Stlc };
        let mut g = TermGen::new(seed, TermOptions { store: refs, pure_arrows: false });
        let t = project_term(&g.closed(&LinkType::Int, Effect::Impure, depth), base, HEAP);
        let text = print(&t);
        prop_assert_eq!(parse_source(&text, base).unwrap(), t);
    }

    #[test]
    fn target_terms_round_trip(seed in any::<u64>(), depth in 0usize..=8, raises in any::<bool>()) {
        let exn = if raises { TargetType::Int } else { TargetType::Void };
        let t = TargetGen::new(seed).closed(&TargetType::Int, &exn, depth);
        let text = print(&t);
        prop_assert_eq!(parse_target(&text).unwrap(), t);
    }
}

#[test]
fn fifty_nested_lambdas_and_sums_round_trip() {
    let mut t: Term<LinkType> = Term::Int(0);
    for i in 0..50 {
        t = if i % 2 == 0 {
            Term::lam(format!("x{i}"), LinkType::Int, t)
        } else {
            Term::sum(Term::app(t, Term::Int(i)), Term::var(format!("x{}", i - 1)))
        };
    }
    assert!(t.depth() >= 50);
    let text = print(&t);
    assert_eq!(parse_linked(&text, BaseLang::LamRef, HEAP).unwrap(), t);
}
