//! Type checking and evaluation for λ and λ^ref.

use crate::error::{InChild, TypeError, TypeErrorKind};
use crate::eval::{Machine, Outcome, Store};
use crate::syntax::{BaseLang, SourceTerm, SourceType, Term, TypeEnv};

/// Synthesizes the type of `t` under `env` with the standard rules.
pub fn typecheck_source(
    env: &TypeEnv<SourceType>,
    t: &SourceTerm,
    lang: BaseLang,
) -> Result<SourceType, TypeError> {
    let mut env = env.clone();
    synth(&mut env, t, lang)
}

fn expect(found: &SourceType, expected: &SourceType) -> Result<(), TypeError> {
    if found == expected {
        Ok(())
    } else {
        Err(TypeError::mismatch(expected, found))
    }
}

fn synth(
    env: &mut TypeEnv<SourceType>,
    t: &SourceTerm,
    lang: BaseLang,
) -> Result<SourceType, TypeError> {
    let store_op = |what| {
        if lang.has_refs() {
            Ok(())
        } else {
            Err(TypeError::new(TypeErrorKind::NotInLanguage(what)))
        }
    };
    match t {
        Term::Unit => Ok(SourceType::Unit),
        Term::Int(_) => Ok(SourceType::Int),
        Term::Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnboundVariable(x.clone()))),
        Term::Lam { param, ty, body } => {
            let Some(ty) = ty else {
                return Err(TypeError::new(TypeErrorKind::CannotSynthesize(
                    param.clone(),
                )));
            };
            if ty.mentions_ref() && !lang.has_refs() {
                return Err(TypeError::new(TypeErrorKind::IllegalType(format!(
                    "{ty} mentions ref"
                ))));
            }
            let result = env
                .with(param, ty.clone(), |env| synth(env, body, lang))
                .child(0)?;
            Ok(SourceType::arrow(ty.clone(), result))
        }
        Term::App(f, a) => {
            if let Term::Lam {
                param,
                ty: None,
                body,
            } = &**f
            {
                // `let` sugar: the binder takes the type of the bound term
                let bound = synth(env, a, lang).child(1)?;
                return env
                    .with(param, bound, |env| synth(env, body, lang))
                    .child(0)
                    .child(0);
            }
            let ft = synth(env, f, lang).child(0)?;
            let SourceType::Arrow(param, result) = ft else {
                return Err(TypeError::new(TypeErrorKind::NotAFunction(ft.to_string())).in_child(0));
            };
            let at = synth(env, a, lang).child(1)?;
            expect(&at, &param).child(1)?;
            Ok(*result)
        }
        Term::Bin(_, a, b) => {
            expect(&synth(env, a, lang).child(0)?, &SourceType::Int).child(0)?;
            expect(&synth(env, b, lang).child(1)?, &SourceType::Int).child(1)?;
            Ok(SourceType::Int)
        }
        Term::Ref(a) => {
            store_op("ref")?;
            Ok(SourceType::reference(synth(env, a, lang).child(0)?))
        }
        Term::Deref(a) => {
            store_op("deref")?;
            match synth(env, a, lang).child(0)? {
                SourceType::Ref(inner) => Ok(*inner),
                other => Err(TypeError::mismatch("a reference", other).in_child(0)),
            }
        }
        Term::Assign(a, b) => {
            store_op("assign")?;
            let inner = match synth(env, a, lang).child(0)? {
                SourceType::Ref(inner) => inner,
                other => return Err(TypeError::mismatch("a reference", other).in_child(0)),
            };
            expect(&synth(env, b, lang).child(1)?, &inner).child(1)?;
            Ok(SourceType::Unit)
        }
        Term::Loc(_) => Err(TypeError::new(TypeErrorKind::NotInLanguage(
            "a store location",
        ))),
        Term::Throw(_) | Term::Catch { .. } => {
            Err(TypeError::new(TypeErrorKind::NotInLanguage("throw/catch")))
        }
        Term::Ascribe(..) => Err(TypeError::new(TypeErrorKind::NotInLanguage(
            "a linking-type ascription",
        ))),
    }
}

/// Runs a closed source program with a fresh store.
pub fn eval_source(t: &SourceTerm, fuel: u64) -> Outcome<SourceType> {
    Machine::new(fuel).run(t.clone(), Store::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    fn ty(text: &str, lang: BaseLang) -> Result<SourceType, TypeError> {
        typecheck_source(&TypeEnv::new(), &parse_source(text, lang).unwrap(), lang)
    }

    const CREF: &str = "(lam c (-> (-> unit int) int) \
        (let x (ref 0) (app c (lam u unit (seq (assign x (+ (deref x) 1)) (deref x))))))";

    #[test]
    fn e1_has_the_expected_type() {
        let t = ty("(lam c (-> unit int) (app c unit))", BaseLang::Stlc).unwrap();
        assert_eq!(t.to_string(), "(unit → int) → int");
        assert_eq!(ty("unit", BaseLang::Stlc).unwrap(), SourceType::Unit);
    }

    #[test]
    fn counter_context_needs_refs() {
        let t = ty(CREF, BaseLang::LamRef).unwrap();
        assert_eq!(t.to_string(), "((unit → int) → int) → int");
        let inner = "(let x (ref 0) x)";
        assert!(parse_source(inner, BaseLang::Stlc).is_err());
    }

    #[test]
    fn errors_point_at_the_offending_node() {
        let err = ty("(lam x int (+ x unit))", BaseLang::Stlc).unwrap_err();
        assert_eq!(err.path(), vec![0, 1]);
        let err = ty("(app 1 2)", BaseLang::Stlc).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::NotAFunction(_)));
        assert_eq!(err.path(), vec![0]);
    }

    #[test]
    fn counter_runs() {
        let ctx = parse_source(CREF, BaseLang::LamRef).unwrap();
        for (client, expect) in [
            ("(lam c (-> unit int) (app c unit))", 1),
            ("(lam c (-> unit int) (seq (app c unit) (app c unit)))", 2),
        ] {
            let client = parse_source(client, BaseLang::LamRef).unwrap();
            assert_eq!(
                eval_source(&Term::app(ctx.clone(), client), 1000).as_int(),
                Some(expect)
            );
        }
    }

    #[test]
    fn beta_with_arithmetic() {
        let t = parse_source("(app (lam x int (+ x 1)) 2)", BaseLang::Stlc).unwrap();
        assert_eq!(eval_source(&t, 10).as_int(), Some(3));
    }

    #[test]
    fn landin_knot_never_finishes() {
        let knot = parse_source(
            "(let r (ref (lam n int n)) (seq (assign r (lam n int (app (deref r) n))) (app (deref r) 0)))",
            BaseLang::LamRef,
        )
        .unwrap();
        assert_eq!(
            ty(&crate::syntax::print(&knot), BaseLang::LamRef).unwrap(),
            SourceType::Int
        );
        for fuel in [100, 1_000, 10_000, 100_000] {
            assert!(eval_source(&knot, fuel).is_out_of_fuel());
        }
    }
}
