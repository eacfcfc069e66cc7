//! λ^ref_exc: the modal type checker and evaluation entry point.

use std::collections::BTreeMap;

use crate::error::{InChild, TypeError, TypeErrorKind};
use crate::eval::{Machine, Outcome, Store};
use crate::syntax::{CompType, Effect, TargetTerm, TargetType, Term, TypeEnv};

/// Types of the locations a mid-evaluation term may mention.
pub type StoreTyping = BTreeMap<usize, TargetType>;

/// Value subtyping. `0` is below everything; arrows are contravariant in
/// the parameter and use [`comp_subtype`] on the result.
pub fn target_subtype(a: &TargetType, b: &TargetType) -> bool {
    match (a, b) {
        _ if a == b => true,
        (TargetType::Void, _) => true,
        (TargetType::Arrow(p1, c1), TargetType::Arrow(p2, c2)) => {
            target_subtype(p2, p1) && comp_subtype(c1, c2)
        }
        _ => false,
    }
}

/// `E^ρ_τexn τ ≤ E^ρ'_τexn' τ'` when `ρ ⊑ ρ'`, `τexn` is `0` or equal to
/// `τexn'`, and `τ ≤ τ'`.
pub fn comp_subtype(a: &CompType, b: &CompType) -> bool {
    a.effect.leq(b.effect)
        && (a.exn == TargetType::Void || a.exn == b.exn)
        && target_subtype(&a.result, &b.result)
}

fn join_exn(a: TargetType, b: TargetType) -> Result<TargetType, TypeError> {
    match (a, b) {
        (TargetType::Void, x) | (x, TargetType::Void) => Ok(x),
        (x, y) if x == y => Ok(x),
        (x, y) => Err(TypeError::new(TypeErrorKind::ExnMismatch {
            expected: x.to_string(),
            found: y.to_string(),
        })),
    }
}

fn lub(a: TargetType, b: TargetType) -> Result<TargetType, TypeError> {
    if target_subtype(&a, &b) {
        return Ok(b);
    }
    if target_subtype(&b, &a) {
        return Ok(a);
    }
    match (a, b) {
        (TargetType::Arrow(p1, c1), TargetType::Arrow(p2, c2)) if p1 == p2 => {
            let c1 = *c1;
            let c2 = *c2;
            let comp = CompType::new(
                c1.effect.join(c2.effect),
                join_exn(c1.exn, c2.exn)?,
                lub(c1.result, c2.result)?,
            );
            Ok(TargetType::arrow(*p1, comp))
        }
        (a, b) => Err(TypeError::mismatch(a, b)),
    }
}

struct Checker<'a> {
    env: TypeEnv<TargetType>,
    store: &'a StoreTyping,
}

impl Checker<'_> {
    fn under<R>(&mut self, x: &str, ty: TargetType, f: impl FnOnce(&mut Self) -> R) -> R {
        self.env.push(x, ty);
        let out = f(self);
        self.env.pop();
        out
    }

    fn value(&mut self, v: &TargetTerm) -> Result<TargetType, TypeError> {
        match v {
            Term::Unit => Ok(TargetType::Unit),
            Term::Int(_) => Ok(TargetType::Int),
            Term::Var(x) => self
                .env
                .lookup(x)
                .cloned()
                .ok_or_else(|| TypeError::new(TypeErrorKind::UnboundVariable(x.clone()))),
            Term::Loc(l) => self
                .store
                .get(l)
                .map(|ty| TargetType::reference(ty.clone()))
                .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownLocation(*l))),
            Term::Lam {
                param,
                ty: Some(ty),
                body,
            } => {
                let comp = self.under(param, ty.clone(), |c| c.comp(body)).child(0)?;
                Ok(TargetType::arrow(ty.clone(), comp))
            }
            Term::Lam {
                param, ty: None, ..
            } => Err(TypeError::new(TypeErrorKind::CannotSynthesize(
                param.clone(),
            ))),
            other => Err(TypeError::mismatch("a value", other.constructor())),
        }
    }

    fn comp(&mut self, e: &TargetTerm) -> Result<CompType, TypeError> {
        if matches!(
            e,
            Term::Unit | Term::Int(_) | Term::Var(_) | Term::Loc(_) | Term::Lam { .. }
        ) {
            return Ok(CompType::pure(self.value(e)?));
        }
        match e {
            Term::App(f, a) => {
                if let Term::Lam {
                    param,
                    ty: None,
                    body,
                } = &**f
                {
                    let ca = self.comp(a).child(1)?;
                    let cb = self
                        .under(param, ca.result.clone(), |c| c.comp(body))
                        .child(0)
                        .child(0)?;
                    if ca.result == TargetType::Void {
                        return Ok(CompType::new(ca.effect, ca.exn, TargetType::Void));
                    }
                    return Ok(CompType::new(
                        ca.effect.join(cb.effect),
                        join_exn(ca.exn, cb.exn)?,
                        cb.result,
                    ));
                }
                let cf = self.comp(f).child(0)?;
                let ca = self.comp(a).child(1)?;
                let effect = cf.effect.join(ca.effect);
                let exn = join_exn(cf.exn, ca.exn)?;
                match cf.result {
                    TargetType::Void => Ok(CompType::new(effect, exn, TargetType::Void)),
                    TargetType::Arrow(param, latent) => {
                        if !target_subtype(&ca.result, &param) {
                            return Err(TypeError::mismatch(param, ca.result).in_child(1));
                        }
                        let result = if ca.result == TargetType::Void {
                            TargetType::Void
                        } else {
                            latent.result
                        };
                        Ok(CompType::new(
                            effect.join(latent.effect),
                            join_exn(exn, latent.exn)?,
                            result,
                        ))
                    }
                    other => Err(
                        TypeError::new(TypeErrorKind::NotAFunction(other.to_string())).in_child(0),
                    ),
                }
            }
            Term::Bin(_, a, b) => {
                let ca = self.comp(a).child(0)?;
                let cb = self.comp(b).child(1)?;
                for (i, c) in [(0, &ca), (1, &cb)] {
                    if !target_subtype(&c.result, &TargetType::Int) {
                        return Err(TypeError::mismatch(TargetType::Int, &c.result).in_child(i));
                    }
                }
                Ok(CompType::new(
                    ca.effect.join(cb.effect),
                    join_exn(ca.exn, cb.exn)?,
                    TargetType::Int,
                ))
            }
            Term::Ref(a) => {
                let ca = self.comp(a).child(0)?;
                let result = match ca.result {
                    TargetType::Void => TargetType::Void,
                    ty => TargetType::reference(ty),
                };
                Ok(CompType::new(Effect::Impure, ca.exn, result))
            }
            Term::Deref(a) => {
                let ca = self.comp(a).child(0)?;
                let result = match ca.result {
                    TargetType::Void => TargetType::Void,
                    TargetType::Ref(inner) => *inner,
                    other => return Err(TypeError::mismatch("a reference", other).in_child(0)),
                };
                Ok(CompType::new(Effect::Impure, ca.exn, result))
            }
            Term::Assign(a, b) => {
                let ca = self.comp(a).child(0)?;
                let cb = self.comp(b).child(1)?;
                let exn = join_exn(ca.exn, cb.exn)?;
                let result = match &ca.result {
                    TargetType::Void => TargetType::Void,
                    TargetType::Ref(inner) => {
                        if !target_subtype(&cb.result, inner) {
                            return Err(TypeError::mismatch(inner, &cb.result).in_child(1));
                        }
                        if cb.result == TargetType::Void {
                            TargetType::Void
                        } else {
                            TargetType::Unit
                        }
                    }
                    other => return Err(TypeError::mismatch("a reference", other).in_child(0)),
                };
                Ok(CompType::new(Effect::Impure, exn, result))
            }
            Term::Throw(a) => {
                let ca = self.comp(a).child(0)?;
                let exn = join_exn(ca.exn, ca.result)?;
                Ok(CompType::new(ca.effect, exn, TargetType::Void))
            }
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => {
                let c = self.comp(scrutinee).child(0)?;
                let c1 = self
                    .under(val_binder, c.result.clone(), |k| k.comp(val_body))
                    .child(1)?;
                let c2 = self
                    .under(exc_binder, c.exn.clone(), |k| k.comp(exc_body))
                    .child(2)?;
                Ok(CompType::new(
                    c.effect.join(c1.effect).join(c2.effect),
                    join_exn(c1.exn, c2.exn)?,
                    lub(c1.result, c2.result)?,
                ))
            }
            Term::Ascribe(..) => Err(TypeError::new(TypeErrorKind::NotInLanguage(
                "a linking-type ascription",
            ))),
            _ => unreachable!("values handled above"),
        }
    }
}

/// Types a syntactic value.
pub fn typecheck_target_value(
    env: &TypeEnv<TargetType>,
    v: &TargetTerm,
) -> Result<TargetType, TypeError> {
    typecheck_target_value_in(env, &StoreTyping::new(), v)
}

pub fn typecheck_target_value_in(
    env: &TypeEnv<TargetType>,
    store: &StoreTyping,
    v: &TargetTerm,
) -> Result<TargetType, TypeError> {
    if !v.is_value() && !matches!(v, Term::Var(_)) {
        return Err(TypeError::mismatch("a value", v.constructor()));
    }
    Checker {
        env: env.clone(),
        store,
    }
    .value(v)
}

/// Synthesizes the computation type of `e`, whose exceptions must fit
/// `declared_exn`. The result is reported at `declared_exn`.
pub fn typecheck_target_comp(
    env: &TypeEnv<TargetType>,
    e: &TargetTerm,
    declared_exn: &TargetType,
) -> Result<CompType, TypeError> {
    typecheck_target_comp_in(env, &StoreTyping::new(), e, declared_exn)
}

pub fn typecheck_target_comp_in(
    env: &TypeEnv<TargetType>,
    store: &StoreTyping,
    e: &TargetTerm,
    declared_exn: &TargetType,
) -> Result<CompType, TypeError> {
    let c = Checker {
        env: env.clone(),
        store,
    }
    .comp(e)?;
    if c.exn != TargetType::Void && c.exn != *declared_exn {
        return Err(TypeError::new(TypeErrorKind::ExnMismatch {
            expected: declared_exn.to_string(),
            found: c.exn.to_string(),
        }));
    }
    Ok(CompType::new(c.effect, declared_exn.clone(), c.result))
}

/// The most precise computation type of `e`, exceptions included.
pub fn synth_target_comp(env: &TypeEnv<TargetType>, e: &TargetTerm) -> Result<CompType, TypeError> {
    Checker {
        env: env.clone(),
        store: &StoreTyping::new(),
    }
    .comp(e)
}

/// Checks `e` against `expected` up to subsumption.
pub fn check_target_comp(
    env: &TypeEnv<TargetType>,
    e: &TargetTerm,
    expected: &CompType,
) -> Result<(), TypeError> {
    let c = synth_target_comp(env, e)?;
    if comp_subtype(&c, expected) {
        Ok(())
    } else if c.exn != TargetType::Void && c.exn != expected.exn {
        Err(TypeError::new(TypeErrorKind::ExnMismatch {
            expected: expected.exn.to_string(),
            found: c.exn.to_string(),
        }))
    } else if !c.effect.leq(expected.effect) {
        Err(TypeError::new(TypeErrorKind::EffectMismatch {
            allowed: expected.effect,
            found: c.effect,
        }))
    } else {
        Err(TypeError::mismatch(expected, c))
    }
}

/// Runs a closed target program.
pub fn eval_target(e: &TargetTerm, store: Store<TargetType>, fuel: u64) -> Outcome<TargetType> {
    Machine::new(fuel).run(e.clone(), store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_target;

    fn comp(text: &str, exn: TargetType) -> Result<CompType, TypeError> {
        typecheck_target_comp(&TypeEnv::new(), &parse_target(text).unwrap(), &exn)
    }

    #[test]
    fn values_are_pure() {
        assert_eq!(
            comp("5", TargetType::Void).unwrap().to_string(),
            "E^∘_0 int"
        );
        let id = typecheck_target_value(&TypeEnv::new(), &parse_target("(lam x int x)").unwrap())
            .unwrap();
        assert_eq!(id.to_string(), "int → E^∘_0 int");
        assert_eq!(
            typecheck_target_value(&TypeEnv::new(), &Term::Unit).unwrap(),
            TargetType::Unit
        );
    }

    #[test]
    fn allocation_is_impure_at_any_exception_type() {
        let v = typecheck_target_value(
            &TypeEnv::new(),
            &parse_target("(lam x unit (ref 0))").unwrap(),
        )
        .unwrap();
        let TargetType::Arrow(_, c) = &v else {
            panic!()
        };
        assert_eq!(c.effect, Effect::Impure);
        for exn in [TargetType::Void, TargetType::Int, TargetType::Unit] {
            let want = CompType::new(Effect::Impure, exn, TargetType::reference(TargetType::Int));
            assert!(comp_subtype(c, &want));
        }
    }

    #[test]
    fn calling_a_reader_joins_its_latent_effect() {
        let env: TypeEnv<TargetType> = [("r", TargetType::reference(TargetType::Int))]
            .into_iter()
            .collect();
        let e = parse_target("(app (lam x unit (deref r)) unit)").unwrap();
        let c = typecheck_target_comp(&env, &e, &TargetType::Unit).unwrap();
        assert_eq!(
            c,
            CompType::new(Effect::Impure, TargetType::Unit, TargetType::Int)
        );
    }

    #[test]
    fn throw_is_heap_pure_and_fits_any_result() {
        let c = comp("(throw 3)", TargetType::Int).unwrap();
        assert_eq!(
            (c.effect, &c.exn, &c.result),
            (Effect::Pure, &TargetType::Int, &TargetType::Void)
        );
        for result in [TargetType::Int, TargetType::Unit] {
            let want = CompType::new(Effect::Pure, TargetType::Int, result);
            assert!(
                check_target_comp(&TypeEnv::new(), &parse_target("(throw 3)").unwrap(), &want)
                    .is_ok()
            );
        }
        let err = comp("(throw 3)", TargetType::Void).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::ExnMismatch { .. }));
    }

    #[test]
    fn catch_discharges_and_may_rethrow() {
        let c = comp("(catch (throw 5) (val x 0) (exc y y))", TargetType::Void).unwrap();
        assert_eq!(c, CompType::pure(TargetType::Int));
        let c = comp(
            "(catch (throw 5) (val x 0) (exc y (throw unit)))",
            TargetType::Unit,
        )
        .unwrap();
        assert_eq!(c.exn, TargetType::Unit);
        let err = comp("(+ (throw 1) (throw unit))", TargetType::Int).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::ExnMismatch { .. }));
    }

    #[test]
    fn catch_includes_the_scrutinee_effect() {
        let c = comp("(catch (ref 1) (val x 0) (exc y 1))", TargetType::Void).unwrap();
        assert_eq!(c.effect, Effect::Impure);
    }

    #[test]
    fn store_typing_covers_locations() {
        let store: StoreTyping = [(0, TargetType::Int)].into_iter().collect();
        let e = parse_target("(deref x)").unwrap().subst("x", &Term::Loc(0));
        let c = typecheck_target_comp_in(&TypeEnv::new(), &store, &e, &TargetType::Void).unwrap();
        assert_eq!(c.result, TargetType::Int);
        assert!(typecheck_target_comp(&TypeEnv::new(), &e, &TargetType::Void).is_err());
    }
}
