use crate::error::{InChild, TypeError, TypeErrorKind};
use crate::syntax::{BaseLang, CostBound, Effect, ExtensionId, LinkTerm, LinkType, Term, TypeEnv};

use super::kappa::{foreign_constructor, kappa_minus, kappa_plus};

/// A successful check of an extended-language term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkJudgment {
    /// The checked term with every binder annotated and ascriptions removed.
    pub subject: LinkTerm,
    pub ty: LinkType,
    /// Effect of evaluating the subject itself.
    pub effect: Effect,
}

/// Checks `t` in the `ext` extension of `base`, against `annotation` when
/// one is given and by synthesis otherwise.
pub fn typecheck_linked(
    env: &TypeEnv<LinkType>,
    t: &LinkTerm,
    base: BaseLang,
    ext: ExtensionId,
    annotation: Option<&LinkType>,
) -> Result<LinkJudgment, TypeError> {
    let mut checker = Checker::new(base, ext, env.clone());
    match annotation {
        Some(ty) => {
            checker.validate(ty)?;
            let (subject, effect) = checker.check(t, ty)?;
            Ok(LinkJudgment {
                subject,
                ty: ty.clone(),
                effect,
            })
        }
        None => {
            let (subject, ty, effect) = checker.synth(t)?;
            Ok(LinkJudgment {
                subject,
                ty,
                effect,
            })
        }
    }
}

/// Subtyping on linking types: arrows are contravariant in the parameter
/// and covariant in effect and result, terminating arrows may be used as
/// plain ones, known costs as unknown ones, and unrestricted values as
/// linear ones. References are invariant.
pub fn link_subtype(a: &LinkType, b: &LinkType) -> bool {
    use LinkType::*;
    if a == b {
        return true;
    }
    match (a, b) {
        (Lin(x), Lin(y)) => link_subtype(x, y),
        (Lin(_), _) => false,
        (x, Lin(y)) => link_subtype(x, y),
        (EffArrow(p1, e1, r1), EffArrow(p2, e2, r2)) => {
            e1.leq(*e2) && link_subtype(p2, p1) && link_subtype(r1, r2)
        }
        (Arrow(p1, r1) | TermArrow(p1, r1), Arrow(p2, r2))
        | (TermArrow(p1, r1), TermArrow(p2, r2)) => link_subtype(p2, p1) && link_subtype(r1, r2),
        (CostArrow(p1, c1, r1), CostArrow(p2, c2, r2)) => {
            (c1 == c2 || *c2 == CostBound::Unknown) && link_subtype(p2, p1) && link_subtype(r1, r2)
        }
        _ => false,
    }
}

pub(crate) struct Checker {
    pub(super) base: BaseLang,
    pub(super) ext: ExtensionId,
    pub(super) env: TypeEnv<LinkType>,
}

type Synth = (LinkTerm, LinkType, Effect);

impl Checker {
    pub(crate) fn new(base: BaseLang, ext: ExtensionId, env: TypeEnv<LinkType>) -> Self {
        Checker { base, ext, env }
    }

    pub(super) fn under<R>(&mut self, x: &str, ty: LinkType, f: impl FnOnce(&mut Self) -> R) -> R {
        self.env.push(x, ty);
        let out = f(self);
        self.env.pop();
        out
    }

    fn validate(&self, ty: &LinkType) -> Result<(), TypeError> {
        match foreign_constructor(ty, self.ext) {
            None => Ok(()),
            Some(bad) => Err(TypeError::new(TypeErrorKind::ExtensionConflict(format!(
                "{bad} is not a {} linking type",
                self.ext
            )))),
        }
    }

    fn is_default(&self, ty: &LinkType) -> bool {
        let projected = kappa_minus(ty, self.base, self.ext);
        kappa_plus(&projected, self.base, self.ext).as_ref() == Ok(ty)
    }

    fn check_linear_use(&self, x: &str, ty: &LinkType, body: &LinkTerm) -> Result<(), TypeError> {
        if !ty.is_linear() {
            return Ok(());
        }
        match body.occurrences(x) {
            1 => Ok(()),
            uses => Err(TypeError::new(TypeErrorKind::LinearityViolation {
                var: x.to_string(),
                uses,
            })),
        }
    }

    /// Outer linear variables a lambda with this parameter and body captures.
    fn captured_linear(&self, param: &str, body: &LinkTerm) -> Option<String> {
        body.free_vars()
            .into_iter()
            .filter(|x| x != param)
            .find(|x| self.env.lookup(x).is_some_and(LinkType::is_linear))
    }

    fn lambda_type(
        &mut self,
        param: &str,
        tp: &LinkType,
        body: &LinkTerm,
        tb: LinkType,
        eb: Effect,
    ) -> LinkType {
        match self.ext {
            ExtensionId::HeapEffect => LinkType::eff_arrow(tp.clone(), eb, tb),
            ExtensionId::Terminating => {
                if self.under(param, tp.clone(), |c| c.terminates(body)) {
                    LinkType::term_arrow(tp.clone(), tb)
                } else {
                    LinkType::arrow(tp.clone(), tb)
                }
            }
            ExtensionId::Cost => {
                let cost = self.under(param, tp.clone(), |c| c.cost(body));
                LinkType::cost_arrow(tp.clone(), cost, tb)
            }
            ExtensionId::Linear => {
                let arrow = LinkType::arrow(tp.clone(), tb);
                if self.captured_linear(param, body).is_some() {
                    LinkType::lin(arrow)
                } else {
                    arrow
                }
            }
        }
    }

    fn expect_int(&mut self, t: &LinkTerm) -> Result<(LinkTerm, Effect), TypeError> {
        let (t2, ty, eff) = self.synth(t)?;
        if *ty.unrestricted() == LinkType::Int {
            Ok((t2, eff))
        } else {
            Err(TypeError::mismatch(LinkType::Int, ty))
        }
    }

    pub(crate) fn synth(&mut self, t: &LinkTerm) -> Result<Synth, TypeError> {
        match t {
            Term::Unit => Ok((Term::Unit, LinkType::Unit, Effect::Pure)),
            Term::Int(n) => Ok((Term::Int(*n), LinkType::Int, Effect::Pure)),
            Term::Var(x) => match self.env.lookup(x) {
                Some(ty) => Ok((t.clone(), ty.clone(), Effect::Pure)),
                None => Err(TypeError::new(TypeErrorKind::UnboundVariable(x.clone()))),
            },
            Term::Lam {
                param, ty: None, ..
            } => Err(TypeError::new(TypeErrorKind::CannotSynthesize(
                param.clone(),
            ))),
            Term::Lam {
                param,
                ty: Some(tp),
                body,
            } => {
                self.validate(tp)?;
                let (body2, tb, eb) = self.under(param, tp.clone(), |c| c.synth(body)).child(0)?;
                self.check_linear_use(param, tp, &body2)?;
                let ty = self.lambda_type(param, tp, &body2, tb, eb);
                Ok((
                    Term::lam(param.clone(), tp.clone(), body2),
                    ty,
                    Effect::Pure,
                ))
            }
            Term::App(f, a) => {
                if let Term::Lam {
                    param,
                    ty: None,
                    body,
                } = &**f
                {
                    let (a2, ta, ea) = self.synth(a).child(1)?;
                    let (body2, tb, eb) = self
                        .under(param, ta.clone(), |c| c.synth(body))
                        .child(0)
                        .child(0)?;
                    self.check_linear_use(param, &ta, &body2).child(0)?;
                    let bound = Term::lam(param.clone(), ta, body2);
                    return Ok((Term::app(bound, a2), tb, ea.join(eb)));
                }
                let (f2, tf, ef) = self.synth(f).child(0)?;
                let Some(view) = tf.as_arrow() else {
                    return Err(
                        TypeError::new(TypeErrorKind::NotAFunction(tf.to_string())).in_child(0)
                    );
                };
                let (param, result, latent) =
                    (view.param.clone(), view.result.clone(), view.latent);
                let (a2, ea) = self.check(a, &param).child(1)?;
                Ok((Term::app(f2, a2), result, ef.join(ea).join(latent)))
            }
            Term::Bin(op, a, b) => {
                let (a2, ea) = self.expect_int(a).child(0)?;
                let (b2, eb) = self.expect_int(b).child(1)?;
                Ok((Term::bin(*op, a2, b2), LinkType::Int, ea.join(eb)))
            }
            Term::Ref(a) => {
                let (a2, ta, _) = self.synth(a).child(0)?;
                Ok((Term::new_ref(a2), LinkType::reference(ta), Effect::Impure))
            }
            Term::Deref(a) => {
                let (a2, ta, _) = self.synth(a).child(0)?;
                match ta.unrestricted() {
                    LinkType::Ref(inner) => {
                        Ok((Term::deref(a2), (**inner).clone(), Effect::Impure))
                    }
                    _ => Err(TypeError::mismatch("a reference", ta).in_child(0)),
                }
            }
            Term::Assign(a, b) => {
                let (a2, ta, _) = self.synth(a).child(0)?;
                let LinkType::Ref(inner) = ta.unrestricted() else {
                    return Err(TypeError::mismatch("a reference", ta).in_child(0));
                };
                let (b2, _) = self.check(b, inner).child(1)?;
                Ok((Term::assign(a2, b2), LinkType::Unit, Effect::Impure))
            }
            Term::Ascribe(e, ty) => {
                self.validate(ty)?;
                let (e2, eff) = self.check(e, ty).child(0)?;
                Ok((e2, ty.clone(), eff))
            }
            Term::Loc(_) => Err(TypeError::new(TypeErrorKind::NotInLanguage(
                "a store location",
            ))),
            Term::Throw(_) | Term::Catch { .. } => {
                Err(TypeError::new(TypeErrorKind::NotInLanguage("throw/catch")))
            }
        }
    }

    /// The parameter type a lambda takes when checked against an arrow with
    /// parameter `expected`. A default-embedded annotation is refined to any
    /// linking type with the same projection.
    fn refine(
        &self,
        written: Option<&LinkType>,
        expected: &LinkType,
    ) -> Result<LinkType, TypeError> {
        let Some(tp) = written else {
            return Ok(expected.clone());
        };
        self.validate(tp)?;
        let same_projection =
            || kappa_minus(tp, self.base, self.ext) == kappa_minus(expected, self.base, self.ext);
        if tp == expected
            || link_subtype(expected, tp)
            || (self.is_default(tp) && same_projection())
        {
            Ok(expected.clone())
        } else {
            Err(TypeError::mismatch(expected, tp))
        }
    }

    pub(crate) fn check(
        &mut self,
        t: &LinkTerm,
        expected: &LinkType,
    ) -> Result<(LinkTerm, Effect), TypeError> {
        match t {
            Term::Lam { param, ty, body } if expected.as_arrow().is_some() => {
                let view = expected.as_arrow().expect("guarded");
                let (result, latent) = (view.result.clone(), view.latent);
                let tp = self.refine(ty.as_ref(), view.param)?;
                let (body2, eb) = self
                    .under(param, tp.clone(), |c| c.check(body, &result))
                    .child(0)?;
                self.check_linear_use(param, &tp, &body2)?;
                // Obligations first: their errors say more than the effect mismatch they imply.
                match expected.unrestricted() {
                    LinkType::TermArrow(..) => {
                        if !self.under(param, tp.clone(), |c| c.terminates(&body2)) {
                            return Err(TypeError::new(TypeErrorKind::TerminationCheckFailed));
                        }
                    }
                    LinkType::CostArrow(_, CostBound::Known(n), _) => {
                        let inferred = self.under(param, tp.clone(), |c| c.cost(&body2));
                        if inferred != CostBound::Known(*n) {
                            return Err(TypeError::new(TypeErrorKind::CostMismatch {
                                expected: CostBound::Known(*n),
                                inferred,
                            }));
                        }
                    }
                    _ => {}
                }
                if !eb.leq(latent) {
                    return Err(TypeError::new(TypeErrorKind::EffectMismatch {
                        allowed: latent,
                        found: eb,
                    })
                    .in_child(0));
                }
                if !expected.is_linear() {
                    if let Some(x) = self.captured_linear(param, &body2) {
                        return Err(TypeError::mismatch(
                            expected,
                            format!("a linear closure (it captures `{x}`)"),
                        ));
                    }
                }
                Ok((Term::lam(param.clone(), tp, body2), Effect::Pure))
            }
            Term::App(f, a) if matches!(&**f, Term::Lam { ty: None, .. }) => {
                let Term::Lam { param, body, .. } = &**f else {
                    unreachable!("guarded")
                };
                let (a2, ta, ea) = self.synth(a).child(1)?;
                let (body2, eb) = self
                    .under(param, ta.clone(), |c| c.check(body, expected))
                    .child(0)
                    .child(0)?;
                self.check_linear_use(param, &ta, &body2).child(0)?;
                Ok((
                    Term::app(Term::lam(param.clone(), ta, body2), a2),
                    ea.join(eb),
                ))
            }
            Term::Ascribe(e, ty) => {
                self.validate(ty)?;
                let (e2, eff) = self.check(e, ty).child(0)?;
                if link_subtype(ty, expected) {
                    Ok((e2, eff))
                } else {
                    Err(TypeError::mismatch(expected, ty))
                }
            }
            _ => {
                let (t2, ty, eff) = self.synth(t)?;
                if link_subtype(&ty, expected) {
                    Ok((t2, eff))
                } else {
                    Err(TypeError::mismatch(expected, ty))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_link_type, parse_linked};

    fn judge(
        text: &str,
        base: BaseLang,
        ext: ExtensionId,
        ann: Option<&str>,
    ) -> Result<LinkJudgment, TypeError> {
        let t = parse_linked(text, base, ext).unwrap();
        let ann = ann.map(|a| parse_link_type(a, base, ext).unwrap());
        typecheck_linked(&TypeEnv::new(), &t, base, ext, ann.as_ref())
    }

    const HEAP: ExtensionId = ExtensionId::HeapEffect;
    const E1: &str = "(lam c (-> unit int) (app c unit))";

    #[test]
    fn e1_accepts_the_impure_annotation() {
        let ann = "(-> (-> unit (R impure int)) (R impure int))";
        let j = judge(E1, BaseLang::Stlc, HEAP, Some(ann)).unwrap();
        assert_eq!(j.ty.to_string(), "(unit → R^• int) → R^• int");
        assert_eq!(j.effect, Effect::Pure);
        let Term::Lam {
            ty: Some(param), ..
        } = &j.subject
        else {
            panic!()
        };
        assert_eq!(param.to_string(), "unit → R^• int");
    }

    #[test]
    fn unannotated_e1_synthesizes_the_default() {
        let j = judge(E1, BaseLang::Stlc, HEAP, None).unwrap();
        assert_eq!(j.ty.to_string(), "(unit → R^∘ int) → R^∘ int");
    }

    #[test]
    fn a_pure_result_forbids_calling_an_impure_argument() {
        let ann = "(-> (-> int (R impure int)) (R pure int))";
        assert!(judge("(lam f (-> int int) 1)", BaseLang::Stlc, HEAP, Some(ann)).is_ok());
        let err = judge(
            "(lam f (-> int int) (seq (app f 0) 1))",
            BaseLang::Stlc,
            HEAP,
            Some(ann),
        )
        .unwrap_err();
        assert_eq!(
            err.kind,
            TypeErrorKind::EffectMismatch {
                allowed: Effect::Pure,
                found: Effect::Impure
            }
        );
        assert_eq!(err.path(), vec![0]);
    }

    #[test]
    fn pure_arguments_fit_impure_bodies() {
        let ann = "(-> (-> int (R pure int)) (R impure int))";
        assert!(judge(
            "(lam f (-> int int) (seq (app f 0) 1))",
            BaseLang::LamRef,
            HEAP,
            Some(ann)
        )
        .is_ok());
    }

    #[test]
    fn store_operations_are_impure() {
        let j = judge("(let x (ref 0) (deref x))", BaseLang::LamRef, HEAP, None).unwrap();
        assert_eq!((j.ty, j.effect), (LinkType::Int, Effect::Impure));
        let j = judge("(lam u unit (ref 0))", BaseLang::LamRef, HEAP, None).unwrap();
        assert_eq!(j.ty.to_string(), "unit → R^• (ref int)");
        assert_eq!(j.effect, Effect::Pure);
    }

    #[test]
    fn linear_variables_are_used_exactly_once() {
        let lin = ExtensionId::Linear;
        assert!(judge("(lam x (lin int) (+ x 1))", BaseLang::LamRef, lin, None).is_ok());
        let err = judge("(lam x (lin int) (+ x x))", BaseLang::LamRef, lin, None).unwrap_err();
        assert_eq!(
            err.kind,
            TypeErrorKind::LinearityViolation {
                var: "x".into(),
                uses: 2
            }
        );
        let err = judge("(lam x (lin int) 0)", BaseLang::LamRef, lin, None).unwrap_err();
        assert!(matches!(
            err.kind,
            TypeErrorKind::LinearityViolation { uses: 0, .. }
        ));
    }

    #[test]
    fn closures_over_linear_variables_are_linear() {
        let j = judge(
            "(lam x (lin int) (lam y int (+ x y)))",
            BaseLang::LamRef,
            ExtensionId::Linear,
            None,
        )
        .unwrap();
        assert_eq!(j.ty.to_string(), "int^L → (int → int)^L");
    }

    #[test]
    fn mixing_extensions_is_a_conflict() {
        let t: LinkTerm = Term::lam(
            "x",
            LinkType::eff_arrow(LinkType::Int, Effect::Pure, LinkType::Int),
            Term::Unit,
        );
        let err = typecheck_linked(
            &TypeEnv::new(),
            &t,
            BaseLang::LamRef,
            ExtensionId::Linear,
            None,
        )
        .unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::ExtensionConflict(_)));
    }

    #[test]
    fn terminating_and_cost_lambdas_get_refined_types() {
        let j = judge(
            "(lam x int (+ x 1))",
            BaseLang::LamRef,
            ExtensionId::Terminating,
            None,
        )
        .unwrap();
        assert_eq!(j.ty, LinkType::term_arrow(LinkType::Int, LinkType::Int));
        let j = judge(
            "(lam x int (+ x 1))",
            BaseLang::LamRef,
            ExtensionId::Cost,
            None,
        )
        .unwrap();
        assert_eq!(
            j.ty,
            LinkType::cost_arrow(LinkType::Int, CostBound::Known(1), LinkType::Int)
        );
        let err = judge(
            "(lam x int (+ x 1))",
            BaseLang::LamRef,
            ExtensionId::Cost,
            Some("(-> int (C 2 int))"),
        )
        .unwrap_err();
        assert_eq!(
            err.kind,
            TypeErrorKind::CostMismatch {
                expected: CostBound::Known(2),
                inferred: CostBound::Known(1)
            }
        );
    }

    #[test]
    fn subtyping_respects_variance() {
        let pure = LinkType::eff_arrow(LinkType::Int, Effect::Pure, LinkType::Int);
        let impure = LinkType::eff_arrow(LinkType::Int, Effect::Impure, LinkType::Int);
        assert!(link_subtype(&pure, &impure));
        assert!(!link_subtype(&impure, &pure));
        let takes = |a: &LinkType| LinkType::eff_arrow(a.clone(), Effect::Pure, LinkType::Int);
        assert!(link_subtype(&takes(&impure), &takes(&pure)));
        assert!(!link_subtype(
            &LinkType::reference(pure.clone()),
            &LinkType::reference(impure)
        ));
        assert!(link_subtype(&LinkType::Int, &LinkType::lin(LinkType::Int)));
        assert!(!link_subtype(&LinkType::lin(LinkType::Int), &LinkType::Int));
    }
}
