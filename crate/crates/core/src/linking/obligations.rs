//! Typing obligations of the terminating and cost extensions.

use crate::syntax::{BaseLang, CostBound, ExtensionId, LinkTerm, LinkType, Term, TypeEnv};

use super::check::Checker;

/// Conservative termination check for a lambda body: no store operations,
/// and every called function is either a lambda literal or has a
/// terminating arrow type.
pub fn check_termination(env: &TypeEnv<LinkType>, body: &LinkTerm) -> bool {
    Checker::new(BaseLang::LamRef, ExtensionId::Terminating, env.clone()).terminates(body)
}

/// Straight-line cost of a lambda body: one unit per arithmetic operation
/// and per beta step, plus the declared cost of every function it calls.
pub fn infer_cost(env: &TypeEnv<LinkType>, body: &LinkTerm) -> CostBound {
    Checker::new(BaseLang::LamRef, ExtensionId::Cost, env.clone()).cost(body)
}

impl Checker {
    fn head_type(&mut self, f: &LinkTerm) -> Option<LinkType> {
        self.synth(f).ok().map(|(_, ty, _)| ty)
    }

    fn binder_type(&mut self, ty: &Option<LinkType>, arg: &LinkTerm) -> Option<LinkType> {
        match ty {
            Some(ty) => Some(ty.clone()),
            None => self.head_type(arg),
        }
    }

    pub(super) fn terminates(&mut self, t: &LinkTerm) -> bool {
        match t {
            Term::Unit | Term::Int(_) | Term::Var(_) => true,
            Term::Bin(_, a, b) => self.terminates(a) && self.terminates(b),
            Term::Ascribe(e, _) => self.terminates(e),
            Term::Lam {
                param,
                ty: Some(ty),
                body,
            } => self.under(param, ty.clone(), |c| c.terminates(body)),
            Term::App(f, a) => {
                if !self.terminates(a) {
                    return false;
                }
                if let Term::Lam { param, ty, body } = &**f {
                    return match self.binder_type(ty, a) {
                        Some(ty) => self.under(param, ty, |c| c.terminates(body)),
                        None => false,
                    };
                }
                self.terminates(f)
                    && matches!(
                        self.head_type(f).as_ref().map(LinkType::unrestricted),
                        Some(LinkType::TermArrow(..))
                    )
            }
            Term::Lam { ty: None, .. }
            | Term::Ref(_)
            | Term::Deref(_)
            | Term::Assign(..)
            | Term::Loc(_)
            | Term::Throw(_)
            | Term::Catch { .. } => false,
        }
    }

    pub(super) fn cost(&mut self, t: &LinkTerm) -> CostBound {
        match self.cost_of(t) {
            Some(n) => CostBound::Known(n),
            None => CostBound::Unknown,
        }
    }

    fn cost_of(&mut self, t: &LinkTerm) -> Option<u64> {
        match t {
            Term::Unit | Term::Int(_) | Term::Var(_) | Term::Lam { .. } => Some(0),
            Term::Bin(_, a, b) => self
                .cost_of(a)?
                .checked_add(self.cost_of(b)?)?
                .checked_add(1),
            Term::Ascribe(e, _) => self.cost_of(e),
            Term::App(f, a) => {
                let arg = self.cost_of(a)?;
                if let Term::Lam { param, ty, body } = &**f {
                    let ty = self.binder_type(ty, a)?;
                    let body = self.under(param, ty, |c| c.cost_of(body))?;
                    return arg.checked_add(1)?.checked_add(body);
                }
                let head = self.cost_of(f)?;
                let latent = match self.head_type(f)?.unrestricted() {
                    LinkType::CostArrow(_, CostBound::Known(n), _) => *n,
                    _ => return None,
                };
                head.checked_add(arg)?.checked_add(1)?.checked_add(latent)
            }
            Term::Ref(_)
            | Term::Deref(_)
            | Term::Assign(..)
            | Term::Loc(_)
            | Term::Throw(_)
            | Term::Catch { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_linked;

    fn body(text: &str, ext: ExtensionId) -> LinkTerm {
        parse_linked(text, BaseLang::LamRef, ext).unwrap()
    }

    fn env(ext: ExtensionId, bindings: &[(&str, &str)]) -> TypeEnv<LinkType> {
        bindings
            .iter()
            .map(|(x, ty)| {
                (
                    *x,
                    crate::syntax::parse_link_type(ty, BaseLang::LamRef, ext).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn termination_accepts_arithmetic_and_rejects_store() {
        let ext = ExtensionId::Terminating;
        let e = env(ext, &[("x", "int"), ("r", "(ref int)")]);
        assert!(check_termination(&e, &body("(+ x 1)", ext)));
        assert!(!check_termination(&e, &body("(assign r 0)", ext)));
    }

    #[test]
    fn termination_depends_on_the_callee_annotation() {
        let ext = ExtensionId::Terminating;
        let halts = env(ext, &[("g", "(-> int (halts int))")]);
        let plain = env(ext, &[("g", "(-> int int)")]);
        let call = body("(app g 1)", ext);
        assert!(check_termination(&halts, &call));
        assert!(!check_termination(&plain, &call));
        let redex = body("(let h (lam y int (+ y 1)) (app h 2))", ext);
        assert!(check_termination(&TypeEnv::new(), &redex));
    }

    #[test]
    fn costs_count_operations_and_calls() {
        let ext = ExtensionId::Cost;
        let e = env(
            ext,
            &[
                ("x", "int"),
                ("f", "(-> int (C ? int))"),
                ("g", "(-> int (C 3 int))"),
            ],
        );
        assert_eq!(infer_cost(&e, &body("x", ext)), CostBound::Known(0));
        assert_eq!(infer_cost(&e, &body("(+ x 1)", ext)), CostBound::Known(1));
        assert_eq!(infer_cost(&e, &body("(app f x)", ext)), CostBound::Unknown);
        assert_eq!(
            infer_cost(&e, &body("(app g (* x 2))", ext)),
            CostBound::Known(5)
        );
        let letg = body("(let h (lam y int (+ y y)) (+ (app h x) (app h 1)))", ext);
        // bind h: 1; two calls: 2 * (1 + 1); the outer addition: 1
        assert_eq!(infer_cost(&e, &letg), CostBound::Known(6));
        assert_eq!(
            infer_cost(&e, &body("(deref (ref 1))", ext)),
            CostBound::Unknown
        );
    }
}
