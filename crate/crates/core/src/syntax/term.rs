use std::collections::BTreeSet;

/// Binder introduced by `(seq e1 e2)`. It is not a legal identifier, so it
/// can never capture a user variable.
pub const SEQ_BINDER: &str = "_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

/// Terms of every language, parameterised by the type annotations they carry
/// (`SourceType`, `LinkType` or `TargetType`).
///
/// A lambda without an annotation only arises from `let`/`seq` sugar, where
/// the parameter type is synthesized from the argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<T> {
    Unit,
    Int(i64),
    Var(String),
    Lam {
        param: String,
        ty: Option<T>,
        body: Box<Term<T>>,
    },
    App(Box<Term<T>>, Box<Term<T>>),
    Bin(BinOp, Box<Term<T>>, Box<Term<T>>),
    Ref(Box<Term<T>>),
    Assign(Box<Term<T>>, Box<Term<T>>),
    Deref(Box<Term<T>>),
    /// Store location; only produced by evaluation.
    Loc(usize),
    Throw(Box<Term<T>>),
    Catch {
        scrutinee: Box<Term<T>>,
        val_binder: String,
        val_body: Box<Term<T>>,
        exc_binder: String,
        exc_body: Box<Term<T>>,
    },
    /// Linking-type annotation `(: e τ)`.
    Ascribe(Box<Term<T>>, T),
}

/// Path from the root of a term to one of its nodes, as child indices.
pub type NodePath = Vec<u32>;

impl<T> Term<T> {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn lam(param: impl Into<String>, ty: T, body: Term<T>) -> Self {
        Term::Lam {
            param: param.into(),
            ty: Some(ty),
            body: Box::new(body),
        }
    }

    pub fn app(f: Term<T>, a: Term<T>) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn bin(op: BinOp, a: Term<T>, b: Term<T>) -> Self {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn sum(a: Term<T>, b: Term<T>) -> Self {
        Term::bin(BinOp::Add, a, b)
    }

    pub fn new_ref(a: Term<T>) -> Self {
        Term::Ref(Box::new(a))
    }

    pub fn assign(a: Term<T>, b: Term<T>) -> Self {
        Term::Assign(Box::new(a), Box::new(b))
    }

    pub fn deref(a: Term<T>) -> Self {
        Term::Deref(Box::new(a))
    }

    pub fn throw(a: Term<T>) -> Self {
        Term::Throw(Box::new(a))
    }

    pub fn catch(
        scrutinee: Term<T>,
        val_binder: impl Into<String>,
        val_body: Term<T>,
        exc_binder: impl Into<String>,
        exc_body: Term<T>,
    ) -> Self {
        Term::Catch {
            scrutinee: Box::new(scrutinee),
            val_binder: val_binder.into(),
            val_body: Box::new(val_body),
            exc_binder: exc_binder.into(),
            exc_body: Box::new(exc_body),
        }
    }

    pub fn ascribe(e: Term<T>, ty: T) -> Self {
        Term::Ascribe(Box::new(e), ty)
    }

    /// `let x = bound in body`, i.e. `(λx. body) bound`.
    pub fn let_in(x: impl Into<String>, bound: Term<T>, body: Term<T>) -> Self {
        Term::app(
            Term::Lam {
                param: x.into(),
                ty: None,
                body: Box::new(body),
            },
            bound,
        )
    }

    /// `first; second`.
    pub fn seq(first: Term<T>, second: Term<T>) -> Self {
        Term::let_in(SEQ_BINDER, first, second)
    }

    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Term::Unit | Term::Int(_) | Term::Lam { .. } | Term::Loc(_)
        )
    }

    /// If this is `let x = e1 in e2` sugar, returns `(x, e1, e2)`.
    pub fn as_let(&self) -> Option<(&str, &Term<T>, &Term<T>)> {
        match self {
            Term::App(f, arg) => match &**f {
                Term::Lam {
                    param,
                    ty: None,
                    body,
                } => Some((param.as_str(), arg, body)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Children in the order used by [`NodePath`].
    pub fn children(&self) -> Vec<&Term<T>> {
        match self {
            Term::Unit | Term::Int(_) | Term::Var(_) | Term::Loc(_) => vec![],
            Term::Lam { body, .. } => vec![body],
            Term::Ref(a) | Term::Deref(a) | Term::Throw(a) | Term::Ascribe(a, _) => vec![a],
            Term::App(a, b) | Term::Bin(_, a, b) | Term::Assign(a, b) => vec![a, b],
            Term::Catch {
                scrutinee,
                val_body,
                exc_body,
                ..
            } => vec![scrutinee, val_body, exc_body],
        }
    }

    pub fn node_at(&self, path: &[u32]) -> Option<&Term<T>> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i as usize)?.node_at(rest),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Short constructor name for diagnostics.
    pub fn constructor(&self) -> &'static str {
        match self {
            Term::Unit => "unit",
            Term::Int(_) => "integer literal",
            Term::Var(_) => "variable",
            Term::Lam { .. } => "lambda",
            Term::App(..) => "application",
            Term::Bin(..) => "arithmetic",
            Term::Ref(_) => "ref",
            Term::Assign(..) => "assignment",
            Term::Deref(_) => "dereference",
            Term::Loc(_) => "location",
            Term::Throw(_) => "throw",
            Term::Catch { .. } => "catch",
            Term::Ascribe(..) => "annotation",
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Lam { param, body, .. } => {
                bound.push(param);
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => {
                scrutinee.collect_free(bound, out);
                bound.push(val_binder);
                val_body.collect_free(bound, out);
                bound.pop();
                bound.push(exc_binder);
                exc_body.collect_free(bound, out);
                bound.pop();
            }
            other => {
                for c in other.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Number of free occurrences of `name`.
    pub fn occurrences(&self, name: &str) -> usize {
        match self {
            Term::Var(x) => usize::from(x == name),
            Term::Lam { param, body, .. } => {
                if param == name {
                    0
                } else {
                    body.occurrences(name)
                }
            }
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => {
                let mut n = scrutinee.occurrences(name);
                if val_binder != name {
                    n += val_body.occurrences(name);
                }
                if exc_binder != name {
                    n += exc_body.occurrences(name);
                }
                n
            }
            other => other.children().iter().map(|c| c.occurrences(name)).sum(),
        }
    }

    /// True if any store operation appears syntactically.
    pub fn has_store_ops(&self) -> bool {
        matches!(self, Term::Ref(_) | Term::Assign(..) | Term::Deref(_))
            || self.children().iter().any(|c| c.has_store_ops())
    }
}

impl<T: Clone> Term<T> {
    /// Rewrites every type annotation.
    pub fn map_types<U, E>(&self, f: &mut impl FnMut(&T) -> Result<U, E>) -> Result<Term<U>, E> {
        Ok(match self {
            Term::Unit => Term::Unit,
            Term::Int(n) => Term::Int(*n),
            Term::Var(x) => Term::Var(x.clone()),
            Term::Loc(l) => Term::Loc(*l),
            Term::Lam { param, ty, body } => Term::Lam {
                param: param.clone(),
                ty: match ty {
                    Some(t) => Some(f(t)?),
                    None => None,
                },
                body: Box::new(body.map_types(f)?),
            },
            Term::App(a, b) => Term::app(a.map_types(f)?, b.map_types(f)?),
            Term::Bin(op, a, b) => Term::bin(*op, a.map_types(f)?, b.map_types(f)?),
            Term::Ref(a) => Term::new_ref(a.map_types(f)?),
            Term::Assign(a, b) => Term::assign(a.map_types(f)?, b.map_types(f)?),
            Term::Deref(a) => Term::deref(a.map_types(f)?),
            Term::Throw(a) => Term::throw(a.map_types(f)?),
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => Term::catch(
                scrutinee.map_types(f)?,
                val_binder.clone(),
                val_body.map_types(f)?,
                exc_binder.clone(),
                exc_body.map_types(f)?,
            ),
            Term::Ascribe(a, t) => Term::ascribe(a.map_types(f)?, f(t)?),
        })
    }

    /// Removes every `(: e τ)` node.
    pub fn strip_ascriptions(&self) -> Term<T> {
        match self {
            Term::Ascribe(a, _) => a.strip_ascriptions(),
            Term::Lam { param, ty, body } => Term::Lam {
                param: param.clone(),
                ty: ty.clone(),
                body: Box::new(body.strip_ascriptions()),
            },
            Term::App(a, b) => Term::app(a.strip_ascriptions(), b.strip_ascriptions()),
            Term::Bin(op, a, b) => Term::bin(*op, a.strip_ascriptions(), b.strip_ascriptions()),
            Term::Ref(a) => Term::new_ref(a.strip_ascriptions()),
            Term::Assign(a, b) => Term::assign(a.strip_ascriptions(), b.strip_ascriptions()),
            Term::Deref(a) => Term::deref(a.strip_ascriptions()),
            Term::Throw(a) => Term::throw(a.strip_ascriptions()),
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => Term::catch(
                scrutinee.strip_ascriptions(),
                val_binder.clone(),
                val_body.strip_ascriptions(),
                exc_binder.clone(),
                exc_body.strip_ascriptions(),
            ),
            leaf => leaf.clone(),
        }
    }

    /// Substitutes the closed value `value` for free occurrences of `name`.
    /// Because `value` is closed no renaming is needed.
    pub fn subst(&self, name: &str, value: &Term<T>) -> Term<T> {
        match self {
            Term::Var(x) if x == name => value.clone(),
            Term::Unit | Term::Int(_) | Term::Var(_) | Term::Loc(_) => self.clone(),
            Term::Lam { param, ty, body } => Term::Lam {
                param: param.clone(),
                ty: ty.clone(),
                body: if param == name {
                    body.clone()
                } else {
                    Box::new(body.subst(name, value))
                },
            },
            Term::App(a, b) => Term::app(a.subst(name, value), b.subst(name, value)),
            Term::Bin(op, a, b) => Term::bin(*op, a.subst(name, value), b.subst(name, value)),
            Term::Ref(a) => Term::new_ref(a.subst(name, value)),
            Term::Assign(a, b) => Term::assign(a.subst(name, value), b.subst(name, value)),
            Term::Deref(a) => Term::deref(a.subst(name, value)),
            Term::Throw(a) => Term::throw(a.subst(name, value)),
            Term::Ascribe(a, t) => Term::ascribe(a.subst(name, value), t.clone()),
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => Term::Catch {
                scrutinee: Box::new(scrutinee.subst(name, value)),
                val_binder: val_binder.clone(),
                val_body: if val_binder == name {
                    val_body.clone()
                } else {
                    Box::new(val_body.subst(name, value))
                },
                exc_binder: exc_binder.clone(),
                exc_body: if exc_binder == name {
                    exc_body.clone()
                } else {
                    Box::new(exc_body.subst(name, value))
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::SourceType;

    type T = Term<SourceType>;

    #[test]
    fn seq_binder_never_captures() {
        let t: T = Term::seq(Term::Int(1), Term::var("x"));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
        let s = t.subst("x", &Term::Int(5));
        assert_eq!(s, Term::seq(Term::Int(1), Term::Int(5)));
    }

    #[test]
    fn subst_respects_shadowing() {
        let t: T = Term::lam("x", SourceType::Int, Term::var("x"));
        assert_eq!(t.subst("x", &Term::Int(3)), t);
        let c: T = Term::catch(Term::var("y"), "y", Term::var("y"), "z", Term::var("y"));
        let s = c.subst("y", &Term::Unit);
        assert_eq!(
            s,
            Term::catch(Term::Unit, "y", Term::var("y"), "z", Term::Unit)
        );
    }

    #[test]
    fn occurrences_and_paths() {
        let t: T = Term::app(Term::var("c"), Term::app(Term::var("c"), Term::Unit));
        assert_eq!(t.occurrences("c"), 2);
        assert_eq!(t.node_at(&[1, 1]), Some(&Term::Unit));
        assert_eq!(t.node_at(&[2]), None);
        assert_eq!(t.size(), 5);
    }
}
