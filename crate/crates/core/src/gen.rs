//! Seeded generators of types and well-typed terms, shared by the
//! registry's property checks and the test suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{
    BaseLang, BinOp, CompType, CostBound, Effect, ExtensionId, LinkTerm, LinkType, SourceType,
    TargetTerm, TargetType, Term,
};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A type of `base` of depth at most `max_depth`.
pub fn source_type(rng: &mut GenRng, base: BaseLang, max_depth: usize) -> SourceType {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            SourceType::Unit
        } else {
            SourceType::Int
        };
    }
    if base.has_refs() && rng.gen_bool(0.3) {
        SourceType::reference(source_type(rng, base, max_depth - 1))
    } else {
        SourceType::arrow(
            source_type(rng, base, max_depth - 1),
            source_type(rng, base, max_depth - 1),
        )
    }
}

/// A well-formed `ext` linking type of depth at most `max_depth`.
pub fn link_type(rng: &mut GenRng, ext: ExtensionId, max_depth: usize) -> LinkType {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            LinkType::Unit
        } else {
            LinkType::Int
        };
    }
    let d = max_depth - 1;
    if rng.gen_bool(0.25) {
        return LinkType::reference(link_type(rng, ext, d));
    }
    match ext {
        ExtensionId::HeapEffect => {
            let eff = if rng.gen_bool(0.5) {
                Effect::Pure
            } else {
                Effect::Impure
            };
            LinkType::eff_arrow(link_type(rng, ext, d), eff, link_type(rng, ext, d))
        }
        ExtensionId::Linear => {
            let inner = if rng.gen_bool(0.5) {
                LinkType::arrow(link_type(rng, ext, d), link_type(rng, ext, d))
            } else {
                link_type(rng, ext, d)
            };
            if !inner.is_linear() && rng.gen_bool(0.4) {
                LinkType::lin(inner)
            } else {
                inner
            }
        }
        ExtensionId::Terminating => {
            if rng.gen_bool(0.5) {
                LinkType::term_arrow(link_type(rng, ext, d), link_type(rng, ext, d))
            } else {
                LinkType::arrow(link_type(rng, ext, d), link_type(rng, ext, d))
            }
        }
        ExtensionId::Cost => {
            let cost = if rng.gen_bool(0.5) {
                CostBound::Known(rng.gen_range(0..20))
            } else {
                CostBound::Unknown
            };
            LinkType::cost_arrow(link_type(rng, ext, d), cost, link_type(rng, ext, d))
        }
    }
}

/// Options for [`TermGen`].
#[derive(Debug, Clone, Copy)]
pub struct TermOptions {
    /// Allow `ref`, `!` and `:=`. References only ever hold `int` or `unit`.
    pub store: bool,
    /// Give every generated arrow the pure effect.
    pub pure_arrows: bool,
}

impl Default for TermOptions {
    fn default() -> Self {
        TermOptions {
            store: true,
            pure_arrows: false,
        }
    }
}

type Env = Vec<(String, LinkType)>;

/// Type-directed generator of heap-effect programs. Every term it returns
/// for `(ty, budget)` checks at `ty` with an effect at most `budget`.
pub struct TermGen {
    rng: GenRng,
    opts: TermOptions,
    fresh: usize,
}

impl TermGen {
    pub fn new(seed: u64, opts: TermOptions) -> Self {
        TermGen {
            rng: rng(seed),
            opts,
            fresh: 0,
        }
    }

    pub fn rng(&mut self) -> &mut GenRng {
        &mut self.rng
    }

    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    fn effect(&mut self) -> Effect {
        if self.opts.pure_arrows || self.rng.gen_bool(0.5) {
            Effect::Pure
        } else {
            Effect::Impure
        }
    }

    /// A type terms can be generated at under `budget` without free
    /// variables.
    pub fn value_type(&mut self, budget: Effect, depth: usize) -> LinkType {
        let can_alloc = self.opts.store && budget == Effect::Impure;
        if depth == 0 || self.rng.gen_bool(0.45) {
            return match self.rng.gen_range(0..10) {
                0..=2 => LinkType::Unit,
                3 if can_alloc => LinkType::reference(LinkType::Int),
                _ => LinkType::Int,
            };
        }
        let param = self.value_type(Effect::Impure, depth - 1);
        let eff = self.effect();
        let result = self.value_type(eff, depth - 1);
        LinkType::eff_arrow(param, eff, result)
    }

    /// A closed term of type `ty` with effect at most `budget`.
    pub fn closed(&mut self, ty: &LinkType, budget: Effect, depth: usize) -> LinkTerm {
        self.term(&mut Vec::new(), ty, budget, depth)
    }

    fn var_of(&mut self, env: &Env, ty: &LinkType) -> Option<LinkTerm> {
        let names: Vec<&String> = env
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x)
            .collect();
        names.choose(&mut self.rng).map(|x| Term::var((*x).clone()))
    }

    fn lambda(
        &mut self,
        env: &mut Env,
        a: &LinkType,
        eff: Effect,
        b: &LinkType,
        depth: usize,
    ) -> LinkTerm {
        let x = self.fresh();
        env.push((x.clone(), a.clone()));
        let body = self.term(env, b, eff, depth);
        env.pop();
        Term::lam(x, a.clone(), body)
    }

    fn leaf(&mut self, env: &mut Env, ty: &LinkType, budget: Effect) -> LinkTerm {
        if self.rng.gen_bool(0.5) {
            if let Some(v) = self.var_of(env, ty) {
                return v;
            }
        }
        match ty {
            LinkType::Unit => Term::Unit,
            LinkType::Int => Term::Int(self.rng.gen_range(-20..100)),
            LinkType::EffArrow(a, eff, b) => self.lambda(env, a, *eff, b, 0),
            LinkType::Ref(inner) => match self.var_of(env, ty) {
                Some(v) => v,
                None => {
                    assert!(
                        budget == Effect::Impure,
                        "cannot build {ty} purely without a variable"
                    );
                    Term::new_ref(self.leaf(env, inner, budget))
                }
            },
            other => panic!("generator only produces heap-effect types, got {other}"),
        }
    }

    fn term(&mut self, env: &mut Env, ty: &LinkType, budget: Effect, depth: usize) -> LinkTerm {
        if depth == 0 {
            return self.leaf(env, ty, budget);
        }
        let d = depth - 1;
        let impure = self.opts.store && budget == Effect::Impure;
        match self.rng.gen_range(0..10) {
            0 | 1 => self.leaf(env, ty, budget),
            2 | 3 => {
                let sigma = self.value_type(budget, 1);
                let latent = if matches!(ty, LinkType::Ref(_))
                    || (budget == Effect::Impure && self.rng.gen_bool(0.5))
                {
                    budget
                } else {
                    Effect::Pure
                };
                let f = self.term(
                    env,
                    &LinkType::eff_arrow(sigma.clone(), latent, ty.clone()),
                    budget,
                    d,
                );
                let a = self.term(env, &sigma, budget, d);
                Term::app(f, a)
            }
            4 | 5 => {
                let sigma = self.value_type(budget, 1);
                let bound = self.term(env, &sigma, budget, d);
                let x = self.fresh();
                env.push((x.clone(), sigma));
                let body = self.term(env, ty, budget, d);
                env.pop();
                Term::let_in(x, bound, body)
            }
            6 if impure => {
                let first = self.term(env, &LinkType::Unit, budget, d);
                let rest = self.term(env, ty, budget, d);
                Term::seq(first, rest)
            }
            _ => match ty {
                LinkType::Int if impure && self.rng.gen_bool(0.3) => {
                    Term::deref(self.term(env, &LinkType::reference(LinkType::Int), budget, d))
                }
                LinkType::Int => {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
                        .choose(&mut self.rng)
                        .expect("nonempty");
                    Term::bin(
                        op,
                        self.term(env, ty, budget, d),
                        self.term(env, ty, budget, d),
                    )
                }
                LinkType::Unit if impure => {
                    let r = self.term(env, &LinkType::reference(LinkType::Int), budget, d);
                    let v = self.term(env, &LinkType::Int, budget, d);
                    Term::assign(r, v)
                }
                LinkType::Ref(inner) if impure => Term::new_ref(self.term(env, inner, budget, d)),
                LinkType::EffArrow(a, eff, b) => self.lambda(env, a, *eff, b, d),
                _ => self.leaf(env, ty, budget),
            },
        }
    }
}

/// Replaces every heap-effect arrow by a terminating one.
pub fn to_terminating(ty: &LinkType) -> LinkType {
    match ty {
        LinkType::EffArrow(a, _, b) => LinkType::term_arrow(to_terminating(a), to_terminating(b)),
        LinkType::Ref(a) => LinkType::reference(to_terminating(a)),
        other => other.clone(),
    }
}

/// A pure `int → int` function whose arrows are all terminating.
pub fn terminating_function(seed: u64, depth: usize) -> LinkTerm {
    let mut g = TermGen::new(
        seed,
        TermOptions {
            store: false,
            pure_arrows: true,
        },
    );
    let f = g.closed(
        &LinkType::eff_arrow(LinkType::Int, Effect::Pure, LinkType::Int),
        Effect::Pure,
        depth,
    );
    let f = match f {
        Term::Lam { .. } => f,
        other => {
            let x = g.fresh();
            Term::lam(x.clone(), LinkType::Int, Term::app(other, Term::var(x)))
        }
    };
    f.map_types::<_, std::convert::Infallible>(&mut |ty| Ok(to_terminating(ty)))
        .unwrap_or_else(|never| match never {})
}

/// The Landin knot packaged as a function of `unit`.
pub fn landin_knot<T>(int: T, unit: T) -> Term<T>
where
    T: Clone,
{
    let id = Term::lam("n", int.clone(), Term::var("n"));
    let back = Term::lam(
        "n",
        int,
        Term::app(Term::deref(Term::var("r")), Term::var("n")),
    );
    let body = Term::let_in(
        "r",
        Term::new_ref(id),
        Term::seq(
            Term::assign(Term::var("r"), back),
            Term::app(Term::deref(Term::var("r")), Term::Int(0)),
        ),
    );
    Term::lam("u", unit, body)
}

/// A first-order `int` body over `params` for the cost extension: arithmetic,
/// `let` and calls to `let`-bound `int → int` functions.
pub fn cost_body(rng: &mut GenRng, params: &[String], depth: usize) -> LinkTerm {
    let mut scope = CostScope {
        ints: params.to_vec(),
        funs: Vec::new(),
        fresh: 0,
    };
    scope.int(rng, depth)
}

struct CostScope {
    ints: Vec<String>,
    funs: Vec<String>,
    fresh: usize,
}

impl CostScope {
    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn int(&mut self, rng: &mut GenRng, depth: usize) -> LinkTerm {
        let leaf = |s: &Self, rng: &mut GenRng| match s.ints.choose(rng) {
            Some(x) if rng.gen_bool(0.7) => Term::var(x.clone()),
            _ => Term::Int(rng.gen_range(-5..50)),
        };
        if depth == 0 {
            return leaf(self, rng);
        }
        let d = depth - 1;
        match rng.gen_range(0..8) {
            0 => leaf(self, rng),
            1 | 2 => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
                    .choose(rng)
                    .expect("nonempty");
                Term::bin(op, self.int(rng, d), self.int(rng, d))
            }
            3 => {
                let bound = self.int(rng, d);
                let x = self.fresh("y");
                self.ints.push(x.clone());
                let body = self.int(rng, d);
                self.ints.pop();
                Term::let_in(x, bound, body)
            }
            4 | 5 => {
                let z = self.fresh("z");
                self.ints.push(z.clone());
                let fbody = self.int(rng, d);
                self.ints.pop();
                let g = self.fresh("g");
                self.funs.push(g.clone());
                let body = self.int(rng, d);
                self.funs.pop();
                Term::let_in(g, Term::lam(z, LinkType::Int, fbody), body)
            }
            _ => match self.funs.choose(rng) {
                Some(g) => {
                    let g = g.clone();
                    Term::app(Term::var(g), self.int(rng, d))
                }
                None => Term::bin(BinOp::Add, self.int(rng, d), self.int(rng, d)),
            },
        }
    }
}

/// Generator of target programs that raise and handle `int` exceptions.
/// Store operations appear only where the effect budget is `•`.
pub struct TargetGen {
    rng: GenRng,
    fresh: usize,
}

type TargetEnv = Vec<(String, TargetType)>;

impl TargetGen {
    pub fn new(seed: u64) -> Self {
        TargetGen {
            rng: rng(seed),
            fresh: 0,
        }
    }

    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("t{}", self.fresh)
    }

    fn value_type(&mut self, depth: usize) -> TargetType {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return if self.rng.gen_bool(0.3) {
                TargetType::Unit
            } else {
                TargetType::Int
            };
        }
        let exn = if self.rng.gen_bool(0.5) {
            TargetType::Void
        } else {
            TargetType::Int
        };
        let eff = if self.rng.gen_bool(0.5) {
            Effect::Pure
        } else {
            Effect::Impure
        };
        TargetType::arrow(
            self.value_type(depth - 1),
            CompType::new(eff, exn, self.value_type(depth - 1)),
        )
    }

    /// A closed program of type `ty` that may raise only `exn`.
    pub fn closed(&mut self, ty: &TargetType, exn: &TargetType, depth: usize) -> TargetTerm {
        self.term(&mut Vec::new(), ty, exn, Effect::Impure, depth)
    }

    fn leaf(&mut self, env: &mut TargetEnv, ty: &TargetType) -> TargetTerm {
        let names: Vec<String> = env
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(x, _)| x.clone())
            .collect();
        if let Some(x) = names.choose(&mut self.rng) {
            if self.rng.gen_bool(0.6) {
                return Term::var(x.clone());
            }
        }
        match ty {
            TargetType::Int => Term::Int(self.rng.gen_range(-20..100)),
            TargetType::Arrow(a, c) => {
                let x = self.fresh();
                env.push((x.clone(), (**a).clone()));
                let body = self.term(env, &c.result, &c.exn, c.effect, 0);
                env.pop();
                Term::lam(x, (**a).clone(), body)
            }
            _ => Term::Unit,
        }
    }

    fn term(
        &mut self,
        env: &mut TargetEnv,
        ty: &TargetType,
        exn: &TargetType,
        eff: Effect,
        depth: usize,
    ) -> TargetTerm {
        let may_throw = *exn == TargetType::Int;
        if depth == 0 {
            return if may_throw && self.rng.gen_bool(0.2) {
                Term::throw(self.leaf(env, &TargetType::Int))
            } else {
                self.leaf(env, ty)
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => self.leaf(env, ty),
            1 if may_throw => Term::throw(self.term(env, &TargetType::Int, exn, eff, d)),
            1 | 2 => {
                let sigma = self.value_type(1);
                let scrutinee = self.term(env, &sigma, &TargetType::Int, eff, d);
                let (x, y) = (self.fresh(), self.fresh());
                env.push((x.clone(), sigma));
                let val_body = self.term(env, ty, exn, eff, d);
                env.pop();
                env.push((y.clone(), TargetType::Int));
                let exc_body = self.term(env, ty, exn, eff, d);
                env.pop();
                Term::catch(scrutinee, x, val_body, y, exc_body)
            }
            3 | 4 => {
                let sigma = self.value_type(1);
                let latent_exn = if may_throw && self.rng.gen_bool(0.5) {
                    TargetType::Int
                } else {
                    TargetType::Void
                };
                let latent = if eff == Effect::Impure && self.rng.gen_bool(0.5) {
                    Effect::Impure
                } else {
                    Effect::Pure
                };
                let fty =
                    TargetType::arrow(sigma.clone(), CompType::new(latent, latent_exn, ty.clone()));
                let f = self.term(env, &fty, exn, eff, d);
                let a = self.term(env, &sigma, exn, eff, d);
                Term::app(f, a)
            }
            5 => {
                let sigma = self.value_type(1);
                let bound = self.term(env, &sigma, exn, eff, d);
                let x = self.fresh();
                env.push((x.clone(), sigma));
                let body = self.term(env, ty, exn, eff, d);
                env.pop();
                Term::let_in(x, bound, body)
            }
            6 if eff == Effect::Impure => {
                let cell = self.fresh();
                let init = self.term(env, &TargetType::Int, exn, eff, d);
                env.push((cell.clone(), TargetType::reference(TargetType::Int)));
                let v = self.term(env, &TargetType::Int, exn, eff, d);
                let rest = self.term(env, ty, exn, eff, d);
                env.pop();
                Term::let_in(
                    cell.clone(),
                    Term::new_ref(init),
                    Term::seq(Term::assign(Term::var(cell), v), rest),
                )
            }
            _ => match ty {
                TargetType::Int => {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
                        .choose(&mut self.rng)
                        .expect("nonempty");
                    Term::bin(
                        op,
                        self.term(env, ty, exn, eff, d),
                        self.term(env, ty, exn, eff, d),
                    )
                }
                TargetType::Arrow(a, c) => {
                    let x = self.fresh();
                    env.push((x.clone(), (**a).clone()));
                    let body = self.term(env, &c.result, &c.exn, c.effect, d);
                    env.pop();
                    Term::lam(x, (**a).clone(), body)
                }
                _ => self.leaf(env, ty),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::{typecheck_linked, well_formed};
    use crate::syntax::TypeEnv;
    use crate::target::typecheck_target_comp;

    #[test]
    fn generated_link_types_are_well_formed() {
        let mut r = rng(7);
        for ext in ExtensionId::ALL {
            for _ in 0..200 {
                let ty = link_type(&mut r, ext, 5);
                assert!(well_formed(&ty, ext), "{ty} under {ext}");
            }
        }
    }

    #[test]
    fn generated_terms_check_within_budget() {
        let mut g = TermGen::new(11, TermOptions::default());
        for i in 0..200 {
            let budget = if i % 2 == 0 {
                Effect::Pure
            } else {
                Effect::Impure
            };
            let ty = g.value_type(budget, 2);
            let t = g.closed(&ty, budget, 4);
            let j = typecheck_linked(
                &TypeEnv::new(),
                &t,
                BaseLang::LamRef,
                ExtensionId::HeapEffect,
                Some(&ty),
            )
            .unwrap_or_else(|e| panic!("{t} at {ty}: {e}"));
            assert!(j.effect.leq(budget));
        }
    }

    #[test]
    fn generated_target_terms_check() {
        let mut g = TargetGen::new(3);
        for i in 0..200 {
            let exn = if i % 2 == 0 {
                TargetType::Void
            } else {
                TargetType::Int
            };
            let t = g.closed(&TargetType::Int, &exn, 4);
            typecheck_target_comp(&TypeEnv::new(), &t, &exn).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = TermGen::new(5, TermOptions::default()).closed(&LinkType::Int, Effect::Impure, 5);
        let b = TermGen::new(5, TermOptions::default()).closed(&LinkType::Int, Effect::Impure, 5);
        assert_eq!(a, b);
    }
}
