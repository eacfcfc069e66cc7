//! A reference big-step interpreter used as an oracle by the integration
//! tests. It shares no code with the library's abstract machine: closures
//! capture environments instead of substituting, and it keeps its own
//! operation counters.

#![allow(dead_code)]

use std::rc::Rc;

use linkc_core::syntax::{BinOp, Term};

#[derive(Debug, Clone)]
pub enum V<T> {
    Unit,
    Int(i64),
    Clo(Rc<Closure<T>>),
    Loc(usize),
}

#[derive(Debug)]
pub struct Closure<T> {
    param: String,
    body: Term<T>,
    env: Env<T>,
}

type Env<T> = Option<Rc<Frame<T>>>;

#[derive(Debug)]
pub struct Frame<T> {
    name: String,
    value: V<T>,
    next: Env<T>,
}

fn lookup<T>(env: &Env<T>, x: &str) -> Option<V<T>>
where
    T: Clone,
{
    let mut cur = env;
    while let Some(f) = cur {
        if f.name == x {
            return Some(f.value.clone());
        }
        cur = &f.next;
    }
    None
}

fn bind<T>(env: &Env<T>, x: &str, v: V<T>) -> Env<T> {
    Some(Rc::new(Frame {
        name: x.to_string(),
        value: v,
        next: env.clone(),
    }))
}

#[derive(Debug)]
pub enum Stop<T> {
    Raised(V<T>),
    Exhausted,
    Stuck(String),
}

/// Final result of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ran {
    Int(i64),
    Unit,
    Function,
    Location,
    Raised,
    Exhausted,
    Stuck(String),
}

pub struct Oracle<T> {
    pub betas: u64,
    pub arith: u64,
    pub store_ops: u64,
    budget: u64,
    store: Vec<V<T>>,
}

impl<T: Clone> Oracle<T> {
    pub fn new(budget: u64) -> Self {
        Oracle {
            betas: 0,
            arith: 0,
            store_ops: 0,
            budget,
            store: Vec::new(),
        }
    }

    /// Cost in the extension's model: one per beta step and arithmetic op.
    pub fn cost(&self) -> u64 {
        self.betas + self.arith
    }

    fn tick(&mut self) -> Result<(), Stop<T>> {
        if self.betas + self.arith + self.store_ops >= self.budget {
            Err(Stop::Exhausted)
        } else {
            Ok(())
        }
    }

    pub fn run(&mut self, t: &Term<T>) -> Ran {
        self.run_in(t, &[])
    }

    /// Runs `t` with `ints` bound as integer variables.
    pub fn run_in(&mut self, t: &Term<T>, ints: &[(String, i64)]) -> Ran {
        let mut env = None;
        for (x, n) in ints {
            env = bind(&env, x, V::Int(*n));
        }
        match self.eval(t, &env) {
            Ok(V::Int(n)) => Ran::Int(n),
            Ok(V::Unit) => Ran::Unit,
            Ok(V::Clo(_)) => Ran::Function,
            Ok(V::Loc(_)) => Ran::Location,
            Err(Stop::Raised(_)) => Ran::Raised,
            Err(Stop::Exhausted) => Ran::Exhausted,
            Err(Stop::Stuck(s)) => Ran::Stuck(s),
        }
    }

    fn int(&mut self, t: &Term<T>, env: &Env<T>) -> Result<i64, Stop<T>> {
        match self.eval(t, env)? {
            V::Int(n) => Ok(n),
            _ => Err(Stop::Stuck("expected an integer".into())),
        }
    }

    fn loc(&mut self, t: &Term<T>, env: &Env<T>) -> Result<usize, Stop<T>> {
        match self.eval(t, env)? {
            V::Loc(l) if l < self.store.len() => Ok(l),
            _ => Err(Stop::Stuck("expected a location".into())),
        }
    }

    fn eval(&mut self, t: &Term<T>, env: &Env<T>) -> Result<V<T>, Stop<T>> {
        match t {
            Term::Unit => Ok(V::Unit),
            Term::Int(n) => Ok(V::Int(*n)),
            Term::Loc(l) => Ok(V::Loc(*l)),
            Term::Var(x) => lookup(env, x).ok_or_else(|| Stop::Stuck(format!("unbound {x}"))),
            Term::Lam { param, body, .. } => Ok(V::Clo(Rc::new(Closure {
                param: param.clone(),
                body: (**body).clone(),
                env: env.clone(),
            }))),
            Term::Ascribe(e, _) => self.eval(e, env),
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                let V::Clo(c) = fv else {
                    return Err(Stop::Stuck("applied a non-function".into()));
                };
                self.tick()?;
                self.betas += 1;
                let inner = bind(&c.env, &c.param, av);
                self.eval(&c.body, &inner)
            }
            Term::Bin(op, a, b) => {
                let x = self.int(a, env)?;
                let y = self.int(b, env)?;
                self.tick()?;
                self.arith += 1;
                Ok(V::Int(match op {
                    BinOp::Add => x.wrapping_add(y),
                    BinOp::Sub => x.wrapping_sub(y),
                    BinOp::Mul => x.wrapping_mul(y),
                }))
            }
            Term::Ref(e) => {
                let v = self.eval(e, env)?;
                self.tick()?;
                self.store_ops += 1;
                self.store.push(v);
                Ok(V::Loc(self.store.len() - 1))
            }
            Term::Deref(e) => {
                let l = self.loc(e, env)?;
                self.tick()?;
                self.store_ops += 1;
                Ok(self.store[l].clone())
            }
            Term::Assign(r, e) => {
                let l = self.loc(r, env)?;
                let v = self.eval(e, env)?;
                self.tick()?;
                self.store_ops += 1;
                self.store[l] = v;
                Ok(V::Unit)
            }
            Term::Throw(e) => {
                let v = self.eval(e, env)?;
                Err(Stop::Raised(v))
            }
            Term::Catch {
                scrutinee,
                val_binder,
                val_body,
                exc_binder,
                exc_body,
            } => match self.eval(scrutinee, env) {
                Ok(v) => self.eval(val_body, &bind(env, val_binder, v)),
                Err(Stop::Raised(v)) => self.eval(exc_body, &bind(env, exc_binder, v)),
                Err(other) => Err(other),
            },
        }
    }
}
