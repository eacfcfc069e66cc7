//! Fuel-bounded, left-to-right call-by-value evaluation shared by every
//! language. The machine keeps an explicit continuation stack so that deep
//! or divergent programs never exhaust the native stack.

use crate::syntax::{BinOp, Term};

/// Default step budget.
pub const DEFAULT_FUEL: u64 = 100_000;

/// Heap of a single evaluation. Locations are never reused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Store<T> {
    cells: Vec<Term<T>>,
}

impl<T> Default for Store<T> {
    fn default() -> Self {
        Store { cells: Vec::new() }
    }
}

impl<T> Store<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, loc: usize) -> Option<&Term<T>> {
        self.cells.get(loc)
    }

    pub fn next_location(&self) -> usize {
        self.cells.len()
    }

    fn alloc(&mut self, v: Term<T>) -> usize {
        self.cells.push(v);
        self.cells.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Value(Term<T>, Store<T>),
    Exception(Term<T>, Store<T>),
    OutOfFuel,
    Stuck(String),
}

impl<T> Outcome<T> {
    pub fn value(&self) -> Option<&Term<T>> {
        match self {
            Outcome::Value(v, _) => Some(v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.value() {
            Some(Term::Int(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn is_out_of_fuel(&self) -> bool {
        matches!(self, Outcome::OutOfFuel)
    }
}

/// Counters kept by the machine. Fuel is charged for betas, primitive
/// arithmetic, store operations and handler dispatch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub betas: u64,
    pub arith: u64,
    pub store_ops: u64,
    pub handlers: u64,
}

impl EvalStats {
    pub fn steps(&self) -> u64 {
        self.betas + self.arith + self.store_ops + self.handlers
    }

    /// Cost under the cost-extension model: betas plus arithmetic.
    pub fn cost(&self) -> u64 {
        self.betas + self.arith
    }
}

enum Frame<T> {
    AppFn(Term<T>),
    AppArg(Term<T>),
    BinL(BinOp, Term<T>),
    BinR(BinOp, i64),
    Ref,
    Deref,
    AssignL(Term<T>),
    AssignR(usize),
    Throw,
    Catch {
        val_binder: String,
        val_body: Term<T>,
        exc_binder: String,
        exc_body: Term<T>,
    },
}

enum State<T> {
    Eval(Term<T>),
    Return(Term<T>),
    Raise(Term<T>),
}

/// A fuel-bounded evaluator. Each instance owns its counters; stores are
/// passed in per run.
#[derive(Debug, Clone)]
pub struct Machine {
    fuel: u64,
    stats: EvalStats,
}

impl Machine {
    pub fn new(fuel: u64) -> Self {
        Machine {
            fuel,
            stats: EvalStats::default(),
        }
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    fn burn(&mut self) -> bool {
        if self.fuel == 0 {
            false
        } else {
            self.fuel -= 1;
            true
        }
    }

    /// Runs the closed term `term` to an outcome.
    pub fn run<T: Clone>(&mut self, term: Term<T>, mut store: Store<T>) -> Outcome<T> {
        let mut stack: Vec<Frame<T>> = Vec::new();
        let mut state = State::Eval(term);
        loop {
            state = match state {
                State::Eval(t) => match t {
                    Term::Unit | Term::Int(_) | Term::Lam { .. } | Term::Loc(_) => State::Return(t),
                    Term::Var(x) => return Outcome::Stuck(format!("unbound variable `{x}`")),
                    Term::App(f, a) => {
                        stack.push(Frame::AppFn(*a));
                        State::Eval(*f)
                    }
                    Term::Bin(op, a, b) => {
                        stack.push(Frame::BinL(op, *b));
                        State::Eval(*a)
                    }
                    Term::Ref(a) => {
                        stack.push(Frame::Ref);
                        State::Eval(*a)
                    }
                    Term::Deref(a) => {
                        stack.push(Frame::Deref);
                        State::Eval(*a)
                    }
                    Term::Assign(a, b) => {
                        stack.push(Frame::AssignL(*b));
                        State::Eval(*a)
                    }
                    Term::Throw(a) => {
                        stack.push(Frame::Throw);
                        State::Eval(*a)
                    }
                    Term::Catch {
                        scrutinee,
                        val_binder,
                        val_body,
                        exc_binder,
                        exc_body,
                    } => {
                        stack.push(Frame::Catch {
                            val_binder,
                            val_body: *val_body,
                            exc_binder,
                            exc_body: *exc_body,
                        });
                        State::Eval(*scrutinee)
                    }
                    Term::Ascribe(a, _) => State::Eval(*a),
                },
                State::Return(v) => {
                    let Some(frame) = stack.pop() else {
                        return Outcome::Value(v, store);
                    };
                    match frame {
                        Frame::AppFn(arg) => {
                            stack.push(Frame::AppArg(v));
                            State::Eval(arg)
                        }
                        Frame::AppArg(f) => {
                            let Term::Lam { param, body, .. } = f else {
                                return Outcome::Stuck(format!(
                                    "applied a non-function {}",
                                    f.constructor()
                                ));
                            };
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.betas += 1;
                            State::Eval(body.subst(&param, &v))
                        }
                        Frame::BinL(op, rhs) => {
                            let Term::Int(n) = v else {
                                return Outcome::Stuck(format!(
                                    "arithmetic on {}",
                                    v.constructor()
                                ));
                            };
                            stack.push(Frame::BinR(op, n));
                            State::Eval(rhs)
                        }
                        Frame::BinR(op, n) => {
                            let Term::Int(m) = v else {
                                return Outcome::Stuck(format!(
                                    "arithmetic on {}",
                                    v.constructor()
                                ));
                            };
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.arith += 1;
                            State::Return(Term::Int(op.apply(n, m)))
                        }
                        Frame::Ref => {
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.store_ops += 1;
                            State::Return(Term::Loc(store.alloc(v)))
                        }
                        Frame::Deref => {
                            let Term::Loc(l) = v else {
                                return Outcome::Stuck(format!("dereferenced {}", v.constructor()));
                            };
                            let Some(cell) = store.get(l) else {
                                return Outcome::Stuck(format!("dangling location {l}"));
                            };
                            let cell = cell.clone();
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.store_ops += 1;
                            State::Return(cell)
                        }
                        Frame::AssignL(rhs) => {
                            let Term::Loc(l) = v else {
                                return Outcome::Stuck(format!("assigned to {}", v.constructor()));
                            };
                            stack.push(Frame::AssignR(l));
                            State::Eval(rhs)
                        }
                        Frame::AssignR(l) => {
                            if l >= store.len() {
                                return Outcome::Stuck(format!("dangling location {l}"));
                            }
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.store_ops += 1;
                            store.cells[l] = v;
                            State::Return(Term::Unit)
                        }
                        Frame::Throw => State::Raise(v),
                        Frame::Catch {
                            val_binder,
                            val_body,
                            ..
                        } => {
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.handlers += 1;
                            State::Eval(val_body.subst(&val_binder, &v))
                        }
                    }
                }
                State::Raise(exn) => loop {
                    match stack.pop() {
                        None => return Outcome::Exception(exn, store),
                        Some(Frame::Catch {
                            exc_binder,
                            exc_body,
                            ..
                        }) => {
                            if !self.burn() {
                                return Outcome::OutOfFuel;
                            }
                            self.stats.handlers += 1;
                            break State::Eval(exc_body.subst(&exc_binder, &exn));
                        }
                        Some(_) => continue,
                    }
                },
            };
        }
    }
}

/// Evaluates `term` with a fresh machine, returning the outcome and counters.
pub fn run_counted<T: Clone>(term: Term<T>, store: Store<T>, fuel: u64) -> (Outcome<T>, EvalStats) {
    let mut m = Machine::new(fuel);
    let out = m.run(term, store);
    (out, m.stats())
}
