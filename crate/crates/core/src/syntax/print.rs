use std::fmt::{self, Write};

use super::term::{Term, SEQ_BINDER};
use super::types::{CompType, CostBound, LinkType, SourceType, TargetType};

/// Canonical s-expression form of a type annotation.
pub trait TypeSyntax {
    fn write_sexpr(&self, out: &mut String);

    fn to_sexpr(&self) -> String {
        let mut s = String::new();
        self.write_sexpr(&mut s);
        s
    }
}

impl TypeSyntax for SourceType {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            SourceType::Unit => out.push_str("unit"),
            SourceType::Int => out.push_str("int"),
            SourceType::Ref(a) => {
                out.push_str("(ref ");
                a.write_sexpr(out);
                out.push(')');
            }
            SourceType::Arrow(a, b) => {
                out.push_str("(-> ");
                a.write_sexpr(out);
                out.push(' ');
                b.write_sexpr(out);
                out.push(')');
            }
        }
    }
}

impl TypeSyntax for LinkType {
    fn write_sexpr(&self, out: &mut String) {
        let arrow = |out: &mut String, a: &LinkType, mid: &str, b: &LinkType, close: &str| {
            out.push_str("(-> ");
            a.write_sexpr(out);
            out.push(' ');
            out.push_str(mid);
            b.write_sexpr(out);
            out.push_str(close);
        };
        match self {
            LinkType::Unit => out.push_str("unit"),
            LinkType::Int => out.push_str("int"),
            LinkType::Ref(a) => {
                out.push_str("(ref ");
                a.write_sexpr(out);
                out.push(')');
            }
            LinkType::Lin(a) => {
                out.push_str("(lin ");
                a.write_sexpr(out);
                out.push(')');
            }
            LinkType::EffArrow(a, eff, b) => {
                arrow(out, a, &format!("(R {} ", eff.keyword()), b, "))")
            }
            LinkType::Arrow(a, b) => arrow(out, a, "", b, ")"),
            LinkType::TermArrow(a, b) => arrow(out, a, "(halts ", b, "))"),
            LinkType::CostArrow(a, cost, b) => {
                let mid = match cost {
                    CostBound::Known(n) => format!("(C {n} "),
                    CostBound::Unknown => "(C ? ".to_string(),
                };
                arrow(out, a, &mid, b, "))")
            }
        }
    }
}

impl TypeSyntax for TargetType {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            TargetType::Void => out.push_str("void"),
            TargetType::Unit => out.push_str("unit"),
            TargetType::Int => out.push_str("int"),
            TargetType::Ref(a) => {
                out.push_str("(ref ");
                a.write_sexpr(out);
                out.push(')');
            }
            TargetType::Arrow(a, comp) => {
                out.push_str("(-> ");
                a.write_sexpr(out);
                out.push(' ');
                comp.write_sexpr(out);
                out.push(')');
            }
        }
    }
}

impl TypeSyntax for CompType {
    fn write_sexpr(&self, out: &mut String) {
        out.push_str("(E ");
        out.push_str(self.effect.keyword());
        out.push(' ');
        self.exn.write_sexpr(out);
        out.push(' ');
        self.result.write_sexpr(out);
        out.push(')');
    }
}

/// Prints `t` in the concrete syntax accepted by the parser.
pub fn print<T: TypeSyntax>(t: &Term<T>) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term<T: TypeSyntax>(t: &Term<T>, out: &mut String) {
    if let Some((x, bound, body)) = t.as_let() {
        if x == SEQ_BINDER {
            out.push_str("(seq ");
            write_term(bound, out);
            let mut rest = body;
            while let Some((SEQ_BINDER, next, tail)) = rest.as_let() {
                out.push(' ');
                write_term(next, out);
                rest = tail;
            }
            out.push(' ');
            write_term(rest, out);
        } else {
            let _ = write!(out, "(let {x} ");
            write_term(bound, out);
            out.push(' ');
            write_term(body, out);
        }
        out.push(')');
        return;
    }
    match t {
        Term::Unit => out.push_str("unit"),
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Var(x) => out.push_str(x),
        Term::Loc(l) => {
            let _ = write!(out, "#loc{l}");
        }
        Term::Lam { param, ty, body } => {
            let _ = write!(out, "(lam {param} ");
            match ty {
                Some(ty) => ty.write_sexpr(out),
                None => out.push('_'),
            }
            out.push(' ');
            write_term(body, out);
            out.push(')');
        }
        Term::App(..) => {
            // flatten left-nested applications that are not `let` sugar
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                if head.as_let().is_some() {
                    break;
                }
                args.push(&**a);
                head = f;
            }
            out.push_str("(app ");
            write_term(head, out);
            for a in args.iter().rev() {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
        Term::Bin(op, a, b) => {
            let _ = write!(out, "({} ", op.symbol());
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        Term::Ref(a) => unary(out, "ref", a),
        Term::Deref(a) => unary(out, "deref", a),
        Term::Throw(a) => unary(out, "throw", a),
        Term::Assign(a, b) => {
            out.push_str("(assign ");
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        Term::Catch {
            scrutinee,
            val_binder,
            val_body,
            exc_binder,
            exc_body,
        } => {
            out.push_str("(catch ");
            write_term(scrutinee, out);
            let _ = write!(out, " (val {val_binder} ");
            write_term(val_body, out);
            let _ = write!(out, ") (exc {exc_binder} ");
            write_term(exc_body, out);
            out.push_str("))");
        }
        Term::Ascribe(a, ty) => {
            out.push_str("(: ");
            write_term(a, out);
            out.push(' ');
            ty.write_sexpr(out);
            out.push(')');
        }
    }
}

fn unary<T: TypeSyntax>(out: &mut String, kw: &str, a: &Term<T>) {
    let _ = write!(out, "({kw} ");
    write_term(a, out);
    out.push(')');
}

impl<T: TypeSyntax> fmt::Display for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
