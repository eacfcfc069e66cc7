//! Parser for the fully parenthesised concrete syntax.
//!
//! Types: `unit`, `int`, `void` (target only), `(ref τ)`, `(-> τ τ)`.
//! Linking types add `(-> τ (R pure|impure τ))`, `(lin φ)`,
//! `(-> τ (halts τ))` and `(-> τ (C ?|N τ))`; target arrows are
//! `(-> τ (E pure|impure τexn τ))`. A bare `(-> a b)` inside a
//! linking-types language stands for the default embedding of a source arrow.
//!
//! Terms: `unit`, integers, variables, `(lam x τ e)`, `(app f a ...)`,
//! `(+ a b)`, `(- a b)`, `(* a b)`, `(ref e)`, `(assign a b)`, `(deref e)`,
//! `(let x e1 e2)`, `(seq e1 e2 ...)`, `(: e τ)`, `(throw e)` and
//! `(catch e (val x e1) (exc y e2))`.

use std::collections::HashMap;

use super::lang::{BaseLang, ExtensionId, LanguageId};
use super::sexpr::{read_all, read_one, ParseError, Pos, SExpr};
use super::term::{BinOp, NodePath, Term, SEQ_BINDER};
use super::types::{CompType, CostBound, Effect, LinkType, SourceType, TargetType};
use super::{LinkTerm, SourceTerm, TargetTerm};

const KEYWORDS: &[&str] = &[
    "unit", "int", "void", "lam", "app", "let", "seq", "ref", "assign", "deref", "throw", "catch",
    "val", "exc", "define", "R", "E", "C", "halts", "lin", "pure", "impure", "->", ":",
];

/// A parsed term of any language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyTerm {
    Source(SourceTerm),
    Linked(LinkTerm),
    Target(TargetTerm),
}

/// A parsed term together with the source position of every node.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub term: Term<T>,
    pub positions: HashMap<NodePath, Pos>,
}

impl<T> Located<T> {
    /// Position of the node at `path`, or of its closest located ancestor.
    pub fn position(&self, path: &[u32]) -> Pos {
        let mut p = path.to_vec();
        loop {
            if let Some(pos) = self.positions.get(&p) {
                return *pos;
            }
            if p.pop().is_none() {
                return Pos { line: 1, col: 1 };
            }
        }
    }
}

/// Parses `text` as a single term of language `lang`.
pub fn parse(text: &str, lang: LanguageId) -> Result<AnyTerm, ParseError> {
    Ok(match lang {
        LanguageId::Stlc => AnyTerm::Source(parse_source(text, BaseLang::Stlc)?),
        LanguageId::LamRef => AnyTerm::Source(parse_source(text, BaseLang::LamRef)?),
        LanguageId::StlcK(ext) => AnyTerm::Linked(parse_linked(text, BaseLang::Stlc, ext)?),
        LanguageId::LamRefK(ext) => AnyTerm::Linked(parse_linked(text, BaseLang::LamRef, ext)?),
        LanguageId::Target => AnyTerm::Target(parse_target(text)?),
    })
}

pub fn parse_source(text: &str, base: BaseLang) -> Result<SourceTerm, ParseError> {
    let sx = read_one(text)?;
    let mut p = TermParser::new(LanguageId::from_base(base), move |s: &SExpr| {
        source_type(s, base)
    });
    p.term(&sx)
}

pub fn parse_linked(text: &str, base: BaseLang, ext: ExtensionId) -> Result<LinkTerm, ParseError> {
    let sx = read_one(text)?;
    let mut p = TermParser::new(LanguageId::extended(base, ext), move |s: &SExpr| {
        link_type(s, base, ext)
    });
    p.term(&sx)
}

pub fn parse_target(text: &str) -> Result<TargetTerm, ParseError> {
    let sx = read_one(text)?;
    let mut p = TermParser::new(LanguageId::Target, target_type);
    p.term(&sx)
}

/// Parses a source file: either a single term, or a sequence of
/// `(define name e)` forms where later definitions see earlier ones. The
/// exported binding is `export` when given, otherwise the last definition.
pub fn parse_file_source(
    text: &str,
    base: BaseLang,
    export: Option<&str>,
) -> Result<Located<SourceType>, ParseError> {
    parse_file_with(
        text,
        LanguageId::from_base(base),
        export,
        move |s: &SExpr| source_type(s, base),
    )
}

pub fn parse_file_linked(
    text: &str,
    base: BaseLang,
    ext: ExtensionId,
    export: Option<&str>,
) -> Result<Located<LinkType>, ParseError> {
    parse_file_with(
        text,
        LanguageId::extended(base, ext),
        export,
        move |s: &SExpr| link_type(s, base, ext),
    )
}

pub fn parse_file_target(
    text: &str,
    export: Option<&str>,
) -> Result<Located<TargetType>, ParseError> {
    parse_file_with(text, LanguageId::Target, export, target_type)
}

fn parse_file_with<T>(
    text: &str,
    lang: LanguageId,
    export: Option<&str>,
    ty: impl Fn(&SExpr) -> Result<T, ParseError>,
) -> Result<Located<T>, ParseError> {
    let forms = read_all(text)?;
    let Some(first) = forms.first() else {
        return Err(ParseError::at(
            Pos { line: 1, col: 1 },
            "a term or `(define name e)`",
        ));
    };
    let mut parser = TermParser::new(lang, ty);
    let is_define = |s: &SExpr| matches!(s, SExpr::List(items, _) if items.first().and_then(SExpr::as_atom) == Some("define"));
    if !is_define(first) {
        if forms.len() > 1 {
            return Err(ParseError::at(
                forms[1].pos(),
                "end of input after a single term",
            ));
        }
        if let Some(name) = export {
            return Err(ParseError::at(
                first.pos(),
                format!("`(define {name} ...)`"),
            ));
        }
        let term = parser.term(first)?;
        return Ok(Located {
            term,
            positions: parser.positions,
        });
    }

    let mut defs: Vec<(String, SExpr)> = Vec::new();
    for form in &forms {
        let SExpr::List(items, pos) = form else {
            return Err(ParseError::at(form.pos(), "`(define name e)`"));
        };
        if !is_define(form) || items.len() != 3 {
            return Err(ParseError::at(*pos, "`(define name e)`"));
        }
        let name = identifier(&items[1])?;
        if defs.iter().any(|(n, _)| *n == name) {
            return Err(ParseError::at(
                items[1].pos(),
                format!("a fresh name, `{name}` is already defined"),
            ));
        }
        defs.push((name, items[2].clone()));
    }
    let last = match export {
        Some(name) => defs
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| ParseError::at(first.pos(), format!("a definition named `{name}`")))?,
        None => defs.len() - 1,
    };
    // let d0 = e0 in let d1 = e1 in ... e_last
    let mut prefix: Vec<u32> = Vec::new();
    let mut bodies = Vec::new();
    for (i, (_, sx)) in defs[..=last].iter().enumerate() {
        let mut path = prefix.clone();
        if i < last {
            path.push(1);
        }
        parser.path = path;
        bodies.push(parser.term(sx)?);
        prefix.extend([0, 0]);
    }
    let mut term = bodies.pop().expect("at least one definition");
    for (name, bound) in defs[..last].iter().map(|(n, _)| n).zip(bodies).rev() {
        term = Term::let_in(name.clone(), bound, term);
    }
    Ok(Located {
        term,
        positions: parser.positions,
    })
}

pub fn parse_source_type(text: &str, base: BaseLang) -> Result<SourceType, ParseError> {
    source_type(&read_one(text)?, base)
}

pub fn parse_link_type(
    text: &str,
    base: BaseLang,
    ext: ExtensionId,
) -> Result<LinkType, ParseError> {
    link_type(&read_one(text)?, base, ext)
}

pub fn parse_target_type(text: &str) -> Result<TargetType, ParseError> {
    target_type(&read_one(text)?)
}

fn list_head(s: &SExpr) -> Option<(&str, &[SExpr], Pos)> {
    match s {
        SExpr::List(items, pos) => match items.split_first() {
            Some((SExpr::Atom(head, _), rest)) => Some((head.as_str(), rest, *pos)),
            _ => None,
        },
        SExpr::Atom(..) => None,
    }
}

fn arity(rest: &[SExpr], n: usize, pos: Pos, form: &str) -> Result<(), ParseError> {
    if rest.len() == n {
        Ok(())
    } else {
        Err(ParseError::at(pos, form))
    }
}

fn source_type(s: &SExpr, base: BaseLang) -> Result<SourceType, ParseError> {
    match s {
        SExpr::Atom(a, pos) => match a.as_str() {
            "unit" => Ok(SourceType::Unit),
            "int" => Ok(SourceType::Int),
            _ => Err(ParseError::at(
                *pos,
                "a type (`unit`, `int`, `(ref τ)` or `(-> τ τ)`)",
            )),
        },
        _ => match list_head(s) {
            Some(("ref", rest, pos)) => {
                if !base.has_refs() {
                    return Err(ParseError::at(pos, "a type of λ (it has no `ref` types)"));
                }
                arity(rest, 1, pos, "`(ref τ)`")?;
                Ok(SourceType::reference(source_type(&rest[0], base)?))
            }
            Some(("->", rest, pos)) => {
                arity(rest, 2, pos, "`(-> τ τ)`")?;
                Ok(SourceType::arrow(
                    source_type(&rest[0], base)?,
                    source_type(&rest[1], base)?,
                ))
            }
            _ => Err(ParseError::at(
                s.pos(),
                "a type (`unit`, `int`, `(ref τ)` or `(-> τ τ)`)",
            )),
        },
    }
}

fn effect(s: &SExpr) -> Result<Effect, ParseError> {
    match s.as_atom() {
        Some("pure") => Ok(Effect::Pure),
        Some("impure") => Ok(Effect::Impure),
        _ => Err(ParseError::at(s.pos(), "`pure` or `impure`")),
    }
}

fn require_ext(
    have: ExtensionId,
    want: ExtensionId,
    pos: Pos,
    what: &str,
) -> Result<(), ParseError> {
    if have == want {
        Ok(())
    } else {
        Err(ParseError::at(
            pos,
            format!("a {have} linking type ({what} belongs to the {want} extension)"),
        ))
    }
}

/// Default arrow of the `ext` embedding over `base`.
pub(crate) fn default_arrow(
    base: BaseLang,
    ext: ExtensionId,
    a: LinkType,
    b: LinkType,
) -> LinkType {
    match ext {
        ExtensionId::HeapEffect => LinkType::eff_arrow(
            a,
            if base.has_refs() {
                Effect::Impure
            } else {
                Effect::Pure
            },
            b,
        ),
        ExtensionId::Linear | ExtensionId::Terminating => LinkType::arrow(a, b),
        ExtensionId::Cost => LinkType::cost_arrow(a, CostBound::Unknown, b),
    }
}

fn link_type(s: &SExpr, base: BaseLang, ext: ExtensionId) -> Result<LinkType, ParseError> {
    match s {
        SExpr::Atom(a, pos) => match a.as_str() {
            "unit" => Ok(LinkType::Unit),
            "int" => Ok(LinkType::Int),
            _ => Err(ParseError::at(*pos, "a linking type")),
        },
        _ => match list_head(s) {
            Some(("ref", rest, pos)) => {
                arity(rest, 1, pos, "`(ref τ)`")?;
                Ok(LinkType::reference(link_type(&rest[0], base, ext)?))
            }
            Some(("lin", rest, pos)) => {
                require_ext(ext, ExtensionId::Linear, pos, "`lin`")?;
                arity(rest, 1, pos, "`(lin φ)`")?;
                let inner = link_type(&rest[0], base, ext)?;
                if inner.is_linear() {
                    return Err(ParseError::at(
                        rest[0].pos(),
                        "a non-linear type under `lin`",
                    ));
                }
                Ok(LinkType::lin(inner))
            }
            Some(("->", rest, pos)) => {
                arity(rest, 2, pos, "`(-> τ τ)`")?;
                let param = link_type(&rest[0], base, ext)?;
                match list_head(&rest[1]) {
                    Some(("R", r, rpos)) => {
                        require_ext(ext, ExtensionId::HeapEffect, rpos, "`R`")?;
                        arity(r, 2, rpos, "`(R pure|impure τ)`")?;
                        Ok(LinkType::eff_arrow(
                            param,
                            effect(&r[0])?,
                            link_type(&r[1], base, ext)?,
                        ))
                    }
                    Some(("halts", r, rpos)) => {
                        require_ext(ext, ExtensionId::Terminating, rpos, "`halts`")?;
                        arity(r, 1, rpos, "`(halts τ)`")?;
                        Ok(LinkType::term_arrow(param, link_type(&r[0], base, ext)?))
                    }
                    Some(("C", r, rpos)) => {
                        require_ext(ext, ExtensionId::Cost, rpos, "`C`")?;
                        arity(r, 2, rpos, "`(C ?|N τ)`")?;
                        let cost = match r[0].as_atom() {
                            Some("?") => CostBound::Unknown,
                            Some(n) => CostBound::Known(n.parse::<u64>().map_err(|_| {
                                ParseError::at(r[0].pos(), "a non-negative cost or `?`")
                            })?),
                            None => {
                                return Err(ParseError::at(
                                    r[0].pos(),
                                    "a non-negative cost or `?`",
                                ))
                            }
                        };
                        Ok(LinkType::cost_arrow(
                            param,
                            cost,
                            link_type(&r[1], base, ext)?,
                        ))
                    }
                    _ => Ok(default_arrow(
                        base,
                        ext,
                        param,
                        link_type(&rest[1], base, ext)?,
                    )),
                }
            }
            _ => Err(ParseError::at(s.pos(), "a linking type")),
        },
    }
}

fn target_type(s: &SExpr) -> Result<TargetType, ParseError> {
    match s {
        SExpr::Atom(a, pos) => match a.as_str() {
            "void" => Ok(TargetType::Void),
            "unit" => Ok(TargetType::Unit),
            "int" => Ok(TargetType::Int),
            _ => Err(ParseError::at(*pos, "a target type")),
        },
        _ => match list_head(s) {
            Some(("ref", rest, pos)) => {
                arity(rest, 1, pos, "`(ref τ)`")?;
                Ok(TargetType::reference(target_type(&rest[0])?))
            }
            Some(("->", rest, pos)) => {
                arity(rest, 2, pos, "`(-> τ (E ε τexn τ))`")?;
                let param = target_type(&rest[0])?;
                match list_head(&rest[1]) {
                    Some(("E", r, rpos)) => {
                        arity(r, 3, rpos, "`(E pure|impure τexn τ)`")?;
                        Ok(TargetType::arrow(
                            param,
                            CompType::new(effect(&r[0])?, target_type(&r[1])?, target_type(&r[2])?),
                        ))
                    }
                    _ => Err(ParseError::at(
                        rest[1].pos(),
                        "a computation type `(E pure|impure τexn τ)`",
                    )),
                }
            }
            _ => Err(ParseError::at(s.pos(), "a target type")),
        },
    }
}

/// A lambda parameter: an identifier, or `_` for one that is never used.
fn binder(s: &SExpr) -> Result<String, ParseError> {
    match s.as_atom() {
        Some(SEQ_BINDER) => Ok(SEQ_BINDER.into()),
        _ => identifier(s),
    }
}

fn identifier(s: &SExpr) -> Result<String, ParseError> {
    match s {
        SExpr::Atom(a, pos) => {
            let mut chars = a.chars();
            let ok_start = chars.next().is_some_and(|c| c.is_alphabetic());
            let ok_rest = chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
            if ok_start && ok_rest && !KEYWORDS.contains(&a.as_str()) {
                Ok(a.clone())
            } else {
                Err(ParseError::at(*pos, "an identifier"))
            }
        }
        SExpr::List(_, pos) => Err(ParseError::at(*pos, "an identifier")),
    }
}

/// Parses an integer literal, wrapping to 64 bits.
fn integer(a: &str) -> Option<i64> {
    let (neg, digits) = match a.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, a),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut n: i64 = 0;
    for b in digits.bytes() {
        n = n.wrapping_mul(10).wrapping_add(i64::from(b - b'0'));
    }
    Some(if neg { n.wrapping_neg() } else { n })
}

struct TermParser<F> {
    lang: LanguageId,
    ty: F,
    path: Vec<u32>,
    positions: HashMap<NodePath, Pos>,
}

impl<T, F: Fn(&SExpr) -> Result<T, ParseError>> TermParser<F> {
    fn new(lang: LanguageId, ty: F) -> Self {
        TermParser {
            lang,
            ty,
            path: Vec::new(),
            positions: HashMap::new(),
        }
    }

    fn record(&mut self, pos: Pos) {
        self.positions.entry(self.path.clone()).or_insert(pos);
    }

    /// Parses `s` as the node at `self.path + rel`.
    fn child(&mut self, rel: &[u32], s: &SExpr) -> Result<Term<T>, ParseError> {
        let depth = self.path.len();
        self.path.extend_from_slice(rel);
        let out = self.term(s);
        self.path.truncate(depth);
        out
    }

    fn mark(&mut self, rel: &[u32], pos: Pos) {
        let depth = self.path.len();
        self.path.extend_from_slice(rel);
        self.record(pos);
        self.path.truncate(depth);
    }

    fn allows_store_ops(&self) -> bool {
        !matches!(self.lang, LanguageId::Stlc)
    }

    fn term(&mut self, s: &SExpr) -> Result<Term<T>, ParseError> {
        self.record(s.pos());
        match s {
            SExpr::Atom(a, pos) => {
                if a == "unit" {
                    return Ok(Term::Unit);
                }
                if let Some(n) = integer(a) {
                    return Ok(Term::Int(n));
                }
                identifier(s)
                    .map(Term::Var)
                    .map_err(|_| ParseError::at(*pos, "a term"))
            }
            SExpr::List(items, pos) => {
                let Some((head, rest, _)) = list_head(s) else {
                    return Err(ParseError::at(
                        items.first().map_or(*pos, SExpr::pos),
                        "a term form such as `(app f a)`",
                    ));
                };
                self.form(head, rest, *pos)
            }
        }
    }

    fn form(&mut self, head: &str, rest: &[SExpr], pos: Pos) -> Result<Term<T>, ParseError> {
        let lang = self.lang;
        match head {
            "lam" => {
                arity(rest, 3, pos, "`(lam x τ e)`")?;
                let param = binder(&rest[0])?;
                let ty = match rest[1].as_atom() {
                    Some("_") => None,
                    _ => Some((self.ty)(&rest[1])?),
                };
                let body = self.child(&[0], &rest[2])?;
                Ok(Term::Lam {
                    param,
                    ty,
                    body: Box::new(body),
                })
            }
            "app" => {
                if rest.len() < 2 {
                    return Err(ParseError::at(
                        pos,
                        "`(app f a ...)` with at least one argument",
                    ));
                }
                // (app f a1 .. an) = (app (.. (app f a1) ..) an)
                let n = rest.len() - 1;
                for k in 1..n {
                    self.mark(&vec![0; k], pos);
                }
                let mut f = self.child(&vec![0; n], &rest[0])?;
                for (i, arg) in rest[1..].iter().enumerate() {
                    let mut rel = vec![0; n - 1 - i];
                    rel.push(1);
                    let a = self.child(&rel, arg)?;
                    f = Term::app(f, a);
                }
                Ok(f)
            }
            "+" | "-" | "*" => {
                arity(rest, 2, pos, format!("`({head} e e)`").as_str())?;
                let op = match head {
                    "+" => BinOp::Add,
                    "-" => BinOp::Sub,
                    _ => BinOp::Mul,
                };
                let a = self.child(&[0], &rest[0])?;
                let b = self.child(&[1], &rest[1])?;
                Ok(Term::bin(op, a, b))
            }
            "ref" | "assign" | "deref" => {
                if !self.allows_store_ops() {
                    return Err(ParseError::at(
                        pos,
                        format!("a term of {lang} (`{head}` needs references)"),
                    ));
                }
                match head {
                    "ref" => {
                        arity(rest, 1, pos, "`(ref e)`")?;
                        Ok(Term::new_ref(self.child(&[0], &rest[0])?))
                    }
                    "deref" => {
                        arity(rest, 1, pos, "`(deref e)`")?;
                        Ok(Term::deref(self.child(&[0], &rest[0])?))
                    }
                    _ => {
                        arity(rest, 2, pos, "`(assign e e)`")?;
                        let a = self.child(&[0], &rest[0])?;
                        let b = self.child(&[1], &rest[1])?;
                        Ok(Term::assign(a, b))
                    }
                }
            }
            "let" => {
                arity(rest, 3, pos, "`(let x e1 e2)`")?;
                let x = identifier(&rest[0])?;
                self.mark(&[0], pos);
                let bound = self.child(&[1], &rest[1])?;
                let body = self.child(&[0, 0], &rest[2])?;
                Ok(Term::let_in(x, bound, body))
            }
            "seq" => {
                if rest.len() < 2 {
                    return Err(ParseError::at(
                        pos,
                        "`(seq e1 e2 ...)` with at least two terms",
                    ));
                }
                self.seq(rest, pos)
            }
            ":" => {
                if lang.extension().is_none() {
                    return Err(ParseError::at(pos, format!("a term of {lang} (linking-type annotations need a linking-types language)")));
                }
                arity(rest, 2, pos, "`(: e τ)`")?;
                let e = self.child(&[0], &rest[0])?;
                let ty = (self.ty)(&rest[1])?;
                Ok(Term::ascribe(e, ty))
            }
            "throw" | "catch" => {
                if lang != LanguageId::Target {
                    return Err(ParseError::at(
                        pos,
                        format!("a term of {lang} (`{head}` is target-only)"),
                    ));
                }
                if head == "throw" {
                    arity(rest, 1, pos, "`(throw e)`")?;
                    return Ok(Term::throw(self.child(&[0], &rest[0])?));
                }
                arity(rest, 3, pos, "`(catch e (val x e1) (exc y e2))`")?;
                let scrutinee = self.child(&[0], &rest[0])?;
                let (x, val_sx) = self.handler(&rest[1], "val")?;
                let val_body = self.child(&[1], val_sx)?;
                let (y, exc_sx) = self.handler(&rest[2], "exc")?;
                let exc_body = self.child(&[2], exc_sx)?;
                Ok(Term::catch(scrutinee, x, val_body, y, exc_body))
            }
            other => Err(ParseError::at(pos, format!("a term form, not `{other}`"))),
        }
    }

    fn handler<'s>(&self, s: &'s SExpr, kw: &str) -> Result<(String, &'s SExpr), ParseError> {
        match list_head(s) {
            Some((h, rest, pos)) if h == kw => {
                arity(rest, 2, pos, format!("`({kw} x e)`").as_str())?;
                Ok((identifier(&rest[0])?, &rest[1]))
            }
            _ => Err(ParseError::at(s.pos(), format!("`({kw} x e)`"))),
        }
    }

    fn seq(&mut self, rest: &[SExpr], pos: Pos) -> Result<Term<T>, ParseError> {
        if rest.len() == 1 {
            return self.term(&rest[0]);
        }
        self.mark(&[0], pos);
        let first = self.child(&[1], &rest[0])?;
        let depth = self.path.len();
        self.path.extend([0, 0]);
        if rest.len() > 2 {
            self.record(pos);
        }
        let tail = self.seq(&rest[1..], pos);
        self.path.truncate(depth);
        Ok(Term::seq(first, tail?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_parses_to_the_expected_ast() {
        let t = parse_source("(lam c (-> unit int) (app c unit))", BaseLang::Stlc).unwrap();
        assert_eq!(
            t,
            Term::lam(
                "c",
                SourceType::arrow(SourceType::Unit, SourceType::Int),
                Term::app(Term::var("c"), Term::Unit)
            )
        );
    }

    #[test]
    fn refs_are_not_in_the_pure_calculus() {
        let err = parse_source("(ref 0)", BaseLang::Stlc).unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
        assert!(parse_source("(lam x (ref int) x)", BaseLang::Stlc).is_err());
        assert!(parse_source("(ref 0)", BaseLang::LamRef).is_ok());
    }

    #[test]
    fn seq_desugars_to_application() {
        let t = parse_source(
            "(seq (assign x (+ (deref x) 1)) (deref x))",
            BaseLang::LamRef,
        )
        .unwrap();
        let expected: SourceTerm = Term::app(
            Term::Lam {
                param: SEQ_BINDER.into(),
                ty: None,
                body: Box::new(Term::deref(Term::var("x"))),
            },
            Term::assign(
                Term::var("x"),
                Term::sum(Term::deref(Term::var("x")), Term::Int(1)),
            ),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn target_only_and_annotation_forms_are_gated() {
        for lang in [
            LanguageId::Stlc,
            LanguageId::LamRef,
            LanguageId::StlcK(ExtensionId::HeapEffect),
        ] {
            assert!(parse("(throw 1)", lang).is_err());
            assert!(parse("(catch 1 (val x x) (exc y y))", lang).is_err());
        }
        assert!(parse("(: 1 int)", LanguageId::Stlc).is_err());
        assert!(parse("(: 1 int)", LanguageId::StlcK(ExtensionId::HeapEffect)).is_ok());
        assert!(parse("(catch (throw 5) (val x 0) (exc y y))", LanguageId::Target).is_ok());
    }

    #[test]
    fn bare_arrows_take_the_default_embedding() {
        let t = parse_link_type("(-> unit int)", BaseLang::Stlc, ExtensionId::HeapEffect).unwrap();
        assert_eq!(
            t,
            LinkType::eff_arrow(LinkType::Unit, Effect::Pure, LinkType::Int)
        );
        let t =
            parse_link_type("(-> unit int)", BaseLang::LamRef, ExtensionId::HeapEffect).unwrap();
        assert_eq!(
            t,
            LinkType::eff_arrow(LinkType::Unit, Effect::Impure, LinkType::Int)
        );
        let t =
            parse_link_type("(-> unit (C 3 int))", BaseLang::LamRef, ExtensionId::Cost).unwrap();
        assert_eq!(
            t,
            LinkType::cost_arrow(LinkType::Unit, CostBound::Known(3), LinkType::Int)
        );
        assert!(parse_link_type(
            "(-> unit (R pure int))",
            BaseLang::LamRef,
            ExtensionId::Linear
        )
        .is_err());
        assert!(parse_link_type("(lin (lin int))", BaseLang::LamRef, ExtensionId::Linear).is_err());
    }

    #[test]
    fn big_literals_wrap() {
        let t = parse_source("9223372036854775808", BaseLang::Stlc).unwrap();
        assert_eq!(t, Term::Int(i64::MIN));
    }

    #[test]
    fn definitions_chain_into_lets_with_positions() {
        let text = "(define one 1)\n(define two (+ one one))";
        let located = parse_file_source(text, BaseLang::Stlc, None).unwrap();
        assert_eq!(
            located.term,
            Term::let_in(
                "one",
                Term::Int(1),
                Term::sum(Term::var("one"), Term::var("one"))
            )
        );
        assert_eq!(located.position(&[0, 0]), Pos { line: 2, col: 13 });
        assert_eq!(located.position(&[1]), Pos { line: 1, col: 13 });
        let first = parse_file_source(text, BaseLang::Stlc, Some("one")).unwrap();
        assert_eq!(first.term, Term::Int(1));
    }

    #[test]
    fn nary_app_positions() {
        let sx = read_one("(app f\n a\n b)").unwrap();
        let mut p = TermParser::new(LanguageId::Stlc, |s: &SExpr| source_type(s, BaseLang::Stlc));
        let t = p.term(&sx).unwrap();
        assert_eq!(t.node_at(&[0, 1]), Some(&Term::var("a")));
        assert_eq!(p.positions[&vec![0, 1]], Pos { line: 2, col: 2 });
        assert_eq!(p.positions[&vec![1]], Pos { line: 3, col: 2 });
    }
}
