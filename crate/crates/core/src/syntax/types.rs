use std::fmt;

/// The two-point effect modality: `∘` (pure) below `•` (impure).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    Pure,
    Impure,
}

impl Effect {
    pub fn join(self, other: Effect) -> Effect {
        if self == Effect::Pure && other == Effect::Pure {
            Effect::Pure
        } else {
            Effect::Impure
        }
    }

    /// `self ⊑ other` in the order `∘ ⊑ •`.
    pub fn leq(self, other: Effect) -> bool {
        self == Effect::Pure || other == Effect::Impure
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Effect::Pure => "∘",
            Effect::Impure => "•",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Effect::Pure => "pure",
            Effect::Impure => "impure",
        }
    }
}

/// Types of the unextended source calculi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceType {
    Unit,
    Int,
    Ref(Box<SourceType>),
    Arrow(Box<SourceType>, Box<SourceType>),
}

impl SourceType {
    pub fn arrow(a: SourceType, b: SourceType) -> Self {
        SourceType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn reference(a: SourceType) -> Self {
        SourceType::Ref(Box::new(a))
    }

    pub fn mentions_ref(&self) -> bool {
        match self {
            SourceType::Unit | SourceType::Int => false,
            SourceType::Ref(_) => true,
            SourceType::Arrow(a, b) => a.mentions_ref() || b.mentions_ref(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SourceType::Unit | SourceType::Int => 1,
            SourceType::Ref(a) => 1 + a.size(),
            SourceType::Arrow(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SourceType::Unit | SourceType::Int => 1,
            SourceType::Ref(a) => 1 + a.depth(),
            SourceType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// Cost of a computation in the cost extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostBound {
    Known(u64),
    Unknown,
}

/// Types of every linking-types extension. Which constructors are legal
/// depends on the extension; see [`LinkType::well_formed`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkType {
    Unit,
    Int,
    Ref(Box<LinkType>),
    /// `τ → R^ε τ` (heap-effect extension).
    EffArrow(Box<LinkType>, Effect, Box<LinkType>),
    /// Unannotated `τ → τ` (linear and terminating extensions).
    Arrow(Box<LinkType>, Box<LinkType>),
    /// `φ^L` (linear extension).
    Lin(Box<LinkType>),
    /// `τ → τ↾` (terminating extension).
    TermArrow(Box<LinkType>, Box<LinkType>),
    /// `τ → C^N τ` or `τ → C^• τ` (cost extension).
    CostArrow(Box<LinkType>, CostBound, Box<LinkType>),
}

/// The pieces of an arrow type, whichever extension it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct ArrowView<'a> {
    pub param: &'a LinkType,
    pub result: &'a LinkType,
    pub latent: Effect,
    pub cost: Option<CostBound>,
    pub terminating: bool,
}

impl LinkType {
    pub fn eff_arrow(a: LinkType, eff: Effect, b: LinkType) -> Self {
        LinkType::EffArrow(Box::new(a), eff, Box::new(b))
    }

    pub fn arrow(a: LinkType, b: LinkType) -> Self {
        LinkType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn term_arrow(a: LinkType, b: LinkType) -> Self {
        LinkType::TermArrow(Box::new(a), Box::new(b))
    }

    pub fn cost_arrow(a: LinkType, cost: CostBound, b: LinkType) -> Self {
        LinkType::CostArrow(Box::new(a), cost, Box::new(b))
    }

    pub fn reference(a: LinkType) -> Self {
        LinkType::Ref(Box::new(a))
    }

    pub fn lin(a: LinkType) -> Self {
        LinkType::Lin(Box::new(a))
    }

    /// Strips a top-level linearity marker.
    pub fn unrestricted(&self) -> &LinkType {
        match self {
            LinkType::Lin(inner) => inner,
            other => other,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, LinkType::Lin(_))
    }

    /// Views any of the arrow forms uniformly. Plain and unknown-cost arrows
    /// are assumed to touch the heap; terminating and known-cost arrows are
    /// restricted to the pure fragment by their typing obligations.
    pub fn as_arrow(&self) -> Option<ArrowView<'_>> {
        match self.unrestricted() {
            LinkType::EffArrow(a, eff, b) => Some(ArrowView {
                param: a,
                result: b,
                latent: *eff,
                cost: None,
                terminating: false,
            }),
            LinkType::Arrow(a, b) => Some(ArrowView {
                param: a,
                result: b,
                latent: Effect::Impure,
                cost: None,
                terminating: false,
            }),
            LinkType::TermArrow(a, b) => Some(ArrowView {
                param: a,
                result: b,
                latent: Effect::Pure,
                cost: None,
                terminating: true,
            }),
            LinkType::CostArrow(a, cost, b) => Some(ArrowView {
                param: a,
                result: b,
                latent: match cost {
                    CostBound::Known(_) => Effect::Pure,
                    CostBound::Unknown => Effect::Impure,
                },
                cost: Some(*cost),
                terminating: false,
            }),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LinkType::Unit | LinkType::Int => 1,
            LinkType::Ref(a) | LinkType::Lin(a) => 1 + a.size(),
            LinkType::EffArrow(a, _, b)
            | LinkType::Arrow(a, b)
            | LinkType::TermArrow(a, b)
            | LinkType::CostArrow(a, _, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Types of the target language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetType {
    /// The uninhabited type `0`.
    Void,
    Unit,
    Int,
    Ref(Box<TargetType>),
    Arrow(Box<TargetType>, Box<CompType>),
}

/// A computation type `E^ε_{τexn} τ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompType {
    pub effect: Effect,
    pub exn: TargetType,
    pub result: TargetType,
}

impl CompType {
    pub fn new(effect: Effect, exn: TargetType, result: TargetType) -> Self {
        CompType {
            effect,
            exn,
            result,
        }
    }

    /// `E^∘_0 τ`, the type every value inhabits.
    pub fn pure(result: TargetType) -> Self {
        CompType::new(Effect::Pure, TargetType::Void, result)
    }
}

impl TargetType {
    pub fn arrow(a: TargetType, comp: CompType) -> Self {
        TargetType::Arrow(Box::new(a), Box::new(comp))
    }

    pub fn reference(a: TargetType) -> Self {
        TargetType::Ref(Box::new(a))
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceType::Unit => f.write_str("unit"),
            SourceType::Int => f.write_str("int"),
            SourceType::Ref(a) => {
                f.write_str("ref ")?;
                fmt_source_atom(a, f)
            }
            SourceType::Arrow(a, b) => {
                fmt_source_domain(a, f)?;
                write!(f, " → {b}")
            }
        }
    }
}

fn fmt_source_domain(t: &SourceType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        SourceType::Arrow(..) => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

fn fmt_source_atom(t: &SourceType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        SourceType::Unit | SourceType::Int => write!(f, "{t}"),
        _ => write!(f, "({t})"),
    }
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkType::Unit => f.write_str("unit"),
            LinkType::Int => f.write_str("int"),
            LinkType::Ref(a) => {
                f.write_str("ref ")?;
                fmt_link_atom(a, f)
            }
            LinkType::Lin(a) => {
                fmt_link_atom(a, f)?;
                f.write_str("^L")
            }
            LinkType::EffArrow(a, eff, b) => {
                fmt_link_domain(a, f)?;
                write!(f, " → R^{} ", eff.symbol())?;
                fmt_link_atom(b, f)
            }
            LinkType::Arrow(a, b) => {
                fmt_link_domain(a, f)?;
                write!(f, " → {b}")
            }
            LinkType::TermArrow(a, b) => {
                fmt_link_domain(a, f)?;
                f.write_str(" → ")?;
                fmt_link_atom(b, f)?;
                f.write_str("↾")
            }
            LinkType::CostArrow(a, cost, b) => {
                fmt_link_domain(a, f)?;
                match cost {
                    CostBound::Known(n) => write!(f, " → C^{n} ")?,
                    CostBound::Unknown => f.write_str(" → C^• ")?,
                }
                fmt_link_atom(b, f)
            }
        }
    }
}

fn is_link_arrow(t: &LinkType) -> bool {
    matches!(
        t,
        LinkType::EffArrow(..)
            | LinkType::Arrow(..)
            | LinkType::TermArrow(..)
            | LinkType::CostArrow(..)
    )
}

fn fmt_link_domain(t: &LinkType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_link_arrow(t) {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

fn fmt_link_atom(t: &LinkType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        LinkType::Unit | LinkType::Int => write!(f, "{t}"),
        _ => write!(f, "({t})"),
    }
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetType::Void => f.write_str("0"),
            TargetType::Unit => f.write_str("unit"),
            TargetType::Int => f.write_str("int"),
            TargetType::Ref(a) => match **a {
                TargetType::Void | TargetType::Unit | TargetType::Int => write!(f, "ref {a}"),
                _ => write!(f, "ref ({a})"),
            },
            TargetType::Arrow(a, comp) => {
                match **a {
                    TargetType::Arrow(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " → {comp}")
            }
        }
    }
}

impl fmt::Display for CompType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E^{}_", self.effect.symbol())?;
        match self.exn {
            TargetType::Void | TargetType::Unit | TargetType::Int => write!(f, "{}", self.exn)?,
            _ => write!(f, "{{{}}}", self.exn)?,
        }
        match self.result {
            TargetType::Void | TargetType::Unit | TargetType::Int => write!(f, " {}", self.result),
            _ => write!(f, " ({})", self.result),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_is_a_two_point_lattice() {
        use Effect::*;
        let all = [Pure, Impure];
        for a in all {
            assert_eq!(a.join(Pure), a);
            assert_eq!(a.join(a), a);
            for b in all {
                assert_eq!(a.join(b), b.join(a));
                assert_eq!(a.join(b) == Pure, a == Pure && b == Pure);
                for c in all {
                    assert_eq!(a.join(b).join(c), a.join(b.join(c)));
                }
            }
        }
        assert!(Pure.leq(Impure));
        assert!(!Impure.leq(Pure));
    }

    #[test]
    fn display_uses_modal_notation() {
        let t = TargetType::arrow(
            TargetType::Unit,
            CompType::new(Effect::Impure, TargetType::Void, TargetType::Int),
        );
        assert_eq!(t.to_string(), "unit → E^•_0 int");
        let l = LinkType::eff_arrow(
            LinkType::eff_arrow(LinkType::Unit, Effect::Impure, LinkType::Int),
            Effect::Impure,
            LinkType::Int,
        );
        assert_eq!(l.to_string(), "(unit → R^• int) → R^• int");
        let s = SourceType::arrow(
            SourceType::arrow(SourceType::Int, SourceType::Int),
            SourceType::Int,
        );
        assert_eq!(s.to_string(), "(int → int) → int");
    }
}
