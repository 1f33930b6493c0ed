use crate::causal::Expr;
use crate::diagnostic::SourceSpan;
use crate::model::{ActorKind, ConditionName, Evidence, Mode, OccurrenceKind, Sense};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

/// One top-level statement; `span` covers the whole statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub span: SourceSpan,
    pub body: DeclarationBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclarationBody {
    Actor {
        id: Ident,
        kind: ActorKind,
        label: Option<String>,
    },
    Occurrence {
        id: Ident,
        kind: OccurrenceKind,
        producer: Option<Ident>,
        label: Option<String>,
        /// Span of the `harm` keyword when present.
        harm: Option<SourceSpan>,
    },
    Causes {
        from: Ident,
        to: Ident,
    },
    Model(Vec<ModelStatement>),
    /// `attribute` (asserted) or `claim`.
    Attribution {
        mode: Mode,
        sense: Sense,
        subject: Ident,
        occurrence: Ident,
    },
    Fact {
        condition: ConditionName,
        subject: Ident,
        occurrence: Ident,
        value: Evidence,
    },
    Note {
        target: Ident,
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStatement {
    pub span: SourceSpan,
    pub body: ModelBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelBody {
    Exogenous(Vec<Ident>),
    Equation {
        var: Ident,
        expr: Expr,
        /// Every variable occurrence in `expr`, with its span.
        refs: Vec<Ident>,
    },
    Context(Vec<(Ident, bool)>),
    Bind {
        var: Ident,
        occurrence: Ident,
    },
}
