use super::ast::{Declaration, DeclarationBody, Ident, ModelBody, ModelStatement};
use super::lexer::{lex, Tok, Token};
use crate::causal::Expr;
use crate::diagnostic::{Code, Diagnostic, SourceSpan};
use crate::model::{
    ActorKind, CivilBranch, ConditionName, DutyBasis, Evidence, LiabilityKind, Mode, MoralKind, OccurrenceKind,
    RoleKind, Sense,
};

/// Parses a whole source. Errors are recovered at statement boundaries, so
/// independent mistakes are all reported.
pub fn parse_named(file: &str, source: &str) -> (Vec<Declaration>, Vec<Diagnostic>) {
    let (tokens, mut diagnostics) = lex(file, source);
    let mut p = Parser {
        tokens,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let declarations = p.scenario();
    diagnostics.append(&mut p.diagnostics);
    diagnostics.sort_by(|a, b| a.span.cmp(&b.span).then_with(|| a.cmp(b)));
    (declarations, diagnostics)
}

pub fn parse(source: &str) -> (Vec<Declaration>, Vec<Diagnostic>) {
    parse_named("<input>", source)
}

/// Marker for a statement abandoned after an error.
struct Abandon;

type PResult<T> = Result<T, Abandon>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

fn join_span(first: &SourceSpan, last: &SourceSpan) -> SourceSpan {
    let length = if first.line == last.line {
        last.column + last.length - first.column
    } else {
        first.length
    };
    SourceSpan::new(first.file.clone(), first.line, first.column, length)
}

const RESERVED_VARS: [&str; 2] = ["true", "false"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span.clone()
    }

    /// Reports at the current token unless it is a lexer error, which is
    /// already reported.
    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let t = self.peek().clone();
        if t.tok != Tok::Error {
            self.diagnostics.push(
                Diagnostic::new(Code::Syn, format!("expected {expected}, found {}", t.tok.describe()))
                    .with_span(Some(t.span)),
            );
        }
        Err(Abandon)
    }

    fn fail_at<T>(&mut self, span: SourceSpan, message: String) -> PResult<T> {
        self.diagnostics
            .push(Diagnostic::new(Code::Syn, message).with_span(Some(span)));
        Err(Abandon)
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek().tok == tok {
            Ok(self.next().span)
        } else {
            self.fail(&tok.describe())
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        match &self.peek().tok {
            Tok::Word(w) if w == word => Ok(self.next().span),
            _ => self.fail(&format!("`{word}`")),
        }
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == word)
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let name = w.clone();
                let span = self.next().span;
                Ok(Ident { name, span })
            }
            _ => self.fail(what),
        }
    }

    fn variable(&mut self) -> PResult<Ident> {
        let id = self.ident("a variable name")?;
        if RESERVED_VARS.contains(&id.name.as_str()) {
            return self.fail_at(
                id.span,
                format!("`{}` is a constant and cannot name a variable", id.name),
            );
        }
        Ok(id)
    }

    /// Picks a keyword from a closed set.
    fn choice<T: Copy>(&mut self, what: &str, options: &[(&str, T)]) -> PResult<T> {
        if let Tok::Word(w) = &self.peek().tok {
            if let Some((_, v)) = options.iter().find(|(k, _)| k == w) {
                self.next();
                return Ok(*v);
            }
            let span = self.peek().span.clone();
            let list: Vec<&str> = options.iter().map(|(k, _)| *k).collect();
            let found = w.clone();
            return self.fail_at(
                span,
                format!("unknown {what} `{found}`; expected one of: {}", list.join(", ")),
            );
        }
        self.fail(what)
    }

    fn string(&mut self) -> Option<String> {
        if let Tok::Str(s) = &self.peek().tok {
            let s = s.clone();
            self.next();
            Some(s)
        } else {
            None
        }
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::End => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.fail("end of statement"),
        }
    }

    /// Skips to just past the next statement boundary.
    fn recover(&mut self) {
        loop {
            match self.peek().tok {
                Tok::End => {
                    self.next();
                    return;
                }
                Tok::Eof => return,
                _ => {
                    self.next();
                }
            }
        }
    }

    fn scenario(&mut self) -> Vec<Declaration> {
        let mut out = Vec::new();
        loop {
            match self.peek().tok {
                Tok::Eof => return out,
                Tok::End => {
                    self.next();
                }
                _ => match self.statement() {
                    Ok(d) => out.push(d),
                    Err(Abandon) => self.recover(),
                },
            }
        }
    }

    fn statement(&mut self) -> PResult<Declaration> {
        let start = self.peek().span.clone();
        let word = match &self.peek().tok {
            Tok::Word(w) => w.clone(),
            _ => return self.fail("a statement keyword"),
        };
        let body = match word.as_str() {
            "actor" => self.actor()?,
            "occurrence" => self.occurrence()?,
            "causes" => {
                self.next();
                let from = self.ident("an actor or occurrence id")?;
                self.expect(Tok::Arrow)?;
                let to = self.ident("an occurrence id")?;
                DeclarationBody::Causes { from, to }
            }
            "model" => self.model()?,
            "attribute" | "claim" => {
                self.next();
                let mode = if word == "attribute" { Mode::Asserted } else { Mode::Claimed };
                let sense = self.sense()?;
                let subject = self.ident("a subject id")?;
                self.keyword("for")?;
                let occurrence = self.ident("an occurrence id")?;
                DeclarationBody::Attribution {
                    mode,
                    sense,
                    subject,
                    occurrence,
                }
            }
            "fact" => self.fact()?,
            "note" => {
                self.next();
                let target = self.ident("an id")?;
                let Some(text) = self.string() else {
                    return self.fail("a string");
                };
                DeclarationBody::Note { target, text }
            }
            _ => {
                return self.fail_at(
                    start,
                    format!(
                        "unknown statement `{word}`; expected one of: actor, occurrence, causes, model, attribute, claim, fact, note"
                    ),
                )
            }
        };
        let span = join_span(&start, &self.prev_span());
        self.end_of_statement()?;
        Ok(Declaration { span, body })
    }

    fn actor(&mut self) -> PResult<DeclarationBody> {
        self.next();
        let id = self.ident("an actor id")?;
        self.keyword("kind")?;
        let options: Vec<(&str, ActorKind)> = ActorKind::ALL.iter().map(|k| (k.keyword(), *k)).collect();
        let kind = self.choice("actor kind", &options)?;
        let label = self.string();
        Ok(DeclarationBody::Actor { id, kind, label })
    }

    fn occurrence(&mut self) -> PResult<DeclarationBody> {
        self.next();
        let id = self.ident("an occurrence id")?;
        self.keyword("kind")?;
        let options: Vec<(&str, OccurrenceKind)> = OccurrenceKind::ALL.iter().map(|k| (k.keyword(), *k)).collect();
        let kind = self.choice("occurrence kind", &options)?;
        let producer = if self.at_word("by") {
            self.next();
            Some(self.ident("a producer id")?)
        } else {
            None
        };
        let label = self.string();
        let harm = if self.at_word("harm") {
            Some(self.next().span)
        } else {
            None
        };
        Ok(DeclarationBody::Occurrence {
            id,
            kind,
            producer,
            label,
            harm,
        })
    }

    fn sense(&mut self) -> PResult<Sense> {
        let family = self.choice("sense", &[("causal", 0u8), ("role", 1), ("liability", 2), ("moral", 3)])?;
        if family == 0 {
            return Ok(Sense::Causal);
        }
        self.expect(Tok::LParen)?;
        let sense = match family {
            1 => {
                let sub = self.choice("role subkind", &[("task", 0u8), ("moral_duty", 1), ("legal_duty", 2)])?;
                match sub {
                    0 => Sense::Role(RoleKind::Task),
                    1 => Sense::Role(RoleKind::MoralDuty),
                    _ => {
                        let basis = if self.peek().tok == Tok::Colon {
                            self.next();
                            let options: Vec<(&str, DutyBasis)> =
                                DutyBasis::ALL.iter().map(|b| (b.keyword(), *b)).collect();
                            Some(self.choice("legal-duty basis", &options)?)
                        } else {
                            None
                        };
                        Sense::Role(RoleKind::LegalDuty(basis))
                    }
                }
            }
            2 => {
                let sub = self.choice("liability subkind", &[("criminal", false), ("civil", true)])?;
                if sub {
                    let branch = if self.peek().tok == Tok::Colon {
                        self.next();
                        let options: Vec<(&str, CivilBranch)> =
                            CivilBranch::ALL.iter().map(|b| (b.keyword(), *b)).collect();
                        Some(self.choice("civil branch", &options)?)
                    } else {
                        None
                    };
                    Sense::Liability(LiabilityKind::Civil(branch))
                } else {
                    Sense::Liability(LiabilityKind::Criminal)
                }
            }
            _ => Sense::Moral(self.choice(
                "moral subkind",
                &[
                    ("attributability", MoralKind::Attributability),
                    ("accountability", MoralKind::Accountability),
                ],
            )?),
        };
        self.expect(Tok::RParen)?;
        Ok(sense)
    }

    fn fact(&mut self) -> PResult<DeclarationBody> {
        self.next();
        let options: Vec<(&str, ConditionName)> = ConditionName::ALL.iter().map(|c| (c.keyword(), *c)).collect();
        let condition = self.choice("condition", &options)?;
        self.expect(Tok::LParen)?;
        let subject = self.ident("an actor id")?;
        self.expect(Tok::Comma)?;
        let occurrence = self.ident("an occurrence id")?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        let options: Vec<(&str, Evidence)> = Evidence::ALL.iter().map(|e| (e.keyword(), *e)).collect();
        let value = self.choice("evidence value", &options)?;
        Ok(DeclarationBody::Fact {
            condition,
            subject,
            occurrence,
            value,
        })
    }

    fn model(&mut self) -> PResult<DeclarationBody> {
        self.next();
        let open = self.expect(Tok::LBrace)?;
        let mut statements = Vec::new();
        loop {
            match self.peek().tok {
                Tok::End => {
                    self.next();
                }
                Tok::RBrace => {
                    self.next();
                    return Ok(DeclarationBody::Model(statements));
                }
                Tok::Eof => return self.fail_at(open, "unclosed model block".into()),
                _ => match self.model_statement() {
                    Ok(s) => statements.push(s),
                    Err(Abandon) => {
                        // Resume at the next boundary inside the block.
                        while !matches!(self.peek().tok, Tok::End | Tok::RBrace | Tok::Eof) {
                            self.next();
                        }
                    }
                },
            }
        }
    }

    fn model_statement(&mut self) -> PResult<ModelStatement> {
        let start = self.peek().span.clone();
        let word = match &self.peek().tok {
            Tok::Word(w) => w.clone(),
            _ => return self.fail("a model statement"),
        };
        let body = match word.as_str() {
            "exogenous" => {
                self.next();
                let mut vars = vec![self.variable()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    vars.push(self.variable()?);
                }
                ModelBody::Exogenous(vars)
            }
            "equation" => {
                self.next();
                let var = self.variable()?;
                self.expect(Tok::Eq)?;
                let mut refs = Vec::new();
                let expr = self.expr(&mut refs)?;
                ModelBody::Equation { var, expr, refs }
            }
            "context" => {
                self.next();
                let mut pairs = vec![self.context_pair()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    pairs.push(self.context_pair()?);
                }
                ModelBody::Context(pairs)
            }
            "bind" => {
                self.next();
                let var = self.variable()?;
                self.expect(Tok::Arrow)?;
                let occurrence = self.ident("an occurrence id")?;
                ModelBody::Bind { var, occurrence }
            }
            _ => {
                return self.fail_at(
                    start,
                    format!("unknown model statement `{word}`; expected one of: exogenous, equation, context, bind"),
                )
            }
        };
        let span = join_span(&start, &self.prev_span());
        match self.peek().tok {
            Tok::End | Tok::RBrace => {}
            _ => return self.fail("end of statement"),
        }
        Ok(ModelStatement { span, body })
    }

    fn context_pair(&mut self) -> PResult<(Ident, bool)> {
        let var = self.variable()?;
        self.expect(Tok::Eq)?;
        let value = self.choice("boolean", &[("true", true), ("false", false)])?;
        Ok((var, value))
    }

    fn expr(&mut self, refs: &mut Vec<Ident>) -> PResult<Expr> {
        let mut terms = vec![self.term(refs)?];
        while self.peek().tok == Tok::Pipe {
            self.next();
            terms.push(self.term(refs)?);
        }
        Ok(Expr::or(terms))
    }

    fn term(&mut self, refs: &mut Vec<Ident>) -> PResult<Expr> {
        let mut factors = vec![self.factor(refs)?];
        while self.peek().tok == Tok::Amp {
            self.next();
            factors.push(self.factor(refs)?);
        }
        Ok(Expr::and(factors))
    }

    fn factor(&mut self, refs: &mut Vec<Ident>) -> PResult<Expr> {
        let negated = if self.peek().tok == Tok::Bang {
            self.next();
            true
        } else {
            false
        };
        let atom = match &self.peek().tok {
            Tok::Word(w) if w == "true" => {
                self.next();
                Expr::Const(true)
            }
            Tok::Word(w) if w == "false" => {
                self.next();
                Expr::Const(false)
            }
            Tok::Word(_) => {
                let id = self.ident("a variable")?;
                let e = Expr::var(&id.name);
                refs.push(id);
                e
            }
            Tok::LParen => {
                self.next();
                let e = self.expr(refs)?;
                self.expect(Tok::RParen)?;
                e
            }
            _ => return self.fail("a variable, `true`, `false` or `(`"),
        };
        Ok(if negated { Expr::not(atom) } else { atom })
    }
}
