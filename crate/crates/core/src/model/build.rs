use std::collections::{BTreeMap, BTreeSet};

use super::{
    validate_attribution, validate_producer, Actor, Attribution, FactKey, Mode, Occurrence, OccurrenceKind, Reason,
    Scenario, SubjectKind, Verdict,
};
use crate::causal::{CausalError, CausalModel, Expr};
use crate::diagnostic::{normalize, Code, Diagnostic, SourceSpan};
use crate::dsl::ast::{Declaration, DeclarationBody, Ident, ModelBody};

/// Resolves and validates parsed declarations. The scenario is `None` when
/// any error was found; warnings never prevent construction.
pub fn build_scenario(declarations: &[Declaration]) -> (Option<Scenario>, Vec<Diagnostic>) {
    let mut b = Builder::default();
    for d in declarations {
        b.declare_node(d);
    }
    for d in declarations {
        b.resolve(d);
    }
    b.finish_model();
    let Builder {
        scenario,
        mut diagnostics,
        ..
    } = b;
    normalize(&mut diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        (None, diagnostics)
    } else {
        (Some(scenario), diagnostics)
    }
}

#[derive(Default)]
struct Builder {
    scenario: Scenario,
    diagnostics: Vec<Diagnostic>,
    model_seen: bool,
    exogenous: BTreeMap<String, SourceSpan>,
    equations: BTreeMap<String, (Expr, SourceSpan)>,
    context: BTreeMap<String, (bool, SourceSpan)>,
    bindings: BTreeMap<String, (String, SourceSpan)>,
    bound_occurrences: BTreeMap<String, String>,
    refs: Vec<Ident>,
}

fn at(span: &SourceSpan) -> Option<SourceSpan> {
    Some(span.clone())
}

impl Builder {
    fn error(&mut self, code: Code, subjects: &[&str], message: String, span: &SourceSpan) {
        self.diagnostics.push(
            Diagnostic::new(code, message)
                .with_subjects(subjects.iter().copied())
                .with_span(at(span)),
        );
    }

    fn duplicate(&mut self, what: &str, span: &SourceSpan) {
        self.error(Code::Duplicate, &[], format!("repeated {what}; copies merged"), span);
    }

    fn claim_id(&mut self, id: &Ident) -> bool {
        if self.scenario.spans.ids.contains_key(&id.name) {
            let first = self.scenario.spans.ids[&id.name].clone();
            self.error(
                Code::DupId,
                &[&id.name],
                format!("duplicate identifier `{}` (first declared at {first})", id.name),
                &id.span,
            );
            return false;
        }
        self.scenario.spans.ids.insert(id.name.clone(), id.span.clone());
        true
    }

    fn declare_node(&mut self, d: &Declaration) {
        match &d.body {
            DeclarationBody::Actor { id, kind, label } => {
                if self.claim_id(id) {
                    self.scenario.actors.insert(
                        id.name.clone(),
                        Actor {
                            id: id.name.clone(),
                            kind: *kind,
                            label: label.clone(),
                        },
                    );
                }
            }
            DeclarationBody::Occurrence {
                id,
                kind,
                producer,
                label,
                harm,
            } => {
                if let Some(harm_span) = harm {
                    if *kind != OccurrenceKind::Consequence {
                        self.error(
                            Code::BadHarm,
                            &[&id.name],
                            format!("only a consequence can be marked harm, `{}` is a {}", id.name, kind),
                            harm_span,
                        );
                    }
                }
                if self.claim_id(id) {
                    self.scenario.occurrences.insert(
                        id.name.clone(),
                        Occurrence {
                            id: id.name.clone(),
                            kind: *kind,
                            label: label.clone(),
                            producer: producer.as_ref().map(|p| p.name.clone()),
                            harm: harm.is_some(),
                        },
                    );
                }
            }
            _ => {}
        }
    }

    fn require_subject(&mut self, id: &Ident) -> Option<SubjectKind> {
        let kind = self.scenario.subject_kind(&id.name);
        if kind.is_none() {
            self.error(
                Code::Unresolved,
                &[&id.name],
                format!("unknown actor or occurrence `{}`", id.name),
                &id.span,
            );
        }
        kind
    }

    fn require_actor(&mut self, id: &Ident) -> bool {
        match self.scenario.subject_kind(&id.name) {
            Some(SubjectKind::Actor(_)) => true,
            Some(SubjectKind::Occurrence(_)) => {
                self.error(
                    Code::Unresolved,
                    &[&id.name],
                    format!("`{}` is an occurrence, expected an actor", id.name),
                    &id.span,
                );
                false
            }
            None => {
                self.error(
                    Code::Unresolved,
                    &[&id.name],
                    format!("unknown actor `{}`", id.name),
                    &id.span,
                );
                false
            }
        }
    }

    fn require_occurrence(&mut self, id: &Ident) -> Option<OccurrenceKind> {
        match self.scenario.subject_kind(&id.name) {
            Some(SubjectKind::Occurrence(k)) => Some(k),
            Some(SubjectKind::Actor(_)) => {
                self.error(
                    Code::Unresolved,
                    &[&id.name],
                    format!("`{}` is an actor, expected an occurrence", id.name),
                    &id.span,
                );
                None
            }
            None => {
                self.error(
                    Code::Unresolved,
                    &[&id.name],
                    format!("unknown occurrence `{}`", id.name),
                    &id.span,
                );
                None
            }
        }
    }

    fn resolve(&mut self, d: &Declaration) {
        match &d.body {
            DeclarationBody::Actor { .. } => {}
            DeclarationBody::Occurrence { id, kind, producer, .. } => {
                let Some(p) = producer else { return };
                match self.scenario.subject_kind(&p.name) {
                    None => self.error(
                        Code::Unresolved,
                        &[&p.name],
                        format!("unknown producer `{}`", p.name),
                        &p.span,
                    ),
                    Some(SubjectKind::Occurrence(_)) => self.error(
                        Code::BadProducer,
                        &[&id.name, &p.name],
                        format!("producer `{}` of `{}` is an occurrence, not an actor", p.name, id.name),
                        &p.span,
                    ),
                    Some(SubjectKind::Actor(actor_kind)) => {
                        if let Verdict::Invalid(reason) = validate_producer(*kind, actor_kind) {
                            self.error(
                                Code::BadProducer,
                                &[&id.name, &p.name],
                                format!(
                                    "`{}` ({}) cannot produce {} `{}`: {} [{}]",
                                    p.name,
                                    actor_kind,
                                    kind,
                                    id.name,
                                    reason.describe(),
                                    reason.code()
                                ),
                                &p.span,
                            );
                        }
                    }
                }
            }
            DeclarationBody::Causes { from, to } => {
                let ok_from = self.require_subject(from).is_some();
                let ok_to = self.require_occurrence(to).is_some();
                if !(ok_from && ok_to) {
                    return;
                }
                if from.name == to.name {
                    self.error(
                        Code::Cycle,
                        &[&from.name],
                        format!("`{}` cannot cause itself", from.name),
                        &d.span,
                    );
                    return;
                }
                let key = (from.name.clone(), to.name.clone());
                if !self.scenario.causes.insert(key.clone()) {
                    self.duplicate("causes statement", &d.span);
                } else {
                    self.scenario.spans.causes.insert(key, d.span.clone());
                }
            }
            DeclarationBody::Attribution {
                mode,
                sense,
                subject,
                occurrence,
            } => {
                let subject_kind = self.require_subject(subject);
                let occ_kind = self.require_occurrence(occurrence);
                let (Some(subject_kind), Some(occ_kind)) = (subject_kind, occ_kind) else {
                    return;
                };
                let attribution = Attribution::new(&subject.name, &occurrence.name, *sense, *mode);
                if let Verdict::Invalid(reason) = validate_attribution(subject_kind, *sense, occ_kind) {
                    if *mode == Mode::Asserted {
                        let code = if reason == Reason::LiabilityNeedsConsequence {
                            Code::LiabilityNonConsequence
                        } else {
                            Code::InvalidAttribution
                        };
                        self.error(
                            code,
                            &[&subject.name, &occurrence.name],
                            format!(
                                "invalid attribution `{attribution}`: {} [{}]",
                                reason.describe(),
                                reason.code()
                            ),
                            &d.span,
                        );
                        return;
                    }
                }
                if self.scenario.attributions.contains(&attribution) {
                    self.duplicate("attribution", &d.span);
                } else {
                    self.scenario
                        .spans
                        .attributions
                        .insert(attribution.clone(), d.span.clone());
                    self.scenario.attributions.insert(attribution);
                }
            }
            DeclarationBody::Fact {
                condition,
                subject,
                occurrence,
                value,
            } => {
                let ok_subject = self.require_actor(subject);
                let ok_occ = self.require_occurrence(occurrence).is_some();
                if !(ok_subject && ok_occ) {
                    return;
                }
                let key = FactKey::new(&subject.name, &occurrence.name, *condition);
                match self.scenario.facts.get(&key) {
                    Some(existing) if existing == value => self.duplicate("fact", &d.span),
                    Some(existing) => {
                        let msg = format!(
                            "conflicting facts for {condition}({}, {}): {existing} and {value}",
                            subject.name, occurrence.name
                        );
                        self.error(Code::DupFact, &[&subject.name, &occurrence.name], msg, &d.span);
                    }
                    None => {
                        self.scenario.facts.insert(key.clone(), *value);
                        self.scenario.spans.facts.insert(key, d.span.clone());
                    }
                }
            }
            DeclarationBody::Note { target, text } => {
                if self.require_subject(target).is_some()
                    && !self.scenario.notes.insert((target.name.clone(), text.clone()))
                {
                    self.duplicate("note", &d.span);
                }
            }
            DeclarationBody::Model(statements) => {
                self.model_seen = true;
                for s in statements {
                    self.model_statement(&s.body, &s.span);
                }
            }
        }
    }

    fn model_statement(&mut self, body: &ModelBody, span: &SourceSpan) {
        match body {
            ModelBody::Exogenous(vars) => {
                for v in vars {
                    if self.exogenous.contains_key(&v.name) {
                        self.duplicate(&format!("exogenous declaration of `{}`", v.name), &v.span);
                    } else {
                        self.exogenous.insert(v.name.clone(), v.span.clone());
                    }
                }
            }
            ModelBody::Equation { var, expr, refs } => match self.equations.get(&var.name) {
                Some((existing, _)) if existing == expr => {
                    self.duplicate(&format!("equation for `{}`", var.name), span)
                }
                Some(_) => self.error(
                    Code::Model,
                    &[&var.name],
                    format!("`{}` has more than one equation", var.name),
                    &var.span,
                ),
                None => {
                    self.equations
                        .insert(var.name.clone(), (expr.clone(), var.span.clone()));
                    self.refs.extend(refs.iter().cloned());
                }
            },
            ModelBody::Context(pairs) => {
                for (v, value) in pairs {
                    match self.context.get(&v.name) {
                        Some((existing, _)) if existing == value => {
                            self.duplicate(&format!("context value for `{}`", v.name), &v.span)
                        }
                        Some(_) => self.error(
                            Code::Model,
                            &[&v.name],
                            format!("conflicting context values for `{}`", v.name),
                            &v.span,
                        ),
                        None => {
                            self.context.insert(v.name.clone(), (*value, v.span.clone()));
                        }
                    }
                }
            }
            ModelBody::Bind { var, occurrence } => {
                if self.require_occurrence(occurrence).is_none() {
                    return;
                }
                if let Some((existing, _)) = self.bindings.get(&var.name) {
                    if existing == &occurrence.name {
                        self.duplicate(&format!("binding of `{}`", var.name), span);
                    } else {
                        let msg = format!("`{}` is bound to both `{existing}` and `{}`", var.name, occurrence.name);
                        self.error(Code::Model, &[&var.name], msg, &var.span);
                    }
                    return;
                }
                if let Some(other) = self.bound_occurrences.get(&occurrence.name) {
                    let msg = format!(
                        "occurrence `{}` is bound to both `{other}` and `{}`; bindings must be one-to-one",
                        occurrence.name, var.name
                    );
                    self.error(Code::Model, &[&occurrence.name], msg, &occurrence.span);
                    return;
                }
                self.bound_occurrences.insert(occurrence.name.clone(), var.name.clone());
                self.bindings
                    .insert(var.name.clone(), (occurrence.name.clone(), var.span.clone()));
            }
        }
    }

    fn finish_model(&mut self) {
        if !self.model_seen {
            return;
        }
        let before = self.diagnostics.len();
        let known = |v: &str, b: &Builder| b.exogenous.contains_key(v) || b.equations.contains_key(v);

        let exo: Vec<(String, SourceSpan)> = self.exogenous.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for (v, span) in &exo {
            if self.equations.contains_key(v) {
                self.error(
                    Code::Model,
                    &[v],
                    format!("`{v}` is declared exogenous and also has an equation"),
                    span,
                );
            } else if !self.context.contains_key(v) {
                self.error(
                    Code::Model,
                    &[v],
                    format!("exogenous variable `{v}` has no context value"),
                    span,
                );
            }
        }
        let ctx: Vec<(String, SourceSpan)> = self.context.iter().map(|(k, (_, s))| (k.clone(), s.clone())).collect();
        for (v, span) in &ctx {
            if !known(v, self) {
                self.error(
                    Code::UnknownVar,
                    &[v],
                    format!("unknown variable `{v}` in context"),
                    span,
                );
            } else if !self.exogenous.contains_key(v) {
                self.error(
                    Code::Model,
                    &[v],
                    format!("endogenous variable `{v}` cannot take a context value"),
                    span,
                );
            }
        }
        for r in std::mem::take(&mut self.refs) {
            if !known(&r.name, self) {
                self.error(
                    Code::UnknownVar,
                    &[&r.name],
                    format!("unknown variable `{}` in equation", r.name),
                    &r.span,
                );
            }
        }
        let binds: Vec<(String, SourceSpan)> = self.bindings.iter().map(|(k, (_, s))| (k.clone(), s.clone())).collect();
        for (v, span) in &binds {
            if !known(v, self) {
                self.error(Code::UnknownVar, &[v], format!("unknown variable `{v}` in bind"), span);
            }
        }
        if self.diagnostics[before..].iter().any(Diagnostic::is_error) {
            return;
        }
        let result = CausalModel::new(
            self.exogenous.keys().cloned().collect::<BTreeSet<_>>(),
            self.equations
                .iter()
                .map(|(k, (e, _))| (k.clone(), e.clone()))
                .collect(),
            self.context.iter().map(|(k, (b, _))| (k.clone(), *b)).collect(),
            self.bindings.iter().map(|(k, (o, _))| (k.clone(), o.clone())).collect(),
        );
        match result {
            Ok(model) => self.scenario.model = Some(model),
            Err(errors) => {
                for e in errors {
                    let (subject, span) = match &e {
                        CausalError::Cycle(path) => {
                            let first = path[0].clone();
                            let span = self.equations[&first].1.clone();
                            (first, span)
                        }
                        _ => {
                            let span = self
                                .exogenous
                                .values()
                                .next()
                                .cloned()
                                .unwrap_or_else(|| SourceSpan::new("", 1, 1, 0));
                            (String::new(), span)
                        }
                    };
                    self.error(e.code(), &[&subject], e.to_string(), &span);
                }
            }
        }
    }
}
