use std::collections::{BTreeMap, BTreeSet};

use super::{
    Actor, Attribution, ConditionFact, ConditionName, Evidence, FactKey, Mode, Occurrence, SenseFamily, SubjectKind,
};
use crate::causal::CausalModel;
use crate::diagnostic::SourceSpan;

/// A validated scenario. Only [`super::build_scenario`] constructs one, so
/// every reference resolves and every asserted attribution passes the
/// validity matrix.
///
/// Equality ignores source spans, so a scenario equals its re-parsed
/// serialization.
#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub(crate) actors: BTreeMap<String, Actor>,
    pub(crate) occurrences: BTreeMap<String, Occurrence>,
    pub(crate) causes: BTreeSet<(String, String)>,
    pub(crate) model: Option<CausalModel>,
    pub(crate) attributions: BTreeSet<Attribution>,
    pub(crate) facts: BTreeMap<FactKey, Evidence>,
    pub(crate) notes: BTreeSet<(String, String)>,
    pub(crate) spans: Spans,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Spans {
    pub(crate) ids: BTreeMap<String, SourceSpan>,
    pub(crate) attributions: BTreeMap<Attribution, SourceSpan>,
    pub(crate) facts: BTreeMap<FactKey, SourceSpan>,
    pub(crate) causes: BTreeMap<(String, String), SourceSpan>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.actors == other.actors
            && self.occurrences == other.occurrences
            && self.causes == other.causes
            && self.model == other.model
            && self.attributions == other.attributions
            && self.facts == other.facts
            && self.notes == other.notes
    }
}

impl Eq for Scenario {}

impl Scenario {
    pub fn is_empty(&self) -> bool {
        self.actors.is_empty()
            && self.occurrences.is_empty()
            && self.causes.is_empty()
            && self.model.is_none()
            && self.attributions.is_empty()
            && self.facts.is_empty()
            && self.notes.is_empty()
    }

    pub fn actors(&self) -> impl Iterator<Item = &Actor> {
        self.actors.values()
    }

    pub fn actor(&self, id: &str) -> Option<&Actor> {
        self.actors.get(id)
    }

    pub fn occurrences(&self) -> impl Iterator<Item = &Occurrence> {
        self.occurrences.values()
    }

    pub fn occurrence(&self, id: &str) -> Option<&Occurrence> {
        self.occurrences.get(id)
    }

    /// Every actor and occurrence id.
    pub fn ids(&self) -> BTreeSet<&str> {
        self.actors
            .keys()
            .chain(self.occurrences.keys())
            .map(String::as_str)
            .collect()
    }

    pub fn subject_kind(&self, id: &str) -> Option<SubjectKind> {
        if let Some(a) = self.actors.get(id) {
            Some(SubjectKind::Actor(a.kind))
        } else {
            self.occurrences.get(id).map(|o| SubjectKind::Occurrence(o.kind))
        }
    }

    /// Declared `causes` edges.
    pub fn causes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.causes.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn model(&self) -> Option<&CausalModel> {
        self.model.as_ref()
    }

    pub fn attributions(&self) -> impl Iterator<Item = &Attribution> {
        self.attributions.iter()
    }

    pub fn attributions_in(&self, family: SenseFamily) -> impl Iterator<Item = &Attribution> {
        self.attributions.iter().filter(move |a| a.sense.family() == family)
    }

    pub fn asserted(&self) -> impl Iterator<Item = &Attribution> {
        self.attributions.iter().filter(|a| a.mode == Mode::Asserted)
    }

    pub fn contains_attribution(&self, attribution: &Attribution) -> bool {
        self.attributions.contains(attribution)
    }

    /// Evidence for a condition; `Unknown` when no fact is recorded.
    pub fn fact(&self, subject: &str, occurrence: &str, condition: ConditionName) -> Evidence {
        self.fact_if_declared(subject, occurrence, condition)
            .unwrap_or_default()
    }

    pub fn fact_if_declared(&self, subject: &str, occurrence: &str, condition: ConditionName) -> Option<Evidence> {
        self.facts.get(&FactKey::new(subject, occurrence, condition)).copied()
    }

    pub fn facts(&self) -> impl Iterator<Item = ConditionFact> + '_ {
        self.facts.iter().map(|(k, v)| ConditionFact {
            subject: k.subject.clone(),
            occurrence: k.occurrence.clone(),
            condition: k.condition,
            value: *v,
        })
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    /// (target id, text) pairs.
    pub fn notes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.notes.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn span_of_id(&self, id: &str) -> Option<&SourceSpan> {
        self.spans.ids.get(id)
    }

    pub fn span_of_attribution(&self, attribution: &Attribution) -> Option<&SourceSpan> {
        self.spans.attributions.get(attribution)
    }

    pub fn span_of_fact(&self, key: &FactKey) -> Option<&SourceSpan> {
        self.spans.facts.get(key)
    }

    /// A copy with one fact set. The key must name an existing actor and
    /// occurrence; otherwise the copy is returned unchanged.
    pub fn with_fact(&self, key: FactKey, value: Evidence) -> Scenario {
        let mut out = self.clone();
        if out.actors.contains_key(&key.subject) && out.occurrences.contains_key(&key.occurrence) {
            out.facts.insert(key, value);
        }
        out
    }

    /// A copy with one fact removed, so it reads as unknown.
    pub fn without_fact(&self, key: &FactKey) -> Scenario {
        let mut out = self.clone();
        out.facts.remove(key);
        out.spans.facts.remove(key);
        out
    }

    pub fn without_facts(&self) -> Scenario {
        let mut out = self.clone();
        out.facts.clear();
        out.spans.facts.clear();
        out
    }
}
