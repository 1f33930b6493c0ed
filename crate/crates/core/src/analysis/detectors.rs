//! Trigger predicates for patterns of unjust or missing attribution. Each is
//! deliberately conservative and boolean; the messages say which
//! conditions fired so a reader can contest them.

use std::collections::BTreeSet;

use super::{AnalysisReport, Assessment};
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{ActorKind, Mode, MoralKind, OccurrenceKind, Scenario, Sense, SenseFamily};
use crate::rules::{ConditionName, Evidence, LedgerItem, Status};

fn actor_kind(scenario: &Scenario, id: &str) -> Option<ActorKind> {
    scenario.actor(id).map(|a| a.kind)
}

fn is_human(scenario: &Scenario, id: &str) -> bool {
    actor_kind(scenario, id) == Some(ActorKind::Human)
}

fn is_agent(scenario: &Scenario, id: &str) -> bool {
    actor_kind(scenario, id).is_some_and(ActorKind::is_agent)
}

/// True when every fact-backed element of the ledger is unknown.
fn elements_all_unknown(a: &Assessment) -> bool {
    a.ledger
        .entries
        .iter()
        .filter(|e| matches!(e.item, LedgerItem::Condition(_)))
        .all(|e| e.value == Evidence::Unknown)
}

fn span_of(scenario: &Scenario, a: &Assessment) -> Option<crate::diagnostic::SourceSpan> {
    scenario.span_of_attribution(&a.attribution).cloned()
}

/// W101: a human's liability stands while their role was over-demanding or
/// conflicted and an institution in the causal chain escapes examination.
pub fn detect_liability_sinks(scenario: &Scenario, report: &AnalysisReport) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for a in &report.liability {
        let human = &a.attribution.subject;
        let consequence = &a.attribution.occurrence;
        if !is_human(scenario, human) || a.status() < Status::Open {
            continue;
        }
        let burdened = report.role.iter().any(|r| {
            &r.attribution.subject == human
                && [ConditionName::Achievable, ConditionName::NoConflict].iter().any(|c| {
                    r.ledger
                        .value(LedgerItem::Condition(*c))
                        .is_some_and(|v| v != Evidence::Met)
                })
        });
        if !burdened {
            continue;
        }
        let unexamined: Vec<&str> = scenario
            .actors()
            .filter(|inst| inst.kind == ActorKind::Institution && report.edges.contains(&inst.id, consequence))
            .filter(|inst| {
                report
                    .liability
                    .iter()
                    .filter(|l| l.attribution.subject == inst.id && &l.attribution.occurrence == consequence)
                    .all(elements_all_unknown)
            })
            .map(|inst| inst.id.as_str())
            .collect();
        if unexamined.is_empty() {
            continue;
        }
        let mut subjects = vec![human.clone(), consequence.clone()];
        subjects.extend(unexamined.iter().map(|s| s.to_string()));
        out.push(
            Diagnostic::new(
                Code::LiabilitySink,
                format!(
                    "possible liability sink: {human} is held {} for {consequence} ({}) although their role was not shown to be achievable and free of conflict, while causally involved institutions {} are not examined for liability",
                    a.attribution.sense,
                    a.status(),
                    unexamined.join(", ")
                ),
            )
            .with_subjects(subjects)
            .with_span(span_of(scenario, a)),
        );
    }
    out
}

/// W102: a human is held accountable without established control or
/// knowledge while another actor's attributability is supported.
pub fn detect_crumple_zones(scenario: &Scenario, report: &AnalysisReport) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for a in &report.moral {
        if a.attribution.sense != Sense::Moral(MoralKind::Accountability) || !is_human(scenario, &a.attribution.subject)
        {
            continue;
        }
        let human = &a.attribution.subject;
        let occurrence = &a.attribution.occurrence;
        let weak: Vec<&str> = [ConditionName::Control, ConditionName::Knowledge]
            .into_iter()
            .filter(|c| scenario.fact(human, occurrence, *c) != Evidence::Met)
            .map(ConditionName::keyword)
            .collect();
        if weak.is_empty() {
            continue;
        }
        let others: BTreeSet<&str> = report
            .moral
            .iter()
            .filter(|m| {
                m.attribution.sense == Sense::Moral(MoralKind::Attributability)
                    && &m.attribution.occurrence == occurrence
                    && &m.attribution.subject != human
                    && m.status() == Status::Supported
            })
            .map(|m| m.attribution.subject.as_str())
            .collect();
        if others.is_empty() {
            continue;
        }
        let others: Vec<&str> = others.into_iter().collect();
        let mut subjects = vec![human.clone(), occurrence.clone()];
        subjects.extend(others.iter().map(|s| s.to_string()));
        out.push(
            Diagnostic::new(
                Code::CrumpleZone,
                format!(
                    "possible moral crumple zone: {human} is held accountable for {occurrence} with {} not established, while the occurrence is attributable to {}",
                    weak.join(" and "),
                    others.join(", ")
                ),
            )
            .with_subjects(subjects)
            .with_span(span_of(scenario, a)),
        );
    }
    out
}

/// W103: a harm with causal ancestry but no human or institution with
/// supported liability or accountability for it.
pub fn detect_responsibility_gaps(scenario: &Scenario, report: &AnalysisReport) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for harm in scenario
        .occurrences()
        .filter(|o| o.harm && o.kind == OccurrenceKind::Consequence)
    {
        let ancestors: BTreeSet<&str> = report.edges.predecessors(&harm.id).collect();
        if ancestors.is_empty() {
            continue;
        }
        let answered = report.liability.iter().chain(&report.moral).any(|a| {
            a.attribution.occurrence == harm.id
                && (a.attribution.sense.family() == SenseFamily::Liability
                    || a.attribution.sense == Sense::Moral(MoralKind::Accountability))
                && is_agent(scenario, &a.attribution.subject)
                && a.status() == Status::Supported
        });
        if answered {
            continue;
        }
        out.push(
            Diagnostic::new(
                Code::ResponsibilityGap,
                format!(
                    "possible responsibility gap: harm {} has {} causal contributor(s) but no human or institution with supported liability or moral accountability",
                    harm.id,
                    ancestors.len()
                ),
            )
            .with_subjects([harm.id.as_str()])
            .with_span(scenario.span_of_id(&harm.id).cloned()),
        );
    }
    out
}

/// Nearest bound ancestors of an occurrence through unbound model
/// variables, plus occurrences with a declared edge into it.
fn direct_parents<'a>(scenario: &'a Scenario, occurrence: &str) -> BTreeSet<&'a str> {
    let mut out: BTreeSet<&str> = scenario
        .causes()
        .filter(|(from, to)| *to == occurrence && scenario.occurrence(from).is_some())
        .map(|(from, _)| from)
        .collect();
    let Some(model) = scenario.model() else {
        return out;
    };
    let Some(var) = model.variable_bound_to(occurrence) else {
        return out;
    };
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&str> = model.parents(var).into_iter().collect();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        match model.bindings().get(v) {
            Some(occ) => {
                out.insert(occ.as_str());
            }
            None => stack.extend(model.parents(v)),
        }
    }
    out
}

/// W104: a machine output on a path to harm that no human or institution
/// holds an asserted role for, directly or through its direct parents.
pub fn detect_uncovered_machine_occurrences(scenario: &Scenario, report: &AnalysisReport) -> Vec<Diagnostic> {
    let harms: Vec<&str> = scenario
        .occurrences()
        .filter(|o| o.harm)
        .map(|o| o.id.as_str())
        .collect();
    let covered = |occ: &str| {
        scenario.attributions().any(|a| {
            a.mode == Mode::Asserted
                && a.occurrence == occ
                && a.sense.family() == SenseFamily::Role
                && is_agent(scenario, &a.subject)
        })
    };
    let mut out = Vec::new();
    for m in scenario.occurrences().filter(|o| o.kind.is_machine()) {
        let reached: Vec<&str> = harms
            .iter()
            .copied()
            .filter(|h| report.edges.reaches(&m.id, h))
            .collect();
        if reached.is_empty() {
            continue;
        }
        let parents = direct_parents(scenario, &m.id);
        if covered(&m.id) || parents.iter().any(|p| covered(p)) {
            continue;
        }
        out.push(
            Diagnostic::new(
                Code::UncoveredMachine,
                format!(
                    "uncovered machine output: {} contributes to harm {} but no human or institution holds a role for it or for its direct causes",
                    m.id,
                    reached.join(", ")
                ),
            )
            .with_subjects([m.id.as_str()])
            .with_span(scenario.span_of_id(&m.id).cloned()),
        );
    }
    out
}
