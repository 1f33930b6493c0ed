//! Condition ledgers for each sense of responsibility, folded under
//! three-valued evidence, and the necessary-condition entailment checks
//! between senses.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::causal::{CausalEdges, EdgeOrigin};
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{
    validate_attribution, Attribution, CivilBranch, LiabilityKind, MoralKind, Reason, RoleKind, Scenario, Sense,
    SubjectKind, Verdict,
};

pub use crate::model::{ConditionName, Evidence};

/// Ordered `Blocked < Unsupported < Open < Supported`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Blocked,
    Unsupported,
    Open,
    Supported,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Blocked => "blocked",
            Status::Unsupported => "unsupported",
            Status::Open => "open",
            Status::Supported => "supported",
        }
    }

    /// A nested ledger's overall as a single evidence value.
    pub fn as_evidence(self) -> Evidence {
        match self {
            Status::Supported => Evidence::Met,
            Status::Open => Evidence::Unknown,
            Status::Unsupported | Status::Blocked => Evidence::Unmet,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LedgerItem {
    Condition(ConditionName),
    /// Causal responsibility of the subject for the occurrence.
    CauseOf,
    /// The subject holds an asserted legal duty.
    LegalDutyHeld,
    /// Collapsed attributability ledger, inside accountability.
    Attributability,
    Validity(Reason),
}

impl fmt::Display for LedgerItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LedgerItem::Condition(c) => f.write_str(c.keyword()),
            LedgerItem::CauseOf => f.write_str("cause-of"),
            LedgerItem::LegalDutyHeld => f.write_str("legal-duty-held"),
            LedgerItem::Attributability => f.write_str("attributability"),
            LedgerItem::Validity(r) => write!(f, "validity({})", r.code()),
        }
    }
}

impl Serialize for LedgerItem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Where an entry's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Source {
    #[serde(rename = "fact")]
    Fact,
    #[serde(rename = "default-unknown")]
    Default,
    #[serde(rename = "declared-edge")]
    DeclaredEdge,
    #[serde(rename = "causal-engine")]
    CausalEngine,
    #[serde(rename = "attributions")]
    Attributions,
    #[serde(rename = "ledger")]
    Ledger,
    #[serde(rename = "validity-matrix")]
    ValidityMatrix,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Fact => "fact",
            Source::Default => "default-unknown",
            Source::DeclaredEdge => "declared-edge",
            Source::CausalEngine => "causal-engine",
            Source::Attributions => "attributions",
            Source::Ledger => "ledger",
            Source::ValidityMatrix => "validity-matrix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    #[serde(rename = "condition")]
    pub item: LedgerItem,
    pub value: Evidence,
    pub source: Source,
}

impl LedgerEntry {
    pub fn new(item: LedgerItem, value: Evidence, source: Source) -> Self {
        LedgerEntry { item, value, source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionLedger {
    pub entries: Vec<LedgerEntry>,
    pub overall: Status,
    /// Findings raised while evaluating: role-criterion warnings and fact
    /// conflicts.
    pub warnings: Vec<Diagnostic>,
}

impl ConditionLedger {
    /// Standard fold: unsupported if anything is unmet, open if anything is
    /// unknown, supported otherwise.
    pub fn fold(entries: Vec<LedgerEntry>) -> Self {
        let overall = fold(entries.iter().map(|e| e.value));
        ConditionLedger {
            entries,
            overall,
            warnings: Vec::new(),
        }
    }

    pub fn blocked(reason: Reason) -> Self {
        ConditionLedger {
            entries: vec![LedgerEntry::new(
                LedgerItem::Validity(reason),
                Evidence::Unmet,
                Source::ValidityMatrix,
            )],
            overall: Status::Blocked,
            warnings: Vec::new(),
        }
    }

    pub fn entry(&self, item: LedgerItem) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.item == item)
    }

    pub fn value(&self, item: LedgerItem) -> Option<Evidence> {
        self.entry(item).map(|e| e.value)
    }

    pub fn blocked_reason(&self) -> Option<Reason> {
        self.entries.iter().find_map(|e| match e.item {
            LedgerItem::Validity(r) => Some(r),
            _ => None,
        })
    }
}

pub fn fold(values: impl IntoIterator<Item = Evidence>) -> Status {
    match values.into_iter().min() {
        Some(Evidence::Unmet) => Status::Unsupported,
        Some(Evidence::Unknown) => Status::Open,
        _ => Status::Supported,
    }
}

fn role_warning(criterion: ConditionName) -> Code {
    match criterion {
        ConditionName::ClearlyStated => Code::RoleUnclear,
        ConditionName::ContextAppropriate => Code::RoleContext,
        ConditionName::Achievable => Code::RoleDemanding,
        _ => Code::RoleConflict,
    }
}

/// Evaluates attributions of one scenario against its causal edges.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    edges: CausalEdges,
    /// False when the model could not be enumerated, so "not an edge" is not
    /// evidence of non-causation.
    model_usable: bool,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, edges: CausalEdges) -> Self {
        Evaluator {
            scenario,
            edges,
            model_usable: true,
        }
    }

    /// Edges computed without the causal model; nothing is refuted by it.
    pub fn without_model(scenario: &'a Scenario, edges: CausalEdges) -> Self {
        Evaluator {
            scenario,
            edges,
            model_usable: false,
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn edges(&self) -> &CausalEdges {
        &self.edges
    }

    /// Whether the causal model speaks to (subject, occurrence): the target
    /// is bound, and the subject is bound or produces a bound occurrence.
    fn model_covers(&self, subject: &str, occurrence: &str) -> bool {
        let Some(model) = self.scenario.model().filter(|_| self.model_usable) else {
            return false;
        };
        if model.variable_bound_to(occurrence).is_none() {
            return false;
        }
        match self.scenario.subject_kind(subject) {
            Some(SubjectKind::Occurrence(_)) => model.variable_bound_to(subject).is_some(),
            Some(SubjectKind::Actor(_)) => self
                .scenario
                .occurrences()
                .any(|o| o.producer.as_deref() == Some(subject) && model.variable_bound_to(&o.id).is_some()),
            None => false,
        }
    }

    pub fn cause_of(&self, subject: &str, occurrence: &str) -> LedgerEntry {
        match self.edges.origin(subject, occurrence) {
            Some(EdgeOrigin::Declared) => LedgerEntry::new(LedgerItem::CauseOf, Evidence::Met, Source::DeclaredEdge),
            Some(_) => LedgerEntry::new(LedgerItem::CauseOf, Evidence::Met, Source::CausalEngine),
            None if self.model_covers(subject, occurrence) => {
                LedgerEntry::new(LedgerItem::CauseOf, Evidence::Unmet, Source::CausalEngine)
            }
            None => LedgerEntry::new(LedgerItem::CauseOf, Evidence::Unknown, Source::Default),
        }
    }

    fn fact_entry(&self, subject: &str, occurrence: &str, condition: ConditionName) -> LedgerEntry {
        match self.scenario.fact_if_declared(subject, occurrence, condition) {
            Some(v) => LedgerEntry::new(LedgerItem::Condition(condition), v, Source::Fact),
            None => LedgerEntry::new(LedgerItem::Condition(condition), Evidence::Unknown, Source::Default),
        }
    }

    pub fn evaluate_causal(&self, subject: &str, occurrence: &str) -> ConditionLedger {
        ConditionLedger::fold(vec![self.cause_of(subject, occurrence)])
    }

    /// Criteria, not conditions: an unmet criterion warns and leaves the
    /// ledger open.
    pub fn evaluate_role(&self, subject: &str, occurrence: &str) -> ConditionLedger {
        let entries: Vec<LedgerEntry> = ConditionName::ROLE_CRITERIA
            .iter()
            .map(|c| self.fact_entry(subject, occurrence, *c))
            .collect();
        let overall = if entries.iter().all(|e| e.value == Evidence::Met) {
            Status::Supported
        } else {
            Status::Open
        };
        let warnings = entries
            .iter()
            .filter(|e| e.value == Evidence::Unmet)
            .filter_map(|e| match e.item {
                LedgerItem::Condition(c) => Some(c),
                _ => None,
            })
            .map(|c| {
                Diagnostic::new(
                    role_warning(c),
                    format!("role criterion {c} is unmet for {subject} on {occurrence}"),
                )
                .with_subjects([subject, occurrence])
                .with_span(
                    self.scenario
                        .span_of_fact(&crate::model::FactKey::new(subject, occurrence, c))
                        .cloned(),
                )
            })
            .collect();
        ConditionLedger {
            entries,
            overall,
            warnings,
        }
    }

    pub fn evaluate_attributability(&self, subject: &str, occurrence: &str) -> ConditionLedger {
        ConditionLedger::fold(vec![
            self.cause_of(subject, occurrence),
            self.fact_entry(subject, occurrence, ConditionName::Control),
            self.fact_entry(subject, occurrence, ConditionName::Knowledge),
        ])
    }

    pub fn evaluate_accountability(&self, subject: &str, occurrence: &str) -> ConditionLedger {
        let attributability = self.evaluate_attributability(subject, occurrence).overall;
        ConditionLedger::fold(vec![
            LedgerEntry::new(
                LedgerItem::Attributability,
                attributability.as_evidence(),
                Source::Ledger,
            ),
            self.fact_entry(subject, occurrence, ConditionName::MoralShortfall),
        ])
    }

    fn legal_duty_held(&self, subject: &str) -> LedgerEntry {
        LedgerEntry::new(
            LedgerItem::LegalDutyHeld,
            Evidence::from_bool(self.has_asserted_role(subject, |r| matches!(r, RoleKind::LegalDuty(_)))),
            Source::Attributions,
        )
    }

    fn has_asserted_role(&self, subject: &str, pred: impl Fn(RoleKind) -> bool) -> bool {
        self.scenario
            .asserted()
            .any(|a| a.subject == subject && matches!(a.sense, Sense::Role(r) if pred(r)))
    }

    /// Occurrences the subject holds an asserted legal duty for.
    fn duty_occurrences(&self, subject: &str) -> BTreeSet<&'a str> {
        self.scenario
            .asserted()
            .filter(|a| a.subject == subject && matches!(a.sense, Sense::Role(RoleKind::LegalDuty(_))))
            .map(|a| a.occurrence.as_str())
            .collect()
    }

    /// What the causal model says about breach causing the harm, when it
    /// binds the harm and the subject's duty occurrences.
    fn derived_breach_caused_harm(&self, subject: &str, harm: &str) -> Option<bool> {
        let model = self.scenario.model().filter(|_| self.model_usable)?;
        model.variable_bound_to(harm)?;
        let duties = self.duty_occurrences(subject);
        let bound: Vec<&str> = duties
            .iter()
            .copied()
            .filter(|o| model.variable_bound_to(o).is_some())
            .collect();
        if bound.iter().any(|o| self.edges.contains(o, harm)) {
            Some(true)
        } else if !bound.is_empty() && bound.len() == duties.len() {
            Some(false)
        } else {
            None
        }
    }

    pub fn evaluate_civil(&self, subject: &str, occurrence: &str, branch: CivilBranch) -> ConditionLedger {
        let mut warnings = Vec::new();
        let mut entries = vec![
            self.cause_of(subject, occurrence),
            self.legal_duty_held(subject),
            self.fact_entry(subject, occurrence, ConditionName::DutyOwed),
            self.fact_entry(subject, occurrence, ConditionName::Breach),
        ];
        if branch == CivilBranch::Negligence {
            let fact = self.fact_entry(subject, occurrence, ConditionName::BreachCausedHarm);
            let entry = match self.derived_breach_caused_harm(subject, occurrence) {
                Some(derived) => {
                    let value = Evidence::from_bool(derived);
                    if fact.source == Source::Fact && fact.value != Evidence::Unknown && fact.value != value {
                        warnings.push(
                            Diagnostic::new(
                                Code::FactConflict,
                                format!(
                                    "fact breach_caused_harm({subject}, {occurrence}) = {} contradicts the causal model, which gives {value}",
                                    fact.value
                                ),
                            )
                            .with_subjects([subject, occurrence])
                            .with_span(
                                self.scenario
                                    .span_of_fact(&crate::model::FactKey::new(
                                        subject,
                                        occurrence,
                                        ConditionName::BreachCausedHarm,
                                    ))
                                    .cloned(),
                            ),
                        );
                    }
                    LedgerEntry::new(fact.item, value, Source::CausalEngine)
                }
                None => fact,
            };
            entries.push(entry);
        } else {
            entries.push(self.fact_entry(subject, occurrence, ConditionName::BasisEstablished));
        }
        entries.push(self.fact_entry(subject, occurrence, ConditionName::HarmInScope));
        let mut ledger = ConditionLedger::fold(entries);
        ledger.warnings = warnings;
        ledger
    }

    pub fn evaluate_criminal(&self, subject: &str, occurrence: &str) -> ConditionLedger {
        ConditionLedger::fold(vec![
            self.cause_of(subject, occurrence),
            self.legal_duty_held(subject),
            self.fact_entry(subject, occurrence, ConditionName::ActusReus),
            self.fact_entry(subject, occurrence, ConditionName::MensRea),
        ])
    }

    /// The ledger for any `(subject, occurrence, sense)`, declared or not.
    /// Subjects or occurrences missing from the scenario skip the validity
    /// check.
    pub fn evaluate_triple(&self, subject: &str, occurrence: &str, sense: Sense) -> ConditionLedger {
        let subject_kind = self.scenario.subject_kind(subject);
        let occ_kind = self.scenario.occurrence(occurrence).map(|o| o.kind);
        if let (Some(sk), Some(ok)) = (subject_kind, occ_kind) {
            if let Verdict::Invalid(reason) = validate_attribution(sk, sense, ok) {
                return ConditionLedger::blocked(reason);
            }
        }
        match sense {
            Sense::Causal => self.evaluate_causal(subject, occurrence),
            Sense::Role(_) => self.evaluate_role(subject, occurrence),
            Sense::Liability(LiabilityKind::Criminal) => self.evaluate_criminal(subject, occurrence),
            Sense::Liability(LiabilityKind::Civil(branch)) => {
                self.evaluate_civil(subject, occurrence, branch.unwrap_or(CivilBranch::Negligence))
            }
            Sense::Moral(MoralKind::Attributability) => self.evaluate_attributability(subject, occurrence),
            Sense::Moral(MoralKind::Accountability) => self.evaluate_accountability(subject, occurrence),
        }
    }

    pub fn evaluate(&self, attribution: &Attribution) -> ConditionLedger {
        self.evaluate_triple(&attribution.subject, &attribution.occurrence, attribution.sense)
    }

    pub fn derive_status(&self, attribution: &Attribution) -> Status {
        self.evaluate(attribution).overall
    }

    /// Necessary-condition checks on asserted attributions.
    pub fn check_entailments(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for a in self.scenario.asserted() {
            let span = self.scenario.span_of_attribution(a).cloned();
            let subjects = [a.subject.as_str(), a.occurrence.as_str()];
            let mut missing: Vec<String> = Vec::new();
            let code = match a.sense {
                Sense::Liability(_) => {
                    if self.cause_of(&a.subject, &a.occurrence).value != Evidence::Met {
                        missing.push(format!(
                            "{} is not established as a cause of {}",
                            a.subject, a.occurrence
                        ));
                    }
                    if self.legal_duty_held(&a.subject).value != Evidence::Met {
                        missing.push(format!("{} holds no legal duty", a.subject));
                    }
                    Code::EntailLiability
                }
                Sense::Moral(MoralKind::Accountability) => {
                    let attributability = self.evaluate_attributability(&a.subject, &a.occurrence).overall;
                    if attributability != Status::Supported {
                        missing.push(format!(
                            "attributability of {} to {} is {attributability}, not supported",
                            a.occurrence, a.subject
                        ));
                    }
                    let has_duty = self.has_asserted_role(&a.subject, |r| r == RoleKind::MoralDuty);
                    let shortfall = self
                        .scenario
                        .fact(&a.subject, &a.occurrence, ConditionName::MoralShortfall);
                    if !has_duty && shortfall != Evidence::Met {
                        missing.push(format!(
                            "{} holds no moral duty and no moral shortfall is established",
                            a.subject
                        ));
                    }
                    Code::EntailAccount
                }
                Sense::Moral(MoralKind::Attributability) => {
                    if self.cause_of(&a.subject, &a.occurrence).value != Evidence::Met {
                        missing.push(format!(
                            "{} is not established as a cause of {}",
                            a.subject, a.occurrence
                        ));
                    }
                    Code::EntailAttrib
                }
                Sense::Causal | Sense::Role(_) => continue,
            };
            if !missing.is_empty() {
                out.push(
                    Diagnostic::new(
                        code,
                        format!("asserted `{a}` lacks a necessary condition: {}", missing.join("; ")),
                    )
                    .with_subjects(subjects)
                    .with_span(span),
                );
            }
        }
        out
    }
}
