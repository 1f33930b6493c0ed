use std::fmt::Write;

use super::AnalysisReport;
use crate::model::{Attribution, LiabilityKind, Mode, MoralKind, RoleKind, Scenario, Sense};
use crate::rules::{ConditionLedger, Evidence, LedgerItem, Status};

/// The necessary-condition links a sense takes part in, as lines of text.
fn entailments(sense: Sense, ledger: &ConditionLedger, scenario: &Scenario, subject: &str) -> Vec<String> {
    let value = |item: LedgerItem| ledger.value(item).map(Evidence::keyword).unwrap_or("not evaluated");
    match sense {
        Sense::Causal => vec!["causal responsibility is necessary for liability and moral attributability".into()],
        Sense::Role(RoleKind::LegalDuty(_)) => vec!["a legal duty is necessary for liability".into()],
        Sense::Role(RoleKind::MoralDuty) => {
            vec!["a moral duty (or moral standard) is necessary for moral accountability".into()]
        }
        Sense::Role(RoleKind::Task) => Vec::new(),
        Sense::Liability(_) => vec![
            format!(
                "requires causal responsibility: cause-of is {}",
                value(LedgerItem::CauseOf)
            ),
            format!(
                "requires a legal duty: legal-duty-held is {}",
                value(LedgerItem::LegalDutyHeld)
            ),
        ],
        Sense::Moral(MoralKind::Attributability) => vec![
            format!(
                "requires causal responsibility: cause-of is {}",
                value(LedgerItem::CauseOf)
            ),
            "is necessary for moral accountability".into(),
        ],
        Sense::Moral(MoralKind::Accountability) => {
            let duty = scenario
                .asserted()
                .any(|a| a.subject == subject && a.sense == Sense::Role(RoleKind::MoralDuty));
            vec![
                format!("requires moral attributability: attributability is {}", value(LedgerItem::Attributability)),
                format!(
                    "requires a moral duty or a shortfall of an expected standard: moral duty {}, moral_shortfall is {}",
                    if duty { "held" } else { "not held" },
                    value(LedgerItem::Condition(crate::rules::ConditionName::MoralShortfall))
                ),
            ]
        }
    }
}

/// A deterministic rendering of one ledger: a header with the overall
/// status, one line per entry, then the entailments touched. A blocked
/// triple renders as a single line. Undeclared triples are evaluated
/// hypothetically.
pub fn explain(scenario: &Scenario, report: &AnalysisReport, subject: &str, occurrence: &str, sense: Sense) -> String {
    let declared = [Mode::Asserted, Mode::Claimed]
        .into_iter()
        .find(|m| scenario.contains_attribution(&Attribution::new(subject, occurrence, sense, *m)));
    let ledger = declared
        .and_then(|m| {
            let wanted = Attribution::new(subject, occurrence, sense, m);
            report.layer(sense.family()).iter().find(|a| a.attribution == wanted)
        })
        .map(|a| a.ledger.clone())
        .unwrap_or_else(|| report.evaluator(scenario).evaluate_triple(subject, occurrence, sense));
    let mode = declared.map(Mode::keyword).unwrap_or("hypothetical");
    let head = format!("{mode} {sense} {subject} for {occurrence}");

    if let Some(reason) = ledger.blocked_reason() {
        return format!("{head}: blocked [{}] {}\n", reason.code(), reason.describe());
    }
    let mut out = format!("{head}: {}\n", ledger.overall);
    let width = ledger
        .entries
        .iter()
        .map(|e| e.item.to_string().len())
        .max()
        .unwrap_or(0);
    for e in &ledger.entries {
        let decisive = if ledger.overall == Status::Unsupported && e.value == Evidence::Unmet {
            "  (decisive)"
        } else {
            ""
        };
        let item = e.item.to_string();
        writeln!(
            out,
            "  {item:<width$}  {:<7}  {}{decisive}",
            e.value.keyword(),
            e.source.as_str()
        )
        .unwrap();
    }
    for w in &ledger.warnings {
        writeln!(out, "  {}[{}]: {}", w.severity, w.code, w.message).unwrap();
    }
    let links = entailments(sense, &ledger, scenario, subject);
    if !links.is_empty() {
        out.push_str("entailments:\n");
        for l in links {
            writeln!(out, "  {l}").unwrap();
        }
    }
    if let Sense::Liability(LiabilityKind::Civil(None)) = sense {
        out.push_str("note: civil liability without a branch is evaluated as negligence\n");
    }
    out
}
