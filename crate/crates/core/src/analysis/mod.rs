//! The layered method over a scenario: causal edges first, then role,
//! liability and moral ledgers, then the detectors for liability sinks,
//! moral crumple zones, responsibility gaps and uncovered machine outputs.

mod detectors;
mod explain;
mod format;

use std::collections::BTreeSet;

use crate::causal::{declared_causal_edges, derive_causal_edges, CausalEdges, NessConfig};
use crate::diagnostic::{normalize, Code, Diagnostic};
use crate::dsl;
use crate::model::{Attribution, Mode, MoralKind, Scenario, Sense, SenseFamily};
use crate::rules::{ConditionLedger, Evaluator, Status};

pub use detectors::{
    detect_crumple_zones, detect_liability_sinks, detect_responsibility_gaps, detect_uncovered_machine_occurrences,
};
pub use explain::explain;
pub use format::{failure_json, to_json, to_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerOrder {
    #[default]
    CausalFirst,
    RoleFirst,
}

impl LayerOrder {
    pub fn families(self) -> [SenseFamily; 4] {
        match self {
            LayerOrder::CausalFirst => SenseFamily::ALL,
            LayerOrder::RoleFirst => [
                SenseFamily::Role,
                SenseFamily::Causal,
                SenseFamily::Liability,
                SenseFamily::Moral,
            ],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerOrder::CausalFirst => "causal-first",
            LayerOrder::RoleFirst => "role-first",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnalysisConfig {
    pub ness: NessConfig,
    pub order: LayerOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assessment {
    pub attribution: Attribution,
    pub ledger: ConditionLedger,
}

impl Assessment {
    pub fn status(&self) -> Status {
        self.ledger.overall
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub scenario: String,
    pub order: LayerOrder,
    pub edges: CausalEdges,
    /// False when the causal model was too large to enumerate.
    pub model_usable: bool,
    pub causal: Vec<Assessment>,
    pub role: Vec<Assessment>,
    pub liability: Vec<Assessment>,
    /// Attributability before accountability.
    pub moral: Vec<Assessment>,
    /// Sorted by severity, code, then subjects.
    pub diagnostics: Vec<Diagnostic>,
    ids: BTreeSet<String>,
}

impl AnalysisReport {
    pub fn layer(&self, family: SenseFamily) -> &[Assessment] {
        match family {
            SenseFamily::Causal => &self.causal,
            SenseFamily::Role => &self.role,
            SenseFamily::Liability => &self.liability,
            SenseFamily::Moral => &self.moral,
        }
    }

    /// Layers in report order.
    pub fn layers(&self) -> impl Iterator<Item = (SenseFamily, &[Assessment])> {
        self.order.families().into_iter().map(move |f| (f, self.layer(f)))
    }

    pub fn assessments(&self) -> impl Iterator<Item = &Assessment> {
        self.layers().flat_map(|(_, l)| l.iter())
    }

    pub fn find(&self, subject: &str, occurrence: &str, sense: Sense) -> Option<&Assessment> {
        self.layer(sense.family()).iter().find(|a| {
            a.attribution.subject == subject && a.attribution.occurrence == occurrence && a.attribution.sense == sense
        })
    }

    pub fn status(&self, attribution: &Attribution) -> Option<Status> {
        self.layer(attribution.sense.family())
            .iter()
            .find(|a| &a.attribution == attribution)
            .map(Assessment::status)
    }

    pub fn claims(&self) -> impl Iterator<Item = &Assessment> {
        self.assessments().filter(|a| a.attribution.mode == Mode::Claimed)
    }

    /// Actor and occurrence ids of the analyzed scenario.
    pub fn ids(&self) -> &BTreeSet<String> {
        &self.ids
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    pub fn has_code(&self, code: Code) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }

    /// An evaluator over the same edges, for ledgers of undeclared triples.
    pub fn evaluator<'a>(&self, scenario: &'a Scenario) -> Evaluator<'a> {
        if self.model_usable {
            Evaluator::new(scenario, self.edges.clone())
        } else {
            Evaluator::without_model(scenario, self.edges.clone())
        }
    }
}

fn moral_rank(a: &Assessment) -> u8 {
    match a.attribution.sense {
        Sense::Moral(MoralKind::Attributability) => 0,
        _ => 1,
    }
}

/// Runs every layer and every detector. Deterministic in the scenario
/// content.
pub fn layered_analysis(scenario: &Scenario, name: &str, config: AnalysisConfig) -> AnalysisReport {
    let mut diagnostics = Vec::new();
    let evaluator = match derive_causal_edges(scenario, config.ness) {
        Ok(edges) => Evaluator::new(scenario, edges),
        Err(e) => {
            diagnostics.push(Diagnostic::new(
                e.code(),
                format!("{e}; causal edges from the model are omitted"),
            ));
            Evaluator::without_model(scenario, declared_causal_edges(scenario))
        }
    };

    let mut report = AnalysisReport {
        scenario: name.to_string(),
        order: config.order,
        edges: evaluator.edges().clone(),
        model_usable: diagnostics.is_empty(),
        causal: Vec::new(),
        role: Vec::new(),
        liability: Vec::new(),
        moral: Vec::new(),
        diagnostics: Vec::new(),
        ids: scenario.ids().into_iter().map(String::from).collect(),
    };

    for attribution in scenario.attributions() {
        let ledger = evaluator.evaluate(attribution);
        diagnostics.extend(ledger.warnings.iter().cloned());
        let subjects = [attribution.subject.as_str(), attribution.occurrence.as_str()];
        let span = scenario.span_of_attribution(attribution).cloned();
        if let Some(reason) = ledger.blocked_reason() {
            diagnostics.push(
                Diagnostic::new(
                    Code::BlockedClaim,
                    format!("`{attribution}` is blocked: {} [{}]", reason.describe(), reason.code()),
                )
                .with_subjects(subjects)
                .with_span(span),
            );
        } else if attribution.mode == Mode::Asserted
            && attribution.sense.family() != SenseFamily::Role
            && ledger.overall < Status::Supported
        {
            diagnostics.push(
                Diagnostic::new(
                    Code::AssertedNotSupported,
                    format!("asserted `{attribution}` evaluates to {}", ledger.overall),
                )
                .with_subjects(subjects)
                .with_span(span),
            );
        }
        let assessment = Assessment {
            attribution: attribution.clone(),
            ledger,
        };
        match attribution.sense.family() {
            SenseFamily::Causal => report.causal.push(assessment),
            SenseFamily::Role => report.role.push(assessment),
            SenseFamily::Liability => report.liability.push(assessment),
            SenseFamily::Moral => report.moral.push(assessment),
        }
    }
    report.moral.sort_by(|a, b| {
        moral_rank(a)
            .cmp(&moral_rank(b))
            .then_with(|| a.attribution.cmp(&b.attribution))
    });

    diagnostics.extend(evaluator.check_entailments());
    diagnostics.extend(detect_liability_sinks(scenario, &report));
    diagnostics.extend(detect_crumple_zones(scenario, &report));
    diagnostics.extend(detect_responsibility_gaps(scenario, &report));
    diagnostics.extend(detect_uncovered_machine_occurrences(scenario, &report));
    normalize(&mut diagnostics);
    report.diagnostics = diagnostics;
    report
}

/// Parse, build, entailment checks. What `check` reports.
pub fn check_source(file: &str, source: &str, config: NessConfig) -> (Option<Scenario>, Vec<Diagnostic>) {
    let (scenario, mut diagnostics) = dsl::load(file, source);
    if let Some(s) = &scenario {
        let evaluator = match derive_causal_edges(s, config) {
            Ok(edges) => Evaluator::new(s, edges),
            Err(e) => {
                diagnostics.push(Diagnostic::new(e.code(), e.to_string()));
                Evaluator::without_model(s, declared_causal_edges(s))
            }
        };
        diagnostics.extend(evaluator.check_entailments());
    }
    normalize(&mut diagnostics);
    (scenario, diagnostics)
}

/// Parse, build and analyze. Build diagnostics are merged into the report,
/// so everything `check` reports appears here too.
pub fn analyze_source(
    file: &str,
    name: &str,
    source: &str,
    config: AnalysisConfig,
) -> Result<(Scenario, AnalysisReport), Vec<Diagnostic>> {
    let (scenario, build_diagnostics) = dsl::load(file, source);
    let Some(scenario) = scenario else {
        return Err(build_diagnostics);
    };
    let mut report = layered_analysis(&scenario, name, config);
    report.diagnostics.extend(build_diagnostics);
    normalize(&mut report.diagnostics);
    Ok((scenario, report))
}
