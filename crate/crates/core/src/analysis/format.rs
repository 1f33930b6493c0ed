use std::fmt::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use super::{AnalysisReport, Assessment, LayerOrder};
use crate::causal::EdgeOrigin;
use crate::diagnostic::Diagnostic;
use crate::model::{Mode, Sense, SenseFamily};
use crate::rules::{LedgerEntry, Status};

#[derive(Serialize)]
struct JsonEdge<'a> {
    from: &'a str,
    to: &'a str,
    origin: EdgeOrigin,
}

#[derive(Serialize)]
struct JsonAssessment<'a> {
    subject: &'a str,
    occurrence: &'a str,
    sense: Sense,
    mode: Mode,
    status: Status,
    ledger: &'a [LedgerEntry],
}

#[derive(Serialize)]
struct JsonClaim<'a> {
    subject: &'a str,
    occurrence: &'a str,
    sense: Sense,
    status: Status,
    ledger: &'a [LedgerEntry],
}

fn assessment(a: &Assessment) -> JsonAssessment<'_> {
    JsonAssessment {
        subject: &a.attribution.subject,
        occurrence: &a.attribution.occurrence,
        sense: a.attribution.sense,
        mode: a.attribution.mode,
        status: a.status(),
        ledger: &a.ledger.entries,
    }
}

#[derive(Serialize)]
struct CausalLayer<'a> {
    edges: Vec<JsonEdge<'a>>,
    assessments: Vec<JsonAssessment<'a>>,
}

#[derive(Serialize)]
struct PlainLayer<'a> {
    assessments: Vec<JsonAssessment<'a>>,
}

/// Layers keyed by family, in report order.
struct Layers<'a> {
    report: &'a AnalysisReport,
    families: &'a [SenseFamily],
}

impl Serialize for Layers<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        for (family, layer) in self.report.layers() {
            if !self.families.contains(&family) {
                continue;
            }
            let assessments: Vec<_> = layer.iter().map(assessment).collect();
            if family == SenseFamily::Causal {
                let edges = self
                    .report
                    .edges
                    .iter()
                    .map(|(from, to, origin)| JsonEdge { from, to, origin })
                    .collect();
                map.serialize_entry(family.keyword(), &CausalLayer { edges, assessments })?;
            } else {
                map.serialize_entry(family.keyword(), &PlainLayer { assessments })?;
            }
        }
        map.end()
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    scenario: &'a str,
    order: &'a str,
    layers: Layers<'a>,
    claims: Vec<JsonClaim<'a>>,
    diagnostics: &'a [Diagnostic],
}

/// Pretty-printed JSON with a fixed key order, newline-terminated.
pub fn to_json(report: &AnalysisReport, families: &[SenseFamily]) -> String {
    let claims = report
        .claims()
        .filter(|a| families.contains(&a.attribution.sense.family()))
        .map(|a| JsonClaim {
            subject: &a.attribution.subject,
            occurrence: &a.attribution.occurrence,
            sense: a.attribution.sense,
            status: a.status(),
            ledger: &a.ledger.entries,
        })
        .collect();
    let doc = JsonReport {
        scenario: &report.scenario,
        order: report.order.as_str(),
        layers: Layers { report, families },
        claims,
        diagnostics: &report.diagnostics,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// The JSON shape for a scenario that failed to build: no layers or claims,
/// only the diagnostics.
pub fn failure_json(name: &str, order: LayerOrder, diagnostics: &[Diagnostic]) -> String {
    #[derive(Serialize)]
    struct Empty {}
    #[derive(Serialize)]
    struct Failed<'a> {
        scenario: &'a str,
        order: &'a str,
        layers: Empty,
        claims: [(); 0],
        diagnostics: &'a [Diagnostic],
    }
    let doc = Failed {
        scenario: name,
        order: order.as_str(),
        layers: Empty {},
        claims: [],
        diagnostics,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("diagnostics serialize");
    text.push('\n');
    text
}

fn write_assessment(out: &mut String, a: &Assessment) {
    writeln!(out, "  {}: {}", a.attribution, a.status()).unwrap();
    for e in &a.ledger.entries {
        writeln!(out, "    {} = {} ({})", e.item, e.value, e.source.as_str()).unwrap();
    }
}

/// Plain-text report. Diagnostics are rendered against `file`.
pub fn to_text(report: &AnalysisReport, families: &[SenseFamily], file: &str) -> String {
    let mut out = String::new();
    writeln!(out, "scenario {} ({})", report.scenario, report.order.as_str()).unwrap();
    for (family, layer) in report.layers() {
        if !families.contains(&family) {
            continue;
        }
        writeln!(out, "\n[{}]", family.keyword()).unwrap();
        if family == SenseFamily::Causal {
            writeln!(out, "  edges:").unwrap();
            if report.edges.is_empty() {
                writeln!(out, "    (none)").unwrap();
            }
            for (from, to, origin) in report.edges.iter() {
                writeln!(out, "    {from} -> {to} [{}]", origin.as_str()).unwrap();
            }
        }
        if layer.is_empty() {
            writeln!(out, "  (no attributions)").unwrap();
        }
        for a in layer {
            write_assessment(&mut out, a);
        }
    }
    writeln!(out, "\n[diagnostics]").unwrap();
    if report.diagnostics.is_empty() {
        writeln!(out, "  (none)").unwrap();
    }
    for d in &report.diagnostics {
        writeln!(out, "  {}", d.render(file)).unwrap();
    }
    out
}
