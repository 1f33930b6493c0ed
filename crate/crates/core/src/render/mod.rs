//! DOT output for a scenario and its analysis report.
//!
//! Conventions: AI-based systems are `component` nodes, humans ellipses,
//! institutions hexagons, occurrences boxes. Each sense has one colour.
//! Asserted or supported relations are solid, open claims dashed,
//! unsupported claims dotted; blocked claims are left out and listed in the
//! legend.

mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::analysis::{AnalysisReport, Assessment};
use crate::causal::CausalEdges;
use crate::diagnostic::{Code, Diagnostic};
use crate::model::{ActorKind, Mode, Scenario, Sense, SenseFamily};
use crate::rules::Status;

pub use validate::{validate_dot, DotSummary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    senses: BTreeSet<SenseFamily>,
    pub include_candidates: bool,
    pub legend: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            senses: SenseFamily::ALL.into_iter().collect(),
            include_candidates: true,
            legend: true,
        }
    }
}

impl RenderOptions {
    /// `None` when `senses` is empty.
    pub fn with_senses(senses: impl IntoIterator<Item = SenseFamily>) -> Option<Self> {
        let senses: BTreeSet<SenseFamily> = senses.into_iter().collect();
        if senses.is_empty() {
            return None;
        }
        Some(RenderOptions {
            senses,
            ..RenderOptions::default()
        })
    }

    pub fn senses(&self) -> &BTreeSet<SenseFamily> {
        &self.senses
    }
}

fn quote(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn shape(kind: ActorKind) -> &'static str {
    match kind {
        ActorKind::AiSystem => "component",
        ActorKind::Human => "ellipse",
        ActorKind::Institution => "hexagon",
    }
}

fn color(family: SenseFamily) -> &'static str {
    match family {
        SenseFamily::Causal => "black",
        SenseFamily::Role => "blue",
        SenseFamily::Liability => "red",
        SenseFamily::Moral => "darkgreen",
    }
}

fn edge_label(sense: Sense) -> String {
    let head = match sense.family() {
        SenseFamily::Causal => return "causally responsible for".into(),
        SenseFamily::Role => "role-responsibility",
        SenseFamily::Liability => "liable for",
        SenseFamily::Moral => "morally responsible for",
    };
    let text = sense.to_string();
    let sub = text
        .split_once('(')
        .map(|(_, rest)| rest.trim_end_matches(')'))
        .unwrap_or("");
    format!("{head}\n({sub})")
}

/// Drops every edge implied by a longer path, visiting edges in sorted
/// order.
fn transitive_reduction(edges: &CausalEdges) -> BTreeSet<(String, String)> {
    let mut kept: BTreeSet<(String, String)> = edges.iter().map(|(f, t, _)| (f.to_string(), t.to_string())).collect();
    let all: Vec<(String, String)> = kept.iter().cloned().collect();
    for edge in all {
        kept.remove(&edge);
        if !reachable(&kept, &edge.0, &edge.1) {
            kept.insert(edge);
        }
    }
    kept
}

fn reachable(edges: &BTreeSet<(String, String)>, from: &str, to: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from.to_string()];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if !seen.insert(n.clone()) {
            continue;
        }
        stack.extend(
            edges
                .range((n.clone(), String::new())..)
                .take_while(|(f, _)| *f == n)
                .map(|(_, t)| t.clone()),
        );
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Style {
    Solid,
    Dashed,
    Dotted,
}

impl Style {
    fn as_str(self) -> &'static str {
        match self {
            Style::Solid => "solid",
            Style::Dashed => "dashed",
            Style::Dotted => "dotted",
        }
    }

    fn of(a: &Assessment) -> Style {
        match (a.attribution.mode, a.status()) {
            (Mode::Asserted, _) | (_, Status::Supported) => Style::Solid,
            (_, Status::Open) => Style::Dashed,
            _ => Style::Dotted,
        }
    }
}

/// Compiles the network to DOT. Fails with `E_MISMATCH` when the report was
/// produced from a different scenario.
pub fn to_dot(scenario: &Scenario, report: &AnalysisReport, options: &RenderOptions) -> Result<String, Diagnostic> {
    let ids: BTreeSet<String> = scenario.ids().into_iter().map(String::from).collect();
    if &ids != report.ids() {
        let missing: Vec<&String> = ids.symmetric_difference(report.ids()).collect();
        return Err(Diagnostic::new(
            Code::Mismatch,
            format!(
                "report does not belong to this scenario; ids differ: {}",
                missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            ),
        ));
    }

    // (from, to, sense) -> style; one edge per key.
    let mut edges: BTreeMap<(String, String, Sense), Style> = BTreeMap::new();
    let mut blocked: Vec<String> = Vec::new();
    if options.senses.contains(&SenseFamily::Causal) {
        for (from, to) in transitive_reduction(&report.edges) {
            edges.insert((from, to, Sense::Causal), Style::Solid);
        }
    }
    for a in report.assessments() {
        let family = a.attribution.sense.family();
        if !options.senses.contains(&family) {
            continue;
        }
        if a.attribution.mode == Mode::Claimed && !options.include_candidates {
            continue;
        }
        if a.status() == Status::Blocked {
            let reason = a.ledger.blocked_reason().map(|r| r.code()).unwrap_or("");
            blocked.push(format!("{} [{reason}]", a.attribution));
            continue;
        }
        let key = (
            a.attribution.subject.clone(),
            a.attribution.occurrence.clone(),
            a.attribution.sense,
        );
        let style = Style::of(a);
        edges.entry(key).and_modify(|s| *s = (*s).min(style)).or_insert(style);
    }

    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&report.scenario)).unwrap();
    if scenario.actors().next().is_none() && scenario.occurrences().next().is_none() {
        out.push_str("}\n");
        return Ok(out);
    }
    out.push_str("  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\"];\n");
    for a in scenario.actors() {
        let label = format!("{}\n[{}]", a.display_label(), a.kind.display_name());
        writeln!(
            out,
            "  {} [shape={}, label={}];",
            quote(&a.id),
            shape(a.kind),
            quote(&label)
        )
        .unwrap();
    }
    for o in scenario.occurrences() {
        let label = format!("{}: {}", o.kind.display_name(), o.display_label());
        let extra = if o.harm { ", peripheries=2" } else { "" };
        writeln!(out, "  {} [shape=box, label={}{extra}];", quote(&o.id), quote(&label)).unwrap();
    }
    let mut ordered: Vec<(&(String, String, Sense), &Style)> = edges.iter().collect();
    ordered.sort_by(|(a, _), (b, _)| (&a.0, &a.1, a.2.family(), a.2).cmp(&(&b.0, &b.1, b.2.family(), b.2)));
    for ((from, to, sense), style) in ordered {
        writeln!(
            out,
            "  {} -> {} [label={}, color={}, fontcolor={}, style={}];",
            quote(from),
            quote(to),
            quote(&edge_label(*sense)),
            color(sense.family()),
            color(sense.family()),
            style.as_str()
        )
        .unwrap();
    }
    if options.legend {
        let mut text = String::from("Legend\\l");
        for line in [
            "component: AI-based system",
            "ellipse: individual human",
            "hexagon: institution",
            "box: occurrence (* marks machine outputs, double border marks harm)",
            "black: causally responsible for",
            "blue: role-responsibility",
            "red: liable for",
            "darkgreen: morally responsible for",
            "solid: asserted or supported",
            "dashed: open claim",
            "dotted: unsupported claim",
        ] {
            text.push_str(line);
            text.push_str("\\l");
        }
        if !blocked.is_empty() {
            text.push_str("blocked claims (not drawn):\\l");
            for b in &blocked {
                text.push_str("  ");
                text.push_str(&quote(b)[1..quote(b).len() - 1]);
                text.push_str("\\l");
            }
        }
        out.push_str("  subgraph cluster_legend {\n    label=\"Legend\";\n");
        writeln!(out, "    \"@legend\" [shape=note, label=\"{text}\"];").unwrap();
        out.push_str("  }\n");
    } else {
        for b in &blocked {
            writeln!(out, "  // blocked: {}", b.replace('\n', " ")).unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}
