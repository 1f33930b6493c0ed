use std::fmt::Write;

use crate::model::{Mode, Scenario};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text: groups in a fixed order, each sorted, separated by a
/// blank line. An empty scenario serializes to the empty string.
pub fn serialize(scenario: &Scenario) -> String {
    let mut groups: Vec<String> = Vec::new();
    let mut group = String::new();

    for a in scenario.actors() {
        write!(group, "actor {} kind {}", a.id, a.kind).unwrap();
        if let Some(label) = &a.label {
            write!(group, " {}", quote(label)).unwrap();
        }
        group.push('\n');
    }
    groups.push(std::mem::take(&mut group));

    for o in scenario.occurrences() {
        write!(group, "occurrence {} kind {}", o.id, o.kind).unwrap();
        if let Some(p) = &o.producer {
            write!(group, " by {p}").unwrap();
        }
        if let Some(label) = &o.label {
            write!(group, " {}", quote(label)).unwrap();
        }
        if o.harm {
            group.push_str(" harm");
        }
        group.push('\n');
    }
    groups.push(std::mem::take(&mut group));

    if let Some(model) = scenario.model() {
        group.push_str("model {\n");
        if !model.exogenous().is_empty() {
            let vars: Vec<&str> = model.exogenous().iter().map(String::as_str).collect();
            writeln!(group, "  exogenous {}", vars.join(", ")).unwrap();
        }
        for (var, expr) in model.equations() {
            writeln!(group, "  equation {var} = {expr}").unwrap();
        }
        if !model.context().is_empty() {
            let pairs: Vec<String> = model.context().iter().map(|(v, b)| format!("{v} = {b}")).collect();
            writeln!(group, "  context {}", pairs.join(", ")).unwrap();
        }
        for (var, occ) in model.bindings() {
            writeln!(group, "  bind {var} -> {occ}").unwrap();
        }
        group.push_str("}\n");
    }
    groups.push(std::mem::take(&mut group));

    for (from, to) in scenario.causes() {
        writeln!(group, "causes {from} -> {to}").unwrap();
    }
    groups.push(std::mem::take(&mut group));

    for mode in [Mode::Asserted, Mode::Claimed] {
        for a in scenario.attributions().filter(|a| a.mode == mode) {
            writeln!(
                group,
                "{} {} {} for {}",
                mode.keyword(),
                a.sense,
                a.subject,
                a.occurrence
            )
            .unwrap();
        }
        groups.push(std::mem::take(&mut group));
    }

    for f in scenario.facts() {
        writeln!(group, "{f}").unwrap();
    }
    groups.push(std::mem::take(&mut group));

    for (target, text) in scenario.notes() {
        writeln!(group, "note {target} {}", quote(text)).unwrap();
    }
    groups.push(group);

    groups.retain(|g| !g.is_empty());
    groups.join("\n")
}
