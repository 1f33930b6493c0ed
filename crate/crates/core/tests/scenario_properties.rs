mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::{random_scenario, rng};
use respnet::analysis::{layered_analysis, AnalysisConfig, AnalysisReport};
use respnet::causal::{derive_causal_edges, NessConfig};
use respnet::diagnostic::{Code, Diagnostic};
use respnet::dsl;
use respnet::model::{
    ActorKind, Attribution, ConditionName, Evidence, FactKey, LiabilityKind, MoralKind, OccurrenceKind, RoleKind,
    Scenario, Sense, SenseFamily,
};
use respnet::render::{to_dot, validate_dot, RenderOptions};
use respnet::rules::{Evaluator, LedgerItem, Status};

fn build(source: &str) -> Scenario {
    let (scenario, diagnostics) = dsl::load("gen.resp", source);
    scenario.unwrap_or_else(|| panic!("generated scenario failed: {diagnostics:?}\n{source}"))
}

fn analyze(scenario: &Scenario) -> AnalysisReport {
    layered_analysis(scenario, "gen", AnalysisConfig::default())
}

/// Top-level statements of generated text; a model block stays whole.
fn statements(source: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut block: Option<String> = None;
    for line in source.lines() {
        if let Some(b) = block.as_mut() {
            b.push_str(line);
            b.push('\n');
            if line == "}" {
                out.push(block.take().unwrap());
            }
        } else if line.starts_with("model {") {
            block = Some(format!("{line}\n"));
        } else if !line.starts_with('#') {
            out.push(format!("{line}\n"));
        }
    }
    out
}

fn without_spans(diagnostics: &[Diagnostic]) -> Vec<(Code, Vec<String>, String)> {
    diagnostics
        .iter()
        .map(|d| (d.code, d.subjects.clone(), d.message.clone()))
        .collect()
}

type LedgerView = (Attribution, Status, Vec<(LedgerItem, Evidence)>);

fn ledgers(report: &AnalysisReport) -> Vec<LedgerView> {
    report
        .assessments()
        .map(|a| {
            (
                a.attribution.clone(),
                a.status(),
                a.ledger.entries.iter().map(|e| (e.item, e.value)).collect(),
            )
        })
        .collect()
}

fn dot_label(sense: Sense) -> String {
    let head = match sense.family() {
        SenseFamily::Causal => return "causally responsible for".into(),
        SenseFamily::Role => "role-responsibility",
        SenseFamily::Liability => "liable for",
        SenseFamily::Moral => "morally responsible for",
    };
    let text = sense.to_string();
    let sub = &text[text.find('(').unwrap() + 1..text.len() - 1];
    format!("{head}\\n({sub})")
}

proptest! {
    #![proptest_config(common::proptest_config(120))]

    #[test]
    fn serialize_round_trips(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let text = dsl::serialize(&scenario);
        let again = build(&text);
        prop_assert_eq!(&again, &scenario);
        prop_assert_eq!(dsl::serialize(&again), text);
    }

    #[test]
    fn declaration_order_does_not_matter(seed in any::<u64>()) {
        let source = random_scenario(seed);
        let mut parts = statements(&source);
        parts.shuffle(&mut rng(seed));
        let shuffled: String = parts.concat();
        let a = build(&source);
        let b = build(&shuffled);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(dsl::serialize(&a), dsl::serialize(&b));
        let (ra, rb) = (analyze(&a), analyze(&b));
        prop_assert_eq!(ledgers(&ra), ledgers(&rb));
        prop_assert_eq!(without_spans(&ra.diagnostics), without_spans(&rb.diagnostics));
    }

    #[test]
    fn supported_never_lacks_a_necessary_condition(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let report = analyze(&scenario);
        let evaluator = report.evaluator(&scenario);
        for a in report.assessments().filter(|a| a.status() == Status::Supported) {
            let entry = |item| a.ledger.value(item);
            match a.attribution.sense {
                Sense::Liability(_) => {
                    prop_assert_eq!(entry(LedgerItem::CauseOf), Some(Evidence::Met));
                    prop_assert_eq!(entry(LedgerItem::LegalDutyHeld), Some(Evidence::Met));
                }
                Sense::Moral(MoralKind::Attributability) => {
                    prop_assert_eq!(entry(LedgerItem::CauseOf), Some(Evidence::Met));
                }
                Sense::Moral(MoralKind::Accountability) => {
                    let att = evaluator.evaluate_triple(
                        &a.attribution.subject,
                        &a.attribution.occurrence,
                        Sense::Moral(MoralKind::Attributability),
                    );
                    prop_assert_eq!(att.overall, Status::Supported);
                    let duty = scenario.asserted().any(|r| {
                        r.subject == a.attribution.subject && r.sense == Sense::Role(RoleKind::MoralDuty)
                    });
                    let shortfall = scenario.fact(&a.attribution.subject, &a.attribution.occurrence, ConditionName::MoralShortfall);
                    prop_assert!(duty || shortfall == Evidence::Met);
                }
                Sense::Causal => prop_assert_eq!(entry(LedgerItem::CauseOf), Some(Evidence::Met)),
                Sense::Role(_) => {}
            }
        }
    }

    #[test]
    fn blocked_is_absorbing(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let edges = derive_causal_edges(&scenario, NessConfig::default()).unwrap();
        let blocked: Vec<&Attribution> = scenario
            .attributions()
            .filter(|a| Evaluator::new(&scenario, edges.clone()).evaluate(a).overall == Status::Blocked)
            .collect();
        for a in blocked {
            for value in Evidence::ALL {
                let mut s = scenario.clone();
                for c in ConditionName::ALL {
                    s = s.with_fact(FactKey::new(a.subject.clone(), a.occurrence.clone(), c), value);
                }
                prop_assert_eq!(Evaluator::new(&s, edges.clone()).evaluate(a).overall, Status::Blocked);
            }
        }
    }

    #[test]
    fn upgrading_any_fact_never_lowers_a_status(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let edges = derive_causal_edges(&scenario, NessConfig::default()).unwrap();
        let status = |s: &Scenario| -> BTreeMap<Attribution, Status> {
            let e = Evaluator::new(s, edges.clone());
            s.attributions().map(|a| (a.clone(), e.evaluate(a).overall)).collect()
        };
        let base = status(&scenario);
        for a in scenario.attributions() {
            for c in ConditionName::ALL {
                let current = scenario.fact(&a.subject, &a.occurrence, c);
                for up in Evidence::ALL.into_iter().filter(|v| *v > current) {
                    let after = status(&scenario.with_fact(FactKey::new(a.subject.clone(), a.occurrence.clone(), c), up));
                    for (attr, before) in &base {
                        prop_assert!(after[attr] >= *before, "{} fell from {} to {}", attr, before, after[attr]);
                    }
                }
            }
        }
    }

    #[test]
    fn detectors_fire_on_the_right_kinds(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let report = analyze(&scenario);
        for d in &report.diagnostics {
            let first = d.subjects.first().map(String::as_str).unwrap_or("");
            match d.code {
                Code::LiabilitySink | Code::CrumpleZone => {
                    prop_assert_eq!(scenario.actor(first).map(|a| a.kind), Some(ActorKind::Human));
                }
                Code::ResponsibilityGap => {
                    let o = scenario.occurrence(first).unwrap();
                    prop_assert!(o.harm && o.kind == OccurrenceKind::Consequence);
                }
                Code::UncoveredMachine => {
                    prop_assert!(scenario.occurrence(first).unwrap().kind.is_machine());
                }
                _ => {}
            }
        }
        prop_assert_eq!(&report.diagnostics, &analyze(&scenario).diagnostics);
    }

    #[test]
    fn losing_a_fact_never_closes_a_gap(seed in any::<u64>()) {
        let scenario = build(&random_scenario(seed));
        let gaps = |s: &Scenario| -> Vec<Vec<String>> {
            analyze(s)
                .diagnostics
                .into_iter()
                .filter(|d| d.code == Code::ResponsibilityGap)
                .map(|d| d.subjects)
                .collect()
        };
        let before = gaps(&scenario);
        let keys: Vec<FactKey> = scenario
            .facts()
            .map(|f| FactKey::new(f.subject.clone(), f.occurrence.clone(), f.condition))
            .collect();
        for key in keys {
            let after = gaps(&scenario.without_fact(&key));
            for g in &before {
                prop_assert!(after.contains(g), "removing {:?} closed gap {:?}", key, g);
            }
        }
    }

    #[test]
    fn rendered_graphs_are_well_formed_and_complete(seed in any::<u64>(), mask in 1u8..16, candidates: bool, legend: bool) {
        let scenario = build(&random_scenario(seed));
        let report = analyze(&scenario);
        let families: Vec<SenseFamily> = SenseFamily::ALL
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| f)
            .collect();
        let mut options = RenderOptions::with_senses(families.clone()).unwrap();
        options.include_candidates = candidates;
        options.legend = legend;
        let dot = to_dot(&scenario, &report, &options).unwrap();
        prop_assert_eq!(&dot, &to_dot(&scenario, &report, &options).unwrap());
        let summary = validate_dot(&dot).map_err(|e| TestCaseError::fail(format!("{e}\n{dot}")))?;
        prop_assert!(summary.directed);

        for a in report.assessments() {
            let family = a.attribution.sense.family();
            if !families.contains(&family)
                || (!candidates && a.attribution.mode == respnet::model::Mode::Claimed)
                || a.status() == Status::Blocked
            {
                continue;
            }
            let label = dot_label(a.attribution.sense);
            let count = summary
                .edges
                .iter()
                .filter(|(f, t, attrs)| *f == a.attribution.subject && *t == a.attribution.occurrence && attrs["label"] == label)
                .count();
            prop_assert_eq!(count, 1, "{} drawn {} times", a.attribution, count);
        }
        for (from, to, _) in &summary.edges {
            prop_assert_eq!(summary.node_statements.get(from), Some(&1));
            prop_assert_eq!(summary.node_statements.get(to), Some(&1));
        }
    }

    #[test]
    fn independent_statement_errors_are_all_reported(seed in any::<u64>(), k in 1usize..5) {
        let source = random_scenario(seed);
        let mut lines: Vec<String> = source.lines().map(String::from).collect();
        let mut inside = false;
        let mut candidates = Vec::new();
        for (i, l) in lines.iter().enumerate() {
            if l.starts_with("model {") { inside = true; }
            if !inside && !l.starts_with('#') { candidates.push(i); }
            if l == "}" { inside = false; }
        }
        let mut r = rng(seed);
        let chosen: Vec<usize> = candidates.choose_multiple(&mut r, k).copied().collect();
        for (n, i) in chosen.iter().enumerate() {
            lines[*i] = if n % 2 == 0 { format!("bogus {}", lines[*i]) } else { format!("${}", lines[*i]) };
        }
        let text = lines.join("\n");
        let (_, diagnostics) = dsl::parse(&text);
        prop_assert!(diagnostics.len() >= chosen.len(), "{} errors for {} broken statements", diagnostics.len(), chosen.len());
        for i in &chosen {
            prop_assert!(
                diagnostics.iter().any(|d| d.span.as_ref().is_some_and(|s| s.line == i + 1 && s.column == 1)),
                "no diagnostic at line {}", i + 1
            );
        }
    }
}

#[test]
fn mismatched_report_is_rejected() {
    let a = build("actor a kind human\noccurrence o kind action by a\n");
    let b = build("actor b kind human\n");
    let err = to_dot(&a, &analyze(&b), &RenderOptions::default()).unwrap_err();
    assert_eq!(err.code, Code::Mismatch);
}

#[test]
fn empty_scenario_renders_header_and_footer() {
    let s = build("");
    assert_eq!(
        to_dot(&s, &analyze(&s), &RenderOptions::default()).unwrap(),
        "digraph \"gen\" {\n}\n"
    );
    assert_eq!(dsl::serialize(&s), "");
}

#[test]
fn liability_sink_fires_for_a_burdened_operator() {
    let s = build(
        "actor op kind human\n\
         actor firm kind institution\n\
         occurrence act kind action by op\n\
         occurrence harm kind consequence harm\n\
         causes act -> harm\n\
         causes firm -> harm\n\
         attribute role(legal_duty) op for act\n\
         fact no_conflict(op, act) = unmet\n\
         claim liability(civil) op for harm\n\
         fact duty_owed(op, harm) = met\n",
    );
    let report = analyze(&s);
    let sink: Vec<&Diagnostic> = report
        .diagnostics
        .iter()
        .filter(|d| d.code == Code::LiabilitySink)
        .collect();
    assert_eq!(sink.len(), 1);
    assert_eq!(sink[0].subjects, ["op", "harm", "firm"]);
    assert!(report.has_code(Code::RoleConflict));

    let examined = build(&format!(
        "{}claim liability(civil) firm for harm\nfact breach(firm, harm) = met\n",
        dsl::serialize(&s)
    ));
    assert!(!analyze(&examined).has_code(Code::LiabilitySink));
}

#[test]
fn civil_without_branch_is_treated_as_negligence() {
    let s = build("actor op kind human\noccurrence harm kind consequence\nclaim liability(civil) op for harm\n");
    let report = analyze(&s);
    let a = report
        .find("op", "harm", Sense::Liability(LiabilityKind::Civil(None)))
        .unwrap();
    assert!(a
        .ledger
        .value(LedgerItem::Condition(ConditionName::BreachCausedHarm))
        .is_some());
}
