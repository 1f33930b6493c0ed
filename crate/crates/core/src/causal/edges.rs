use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ness_cause, CausalError, Literal, NessConfig};
use crate::model::Scenario;

/// Where an edge came from. When the same edge arises several ways the
/// earliest variant is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOrigin {
    Declared,
    Ness,
    Producer,
}

impl EdgeOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeOrigin::Declared => "declared",
            EdgeOrigin::Ness => "ness",
            EdgeOrigin::Producer => "producer",
        }
    }

    pub fn is_derived(self) -> bool {
        self != EdgeOrigin::Declared
    }
}

/// Causal-responsibility edges from a subject (actor or occurrence) to an
/// occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CausalEdges {
    edges: BTreeMap<(String, String), EdgeOrigin>,
}

impl CausalEdges {
    fn add(&mut self, from: &str, to: &str, origin: EdgeOrigin) {
        self.edges
            .entry((from.to_string(), to.to_string()))
            .and_modify(|o| *o = (*o).min(origin))
            .or_insert(origin);
    }

    pub fn contains(&self, from: &str, to: &str) -> bool {
        self.origin(from, to).is_some()
    }

    pub fn origin(&self, from: &str, to: &str) -> Option<EdgeOrigin> {
        self.edges.get(&(from.to_string(), to.to_string())).copied()
    }

    /// Sorted by (from, to).
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, EdgeOrigin)> {
        self.edges.iter().map(|((f, t), o)| (f.as_str(), t.as_str(), *o))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn successors<'a>(&'a self, from: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.iter().filter(move |(f, _, _)| *f == from).map(|(_, t, _)| t)
    }

    pub fn predecessors<'a>(&'a self, to: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.iter().filter(move |(_, t, _)| *t == to).map(|(f, _, _)| f)
    }

    /// Whether `to` is reachable from `from` along one or more edges.
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(node) = stack.pop() {
            for next in self.successors(node) {
                if next == to {
                    return true;
                }
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        false
    }
}

/// Declared edges, NESS edges between bound occurrences that both occurred,
/// and producer edges lifting every occurrence-level edge to the actor that
/// produced its source.
pub fn derive_causal_edges(scenario: &Scenario, config: NessConfig) -> Result<CausalEdges, CausalError> {
    derive(scenario, Some(config))
}

/// Declared and producer edges only, ignoring the causal model. Used when
/// the model is too large to enumerate.
pub fn declared_causal_edges(scenario: &Scenario) -> CausalEdges {
    derive(scenario, None).expect("no enumeration without a model")
}

fn derive(scenario: &Scenario, config: Option<NessConfig>) -> Result<CausalEdges, CausalError> {
    let mut edges = CausalEdges::default();
    for (from, to) in scenario.causes() {
        edges.add(from, to, EdgeOrigin::Declared);
    }

    let mut non_actual: BTreeSet<&str> = BTreeSet::new();
    if let (Some(model), Some(config)) = (scenario.model(), config) {
        let actual: Vec<(&str, &str)> = model
            .bindings()
            .iter()
            .filter(|(var, occ)| {
                let holds = model.actual_value(var) == Some(true);
                if !holds {
                    non_actual.insert(occ.as_str());
                }
                holds
            })
            .map(|(var, occ)| (var.as_str(), occ.as_str()))
            .collect();
        for &(cause_var, cause_occ) in &actual {
            for &(effect_var, effect_occ) in &actual {
                if cause_var == effect_var {
                    continue;
                }
                let verdict = ness_cause(
                    model,
                    &Literal::new(cause_var, true),
                    &Literal::new(effect_var, true),
                    config,
                )?;
                if verdict.is_cause {
                    edges.add(cause_occ, effect_occ, EdgeOrigin::Ness);
                }
            }
        }
    }

    let occurrence_edges: Vec<(String, String)> = edges
        .iter()
        .filter(|(from, _, _)| scenario.occurrence(from).is_some())
        .map(|(f, t, _)| (f.to_string(), t.to_string()))
        .collect();
    for occurrence in scenario.occurrences() {
        if let Some(producer) = &occurrence.producer {
            if !non_actual.contains(occurrence.id.as_str()) {
                edges.add(producer, &occurrence.id, EdgeOrigin::Producer);
            }
        }
    }
    for (from, to) in occurrence_edges {
        if let Some(producer) = scenario.occurrence(&from).and_then(|o| o.producer.as_deref()) {
            edges.add(producer, &to, EdgeOrigin::Producer);
        }
    }
    Ok(edges)
}
