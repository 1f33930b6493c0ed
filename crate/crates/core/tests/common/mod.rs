//! Shared test helpers: the shipped fixture, a naive NESS oracle written
//! without the engine's search, and seeded generators for random models and
//! random scenario text.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use respnet::causal::{CausalModel, Expr, Literal};
use respnet::model::{
    validate_attribution, validate_producer, ActorKind, ConditionName, Evidence, OccurrenceKind, Sense, SubjectKind,
};

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/maritime.resp")
}

pub fn fixture_source() -> String {
    std::fs::read_to_string(fixture_path()).expect("fixture is readable")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A model in plain data, evaluated by recursion rather than by the
/// engine's compiled form.
#[derive(Debug, Clone)]
pub struct NaiveModel {
    pub exogenous: Vec<String>,
    pub equations: BTreeMap<String, Expr>,
    pub context: BTreeMap<String, bool>,
}

fn eval_expr(e: &Expr, value: &mut dyn FnMut(&str) -> bool) -> bool {
    match e {
        Expr::Const(b) => *b,
        Expr::Var(v) => value(v),
        Expr::Not(inner) => !eval_expr(inner, value),
        Expr::And(items) => {
            let mut all = true;
            for i in items {
                all &= eval_expr(i, value);
            }
            all
        }
        Expr::Or(items) => {
            let mut any = false;
            for i in items {
                any |= eval_expr(i, value);
            }
            any
        }
    }
}

impl NaiveModel {
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self.exogenous.iter().chain(self.equations.keys()).cloned().collect();
        vars.sort();
        vars
    }

    fn value(&self, var: &str, overrides: &BTreeMap<String, bool>, memo: &mut BTreeMap<String, bool>) -> bool {
        if let Some(v) = overrides.get(var) {
            return *v;
        }
        if let Some(v) = memo.get(var) {
            return *v;
        }
        let v = match self.equations.get(var) {
            Some(e) => eval_expr(e, &mut |name| self.value(name, overrides, memo)),
            None => self.context[var],
        };
        memo.insert(var.to_string(), v);
        v
    }

    pub fn eval(&self, overrides: &BTreeMap<String, bool>) -> BTreeMap<String, bool> {
        let mut memo = BTreeMap::new();
        for v in self.variables() {
            self.value(&v, overrides, &mut memo);
        }
        for (k, v) in overrides {
            memo.insert(k.clone(), *v);
        }
        memo
    }

    pub fn actual(&self) -> BTreeMap<String, bool> {
        self.eval(&BTreeMap::new())
    }

    /// Fix the set, then try every assignment of the remaining exogenous
    /// variables.
    pub fn sufficient(&self, set: &[(String, bool)], effect: &(String, bool)) -> bool {
        let fixed: BTreeMap<String, bool> = set.iter().cloned().collect();
        let free: Vec<&String> = self.exogenous.iter().filter(|x| !fixed.contains_key(*x)).collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut overrides = fixed.clone();
            for (i, x) in free.iter().enumerate() {
                overrides.insert((*x).clone(), mask >> i & 1 == 1);
            }
            if self.eval(&overrides)[&effect.0] != effect.1 {
                return false;
            }
        }
        true
    }

    /// Every subset of actual literals (minus the effect) containing the
    /// candidate; returns the minimum-cardinality, lexicographically first
    /// witness.
    pub fn ness(&self, candidate: &str, effect: &str) -> Option<Vec<(String, bool)>> {
        self.ness_cached(candidate, effect, &mut HashMap::new())
    }

    /// As `ness`, with sufficiency results for one effect shared across
    /// calls through `cache`.
    pub fn ness_cached(
        &self,
        candidate: &str,
        effect: &str,
        cache: &mut HashMap<Vec<(String, bool)>, bool>,
    ) -> Option<Vec<(String, bool)>> {
        let actual = self.actual();
        let effect_lit = (effect.to_string(), actual[effect]);
        let mut sufficient = |set: &Vec<(String, bool)>| {
            if let Some(v) = cache.get(set) {
                return *v;
            }
            let v = self.sufficient(set, &effect_lit);
            cache.insert(set.clone(), v);
            v
        };
        let others: Vec<(String, bool)> = actual
            .iter()
            .filter(|(k, _)| k.as_str() != effect && k.as_str() != candidate)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let cand = (candidate.to_string(), actual[candidate]);
        let mut best: Option<Vec<(String, bool)>> = None;
        for mask in 0u64..(1u64 << others.len()) {
            let rest: Vec<(String, bool)> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| l.clone())
                .collect();
            let mut with = rest.clone();
            with.push(cand.clone());
            with.sort();
            if sufficient(&with) && !sufficient(&rest) {
                let better = match &best {
                    None => true,
                    Some(b) => (with.len(), &with) < (b.len(), b),
                };
                if better {
                    best = Some(with);
                }
            }
        }
        best
    }

    pub fn but_for(&self, candidate: &str, effect: &str) -> bool {
        let actual = self.actual();
        let overrides = BTreeMap::from([(candidate.to_string(), !actual[candidate])]);
        self.eval(&overrides)[effect] != actual[effect]
    }

    pub fn build(&self) -> CausalModel {
        CausalModel::new(
            self.exogenous.iter().cloned().collect(),
            self.equations.clone(),
            self.context.clone(),
            BTreeMap::new(),
        )
        .expect("generated model is well formed")
    }

    pub fn literal(&self, var: &str) -> Literal {
        Literal::new(var, self.actual()[var])
    }
}

pub fn literals(pairs: &[(String, bool)]) -> Vec<Literal> {
    pairs.iter().map(|(v, b)| Literal::new(v.clone(), *b)).collect()
}

pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[String], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.35) {
        if rng.gen_bool(0.07) {
            return Expr::Const(rng.gen());
        }
        return Expr::Var(vars.choose(rng).unwrap().clone());
    }
    match rng.gen_range(0..5) {
        0 => Expr::Not(Box::new(random_expr(rng, vars, depth - 1))),
        1 | 2 => Expr::And(
            (0..rng.gen_range(2..=3))
                .map(|_| random_expr(rng, vars, depth - 1))
                .collect(),
        ),
        _ => Expr::Or(
            (0..rng.gen_range(2..=3))
                .map(|_| random_expr(rng, vars, depth - 1))
                .collect(),
        ),
    }
}

/// An acyclic model over `v0..v{n-1}`: a prefix are exogenous, each later
/// variable depends on earlier ones only.
pub fn random_model(rng: &mut ChaCha8Rng, max_vars: usize) -> NaiveModel {
    let n = rng.gen_range(2..=max_vars);
    let exo = rng.gen_range(1..=(n - 1).min(6));
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut model = NaiveModel {
        exogenous: names[..exo].to_vec(),
        equations: BTreeMap::new(),
        context: BTreeMap::new(),
    };
    for x in &names[..exo] {
        model.context.insert(x.clone(), rng.gen_bool(0.7));
    }
    for i in exo..n {
        let expr = random_expr(rng, &names[..i], 2);
        model.equations.insert(names[i].clone(), expr);
    }
    model
}

const LABELS: &[&str] = &[
    "plain label",
    "with \\\"quotes\\\"",
    "back\\\\slash",
    "tab\\there",
    "two\\nlines",
    "Überfahrt",
    "",
];

fn condition_for(rng: &mut ChaCha8Rng) -> ConditionName {
    *ConditionName::ALL.choose(rng).unwrap()
}

/// Scenario text that builds without errors. Covers every declaration
/// kind; a model block is included about half the time.
pub fn random_scenario(seed: u64) -> String {
    let mut rng = rng(seed);
    let rng = &mut rng;
    let mut out = String::from("# generated\n");

    let n_actors = rng.gen_range(1..=5);
    let actors: Vec<(String, ActorKind)> = (0..n_actors)
        .map(|i| (format!("a{i}"), *ActorKind::ALL.choose(rng).unwrap()))
        .collect();
    for (id, kind) in &actors {
        let label = LABELS.choose(rng).unwrap();
        if label.is_empty() {
            writeln!(out, "actor {id} kind {}", kind.keyword()).unwrap();
        } else {
            writeln!(out, "actor {id} kind {} \"{label}\"", kind.keyword()).unwrap();
        }
    }

    let n_occ = rng.gen_range(1..=6);
    let mut occurrences: Vec<(String, OccurrenceKind)> = Vec::new();
    for i in 0..n_occ {
        let kind = *OccurrenceKind::ALL.choose(rng).unwrap();
        let id = format!("o{i}");
        let mut line = format!("occurrence {id} kind {}", kind.keyword());
        if kind != OccurrenceKind::Consequence && rng.gen_bool(0.7) {
            let producers: Vec<&(String, ActorKind)> = actors
                .iter()
                .filter(|(_, k)| validate_producer(kind, *k).is_valid())
                .collect();
            if let Some((p, _)) = producers.choose(rng) {
                write!(line, " by {p}").unwrap();
            }
        }
        if rng.gen_bool(0.5) {
            write!(line, " \"{}\"", LABELS.choose(rng).unwrap()).unwrap();
        }
        if kind == OccurrenceKind::Consequence && rng.gen_bool(0.6) {
            line.push_str(" harm");
        }
        writeln!(out, "{line}").unwrap();
        occurrences.push((id, kind));
    }

    if rng.gen_bool(0.5) {
        let model = random_model(rng, 6);
        out.push_str("model {\n");
        writeln!(out, "  exogenous {}", model.exogenous.join(", ")).unwrap();
        let ctx: Vec<String> = model.context.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        writeln!(out, "  context {}", ctx.join(", ")).unwrap();
        for (v, e) in &model.equations {
            writeln!(out, "  equation {v} = {e}").unwrap();
        }
        let mut vars = model.variables();
        vars.shuffle(rng);
        let mut occ_ids: Vec<&String> = occurrences.iter().map(|(id, _)| id).collect();
        occ_ids.shuffle(rng);
        for (v, o) in vars.iter().zip(occ_ids) {
            if rng.gen_bool(0.8) {
                writeln!(out, "  bind {v} -> {o}").unwrap();
            }
        }
        out.push_str("}\n");
    }

    let sources: Vec<String> = actors
        .iter()
        .map(|(id, _)| id.clone())
        .chain(occurrences.iter().map(|(id, _)| id.clone()))
        .collect();
    let mut causes = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=4) {
        let from = sources.choose(rng).unwrap();
        let (to, _) = occurrences.choose(rng).unwrap();
        if from != to {
            causes.insert((from.clone(), to.clone()));
        }
    }
    for (from, to) in &causes {
        writeln!(out, "causes {from} -> {to}").unwrap();
    }

    let senses = Sense::all();
    let mut triples = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=10) {
        let (subject, subject_kind) = if rng.gen_bool(0.85) {
            let (id, k) = actors.choose(rng).unwrap();
            (id.clone(), SubjectKind::Actor(*k))
        } else {
            let (id, k) = occurrences.choose(rng).unwrap();
            (id.clone(), SubjectKind::Occurrence(*k))
        };
        let (occ, occ_kind) = occurrences.choose(rng).unwrap();
        let sense = *senses.choose(rng).unwrap();
        if !triples.insert((subject.clone(), occ.clone(), sense)) {
            continue;
        }
        let valid = validate_attribution(subject_kind, sense, *occ_kind).is_valid();
        let word = if valid && rng.gen_bool(0.6) {
            "attribute"
        } else {
            "claim"
        };
        writeln!(out, "{word} {sense} {subject} for {occ}").unwrap();
    }

    let mut keys = BTreeSet::new();
    let pairs: Vec<(String, String)> = triples
        .iter()
        .filter(|(s, _, _)| actors.iter().any(|(id, _)| id == s))
        .map(|(s, o, _)| (s.clone(), o.clone()))
        .collect();
    for _ in 0..rng.gen_range(0..=12) {
        let (s, o) = if !pairs.is_empty() && rng.gen_bool(0.8) {
            pairs.choose(rng).unwrap().clone()
        } else {
            (
                actors.choose(rng).unwrap().0.clone(),
                occurrences.choose(rng).unwrap().0.clone(),
            )
        };
        let c = condition_for(rng);
        if keys.insert((s.clone(), o.clone(), c)) {
            let v = Evidence::ALL.choose(rng).unwrap();
            writeln!(out, "fact {}({s}, {o}) = {}", c.keyword(), v.keyword()).unwrap();
        }
    }

    if rng.gen_bool(0.4) {
        writeln!(
            out,
            "note {} \"{}\"",
            sources.choose(rng).unwrap(),
            LABELS.choose(rng).unwrap()
        )
        .unwrap();
    }
    out
}

/// Seeded cases only; failures are reported by seed, so nothing is
/// persisted.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
