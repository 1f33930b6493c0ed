//! Acyclic boolean structural causal models, the NESS test for actual
//! causation, the but-for comparison, and derivation of causal edges for a
//! scenario.
//!
//! Sufficiency is interventionist: a set of actual-world literals is
//! sufficient for an effect when fixing every literal by intervention yields
//! the effect under every assignment of the remaining exogenous variables.
//! A NESS cause is a necessary element of some such set.

mod edges;
mod expr;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostic::Code;

pub use edges::{declared_causal_edges, derive_causal_edges, CausalEdges, EdgeOrigin};
use expr::CompiledExpr;
pub use expr::Expr;

/// Default cap on the number of model variables for NESS enumeration.
pub const DEFAULT_MAX_VARS: usize = 20;

/// Masks are `u64`, so no cap can exceed this.
pub const HARD_MAX_VARS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CausalError {
    #[error("equations form a cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{0}` is declared both exogenous and by an equation")]
    DoublyDefined(String),
    #[error("exogenous variable `{0}` has no context value")]
    MissingContext(String),
    #[error("endogenous variable `{0}` cannot take a context value")]
    ContextOnEndogenous(String),
    #[error("occurrence `{occurrence}` is bound to both `{first}` and `{second}`")]
    NonInjectiveBinding {
        occurrence: String,
        first: String,
        second: String,
    },
    #[error("literal {0} does not hold in the actual world")]
    NotActual(Literal),
    #[error("candidate and effect are the same variable `{0}`")]
    CandidateIsEffect(String),
    #[error("the effect variable `{0}` cannot be part of the candidate set")]
    EffectInSet(String),
    #[error("variable `{0}` appears with both values in one literal set")]
    Contradictory(String),
    #[error("model has {count} variables, above the enumeration cap of {cap}")]
    TooLarge { count: usize, cap: usize },
}

impl CausalError {
    pub fn code(&self) -> Code {
        match self {
            CausalError::Cycle(_) => Code::Cycle,
            CausalError::UnknownVariable(_) => Code::UnknownVar,
            CausalError::NotActual(_) => Code::NotActual,
            CausalError::TooLarge { .. } => Code::TooLarge,
            _ => Code::Model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    pub variable: String,
    pub value: bool,
}

impl Literal {
    pub fn new(variable: impl Into<String>, value: bool) -> Self {
        Literal {
            variable: variable.into(),
            value,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NessVerdict {
    pub is_cause: bool,
    /// Minimum-cardinality sufficient set containing the candidate, sorted by
    /// variable; present iff `is_cause`.
    pub witness: Option<Vec<Literal>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NessConfig {
    pub max_vars: usize,
}

impl Default for NessConfig {
    fn default() -> Self {
        NessConfig {
            max_vars: DEFAULT_MAX_VARS,
        }
    }
}

impl NessConfig {
    pub fn with_max_vars(max_vars: usize) -> Self {
        NessConfig { max_vars }
    }

    fn effective_cap(self) -> usize {
        self.max_vars.min(HARD_MAX_VARS)
    }
}

/// A full assignment of every model variable.
pub type Assignment = BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    exogenous: BTreeSet<String>,
    equations: BTreeMap<String, Expr>,
    context: BTreeMap<String, bool>,
    bindings: BTreeMap<String, String>,
    compiled: Compiled,
}

/// Variables are indexed in lexicographic order, so index order is name
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Compiled {
    names: Vec<String>,
    exogenous: Vec<bool>,
    equations: Vec<Option<CompiledExpr>>,
    /// Endogenous variables in dependency order.
    order: Vec<usize>,
    parents: Vec<BTreeSet<usize>>,
    actual: Vec<bool>,
}

impl CausalModel {
    /// Checks every structural invariant and reports all violations.
    pub fn new(
        exogenous: BTreeSet<String>,
        equations: BTreeMap<String, Expr>,
        context: BTreeMap<String, bool>,
        bindings: BTreeMap<String, String>,
    ) -> Result<Self, Vec<CausalError>> {
        let mut errors = Vec::new();
        for v in &exogenous {
            if equations.contains_key(v) {
                errors.push(CausalError::DoublyDefined(v.clone()));
            }
            if !context.contains_key(v) {
                errors.push(CausalError::MissingContext(v.clone()));
            }
        }
        let known = |v: &str| exogenous.contains(v) || equations.contains_key(v);
        for v in context.keys() {
            if equations.contains_key(v) && !exogenous.contains(v) {
                errors.push(CausalError::ContextOnEndogenous(v.clone()));
            } else if !known(v) {
                errors.push(CausalError::UnknownVariable(v.clone()));
            }
        }
        for expr in equations.values() {
            for v in expr.variables() {
                if !known(v) {
                    errors.push(CausalError::UnknownVariable(v.to_string()));
                }
            }
        }
        let mut bound_to: BTreeMap<&str, &str> = BTreeMap::new();
        for (var, occ) in &bindings {
            if !known(var) {
                errors.push(CausalError::UnknownVariable(var.clone()));
            }
            if let Some(first) = bound_to.insert(occ, var) {
                errors.push(CausalError::NonInjectiveBinding {
                    occurrence: occ.clone(),
                    first: first.to_string(),
                    second: var.clone(),
                });
            }
        }
        if !errors.is_empty() {
            errors.sort_by_key(|e| e.to_string());
            errors.dedup();
            return Err(errors);
        }
        let compiled = Compiled::build(&exogenous, &equations, &context).map_err(|e| vec![e])?;
        Ok(CausalModel {
            exogenous,
            equations,
            context,
            bindings,
            compiled,
        })
    }

    pub fn exogenous(&self) -> &BTreeSet<String> {
        &self.exogenous
    }

    pub fn equations(&self) -> &BTreeMap<String, Expr> {
        &self.equations
    }

    pub fn context(&self) -> &BTreeMap<String, bool> {
        &self.context
    }

    /// Variable to occurrence id.
    pub fn bindings(&self) -> &BTreeMap<String, String> {
        &self.bindings
    }

    pub fn variable_bound_to(&self, occurrence: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(_, occ)| occ.as_str() == occurrence)
            .map(|(v, _)| v.as_str())
    }

    pub fn variables(&self) -> &[String] {
        &self.compiled.names
    }

    pub fn variable_count(&self) -> usize {
        self.compiled.names.len()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.index(var).is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.compiled.names.is_empty() && self.bindings.is_empty()
    }

    fn index(&self, var: &str) -> Option<usize> {
        self.compiled.names.binary_search_by(|n| n.as_str().cmp(var)).ok()
    }

    fn require(&self, var: &str) -> Result<usize, CausalError> {
        self.index(var)
            .ok_or_else(|| CausalError::UnknownVariable(var.to_string()))
    }

    /// Actual-world value of a variable.
    pub fn actual_value(&self, var: &str) -> Option<bool> {
        self.index(var).map(|i| self.compiled.actual[i])
    }

    /// Variables appearing directly in the equation of `var`.
    pub fn parents(&self, var: &str) -> BTreeSet<&str> {
        match self.index(var) {
            Some(i) => self.compiled.parents[i]
                .iter()
                .map(|&p| self.compiled.names[p].as_str())
                .collect(),
            None => BTreeSet::new(),
        }
    }

    pub fn ancestors(&self, var: &str) -> BTreeSet<&str> {
        match self.index(var) {
            Some(i) => self
                .compiled
                .ancestors(i)
                .into_iter()
                .map(|a| self.compiled.names[a].as_str())
                .collect(),
            None => BTreeSet::new(),
        }
    }

    /// Evaluates the model. Overridden variables take the override value and
    /// their equations are ignored; exogenous variables otherwise take their
    /// context value.
    pub fn evaluate(&self, overrides: &BTreeMap<String, bool>) -> Result<Assignment, CausalError> {
        let c = &self.compiled;
        let mut fixed: Vec<Option<bool>> = vec![None; c.names.len()];
        for (var, value) in overrides {
            fixed[self.require(var)?] = Some(*value);
        }
        let mut values = vec![false; c.names.len()];
        for i in 0..c.names.len() {
            if c.exogenous[i] {
                values[i] = fixed[i].unwrap_or(self.context[&c.names[i]]);
            }
        }
        for &i in &c.order {
            values[i] = match fixed[i] {
                Some(v) => v,
                None => c.equations[i].as_ref().unwrap().eval_slice(&values),
            };
        }
        Ok(c.names.iter().cloned().zip(values).collect())
    }

    fn check_actual(&self, literal: &Literal) -> Result<usize, CausalError> {
        let i = self.require(&literal.variable)?;
        if self.compiled.actual[i] != literal.value {
            return Err(CausalError::NotActual(literal.clone()));
        }
        Ok(i)
    }

    fn engine(&self, cap: usize) -> Result<Engine<'_>, CausalError> {
        let count = self.variable_count();
        if count > cap {
            return Err(CausalError::TooLarge { count, cap });
        }
        Ok(Engine::new(&self.compiled))
    }

    fn literal_mask(&self, set: &[Literal]) -> Result<(u64, u64), CausalError> {
        let mut mask = 0u64;
        let mut values = 0u64;
        for lit in set {
            let i = self.require(&lit.variable)?;
            let bit = 1u64 << i;
            if mask & bit != 0 && (values & bit != 0) != lit.value {
                return Err(CausalError::Contradictory(lit.variable.clone()));
            }
            mask |= bit;
            if lit.value {
                values |= bit;
            }
        }
        Ok((mask, values))
    }
}

/// True iff fixing every literal of `set` by intervention forces `effect`
/// under every assignment of the exogenous variables outside `set`.
pub fn is_sufficient(model: &CausalModel, set: &[Literal], effect: &Literal) -> Result<bool, CausalError> {
    let effect_index = model.require(&effect.variable)?;
    if set.iter().any(|l| l.variable == effect.variable) {
        return Err(CausalError::EffectInSet(effect.variable.clone()));
    }
    let engine = model.engine(HARD_MAX_VARS)?;
    let (mask, values) = model.literal_mask(set)?;
    Ok(engine.sufficient(mask, values, effect_index, effect.value))
}

/// The NESS test. Candidate sets range over actual-world literals (minus the
/// effect's own). The witness has minimum cardinality; ties go to the
/// lexicographically smallest sorted variable list.
pub fn ness_cause(
    model: &CausalModel,
    candidate: &Literal,
    effect: &Literal,
    config: NessConfig,
) -> Result<NessVerdict, CausalError> {
    let c = model.check_actual(candidate)?;
    let e = model.check_actual(effect)?;
    if c == e {
        return Err(CausalError::CandidateIsEffect(candidate.variable.clone()));
    }
    let engine = model.engine(config.effective_cap())?;
    let compiled = &model.compiled;
    let ancestors = compiled.ancestors(e);
    // Literals outside the effect's ancestry never change the effect, so no
    // minimum witness contains one and a non-ancestor is never necessary.
    if !ancestors.contains(&c) {
        return Ok(NessVerdict {
            is_cause: false,
            witness: None,
        });
    }
    let others: Vec<usize> = ancestors.into_iter().filter(|&a| a != c).collect();
    let actual_bits = compiled.actual_bits();
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let mut sufficient = |mask: u64| {
        *memo
            .entry(mask)
            .or_insert_with(|| engine.sufficient(mask, actual_bits & mask, e, effect.value))
    };
    let cbit = 1u64 << c;
    for k in 0..=others.len() {
        let mut found = None;
        for_each_combination(others.len(), k, |combo| {
            let rest: u64 = combo.iter().fold(0, |m, &i| m | 1u64 << others[i]);
            if sufficient(rest | cbit) && !sufficient(rest) {
                found = Some(rest | cbit);
                return false;
            }
            true
        });
        if let Some(mask) = found {
            let witness = (0..compiled.names.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| Literal::new(compiled.names[i].clone(), compiled.actual[i]))
                .collect();
            return Ok(NessVerdict {
                is_cause: true,
                witness: Some(witness),
            });
        }
    }
    Ok(NessVerdict {
        is_cause: false,
        witness: None,
    })
}

/// True iff intervening on the candidate's variable with the opposite value
/// makes the effect literal false.
pub fn but_for(model: &CausalModel, candidate: &Literal, effect: &Literal) -> Result<bool, CausalError> {
    model.check_actual(candidate)?;
    model.check_actual(effect)?;
    let overrides = BTreeMap::from([(candidate.variable.clone(), !candidate.value)]);
    let world = model.evaluate(&overrides)?;
    Ok(world[&effect.variable] != effect.value)
}

/// Calls `f` with each k-subset of `0..n` in lexicographic order; stops when
/// `f` returns false.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Compiled {
    fn build(
        exogenous: &BTreeSet<String>,
        equations: &BTreeMap<String, Expr>,
        context: &BTreeMap<String, bool>,
    ) -> Result<Self, CausalError> {
        let names: Vec<String> = exogenous
            .iter()
            .chain(equations.keys())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index_of = |v: &str| names.binary_search_by(|n| n.as_str().cmp(v)).unwrap();
        let n = names.len();
        let mut compiled_eqs = vec![None; n];
        let mut parents = vec![BTreeSet::new(); n];
        for (var, expr) in equations {
            let i = index_of(var);
            parents[i] = expr.variables().into_iter().map(index_of).collect();
            compiled_eqs[i] = Some(CompiledExpr::compile(expr, &index_of));
        }
        let is_exo: Vec<bool> = names.iter().map(|v| exogenous.contains(v)).collect();

        // Kahn's algorithm, smallest index first, for a deterministic order.
        let mut indegree: Vec<usize> = parents.iter().map(BTreeSet::len).collect();
        let mut children = vec![Vec::new(); n];
        for (i, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(i);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            if !is_exo[i] {
                order.push(i);
            }
            for &ch in &children[i] {
                indegree[ch] -= 1;
                if indegree[ch] == 0 {
                    ready.insert(ch);
                }
            }
        }
        let placed = order.len() + is_exo.iter().filter(|e| **e).count();
        if placed < n {
            let stuck: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] > 0).collect();
            return Err(CausalError::Cycle(find_cycle(&parents, &stuck, &names)));
        }

        let mut compiled = Compiled {
            names,
            exogenous: is_exo,
            equations: compiled_eqs,
            order,
            parents,
            actual: Vec::new(),
        };
        let mut actual = vec![false; n];
        for i in 0..n {
            if compiled.exogenous[i] {
                actual[i] = context[&compiled.names[i]];
            }
        }
        for &i in &compiled.order {
            actual[i] = compiled.equations[i].as_ref().unwrap().eval_slice(&actual);
        }
        compiled.actual = actual;
        Ok(compiled)
    }

    fn ancestors(&self, var: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.parents[var].iter().copied().collect();
        while let Some(p) = stack.pop() {
            if seen.insert(p) {
                stack.extend(self.parents[p].iter().copied());
            }
        }
        seen
    }

    fn actual_bits(&self) -> u64 {
        self.actual
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .fold(0, |m, (i, _)| m | 1u64 << i)
    }
}

/// Walks parent links inside the unplaced set until a variable repeats.
fn find_cycle(parents: &[BTreeSet<usize>], stuck: &BTreeSet<usize>, names: &[String]) -> Vec<String> {
    let start = *stuck.iter().next().unwrap();
    let mut path = vec![start];
    let mut current = start;
    loop {
        let next = *parents[current].iter().find(|p| stuck.contains(p)).unwrap();
        if let Some(pos) = path.iter().position(|&p| p == next) {
            let mut cycle: Vec<String> = path[pos..].iter().rev().map(|&i| names[i].clone()).collect();
            cycle.push(cycle[0].clone());
            return cycle;
        }
        path.push(next);
        current = next;
    }
}

/// Bitmask evaluator over at most 64 variables.
struct Engine<'a> {
    compiled: &'a Compiled,
    exo_mask: u64,
}

impl<'a> Engine<'a> {
    fn new(compiled: &'a Compiled) -> Self {
        let exo_mask = compiled
            .exogenous
            .iter()
            .enumerate()
            .filter(|(_, e)| **e)
            .fold(0, |m, (i, _)| m | 1u64 << i);
        Engine { compiled, exo_mask }
    }

    #[inline]
    fn eval(&self, fixed_mask: u64, fixed_values: u64, exo_values: u64) -> u64 {
        let mut bits = (exo_values & self.exo_mask & !fixed_mask) | (fixed_values & fixed_mask);
        for &i in &self.compiled.order {
            let bit = 1u64 << i;
            if fixed_mask & bit == 0 && self.compiled.equations[i].as_ref().unwrap().eval_bits(bits) {
                bits |= bit;
            }
        }
        bits
    }

    fn sufficient(&self, fixed_mask: u64, fixed_values: u64, effect: usize, effect_value: bool) -> bool {
        let free = self.exo_mask & !fixed_mask;
        let mut sub = 0u64;
        loop {
            let bits = self.eval(fixed_mask, fixed_values, sub);
            if (bits >> effect & 1 == 1) != effect_value {
                return false;
            }
            if sub == free {
                return true;
            }
            sub = sub.wrapping_sub(free) & free;
        }
    }
}
