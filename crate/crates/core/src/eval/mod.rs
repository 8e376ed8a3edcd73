//! Evaluation strategies, registered by name and selected at run time.

mod brute;
mod families;
mod inlining;
mod supsets;
mod traditional;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{HexError, Result};
use crate::family::SupportFamily;
use crate::oracle::OracleRegistry;
use crate::program::{cmp_charvec, AtomSet, Program, Rule};
use crate::semantics::EvalStats;
use crate::solver::{reduct_rules, search, smaller_model, NoExternals, Problem, SearchOptions, Space};

pub use brute::Brute;
pub use families::FamilyResolver;
pub use inlining::Inlining;
pub use supsets::SupportSets;
pub use traditional::Traditional;

/// Inputs shared by every strategy.
#[derive(Clone, Copy)]
pub struct EvalContext<'a> {
    pub program: &'a Program,
    /// Extra atoms beyond A(P).
    pub universe: &'a AtomSet,
    pub reg: &'a OracleRegistry,
    /// User-supplied families; missing ones are obtained from the oracles.
    pub families: &'a [SupportFamily],
    /// Stop at the least answer set.
    pub first_only: bool,
}

impl<'a> EvalContext<'a> {
    pub fn new(program: &'a Program, universe: &'a AtomSet, reg: &'a OracleRegistry) -> Self {
        EvalContext { program, universe, reg, families: &[], first_only: false }
    }

    /// `universe ∪ A(P)`.
    pub fn atoms(&self) -> AtomSet {
        let mut all = self.universe.clone();
        all.extend(self.program.ordinary_atoms());
        all
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalOutcome {
    /// Answer sets over `universe ∪ A(P)`, in characteristic-vector order.
    pub answer_sets: Vec<AtomSet>,
    pub stats: EvalStats,
    pub notes: Vec<String>,
}

pub trait EvaluationStrategy: Send + Sync {
    fn name(&self) -> &str;
    fn description(&self) -> &str;
    fn evaluate(&self, ctx: &EvalContext) -> Result<EvalOutcome>;
}

#[derive(Clone, Default)]
pub struct StrategyRegistry {
    strategies: BTreeMap<String, Arc<dyn EvaluationStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = StrategyRegistry::default();
        r.register(Arc::new(Traditional));
        r.register(Arc::new(SupportSets));
        r.register(Arc::new(Inlining));
        r.register(Arc::new(Brute));
        r
    }

    pub fn register(&mut self, s: Arc<dyn EvaluationStrategy>) {
        self.strategies.insert(s.name().to_string(), s);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn EvaluationStrategy>> {
        self.strategies.get(name).ok_or_else(|| HexError::UnknownStrategy {
            kind: "mode",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.strategies.keys().cloned().collect()
    }
}

/// The three solver configurations plus the reference enumerator.
pub const MODES: [&str; 4] = ["traditional", "supsets", "inlining", "brute"];

/// Runs the built-in strategy `mode`.
pub fn evaluate(
    p: &Program,
    universe: &AtomSet,
    reg: &OracleRegistry,
    families: &[SupportFamily],
    mode: &str,
    first_only: bool,
) -> Result<EvalOutcome> {
    let ctx = EvalContext { program: p, universe, reg, families, first_only };
    StrategyRegistry::with_builtins().get(mode)?.evaluate(&ctx)
}

/// Search space with `originals` first (sorted) and `aux` after, so solutions
/// come out ordered by their original part.
pub(crate) fn layered_space(originals: &AtomSet, aux: &AtomSet) -> Space {
    Space::new(originals.iter().chain(aux.iter().filter(|a| !originals.contains(a))).cloned().collect())
}

/// Answer sets of an ordinary program over `space`, in solution order: every
/// supported model without a smaller model of its reduct. `on_answer` returns
/// false to stop.
pub(crate) fn ordinary_answer_sets(
    space: &Space,
    rules: &[&Rule],
    minimality_checks: &mut u64,
    on_answer: &mut dyn FnMut(&[bool], &AtomSet) -> Result<bool>,
) -> Result<()> {
    let prob = Problem::new(space, rules.iter().copied());
    let opts = SearchOptions { require_support: true, ..Default::default() };
    let program = Program::new(rules.iter().map(|r| (*r).clone()));
    search(&prob, &NoExternals, &opts, &mut |vals| {
        let y = space.set_of(vals);
        *minimality_checks += 1;
        let red = reduct_rules(&program, &y, &NoExternals)?;
        if smaller_model(space, &red, vals, &NoExternals)?.is_some() {
            return Ok(true);
        }
        on_answer(vals, &y)
    })?;
    Ok(())
}

pub(crate) fn restrict(y: &AtomSet, keep: &AtomSet) -> AtomSet {
    y.intersection(keep).cloned().collect()
}

pub(crate) fn finish(mut sets: Vec<AtomSet>) -> Vec<AtomSet> {
    sets.sort_by(cmp_charvec);
    sets.dedup();
    sets
}
