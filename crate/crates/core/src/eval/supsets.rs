use std::collections::BTreeMap;

use super::traditional::guess_and_check;
use super::{EvalContext, EvalOutcome, EvaluationStrategy, FamilyResolver};
use crate::error::Result;
use crate::family::{Sigma, SupportFamily};
use crate::program::{BodyLiteral, ExternalAtom, Program, Rule};
use crate::semantics::{guessing_program, EvalStats};
use crate::solver::FamilySemantics;

/// Guessing program plus support-set constraints; guesses and minimality are
/// checked by family matching, without oracle calls.
pub struct SupportSets;

impl EvaluationStrategy for SupportSets {
    fn name(&self) -> &str {
        "supsets"
    }

    fn description(&self) -> &str {
        "guessing program with support-set constraints, checks by family matching"
    }

    fn evaluate(&self, ctx: &EvalContext) -> Result<EvalOutcome> {
        let atoms = ctx.atoms();
        let mut resolver = FamilyResolver::new(ctx.reg, ctx.families);
        let fams: BTreeMap<(ExternalAtom, Sigma), SupportFamily> = resolver
            .resolve_occurrences(ctx.program, &atoms)?
            .into_iter()
            .map(|(occ, f)| ((occ.atom, f.sigma), f))
            .collect();
        let (hat, map) = guessing_program(ctx.program);
        let mut rules: Vec<Rule> = hat.rules.iter().cloned().collect();
        for ((e, sigma), f) in &fams {
            let ea = &map[e].0;
            let guard = match sigma {
                Sigma::T => BodyLiteral::neg(ea.clone()),
                Sigma::F => BodyLiteral::pos(ea.clone()),
            };
            for s in &f.sets {
                let body = s
                    .pos
                    .iter()
                    .cloned()
                    .map(BodyLiteral::pos)
                    .chain(s.neg.iter().cloned().map(BodyLiteral::neg))
                    .chain([guard.clone()]);
                rules.push(Rule::new([], body));
            }
        }
        let hat = Program::new(rules);
        let mut chosen = BTreeMap::new();
        for ((e, _), f) in &fams {
            chosen.entry(e.clone()).or_insert(f);
        }
        let sem = FamilySemantics { families: chosen };
        let mut stats = EvalStats { setup_oracle_calls: resolver.setup_calls, ..Default::default() };
        let answer_sets = guess_and_check(ctx, &hat, &map, &sem, &mut stats)?;
        Ok(EvalOutcome { answer_sets, stats, notes: resolver.notes })
    }
}
