use super::{
    finish, layered_space, ordinary_answer_sets, restrict, EvalContext, EvalOutcome, EvaluationStrategy, FamilyResolver,
};
use crate::error::Result;
use crate::inliner::inline_all;
use crate::semantics::EvalStats;

/// Compiles every external atom away and solves the ordinary result.
pub struct Inlining;

impl EvaluationStrategy for Inlining {
    fn name(&self) -> &str {
        "inlining"
    }

    fn description(&self) -> &str {
        "inline all external atoms, then solve the ordinary program"
    }

    fn evaluate(&self, ctx: &EvalContext) -> Result<EvalOutcome> {
        let atoms = ctx.atoms();
        let mut resolver = FamilyResolver::new(ctx.reg, ctx.families);
        let fams = resolver.resolve_occurrences(ctx.program, &atoms)?;
        let res = inline_all(ctx.program, &fams, None)?;
        let space = layered_space(&atoms, &res.program.ordinary_atoms());
        let rules: Vec<_> = res.program.rules.iter().collect();
        let mut out = Vec::new();
        let mut checks = 0;
        ordinary_answer_sets(&space, &rules, &mut checks, &mut |_, y| {
            out.push(restrict(y, &atoms));
            Ok(!ctx.first_only)
        })?;
        let stats =
            EvalStats { minimality_checks: checks, setup_oracle_calls: resolver.setup_calls, ..Default::default() };
        Ok(EvalOutcome { answer_sets: finish(out), stats, notes: resolver.notes })
    }
}
