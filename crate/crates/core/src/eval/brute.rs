use super::{finish, EvalContext, EvalOutcome, EvaluationStrategy};
use crate::error::Result;
use crate::semantics::{answer_sets_brute, EvalStats};

/// Exhaustive reference enumeration over all assignments.
pub struct Brute;

impl EvaluationStrategy for Brute {
    fn name(&self) -> &str {
        "brute"
    }

    fn description(&self) -> &str {
        "reference enumeration of all assignments; oracle calls are not counted"
    }

    fn evaluate(&self, ctx: &EvalContext) -> Result<EvalOutcome> {
        let mut sets = finish(answer_sets_brute(ctx.program, ctx.universe, ctx.reg)?);
        if ctx.first_only {
            sets.truncate(1);
        }
        let stats = EvalStats { candidates_checked: sets.len() as u64, ..Default::default() };
        Ok(EvalOutcome { answer_sets: sets, stats, notes: vec!["brute mode does not count oracle calls".into()] })
    }
}
