use super::{finish, layered_space, ordinary_answer_sets, restrict, EvalContext, EvalOutcome, EvaluationStrategy};
use crate::error::Result;
use crate::program::{AtomSet, Program};
use crate::semantics::{guessing_program, EvalStats, GuessMap};
use crate::solver::{reduct_rules, smaller_model, ExtSemantics, OracleSemantics, Space};

/// Guess replacement atoms, check each candidate against the oracles, then
/// check FLP minimality with oracle calls.
pub struct Traditional;

impl EvaluationStrategy for Traditional {
    fn name(&self) -> &str {
        "traditional"
    }

    fn description(&self) -> &str {
        "answer sets of the guessing program, compatibility and minimality checked by oracle calls"
    }

    fn evaluate(&self, ctx: &EvalContext) -> Result<EvalOutcome> {
        let (hat, map) = guessing_program(ctx.program);
        let sem = OracleSemantics::new(ctx.reg);
        for e in map.keys() {
            ctx.reg.get(&e.name)?;
        }
        let mut stats = EvalStats::default();
        let answer_sets = guess_and_check(ctx, &hat, &map, &sem, &mut stats)?;
        stats.oracle_calls = sem.calls.get();
        Ok(EvalOutcome { answer_sets, stats, notes: Vec::new() })
    }
}

/// Answer sets of `hat` that agree with `sem` on every guess and are minimal
/// models of the FLP reduct of the original program.
pub(crate) fn guess_and_check(
    ctx: &EvalContext,
    hat: &Program,
    map: &GuessMap,
    sem: &dyn ExtSemantics,
    stats: &mut EvalStats,
) -> Result<Vec<AtomSet>> {
    let originals = ctx.atoms();
    let space = layered_space(&originals, &hat.ordinary_atoms());
    let orig_space = Space::new(originals.iter().cloned().collect());
    let rules: Vec<_> = hat.rules.iter().collect();
    let mut out = Vec::new();
    let mut candidates = 0;
    let mut flp_checks = 0;
    let mut hat_checks = 0;
    ordinary_answer_sets(&space, &rules, &mut hat_checks, &mut |_, y| {
        candidates += 1;
        for (e, (ea, _)) in map {
            let preds = e.input_predicates();
            let ins: AtomSet = y.iter().filter(|a| preds.contains(a.predicate.as_str())).cloned().collect();
            if sem.eval(e, &ins)? != y.contains(ea) {
                return Ok(true);
            }
        }
        let yo = restrict(y, &originals);
        flp_checks += 1;
        let red = reduct_rules(ctx.program, &yo, sem)?;
        if smaller_model(&orig_space, &red, &orig_space.vals_of(&yo), sem)?.is_some() {
            return Ok(true);
        }
        out.push(yo);
        Ok(!ctx.first_only)
    })?;
    stats.candidates_checked += candidates;
    stats.minimality_checks += hat_checks + flp_checks;
    Ok(finish(out))
}
