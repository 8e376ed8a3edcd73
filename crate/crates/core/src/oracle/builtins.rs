use std::sync::Arc;

use super::Oracle;
use crate::program::{Atom, AtomSet, InputParam};

type EvalFn = dyn Fn(&AtomSet, &[InputParam], &[String]) -> bool + Send + Sync;

/// Oracle backed by a closure.
pub struct FnOracle {
    name: String,
    f: Box<EvalFn>,
}

impl FnOracle {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&AtomSet, &[InputParam], &[String]) -> bool + Send + Sync + 'static,
    ) -> Self {
        FnOracle { name: name.into(), f: Box::new(f) }
    }
}

impl Oracle for FnOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, true_inputs: &AtomSet, inputs: &[InputParam], outputs: &[String]) -> bool {
        (self.f)(true_inputs, inputs, outputs)
    }
}

fn nth_pred(inputs: &[InputParam], n: usize) -> Option<&str> {
    inputs
        .iter()
        .filter_map(|p| match p {
            InputParam::Predicate(s) => Some(s.as_str()),
            InputParam::Constant(_) => None,
        })
        .nth(n)
}

fn any_over(y: &AtomSet, pred: Option<&str>) -> bool {
    pred.is_some_and(|p| y.iter().any(|a| a.predicate == p))
}

fn first_constant(inputs: &[InputParam]) -> Option<usize> {
    inputs.iter().find_map(|p| match p {
        InputParam::Constant(c) => c.parse().ok(),
        InputParam::Predicate(_) => None,
    })
}

/// The built-in library: id, neg, true, aOrNotB, atMostOne, diff, even, countGeq.
pub fn builtin_oracles() -> Vec<Arc<dyn Oracle>> {
    vec![
        Arc::new(FnOracle::new("id", |y, _, _| !y.is_empty())),
        Arc::new(FnOracle::new("neg", |y, _, _| y.is_empty())),
        Arc::new(FnOracle::new("true", |_, _, _| true)),
        Arc::new(FnOracle::new("aOrNotB", |y, ins, _| any_over(y, nth_pred(ins, 0)) || !any_over(y, nth_pred(ins, 1)))),
        Arc::new(FnOracle::new("atMostOne", |y, _, _| y.len() <= 1)),
        Arc::new(FnOracle::new("diff", |y, ins, outs| {
            let probe =
                |n| nth_pred(ins, n).map(|p| y.contains(&Atom { predicate: p.to_string(), args: outs.to_vec() }));
            probe(0) == Some(true) && probe(1) != Some(true)
        })),
        Arc::new(FnOracle::new("even", |y, _, _| y.len() % 2 == 0)),
        Arc::new(FnOracle::new("countGeq", |y, ins, _| y.len() >= first_constant(ins).unwrap_or(0))),
    ]
}
