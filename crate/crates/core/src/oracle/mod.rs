//! External-source oracles and the name-keyed registry that resolves `&g`.

mod builtins;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{HexError, Result};
use crate::family::{Sigma, SupportFamily};
use crate::program::{Atom, AtomSet, ExtEnv, ExternalAtom, InputParam};

pub use builtins::{builtin_oracles, FnOracle};

/// Two-valued oracle function `f_&g`. Only atoms over the predicate inputs are
/// passed in `true_inputs`.
pub trait Oracle: Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, true_inputs: &AtomSet, inputs: &[InputParam], outputs: &[String]) -> bool;

    /// A known complete family for `ext` over `domain`, if the source can
    /// describe itself without brute force.
    fn support_family(&self, _ext: &ExternalAtom, _domain: &AtomSet, _sigma: Sigma) -> Option<SupportFamily> {
        None
    }
}

#[derive(Clone, Default)]
pub struct OracleRegistry {
    oracles: BTreeMap<String, Arc<dyn Oracle>>,
}

impl std::fmt::Debug for OracleRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleRegistry").field("oracles", &self.names()).finish()
    }
}

impl OracleRegistry {
    pub fn empty() -> Self {
        OracleRegistry::default()
    }

    pub fn with_builtins() -> Self {
        let mut reg = OracleRegistry::default();
        for o in builtin_oracles() {
            reg.register(o);
        }
        reg
    }

    pub fn register(&mut self, oracle: Arc<dyn Oracle>) {
        self.oracles.insert(oracle.name().to_string(), oracle);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn Oracle>> {
        self.oracles.get(name).ok_or_else(|| HexError::UnknownOracle(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.oracles.contains_key(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.oracles.keys().cloned().collect()
    }

    /// Oracle value of `e` under `y`, restricted to the input atoms of `e`.
    pub fn eval_external(&self, e: &ExternalAtom, y: &AtomSet) -> Result<bool> {
        let oracle = self.get(&e.name)?;
        let preds = e.input_predicates();
        let restricted: AtomSet = y.iter().filter(|a| preds.contains(a.predicate.as_str())).cloned().collect();
        Ok(oracle.eval(&restricted, &e.inputs, &e.outputs))
    }
}

impl ExtEnv for OracleRegistry {
    fn eval(&self, e: &ExternalAtom, y: &AtomSet) -> Result<bool> {
        self.eval_external(e, y)
    }
}

/// `&g'` obtained from `&g` by moving input position `position` from predicate
/// `original` to a fresh predicate `q` whose atoms `q(original, d...)` encode
/// `original(d...)`.
pub struct RenamedOracle {
    name: String,
    base: Arc<dyn Oracle>,
    position: usize,
    original: String,
    q: String,
}

impl RenamedOracle {
    pub fn new(base: Arc<dyn Oracle>, position: usize, original: &str, q: &str) -> Self {
        RenamedOracle {
            name: format!("{}'", base.name()),
            base,
            position,
            original: original.to_string(),
            q: q.to_string(),
        }
    }
}

impl Oracle for RenamedOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, true_inputs: &AtomSet, inputs: &[InputParam], outputs: &[String]) -> bool {
        let mut orig_inputs = inputs.to_vec();
        if let Some(slot) = orig_inputs.get_mut(self.position) {
            *slot = InputParam::Predicate(self.original.clone());
        }
        let orig_preds: std::collections::BTreeSet<&str> = orig_inputs
            .iter()
            .filter_map(|p| match p {
                InputParam::Predicate(s) => Some(s.as_str()),
                InputParam::Constant(_) => None,
            })
            .collect();
        let mut extended = AtomSet::new();
        for a in true_inputs {
            if a.predicate == self.q {
                if let Some((first, rest)) = a.args.split_first() {
                    if *first == self.original {
                        extended.insert(Atom { predicate: self.original.clone(), args: rest.to_vec() });
                    }
                }
            } else if orig_preds.contains(a.predicate.as_str()) {
                extended.insert(a.clone());
            }
        }
        self.base.eval(&extended, &orig_inputs, outputs)
    }
}
