//! Reference FLP semantics: classical models, answer sets by enumeration, the
//! guessing program, compatible sets and unfounded sets.

use std::collections::BTreeMap;

use crate::compiled::{Compiled, BRUTE_CAP};
use crate::error::Result;
use crate::oracle::OracleRegistry;
use crate::parser::AUX_PREFIX;
use crate::program::{Atom, AtomSet, BodyLiteral, ExternalAtom, Program, Rule};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EvalStats {
    /// Oracle calls made while solving.
    pub oracle_calls: u64,
    /// Candidates that reached the final checks.
    pub candidates_checked: u64,
    /// Searches for a smaller model of a reduct.
    pub minimality_checks: u64,
    /// Oracle calls spent deriving or verifying families before solving.
    pub setup_oracle_calls: u64,
}

/// All `Y ⊆ universe ∪ A(P)` satisfying every rule of `p`.
pub fn classical_models(p: &Program, universe: &AtomSet, reg: &OracleRegistry) -> Result<Vec<AtomSet>> {
    let c = Compiled::new(p, universe, reg, BRUTE_CAP)?;
    Ok(c.models()?.into_iter().map(|m| c.set_of(m)).collect())
}

/// Answer sets by exhaustive enumeration: models `Y` with no `Y' ⊊ Y`
/// satisfying fP^Y. Sorted in characteristic-vector order.
pub fn answer_sets_brute(p: &Program, universe: &AtomSet, reg: &OracleRegistry) -> Result<Vec<AtomSet>> {
    answer_sets_brute_cap(p, universe, reg, BRUTE_CAP)
}

pub fn answer_sets_brute_cap(
    p: &Program,
    universe: &AtomSet,
    reg: &OracleRegistry,
    cap: usize,
) -> Result<Vec<AtomSet>> {
    let c = Compiled::new(p, universe, reg, cap)?;
    Ok(c.answer_sets()?.into_iter().map(|m| c.set_of(m)).collect())
}

/// Replacement atoms `e` and `ne` for each distinct external atom.
pub type GuessMap = BTreeMap<ExternalAtom, (Atom, Atom)>;

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// P̂: external literals replaced by replacement atoms, plus `e v ne.` per
/// distinct external atom.
pub fn guessing_program(p: &Program) -> (Program, GuessMap) {
    let mut map = GuessMap::new();
    for (k, e) in p.externals().into_iter().enumerate() {
        let name = sanitize(&e.name);
        let ea = Atom { predicate: format!("{AUX_PREFIX}e_{}_{name}", k + 1), args: e.outputs.clone() };
        let na = Atom { predicate: format!("{AUX_PREFIX}ne_{}_{name}", k + 1), args: e.outputs.clone() };
        map.insert(e, (ea, na));
    }
    let mut rules: Vec<Rule> = p
        .rules
        .iter()
        .map(|r| {
            let body = r.body().iter().map(|l| match l.external() {
                Some(e) => {
                    let a = map[e].0.clone();
                    if l.negated {
                        BodyLiteral::neg(a)
                    } else {
                        BodyLiteral::pos(a)
                    }
                }
                None => l.clone(),
            });
            Rule::new(r.head.iter().cloned(), body)
        })
        .collect();
    for (e, ne) in map.values() {
        rules.push(Rule::new([e.clone(), ne.clone()], []));
    }
    (Program::new(rules), map)
}

/// Answer sets of P̂ whose guesses agree with the oracles. The returned sets
/// include the replacement atoms.
pub fn compatible_sets(p: &Program, universe: &AtomSet, reg: &OracleRegistry) -> Result<Vec<AtomSet>> {
    let (hat, map) = guessing_program(p);
    let none = OracleRegistry::empty();
    let mut out = Vec::new();
    for y in answer_sets_brute(&hat, universe, &none)? {
        let mut ok = true;
        for (e, (ea, _)) in &map {
            if reg.eval_external(e, &y)? != y.contains(ea) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(y);
        }
    }
    Ok(out)
}

/// Checks the unfounded-set conditions directly: every rule with a head atom
/// in `u` has a body literal false under `y` or under `y \ u`, or a head atom
/// outside `u` true under `y`.
pub fn is_unfounded_set(u: &AtomSet, p: &Program, y: &AtomSet, reg: &OracleRegistry) -> Result<bool> {
    let y_minus_u: AtomSet = y.difference(u).cloned().collect();
    for r in &p.rules {
        if r.head.is_disjoint(u) {
            continue;
        }
        if r.head.iter().any(|h| !u.contains(h) && y.contains(h)) {
            continue;
        }
        let mut false_somewhere = false;
        for l in r.body() {
            if !l.holds(y, reg)? || !l.holds(&y_minus_u, reg)? {
                false_somewhere = true;
                break;
            }
        }
        if !false_somewhere {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn s(xs: &[Atom]) -> AtomSet {
        xs.iter().cloned().collect()
    }

    fn a(x: &str) -> Atom {
        Atom::prop(x)
    }

    fn as_of(text: &str) -> Vec<AtomSet> {
        let reg = OracleRegistry::with_builtins();
        answer_sets_brute(&parse_program(text).unwrap(), &AtomSet::new(), &reg).unwrap()
    }

    #[test]
    fn id_program_has_empty_answer_set() {
        assert_eq!(as_of("p :- &id[p]()."), vec![AtomSet::new()]);
    }

    #[test]
    fn at_most_one_program() {
        let got = as_of("p(a) v p(b) :- &atMostOne[p]().");
        assert_eq!(got, vec![s(&[Atom::new("p", &["b"])]), s(&[Atom::new("p", &["a"])])]);
    }

    #[test]
    fn negated_neg_program() {
        assert_eq!(as_of("p :- not &neg[p]()."), vec![AtomSet::new()]);
    }

    #[test]
    fn classical_models_examples() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p :- &neg[p]().").unwrap();
        assert_eq!(classical_models(&p, &AtomSet::new(), &reg).unwrap(), vec![s(&[a("p")])]);
        let u = s(&[a("a"), a("b")]);
        assert_eq!(classical_models(&Program::default(), &u, &reg).unwrap().len(), 4);
        let c = parse_program(":- a.").unwrap();
        assert_eq!(classical_models(&c, &AtomSet::new(), &reg).unwrap(), vec![AtomSet::new()]);
    }

    #[test]
    fn guessing_program_shape() {
        let p = parse_program("p :- &id[p]().").unwrap();
        let (hat, map) = guessing_program(&p);
        assert!(hat.is_ordinary());
        assert_eq!(hat.len(), 2);
        let (e, ne) = map.values().next().unwrap();
        assert!(hat.rules.contains(&Rule::new([e.clone(), ne.clone()], [])));
        assert!(hat.rules.contains(&Rule::new([a("p")], [BodyLiteral::pos(e.clone())])));
        let q = parse_program("a :- b.").unwrap();
        assert_eq!(guessing_program(&q), (q, GuessMap::new()));
    }

    #[test]
    fn compatible_sets_of_id_program() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p :- &id[p]().").unwrap();
        let (_, map) = guessing_program(&p);
        let (e, ne) = map.values().next().unwrap().clone();
        let got = compatible_sets(&p, &AtomSet::new(), &reg).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&s(&[ne])));
        assert!(got.contains(&s(&[a("p"), e])));
    }

    #[test]
    fn compatible_sets_of_at_most_one() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p(a) v p(b) :- &atMostOne[p]().").unwrap();
        let (hat, map) = guessing_program(&p);
        let none = OracleRegistry::empty();
        let hat_as = answer_sets_brute(&hat, &AtomSet::new(), &none).unwrap();
        assert_eq!(hat_as.len(), 3);
        let compat = compatible_sets(&p, &AtomSet::new(), &reg).unwrap();
        assert_eq!(compat.len(), 2);
        let (_, ne) = map.values().next().unwrap();
        assert!(!compat.contains(&s(std::slice::from_ref(ne))));
    }

    #[test]
    fn unfounded_set_examples() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p :- &id[p]().").unwrap();
        assert!(is_unfounded_set(&s(&[a("p")]), &p, &s(&[a("p")]), &reg).unwrap());
        assert!(is_unfounded_set(&AtomSet::new(), &p, &s(&[a("p")]), &reg).unwrap());
        let q = parse_program("a :- &aOrNotB[a,b](). :- a.").unwrap();
        assert!(is_unfounded_set(&s(&[a("b")]), &q, &s(&[a("b")]), &reg).unwrap());
        let f = parse_program("p.").unwrap();
        assert!(!is_unfounded_set(&s(&[a("p")]), &f, &s(&[a("p")]), &reg).unwrap());
    }
}
