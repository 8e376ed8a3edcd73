//! Compiles external atoms away: each occurrence is replaced by an auxiliary
//! atom defined through its support sets and a saturation gadget.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{HexError, Result};
use crate::family::{check_family, Sigma, SupportFamily, FAMILY_CAP};
use crate::oracle::{OracleRegistry, RenamedOracle};
use crate::parser::AUX_PREFIX;
use crate::program::{Atom, AtomSet, BodyLiteral, ExternalAtom, InputParam, Occurrence, Polarity, Program, Rule};

/// Bookkeeping for one inlined occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InliningStep {
    pub occurrence: Occurrence,
    pub index: usize,
    pub xe: Atom,
    pub nxe: Atom,
    /// Input atom to its bar atom.
    pub bars: BTreeMap<Atom, Atom>,
    pub family_size: usize,
    /// The family was used without checking it against an oracle.
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InliningResult {
    pub program: Program,
    pub steps: Vec<InliningStep>,
    pub introduced: AtomSet,
}

impl InliningResult {
    /// Y' minus the introduced atoms.
    pub fn project(&self, y: &AtomSet) -> AtomSet {
        project(y, self)
    }

    /// Comment header mapping auxiliary atoms to what they stand for.
    pub fn header(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!("% {} stands for {}\n", s.xe, s.occurrence));
            out.push_str(&format!("% {} stands for its complement\n", s.nxe));
            for (a, b) in &s.bars {
                out.push_str(&format!("% {b} stands for {a} false or {} true\n", s.xe));
            }
            if s.trusted {
                out.push_str(&format!(
                    "% family for {} ({} sets) was not verified against an oracle\n",
                    s.occurrence, s.family_size
                ));
            }
        }
        out
    }
}

pub fn project(y: &AtomSet, res: &InliningResult) -> AtomSet {
    y.difference(&res.introduced).cloned().collect()
}

fn xe_atom(k: usize) -> Atom {
    Atom::prop(format!("{AUX_PREFIX}xe_{k}"))
}

fn nxe_atom(k: usize) -> Atom {
    Atom::prop(format!("{AUX_PREFIX}nxe_{k}"))
}

fn bar_atom(k: usize, a: &Atom) -> Atom {
    Atom { predicate: format!("{AUX_PREFIX}bar_{k}__{}", a.predicate), args: a.args.clone() }
}

fn index_taken(p: &Program, k: usize) -> bool {
    let prefixes = [format!("{AUX_PREFIX}xe_{k}"), format!("{AUX_PREFIX}nxe_{k}"), format!("{AUX_PREFIX}bar_{k}__")];
    p.ordinary_atoms()
        .iter()
        .any(|a| a.predicate == prefixes[0] || a.predicate == prefixes[1] || a.predicate.starts_with(&prefixes[2]))
}

/// Rewrites one occurrence of `occ` in `p` with the family `fam`. With
/// `reg` holding the oracle, the family is checked first; otherwise it is
/// trusted and the step records that.
pub fn inline_one(
    p: &Program,
    occ: &Occurrence,
    fam: &SupportFamily,
    index: usize,
    reg: Option<&OracleRegistry>,
) -> Result<InliningResult> {
    let e = &occ.atom;
    let want = match occ.polarity {
        Polarity::Positive => Sigma::T,
        Polarity::Negated => Sigma::F,
    };
    if fam.sigma != want {
        return Err(HexError::FamilyPolarityMismatch {
            external: e.to_string(),
            expected: want.as_char(),
            found: fam.sigma.as_char(),
        });
    }
    let occs = p.occurrences();
    if occ.polarity == Polarity::Positive && occs.contains(&Occurrence { atom: e.clone(), polarity: Polarity::Negated })
    {
        return Err(HexError::NegatedOccurrence(e.to_string()));
    }
    if &fam.external != e {
        return Err(HexError::MissingFamily(e.to_string()));
    }
    fam.check_inputs()?;
    if let Some(a) = fam.stray_atoms().into_iter().next() {
        return Err(HexError::FamilyDomainMismatch { external: e.to_string(), atom: a.to_string() });
    }
    let atoms = p.ordinary_atoms();
    let preds = e.input_predicates();
    for a in e.input_atoms(&atoms) {
        if !fam.domain.contains(&a) {
            return Err(HexError::FamilyDomainMismatch { external: e.to_string(), atom: a.to_string() });
        }
    }
    if let Some(a) = fam.domain.iter().find(|a| !preds.contains(a.predicate.as_str())) {
        return Err(HexError::FamilyDomainMismatch { external: e.to_string(), atom: a.to_string() });
    }
    let trusted = match reg {
        Some(r) if r.contains(&e.name) && fam.domain.len() <= FAMILY_CAP => {
            check_family(r, fam, FAMILY_CAP)?;
            false
        }
        _ => true,
    };

    let xe = xe_atom(index);
    let nxe = nxe_atom(index);
    let bars: BTreeMap<Atom, Atom> = fam.domain.iter().map(|a| (a.clone(), bar_atom(index, a))).collect();
    let mut introduced: AtomSet = bars.values().cloned().collect();
    introduced.insert(xe.clone());
    introduced.insert(nxe.clone());
    if let Some(a) = introduced.intersection(&atoms).next() {
        return Err(HexError::NotFresh(a.to_string()));
    }

    let mut rules = BTreeSet::new();
    for s in &fam.sets {
        let body =
            s.pos.iter().cloned().map(BodyLiteral::pos).chain(s.neg.iter().map(|a| BodyLiteral::pos(bars[a].clone())));
        rules.insert(Rule::new([xe.clone()], body));
    }
    for (a, b) in &bars {
        rules.insert(Rule::new([b.clone()], [BodyLiteral::neg(a.clone())]));
        rules.insert(Rule::new([b.clone()], [BodyLiteral::pos(xe.clone())]));
        rules.insert(Rule::new([a.clone(), b.clone()], [BodyLiteral::neg(nxe.clone())]));
    }
    rules.insert(Rule::new([nxe.clone()], [BodyLiteral::neg(xe.clone())]));
    let from = BodyLiteral::ext(e.clone(), occ.polarity == Polarity::Negated);
    let to = BodyLiteral::pos(xe.clone());
    for r in &p.rules {
        rules.insert(r.replace_literal(&from, &to));
    }
    let step = InliningStep { occurrence: occ.clone(), index, xe, nxe, bars, family_size: fam.sets.len(), trusted };
    Ok(InliningResult { program: Program { rules }, steps: vec![step], introduced })
}

/// Inlines every occurrence in occurrence order (negated before positive for
/// the same atom), each with its own fresh index.
pub fn inline_all(
    p: &Program,
    families: &BTreeMap<Occurrence, SupportFamily>,
    reg: Option<&OracleRegistry>,
) -> Result<InliningResult> {
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let mut introduced = AtomSet::new();
    let mut k = 1;
    for occ in p.occurrences() {
        let fam = families.get(&occ).ok_or_else(|| HexError::MissingFamily(occ.to_string()))?;
        while index_taken(&cur, k) {
            k += 1;
        }
        let res = inline_one(&cur, &occ, fam, k, reg)?;
        k += 1;
        cur = res.program;
        introduced.extend(res.introduced);
        steps.extend(res.steps);
    }
    Ok(InliningResult { program: cur, steps, introduced })
}

/// Moves input `p_i` of `e` to the fresh predicate `q`: every literal over `e`
/// now uses `&g'[..q..]`, and `q(p_i, d) <- p_i(d)` copies the atoms over
/// `p_i` found in `A(P) ∪ universe`. Registers `&g'` in `reg`.
pub fn rename_input_predicate(
    p: &Program,
    e: &ExternalAtom,
    p_i: &str,
    q: &str,
    universe: &AtomSet,
    reg: &mut OracleRegistry,
) -> Result<(Program, ExternalAtom)> {
    let mut atoms = p.ordinary_atoms();
    atoms.extend(universe.iter().cloned());
    let used_as_input = p.externals().iter().any(|x| x.input_predicates().contains(q));
    if atoms.iter().any(|a| a.predicate == q) || used_as_input {
        return Err(HexError::NotFresh(q.to_string()));
    }
    let position = e
        .inputs
        .iter()
        .position(|x| *x == InputParam::Predicate(p_i.to_string()))
        .ok_or_else(|| HexError::NotAnInput { external: e.to_string(), predicate: p_i.to_string() })?;
    let base = reg.get(&e.name)?.clone();
    let renamed: Arc<RenamedOracle> = Arc::new(RenamedOracle::new(base, position, p_i, q));
    let mut inputs = e.inputs.clone();
    inputs[position] = InputParam::Predicate(q.to_string());
    let e2 = ExternalAtom { name: format!("{}'", e.name), inputs, outputs: e.outputs.clone() };
    reg.register(renamed);

    let mut rules = BTreeSet::new();
    for r in &p.rules {
        let mut nr = r.clone();
        for neg in [false, true] {
            nr = nr.replace_literal(&BodyLiteral::ext(e.clone(), neg), &BodyLiteral::ext(e2.clone(), neg));
        }
        rules.insert(nr);
    }
    for a in atoms.iter().filter(|a| a.predicate == p_i) {
        let mut args = vec![p_i.to_string()];
        args.extend(a.args.iter().cloned());
        rules.insert(Rule::new([Atom { predicate: q.to_string(), args }], [BodyLiteral::pos(a.clone())]));
    }
    Ok((Program { rules }, e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::SupportSet;
    use crate::parser::{parse_program, parse_program_with, ParseOptions};
    use crate::semantics::answer_sets_brute;

    fn a(x: &str) -> Atom {
        Atom::prop(x)
    }

    fn s(xs: &[&str]) -> AtomSet {
        xs.iter().map(|x| a(x)).collect()
    }

    fn occ(p: &Program, neg: bool) -> Occurrence {
        let e = p.externals().into_iter().next().unwrap();
        Occurrence { atom: e, polarity: Polarity::of(neg) }
    }

    fn fam(e: &ExternalAtom, sigma: Sigma, dom: &[&str], sets: &[(&[&str], &[&str])]) -> SupportFamily {
        let sets = sets.iter().map(|(p, n)| SupportSet::new(s(p), s(n)).unwrap());
        SupportFamily::new(e.clone(), sigma, s(dom), sets)
    }

    #[test]
    fn a_or_not_b_example() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("a :- &aOrNotB[a,b]().").unwrap();
        let o = occ(&p, false);
        let f = fam(&o.atom, Sigma::T, &["a", "b"], &[(&["a"], &[]), (&[], &["b"])]);
        let res = inline_one(&p, &o, &f, 1, Some(&reg)).unwrap();
        let want = parse_program_with(
            "aux__xe_1 :- a.
             aux__xe_1 :- aux__bar_1__b.
             aux__bar_1__a :- not a.  aux__bar_1__a :- aux__xe_1.  a v aux__bar_1__a :- not aux__nxe_1.
             aux__bar_1__b :- not b.  aux__bar_1__b :- aux__xe_1.  b v aux__bar_1__b :- not aux__nxe_1.
             aux__nxe_1 :- not aux__xe_1.
             a :- aux__xe_1.",
            ParseOptions { allow_aux: true },
        )
        .unwrap();
        assert_eq!(res.program, want);
        assert_eq!(res.program.len(), 10);
        let got = answer_sets_brute(&res.program, &AtomSet::new(), &reg).unwrap();
        assert_eq!(got, vec![s(&["a", "aux__xe_1", "aux__bar_1__a", "aux__bar_1__b"])]);
        assert_eq!(res.project(&got[0]), s(&["a"]));
        assert!(!res.steps[0].trusted);
    }

    #[test]
    fn positive_inlining_of_negated_occurrence_is_rejected() {
        let p = parse_program("p :- not &neg[p]().").unwrap();
        let o = Occurrence { atom: occ(&p, true).atom, polarity: Polarity::Positive };
        let f = fam(&o.atom, Sigma::T, &["p"], &[(&[], &["p"])]);
        assert!(matches!(inline_one(&p, &o, &f, 1, None), Err(HexError::NegatedOccurrence(_))));
    }

    #[test]
    fn positive_rewriting_of_negated_atom_is_unsound() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p :- not &neg[p]().").unwrap();
        assert_eq!(answer_sets_brute(&p, &AtomSet::new(), &reg).unwrap(), vec![AtomSet::new()]);
        let rewritten = parse_program_with(
            "aux__xe_1 :- aux__bar_1__p.
             aux__bar_1__p :- not p.  aux__bar_1__p :- aux__xe_1.  p v aux__bar_1__p :- not aux__nxe_1.
             aux__nxe_1 :- not aux__xe_1.
             p :- not aux__xe_1.",
            ParseOptions { allow_aux: true },
        )
        .unwrap();
        let got = answer_sets_brute(&rewritten, &AtomSet::new(), &reg).unwrap();
        assert_eq!(got, vec![s(&["aux__nxe_1", "p"]), s(&["aux__bar_1__p", "aux__xe_1"])]);
    }

    #[test]
    fn negated_inlining_example() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("p :- not &neg[p]().").unwrap();
        let o = occ(&p, true);
        let f = fam(&o.atom, Sigma::F, &["p"], &[(&["p"], &[])]);
        let res = inline_one(&p, &o, &f, 1, Some(&reg)).unwrap();
        assert!(res.program.is_ordinary());
        let got = answer_sets_brute(&res.program, &AtomSet::new(), &reg).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(res.project(&got[0]), AtomSet::new());
    }

    #[test]
    fn true_example_keeps_its_answer_set() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("a :- &true[a]().").unwrap();
        let o = occ(&p, false);
        let f = fam(&o.atom, Sigma::T, &["a"], &[(&["a"], &[]), (&[], &["a"])]);
        let res = inline_one(&p, &o, &f, 1, Some(&reg)).unwrap();
        let got = answer_sets_brute(&res.program, &AtomSet::new(), &reg).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(res.project(&got[0]), s(&["a"]));
    }

    #[test]
    fn polarity_and_completeness_checked() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("a :- &true[a]().").unwrap();
        let o = occ(&p, false);
        let wrong = fam(&o.atom, Sigma::F, &["a"], &[]);
        assert!(matches!(inline_one(&p, &o, &wrong, 1, Some(&reg)), Err(HexError::FamilyPolarityMismatch { .. })));
        let partial = fam(&o.atom, Sigma::T, &["a"], &[(&["a"], &[])]);
        assert!(matches!(inline_one(&p, &o, &partial, 1, Some(&reg)), Err(HexError::IncompleteFamily { .. })));
        let res = inline_one(&p, &o, &partial, 1, None).unwrap();
        assert!(res.steps[0].trusted);
        assert!(res.header().contains("not verified"));
    }

    #[test]
    fn inline_all_separates_bars() {
        let reg = OracleRegistry::with_builtins();
        let p = parse_program("a :- &aOrNotB[a,b](). b :- &id[a]().").unwrap();
        let mut fams = BTreeMap::new();
        for o in p.occurrences() {
            let d = o.atom.input_atoms(&p.ordinary_atoms());
            let f = crate::family::derive_family(&reg, &o.atom, &d, Sigma::T, FAMILY_CAP).unwrap();
            fams.insert(o, f);
        }
        let res = inline_all(&p, &fams, Some(&reg)).unwrap();
        assert!(res.program.is_ordinary());
        let bars_of_a: BTreeSet<&Atom> = res.steps.iter().filter_map(|s| s.bars.get(&a("a"))).collect();
        assert_eq!(bars_of_a.len(), 2);
        let got: Vec<AtomSet> =
            answer_sets_brute(&res.program, &AtomSet::new(), &reg).unwrap().iter().map(|y| res.project(y)).collect();
        assert_eq!(got, answer_sets_brute(&p, &AtomSet::new(), &reg).unwrap());
    }

    #[test]
    fn inline_all_on_ordinary_program_is_identity() {
        let p = parse_program("a :- not b.").unwrap();
        let res = inline_all(&p, &BTreeMap::new(), None).unwrap();
        assert_eq!(res.program, p);
        assert!(res.introduced.is_empty());
    }

    #[test]
    fn rename_example() {
        let mut reg = OracleRegistry::with_builtins();
        let p = parse_program("c :- &neg[b]().").unwrap();
        let e = p.externals().into_iter().next().unwrap();
        let (p2, e2) = rename_input_predicate(&p, &e, "b", "q", &s(&["b"]), &mut reg).unwrap();
        let want = Program::new([
            Rule::new([Atom::new("q", &["b"])], [BodyLiteral::pos(a("b"))]),
            Rule::new([a("c")], [BodyLiteral::ext(e2.clone(), false)]),
        ]);
        assert_eq!(p2, want);
        assert_eq!(e2.to_string(), "&neg'[q]()");
        let u = s(&["b"]);
        let before = answer_sets_brute(&p, &u, &reg).unwrap();
        let after: Vec<AtomSet> = answer_sets_brute(&p2, &u, &reg)
            .unwrap()
            .into_iter()
            .map(|y| y.into_iter().filter(|x| x.predicate != "q").collect())
            .collect();
        assert_eq!(before, after);
    }

    #[test]
    fn rename_requires_fresh_symbol() {
        let mut reg = OracleRegistry::with_builtins();
        let p = parse_program("c :- &neg[b](). q.").unwrap();
        let e = p.externals().into_iter().next().unwrap();
        assert!(matches!(
            rename_input_predicate(&p, &e, "b", "q", &AtomSet::new(), &mut reg),
            Err(HexError::NotFresh(_))
        ));
        let (p2, _) = rename_input_predicate(&p, &e, "b", "r", &AtomSet::new(), &mut reg).unwrap();
        assert_eq!(p2.len(), 2);
    }
}
