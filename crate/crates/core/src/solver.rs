//! Backtracking search for models of ground programs.
//!
//! Rules are clauses over atom variables; external literals are evaluated once
//! all their input atoms are assigned. Branching is false-first over the
//! variable order, so solutions come out in characteristic-vector order.
//! Optionally every true atom must be supported by some rule, which holds for
//! answer sets and for minimal models of reducts free of external literals.

use std::cell::Cell;
use std::collections::{BTreeMap, HashMap};

use crate::error::Result;
use crate::family::{Sigma, SupportFamily};
use crate::oracle::OracleRegistry;
use crate::program::{Atom, AtomSet, ExternalAtom, LiteralContent, Program, Rule};

/// Truth of external atoms given the values of their input atoms.
pub trait ExtSemantics {
    fn eval(&self, e: &ExternalAtom, true_inputs: &AtomSet) -> Result<bool>;
}

/// Asks the registered oracle and counts the calls.
pub struct OracleSemantics<'r> {
    pub reg: &'r OracleRegistry,
    pub calls: Cell<u64>,
}

impl<'r> OracleSemantics<'r> {
    pub fn new(reg: &'r OracleRegistry) -> Self {
        OracleSemantics { reg, calls: Cell::new(0) }
    }
}

impl ExtSemantics for OracleSemantics<'_> {
    fn eval(&self, e: &ExternalAtom, true_inputs: &AtomSet) -> Result<bool> {
        self.calls.set(self.calls.get() + 1);
        self.reg.eval_external(e, true_inputs)
    }
}

/// Answers from complete support families: with a T family the atom is true
/// iff a member matches, with an F family iff none does.
pub struct FamilySemantics<'f> {
    pub families: BTreeMap<ExternalAtom, &'f SupportFamily>,
}

impl ExtSemantics for FamilySemantics<'_> {
    fn eval(&self, e: &ExternalAtom, true_inputs: &AtomSet) -> Result<bool> {
        let fam = self.families.get(e).ok_or_else(|| crate::HexError::MissingFamily(e.to_string()))?;
        let m = fam.matches(true_inputs);
        Ok(if fam.sigma == Sigma::T { m } else { !m })
    }
}

/// For ordinary programs; any external atom is an error.
pub struct NoExternals;

impl ExtSemantics for NoExternals {
    fn eval(&self, e: &ExternalAtom, _true_inputs: &AtomSet) -> Result<bool> {
        Err(crate::HexError::MissingFamily(e.to_string()))
    }
}

#[derive(Debug, Clone)]
enum Lit {
    Atom(usize, bool),
    Ext(usize, bool),
}

#[derive(Debug, Clone)]
struct SRule {
    head: Vec<usize>,
    body: Vec<Lit>,
}

struct SExt {
    atom: ExternalAtom,
    inputs: Vec<usize>,
}

/// Variables and rules of a search problem.
pub struct Space {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl Space {
    /// Variables in the given order; it fixes the solution order.
    pub fn new(atoms: Vec<Atom>) -> Self {
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Space { atoms, index }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn set_of(&self, vals: &[bool]) -> AtomSet {
        self.atoms.iter().zip(vals).filter(|(_, v)| **v).map(|(a, _)| a.clone()).collect()
    }

    pub fn vals_of(&self, s: &AtomSet) -> Vec<bool> {
        self.atoms.iter().map(|a| s.contains(a)).collect()
    }
}

pub struct Problem<'s> {
    space: &'s Space,
    rules: Vec<SRule>,
    exts: Vec<SExt>,
    head_rules: Vec<Vec<usize>>,
}

impl<'s> Problem<'s> {
    /// Atoms of the rules must all belong to `space`.
    pub fn new<'a>(space: &'s Space, rules: impl IntoIterator<Item = &'a Rule>) -> Self {
        let mut ext_ids: HashMap<ExternalAtom, usize> = HashMap::new();
        let mut exts: Vec<SExt> = Vec::new();
        let mut srules = Vec::new();
        let var = |a: &Atom| space.index(a).unwrap_or_else(|| panic!("atom {a} outside the search space"));
        for r in rules {
            let head = r.head.iter().map(var).collect();
            let mut body = Vec::new();
            for l in r.body() {
                match &l.content {
                    LiteralContent::Atom(a) => body.push(Lit::Atom(var(a), l.negated)),
                    LiteralContent::External(e) => {
                        let k = *ext_ids.entry(e.clone()).or_insert_with(|| {
                            let preds = e.input_predicates();
                            let inputs = (0..space.len())
                                .filter(|&i| preds.contains(space.atoms[i].predicate.as_str()))
                                .collect();
                            exts.push(SExt { atom: e.clone(), inputs });
                            exts.len() - 1
                        });
                        body.push(Lit::Ext(k, l.negated));
                    }
                }
            }
            srules.push(SRule { head, body });
        }
        let mut head_rules = vec![Vec::new(); space.len()];
        for (i, r) in srules.iter().enumerate() {
            for &h in &r.head {
                head_rules[h].push(i);
            }
        }
        Problem { space, rules: srules, exts, head_rules }
    }

    pub fn has_externals(&self) -> bool {
        !self.exts.is_empty()
    }
}

/// Search constraints beyond the rules.
#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub require_support: bool,
    /// Fixed values per variable.
    pub fixed: Vec<Option<bool>>,
    /// At least one of these variables must be false.
    pub not_all_true: Option<Vec<usize>>,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SearchStats {
    pub nodes: u64,
    pub conflicts: u64,
}

const UNASSIGNED: i8 = -1;

struct Search<'p, 's, 'e> {
    prob: &'p Problem<'s>,
    sem: &'e dyn ExtSemantics,
    opts: &'p SearchOptions,
    stats: SearchStats,
}

#[derive(Clone)]
struct State {
    vals: Vec<i8>,
    ext: Vec<i8>,
}

enum Flow {
    Continue,
    Stop,
}

impl Search<'_, '_, '_> {
    fn lit_value(&self, st: &State, l: &Lit) -> i8 {
        match *l {
            Lit::Atom(v, neg) => match st.vals[v] {
                UNASSIGNED => UNASSIGNED,
                x => (x == 1) as i8 ^ neg as i8,
            },
            Lit::Ext(k, neg) => match st.ext[k] {
                UNASSIGNED => UNASSIGNED,
                x => (x == 1) as i8 ^ neg as i8,
            },
        }
    }

    /// Sets an unassigned variable; reports whether anything changed.
    fn assign(st: &mut State, v: usize, value: bool) -> bool {
        if st.vals[v] == UNASSIGNED {
            st.vals[v] = value as i8;
            true
        } else {
            false
        }
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&mut self, st: &mut State) -> Result<bool> {
        loop {
            let mut changed = false;
            for (k, e) in self.prob.exts.iter().enumerate() {
                if st.ext[k] == UNASSIGNED && e.inputs.iter().all(|&v| st.vals[v] != UNASSIGNED) {
                    let true_inputs: AtomSet = e
                        .inputs
                        .iter()
                        .filter(|&&v| st.vals[v] == 1)
                        .map(|&v| self.prob.space.atoms[v].clone())
                        .collect();
                    st.ext[k] = self.sem.eval(&e.atom, &true_inputs)? as i8;
                    changed = true;
                }
            }
            for r in &self.prob.rules {
                if r.head.iter().any(|&h| st.vals[h] == 1) {
                    continue;
                }
                let mut unknown_body: Option<&Lit> = None;
                let mut n_unknown_body = 0;
                let mut falsified = false;
                for l in &r.body {
                    match self.lit_value(st, l) {
                        0 => {
                            falsified = true;
                            break;
                        }
                        UNASSIGNED => {
                            n_unknown_body += 1;
                            unknown_body = Some(l);
                        }
                        _ => {}
                    }
                }
                if falsified {
                    continue;
                }
                let unknown_heads: Vec<usize> = r.head.iter().copied().filter(|&h| st.vals[h] == UNASSIGNED).collect();
                if n_unknown_body == 0 {
                    match unknown_heads.len() {
                        0 => return Ok(false),
                        1 => {
                            st.vals[unknown_heads[0]] = 1;
                            changed = true;
                        }
                        _ => {}
                    }
                } else if n_unknown_body == 1 && unknown_heads.is_empty() {
                    if let Some(Lit::Atom(v, neg)) = unknown_body {
                        st.vals[*v] = *neg as i8;
                        changed = true;
                    }
                }
            }
            if self.opts.require_support {
                for v in 0..st.vals.len() {
                    if st.vals[v] == 0 {
                        continue;
                    }
                    let mut candidate = None;
                    let mut count = 0;
                    for &ri in &self.prob.head_rules[v] {
                        let r = &self.prob.rules[ri];
                        if r.head.iter().any(|&h| h != v && st.vals[h] == 1) {
                            continue;
                        }
                        if r.body.iter().any(|l| self.lit_value(st, l) == 0) {
                            continue;
                        }
                        count += 1;
                        candidate = Some(ri);
                        if count > 1 {
                            break;
                        }
                    }
                    if count == 0 {
                        if st.vals[v] == 1 {
                            return Ok(false);
                        }
                        st.vals[v] = 0;
                        changed = true;
                    } else if count == 1 && st.vals[v] == 1 {
                        let r = &self.prob.rules[candidate.unwrap()];
                        for &h in &r.head {
                            if h != v {
                                changed |= Self::assign(st, h, false);
                            }
                        }
                        for l in &r.body {
                            if let Lit::Atom(b, neg) = *l {
                                changed |= Self::assign(st, b, !neg);
                            }
                        }
                    }
                }
            }
            if let Some(vs) = &self.opts.not_all_true {
                let mut open = None;
                let mut n_open = 0;
                let mut has_false = false;
                for &v in vs {
                    match st.vals[v] {
                        0 => {
                            has_false = true;
                            break;
                        }
                        UNASSIGNED => {
                            n_open += 1;
                            open = Some(v);
                        }
                        _ => {}
                    }
                }
                if !has_false {
                    match n_open {
                        0 => return Ok(false),
                        1 => {
                            st.vals[open.unwrap()] = 0;
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                return Ok(true);
            }
        }
    }

    fn run(&mut self, st: State, on_solution: &mut dyn FnMut(&[bool]) -> Result<bool>) -> Result<Flow> {
        let mut st = st;
        self.stats.nodes += 1;
        if !self.propagate(&mut st)? {
            self.stats.conflicts += 1;
            return Ok(Flow::Continue);
        }
        match st.vals.iter().position(|&v| v == UNASSIGNED) {
            None => {
                let vals: Vec<bool> = st.vals.iter().map(|&v| v == 1).collect();
                Ok(if on_solution(&vals)? { Flow::Continue } else { Flow::Stop })
            }
            Some(v) => {
                for value in [0, 1] {
                    let mut child = st.clone();
                    child.vals[v] = value;
                    if let Flow::Stop = self.run(child, on_solution)? {
                        return Ok(Flow::Stop);
                    }
                }
                Ok(Flow::Continue)
            }
        }
    }
}

/// Enumerates models of `prob` under `opts`, in characteristic-vector order of
/// the space. The callback returns false to stop.
pub fn search(
    prob: &Problem,
    sem: &dyn ExtSemantics,
    opts: &SearchOptions,
    on_solution: &mut dyn FnMut(&[bool]) -> Result<bool>,
) -> Result<SearchStats> {
    let n = prob.space.len();
    let mut vals = vec![UNASSIGNED; n];
    for (i, f) in opts.fixed.iter().enumerate() {
        if let Some(b) = f {
            vals[i] = *b as i8;
        }
    }
    let st = State { vals, ext: vec![UNASSIGNED; prob.exts.len()] };
    let mut s = Search { prob, sem, opts, stats: SearchStats::default() };
    s.run(st, on_solution)?;
    Ok(s.stats)
}

/// Looks for a proper subset of `y` that satisfies fP^Y, where `reduct` are
/// the rules of fP^Y.
pub fn smaller_model(space: &Space, reduct: &[&Rule], y: &[bool], sem: &dyn ExtSemantics) -> Result<Option<Vec<bool>>> {
    let prob = Problem::new(space, reduct.iter().copied());
    let in_y: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    if in_y.is_empty() {
        return Ok(None);
    }
    let opts = SearchOptions {
        require_support: !prob.has_externals(),
        fixed: y.iter().map(|&b| if b { None } else { Some(false) }).collect(),
        not_all_true: Some(in_y),
    };
    let mut found = None;
    search(&prob, sem, &opts, &mut |z| {
        found = Some(z.to_vec());
        Ok(false)
    })?;
    Ok(found)
}

/// Rules of `p` whose body holds under `y`.
pub fn reduct_rules<'p>(p: &'p Program, y: &AtomSet, sem: &dyn ExtSemantics) -> Result<Vec<&'p Rule>> {
    let mut out = Vec::new();
    'rules: for r in &p.rules {
        for l in r.body() {
            let v = match &l.content {
                LiteralContent::Atom(a) => y.contains(a),
                LiteralContent::External(e) => {
                    let preds = e.input_predicates();
                    let ins: AtomSet = y.iter().filter(|a| preds.contains(a.predicate.as_str())).cloned().collect();
                    sem.eval(e, &ins)?
                }
            };
            if v == l.negated {
                continue 'rules;
            }
        }
        out.push(r);
    }
    Ok(out)
}
