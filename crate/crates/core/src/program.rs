//! Ground HEX-programs: atoms, external atoms, rules, reducts.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{HexError, Result};

pub type AtomSet = BTreeSet<Atom>;

/// Ground ordinary atom `p(c1,...,cn)`. `p` and `p()` are the same atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Atom { predicate: predicate.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom { predicate: predicate.into(), args: Vec::new() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputParam {
    Predicate(String),
    Constant(String),
}

impl fmt::Display for InputParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputParam::Predicate(p) | InputParam::Constant(p) => f.write_str(p),
        }
    }
}

/// Ground external atom `&g[p1,...](c1,...)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExternalAtom {
    pub name: String,
    pub inputs: Vec<InputParam>,
    pub outputs: Vec<String>,
}

impl ExternalAtom {
    pub fn new(name: impl Into<String>, inputs: Vec<InputParam>, outputs: &[&str]) -> Self {
        ExternalAtom { name: name.into(), inputs, outputs: outputs.iter().map(|s| s.to_string()).collect() }
    }

    /// External atom whose inputs are all predicate parameters.
    pub fn with_preds(name: impl Into<String>, preds: &[&str], outputs: &[&str]) -> Self {
        let inputs = preds.iter().map(|p| InputParam::Predicate(p.to_string())).collect();
        Self::new(name, inputs, outputs)
    }

    pub fn input_predicates(&self) -> BTreeSet<&str> {
        self.inputs
            .iter()
            .filter_map(|p| match p {
                InputParam::Predicate(s) => Some(s.as_str()),
                InputParam::Constant(_) => None,
            })
            .collect()
    }

    pub fn constants(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .filter_map(|p| match p {
                InputParam::Constant(s) => Some(s.as_str()),
                InputParam::Predicate(_) => None,
            })
            .collect()
    }

    /// I(e,P): atoms of `universe` whose predicate is a predicate input of `self`.
    pub fn input_atoms(&self, universe: &AtomSet) -> AtomSet {
        let preds = self.input_predicates();
        universe.iter().filter(|a| preds.contains(a.predicate.as_str())).cloned().collect()
    }
}

impl fmt::Display for ExternalAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|p| p.to_string()).collect();
        write!(f, "&{}[{}]({})", self.name, ins.join(","), self.outputs.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiteralContent {
    Atom(Atom),
    External(ExternalAtom),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BodyLiteral {
    pub content: LiteralContent,
    pub negated: bool,
}

impl BodyLiteral {
    pub fn pos(a: Atom) -> Self {
        BodyLiteral { content: LiteralContent::Atom(a), negated: false }
    }
    pub fn neg(a: Atom) -> Self {
        BodyLiteral { content: LiteralContent::Atom(a), negated: true }
    }
    pub fn ext(e: ExternalAtom, negated: bool) -> Self {
        BodyLiteral { content: LiteralContent::External(e), negated }
    }

    pub fn atom(&self) -> Option<&Atom> {
        match &self.content {
            LiteralContent::Atom(a) => Some(a),
            LiteralContent::External(_) => None,
        }
    }

    pub fn external(&self) -> Option<&ExternalAtom> {
        match &self.content {
            LiteralContent::External(e) => Some(e),
            LiteralContent::Atom(_) => None,
        }
    }

    /// Truth of the literal under `y`; external atoms go through `env`.
    pub fn holds(&self, y: &AtomSet, env: &dyn ExtEnv) -> Result<bool> {
        let v = match &self.content {
            LiteralContent::Atom(a) => y.contains(a),
            LiteralContent::External(e) => env.eval(e, y)?,
        };
        Ok(v != self.negated)
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        match &self.content {
            LiteralContent::Atom(a) => write!(f, "{a}"),
            LiteralContent::External(e) => write!(f, "{e}"),
        }
    }
}

/// Evaluates external atoms against an assignment.
pub trait ExtEnv {
    fn eval(&self, e: &ExternalAtom, y: &AtomSet) -> Result<bool>;
}

/// Environment for ordinary programs; any external atom is an error.
pub struct NoExternals;

impl ExtEnv for NoExternals {
    fn eval(&self, e: &ExternalAtom, _y: &AtomSet) -> Result<bool> {
        Err(HexError::UnknownOracle(e.name.clone()))
    }
}

/// Occurrence polarity of an external atom in a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Negated,
    Positive,
}

impl Polarity {
    pub fn of(negated: bool) -> Self {
        if negated {
            Polarity::Negated
        } else {
            Polarity::Positive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub atom: ExternalAtom,
    pub polarity: Polarity,
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negated => write!(f, "not {}", self.atom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: AtomSet,
    body: Vec<BodyLiteral>,
}

impl Rule {
    /// Builds a rule; the body is sorted and deduplicated so rules compare as sets.
    pub fn new(head: impl IntoIterator<Item = Atom>, body: impl IntoIterator<Item = BodyLiteral>) -> Self {
        let mut body: Vec<BodyLiteral> = body.into_iter().collect();
        body.sort();
        body.dedup();
        Rule { head: head.into_iter().collect(), body }
    }

    pub fn fact(a: Atom) -> Self {
        Rule::new([a], [])
    }

    pub fn body(&self) -> &[BodyLiteral] {
        &self.body
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn pos_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| !l.negated).filter_map(|l| l.atom())
    }

    pub fn neg_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.negated).filter_map(|l| l.atom())
    }

    pub fn externals(&self) -> impl Iterator<Item = (&ExternalAtom, bool)> {
        self.body.iter().filter_map(|l| l.external().map(|e| (e, l.negated)))
    }

    pub fn is_ordinary(&self) -> bool {
        self.body.iter().all(|l| l.atom().is_some())
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(self.body.iter().filter_map(|l| l.atom()))
    }

    pub fn body_holds(&self, y: &AtomSet, env: &dyn ExtEnv) -> Result<bool> {
        for l in &self.body {
            if !l.holds(y, env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn satisfied(&self, y: &AtomSet, env: &dyn ExtEnv) -> Result<bool> {
        if self.head.iter().any(|a| y.contains(a)) {
            return Ok(true);
        }
        Ok(!self.body_holds(y, env)?)
    }

    /// Replaces every literal matching `from` (content and sign) by `to`.
    pub fn replace_literal(&self, from: &BodyLiteral, to: &BodyLiteral) -> Rule {
        let body = self.body.iter().map(|l| if l == from { to.clone() } else { l.clone() });
        Rule::new(self.head.iter().cloned(), body)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(|a| a.to_string()).collect();
        f.write_str(&head.join(" v "))?;
        if !self.body.is_empty() || self.head.is_empty() {
            if !self.head.is_empty() {
                f.write_str(" ")?;
            }
            f.write_str(":-")?;
            let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
            if !body.is_empty() {
                write!(f, " {}", body.join(", "))?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    pub rules: BTreeSet<Rule>,
}

impl Program {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Self {
        Program { rules: rules.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// A(P): ordinary atoms in heads and bodies.
    pub fn ordinary_atoms(&self) -> AtomSet {
        self.rules.iter().flat_map(|r| r.atoms().cloned()).collect()
    }

    /// Distinct external atoms of P.
    pub fn externals(&self) -> BTreeSet<ExternalAtom> {
        self.rules.iter().flat_map(|r| r.externals().map(|(e, _)| e.clone())).collect()
    }

    /// E(P) with polarity; an atom used both ways yields two occurrences.
    pub fn occurrences(&self) -> BTreeSet<Occurrence> {
        self.rules
            .iter()
            .flat_map(|r| r.externals().map(|(e, neg)| Occurrence { atom: e.clone(), polarity: Polarity::of(neg) }))
            .collect()
    }

    pub fn is_ordinary(&self) -> bool {
        self.rules.iter().all(|r| r.is_ordinary())
    }

    pub fn union(&self, other: &Program) -> Program {
        Program { rules: self.rules.union(&other.rules).cloned().collect() }
    }

    pub fn satisfied_by(&self, y: &AtomSet, env: &dyn ExtEnv) -> Result<bool> {
        for r in &self.rules {
            if !r.satisfied(y, env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// fP^Y: rules whose whole body holds under `y`.
    pub fn flp_reduct(&self, y: &AtomSet, env: &dyn ExtEnv) -> Result<Program> {
        let mut rules = BTreeSet::new();
        for r in &self.rules {
            if r.body_holds(y, env)? {
                rules.insert(r.clone());
            }
        }
        Ok(Program { rules })
    }

    /// R^Y: `H(r) <- B+(r)` for rules whose negative body is false under `y`.
    pub fn gl_reduct(&self, y: &AtomSet) -> Result<Program> {
        if !self.is_ordinary() {
            return Err(HexError::NotOrdinary);
        }
        let rules = self
            .rules
            .iter()
            .filter(|r| r.neg_body().all(|b| !y.contains(b)))
            .map(|r| Rule::new(r.head.iter().cloned(), r.pos_body().cloned().map(BodyLiteral::pos)))
            .collect();
        Ok(Program { rules })
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A set of true atoms over a declared finite universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub true_atoms: AtomSet,
    pub universe: AtomSet,
}

impl Assignment {
    pub fn new(true_atoms: AtomSet, universe: AtomSet) -> Self {
        let universe = universe.union(&true_atoms).cloned().collect();
        Assignment { true_atoms, universe }
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.true_atoms.contains(a)
    }
}

/// Formats an atom set as `{a, b}`.
pub fn show_set(s: &AtomSet) -> String {
    let items: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Characteristic-vector comparison over the sorted universe: at the first atom
/// where the sets differ, the set lacking it is smaller.
pub fn cmp_charvec(x: &AtomSet, y: &AtomSet) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let mut xi = x.iter();
    let mut yi = y.iter();
    loop {
        match (xi.next(), yi.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Equal => continue,
                // x has the smaller atom a which y lacks, so x is larger
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Atom {
        Atom::prop(s)
    }

    fn set(xs: &[&str]) -> AtomSet {
        xs.iter().map(|s| a(s)).collect()
    }

    #[test]
    fn ordinary_atoms_collects_heads_and_bodies() {
        let p = Program::new([Rule::new([a("a"), a("b")], []), Rule::new([], [BodyLiteral::pos(a("c"))])]);
        assert_eq!(p.ordinary_atoms(), set(&["a", "b", "c"]));
        assert!(Program::default().ordinary_atoms().is_empty());
    }

    #[test]
    fn input_atoms_filters_by_predicate() {
        let e = ExternalAtom::with_preds("diff", &["p", "q"], &["a"]);
        let u: AtomSet = [Atom::new("p", &["a"]), Atom::new("q", &["a"]), Atom::new("r", &["a"])].into();
        assert_eq!(e.input_atoms(&u), [Atom::new("p", &["a"]), Atom::new("q", &["a"])].into());
        let g = ExternalAtom::with_preds("g", &[], &["c"]);
        assert!(g.input_atoms(&u).is_empty());
    }

    #[test]
    fn gl_reduct_examples() {
        let r1 = Program::new([Rule::new([a("a")], [BodyLiteral::neg(a("b"))])]);
        assert_eq!(r1.gl_reduct(&set(&["a"])).unwrap(), Program::new([Rule::fact(a("a"))]));
        assert!(r1.gl_reduct(&set(&["b"])).unwrap().is_empty());
        let r2 = Program::new([Rule::new([a("a")], [BodyLiteral::pos(a("b")), BodyLiteral::neg(a("c"))])]);
        assert_eq!(
            r2.gl_reduct(&set(&["a", "b"])).unwrap(),
            Program::new([Rule::new([a("a")], [BodyLiteral::pos(a("b"))])])
        );
    }

    #[test]
    fn gl_reduct_rejects_externals() {
        let e = ExternalAtom::with_preds("id", &["p"], &[]);
        let p = Program::new([Rule::new([a("p")], [BodyLiteral::ext(e, false)])]);
        assert_eq!(p.gl_reduct(&AtomSet::new()), Err(HexError::NotOrdinary));
    }

    #[test]
    fn constraint_with_false_body_is_satisfied() {
        let r = Rule::new([], [BodyLiteral::pos(a("a"))]);
        assert!(r.satisfied(&AtomSet::new(), &NoExternals).unwrap());
        assert!(!r.satisfied(&set(&["a"]), &NoExternals).unwrap());
    }

    #[test]
    fn rule_body_is_a_set() {
        let r1 = Rule::new([a("h")], [BodyLiteral::pos(a("x")), BodyLiteral::pos(a("y"))]);
        let r2 = Rule::new([a("h")], [BodyLiteral::pos(a("y")), BodyLiteral::pos(a("x")), BodyLiteral::pos(a("y"))]);
        assert_eq!(r1, r2);
    }

    #[test]
    fn charvec_order_puts_empty_first() {
        use std::cmp::Ordering::*;
        assert_eq!(cmp_charvec(&set(&[]), &set(&["a"])), Less);
        assert_eq!(cmp_charvec(&set(&["b"]), &set(&["a"])), Less);
        assert_eq!(cmp_charvec(&set(&["a"]), &set(&["a", "b"])), Less);
        assert_eq!(cmp_charvec(&set(&["a", "b"]), &set(&["a", "b"])), Equal);
    }
}
