//! Independent reference code for the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hexinline::oracle::OracleRegistry;
use hexinline::parser::parse_program;
use hexinline::program::{Atom, AtomSet, BodyLiteral, Program, Rule};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn atom(text: &str) -> Atom {
    match text.split_once('(') {
        Some((p, rest)) => {
            let args: Vec<&str> = rest.trim_end_matches(')').split(',').collect();
            Atom::new(p, &args)
        }
        None => Atom::prop(text),
    }
}

pub fn set(xs: &[&str]) -> AtomSet {
    xs.iter().map(|x| atom(x)).collect()
}

pub fn prog(text: &str) -> Program {
    parse_program(text).unwrap()
}

/// Sorted atom list with bitmask conversion; atom `i` is bit `i`.
pub struct Bits {
    pub atoms: Vec<Atom>,
}

impl Bits {
    pub fn new(universe: &AtomSet) -> Self {
        Bits { atoms: universe.iter().cloned().collect() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn set(&self, m: u32) -> AtomSet {
        self.atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect()
    }

    pub fn mask(&self, s: &AtomSet) -> u32 {
        self.atoms.iter().enumerate().filter(|(_, a)| s.contains(*a)).map(|(i, _)| 1 << i).sum()
    }
}

/// Answer sets by the definition: models `Y` of `P` with no `Z ⊊ Y`
/// satisfying every rule whose body holds under `Y`.
pub fn flp_answer_sets(p: &Program, universe: &AtomSet, reg: &OracleRegistry) -> BTreeSet<AtomSet> {
    let mut all = universe.clone();
    all.extend(p.ordinary_atoms());
    let bits = Bits::new(&all);
    assert!(bits.len() <= 16, "reference enumerator is for small universes");
    let mut out = BTreeSet::new();
    for ym in 0u32..1 << bits.len() {
        let y = bits.set(ym);
        if !p.rules.iter().all(|r| r.satisfied(&y, reg).unwrap()) {
            continue;
        }
        let reduct: Vec<&Rule> = p.rules.iter().filter(|r| r.body_holds(&y, reg).unwrap()).collect();
        let mut smaller = false;
        let mut z = ym;
        while z != 0 {
            z = (z - 1) & ym;
            let zs = bits.set(z);
            if reduct.iter().all(|r| r.satisfied(&zs, reg).unwrap()) {
                smaller = true;
                break;
            }
        }
        if !smaller {
            out.insert(y);
        }
    }
    out
}

/// Everything about an ordinary program that decides `AS(P ∪ R)` for any
/// positive `R` over the same atoms: its models and, for each model `Y`, the
/// proper subsets of `Y` that satisfy the reduct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub models: u32,
    pub below: Vec<u32>,
}

pub fn key_of(p: &Program, bits: &Bits, reg: &OracleRegistry) -> Key {
    let n = bits.len();
    let mut models = 0;
    let mut below = vec![0u32; 1 << n];
    for ym in 0u32..1 << n {
        let y = bits.set(ym);
        if !p.rules.iter().all(|r| r.satisfied(&y, reg).unwrap()) {
            continue;
        }
        models |= 1 << ym;
        let reduct: Vec<&Rule> = p.rules.iter().filter(|r| r.body_holds(&y, reg).unwrap()).collect();
        let mut z = ym;
        while z != 0 {
            z = (z - 1) & ym;
            let zs = bits.set(z);
            if reduct.iter().all(|r| r.satisfied(&zs, reg).unwrap()) {
                below[ym as usize] |= 1 << z;
            }
        }
    }
    Key { models, below }
}

/// Positive rule as `(head, body)` masks.
pub type PosRule = (u32, u32);

fn pos_satisfied(rules: &[PosRule], z: u32) -> bool {
    rules.iter().all(|&(h, b)| b & !z != 0 || h & z != 0)
}

/// Bitset over `Y` of `AS(P ∪ R)`, with `P` given by its key.
pub fn answer_sets_with(key: &Key, r: &[PosRule], n: usize) -> u32 {
    let mut out = 0;
    for ym in 0u32..1 << n {
        if key.models >> ym & 1 == 0 || !pos_satisfied(r, ym) {
            continue;
        }
        let red: Vec<PosRule> = r.iter().copied().filter(|&(_, b)| b & !ym == 0).collect();
        let mut smaller = false;
        let mut z = ym;
        while z != 0 {
            z = (z - 1) & ym;
            if key.below[ym as usize] >> z & 1 == 1 && pos_satisfied(&red, z) {
                smaller = true;
                break;
            }
        }
        if !smaller {
            out |= 1 << ym;
        }
    }
    out
}

/// Positive rules with heads in `h` and bodies in `b`, excluding tautologies;
/// constraints are included when `constraints` is set.
pub fn positive_rules(h: u32, b: u32, constraints: bool) -> Vec<PosRule> {
    let mut out = Vec::new();
    for head in submasks(h) {
        if head == 0 && !constraints {
            continue;
        }
        for body in submasks(b) {
            if head & body == 0 {
                out.push((head, body));
            }
        }
    }
    out
}

pub fn submasks(m: u32) -> Vec<u32> {
    let mut out = vec![0];
    let mut x = 0u32;
    loop {
        x = x.wrapping_sub(m) & m;
        if x == 0 {
            return out;
        }
        out.push(x);
    }
}

pub fn pos_program(rules: &[PosRule], bits: &Bits) -> Program {
    Program::new(rules.iter().map(|&(h, b)| Rule::new(bits.set(h), bits.set(b).into_iter().map(BodyLiteral::pos))))
}

/// Every rule over `atoms`: any head subset, each atom absent, positive or
/// negated in the body.
pub fn all_rules(atoms: &[Atom]) -> Vec<Rule> {
    let n = atoms.len();
    let mut out = Vec::new();
    for h in 0u32..1 << n {
        for code in 0..3usize.pow(n as u32) {
            let head: Vec<Atom> = (0..n).filter(|i| h >> i & 1 == 1).map(|i| atoms[i].clone()).collect();
            let mut body = Vec::new();
            for (i, a) in atoms.iter().enumerate() {
                match code / 3usize.pow(i as u32) % 3 {
                    1 => body.push(BodyLiteral::pos(a.clone())),
                    2 => body.push(BodyLiteral::neg(a.clone())),
                    _ => {}
                }
            }
            out.push(Rule::new(head, body));
        }
    }
    out
}

/// All programs with at most `k` distinct rules from `rules`.
pub fn programs_upto(rules: &[Rule], k: usize) -> Vec<Program> {
    fn go(rules: &[Rule], start: usize, k: usize, cur: &mut Vec<Rule>, out: &mut Vec<Program>) {
        out.push(Program::new(cur.iter().cloned()));
        if cur.len() == k {
            return;
        }
        for i in start..rules.len() {
            cur.push(rules[i].clone());
            go(rules, i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rules, 0, k, &mut Vec::new(), &mut out);
    out
}

pub const POOL: [&str; 6] = ["p(1)", "p(2)", "q(1)", "q(2)", "a", "b"];

pub const EXTERNALS: [&str; 10] = [
    "&id[p]()",
    "&neg[q]()",
    "&true[a]()",
    "&aOrNotB[a,b]()",
    "&atMostOne[p]()",
    "&diff[p,q](1)",
    "&diff[p,q](2)",
    "&even[q]()",
    "&countGeq[p,2]()",
    "&id[b]()",
];

/// Program text over `pool` with 1 to `max_rules` rules and 1 or 2 external
/// occurrences of random polarity.
pub fn random_hex_text<R: Rng>(rng: &mut R, pool: &[&str], externals: &[&str], max_rules: usize) -> String {
    let n = rng.gen_range(1..=max_rules);
    let mut rules: Vec<(Vec<String>, Vec<String>)> = (0..n)
        .map(|_| {
            let hn = *[0, 1, 1, 1, 2, 2].choose(rng).unwrap();
            let head: BTreeSet<&str> = (0..hn).map(|_| *pool.choose(rng).unwrap()).collect();
            let bn = rng.gen_range(0..=2);
            let body = (0..bn)
                .map(|_| {
                    let a = *pool.choose(rng).unwrap();
                    if rng.gen_bool(0.4) {
                        format!("not {a}")
                    } else {
                        a.to_string()
                    }
                })
                .collect();
            (head.into_iter().map(String::from).collect(), body)
        })
        .collect();
    let k = rng.gen_range(1..=2);
    for _ in 0..k {
        let e = *externals.choose(rng).unwrap();
        let lit = if rng.gen_bool(0.35) { format!("not {e}") } else { e.to_string() };
        let i = rng.gen_range(0..rules.len());
        rules[i].1.push(lit);
    }
    let mut text = String::new();
    for (h, b) in rules {
        if h.is_empty() && b.is_empty() {
            continue;
        }
        text.push_str(&h.join(" v "));
        if !b.is_empty() {
            text.push_str(" :- ");
            text.push_str(&b.join(", "));
        }
        text.push_str(".\n");
    }
    text
}
