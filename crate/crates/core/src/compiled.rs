//! Bitmask form of a program over a small universe, used by the brute-force
//! reference evaluator and the equivalence and inconsistency checkers.
//!
//! Atom `i` of the sorted universe is bit `n-1-i`, so numeric order of masks is
//! characteristic-vector order of assignments.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{HexError, Result};
use crate::oracle::OracleRegistry;
use crate::program::{Atom, AtomSet, ExternalAtom, LiteralContent, Program};

/// Default universe bound for brute-force enumeration.
pub const BRUTE_CAP: usize = 22;

#[derive(Debug, Clone)]
struct CRule {
    head: u64,
    pos: u64,
    neg: u64,
    ext_pos: Vec<usize>,
    ext_neg: Vec<usize>,
}

struct CExt {
    atom: ExternalAtom,
    input_mask: u64,
    cache: RefCell<HashMap<u64, bool>>,
}

pub struct Compiled<'r> {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    rules: Vec<CRule>,
    exts: Vec<CExt>,
    reg: &'r OracleRegistry,
}

impl<'r> Compiled<'r> {
    /// Compiles `p` over `universe ∪ A(P)`; fails when that exceeds `cap` atoms.
    pub fn new(p: &Program, universe: &AtomSet, reg: &'r OracleRegistry, cap: usize) -> Result<Self> {
        let mut all = universe.clone();
        all.extend(p.ordinary_atoms());
        if all.len() > cap.min(63) {
            return Err(HexError::CapExceeded { what: "universe".into(), size: all.len(), cap: cap.min(63) });
        }
        let atoms: Vec<Atom> = all.into_iter().collect();
        let n = atoms.len();
        let index: HashMap<Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let bit = |a: &Atom| 1u64 << (n - 1 - index[a]);
        let mut ext_ids: HashMap<ExternalAtom, usize> = HashMap::new();
        let mut exts = Vec::new();
        let mut rules = Vec::new();
        for r in &p.rules {
            let mut cr = CRule { head: 0, pos: 0, neg: 0, ext_pos: vec![], ext_neg: vec![] };
            for h in &r.head {
                cr.head |= bit(h);
            }
            for l in r.body() {
                match &l.content {
                    LiteralContent::Atom(a) => {
                        if l.negated {
                            cr.neg |= bit(a)
                        } else {
                            cr.pos |= bit(a)
                        }
                    }
                    LiteralContent::External(e) => {
                        let k = *ext_ids.entry(e.clone()).or_insert_with(|| {
                            let input_mask =
                                e.input_atoms(&index.keys().cloned().collect()).iter().fold(0, |m, a| m | bit(a));
                            exts.push(CExt { atom: e.clone(), input_mask, cache: RefCell::new(HashMap::new()) });
                            exts.len() - 1
                        });
                        if l.negated {
                            cr.ext_neg.push(k)
                        } else {
                            cr.ext_pos.push(k)
                        }
                    }
                }
            }
            rules.push(cr);
        }
        for e in &exts {
            reg.get(&e.atom.name)?;
        }
        Ok(Compiled { atoms, index, rules, exts, reg })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn full_mask(&self) -> u64 {
        if self.atoms.is_empty() {
            0
        } else {
            u64::MAX >> (64 - self.atoms.len())
        }
    }

    pub fn mask_of(&self, s: &AtomSet) -> u64 {
        let n = self.atoms.len();
        s.iter().filter_map(|a| self.index.get(a)).fold(0, |m, &i| m | 1u64 << (n - 1 - i))
    }

    pub fn set_of(&self, m: u64) -> AtomSet {
        let n = self.atoms.len();
        self.atoms.iter().enumerate().filter(|(i, _)| m >> (n - 1 - i) & 1 == 1).map(|(_, a)| a.clone()).collect()
    }

    fn ext_value(&self, k: usize, y: u64) -> Result<bool> {
        let e = &self.exts[k];
        let key = y & e.input_mask;
        if let Some(&v) = e.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = self.reg.eval_external(&e.atom, &self.set_of(key))?;
        e.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn body_holds(&self, r: &CRule, y: u64) -> Result<bool> {
        if r.pos & y != r.pos || r.neg & y != 0 {
            return Ok(false);
        }
        for &k in &r.ext_pos {
            if !self.ext_value(k, y)? {
                return Ok(false);
            }
        }
        for &k in &r.ext_neg {
            if self.ext_value(k, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_model(&self, y: u64) -> Result<bool> {
        for r in &self.rules {
            if r.head & y == 0 && self.body_holds(r, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Indices of the rules of fP^Y.
    pub fn reduct(&self, y: u64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if self.body_holds(r, y)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// `z` satisfies the rules listed in `reduct`.
    pub fn satisfies(&self, reduct: &[usize], z: u64) -> Result<bool> {
        for &i in reduct {
            let r = &self.rules[i];
            if r.head & z == 0 && self.body_holds(r, z)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Proper subsets of `y` that are models of fP^Y, in decreasing numeric order.
    pub fn reduct_models_below(&self, y: u64) -> Result<Vec<u64>> {
        let red = self.reduct(y)?;
        let mut out = Vec::new();
        let mut z = y;
        while z != 0 {
            z = (z - 1) & y;
            if self.satisfies(&red, z)? {
                out.push(z);
            }
        }
        Ok(out)
    }

    pub fn has_smaller_model(&self, y: u64) -> Result<bool> {
        let red = self.reduct(y)?;
        let mut z = y;
        while z != 0 {
            z = (z - 1) & y;
            if self.satisfies(&red, z)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn models(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for y in 0..=self.full_mask() {
            if self.is_model(y)? {
                out.push(y);
            }
        }
        Ok(out)
    }

    pub fn answer_sets(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for y in self.models()? {
            if !self.has_smaller_model(y)? {
                out.push(y);
            }
        }
        Ok(out)
    }
}
