//! ⟨H,B⟩-equivalence: σ-models, witnesses and counterexample programs.

use std::collections::BTreeSet;
use std::fmt;

use crate::compiled::Compiled;
use crate::error::{HexError, Result};
use crate::oracle::OracleRegistry;
use crate::program::{show_set, AtomSet, BodyLiteral, Program, Rule};

/// Universe bound for σ-model and witness enumeration.
pub const EQUIV_CAP: usize = 16;

/// Head atoms `h` and body atoms `b` allowed in added programs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HBContext {
    pub h: AtomSet,
    pub b: AtomSet,
}

impl HBContext {
    pub fn new(h: AtomSet, b: AtomSet) -> Self {
        HBContext { h, b }
    }

    pub fn atoms(&self) -> AtomSet {
        self.h.union(&self.b).cloned().collect()
    }
}

/// A pair `(X, Y)` of σ_⟨H,B⟩(P). For `X ⊊ Y`, `X` is stored projected to H ∪ B.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HBModel {
    pub x: AtomSet,
    pub y: AtomSet,
}

impl fmt::Display for HBModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", show_set(&self.x), show_set(&self.y))
    }
}

/// A pair `(X, Y)` certifying that `P ⊆_⟨H,B⟩ Q` fails.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    pub x: AtomSet,
    pub y: AtomSet,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", show_set(&self.x), show_set(&self.y))
    }
}

/// `X ≤ X'`: `X|H ⊆ X'|H` and `X|B ⊇ X'|B`.
pub fn leq_bh(x: &AtomSet, x2: &AtomSet, ctx: &HBContext) -> bool {
    let xh: AtomSet = x.intersection(&ctx.h).cloned().collect();
    let x2h: AtomSet = x2.intersection(&ctx.h).cloned().collect();
    let xb: AtomSet = x.intersection(&ctx.b).cloned().collect();
    let x2b: AtomSet = x2.intersection(&ctx.b).cloned().collect();
    xh.is_subset(&x2h) && xb.is_superset(&x2b)
}

/// `X < X'`: `X ≤ X'` and the two differ on H ∪ B.
pub fn lt_bh(x: &AtomSet, x2: &AtomSet, ctx: &HBContext) -> bool {
    let hb = ctx.atoms();
    leq_bh(x, x2, ctx) && x.intersection(&hb).ne(x2.intersection(&hb))
}

/// Masks of H and B over a compiled universe.
#[derive(Clone, Copy)]
struct Masks {
    h: u64,
    b: u64,
}

impl Masks {
    fn of(c: &Compiled, ctx: &HBContext) -> Self {
        Masks { h: c.mask_of(&ctx.h), b: c.mask_of(&ctx.b) }
    }

    fn leq(self, x: u64, x2: u64) -> bool {
        x & self.h & !x2 == 0 && x2 & self.b & !x == 0
    }

    fn lt(self, x: u64, x2: u64) -> bool {
        let hb = self.h | self.b;
        self.leq(x, x2) && x & hb != x2 & hb
    }
}

fn universe_for(programs: &[&Program], ctx: &HBContext, universe: &AtomSet) -> AtomSet {
    let mut all = universe.clone();
    all.extend(ctx.atoms());
    for p in programs {
        all.extend(p.ordinary_atoms());
    }
    all
}

/// Condition (i): `Y ⊨ P` and every smaller model of fP^Y loses an H-atom.
fn condition_i(c: &Compiled, m: Masks, y: u64) -> Result<bool> {
    if !c.is_model(y)? {
        return Ok(false);
    }
    Ok(c.reduct_models_below(y)?.iter().all(|&z| z & m.h != y & m.h))
}

/// σ_⟨H,B⟩(P) over `universe ∪ A(P) ∪ H ∪ B`.
pub fn sigma_models(
    p: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<BTreeSet<HBModel>> {
    let all = universe_for(&[p], ctx, universe);
    sigma_over(p, ctx, &all, reg)
}

fn sigma_over(p: &Program, ctx: &HBContext, all: &AtomSet, reg: &OracleRegistry) -> Result<BTreeSet<HBModel>> {
    let c = Compiled::new(p, all, reg, EQUIV_CAP)?;
    let m = Masks::of(&c, ctx);
    let hb = m.h | m.b;
    let mut out = BTreeSet::new();
    for y in 0..=c.full_mask() {
        if !condition_i(&c, m, y)? {
            continue;
        }
        out.insert(HBModel { x: c.set_of(y), y: c.set_of(y) });
        let projections: BTreeSet<u64> = c.reduct_models_below(y)?.into_iter().map(|z| z & hb).collect();
        for &x in &projections {
            if !projections.iter().any(|&x2| m.lt(x, x2)) {
                out.insert(HBModel { x: c.set_of(x), y: c.set_of(y) });
            }
        }
    }
    Ok(out)
}

/// `P ≡_⟨H,B⟩ Q`, decided by comparing σ-models over the joint universe.
pub fn equivalent(p: &Program, q: &Program, ctx: &HBContext, universe: &AtomSet, reg: &OracleRegistry) -> Result<bool> {
    let all = universe_for(&[p, q], ctx, universe);
    Ok(sigma_over(p, ctx, &all, reg)? == sigma_over(q, ctx, &all, reg)?)
}

fn herbrand_base(p: &Program, q: &Program) -> AtomSet {
    p.ordinary_atoms().union(&q.ordinary_atoms()).cloned().collect()
}

/// ⟨HB, HB⟩-equivalence over the joint atoms of `p` and `q`.
pub fn strong_equivalent(p: &Program, q: &Program, reg: &OracleRegistry) -> Result<bool> {
    let hb = herbrand_base(p, q);
    equivalent(p, q, &HBContext::new(hb.clone(), hb), &AtomSet::new(), reg)
}

/// ⟨HB, ∅⟩-equivalence over the joint atoms of `p` and `q`.
pub fn uniform_equivalent(p: &Program, q: &Program, reg: &OracleRegistry) -> Result<bool> {
    equivalent(p, q, &HBContext::new(herbrand_base(p, q), AtomSet::new()), &AtomSet::new(), reg)
}

struct Pair<'r> {
    p: Compiled<'r>,
    q: Compiled<'r>,
    m: Masks,
}

impl<'r> Pair<'r> {
    fn new(p: &Program, q: &Program, ctx: &HBContext, universe: &AtomSet, reg: &'r OracleRegistry) -> Result<Self> {
        let all = universe_for(&[p, q], ctx, universe);
        let cp = Compiled::new(p, &all, reg, EQUIV_CAP)?;
        let cq = Compiled::new(q, &all, reg, EQUIV_CAP)?;
        let m = Masks::of(&cp, ctx);
        Ok(Pair { p: cp, q: cq, m })
    }

    /// Least `X` completing `Y` to a witness, given condition (i) holds.
    fn witness_x(&self, y: u64) -> Result<Option<u64>> {
        if !self.q.is_model(y)? {
            return Ok(Some(0));
        }
        let red_q = self.q.reduct(y)?;
        let p_models = self.p.reduct_models_below(y)?;
        let mut x = 0u64;
        loop {
            if x != y && self.q.satisfies(&red_q, x)? && !p_models.iter().any(|&x2| self.m.leq(x, x2)) {
                return Ok(Some(x));
            }
            x = x.wrapping_sub(y) & y;
            if x == 0 {
                return Ok(None);
            }
        }
    }

    fn is_witness(&self, x: u64, y: u64) -> Result<bool> {
        if x & !y != 0 || !condition_i(&self.p, self.m, y)? {
            return Ok(false);
        }
        if !self.q.is_model(y)? {
            return Ok(true);
        }
        if x == y || !self.q.satisfies(&self.q.reduct(y)?, x)? {
            return Ok(false);
        }
        Ok(!self.p.reduct_models_below(y)?.iter().any(|&x2| self.m.leq(x, x2)))
    }
}

/// The least witness for `P ⊄_⟨H,B⟩ Q`, ordered by `Y` then `X` in
/// characteristic-vector order, or `None` if the containment holds.
pub fn find_witness(
    p: &Program,
    q: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<Option<Witness>> {
    let pair = Pair::new(p, q, ctx, universe, reg)?;
    for y in 0..=pair.p.full_mask() {
        if !condition_i(&pair.p, pair.m, y)? {
            continue;
        }
        if let Some(x) = pair.witness_x(y)? {
            return Ok(Some(Witness { x: pair.p.set_of(x), y: pair.p.set_of(y) }));
        }
    }
    Ok(None)
}

/// Checks the witness conditions for `(X, Y)` against `P` and `Q`.
pub fn is_witness(
    w: &Witness,
    p: &Program,
    q: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<bool> {
    let mut u = universe.clone();
    u.extend(w.y.iter().cloned());
    let pair = Pair::new(p, q, ctx, &u, reg)?;
    pair.is_witness(pair.p.mask_of(&w.x), pair.p.mask_of(&w.y))
}

/// An ordinary `R ∈ P_⟨H,B⟩` with `Y ∈ AS(P ∪ R) ∖ AS(Q ∪ R)`.
pub fn witness_to_counterexample(
    w: &Witness,
    p: &Program,
    q: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<Program> {
    if !w.x.is_subset(&w.y) || !is_witness(w, p, q, ctx, universe, reg)? {
        return Err(HexError::InvalidWitness(w.to_string()));
    }
    let y_models_q = q.satisfied_by(&w.y, reg)?;
    let mut rules = Vec::new();
    if !y_models_q {
        rules.extend(w.y.intersection(&ctx.h).cloned().map(Rule::fact));
    } else {
        rules.extend(w.x.intersection(&ctx.h).cloned().map(Rule::fact));
        let rest: AtomSet = w.y.difference(&w.x).cloned().collect();
        for a in rest.intersection(&ctx.h) {
            for b in rest.intersection(&ctx.b).filter(|b| *b != a) {
                rules.push(Rule::new([a.clone()], [BodyLiteral::pos(b.clone())]));
            }
        }
    }
    Ok(Program::new(rules))
}

/// The GL reduct `R^Y`, a positive program that still separates.
pub fn positive_counterexample(r: &Program, y: &AtomSet) -> Result<Program> {
    r.gl_reduct(y)
}

/// A head atom of `r` outside H, a body atom outside B, or an external atom.
pub fn outside_context(r: &Program, ctx: &HBContext) -> Option<String> {
    for rule in &r.rules {
        if let Some(a) = rule.head.iter().find(|a| !ctx.h.contains(*a)) {
            return Some(a.to_string());
        }
        for l in rule.body() {
            match l.atom() {
                Some(a) if !ctx.b.contains(a) => return Some(a.to_string()),
                None => return Some(l.to_string()),
                _ => {}
            }
        }
    }
    None
}
