//! Persistent inconsistency: no extension from P_⟨H,B⟩ yields an answer set.

use std::fmt;

use crate::compiled::Compiled;
use crate::equivalence::HBContext;
use crate::error::Result;
use crate::oracle::OracleRegistry;
use crate::program::{show_set, AtomSet, Program};
use crate::semantics::is_unfounded_set;

/// Universe bound for the inconsistency checks.
pub const INC_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// `Y' ⊊ Y` with `Y' ⊨ fP^Y` and `Y'|H = Y|H`.
    SmallerModel(AtomSet),
    /// Nonempty unfounded set `U ⊆ Y ∖ H`.
    Unfounded(AtomSet),
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::SmallerModel(s) => write!(f, "smaller reduct model {}", show_set(s)),
            Evidence::Unfounded(u) => write!(f, "unfounded set {}", show_set(u)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelEvidence {
    pub model: AtomSet,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncReport {
    pub verdict: bool,
    /// Evidence per classical model, in characteristic-vector order, up to
    /// the refuting model if there is one.
    pub evidence: Vec<ModelEvidence>,
    /// First classical model without evidence.
    pub refuting_model: Option<AtomSet>,
    pub notes: Vec<String>,
}

impl fmt::Display for IncReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "persistently inconsistent: {}", if self.verdict { "yes" } else { "no" })?;
        for e in &self.evidence {
            writeln!(f, "  model {}: {}", show_set(&e.model), e.evidence)?;
        }
        if let Some(y) = &self.refuting_model {
            writeln!(f, "  model {} has no evidence", show_set(y))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn universe_for(p: &Program, ctx: &HBContext, universe: &AtomSet) -> AtomSet {
    let mut all = universe.clone();
    all.extend(ctx.atoms());
    all.extend(p.ordinary_atoms());
    all
}

fn b_note() -> Vec<String> {
    vec!["B does not affect persistent inconsistency; only H is used".into()]
}

/// Decides the criterion with smaller models of the FLP reduct.
pub fn persistently_inconsistent(
    p: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<IncReport> {
    let all = universe_for(p, ctx, universe);
    let c = Compiled::new(p, &all, reg, INC_CAP)?;
    let h = c.mask_of(&ctx.h);
    let mut evidence = Vec::new();
    for y in c.models()? {
        let found = c.reduct_models_below(y)?.into_iter().find(|z| z & h == y & h);
        match found {
            Some(z) => {
                evidence.push(ModelEvidence { model: c.set_of(y), evidence: Evidence::SmallerModel(c.set_of(z)) })
            }
            None => {
                return Ok(IncReport { verdict: false, evidence, refuting_model: Some(c.set_of(y)), notes: b_note() })
            }
        }
    }
    Ok(IncReport { verdict: true, evidence, refuting_model: None, notes: b_note() })
}

/// Subsets of `m` ordered by size, then in characteristic-vector order.
fn subsets_by_size(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = 0u64;
    loop {
        out.push(x);
        x = x.wrapping_sub(m) & m;
        if x == 0 {
            break;
        }
    }
    out.sort_by_key(|s| s.count_ones());
    out
}

/// Decides the criterion by looking for a cardinality-minimal nonempty
/// unfounded set `U ⊆ Y ∖ H` for each classical model `Y`.
pub fn persistently_inconsistent_ufs(
    p: &Program,
    ctx: &HBContext,
    universe: &AtomSet,
    reg: &OracleRegistry,
) -> Result<IncReport> {
    let all = universe_for(p, ctx, universe);
    let c = Compiled::new(p, &all, reg, INC_CAP)?;
    let h = c.mask_of(&ctx.h);
    let mut evidence = Vec::new();
    for y in c.models()? {
        let ys = c.set_of(y);
        let mut found = None;
        for u in subsets_by_size(y & !h) {
            if u == 0 {
                continue;
            }
            let us = c.set_of(u);
            if is_unfounded_set(&us, p, &ys, reg)? {
                found = Some(us);
                break;
            }
        }
        match found {
            Some(u) => evidence.push(ModelEvidence { model: ys, evidence: Evidence::Unfounded(u) }),
            None => return Ok(IncReport { verdict: false, evidence, refuting_model: Some(ys), notes: b_note() }),
        }
    }
    Ok(IncReport { verdict: true, evidence, refuting_model: None, notes: b_note() })
}
