//! Support sets and complete support-set families.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{HexError, Result};
use crate::oracle::OracleRegistry;
use crate::program::{show_set, Atom, AtomSet, ExternalAtom};

/// Default bound on the number of domain atoms for brute-force family work.
pub const FAMILY_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sigma {
    T,
    F,
}

impl Sigma {
    pub fn flip(self) -> Sigma {
        match self {
            Sigma::T => Sigma::F,
            Sigma::F => Sigma::T,
        }
    }

    pub fn value(self) -> bool {
        self == Sigma::T
    }

    pub fn as_char(self) -> char {
        match self {
            Sigma::T => 'T',
            Sigma::F => 'F',
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Consistent signed-literal set: `pos` must be true, `neg` must be false.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportSet {
    pub pos: AtomSet,
    pub neg: AtomSet,
}

impl SupportSet {
    pub fn new(pos: AtomSet, neg: AtomSet) -> Result<Self> {
        if let Some(a) = pos.intersection(&neg).next() {
            return Err(HexError::InconsistentSupportSet { line: 0, atom: a.to_string() });
        }
        Ok(SupportSet { pos, neg })
    }

    pub fn empty() -> Self {
        SupportSet { pos: AtomSet::new(), neg: AtomSet::new() }
    }

    pub fn matches(&self, y: &AtomSet) -> bool {
        self.pos.is_subset(y) && self.neg.is_disjoint(y)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.pos.iter().chain(self.neg.iter())
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lits: Vec<(&Atom, bool)> = self.pos.iter().map(|a| (a, true)).collect();
        lits.extend(self.neg.iter().map(|a| (a, false)));
        lits.sort();
        let parts: Vec<String> = lits.iter().map(|(a, p)| if *p { a.to_string() } else { format!("-{a}") }).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportFamily {
    pub external: ExternalAtom,
    pub sigma: Sigma,
    pub domain: AtomSet,
    pub sets: BTreeSet<SupportSet>,
}

impl SupportFamily {
    pub fn new(
        external: ExternalAtom,
        sigma: Sigma,
        domain: AtomSet,
        sets: impl IntoIterator<Item = SupportSet>,
    ) -> Self {
        SupportFamily { external, sigma, domain, sets: sets.into_iter().collect() }
    }

    /// True iff some member matches `y`.
    pub fn matches(&self, y: &AtomSet) -> bool {
        self.sets.iter().any(|s| s.matches(y))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Atoms used by members that are not in the declared domain.
    pub fn stray_atoms(&self) -> AtomSet {
        self.sets.iter().flat_map(|s| s.atoms()).filter(|a| !self.domain.contains(a)).cloned().collect()
    }

    /// Every member atom must have an input predicate of the external atom.
    pub fn check_inputs(&self) -> Result<()> {
        let preds = self.external.input_predicates();
        for s in &self.sets {
            if let Some(a) = s.atoms().find(|a| !preds.contains(a.predicate.as_str())) {
                return Err(HexError::FamilyDomainMismatch {
                    external: self.external.to_string(),
                    atom: a.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Re-expresses the family over `domain`, treating atoms outside it as
    /// always false.
    pub fn restrict_to(&self, domain: &AtomSet) -> SupportFamily {
        let sets = self
            .sets
            .iter()
            .filter(|s| s.pos.is_subset(domain))
            .map(|s| SupportSet { pos: s.pos.clone(), neg: s.neg.intersection(domain).cloned().collect() })
            .collect();
        SupportFamily { external: self.external.clone(), sigma: self.sigma, domain: domain.clone(), sets }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    care: u64,
    val: u64,
}

impl Cube {
    fn matches(self, m: u64) -> bool {
        m & self.care == self.val
    }

    /// Literals of `self` are a subset of those of `other`.
    fn subsumes(self, other: Cube) -> bool {
        self.care & other.care == self.care && other.val & self.care == self.val
    }
}

struct Index {
    atoms: Vec<Atom>,
    pos: BTreeMap<Atom, usize>,
}

impl Index {
    fn new(domain: &AtomSet) -> Result<Self> {
        if domain.len() > 64 {
            return Err(HexError::CapExceeded { what: "support-set domain".into(), size: domain.len(), cap: 64 });
        }
        let atoms: Vec<Atom> = domain.iter().cloned().collect();
        let pos = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(Index { atoms, pos })
    }

    fn cube(&self, s: &SupportSet) -> Option<Cube> {
        let mut c = Cube { care: 0, val: 0 };
        for a in &s.pos {
            let b = 1u64 << self.pos.get(a)?;
            c.care |= b;
            c.val |= b;
        }
        for a in &s.neg {
            c.care |= 1u64 << self.pos.get(a)?;
        }
        Some(c)
    }

    fn set(&self, c: Cube) -> SupportSet {
        let mut s = SupportSet::empty();
        for (i, a) in self.atoms.iter().enumerate() {
            let b = 1u64 << i;
            if c.care & b != 0 {
                if c.val & b != 0 {
                    s.pos.insert(a.clone());
                } else {
                    s.neg.insert(a.clone());
                }
            }
        }
        s
    }

    fn assignment(&self, m: u64) -> AtomSet {
        self.atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect()
    }

    fn cubes(&self, fam: &SupportFamily) -> Result<Vec<Cube>> {
        fam.sets
            .iter()
            .map(|s| {
                self.cube(s).ok_or_else(|| HexError::FamilyDomainMismatch {
                    external: fam.external.to_string(),
                    atom: s.atoms().find(|a| !self.pos.contains_key(*a)).map(|a| a.to_string()).unwrap_or_default(),
                })
            })
            .collect()
    }
}

fn check_cap(fam_domain: &AtomSet, e: &ExternalAtom, cap: usize) -> Result<()> {
    if fam_domain.len() > cap {
        return Err(HexError::CapExceeded { what: format!("domain of {e}"), size: fam_domain.len(), cap });
    }
    Ok(())
}

/// Brute-force complete family of fully specified sets.
pub fn derive_family(
    reg: &OracleRegistry,
    e: &ExternalAtom,
    domain: &AtomSet,
    sigma: Sigma,
    cap: usize,
) -> Result<SupportFamily> {
    check_cap(domain, e, cap)?;
    reg.get(&e.name)?;
    let idx = Index::new(domain)?;
    let full = if domain.is_empty() { 0 } else { u64::MAX >> (64 - domain.len()) };
    let mut sets = BTreeSet::new();
    for m in 0..(1u64 << domain.len()) {
        let y = idx.assignment(m);
        if reg.eval_external(e, &y)? == sigma.value() {
            sets.insert(idx.set(Cube { care: full, val: m }));
        }
    }
    Ok(SupportFamily { external: e.clone(), sigma, domain: domain.clone(), sets })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyDefect {
    /// Assignment with the family's truth value that no member matches.
    Uncovered(AtomSet),
    /// Assignment matched by a member on which the oracle disagrees.
    Unsound(AtomSet),
}

/// First soundness or completeness violation, if any.
pub fn verify_report(reg: &OracleRegistry, fam: &SupportFamily, cap: usize) -> Result<Option<FamilyDefect>> {
    check_cap(&fam.domain, &fam.external, cap)?;
    let idx = Index::new(&fam.domain)?;
    let cubes = idx.cubes(fam)?;
    for m in 0..(1u64 << fam.domain.len()) {
        let y = idx.assignment(m);
        let value = reg.eval_external(&fam.external, &y)?;
        let matched = cubes.iter().any(|c| c.matches(m));
        if matched && value != fam.sigma.value() {
            return Ok(Some(FamilyDefect::Unsound(y)));
        }
        if !matched && value == fam.sigma.value() {
            return Ok(Some(FamilyDefect::Uncovered(y)));
        }
    }
    Ok(None)
}

pub fn verify_family(reg: &OracleRegistry, fam: &SupportFamily, cap: usize) -> Result<bool> {
    Ok(verify_report(reg, fam, cap)?.is_none())
}

/// Verification that turns a defect into the matching error.
pub fn check_family(reg: &OracleRegistry, fam: &SupportFamily, cap: usize) -> Result<()> {
    match verify_report(reg, fam, cap)? {
        None => Ok(()),
        Some(FamilyDefect::Uncovered(y)) => {
            Err(HexError::IncompleteFamily { external: fam.external.to_string(), assignment: show_set(&y) })
        }
        Some(FamilyDefect::Unsound(y)) => {
            Err(HexError::UnsoundFamily { external: fam.external.to_string(), assignment: show_set(&y) })
        }
    }
}

/// Matched-assignment table indexed by the bitmask of the sorted domain.
pub fn matched_assignments(fam: &SupportFamily, cap: usize) -> Result<Vec<bool>> {
    check_cap(&fam.domain, &fam.external, cap)?;
    let idx = Index::new(&fam.domain)?;
    let cubes = idx.cubes(fam)?;
    Ok((0..(1u64 << fam.domain.len())).map(|m| cubes.iter().any(|c| c.matches(m))).collect())
}

fn absorb(cubes: Vec<Cube>) -> Vec<Cube> {
    let mut cubes: Vec<Cube> = cubes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    cubes.sort_by_key(|c| c.care.count_ones());
    let mut kept: Vec<Cube> = Vec::new();
    for c in cubes {
        if !kept.iter().any(|k| k.subsumes(c)) {
            kept.push(c);
        }
    }
    kept
}

/// Family of the opposite polarity: consistent picks from the product of
/// sign-flipped members.
pub fn convert_polarity(fam: &SupportFamily) -> Result<SupportFamily> {
    let idx = Index::new(&fam.domain)?;
    let cubes = idx.cubes(fam)?;
    let mut acc = vec![Cube { care: 0, val: 0 }];
    for s in &cubes {
        let mut next = Vec::new();
        for c in &acc {
            for i in 0..64 {
                let b = 1u64 << i;
                if s.care & b == 0 {
                    continue;
                }
                let flipped = !s.val & b;
                if c.care & b != 0 {
                    if c.val & b == flipped {
                        next.push(*c);
                    }
                } else {
                    next.push(Cube { care: c.care | b, val: c.val | flipped });
                }
            }
        }
        acc = absorb(next);
        if acc.is_empty() {
            break;
        }
    }
    let sets = acc.into_iter().map(|c| idx.set(c)).collect();
    Ok(SupportFamily { external: fam.external.clone(), sigma: fam.sigma.flip(), domain: fam.domain.clone(), sets })
}

/// Merges sets that differ in the sign of a single atom until no merge
/// applies, then drops members subsumed by others.
pub fn minimize_family(fam: &SupportFamily) -> Result<SupportFamily> {
    let idx = Index::new(&fam.domain)?;
    let mut cur = absorb(idx.cubes(fam)?);
    loop {
        let present: HashSet<Cube> = cur.iter().copied().collect();
        let mut merged = BTreeSet::new();
        let mut used = HashSet::new();
        for &c in &cur {
            let mut bits = c.care;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits &= bits - 1;
                if present.contains(&Cube { care: c.care, val: c.val ^ b }) {
                    merged.insert(Cube { care: c.care & !b, val: c.val & !b });
                    used.insert(c);
                }
            }
        }
        if merged.is_empty() {
            break;
        }
        let mut next: Vec<Cube> = merged.into_iter().collect();
        next.extend(cur.into_iter().filter(|c| !used.contains(c)));
        cur = absorb(next);
    }
    let sets = cur.into_iter().map(|c| idx.set(c)).collect();
    Ok(SupportFamily { external: fam.external.clone(), sigma: fam.sigma, domain: fam.domain.clone(), sets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Atom {
        Atom::prop(s)
    }

    fn ss(pos: &[&str], neg: &[&str]) -> SupportSet {
        SupportSet::new(pos.iter().map(|s| a(s)).collect(), neg.iter().map(|s| a(s)).collect()).unwrap()
    }

    fn dom(xs: &[&str]) -> AtomSet {
        xs.iter().map(|s| a(s)).collect()
    }

    fn aornotb() -> ExternalAtom {
        ExternalAtom::with_preds("aOrNotB", &["a", "b"], &[])
    }

    #[test]
    fn derive_a_or_not_b_full_form() {
        let reg = OracleRegistry::with_builtins();
        let fam = derive_family(&reg, &aornotb(), &dom(&["a", "b"]), Sigma::T, FAMILY_CAP).unwrap();
        let want: BTreeSet<_> = [ss(&["a", "b"], &[]), ss(&["a"], &["b"]), ss(&[], &["a", "b"])].into();
        assert_eq!(fam.sets, want);
        let min = minimize_family(&fam).unwrap();
        assert_eq!(min.sets, [ss(&["a"], &[]), ss(&[], &["b"])].into());
        assert!(verify_family(&reg, &min, FAMILY_CAP).unwrap());
    }

    #[test]
    fn derive_true_family() {
        let reg = OracleRegistry::with_builtins();
        let e = ExternalAtom::with_preds("true", &["a"], &[]);
        let fam = derive_family(&reg, &e, &dom(&["a"]), Sigma::T, FAMILY_CAP).unwrap();
        assert_eq!(fam.sets, [ss(&["a"], &[]), ss(&[], &["a"])].into());
        assert_eq!(minimize_family(&fam).unwrap().sets, [SupportSet::empty()].into());
    }

    #[test]
    fn derive_over_empty_domain() {
        let reg = OracleRegistry::with_builtins();
        let t = ExternalAtom::with_preds("true", &[], &[]);
        assert_eq!(derive_family(&reg, &t, &AtomSet::new(), Sigma::T, 20).unwrap().sets, [SupportSet::empty()].into());
        let id = ExternalAtom::with_preds("id", &[], &[]);
        assert!(derive_family(&reg, &id, &AtomSet::new(), Sigma::T, 20).unwrap().sets.is_empty());
    }

    #[test]
    fn derive_respects_cap() {
        let reg = OracleRegistry::with_builtins();
        let e = ExternalAtom::with_preds("even", &["p"], &[]);
        let d: AtomSet = (0..5).map(|i| Atom::new("p", &[&i.to_string()])).collect();
        let err = derive_family(&reg, &e, &d, Sigma::T, 4).unwrap_err();
        assert!(err.to_string().contains("family derivation cap exceeded"));
    }

    #[test]
    fn verify_detects_missing_assignment() {
        let reg = OracleRegistry::with_builtins();
        let e = ExternalAtom::with_preds("true", &["a"], &[]);
        let fam = SupportFamily::new(e, Sigma::T, dom(&["a"]), [ss(&["a"], &[])]);
        assert_eq!(verify_report(&reg, &fam, 20).unwrap(), Some(FamilyDefect::Uncovered(AtomSet::new())));
        let err = check_family(&reg, &fam, 20).unwrap_err();
        assert!(err.to_string().contains("{}"));
    }

    #[test]
    fn verify_empty_family_for_false_oracle() {
        let reg = OracleRegistry::with_builtins();
        let e = ExternalAtom::with_preds("id", &[], &[]);
        let fam = SupportFamily::new(e, Sigma::T, AtomSet::new(), []);
        assert!(verify_family(&reg, &fam, 20).unwrap());
    }

    #[test]
    fn convert_examples() {
        let fam = SupportFamily::new(aornotb(), Sigma::T, dom(&["a", "b"]), [ss(&["a"], &[]), ss(&[], &["b"])]);
        let conv = convert_polarity(&fam).unwrap();
        assert_eq!(conv.sigma, Sigma::F);
        assert_eq!(conv.sets, [ss(&["b"], &["a"])].into());
        let reg = OracleRegistry::with_builtins();
        assert!(verify_family(&reg, &conv, 20).unwrap());

        let always = SupportFamily::new(aornotb(), Sigma::T, dom(&["a", "b"]), [SupportSet::empty()]);
        assert!(convert_polarity(&always).unwrap().sets.is_empty());
        let never = SupportFamily::new(aornotb(), Sigma::T, dom(&["a", "b"]), []);
        assert_eq!(convert_polarity(&never).unwrap().sets, [SupportSet::empty()].into());
    }

    #[test]
    fn minimize_leaves_unmergeable_sets() {
        let fam = SupportFamily::new(aornotb(), Sigma::T, dom(&["a", "b"]), [ss(&["a"], &[])]);
        assert_eq!(minimize_family(&fam).unwrap().sets, fam.sets);
    }

    #[test]
    fn inconsistent_set_rejected() {
        assert!(SupportSet::new(dom(&["a"]), dom(&["a"])).is_err());
    }

    #[test]
    fn restrict_drops_impossible_members() {
        let e = ExternalAtom::with_preds("g", &["p"], &[]);
        let p1 = Atom::new("p", &["1"]);
        let p2 = Atom::new("p", &["2"]);
        let fam = SupportFamily::new(
            e,
            Sigma::T,
            [p1.clone(), p2.clone()].into(),
            [
                SupportSet::new([p2.clone()].into(), AtomSet::new()).unwrap(),
                SupportSet::new(AtomSet::new(), [p1.clone(), p2].into()).unwrap(),
            ],
        );
        let r = fam.restrict_to(&[p1.clone()].into());
        assert_eq!(r.sets, [SupportSet::new(AtomSet::new(), [p1].into()).unwrap()].into());
    }
}
