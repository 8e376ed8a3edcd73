use std::collections::BTreeMap;

use crate::error::{HexError, Result};
use crate::family::{check_family, convert_polarity, derive_family, minimize_family, Sigma, SupportFamily, FAMILY_CAP};
use crate::oracle::OracleRegistry;
use crate::program::{AtomSet, ExternalAtom, Occurrence, Polarity, Program};

/// Domains up to this size get their derived families minimized.
const MINIMIZE_CAP: usize = 12;

/// Supplies complete families for external atoms: user files first, then the
/// oracle's own description, then brute-force derivation. Results are cached
/// per external atom, domain and polarity.
pub struct FamilyResolver<'a> {
    reg: &'a OracleRegistry,
    user: &'a [SupportFamily],
    cache: BTreeMap<(ExternalAtom, AtomSet, Sigma), SupportFamily>,
    /// Oracle calls spent deriving and verifying.
    pub setup_calls: u64,
    pub notes: Vec<String>,
}

impl<'a> FamilyResolver<'a> {
    pub fn new(reg: &'a OracleRegistry, user: &'a [SupportFamily]) -> Self {
        FamilyResolver { reg, user, cache: BTreeMap::new(), setup_calls: 0, notes: Vec::new() }
    }

    pub fn resolve(&mut self, e: &ExternalAtom, domain: &AtomSet, sigma: Sigma) -> Result<SupportFamily> {
        let key = (e.clone(), domain.clone(), sigma);
        if let Some(f) = self.cache.get(&key) {
            return Ok(f.clone());
        }
        let fam = self.obtain(e, domain, sigma)?;
        self.cache.insert(key, fam.clone());
        Ok(fam)
    }

    /// One family per occurrence of `p`: T for positive, F for negated, each
    /// over the input atoms found in `atoms`.
    pub fn resolve_occurrences(&mut self, p: &Program, atoms: &AtomSet) -> Result<BTreeMap<Occurrence, SupportFamily>> {
        let mut out = BTreeMap::new();
        for occ in p.occurrences() {
            let sigma = match occ.polarity {
                Polarity::Positive => Sigma::T,
                Polarity::Negated => Sigma::F,
            };
            let f = self.resolve(&occ.atom, &occ.atom.input_atoms(atoms), sigma)?;
            out.insert(occ, f);
        }
        Ok(out)
    }

    fn obtain(&mut self, e: &ExternalAtom, domain: &AtomSet, sigma: Sigma) -> Result<SupportFamily> {
        let user = self.user.iter().find(|f| &f.external == e && f.sigma == sigma);
        let user = match user {
            Some(f) => Some(f.clone()),
            None => match self.user.iter().find(|f| &f.external == e) {
                Some(f) => Some(convert_polarity(f)?),
                None => None,
            },
        };
        if let Some(f) = user {
            f.check_inputs()?;
            let f = f.restrict_to(domain);
            self.verify(&f)?;
            return Ok(f);
        }
        let oracle = self.reg.get(&e.name).map_err(|_| HexError::MissingFamily(e.to_string()))?.clone();
        let described = match oracle.support_family(e, domain, sigma) {
            Some(f) => Some(f),
            None => match oracle.support_family(e, domain, sigma.flip()) {
                Some(f) => Some(convert_polarity(&f)?),
                None => None,
            },
        };
        if let Some(f) = described {
            let f = f.restrict_to(domain);
            self.verify(&f)?;
            return Ok(f);
        }
        let f = derive_family(self.reg, e, domain, sigma, FAMILY_CAP)?;
        self.setup_calls += 1u64 << domain.len();
        if domain.len() <= MINIMIZE_CAP {
            minimize_family(&f)
        } else {
            Ok(f)
        }
    }

    fn verify(&mut self, f: &SupportFamily) -> Result<()> {
        if self.reg.contains(&f.external.name) && f.domain.len() <= FAMILY_CAP {
            check_family(self.reg, f, FAMILY_CAP)?;
            self.setup_calls += 1u64 << f.domain.len();
        } else {
            self.notes.push(format!("family for {} {} was used without verification", f.external, f.sigma));
        }
        Ok(())
    }
}
