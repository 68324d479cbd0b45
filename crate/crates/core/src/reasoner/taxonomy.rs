//! Concept and role hierarchies of the terminological part of a KB.

use std::collections::{BTreeMap, BTreeSet};

use super::chase::{chase_compiled, Compiled};
use super::ChaseConfig;
use crate::clausify::clausify;
use crate::error::{Error, Result};
use crate::kb::{Atom, CombinedKb, Predicate, PredicateKind, Term, AUX_PREFIX};

/// A subsumption preorder over a list of names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hierarchy {
    /// Satisfiable names in declaration order.
    names: Vec<String>,
    /// Reflexive-transitive: `name ↦ all subsumers` (satisfiable names only).
    supers: BTreeMap<String, BTreeSet<String>>,
    pub unsatisfiable: BTreeSet<String>,
}

impl Hierarchy {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `sub ⊑ sup`.
    pub fn subsumed_by(&self, sub: &str, sup: &str) -> bool {
        self.supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        self.subsumed_by(a, b) && self.subsumed_by(b, a)
    }

    fn strictly_below(&self, sub: &str, sup: &str) -> bool {
        self.subsumed_by(sub, sup) && !self.subsumed_by(sup, sub)
    }

    /// Direct (transitively reduced) strict subsumers.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        let strict: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .filter(|&s| self.strictly_below(name, s))
            .collect();
        strict
            .iter()
            .copied()
            .filter(|&p| !strict.iter().any(|&q| self.strictly_below(q, p)))
            .collect()
    }

    /// Direct strict subsumees.
    pub fn children(&self, name: &str) -> Vec<&str> {
        self.names
            .iter()
            .map(String::as_str)
            .filter(|&c| self.parents(c).contains(&name))
            .collect()
    }

    /// Names without a strict subsumer.
    pub fn roots(&self) -> Vec<&str> {
        self.names
            .iter()
            .map(String::as_str)
            .filter(|&n| !self.names.iter().any(|s| self.strictly_below(n, s)))
            .collect()
    }

    /// Direct edges `(sub, sup)` in name order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for n in &self.names {
            for p in self.parents(n) {
                out.push((n.as_str(), p));
            }
        }
        out
    }

    /// The induced preorder on `keep`, in the order of `keep`.
    pub fn restrict(&self, keep: &[String]) -> Hierarchy {
        let names: Vec<String> = keep
            .iter()
            .filter(|n| self.supers.contains_key(*n))
            .cloned()
            .collect();
        let set: BTreeSet<&String> = names.iter().collect();
        let supers = names
            .iter()
            .map(|n| {
                let s = self.supers[n].iter().filter(|x| set.contains(x)).cloned().collect();
                (n.clone(), s)
            })
            .collect();
        Hierarchy {
            names,
            supers,
            unsatisfiable: self
                .unsatisfiable
                .iter()
                .filter(|n| keep.contains(n))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    pub concepts: Hierarchy,
    pub roles: Hierarchy,
}

impl Taxonomy {
    pub fn restrict(&self, keep: &[String]) -> Taxonomy {
        Taxonomy {
            concepts: self.concepts.restrict(keep),
            roles: self.roles.restrict(keep),
        }
    }
}

/// Classifies every declared concept and role of `kb_cp` by chasing a
/// single instance of each.
pub fn classify(kb_cp: &CombinedKb, cfg: &ChaseConfig) -> Result<Taxonomy> {
    let program = clausify(kb_cp)?;
    let compiled = Compiled::new(&program);
    let base = chase_compiled(&compiled, &kb_cp.abox, &[], cfg)?;
    if base.inconsistent {
        return Err(Error::InconsistentKb);
    }
    let (c, d) = (Term::constant("#c"), Term::constant("#d"));
    let mut concepts = Hierarchy::default();
    let mut roles = Hierarchy::default();
    for (name, &kind) in &kb_cp.signature {
        if name.starts_with(AUX_PREFIX) {
            continue;
        }
        let (h, probe, args) = match kind {
            PredicateKind::Concept => (&mut concepts, Predicate::concept(name), vec![c.clone()]),
            PredicateKind::Role => (&mut roles, Predicate::role(name), vec![c.clone(), d.clone()]),
            _ => continue,
        };
        let mut facts = kb_cp.abox.clone();
        facts.push(Atom::new(probe, args.clone()));
        let ms = chase_compiled(&compiled, &facts, &[], cfg)?;
        if ms.inconsistent {
            h.unsatisfiable.insert(name.clone());
            continue;
        }
        let entailed = ms.cautious_consequences();
        let supers = entailed
            .iter()
            .filter(|a| a.predicate.kind == kind && a.args == args && !a.predicate.name.starts_with(AUX_PREFIX))
            .map(|a| a.predicate.name.clone())
            .collect();
        h.names.push(name.clone());
        h.supers.insert(name.clone(), supers);
    }
    // Supers may name unsatisfiable or undeclared predicates; keep only ranked names.
    for h in [&mut concepts, &mut roles] {
        let known: BTreeSet<String> = h.names.iter().cloned().collect();
        for s in h.supers.values_mut() {
            s.retain(|n| known.contains(n));
        }
    }
    Ok(Taxonomy { concepts, roles })
}
