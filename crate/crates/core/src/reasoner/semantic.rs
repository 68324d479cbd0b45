//! Query satisfiability and subsumption w.r.t. the terminological part of a KB,
//! decided by chasing the frozen body of a query.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use super::chase::{chase_compiled, Compiled};
use super::{ChaseConfig, ModelIndex, QuerySpec};
use crate::clausify::clausify;
use crate::error::{Error, Result};
use crate::kb::{Atom, CombinedKb, PredicateKind, Term};

const FROZEN_KEY: &str = "#key";

/// Decides query-level properties against a fixed terminological KB.
/// Frozen chases are cached by the canonical form of the query body.
pub struct SemanticReasoner {
    compiled: Compiled,
    facts: Vec<Atom>,
    cfg: ChaseConfig,
    cache: RefCell<HashMap<String, Rc<Option<ModelIndex>>>>,
    chase_calls: Cell<usize>,
    truncated: Cell<bool>,
}

/// The body of `q` with variables replaced by canonical constants, `key` by `#key`.
fn freeze(q: &QuerySpec) -> (Vec<Atom>, Vec<String>) {
    let mut names: HashMap<&str, String> = HashMap::from([(q.key.as_str(), FROZEN_KEY.to_string())]);
    let mut atoms = Vec::with_capacity(q.body.len());
    for a in &q.body {
        if a.predicate.kind == PredicateKind::OPred {
            continue;
        }
        let args = a
            .args
            .iter()
            .map(|t| match t {
                Term::Variable(v) => {
                    let n = names.len();
                    Term::constant(names.entry(v.as_str()).or_insert_with(|| format!("#v{n}")).clone())
                }
                Term::Constant(c) => Term::constant(c.clone()),
            })
            .collect();
        atoms.push(Atom::new(a.predicate.clone(), args));
    }
    let mut consts: Vec<String> = names.into_values().collect();
    consts.sort();
    (atoms, consts)
}

impl SemanticReasoner {
    /// `kb_cp` is the KB whose frozen-query models are inspected; usually
    /// the input KB without its ground facts.
    pub fn new(kb_cp: &CombinedKb, cfg: ChaseConfig) -> Result<Self> {
        let program = clausify(kb_cp)?;
        Ok(SemanticReasoner {
            compiled: Compiled::new(&program),
            facts: kb_cp.abox.clone(),
            cfg,
            cache: RefCell::new(HashMap::new()),
            chase_calls: Cell::new(0),
            truncated: Cell::new(false),
        })
    }

    /// Number of chases run so far.
    pub fn chase_calls(&self) -> usize {
        self.chase_calls.get()
    }

    /// Whether any frozen chase hit the skolem depth cap.
    pub fn truncated(&self) -> bool {
        self.truncated.get()
    }

    fn frozen(&self, q: &QuerySpec) -> Result<Rc<Option<ModelIndex>>> {
        q.validate()?;
        let (atoms, consts) = freeze(q);
        let key = atoms
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(Rc::clone(hit));
        }
        let mut facts = self.facts.clone();
        facts.extend(atoms);
        self.chase_calls.set(self.chase_calls.get() + 1);
        let ms = chase_compiled(&self.compiled, &facts, &consts, &self.cfg)?;
        if ms.truncated {
            self.truncated.set(true);
        }
        let entry = Rc::new((!ms.inconsistent).then(|| ModelIndex::new(&ms, &ms.named)));
        self.cache.borrow_mut().insert(key, Rc::clone(&entry));
        Ok(entry)
    }

    /// The body of `q` has a model together with the terminological KB.
    pub fn is_satisfiable(&self, q: &QuerySpec) -> Result<bool> {
        Ok(self.frozen(q)?.is_some())
    }

    /// `q2 ⊑ q1`: every answer of `q2` is an answer of `q1` in every extension of the KB.
    pub fn subsumes(&self, q1: &QuerySpec, q2: &QuerySpec) -> Result<bool> {
        match self.frozen(q2)?.as_ref() {
            None => Err(Error::InconsistentKb),
            Some(idx) => idx.is_answer(q1, FROZEN_KEY),
        }
    }

    pub fn equivalent(&self, q1: &QuerySpec, q2: &QuerySpec) -> Result<bool> {
        Ok(self.subsumes(q1, q2)? && self.subsumes(q2, q1)?)
    }
}

pub fn is_satisfiable_query(q: &QuerySpec, kb_cp: &CombinedKb, cfg: &ChaseConfig) -> Result<bool> {
    SemanticReasoner::new(kb_cp, *cfg)?.is_satisfiable(q)
}

pub fn subsumes(q1: &QuerySpec, q2: &QuerySpec, kb_cp: &CombinedKb, cfg: &ChaseConfig) -> Result<bool> {
    SemanticReasoner::new(kb_cp, *cfg)?.subsumes(q1, q2)
}

pub fn equivalent(q1: &QuerySpec, q2: &QuerySpec, kb_cp: &CombinedKb, cfg: &ChaseConfig) -> Result<bool> {
    SemanticReasoner::new(kb_cp, *cfg)?.equivalent(q1, q2)
}
