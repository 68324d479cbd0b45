//! Minimal-model reasoning: the branching chase, cautious entailment,
//! certain answers of DL-safe conjunctive queries and the query-level
//! decision procedures built on them.

mod chase;
mod db;
mod semantic;
mod taxonomy;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub use chase::chase;
pub use semantic::{equivalent, is_satisfiable_query, subsumes, SemanticReasoner};
pub use taxonomy::{classify, Hierarchy, Taxonomy};

use crate::error::{Error, Result};
use crate::kb::{is_identifier, Atom, CombinedKb, Predicate, PredicateKind, Term, O_PREDICATE};
use db::{CAtom, CTerm, Db, Interner, Join, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseConfig {
    /// Maximum nesting depth of skolem constants.
    pub skolem_depth_cap: usize,
    /// Maximum number of live branches.
    pub max_branches: usize,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            skolem_depth_cap: 3,
            max_branches: 100_000,
        }
    }
}

/// Subset-minimal models of a program, projected to atoms over named constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSet {
    /// Sorted; pairwise subset-incomparable.
    pub models: Vec<BTreeSet<Atom>>,
    pub inconsistent: bool,
    /// Some existential was left unwitnessed at the depth cap.
    pub truncated: bool,
    /// The named individuals of the chase.
    pub named: BTreeSet<String>,
}

impl ModelSet {
    /// Atoms true in every model.
    pub fn cautious_consequences(&self) -> BTreeSet<Atom> {
        let mut it = self.models.iter();
        let Some(first) = it.next() else {
            return BTreeSet::new();
        };
        let mut out = first.clone();
        for m in it {
            out.retain(|a| m.contains(a));
        }
        out
    }
}

/// One atom per line, models separated by `---`.
impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.models.iter().enumerate() {
            if i > 0 {
                writeln!(f, "---")?;
            }
            for a in m {
                writeln!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

fn same_fact(a: &Atom, b: &Atom) -> bool {
    a.predicate.name == b.predicate.name && a.args == b.args
}

/// True iff `atom` holds in every minimal model.
pub fn cautious_entails(ms: &ModelSet, atom: &Atom) -> Result<bool> {
    if ms.inconsistent {
        return Err(Error::InconsistentKb);
    }
    Ok(ms
        .models
        .iter()
        .all(|m| m.iter().any(|a| same_fact(a, atom))))
}

/// A conjunctive query with one distinguished variable. `O` atoms are
/// implicit for every variable and may be omitted from `body`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuerySpec {
    pub key: String,
    pub body: Vec<Atom>,
}

impl QuerySpec {
    pub fn new(key: impl Into<String>, body: Vec<Atom>) -> Self {
        QuerySpec {
            key: key.into(),
            body,
        }
    }

    /// Reads `Q(key) :- A(key), r(key,x)`; the head is optional and defaults
    /// to `Q(key)`. Every argument is a variable; predicates must be declared in `kb`.
    pub fn parse(text: &str, kb: &CombinedKb) -> Result<QuerySpec> {
        let bad = |m: String| Error::InvalidQuery(m);
        let (head, body) = match text.split_once(":-") {
            Some((h, b)) => (Some(h.trim()), b.trim()),
            None => (None, text.trim()),
        };
        let key = match head {
            None => "key".to_string(),
            Some(h) => {
                let inner = h
                    .strip_suffix(')')
                    .and_then(|h| h.split_once('('))
                    .map(|(_, v)| v.trim())
                    .ok_or_else(|| bad(format!("malformed head `{h}`")))?;
                if !is_identifier(inner) {
                    return Err(bad(format!("malformed head `{h}`")));
                }
                inner.to_string()
            }
        };
        let mut atoms = Vec::new();
        let mut rest = body.trim_end_matches('.').trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| bad(format!("expected `(` in `{rest}`")))?;
            let close = rest.find(')').ok_or_else(|| bad(format!("expected `)` in `{rest}`")))?;
            if close < open {
                return Err(bad(format!("unbalanced parentheses in `{rest}`")));
            }
            let name = rest[..open].trim();
            let args: Vec<Term> = rest[open + 1..close]
                .split(',')
                .map(|a| a.trim().trim_start_matches('?'))
                .map(|a| {
                    if is_identifier(a) {
                        Ok(Term::var(a))
                    } else {
                        Err(bad(format!("invalid variable `{a}`")))
                    }
                })
                .collect::<Result<_>>()?;
            let predicate = if name == O_PREDICATE {
                Predicate::o()
            } else {
                kb.predicate(name)
                    .ok_or_else(|| bad(format!("unknown predicate `{name}`")))?
            };
            if predicate.arity() != args.len() {
                return Err(bad(format!(
                    "`{name}` takes {} arguments, found {}",
                    predicate.arity(),
                    args.len()
                )));
            }
            atoms.push(Atom::new(predicate, args));
            rest = rest[close + 1..].trim_start();
            rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
        }
        Ok(QuerySpec::new(key, atoms))
    }

    /// Variables in order of first occurrence, `key` first.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = vec![self.key.as_str()];
        for a in &self.body {
            for v in a.variables() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Every variable is connected to `key` through atoms sharing variables.
    pub fn is_linked(&self) -> bool {
        let vars = self.variables();
        let mut linked: BTreeSet<&str> = BTreeSet::from([self.key.as_str()]);
        loop {
            let before = linked.len();
            for a in &self.body {
                if a.variables().any(|v| linked.contains(v)) {
                    linked.extend(a.variables());
                }
            }
            if linked.len() == before {
                break;
            }
        }
        vars.iter().all(|v| linked.contains(v))
    }

    fn validate(&self) -> Result<()> {
        for a in &self.body {
            if let Some(c) = a.constants().next() {
                return Err(Error::InvalidQuery(format!(
                    "constant `{c}` in query atom {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Query evaluation structure over a fixed model set.
#[derive(Debug, Clone)]
pub struct ModelIndex {
    interner: Interner,
    pred_ids: HashMap<String, usize>,
    dbs: Vec<Db>,
    allowed: Vec<bool>,
    /// Candidate answers, in name order.
    individuals: Vec<Sym>,
    inconsistent: bool,
}

struct CompiledQuery {
    atoms: Vec<CAtom>,
    nvars: usize,
}

impl ModelIndex {
    /// Indexes `ms`; query variables range over `individuals`.
    pub fn new(ms: &ModelSet, individuals: &BTreeSet<String>) -> Self {
        let mut interner = Interner::default();
        let mut pred_ids: HashMap<String, usize> = HashMap::new();
        let mut arities: Vec<usize> = Vec::new();
        for m in &ms.models {
            for a in m {
                if !pred_ids.contains_key(&a.predicate.name) {
                    pred_ids.insert(a.predicate.name.clone(), arities.len());
                    arities.push(a.args.len());
                }
            }
        }
        let individuals_syms: Vec<Sym> = individuals.iter().map(|n| interner.intern(n)).collect();
        let mut dbs = Vec::with_capacity(ms.models.len());
        for m in &ms.models {
            let mut db = Db::new(&arities);
            for a in m {
                let t: Vec<Sym> = a.args.iter().map(|t| interner.intern(t.name())).collect();
                db.rels[pred_ids[&a.predicate.name]].insert(&t);
            }
            dbs.push(db);
        }
        let mut allowed = vec![false; interner.len()];
        for &s in &individuals_syms {
            allowed[s as usize] = true;
        }
        ModelIndex {
            interner,
            pred_ids,
            dbs,
            allowed,
            individuals: individuals_syms,
            inconsistent: ms.inconsistent,
        }
    }

    /// `None` if some predicate of the query has no atom in any model.
    fn compile(&self, q: &QuerySpec) -> Option<CompiledQuery> {
        let mut vars: HashMap<&str, usize> = HashMap::from([(q.key.as_str(), 0)]);
        let mut atoms = Vec::new();
        for a in &q.body {
            if a.predicate.kind == PredicateKind::OPred {
                continue;
            }
            let pred = *self.pred_ids.get(&a.predicate.name)?;
            let args = a
                .args
                .iter()
                .map(|t| {
                    let n = vars.len();
                    CTerm::Var(*vars.entry(t.name()).or_insert(n))
                })
                .collect();
            atoms.push(CAtom { pred, args });
        }
        // Greedy connected order starting from the key.
        let mut bound = vec![false; vars.len()];
        bound[0] = true;
        let mut ordered = Vec::with_capacity(atoms.len());
        while !atoms.is_empty() {
            let pos = atoms
                .iter()
                .position(|a| a.args.iter().any(|t| matches!(t, CTerm::Var(v) if bound[*v])))
                .unwrap_or(0);
            let a = atoms.remove(pos);
            for t in &a.args {
                if let CTerm::Var(v) = t {
                    bound[*v] = true;
                }
            }
            ordered.push(a);
        }
        Some(CompiledQuery {
            atoms: ordered,
            nvars: vars.len(),
        })
    }

    fn holds(&self, db: &Db, q: &CompiledQuery, key: Sym) -> bool {
        let allowed = |s: Sym| self.allowed.get(s as usize).copied().unwrap_or(false);
        let join = Join {
            db,
            atoms: q.atoms.iter().collect(),
            ranges: q.atoms.iter().map(|_| (0, usize::MAX)).collect(),
            allow: Some(&allowed),
        };
        let mut binding = vec![None; q.nvars];
        binding[0] = Some(key);
        !join.run(&mut binding, &mut |_| false)
    }

    /// Certain answers of `q`: individuals with a match in every model.
    pub fn answers(&self, q: &QuerySpec) -> Result<BTreeSet<String>> {
        if self.inconsistent {
            return Err(Error::InconsistentKb);
        }
        q.validate()?;
        let Some(cq) = self.compile(q) else {
            return Ok(BTreeSet::new());
        };
        let mut candidates = self.individuals.clone();
        for db in &self.dbs {
            candidates.retain(|&a| self.holds(db, &cq, a));
            if candidates.is_empty() {
                break;
            }
        }
        Ok(candidates
            .into_iter()
            .map(|s| self.interner.name(s).to_string())
            .collect())
    }

    /// True iff `key` is a certain answer of `q`.
    pub fn is_answer(&self, q: &QuerySpec, key: &str) -> Result<bool> {
        if self.inconsistent {
            return Err(Error::InconsistentKb);
        }
        q.validate()?;
        let Some(s) = self.interner.get(key) else {
            return Ok(false);
        };
        if !self.allowed[s as usize] {
            return Ok(false);
        }
        let Some(cq) = self.compile(q) else {
            return Ok(false);
        };
        Ok(self.dbs.iter().all(|db| self.holds(db, &cq, s)))
    }
}

/// Certain answers of `q` over `ms`, with every variable bound to a member of `individuals`.
pub fn answer_query(ms: &ModelSet, individuals: &BTreeSet<String>, q: &QuerySpec) -> Result<BTreeSet<String>> {
    ModelIndex::new(ms, individuals).answers(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn fact(p: &str, args: &[&str]) -> Atom {
        Atom::new(
            Predicate::non_dl(p, args.len()),
            args.iter().map(|a| Term::constant(*a)).collect(),
        )
    }

    fn qatom(p: &str, args: &[&str]) -> Atom {
        Atom::new(
            Predicate::non_dl(p, args.len()),
            args.iter().map(|a| Term::var(*a)).collect(),
        )
    }

    fn ms(models: Vec<Vec<Atom>>) -> ModelSet {
        ModelSet {
            models: models.into_iter().map(|m| m.into_iter().collect()).collect(),
            ..Default::default()
        }
    }

    fn inds(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn asserted_fact_is_entailed() {
        let m = ms(vec![vec![fact("p", &["a"])]]);
        assert!(cautious_entails(&m, &fact("p", &["a"])).unwrap());
        assert!(!cautious_entails(&m, &fact("p", &["b"])).unwrap());
    }

    #[test]
    fn inconsistent_is_an_error() {
        let m = ModelSet {
            inconsistent: true,
            ..Default::default()
        };
        assert!(matches!(
            cautious_entails(&m, &fact("p", &["a"])),
            Err(Error::InconsistentKb)
        ));
    }

    #[test]
    fn certain_answers_allow_different_witnesses() {
        let m = ms(vec![
            vec![fact("r", &["a", "b"]), fact("s", &["b"])],
            vec![fact("r", &["a", "c"]), fact("s", &["c"])],
        ]);
        let q = QuerySpec::new("k", vec![qatom("r", &["k", "x"]), qatom("s", &["x"])]);
        assert_eq!(answer_query(&m, &inds(&["a", "b", "c"]), &q).unwrap(), inds(&["a"]));
        // witnesses outside the individuals do not count
        assert!(answer_query(&m, &inds(&["a", "b"]), &q).unwrap().is_empty());
    }

    #[test]
    fn key_only_query_ranges_over_individuals() {
        let m = ms(vec![vec![fact("p", &["a"])]]);
        let q = QuerySpec::new("k", vec![]);
        assert_eq!(answer_query(&m, &inds(&["a", "b"]), &q).unwrap(), inds(&["a", "b"]));
    }

    #[test]
    fn unknown_predicate_has_no_answers() {
        let m = ms(vec![vec![fact("p", &["a"])]]);
        let q = QuerySpec::new("k", vec![qatom("zz", &["k"])]);
        assert!(answer_query(&m, &inds(&["a"]), &q).unwrap().is_empty());
    }

    #[test]
    fn linkedness() {
        let q = QuerySpec::new("k", vec![qatom("r", &["k", "x"]), qatom("s", &["x", "y"])]);
        assert!(q.is_linked());
        let q = QuerySpec::new("k", vec![qatom("r", &["k", "x"]), qatom("s", &["y", "z"])]);
        assert!(!q.is_linked());
    }

    #[test]
    fn query_text() {
        let kb = parse_kb("(concept Client) (role isOwnerOf) (nondl f 3)").unwrap();
        let q = QuerySpec::parse("Q(key) :- Client(key), isOwnerOf(key, x), f(x,key,?z)", &kb).unwrap();
        assert_eq!(q.key, "key");
        assert_eq!(q.body.len(), 3);
        assert_eq!(q.body[1].predicate, Predicate::role("isOwnerOf"));
        assert_eq!(q.body[2].args[2], Term::var("z"));
        assert!(QuerySpec::parse("Nope(key)", &kb).is_err());
        assert!(QuerySpec::parse("Client(key, x)", &kb).is_err());
        assert_eq!(QuerySpec::parse("", &kb).unwrap().body.len(), 0);
    }

    #[test]
    fn model_dump_format() {
        let m = ms(vec![vec![fact("q", &["a"]), fact("p", &["b", "a"])], vec![fact("p", &["a", "a"])]]);
        assert_eq!(m.to_string(), "p(b,a)\nq(a)\n---\np(a,a)\n");
    }
}
