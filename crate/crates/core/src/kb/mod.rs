//! Combined knowledge base: terminology, DL-safe rules and facts.
//!
//! The KB is immutable once built. `O` (the named-individual predicate) is
//! never stored as facts; its extension is [`CombinedKb::individuals`].

mod display;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

pub use parse::{parse_kb, parse_kb_with, ParseOptions};

/// Name of the built-in named-individual predicate.
pub const O_PREDICATE: &str = "O";
/// Name of the universal concept.
pub const THING: &str = "Thing";
/// Name of the empty concept.
pub const NOTHING: &str = "Nothing";
/// Prefix reserved for concepts introduced by normalization.
pub const AUX_PREFIX: &str = "aux_";

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(n) => f.write_str(n),
            Term::Variable(n) => write!(f, "?{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateKind {
    Concept,
    Role,
    NonDl(usize),
    Equality,
    OPred,
}

impl PredicateKind {
    pub fn arity(self) -> usize {
        match self {
            PredicateKind::Concept | PredicateKind::OPred => 1,
            PredicateKind::Role | PredicateKind::Equality => 2,
            PredicateKind::NonDl(n) => n,
        }
    }

    /// DL-atoms are concept, role and equality atoms.
    pub fn is_dl(self) -> bool {
        matches!(
            self,
            PredicateKind::Concept | PredicateKind::Role | PredicateKind::Equality
        )
    }

    pub(crate) fn describe(self) -> String {
        match self {
            PredicateKind::Concept => "concept".into(),
            PredicateKind::Role => "role".into(),
            PredicateKind::NonDl(n) => format!("non-DL predicate of arity {n}"),
            PredicateKind::Equality => "equality".into(),
            PredicateKind::OPred => "O predicate".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: String,
    pub kind: PredicateKind,
}

impl Predicate {
    pub fn concept(name: impl Into<String>) -> Self {
        Predicate {
            name: name.into(),
            kind: PredicateKind::Concept,
        }
    }

    pub fn role(name: impl Into<String>) -> Self {
        Predicate {
            name: name.into(),
            kind: PredicateKind::Role,
        }
    }

    pub fn non_dl(name: impl Into<String>, arity: usize) -> Self {
        Predicate {
            name: name.into(),
            kind: PredicateKind::NonDl(arity),
        }
    }

    pub fn equality() -> Self {
        Predicate {
            name: "=".into(),
            kind: PredicateKind::Equality,
        }
    }

    pub fn o() -> Self {
        Predicate {
            name: O_PREDICATE.into(),
            kind: PredicateKind::OPred,
        }
    }

    pub fn thing() -> Self {
        Predicate::concept(THING)
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.kind, PredicateKind::Equality | PredicateKind::OPred) || self.name == THING
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Self {
        debug_assert_eq!(predicate.arity(), args.len());
        Atom { predicate, args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn is_dl(&self) -> bool {
        self.predicate.kind.is_dl()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            Term::Constant(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Constant(c) => Some(c.as_str()),
            Term::Variable(_) => None,
        })
    }
}

/// Prints atoms in the compact `p(a,?x)` form used by program dumps.
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.predicate.kind == PredicateKind::Equality {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        write!(f, "{}(", self.predicate.name)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleExpr {
    Named(String),
    Inverse(String),
}

impl RoleExpr {
    pub fn name(&self) -> &str {
        match self {
            RoleExpr::Named(n) | RoleExpr::Inverse(n) => n,
        }
    }

    pub fn is_inverse(&self) -> bool {
        matches!(self, RoleExpr::Inverse(_))
    }

    pub fn inverse(&self) -> RoleExpr {
        match self {
            RoleExpr::Named(n) => RoleExpr::Inverse(n.clone()),
            RoleExpr::Inverse(n) => RoleExpr::Named(n.clone()),
        }
    }

    /// The role atom linking `from` to `to` through this role expression.
    pub fn atom(&self, from: Term, to: Term) -> Atom {
        let pred = Predicate::role(self.name());
        match self {
            RoleExpr::Named(_) => Atom::new(pred, vec![from, to]),
            RoleExpr::Inverse(_) => Atom::new(pred, vec![to, from]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptExpr {
    Atomic(String),
    Top,
    Bottom,
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    Some(RoleExpr, Box<ConceptExpr>),
    All(RoleExpr, Box<ConceptExpr>),
    /// Negation of an atomic concept.
    Not(String),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn and(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn some(r: RoleExpr, c: ConceptExpr) -> Self {
        ConceptExpr::Some(r, Box::new(c))
    }

    pub fn all(r: RoleExpr, c: ConceptExpr) -> Self {
        ConceptExpr::All(r, Box::new(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TBoxAxiom {
    SubClass(ConceptExpr, ConceptExpr),
    EquivClass(ConceptExpr, ConceptExpr),
    Disjoint(String, String),
    SubRole(RoleExpr, RoleExpr),
    EquivRole(RoleExpr, RoleExpr),
    Transitive(String),
    Functional(RoleExpr),
    Symmetric(String),
    Domain(String, ConceptExpr),
    Range(String, ConceptExpr),
}

/// A disjunctive rule `head_1 ∨ … ∨ head_k ← body`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DlRule {
    pub head: Vec<Atom>,
    pub body: Vec<Atom>,
}

impl DlRule {
    pub fn variables(&self) -> BTreeSet<&str> {
        self.head
            .iter()
            .chain(&self.body)
            .flat_map(|a| a.variables())
            .collect()
    }

    fn safe_variables(&self) -> BTreeSet<&str> {
        self.body
            .iter()
            .filter(|a| !a.is_dl())
            .flat_map(|a| a.variables())
            .collect()
    }
}

impl fmt::Display for DlRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str(" :- ")?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// True iff every variable of `rule` occurs in a non-DL body atom.
pub fn check_dl_safety(rule: &DlRule) -> bool {
    let safe = rule.safe_variables();
    rule.variables().iter().all(|v| safe.contains(v))
}

/// Appends `O(v)` for every variable not already covered by a non-DL body atom.
pub fn make_dl_safe(rule: &DlRule) -> DlRule {
    let safe = rule.safe_variables();
    let mut out = rule.clone();
    // Variables in order of first occurrence, head first.
    let mut seen = BTreeSet::new();
    for atom in rule.head.iter().chain(&rule.body) {
        for v in atom.variables() {
            if !safe.contains(v) && seen.insert(v) {
                out.body
                    .push(Atom::new(Predicate::o(), vec![Term::var(v)]));
            }
        }
    }
    out
}

/// Ordered registry of user predicates; order is declaration (first-use) order.
pub type Signature = IndexMap<String, PredicateKind>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CombinedKb {
    pub signature: Signature,
    pub tbox: Vec<TBoxAxiom>,
    pub rules: Vec<DlRule>,
    pub abox: Vec<Atom>,
    pub individuals: BTreeSet<String>,
}

impl CombinedKb {
    pub fn predicate(&self, name: &str) -> Option<Predicate> {
        self.signature.get(name).map(|&kind| Predicate {
            name: name.to_string(),
            kind,
        })
    }

    /// The KB with every ground fact removed (the terminological part only).
    /// With `keep_non_dl`, facts over non-DL predicates are retained.
    pub fn without_abox(&self, keep_non_dl: bool) -> CombinedKb {
        let abox: Vec<Atom> = if keep_non_dl {
            self.abox.iter().filter(|a| !a.is_dl()).cloned().collect()
        } else {
            Vec::new()
        };
        let individuals = abox
            .iter()
            .flat_map(|a| a.constants().map(str::to_string))
            .collect();
        CombinedKb {
            signature: self.signature.clone(),
            tbox: self.tbox.clone(),
            rules: self.rules.clone(),
            abox,
            individuals,
        }
    }
}
