//! Trie-based search for frequent, semantically non-redundant patterns.

mod pattern;
mod refine;
mod trie;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::Ratio;

pub use pattern::{atom_to_string, Pattern, KEY};
pub use refine::{brother_copies, dependent_atoms, refine_candidates, Candidate, FreshVars};
pub use trie::{NodeId, Origin, Trie, TrieNode};

use crate::clausify::clausify;
use crate::error::{Error, Result};
use crate::kb::{Atom, CombinedKb, Predicate, PredicateKind, Term, AUX_PREFIX};
use crate::reasoner::{chase, classify, ChaseConfig, ModelIndex, ModelSet, QuerySpec, SemanticReasoner, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sem,
    NoSem,
    SemTax,
}

impl Mode {
    pub fn is_semantic(self) -> bool {
        self != Mode::NoSem
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sem => "sem",
            Mode::NoSem => "nosem",
            Mode::SemTax => "sem-tax",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sem" => Ok(Mode::Sem),
            "nosem" => Ok(Mode::NoSem),
            "sem-tax" => Ok(Mode::SemTax),
            _ => Err(Error::Config(format!("unknown mode `{s}`"))),
        }
    }
}

/// Which variables a dependent atom may share besides the pivot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VariableSharing {
    /// Any earlier variable, or fresh variables (possibly repeated).
    #[default]
    Extended,
    /// Distinct fresh variables everywhere except the pivot.
    SingleNew,
}

/// Which retained patterns a candidate is compared with for equivalence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EquivScan {
    #[default]
    WholeTrie,
    SameDepth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    pub reference_concept: String,
    pub minsup: Ratio<usize>,
    /// Maximum number of atoms in a pattern, the reference atom included.
    pub max_depth: usize,
    pub mode: Mode,
    /// Predicates used in refinements; `None` selects every predicate with
    /// an atom in some model, in declaration order.
    pub bias: Option<Vec<String>>,
    pub sharing: VariableSharing,
    pub equiv_scan: EquivScan,
    /// Keep non-DL facts in the KB used for semantic tests.
    pub cp_keep_nondl: bool,
    pub chase: ChaseConfig,
}

impl MiningConfig {
    pub fn new(reference_concept: impl Into<String>, minsup: Ratio<usize>, max_depth: usize, mode: Mode) -> Self {
        MiningConfig {
            reference_concept: reference_concept.into(),
            minsup,
            max_depth,
            mode,
            bias: None,
            sharing: VariableSharing::default(),
            equiv_scan: EquivScan::default(),
            cp_keep_nondl: false,
            chase: ChaseConfig::default(),
        }
    }

    fn validate(&self, kb: &CombinedKb) -> Result<()> {
        if *self.minsup.numer() == 0 || self.minsup > Ratio::from_integer(1) {
            return Err(Error::Config(format!("minsup must lie in (0,1], got {}", self.minsup)));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max depth must be at least 1".into()));
        }
        match kb.signature.get(&self.reference_concept) {
            Some(PredicateKind::Concept) => Ok(()),
            _ => Err(Error::Config(format!(
                "reference concept `{}` is not a declared concept",
                self.reference_concept
            ))),
        }
    }
}

/// Parses `0.5`, `1`, or `2/3` into an exact ratio.
pub fn parse_ratio(s: &str) -> Result<Ratio<usize>> {
    let bad = || Error::Config(format!("not a ratio: `{s}`"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let d: usize = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
        return Err(bad());
    }
    let den = 10usize.pow(frac.len() as u32);
    let int: usize = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: usize = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Ratio::new(int * den + frac, den))
}

/// Six-decimal rendering of an exact ratio, rounded half up.
pub fn format_ratio(r: &Ratio<usize>) -> String {
    let scaled = (r * Ratio::from_integer(1_000_000usize)).round().to_integer();
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DepthStats {
    pub gen: usize,
    pub sat: usize,
    pub sfree: usize,
    pub cand: usize,
    pub freq: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Index `d - 1` holds the counters for patterns with `d` atoms.
    pub per_depth: Vec<DepthStats>,
    pub runtime: Duration,
    pub chase_calls: usize,
    /// Some chase hit the skolem depth cap.
    pub truncated: bool,
}

impl RunStats {
    fn at(&mut self, depth: usize) -> &mut DepthStats {
        if self.per_depth.len() < depth {
            self.per_depth.resize(depth, DepthStats::default());
        }
        &mut self.per_depth[depth - 1]
    }
}

/// Result of the semantic tests on one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    Accepted,
    PrunedUnsat,
    PrunedNotSFree,
    PrunedEquivalent,
}

/// Satisfiability and s-freeness, the reference atom exempt from the latter.
fn sat_and_sfree(q: &Pattern, reasoner: &SemanticReasoner) -> Result<FilterOutcome> {
    if !reasoner.is_satisfiable(&q.query())? {
        return Ok(FilterOutcome::PrunedUnsat);
    }
    let rest = q.body_query();
    for j in 0..rest.body.len() {
        let mut smaller = rest.clone();
        smaller.body.remove(j);
        if reasoner.subsumes(&rest, &smaller)? {
            return Ok(FilterOutcome::PrunedNotSFree);
        }
    }
    Ok(FilterOutcome::Accepted)
}

/// Runs the semantic tests in order: satisfiability, s-freeness, and
/// equivalence against each of `earlier`.
pub fn semantic_filter(q: &Pattern, reasoner: &SemanticReasoner, earlier: &[Pattern]) -> Result<FilterOutcome> {
    let o = sat_and_sfree(q, reasoner)?;
    if o != FilterOutcome::Accepted {
        return Ok(o);
    }
    for e in earlier {
        if reasoner.equivalent(&q.query(), &e.query())? {
            return Ok(FilterOutcome::PrunedEquivalent);
        }
    }
    Ok(FilterOutcome::Accepted)
}

/// Full-KB evaluation context: the chased models and the reference answers.
pub struct Evaluator {
    index: ModelIndex,
    reference: BTreeSet<String>,
    reference_concept: String,
}

impl Evaluator {
    pub fn new(ms: &ModelSet, reference_concept: &str) -> Result<Self> {
        if ms.inconsistent {
            return Err(Error::InconsistentKb);
        }
        let index = ModelIndex::new(ms, &ms.named);
        let reference = index.answers(&reference_query(reference_concept))?;
        if reference.is_empty() {
            return Err(Error::EmptyReferenceConcept(reference_concept.to_string()));
        }
        Ok(Evaluator {
            index,
            reference,
            reference_concept: reference_concept.to_string(),
        })
    }

    pub fn reference_answers(&self) -> &BTreeSet<String> {
        &self.reference
    }

    pub fn answers(&self, q: &QuerySpec) -> Result<BTreeSet<String>> {
        self.index.answers(q)
    }

    /// `|answers(q)| / |answers(Ĉ(key))|`; the reference atom is added if missing.
    pub fn support(&self, q: &QuerySpec) -> Result<Ratio<usize>> {
        let mut q = q.clone();
        let has_ref = q
            .body
            .iter()
            .any(|a| a.predicate.name == self.reference_concept && a.args == [Term::var(q.key.clone())]);
        if !has_ref {
            q.body.insert(0, reference_atom(&self.reference_concept, &q.key));
        }
        let n = self.index.answers(&q)?.len();
        Ok(Ratio::new(n, self.reference.len()))
    }
}

fn reference_atom(concept: &str, key: &str) -> Atom {
    Atom::new(Predicate::concept(concept), vec![Term::var(key)])
}

fn reference_query(concept: &str) -> QuerySpec {
    QuerySpec::new(KEY, vec![reference_atom(concept, KEY)])
}

/// Support of `q` over the full KB.
pub fn support(kb: &CombinedKb, reference_concept: &str, q: &QuerySpec, cfg: &ChaseConfig) -> Result<Ratio<usize>> {
    let ms = chase(&clausify(kb)?, &kb.abox, cfg)?;
    Evaluator::new(&ms, reference_concept)?.support(q)
}

/// Resolves the refinement vocabulary.
pub fn resolve_bias(kb: &CombinedKb, ms: &ModelSet, bias: Option<&[String]>) -> Result<Vec<Predicate>> {
    match bias {
        Some(names) => names
            .iter()
            .map(|n| match kb.predicate(n) {
                Some(p) if !p.is_builtin() => Ok(p),
                _ => Err(Error::Config(format!("bias predicate `{n}` is not declared"))),
            })
            .collect(),
        None => {
            let used: HashSet<&str> = ms
                .models
                .iter()
                .flat_map(|m| m.iter().map(|a| a.predicate.name.as_str()))
                .collect();
            Ok(kb
                .signature
                .keys()
                .filter(|n| !n.starts_with(AUX_PREFIX) && used.contains(n.as_str()))
                .filter_map(|n| kb.predicate(n))
                .filter(|p| !p.is_builtin())
                .collect())
        }
    }
}

pub struct MiningResult {
    pub trie: Trie,
    pub stats: RunStats,
    pub bias: Vec<Predicate>,
    pub reference_count: usize,
}

impl MiningResult {
    /// Canonical patterns with supports, ordered by depth, then support
    /// descending, then trie preorder.
    pub fn patterns(&self) -> Vec<(Pattern, Ratio<usize>)> {
        let mut rows: Vec<(usize, NodeId)> = self.trie.preorder().into_iter().enumerate().collect();
        rows.sort_by(|&(ia, a), &(ib, b)| {
            let (na, nb) = (self.trie.node(a), self.trie.node(b));
            na.depth
                .cmp(&nb.depth)
                .then(nb.support.cmp(&na.support))
                .then(ia.cmp(&ib))
        });
        rows.into_iter()
            .map(|(_, n)| (self.trie.pattern(n).canonical(), self.trie.node(n).support))
            .collect()
    }
}

struct Miner<'a> {
    cfg: &'a MiningConfig,
    eval: Evaluator,
    reasoner: Option<SemanticReasoner>,
    taxonomy: Option<Taxonomy>,
    /// Predicates used for dependent atoms.
    dependent_preds: Vec<Predicate>,
    trie: Trie,
    /// Retained nodes by answer set, for the equivalence prefilter.
    by_answers: HashMap<BTreeSet<String>, Vec<NodeId>>,
    fresh: FreshVars,
    stats: RunStats,
}

enum Evaluated {
    Pruned(FilterOutcome),
    Infrequent,
    Frequent(Ratio<usize>, BTreeSet<String>),
}

impl Miner<'_> {
    fn evaluate(&mut self, q: &Pattern) -> Result<Evaluated> {
        let depth = q.depth();
        self.stats.at(depth).gen += 1;
        if let Some(reasoner) = &self.reasoner {
            match sat_and_sfree(q, reasoner)? {
                FilterOutcome::PrunedUnsat => return Ok(Evaluated::Pruned(FilterOutcome::PrunedUnsat)),
                FilterOutcome::PrunedNotSFree => {
                    self.stats.at(depth).sat += 1;
                    return Ok(Evaluated::Pruned(FilterOutcome::PrunedNotSFree));
                }
                _ => {}
            }
        }
        let s = self.stats.at(depth);
        s.sat += 1;
        s.sfree += 1;
        let answers = self.eval.answers(&q.query())?;
        if let Some(reasoner) = &self.reasoner {
            if let Some(same) = self.by_answers.get(&answers) {
                let mut order: Vec<NodeId> = same
                    .iter()
                    .copied()
                    .filter(|&n| self.cfg.equiv_scan == EquivScan::WholeTrie || self.trie.node(n).depth == depth)
                    .collect();
                order.sort_by_key(|&n| (self.trie.node(n).depth != depth, std::cmp::Reverse(n)));
                for n in order {
                    if reasoner.equivalent(&q.query(), &self.trie.pattern(n).query())? {
                        return Ok(Evaluated::Pruned(FilterOutcome::PrunedEquivalent));
                    }
                }
            }
        }
        self.stats.at(depth).cand += 1;
        let support = Ratio::new(answers.len(), self.eval.reference.len());
        if support < self.cfg.minsup {
            return Ok(Evaluated::Infrequent);
        }
        self.stats.at(depth).freq += 1;
        Ok(Evaluated::Frequent(support, answers))
    }

    /// Specializations of `atom` whose parents (at the same arguments) all qualified.
    fn specializations(&self, atom: &Atom, qualified: &HashSet<Atom>, generated: &HashSet<Atom>) -> Vec<Atom> {
        let Some(tax) = &self.taxonomy else {
            return Vec::new();
        };
        let h = match atom.predicate.kind {
            PredicateKind::Concept => &tax.concepts,
            PredicateKind::Role => &tax.roles,
            _ => return Vec::new(),
        };
        let mut out = Vec::new();
        for child in h.children(&atom.predicate.name) {
            let with = |name: &str| Atom::new(Predicate { name: name.to_string(), kind: atom.predicate.kind }, atom.args.clone());
            let d = with(child);
            if generated.contains(&d) {
                continue;
            }
            if h.parents(child).iter().all(|p| qualified.contains(&with(p))) {
                out.push(d);
            }
        }
        out
    }

    fn expand(&mut self, node: NodeId) -> Result<()> {
        if self.trie.node(node).depth >= self.cfg.max_depth {
            return Ok(());
        }
        let base = self.trie.path_atoms(node);
        let mut queue: VecDeque<Candidate> =
            refine_candidates(&self.trie, node, &self.dependent_preds, self.cfg.sharing, &mut self.fresh).into();
        let mut qualified: HashSet<Atom> = HashSet::new();
        let mut generated: HashSet<Atom> = queue.iter().map(|c| c.atom.clone()).collect();
        while let Some(cand) = queue.pop_front() {
            let mut atoms = base.clone();
            atoms.push(cand.atom.clone());
            let q = Pattern::new(atoms);
            let outcome = self.evaluate(&q)?;
            let spawns = self.taxonomy.is_some()
                && cand.origin != Origin::Brother
                && !matches!(outcome, Evaluated::Infrequent | Evaluated::Pruned(FilterOutcome::PrunedUnsat));
            if spawns {
                qualified.insert(cand.atom.clone());
                let specs = self.specializations(&cand.atom, &qualified, &generated);
                for d in specs.into_iter().rev() {
                    generated.insert(d.clone());
                    queue.push_front(Candidate {
                        atom: d,
                        new_vars: cand.new_vars.clone(),
                        origin: Origin::Specialization,
                    });
                }
            }
            if let Evaluated::Frequent(support, answers) = outcome {
                let depth = q.depth();
                let id = self.trie.add_child(
                    node,
                    TrieNode {
                        atom: cand.atom,
                        parent: None,
                        children: Vec::new(),
                        depth,
                        support,
                        answers: answers.len(),
                        new_vars: cand.new_vars,
                        origin: cand.origin,
                    },
                );
                self.by_answers.entry(answers).or_default().push(id);
            }
        }
        for child in self.trie.node(node).children.clone() {
            self.expand(child)?;
        }
        Ok(())
    }
}

/// Mines all frequent patterns of `kb` about `cfg.reference_concept`.
pub fn mine(kb: &CombinedKb, cfg: &MiningConfig) -> Result<MiningResult> {
    let start = Instant::now();
    cfg.validate(kb)?;
    let program = clausify(kb)?;
    let ms = chase(&program, &kb.abox, &cfg.chase)?;
    if ms.inconsistent {
        return Err(Error::InconsistentKb);
    }
    if ms.truncated {
        log::warn!("chase of the input KB hit the skolem depth cap; answers may be incomplete");
    }
    let eval = Evaluator::new(&ms, &cfg.reference_concept)?;
    let bias = resolve_bias(kb, &ms, cfg.bias.as_deref())?;
    let kb_cp = kb.without_abox(cfg.cp_keep_nondl);
    let reasoner = if cfg.mode.is_semantic() {
        Some(SemanticReasoner::new(&kb_cp, cfg.chase)?)
    } else {
        None
    };
    let (taxonomy, dependent_preds) = if cfg.mode == Mode::SemTax {
        let names: Vec<String> = bias.iter().map(|p| p.name.clone()).collect();
        let tax = classify(&kb_cp, &cfg.chase)?.restrict(&names);
        let preds = bias
            .iter()
            .filter(|p| match p.kind {
                PredicateKind::Concept => tax.concepts.roots().contains(&p.name.as_str()),
                PredicateKind::Role => tax.roles.roots().contains(&p.name.as_str()),
                _ => true,
            })
            .cloned()
            .collect();
        (Some(tax), preds)
    } else {
        (None, bias.clone())
    };
    let reference_count = eval.reference.len();
    let root = TrieNode {
        atom: reference_atom(&cfg.reference_concept, KEY),
        parent: None,
        children: Vec::new(),
        depth: 1,
        support: Ratio::from_integer(1),
        answers: reference_count,
        new_vars: vec![KEY.to_string()],
        origin: Origin::Root,
    };
    let mut stats = RunStats::default();
    *stats.at(1) = DepthStats {
        gen: 1,
        sat: 1,
        sfree: 1,
        cand: 1,
        freq: 1,
    };
    let mut miner = Miner {
        cfg,
        by_answers: HashMap::from([(eval.reference.clone(), vec![Trie::ROOT])]),
        eval,
        reasoner,
        taxonomy,
        dependent_preds,
        trie: Trie::new(root),
        fresh: FreshVars::default(),
        stats,
    };
    miner.expand(Trie::ROOT)?;
    let mut stats = miner.stats;
    if let Some(r) = &miner.reasoner {
        stats.chase_calls = r.chase_calls();
        if r.truncated() {
            log::warn!("a semantic test hit the skolem depth cap; pruning may be incomplete");
        }
        stats.truncated = r.truncated();
    }
    stats.truncated |= ms.truncated;
    stats.chase_calls += 1;
    stats.per_depth.resize(cfg.max_depth.max(stats.per_depth.len()), DepthStats::default());
    stats.runtime = start.elapsed();
    Ok(MiningResult {
        trie: miner.trie,
        stats,
        bias,
        reference_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("0.5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("1").unwrap(), Ratio::from_integer(1));
        assert_eq!(parse_ratio("2/3").unwrap(), Ratio::new(2, 3));
        assert_eq!(parse_ratio(".25").unwrap(), Ratio::new(1, 4));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio(".").is_err());
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(format_ratio(&Ratio::new(2, 3)), "0.666667");
        assert_eq!(format_ratio(&Ratio::from_integer(1)), "1.000000");
        assert_eq!(format_ratio(&Ratio::new(1, 3)), "0.333333");
    }

    #[test]
    fn mode_round_trip() {
        for m in [Mode::Sem, Mode::NoSem, Mode::SemTax] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
    }
}
