//! Branching restricted chase over compiled programs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::db::{CAtom, CTerm, Db, Interner, Join, Sym};
use super::{ChaseConfig, ModelSet};
use crate::clausify::{GroundProgram, HeadAtom};
use crate::error::{Error, Result};
use crate::kb::{Atom, Predicate, Term};

const SKOLEM_PREFIX: &str = "~sk";

#[derive(Debug, Clone)]
pub(crate) enum CHead {
    Atom(CAtom),
    Exists {
        role: usize,
        inverse: bool,
        concept: Option<usize>,
        frontier: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct CRule {
    pub(crate) id: usize,
    pub(crate) body: Vec<CAtom>,
    pub(crate) head: Vec<CHead>,
    pub(crate) nvars: usize,
}

/// A program compiled against a predicate table and a base symbol table.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub(crate) preds: Vec<Predicate>,
    pub(crate) pred_ids: HashMap<String, usize>,
    pub(crate) o: usize,
    pub(crate) thing: usize,
    pub(crate) rules: Vec<CRule>,
    pub(crate) interner: Interner,
}

impl Compiled {
    pub(crate) fn new(program: &GroundProgram) -> Compiled {
        let mut c = Compiled {
            preds: Vec::new(),
            pred_ids: HashMap::new(),
            o: 0,
            thing: 0,
            rules: Vec::new(),
            interner: Interner::default(),
        };
        c.o = c.pred(&Predicate::o());
        c.thing = c.pred(&Predicate::thing());
        for (name, &kind) in &program.predicates {
            c.pred(&Predicate {
                name: name.clone(),
                kind,
            });
        }
        for ind in &program.individuals {
            let s = c.interner.intern(ind);
            c.interner.set_named(s);
        }
        for rule in &program.rules {
            let mut vars: HashMap<String, usize> = HashMap::new();
            let mut body: Vec<CAtom> = rule.body.iter().map(|a| c.atom(a, &mut vars)).collect();
            // Guards over the built-in unary predicates are cheapest once bound.
            body.sort_by_key(|a| a.pred == c.o || a.pred == c.thing);
            let head = rule
                .head
                .iter()
                .map(|h| match h {
                    HeadAtom::Atom(a) => CHead::Atom(c.atom(a, &mut vars)),
                    HeadAtom::Exists { role, concept, var } => {
                        let n = vars.len();
                        CHead::Exists {
                            role: c.pred(&Predicate::role(role.name())),
                            inverse: role.is_inverse(),
                            concept: concept.as_ref().map(|n| c.pred(&Predicate::concept(n))),
                            frontier: *vars.entry(var.clone()).or_insert(n),
                        }
                    }
                })
                .collect();
            c.rules.push(CRule {
                id: rule.id,
                body,
                head,
                nvars: vars.len(),
            });
        }
        c
    }

    pub(crate) fn pred(&mut self, p: &Predicate) -> usize {
        if let Some(&id) = self.pred_ids.get(&p.name) {
            return id;
        }
        let id = self.preds.len();
        self.preds.push(p.clone());
        self.pred_ids.insert(p.name.clone(), id);
        id
    }

    fn atom(&mut self, a: &Atom, vars: &mut HashMap<String, usize>) -> CAtom {
        let pred = self.pred(&a.predicate);
        let args = a
            .args
            .iter()
            .map(|t| match t {
                Term::Variable(v) => {
                    let n = vars.len();
                    CTerm::Var(*vars.entry(v.clone()).or_insert(n))
                }
                Term::Constant(name) => CTerm::Const(self.interner.intern(name)),
            })
            .collect();
        CAtom { pred, args }
    }

    pub(crate) fn is_hidden(&self, pred: usize) -> bool {
        pred == self.o || pred == self.thing
    }
}

#[derive(Clone)]
struct Branch {
    db: Db,
    delta_start: Vec<usize>,
    /// Disjunctive rule instances found so far; those before `pending_pos` are satisfied.
    pending: Vec<(usize, Vec<Option<Sym>>)>,
    pending_pos: usize,
}

/// A saturated consistent branch projected onto named constants.
pub(crate) type Projection = Vec<(usize, Box<[Sym]>)>;

pub(crate) struct ChaseRun<'a> {
    c: &'a Compiled,
    cfg: &'a ChaseConfig,
    pub(crate) interner: Interner,
    preds: Vec<Predicate>,
    pred_ids: HashMap<String, usize>,
    memo: HashMap<(usize, usize, Sym), Sym>,
    pub(crate) truncated: bool,
}

impl<'a> ChaseRun<'a> {
    pub(crate) fn new(c: &'a Compiled, cfg: &'a ChaseConfig) -> Self {
        ChaseRun {
            c,
            cfg,
            interner: c.interner.clone(),
            preds: c.preds.clone(),
            pred_ids: c.pred_ids.clone(),
            memo: HashMap::new(),
            truncated: false,
        }
    }

    fn pred_id(&mut self, p: &Predicate) -> usize {
        if let Some(&id) = self.pred_ids.get(&p.name) {
            return id;
        }
        let id = self.preds.len();
        self.preds.push(p.clone());
        self.pred_ids.insert(p.name.clone(), id);
        id
    }

    /// Runs the chase on `facts`; every constant of `facts` and every name in
    /// `extra_named` is a named individual. Returns the subset-minimal named
    /// projections, or `None` if every branch is inconsistent.
    pub(crate) fn run(&mut self, facts: &[Atom], extra_named: &[String]) -> Result<Option<Vec<Projection>>> {
        let mut ground = Vec::with_capacity(facts.len());
        for f in facts {
            let pred = self.pred_id(&f.predicate);
            let args: Vec<Sym> = f
                .args
                .iter()
                .map(|t| {
                    let s = self.interner.intern(t.name());
                    self.interner.set_named(s);
                    s
                })
                .collect();
            ground.push((pred, args));
        }
        for n in extra_named {
            let s = self.interner.intern(n);
            self.interner.set_named(s);
        }
        let arities: Vec<usize> = self.preds.iter().map(Predicate::arity).collect();
        let mut db = Db::new(&arities);
        for s in 0..self.interner.len() as Sym {
            if self.interner.is_named(s) {
                db.rels[self.c.o].insert(&[s]);
            }
            db.rels[self.c.thing].insert(&[s]);
        }
        for (pred, args) in &ground {
            db.rels[*pred].insert(args);
        }
        let mut root = Branch {
            delta_start: vec![0; db.rels.len()],
            db,
            pending: Vec::new(),
            pending_pos: 0,
        };
        // Rules with an empty body never see a delta; fire them once here.
        let c = self.c;
        for (ri, rule) in c.rules.iter().enumerate() {
            if !rule.body.is_empty() {
                continue;
            }
            let binding = vec![None; rule.nvars];
            match rule.head.len() {
                0 => return Ok(None),
                1 => {
                    let mut new_facts = Vec::new();
                    self.apply_head(ri, 0, &binding, &root.db, &mut new_facts);
                    self.insert_all(&mut root.db, new_facts);
                }
                _ => root.pending.push((ri, binding)),
            }
        }

        let mut queue = VecDeque::from([root]);
        let mut leaves: Vec<Projection> = Vec::new();
        while let Some(mut branch) = queue.pop_front() {
            if !self.saturate(&mut branch) {
                continue;
            }
            match self.first_violated(&mut branch) {
                None => leaves.push(self.project(&branch.db)),
                Some(i) => {
                    let (rule_idx, binding) = branch.pending[i].clone();
                    branch.pending_pos = i + 1;
                    let c = self.c;
                    for d in 0..c.rules[rule_idx].head.len() {
                        let mut child = branch.clone();
                        let mut new_facts = Vec::new();
                        self.apply_head(rule_idx, d, &binding, &child.db, &mut new_facts);
                        self.insert_all(&mut child.db, new_facts);
                        queue.push_back(child);
                    }
                    if queue.len() > self.cfg.max_branches {
                        return Err(Error::BranchLimitExceeded(self.cfg.max_branches));
                    }
                }
            }
        }
        if leaves.is_empty() {
            return Ok(None);
        }
        Ok(Some(minimal(leaves)))
    }

    fn insert_all(&mut self, db: &mut Db, facts: Vec<(usize, Vec<Sym>)>) {
        for (pred, t) in facts {
            db.rels[pred].insert(&t);
        }
    }

    /// Horn saturation with semi-naive evaluation. Returns false if a constraint fired.
    fn saturate(&mut self, b: &mut Branch) -> bool {
        loop {
            let snap = b.db.lens();
            if snap == b.delta_start {
                return true;
            }
            let mut new_facts: Vec<(usize, Vec<Sym>)> = Vec::new();
            let mut dead = false;
            let c = self.c;
            for (ri, rule) in c.rules.iter().enumerate() {
                for di in 0..rule.body.len() {
                    let dp = rule.body[di].pred;
                    if b.delta_start[dp] >= snap[dp] {
                        continue;
                    }
                    let mut atoms = vec![&rule.body[di]];
                    let mut ranges = vec![(b.delta_start[dp], snap[dp])];
                    for (j, a) in rule.body.iter().enumerate() {
                        if j != di {
                            atoms.push(a);
                            ranges.push((0, snap[a.pred]));
                        }
                    }
                    let join = Join {
                        db: &b.db,
                        atoms,
                        ranges,
                        allow: None,
                    };
                    let mut matches: Vec<Vec<Option<Sym>>> = Vec::new();
                    let mut binding = vec![None; rule.nvars];
                    join.run(&mut binding, &mut |bnd| {
                        if rule.head.is_empty() {
                            dead = true;
                            return false;
                        }
                        matches.push(bnd.to_vec());
                        true
                    });
                    if dead {
                        return false;
                    }
                    for m in matches {
                        if rule.head.len() == 1 {
                            self.apply_head(ri, 0, &m, &b.db, &mut new_facts);
                        } else {
                            b.pending.push((ri, m));
                        }
                    }
                }
            }
            b.delta_start = snap;
            self.insert_all(&mut b.db, new_facts);
        }
    }

    fn witness(&self, db: &Db, role: usize, inverse: bool, concept: Option<usize>, v: Sym) -> bool {
        let rel = &db.rels[role];
        let (pos, other) = if inverse { (1, 0) } else { (0, 1) };
        rel.lookup(pos, v).iter().any(|&i| {
            let w = rel.tuple(i as usize)[other];
            concept.is_none_or(|c| db.rels[c].contains(&[w]))
        })
    }

    fn head_holds(&mut self, db: &Db, head: &CHead, binding: &[Option<Sym>]) -> bool {
        match head {
            CHead::Atom(a) => db.rels[a.pred].contains(&a.ground(binding)),
            CHead::Exists {
                role,
                inverse,
                concept,
                frontier,
            } => {
                let v = binding[*frontier].expect("frontier bound");
                if self.witness(db, *role, *inverse, *concept, v) {
                    return true;
                }
                if self.interner.depth(v) + 1 > self.cfg.skolem_depth_cap {
                    self.truncated = true;
                    return true;
                }
                false
            }
        }
    }

    fn apply_head(
        &mut self,
        rule_idx: usize,
        disjunct: usize,
        binding: &[Option<Sym>],
        db: &Db,
        out: &mut Vec<(usize, Vec<Sym>)>,
    ) {
        let c = self.c;
        let rule = &c.rules[rule_idx];
        match &rule.head[disjunct] {
            CHead::Atom(a) => out.push((a.pred, a.ground(binding))),
            &CHead::Exists {
                role,
                inverse,
                concept,
                frontier,
            } => {
                let v = binding[frontier].expect("frontier bound");
                if self.witness(db, role, inverse, concept, v) {
                    return;
                }
                let depth = self.interner.depth(v) + 1;
                if depth > self.cfg.skolem_depth_cap {
                    self.truncated = true;
                    return;
                }
                let key = (rule.id, disjunct, v);
                let sk = match self.memo.get(&key) {
                    Some(&sk) => sk,
                    None => {
                        let sk = self.interner.fresh(SKOLEM_PREFIX, depth);
                        self.memo.insert(key, sk);
                        sk
                    }
                };
                out.push((role, if inverse { vec![sk, v] } else { vec![v, sk] }));
                if let Some(c) = concept {
                    out.push((c, vec![sk]));
                }
                out.push((self.c.thing, vec![sk]));
            }
        }
    }

    fn first_violated(&mut self, b: &mut Branch) -> Option<usize> {
        while b.pending_pos < b.pending.len() {
            let c = self.c;
            let (ri, binding) = &b.pending[b.pending_pos];
            let rule = &c.rules[*ri];
            let binding = binding.clone();
            let mut satisfied = false;
            for h in &rule.head {
                if self.head_holds(&b.db, h, &binding) {
                    satisfied = true;
                    break;
                }
            }
            if !satisfied {
                return Some(b.pending_pos);
            }
            b.pending_pos += 1;
        }
        None
    }

    fn project(&self, db: &Db) -> Projection {
        let mut out = Vec::new();
        for (p, rel) in db.rels.iter().enumerate() {
            if self.c.is_hidden(p) {
                continue;
            }
            for t in rel.iter() {
                if t.iter().all(|&s| self.interner.is_named(s)) {
                    out.push((p, t.into()));
                }
            }
        }
        out.sort();
        out
    }

    pub(crate) fn to_atoms(&self, proj: &Projection) -> BTreeSet<Atom> {
        proj.iter()
            .map(|(p, t)| {
                Atom::new(
                    self.preds[*p].clone(),
                    t.iter()
                        .map(|&s| Term::constant(self.interner.name(s)))
                        .collect(),
                )
            })
            .collect()
    }
}

/// Keeps the subset-minimal projections, merging duplicates.
fn minimal(mut leaves: Vec<Projection>) -> Vec<Projection> {
    leaves.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    leaves.dedup();
    let mut kept: Vec<Projection> = Vec::new();
    for l in leaves {
        let covered = kept.iter().any(|k| is_subset(k, &l));
        if !covered {
            kept.push(l);
        }
    }
    kept
}

/// Both slices are sorted.
fn is_subset(a: &Projection, b: &Projection) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && &b[j] < x {
            j += 1;
        }
        if j == b.len() || &b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Computes the minimal named models of `program` over `facts`.
pub fn chase(program: &GroundProgram, facts: &[Atom], cfg: &ChaseConfig) -> Result<ModelSet> {
    let compiled = Compiled::new(program);
    chase_compiled(&compiled, facts, &[], cfg)
}

pub(crate) fn chase_compiled(
    compiled: &Compiled,
    facts: &[Atom],
    extra_named: &[String],
    cfg: &ChaseConfig,
) -> Result<ModelSet> {
    let mut run = ChaseRun::new(compiled, cfg);
    let result = run.run(facts, extra_named)?;
    let mut named: BTreeSet<String> = BTreeSet::new();
    for s in 0..run.interner.len() as Sym {
        if run.interner.is_named(s) {
            named.insert(run.interner.name(s).to_string());
        }
    }
    let (models, inconsistent) = match result {
        None => (Vec::new(), true),
        Some(projs) => {
            let mut models: Vec<BTreeSet<Atom>> = projs.iter().map(|p| run.to_atoms(p)).collect();
            models.sort();
            (models, false)
        }
    };
    if run.truncated {
        log::debug!("chase hit the skolem depth cap of {}", cfg.skolem_depth_cap);
    }
    Ok(ModelSet {
        models,
        inconsistent,
        truncated: run.truncated,
        named,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausify::ProgramRule;

    fn atom(p: &str, args: &[&str]) -> Atom {
        Atom::new(
            Predicate::non_dl(p, args.len()),
            args.iter()
                .map(|a| {
                    if let Some(v) = a.strip_prefix('?') {
                        Term::var(v)
                    } else {
                        Term::constant(*a)
                    }
                })
                .collect(),
        )
    }

    fn rule(id: usize, head: Vec<Atom>, body: Vec<Atom>) -> ProgramRule {
        ProgramRule {
            id,
            head: head.into_iter().map(HeadAtom::Atom).collect(),
            body,
        }
    }

    #[test]
    fn empty_program_single_model() {
        let ms = chase(&GroundProgram::default(), &[atom("p", &["a"])], &ChaseConfig::default()).unwrap();
        assert!(!ms.inconsistent);
        assert_eq!(ms.models.len(), 1);
        assert_eq!(ms.models[0], BTreeSet::from([atom("p", &["a"])]));
    }

    #[test]
    fn disjunction_splits_into_minimal_models() {
        let program = GroundProgram {
            rules: vec![rule(
                0,
                vec![atom("p", &["?x"]), atom("q", &["?x"])],
                vec![atom("r", &["?x"])],
            )],
            ..Default::default()
        };
        let ms = chase(&program, &[atom("r", &["a"])], &ChaseConfig::default()).unwrap();
        assert_eq!(ms.models.len(), 2);
        // an already-true disjunct means no split
        let ms = chase(
            &program,
            &[atom("r", &["a"]), atom("q", &["a"])],
            &ChaseConfig::default(),
        )
        .unwrap();
        assert_eq!(ms.models.len(), 1);
    }

    #[test]
    fn non_minimal_branches_are_dropped() {
        // p(a) | q(a);  q(a) <- p(a): the p-branch also contains q(a).
        let program = GroundProgram {
            rules: vec![
                rule(0, vec![atom("p", &["?x"]), atom("q", &["?x"])], vec![atom("r", &["?x"])]),
                rule(1, vec![atom("q", &["?x"])], vec![atom("p", &["?x"])]),
            ],
            ..Default::default()
        };
        let ms = chase(&program, &[atom("r", &["a"])], &ChaseConfig::default()).unwrap();
        assert_eq!(ms.models, vec![BTreeSet::from([atom("q", &["a"]), atom("r", &["a"])])]);
    }

    #[test]
    fn constraint_kills_all_branches() {
        let program = GroundProgram {
            rules: vec![ProgramRule {
                id: 0,
                head: vec![],
                body: vec![atom("p", &["?x"]), atom("q", &["?x"])],
            }],
            ..Default::default()
        };
        let ms = chase(
            &program,
            &[atom("p", &["a"]), atom("q", &["a"])],
            &ChaseConfig::default(),
        )
        .unwrap();
        assert!(ms.inconsistent);
        assert!(ms.models.is_empty());
    }

    #[test]
    fn existential_chain_is_truncated() {
        // every p has an r-successor in p: infinite without the cap
        let program = GroundProgram {
            rules: vec![ProgramRule {
                id: 0,
                head: vec![HeadAtom::Exists {
                    role: crate::kb::RoleExpr::Named("r".into()),
                    concept: Some("p".into()),
                    var: "x".into(),
                }],
                body: vec![Atom::new(Predicate::concept("p"), vec![Term::var("x")])],
            }],
            ..Default::default()
        };
        let fact = Atom::new(Predicate::concept("p"), vec![Term::constant("a")]);
        let ms = chase(&program, std::slice::from_ref(&fact), &ChaseConfig::default()).unwrap();
        assert!(ms.truncated);
        assert_eq!(ms.models, vec![BTreeSet::from([fact])]);
    }

    #[test]
    fn branch_limit() {
        let mut rules = Vec::new();
        for i in 0..6 {
            rules.push(rule(
                i,
                vec![atom(&format!("p{i}"), &["?x"]), atom(&format!("q{i}"), &["?x"])],
                vec![atom("r", &["?x"])],
            ));
        }
        let program = GroundProgram {
            rules,
            ..Default::default()
        };
        let cfg = ChaseConfig {
            skolem_depth_cap: 3,
            max_branches: 8,
        };
        assert!(matches!(
            chase(&program, &[atom("r", &["a"])], &cfg),
            Err(Error::BranchLimitExceeded(8))
        ));
    }
}
