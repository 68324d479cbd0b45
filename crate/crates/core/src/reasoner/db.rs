//! Interned fact storage with per-position indexes and a backtracking join.

use std::collections::{HashMap, HashSet};

pub(crate) type Sym = u32;

#[derive(Debug, Clone, Default)]
pub(crate) struct Interner {
    names: Vec<String>,
    ids: HashMap<String, Sym>,
    /// Nesting depth of skolem constants; 0 for everything else.
    depth: Vec<usize>,
    named: Vec<bool>,
}

impl Interner {
    pub(crate) fn intern(&mut self, name: &str) -> Sym {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        self.depth.push(0);
        self.named.push(false);
        id
    }

    pub(crate) fn fresh(&mut self, prefix: &str, depth: usize) -> Sym {
        let id = self.intern(&format!("{prefix}{}", self.names.len()));
        self.depth[id as usize] = depth;
        id
    }

    pub(crate) fn get(&self, name: &str) -> Option<Sym> {
        self.ids.get(name).copied()
    }

    pub(crate) fn name(&self, id: Sym) -> &str {
        &self.names[id as usize]
    }

    pub(crate) fn depth(&self, id: Sym) -> usize {
        self.depth[id as usize]
    }

    pub(crate) fn set_named(&mut self, id: Sym) {
        self.named[id as usize] = true;
    }

    pub(crate) fn is_named(&self, id: Sym) -> bool {
        self.named[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Relation {
    arity: usize,
    data: Vec<Sym>,
    set: HashSet<Box<[Sym]>>,
    /// Per argument position: value → ascending tuple ids.
    index: Vec<HashMap<Sym, Vec<u32>>>,
}

impl Relation {
    pub(crate) fn new(arity: usize) -> Self {
        Relation {
            arity,
            data: Vec::new(),
            set: HashSet::new(),
            index: vec![HashMap::new(); arity],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.data.len().checked_div(self.arity).unwrap_or(self.set.len())
    }

    pub(crate) fn tuple(&self, i: usize) -> &[Sym] {
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub(crate) fn contains(&self, t: &[Sym]) -> bool {
        self.set.contains(t)
    }

    pub(crate) fn insert(&mut self, t: &[Sym]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        if !self.set.insert(t.into()) {
            return false;
        }
        let id = self.len() as u32;
        for (pos, &v) in t.iter().enumerate() {
            self.index[pos].entry(v).or_default().push(id);
        }
        self.data.extend_from_slice(t);
        true
    }

    pub(crate) fn lookup(&self, pos: usize, v: Sym) -> &[u32] {
        self.index[pos].get(&v).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = &[Sym]> {
        (0..self.len()).map(move |i| self.tuple(i))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Db {
    pub(crate) rels: Vec<Relation>,
}

impl Db {
    pub(crate) fn new(arities: &[usize]) -> Self {
        Db {
            rels: arities.iter().map(|&a| Relation::new(a)).collect(),
        }
    }

    pub(crate) fn lens(&self) -> Vec<usize> {
        self.rels.iter().map(Relation::len).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum CTerm {
    Var(usize),
    Const(Sym),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct CAtom {
    pub(crate) pred: usize,
    pub(crate) args: Vec<CTerm>,
}

impl CAtom {
    pub(crate) fn ground(&self, binding: &[Option<Sym>]) -> Vec<Sym> {
        self.args
            .iter()
            .map(|t| match *t {
                CTerm::Const(c) => c,
                CTerm::Var(v) => binding[v].expect("head variable bound by body"),
            })
            .collect()
    }
}

/// Enumerates bindings of `atoms` (matched in the given order) against `db`,
/// atom `k` restricted to tuple ids in `ranges[k]`. Candidate values are
/// accepted only if `allow` holds. The callback returns `false` to stop;
/// the function returns `false` iff stopped.
pub(crate) struct Join<'a> {
    pub(crate) db: &'a Db,
    pub(crate) atoms: Vec<&'a CAtom>,
    pub(crate) ranges: Vec<(usize, usize)>,
    pub(crate) allow: Option<&'a dyn Fn(Sym) -> bool>,
}

impl Join<'_> {
    pub(crate) fn run(
        &self,
        binding: &mut Vec<Option<Sym>>,
        f: &mut dyn FnMut(&[Option<Sym>]) -> bool,
    ) -> bool {
        self.step(0, binding, f)
    }

    fn step(
        &self,
        k: usize,
        binding: &mut Vec<Option<Sym>>,
        f: &mut dyn FnMut(&[Option<Sym>]) -> bool,
    ) -> bool {
        if k == self.atoms.len() {
            return f(binding);
        }
        let atom = self.atoms[k];
        let rel = &self.db.rels[atom.pred];
        let (lo, hi) = self.ranges[k];
        let hi = hi.min(rel.len());
        if lo >= hi {
            return true;
        }
        let bound = atom.args.iter().enumerate().find_map(|(pos, t)| match *t {
            CTerm::Const(c) => Some((pos, c)),
            CTerm::Var(v) => binding[v].map(|c| (pos, c)),
        });
        let mut newly = Vec::with_capacity(atom.args.len());
        let mut visit = |i: usize, binding: &mut Vec<Option<Sym>>| -> bool {
            let t = rel.tuple(i);
            newly.clear();
            let mut ok = true;
            for (arg, &val) in atom.args.iter().zip(t) {
                match *arg {
                    CTerm::Const(c) => {
                        if c != val {
                            ok = false;
                            break;
                        }
                    }
                    CTerm::Var(v) => match binding[v] {
                        Some(b) if b != val => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            if self.allow.is_some_and(|a| !a(val)) {
                                ok = false;
                                break;
                            }
                            binding[v] = Some(val);
                            newly.push(v);
                        }
                    },
                }
            }
            let cont = !ok || self.step(k + 1, binding, f);
            for &v in &newly {
                binding[v] = None;
            }
            cont
        };
        match bound {
            Some((pos, val)) => {
                let ids = rel.lookup(pos, val);
                let start = ids.partition_point(|&i| (i as usize) < lo);
                for &i in &ids[start..] {
                    if i as usize >= hi {
                        break;
                    }
                    if !visit(i as usize, binding) {
                        return false;
                    }
                }
            }
            None => {
                for i in lo..hi {
                    if !visit(i, binding) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
