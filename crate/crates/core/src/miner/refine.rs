//! Syntactic refinement: dependent atoms and right-brother copies.

use super::trie::{NodeId, Origin, Trie};
use super::VariableSharing;
use crate::kb::{Atom, Predicate, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub atom: Atom,
    pub new_vars: Vec<String>,
    pub origin: Origin,
}

/// Source of globally fresh variable names `x1`, `x2`, ….
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    issued: usize,
}

impl FreshVars {
    pub fn next_var(&mut self) -> String {
        self.issued += 1;
        format!("x{}", self.issued)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Existing(usize),
    Fresh(usize),
}

fn variables(atoms: &[Atom]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in atoms {
        for v in a.variables() {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        }
    }
    out
}

/// All slot vectors for one predicate with position `pivot` fixed to existing variable `v`.
fn slot_vectors(
    arity: usize,
    pivot: usize,
    v: usize,
    existing: &[String],
    last_new: &[String],
    sharing: VariableSharing,
) -> Vec<Vec<Slot>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(arity);
    fn go(
        j: usize,
        fresh_used: usize,
        cur: &mut Vec<Slot>,
        out: &mut Vec<Vec<Slot>>,
        ctx: (usize, usize, usize, &[String], &[String], VariableSharing),
    ) {
        let (arity, pivot, v, existing, last_new, sharing) = ctx;
        if j == arity {
            out.push(cur.clone());
            return;
        }
        if j == pivot {
            cur.push(Slot::Existing(v));
            go(j + 1, fresh_used, cur, out, ctx);
            cur.pop();
            return;
        }
        if sharing == VariableSharing::Extended {
            for (e, name) in existing.iter().enumerate() {
                if j < pivot && last_new.contains(name) {
                    continue;
                }
                cur.push(Slot::Existing(e));
                go(j + 1, fresh_used, cur, out, ctx);
                cur.pop();
            }
            for f in 0..fresh_used {
                cur.push(Slot::Fresh(f));
                go(j + 1, fresh_used, cur, out, ctx);
                cur.pop();
            }
        }
        cur.push(Slot::Fresh(fresh_used));
        go(j + 1, fresh_used + 1, cur, out, ctx);
        cur.pop();
    }
    go(
        0,
        0,
        &mut cur,
        &mut out,
        (arity, pivot, v, existing, last_new, sharing),
    );
    out
}

/// Atoms over `preds` that contain a variable introduced by the last atom of `q`.
/// Order: predicate, first position holding such a variable, the variable,
/// then the remaining positions (existing variables before fresh ones).
pub fn dependent_atoms(
    q: &[Atom],
    last_new: &[String],
    preds: &[Predicate],
    sharing: VariableSharing,
    fresh: &mut FreshVars,
) -> Vec<Candidate> {
    let existing = variables(q);
    let mut out = Vec::new();
    for p in preds {
        for pivot in 0..p.arity() {
            for v in last_new {
                let vi = existing
                    .iter()
                    .position(|e| e == v)
                    .expect("new variable occurs in the query");
                for slots in slot_vectors(p.arity(), pivot, vi, &existing, last_new, sharing) {
                    let nfresh = slots.iter().filter_map(|s| match s {
                        Slot::Fresh(f) => Some(f + 1),
                        Slot::Existing(_) => None,
                    });
                    let nfresh = nfresh.max().unwrap_or(0);
                    let syntactic = |names: &[String]| -> Atom {
                        Atom::new(
                            p.clone(),
                            slots
                                .iter()
                                .map(|s| match *s {
                                    Slot::Existing(e) => Term::var(existing[e].clone()),
                                    Slot::Fresh(f) => Term::var(names[f].clone()),
                                })
                                .collect(),
                        )
                    };
                    if nfresh == 0 {
                        let atom = syntactic(&[]);
                        if !q.contains(&atom) {
                            out.push(Candidate {
                                atom,
                                new_vars: Vec::new(),
                                origin: Origin::Dependent,
                            });
                        }
                        continue;
                    }
                    let names: Vec<String> = (0..nfresh).map(|_| fresh.next_var()).collect();
                    out.push(Candidate {
                        atom: syntactic(&names),
                        new_vars: names,
                        origin: Origin::Dependent,
                    });
                }
            }
        }
    }
    out
}

/// Copies of the right siblings of `node`, their new variables renamed fresh.
pub fn brother_copies(trie: &Trie, node: NodeId, fresh: &mut FreshVars) -> Vec<Candidate> {
    let Some(parent) = trie.node(node).parent else {
        return Vec::new();
    };
    let q = trie.path_atoms(node);
    let siblings = &trie.node(parent).children;
    let pos = siblings.iter().position(|&s| s == node).expect("child of its parent");
    let mut out = Vec::new();
    for &s in &siblings[pos + 1..] {
        let sib = trie.node(s);
        let renamed: Vec<(String, String)> = sib
            .new_vars
            .iter()
            .map(|v| (v.clone(), fresh.next_var()))
            .collect();
        let args = sib
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::Variable(v) => match renamed.iter().find(|(old, _)| old == v) {
                    Some((_, new)) => Term::var(new.clone()),
                    None => t.clone(),
                },
                c => c.clone(),
            })
            .collect();
        let atom = Atom::new(sib.atom.predicate.clone(), args);
        if q.contains(&atom) {
            continue;
        }
        out.push(Candidate {
            atom,
            new_vars: renamed.into_iter().map(|(_, n)| n).collect(),
            origin: Origin::Brother,
        });
    }
    out
}

/// Dependent atoms of `node`'s last atom followed by its right-brother copies.
pub fn refine_candidates(
    trie: &Trie,
    node: NodeId,
    preds: &[Predicate],
    sharing: VariableSharing,
    fresh: &mut FreshVars,
) -> Vec<Candidate> {
    let q = trie.path_atoms(node);
    let mut out = dependent_atoms(&q, &trie.node(node).new_vars, preds, sharing, fresh);
    out.extend(brother_copies(trie, node, fresh));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::pattern::atom_to_string;
    use crate::miner::trie::TrieNode;
    use num_rational::Ratio;

    fn root() -> Trie {
        Trie::new(TrieNode {
            atom: Atom::new(Predicate::concept("Client"), vec![Term::var("key")]),
            parent: None,
            children: Vec::new(),
            depth: 1,
            support: Ratio::from_integer(1),
            answers: 3,
            new_vars: vec!["key".into()],
            origin: Origin::Root,
        })
    }

    fn strings(c: &[Candidate]) -> Vec<String> {
        c.iter().map(|c| atom_to_string(&c.atom)).collect()
    }

    #[test]
    fn single_new_sharing_on_root() {
        let t = root();
        let mut fresh = FreshVars::default();
        let c = refine_candidates(&t, Trie::ROOT, &[Predicate::role("isOwnerOf")], VariableSharing::SingleNew, &mut fresh);
        assert_eq!(strings(&c), vec!["isOwnerOf(key,x1)", "isOwnerOf(x2,key)"]);
    }

    #[test]
    fn extended_sharing_on_root() {
        let t = root();
        let mut fresh = FreshVars::default();
        let c = refine_candidates(&t, Trie::ROOT, &[Predicate::role("isOwnerOf")], VariableSharing::Extended, &mut fresh);
        assert_eq!(strings(&c), vec!["isOwnerOf(key,key)", "isOwnerOf(key,x1)", "isOwnerOf(x2,key)"]);
    }

    #[test]
    fn extended_sharing_fresh_positions_may_coincide() {
        let q = vec![
            Atom::new(Predicate::concept("C"), vec![Term::var("key")]),
            Atom::new(Predicate::role("r"), vec![Term::var("key"), Term::var("y")]),
        ];
        let mut fresh = FreshVars::default();
        let c = dependent_atoms(&q, &["y".into()], &[Predicate::non_dl("f", 3)], VariableSharing::Extended, &mut fresh);
        // fresh variables replaced by their index among the candidate's new variables
        let s: Vec<String> = c
            .iter()
            .map(|c| {
                let args: Vec<String> = c
                    .atom
                    .args
                    .iter()
                    .map(|t| match c.new_vars.iter().position(|v| v == t.name()) {
                        Some(i) => format!("_{i}"),
                        None => t.name().to_string(),
                    })
                    .collect();
                args.join(",")
            })
            .collect();
        assert!(s.contains(&"y,_0,_0".to_string()));
        assert!(s.contains(&"key,y,y".to_string()));
        assert!(s.contains(&"_0,y,_1".to_string()));
        let unique: std::collections::BTreeSet<&String> = s.iter().collect();
        assert_eq!(unique.len(), s.len());
    }

    #[test]
    fn right_brothers_are_copied_with_fresh_variables() {
        let mut t = root();
        let mk = |p: &str, a: &str, b: &str, nv: &str| TrieNode {
            atom: Atom::new(Predicate::role(p), vec![Term::var(a), Term::var(b)]),
            parent: None,
            children: Vec::new(),
            depth: 2,
            support: Ratio::from_integer(1),
            answers: 3,
            new_vars: vec![nv.into()],
            origin: Origin::Dependent,
        };
        let a = t.add_child(Trie::ROOT, mk("isOwnerOf", "key", "x1", "x1"));
        t.add_child(Trie::ROOT, mk("relative", "key", "x2", "x2"));
        let mut fresh = FreshVars { issued: 2 };
        let c = brother_copies(&t, a, &mut fresh);
        assert_eq!(strings(&c), vec!["relative(key,x3)"]);
        assert_eq!(c[0].new_vars, vec!["x3".to_string()]);
        assert!(brother_copies(&t, 2, &mut fresh).is_empty());
    }

    #[test]
    fn no_new_variable_means_no_dependent_atoms() {
        let q = vec![Atom::new(Predicate::concept("C"), vec![Term::var("key")])];
        let mut fresh = FreshVars::default();
        assert!(dependent_atoms(&q, &[], &[Predicate::concept("D")], VariableSharing::Extended, &mut fresh).is_empty());
    }
}
