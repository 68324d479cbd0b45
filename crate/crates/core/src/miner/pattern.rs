use std::collections::HashMap;
use std::fmt;

use crate::kb::{Atom, Term};
use crate::reasoner::QuerySpec;

pub const KEY: &str = "key";

/// A conjunctive query whose first atom is the reference concept applied to `key`.
/// `O` atoms are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub key: String,
    pub atoms: Vec<Atom>,
}

impl Pattern {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Pattern {
            key: KEY.to_string(),
            atoms,
        }
    }

    /// Number of atoms, the reference atom included.
    pub fn depth(&self) -> usize {
        self.atoms.len()
    }

    pub fn query(&self) -> QuerySpec {
        QuerySpec::new(self.key.clone(), self.atoms.clone())
    }

    /// The query without its reference atom.
    pub fn body_query(&self) -> QuerySpec {
        QuerySpec::new(self.key.clone(), self.atoms[1..].to_vec())
    }

    /// Variables renamed to `key`, `x1`, `x2`, … in order of first occurrence.
    pub fn canonical(&self) -> Pattern {
        let mut names: HashMap<&str, String> = HashMap::from([(self.key.as_str(), KEY.to_string())]);
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Variable(v) => {
                            let n = names.len();
                            Term::var(names.entry(v.as_str()).or_insert_with(|| format!("x{n}")).clone())
                        }
                        c => c.clone(),
                    })
                    .collect();
                Atom::new(a.predicate.clone(), args)
            })
            .collect();
        Pattern {
            key: KEY.to_string(),
            atoms,
        }
    }
}

/// Writes an atom as `p(t1,t2)` without variable sigils.
pub(crate) fn fmt_atom(a: &Atom, f: &mut impl fmt::Write) -> fmt::Result {
    write!(f, "{}(", a.predicate.name)?;
    for (i, t) in a.args.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        f.write_str(t.name())?;
    }
    f.write_char(')')
}

pub fn atom_to_string(a: &Atom) -> String {
    let mut s = String::new();
    fmt_atom(a, &mut s).expect("writing to a String");
    s
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q({}) :- ", self.key)?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            fmt_atom(a, f)?;
        }
        Ok(())
    }
}
