//! Translation of a combined KB into a positive disjunctive existential-rule program.

mod normalize;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

pub use normalize::{normalize, Inclusion, LhsItem, NormalizedAxiom, RhsItem};

use crate::error::Result;
use crate::kb::{make_dl_safe, Atom, CombinedKb, Predicate, PredicateKind, RoleExpr, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HeadAtom {
    Atom(Atom),
    /// `∃role.concept` asserted of the frontier variable `var`; `None` concept is `Thing`.
    Exists {
        role: RoleExpr,
        concept: Option<String>,
        var: String,
    },
}

/// `head_1 ∨ … ∨ head_k ← body`. An empty head is an integrity constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProgramRule {
    pub id: usize,
    pub head: Vec<HeadAtom>,
    pub body: Vec<Atom>,
}

impl ProgramRule {
    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn has_existential(&self) -> bool {
        self.head.iter().any(|h| matches!(h, HeadAtom::Exists { .. }))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<ProgramRule>,
    /// Named individuals; `O` holds exactly for these.
    pub individuals: BTreeSet<String>,
    /// User predicates plus auxiliary concepts, in declaration order.
    pub predicates: Signature,
}

impl GroundProgram {
    /// True if no rule has an existential or disjunctive head.
    pub fn is_datalog(&self) -> bool {
        self.rules
            .iter()
            .all(|r| r.head.len() <= 1 && !r.has_existential())
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn concept(name: &str, t: Term) -> Atom {
    Atom::new(Predicate::concept(name), vec![t])
}

struct Builder {
    rules: Vec<ProgramRule>,
    seen: HashSet<(Vec<HeadAtom>, Vec<Atom>)>,
}

impl Builder {
    fn push(&mut self, head: Vec<HeadAtom>, body: Vec<Atom>) {
        if self.seen.insert((head.clone(), body.clone())) {
            let id = self.rules.len();
            self.rules.push(ProgramRule { id, head, body });
        }
    }

    fn inclusion(&mut self, inc: &Inclusion) {
        let x = "x";
        let mut names = (0..).map(|i| match i {
            0 => "y".to_string(),
            1 => "z".to_string(),
            n => format!("y{}", n - 1),
        });
        let mut body = Vec::new();
        for item in &inc.lhs {
            match item {
                LhsItem::Concept(a) => body.push(concept(a, v(x))),
                LhsItem::Exists(r, f) => {
                    let y = names.next().unwrap();
                    body.push(r.atom(v(x), v(&y)));
                    if let Some(f) = f {
                        body.push(concept(f, v(&y)));
                    }
                }
            }
        }
        let mut head = Vec::new();
        for item in &inc.rhs {
            match item {
                RhsItem::Concept(a) => head.push(HeadAtom::Atom(concept(a, v(x)))),
                RhsItem::Exists(r, f) => head.push(HeadAtom::Exists {
                    role: r.clone(),
                    concept: f.clone(),
                    var: x.to_string(),
                }),
                RhsItem::Forall(r, fillers) => {
                    let y = names.next().unwrap();
                    body.push(r.atom(v(x), v(&y)));
                    for f in fillers {
                        head.push(HeadAtom::Atom(concept(f, v(&y))));
                    }
                }
            }
        }
        if !body.iter().any(|a| a.variables().any(|n| n == x)) {
            body.insert(0, Atom::new(Predicate::thing(), vec![v(x)]));
        }
        self.push(head, body);
    }

    fn role_inclusion(&mut self, sub: &RoleExpr, sup: &RoleExpr) {
        self.push(
            vec![HeadAtom::Atom(sup.atom(v("x"), v("y")))],
            vec![sub.atom(v("x"), v("y"))],
        );
    }

    fn transitive(&mut self, r: &str) {
        let atom = |a, b| Atom::new(Predicate::role(r), vec![v(a), v(b)]);
        self.push(
            vec![HeadAtom::Atom(atom("x", "z"))],
            vec![atom("x", "y"), atom("y", "z")],
        );
    }

    fn functional(&mut self, r: &RoleExpr) {
        let eq = Atom::new(Predicate::equality(), vec![v("x1"), v("x2")]);
        // R(y,x1), R(y,x2) through the role expression; the inverse form mirrors it.
        self.push(
            vec![HeadAtom::Atom(eq)],
            vec![r.atom(v("y"), v("x1")), r.atom(v("y"), v("x2"))],
        );
    }

    fn equality(&mut self, predicates: &Signature) {
        let eq = |a: &str, b: &str| Atom::new(Predicate::equality(), vec![v(a), v(b)]);
        self.push(
            vec![HeadAtom::Atom(eq("x", "x"))],
            vec![Atom::new(Predicate::o(), vec![v("x")])],
        );
        self.push(vec![HeadAtom::Atom(eq("y", "x"))], vec![eq("x", "y")]);
        self.push(
            vec![HeadAtom::Atom(eq("x", "z"))],
            vec![eq("x", "y"), eq("y", "z")],
        );
        for (name, &kind) in predicates {
            let pred = Predicate {
                name: name.clone(),
                kind,
            };
            if pred.is_builtin() {
                continue;
            }
            let n = pred.arity();
            let xs: Vec<Term> = (1..=n).map(|i| v(&format!("x{i}"))).collect();
            for i in 0..n {
                let mut ys = xs.clone();
                ys[i] = v("y");
                let name_i = format!("x{}", i + 1);
                self.push(
                    vec![HeadAtom::Atom(Atom::new(pred.clone(), ys))],
                    vec![Atom::new(pred.clone(), xs.clone()), eq(&name_i, "y")],
                );
            }
        }
    }
}

/// Builds the rule program for `kb`: normalized TBox inclusions, role axioms,
/// equality axioms when needed, then the DL-safe user rules.
pub fn clausify(kb: &CombinedKb) -> Result<GroundProgram> {
    let mut normalizer = normalize::Normalizer::new(&kb.signature);
    let normalized = normalizer.run(&kb.tbox)?;
    let mut predicates = kb.signature.clone();
    for aux in &normalizer.aux_names {
        predicates.insert(aux.clone(), PredicateKind::Concept);
    }

    let mut b = Builder {
        rules: Vec::new(),
        seen: HashSet::new(),
    };
    let mut functional = false;
    for ax in &normalized {
        match ax {
            NormalizedAxiom::Concept(inc) => b.inclusion(inc),
            NormalizedAxiom::Role { sub, sup } => b.role_inclusion(sub, sup),
            NormalizedAxiom::Transitive(r) => b.transitive(r),
            NormalizedAxiom::Functional(r) => {
                functional = true;
                b.functional(r)
            }
        }
    }
    let explicit_eq = kb
        .rules
        .iter()
        .flat_map(|r| r.head.iter().chain(&r.body))
        .any(|a| a.predicate.kind == PredicateKind::Equality);
    if functional || explicit_eq {
        b.equality(&predicates);
    }
    let mut individuals = kb.individuals.clone();
    for rule in &kb.rules {
        let safe = make_dl_safe(rule);
        for atom in safe.head.iter().chain(&safe.body) {
            individuals.extend(atom.constants().map(str::to_string));
        }
        b.push(
            safe.head.into_iter().map(HeadAtom::Atom).collect(),
            safe.body,
        );
    }
    Ok(GroundProgram {
        rules: b.rules,
        individuals,
        predicates,
    })
}

impl fmt::Display for HeadAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadAtom::Atom(a) => write!(f, "{a}"),
            HeadAtom::Exists { role, concept, var } => {
                let r = match role {
                    RoleExpr::Named(n) => n.clone(),
                    RoleExpr::Inverse(n) => format!("inv({n})"),
                };
                let c = concept.as_deref().unwrap_or(crate::kb::THING);
                write!(f, "exists[{r},{c}](?{var})")
            }
        }
    }
}

/// `h1 | h2 :- b1, b2.`; constraints print with an empty head.
impl fmt::Display for ProgramRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str(if self.head.is_empty() { ":- " } else { " :- " })?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
