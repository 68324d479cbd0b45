//! Structural normalization of TBox axioms into simple inclusions.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::kb::{ConceptExpr, RoleExpr, Signature, TBoxAxiom, AUX_PREFIX};

/// Left-hand conjunct of a normalized inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LhsItem {
    Concept(String),
    /// `∃R.A`; `None` filler is `Thing`.
    Exists(RoleExpr, Option<String>),
}

/// Right-hand disjunct of a normalized inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RhsItem {
    Concept(String),
    Exists(RoleExpr, Option<String>),
    /// `∀R.(A1 ⊔ … ⊔ An)`; an empty list is `∀R.⊥`.
    Forall(RoleExpr, Vec<String>),
}

/// `lhs_1 ⊓ … ⊓ lhs_n ⊑ rhs_1 ⊔ … ⊔ rhs_m`. Empty lhs is `Thing`, empty rhs is `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inclusion {
    pub lhs: Vec<LhsItem>,
    pub rhs: Vec<RhsItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalizedAxiom {
    Concept(Inclusion),
    Role { sub: RoleExpr, sup: RoleExpr },
    Transitive(String),
    Functional(RoleExpr),
}

/// A clause of the right-hand CNF: disjuncts plus atomic concepts moved to
/// the left from `¬A` disjuncts. `None` is a tautology.
type RhsClause = Option<(Vec<RhsItem>, Vec<String>)>;
/// An alternative of the left-hand DNF: conjuncts plus atomic concepts
/// moved to the right from `¬A` conjuncts.
type LhsAlt = (Vec<LhsItem>, Vec<String>);

pub(crate) struct Normalizer<'a> {
    signature: &'a Signature,
    aux_counter: usize,
    pub(crate) aux_names: Vec<String>,
    queue: VecDeque<(ConceptExpr, ConceptExpr)>,
}

/// Normalizes `tbox`. Fresh concepts are named `aux_N` and avoid names in `signature`.
pub fn normalize(tbox: &[TBoxAxiom], signature: &Signature) -> Result<Vec<NormalizedAxiom>> {
    Normalizer::new(signature).run(tbox)
}

impl<'a> Normalizer<'a> {
    pub(crate) fn new(signature: &'a Signature) -> Self {
        Normalizer {
            signature,
            aux_counter: 0,
            aux_names: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    pub(crate) fn run(&mut self, tbox: &[TBoxAxiom]) -> Result<Vec<NormalizedAxiom>> {
        let mut out = Vec::new();
        for ax in tbox {
            match ax {
                TBoxAxiom::SubClass(c, d) => self.gci(c.clone(), d.clone(), &mut out)?,
                TBoxAxiom::EquivClass(c, d) => {
                    self.gci(c.clone(), d.clone(), &mut out)?;
                    self.gci(d.clone(), c.clone(), &mut out)?;
                }
                TBoxAxiom::Disjoint(a, b) => self.gci(
                    ConceptExpr::and(ConceptExpr::atomic(a.clone()), ConceptExpr::atomic(b.clone())),
                    ConceptExpr::Bottom,
                    &mut out,
                )?,
                TBoxAxiom::Domain(r, c) => self.gci(
                    ConceptExpr::some(RoleExpr::Named(r.clone()), ConceptExpr::Top),
                    c.clone(),
                    &mut out,
                )?,
                TBoxAxiom::Range(r, c) => self.gci(
                    ConceptExpr::Top,
                    ConceptExpr::all(RoleExpr::Named(r.clone()), c.clone()),
                    &mut out,
                )?,
                TBoxAxiom::SubRole(a, b) => push_role(&mut out, a, b),
                TBoxAxiom::EquivRole(a, b) => {
                    push_role(&mut out, a, b);
                    push_role(&mut out, b, a);
                }
                TBoxAxiom::Symmetric(r) => {
                    let r = RoleExpr::Named(r.clone());
                    let inv = r.inverse();
                    push_role(&mut out, &r, &inv);
                }
                TBoxAxiom::Transitive(r) => out.push(NormalizedAxiom::Transitive(r.clone())),
                TBoxAxiom::Functional(r) => out.push(NormalizedAxiom::Functional(r.clone())),
            }
        }
        Ok(out)
    }

    fn fresh(&mut self) -> String {
        loop {
            let name = format!("{AUX_PREFIX}{}", self.aux_counter);
            self.aux_counter += 1;
            if !self.signature.contains_key(&name) {
                self.aux_names.push(name.clone());
                return name;
            }
        }
    }

    /// Normalizes `c ⊑ d` together with every auxiliary definition it spawns.
    fn gci(&mut self, c: ConceptExpr, d: ConceptExpr, out: &mut Vec<NormalizedAxiom>) -> Result<()> {
        self.queue.push_back((c, d));
        while let Some((c, d)) = self.queue.pop_front() {
            let alts = self.lhs(&c)?;
            let clauses = self.rhs(&d)?;
            for (lhs, moved_right) in &alts {
                for clause in clauses.iter().flatten() {
                    let (rhs, moved_left) = clause;
                    let mut lhs = lhs.clone();
                    lhs.extend(moved_left.iter().cloned().map(LhsItem::Concept));
                    let mut rhs = rhs.clone();
                    rhs.extend(moved_right.iter().cloned().map(RhsItem::Concept));
                    dedup(&mut lhs);
                    dedup(&mut rhs);
                    let inc = Inclusion { lhs, rhs };
                    if !is_tautology(&inc) && !out.iter().any(|o| o == &NormalizedAxiom::Concept(inc.clone())) {
                        out.push(NormalizedAxiom::Concept(inc));
                    }
                }
            }
        }
        Ok(())
    }

    fn filler_lhs(&mut self, c: &ConceptExpr) -> Option<Option<String>> {
        match c {
            ConceptExpr::Atomic(a) => Some(Some(a.clone())),
            ConceptExpr::Top => Some(None),
            ConceptExpr::Bottom => None,
            other => {
                // Negative occurrence: the auxiliary concept over-approximates the filler.
                let x = self.fresh();
                self.queue.push_back((other.clone(), ConceptExpr::Atomic(x.clone())));
                Some(Some(x))
            }
        }
    }

    fn lhs(&mut self, c: &ConceptExpr) -> Result<Vec<LhsAlt>> {
        Ok(match c {
            ConceptExpr::Atomic(a) => vec![(vec![LhsItem::Concept(a.clone())], vec![])],
            ConceptExpr::Top => vec![(vec![], vec![])],
            ConceptExpr::Bottom => vec![],
            ConceptExpr::Not(a) => vec![(vec![], vec![a.clone()])],
            ConceptExpr::And(a, b) => {
                let la = self.lhs(a)?;
                let lb = self.lhs(b)?;
                let mut out = Vec::new();
                for (ia, ma) in &la {
                    for (ib, mb) in &lb {
                        let mut items = ia.clone();
                        items.extend(ib.iter().cloned());
                        let mut moved = ma.clone();
                        moved.extend(mb.iter().cloned());
                        out.push((items, moved));
                    }
                }
                out
            }
            ConceptExpr::Or(a, b) => {
                let mut out = self.lhs(a)?;
                out.extend(self.lhs(b)?);
                out
            }
            ConceptExpr::Some(r, f) => match self.filler_lhs(f) {
                Some(filler) => vec![(vec![LhsItem::Exists(r.clone(), filler)], vec![])],
                None => vec![],
            },
            ConceptExpr::All(..) => {
                return Err(Error::UnsupportedAxiom(format!(
                    "universal restriction on the left-hand side: {c}"
                )))
            }
        })
    }

    fn define_rhs(&mut self, c: &ConceptExpr) -> String {
        // Positive occurrence: the auxiliary concept under-approximates the filler.
        let x = self.fresh();
        self.queue.push_back((ConceptExpr::Atomic(x.clone()), c.clone()));
        x
    }

    fn rhs(&mut self, d: &ConceptExpr) -> Result<Vec<RhsClause>> {
        Ok(match d {
            ConceptExpr::Atomic(a) => vec![Some((vec![RhsItem::Concept(a.clone())], vec![]))],
            ConceptExpr::Top => vec![None],
            ConceptExpr::Bottom => vec![Some((vec![], vec![]))],
            ConceptExpr::Not(a) => vec![Some((vec![], vec![a.clone()]))],
            ConceptExpr::And(a, b) => {
                let mut out = self.rhs(a)?;
                out.extend(self.rhs(b)?);
                out
            }
            ConceptExpr::Or(a, b) => {
                let ca = self.rhs(a)?;
                let cb = self.rhs(b)?;
                let mut out = Vec::new();
                for x in &ca {
                    for y in &cb {
                        out.push(match (x, y) {
                            (Some((ix, mx)), Some((iy, my))) => {
                                let mut items = ix.clone();
                                items.extend(iy.iter().cloned());
                                let mut moved = mx.clone();
                                moved.extend(my.iter().cloned());
                                Some((items, moved))
                            }
                            _ => None,
                        });
                    }
                }
                out
            }
            ConceptExpr::Some(r, f) => match &**f {
                ConceptExpr::Atomic(a) => {
                    vec![Some((vec![RhsItem::Exists(r.clone(), Some(a.clone()))], vec![]))]
                }
                ConceptExpr::Top => vec![Some((vec![RhsItem::Exists(r.clone(), None)], vec![]))],
                ConceptExpr::Bottom => vec![Some((vec![], vec![]))],
                other => {
                    let x = self.define_rhs(other);
                    vec![Some((vec![RhsItem::Exists(r.clone(), Some(x))], vec![]))]
                }
            },
            ConceptExpr::All(r, f) => match atomic_disjunction(f) {
                Some(None) => vec![None],
                Some(Some(names)) => vec![Some((vec![RhsItem::Forall(r.clone(), names)], vec![]))],
                None => {
                    let x = self.define_rhs(f);
                    vec![Some((vec![RhsItem::Forall(r.clone(), vec![x])], vec![]))]
                }
            },
        })
    }
}

/// `Some(Some(names))` if `c` is a disjunction of atomic concepts (⊥ allowed),
/// `Some(None)` if it contains ⊤, `None` otherwise.
fn atomic_disjunction(c: &ConceptExpr) -> Option<Option<Vec<String>>> {
    match c {
        ConceptExpr::Atomic(a) => Some(Some(vec![a.clone()])),
        ConceptExpr::Bottom => Some(Some(vec![])),
        ConceptExpr::Top => Some(None),
        ConceptExpr::Or(a, b) => match (atomic_disjunction(a)?, atomic_disjunction(b)?) {
            (Some(mut x), Some(y)) => {
                x.extend(y);
                Some(Some(x))
            }
            _ => Some(None),
        },
        _ => None,
    }
}

fn push_role(out: &mut Vec<NormalizedAxiom>, sub: &RoleExpr, sup: &RoleExpr) {
    let (sub, sup) = if sub.is_inverse() {
        (sub.inverse(), sup.inverse())
    } else {
        (sub.clone(), sup.clone())
    };
    if sub == sup {
        return;
    }
    let ax = NormalizedAxiom::Role { sub, sup };
    if !out.contains(&ax) {
        out.push(ax);
    }
}

fn dedup<T: PartialEq>(v: &mut Vec<T>) {
    let mut i = 0;
    while i < v.len() {
        if v[..i].contains(&v[i]) {
            v.remove(i);
        } else {
            i += 1;
        }
    }
}

fn is_tautology(inc: &Inclusion) -> bool {
    inc.lhs.iter().any(|l| {
        inc.rhs.iter().any(|r| match (l, r) {
            (LhsItem::Concept(a), RhsItem::Concept(b)) => a == b,
            (LhsItem::Exists(r1, f1), RhsItem::Exists(r2, f2)) => r1 == r2 && (f1 == f2 || f2.is_none()),
            _ => false,
        })
    })
}
