//! Serialization back to the KB surface syntax.

use std::fmt::{self, Display, Formatter, Write};

use super::{Atom, CombinedKb, ConceptExpr, DlRule, PredicateKind, RoleExpr, TBoxAxiom};

struct Sx<'a, T>(&'a T);

impl Display for Sx<'_, RoleExpr> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            RoleExpr::Named(n) => f.write_str(n),
            RoleExpr::Inverse(n) => write!(f, "(inv {n})"),
        }
    }
}

impl Display for Sx<'_, ConceptExpr> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            ConceptExpr::Atomic(n) => f.write_str(n),
            ConceptExpr::Top => f.write_str("Thing"),
            ConceptExpr::Bottom => f.write_str("Nothing"),
            ConceptExpr::And(a, b) => write!(f, "(and {} {})", Sx(&**a), Sx(&**b)),
            ConceptExpr::Or(a, b) => write!(f, "(or {} {})", Sx(&**a), Sx(&**b)),
            ConceptExpr::Some(r, c) => write!(f, "(some {} {})", Sx(r), Sx(&**c)),
            ConceptExpr::All(r, c) => write!(f, "(all {} {})", Sx(r), Sx(&**c)),
            ConceptExpr::Not(n) => write!(f, "(not {n})"),
        }
    }
}

impl Display for Sx<'_, Atom> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.0.predicate.name)?;
        for t in &self.0.args {
            write!(f, " {t}")?;
        }
        f.write_char(')')
    }
}

impl Display for Sx<'_, TBoxAxiom> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            TBoxAxiom::SubClass(a, b) => write!(f, "(subclass {} {})", Sx(a), Sx(b)),
            TBoxAxiom::EquivClass(a, b) => write!(f, "(equivalent {} {})", Sx(a), Sx(b)),
            TBoxAxiom::Disjoint(a, b) => write!(f, "(disjoint {a} {b})"),
            TBoxAxiom::SubRole(a, b) => write!(f, "(subrole {} {})", Sx(a), Sx(b)),
            TBoxAxiom::EquivRole(a, b) => write!(f, "(equivrole {} {})", Sx(a), Sx(b)),
            TBoxAxiom::Transitive(r) => write!(f, "(transitive {r})"),
            TBoxAxiom::Functional(r) => write!(f, "(functional {})", Sx(r)),
            TBoxAxiom::Symmetric(r) => write!(f, "(symmetric {r})"),
            TBoxAxiom::Domain(r, c) => write!(f, "(domain {r} {})", Sx(c)),
            TBoxAxiom::Range(r, c) => write!(f, "(range {r} {})", Sx(c)),
        }
    }
}

impl Display for Sx<'_, DlRule> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("(rule (head")?;
        for a in &self.0.head {
            write!(f, " {}", Sx(a))?;
        }
        f.write_str(") (body")?;
        for a in &self.0.body {
            write!(f, " {}", Sx(a))?;
        }
        f.write_str("))")
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        Sx(self).fmt(f)
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        Sx(self).fmt(f)
    }
}

impl fmt::Display for TBoxAxiom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        Sx(self).fmt(f)
    }
}

/// Writes the KB in the surface syntax accepted by [`super::parse_kb`]:
/// declarations first (fixing kinds and signature order), then axioms,
/// rules and facts.
impl fmt::Display for CombinedKb {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (name, kind) in &self.signature {
            match kind {
                PredicateKind::Concept => writeln!(f, "(concept {name})")?,
                PredicateKind::Role => writeln!(f, "(role {name})")?,
                PredicateKind::NonDl(n) => writeln!(f, "(nondl {name} {n})")?,
                PredicateKind::Equality | PredicateKind::OPred => {}
            }
        }
        for ax in &self.tbox {
            writeln!(f, "{}", Sx(ax))?;
        }
        for rule in &self.rules {
            writeln!(f, "{}", Sx(rule))?;
        }
        for fact in &self.abox {
            match fact.predicate.kind {
                PredicateKind::Concept => {
                    writeln!(f, "(instance {} {})", fact.predicate.name, fact.args[0])?
                }
                PredicateKind::Role => writeln!(
                    f,
                    "(related {} {} {})",
                    fact.predicate.name, fact.args[0], fact.args[1]
                )?,
                _ => {
                    write!(f, "(fact {}", fact.predicate.name)?;
                    for t in &fact.args {
                        write!(f, " {t}")?;
                    }
                    writeln!(f, ")")?;
                }
            }
        }
        Ok(())
    }
}
