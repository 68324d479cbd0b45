//! Reader for the s-expression KB format.
//!
//! Kinds are resolved in two passes: declarations, axioms and facts fix
//! the kind of every name they mention; rule atoms are resolved afterwards,
//! and a rule-only predicate becomes a non-DL predicate.

use std::collections::BTreeSet;

use super::{
    is_identifier, Atom, CombinedKb, ConceptExpr, DlRule, Predicate, PredicateKind, RoleExpr,
    Signature, TBoxAxiom, Term, NOTHING, O_PREDICATE, THING,
};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Read `(equivalent A (not B))` as disjointness plus `Thing ⊑ A ⊔ B`.
    pub covering_complement: bool,
}

pub fn parse_kb(source: &str) -> Result<CombinedKb, ParseError> {
    parse_kb_with(source, ParseOptions::default())
}

pub fn parse_kb_with(source: &str, options: ParseOptions) -> Result<CombinedKb, ParseError> {
    let exprs = read_all(source)?;
    let mut p = KbParser {
        options,
        signature: Signature::new(),
        kb: CombinedKb::default(),
    };
    let mut rules = Vec::new();
    for e in &exprs {
        let (head, items, pos) = p.form(e)?;
        if head == "rule" {
            rules.push((items, pos));
        } else {
            p.statement(head, items, pos)?;
        }
    }
    for (items, pos) in rules {
        let rule = p.rule(items, pos)?;
        p.kb.rules.push(rule);
    }
    p.kb.signature = p.signature;
    p.kb.individuals = p
        .kb
        .abox
        .iter()
        .flat_map(|a| a.constants().map(str::to_string))
        .collect::<BTreeSet<_>>();
    Ok(p.kb)
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn err(pos: Pos, kind: ParseErrorKind) -> ParseError {
    ParseError::new(pos.line, pos.col, kind)
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

fn read_all(source: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let here = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                col += 1;
                let (items, pos) = stack
                    .pop()
                    .ok_or_else(|| syntax(here, "unexpected `)`"))?;
                let list = SExpr::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                    col += 1;
                }
                let sym = SExpr::Symbol(tok, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(sym),
                    None => return Err(syntax(here, "expected `(` at top level")),
                }
            }
        }
    }
    if let Some((_, pos)) = stack.pop() {
        return Err(syntax(pos, "unclosed `(`"));
    }
    Ok(top)
}

struct KbParser {
    options: ParseOptions,
    signature: Signature,
    kb: CombinedKb,
}

impl KbParser {
    fn form<'e>(&self, e: &'e SExpr) -> Result<(&'e str, &'e [SExpr], Pos), ParseError> {
        match e {
            SExpr::List(items, pos) => match items.first() {
                Some(SExpr::Symbol(head, _)) => Ok((head.as_str(), &items[1..], *pos)),
                Some(other) => Err(syntax(other.pos(), "expected a keyword")),
                None => Err(syntax(*pos, "empty expression")),
            },
            SExpr::Symbol(_, pos) => Err(syntax(*pos, "expected a list")),
        }
    }

    fn name<'e>(&self, e: &'e SExpr) -> Result<&'e str, ParseError> {
        match e {
            SExpr::Symbol(s, pos) => {
                if is_identifier(s) {
                    Ok(s)
                } else {
                    Err(syntax(*pos, format!("invalid name `{s}`")))
                }
            }
            SExpr::List(_, pos) => Err(syntax(*pos, "expected a name")),
        }
    }

    fn arg_count(&self, items: &[SExpr], n: usize, pos: Pos, what: &str) -> Result<(), ParseError> {
        if items.len() != n {
            return Err(syntax(
                pos,
                format!("`{what}` takes {n} argument(s), found {}", items.len()),
            ));
        }
        Ok(())
    }

    fn declare(&mut self, name: &str, kind: PredicateKind, pos: Pos) -> Result<(), ParseError> {
        if name == O_PREDICATE || name == THING || name == NOTHING {
            return Err(err(pos, ParseErrorKind::Reserved(name.into())));
        }
        match self.signature.get(name) {
            None => {
                self.signature.insert(name.to_string(), kind);
                Ok(())
            }
            Some(&k) if k == kind => Ok(()),
            Some(&k) => match (k, kind) {
                (PredicateKind::NonDl(a), PredicateKind::NonDl(b)) => Err(err(
                    pos,
                    ParseErrorKind::ArityMismatch {
                        predicate: name.into(),
                        expected: a,
                        found: b,
                    },
                )),
                _ => Err(err(
                    pos,
                    ParseErrorKind::KindConflict {
                        name: name.into(),
                        declared: k.describe(),
                        used_as: kind.describe(),
                    },
                )),
            },
        }
    }

    fn statement(&mut self, head: &str, items: &[SExpr], pos: Pos) -> Result<(), ParseError> {
        match head {
            "concept" | "role" => {
                self.arg_count(items, 1, pos, head)?;
                let name = self.name(&items[0])?;
                let kind = if head == "concept" {
                    PredicateKind::Concept
                } else {
                    PredicateKind::Role
                };
                self.declare(name, kind, items[0].pos())
            }
            "nondl" => {
                self.arg_count(items, 2, pos, head)?;
                let name = self.name(&items[0])?;
                let arity = match &items[1] {
                    SExpr::Symbol(s, _) => s.parse::<usize>().ok().filter(|&n| n > 0),
                    SExpr::List(..) => None,
                }
                .ok_or_else(|| syntax(items[1].pos(), "arity must be a positive integer"))?;
                self.declare(name, PredicateKind::NonDl(arity), items[0].pos())
            }
            "subclass" | "equivalent" => {
                self.arg_count(items, 2, pos, head)?;
                let lhs = self.concept(&items[0])?;
                let rhs = self.concept(&items[1])?;
                if head == "subclass" {
                    self.kb.tbox.push(TBoxAxiom::SubClass(lhs, rhs));
                } else {
                    self.equivalence(lhs, rhs);
                }
                Ok(())
            }
            "disjoint" => {
                self.arg_count(items, 2, pos, head)?;
                let a = self.concept_name(&items[0])?;
                let b = self.concept_name(&items[1])?;
                self.kb.tbox.push(TBoxAxiom::Disjoint(a, b));
                Ok(())
            }
            "subrole" | "equivrole" => {
                self.arg_count(items, 2, pos, head)?;
                let a = self.role(&items[0])?;
                let b = self.role(&items[1])?;
                self.kb.tbox.push(if head == "subrole" {
                    TBoxAxiom::SubRole(a, b)
                } else {
                    TBoxAxiom::EquivRole(a, b)
                });
                Ok(())
            }
            "transitive" | "symmetric" => {
                self.arg_count(items, 1, pos, head)?;
                let r = self.role_name(&items[0])?;
                self.kb.tbox.push(if head == "transitive" {
                    TBoxAxiom::Transitive(r)
                } else {
                    TBoxAxiom::Symmetric(r)
                });
                Ok(())
            }
            "functional" => {
                self.arg_count(items, 1, pos, head)?;
                let r = self.role(&items[0])?;
                self.kb.tbox.push(TBoxAxiom::Functional(r));
                Ok(())
            }
            "domain" | "range" => {
                self.arg_count(items, 2, pos, head)?;
                let r = self.role_name(&items[0])?;
                let c = self.concept(&items[1])?;
                self.kb.tbox.push(if head == "domain" {
                    TBoxAxiom::Domain(r, c)
                } else {
                    TBoxAxiom::Range(r, c)
                });
                Ok(())
            }
            "instance" => {
                self.arg_count(items, 2, pos, head)?;
                let c = self.concept_name(&items[0])?;
                let a = self.constant(&items[1])?;
                self.kb
                    .abox
                    .push(Atom::new(Predicate::concept(c), vec![a]));
                Ok(())
            }
            "related" => {
                self.arg_count(items, 3, pos, head)?;
                let r = self.role_name(&items[0])?;
                let a = self.constant(&items[1])?;
                let b = self.constant(&items[2])?;
                self.kb.abox.push(Atom::new(Predicate::role(r), vec![a, b]));
                Ok(())
            }
            "fact" => {
                if items.len() < 2 {
                    return Err(syntax(pos, "`fact` needs a predicate and at least one constant"));
                }
                let name = self.name(&items[0])?;
                let args = items[1..]
                    .iter()
                    .map(|e| self.constant(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let kind = match self.signature.get(name) {
                    Some(&k) => {
                        if k.arity() != args.len() {
                            return Err(err(
                                items[0].pos(),
                                ParseErrorKind::ArityMismatch {
                                    predicate: name.into(),
                                    expected: k.arity(),
                                    found: args.len(),
                                },
                            ));
                        }
                        k
                    }
                    None => {
                        let k = PredicateKind::NonDl(args.len());
                        self.declare(name, k, items[0].pos())?;
                        k
                    }
                };
                self.kb.abox.push(Atom::new(
                    Predicate {
                        name: name.to_string(),
                        kind,
                    },
                    args,
                ));
                Ok(())
            }
            other => Err(syntax(pos, format!("unknown form `{other}`"))),
        }
    }

    fn equivalence(&mut self, lhs: ConceptExpr, rhs: ConceptExpr) {
        let complement = match (&lhs, &rhs) {
            (ConceptExpr::Atomic(a), ConceptExpr::Not(b))
            | (ConceptExpr::Not(b), ConceptExpr::Atomic(a)) => Some((a.clone(), b.clone())),
            _ => None,
        };
        match complement {
            Some((a, b)) => {
                self.kb.tbox.push(TBoxAxiom::Disjoint(a.clone(), b.clone()));
                if self.options.covering_complement {
                    self.kb.tbox.push(TBoxAxiom::SubClass(
                        ConceptExpr::Top,
                        ConceptExpr::or(ConceptExpr::Atomic(a), ConceptExpr::Atomic(b)),
                    ));
                }
            }
            None => self.kb.tbox.push(TBoxAxiom::EquivClass(lhs, rhs)),
        }
    }

    fn concept_name(&mut self, e: &SExpr) -> Result<String, ParseError> {
        let name = self.name(e)?;
        self.declare(name, PredicateKind::Concept, e.pos())?;
        Ok(name.to_string())
    }

    fn role_name(&mut self, e: &SExpr) -> Result<String, ParseError> {
        let name = self.name(e)?;
        self.declare(name, PredicateKind::Role, e.pos())?;
        Ok(name.to_string())
    }

    fn concept(&mut self, e: &SExpr) -> Result<ConceptExpr, ParseError> {
        match e {
            SExpr::Symbol(s, _) if s == THING => Ok(ConceptExpr::Top),
            SExpr::Symbol(s, _) if s == NOTHING => Ok(ConceptExpr::Bottom),
            SExpr::Symbol(..) => Ok(ConceptExpr::Atomic(self.concept_name(e)?)),
            SExpr::List(..) => {
                let (head, items, pos) = self.form(e)?;
                match head {
                    "and" | "or" => {
                        if items.len() < 2 {
                            return Err(syntax(pos, format!("`{head}` needs at least two operands")));
                        }
                        let mut ops = items
                            .iter()
                            .map(|i| self.concept(i))
                            .collect::<Result<Vec<_>, _>>()?;
                        let mut acc = ops.pop().expect("non-empty");
                        while let Some(next) = ops.pop() {
                            acc = if head == "and" {
                                ConceptExpr::and(next, acc)
                            } else {
                                ConceptExpr::or(next, acc)
                            };
                        }
                        Ok(acc)
                    }
                    "some" | "all" => {
                        self.arg_count(items, 2, pos, head)?;
                        let r = self.role(&items[0])?;
                        let c = self.concept(&items[1])?;
                        Ok(if head == "some" {
                            ConceptExpr::some(r, c)
                        } else {
                            ConceptExpr::all(r, c)
                        })
                    }
                    "not" => {
                        self.arg_count(items, 1, pos, head)?;
                        match &items[0] {
                            SExpr::Symbol(s, _) if s == THING => Ok(ConceptExpr::Bottom),
                            SExpr::Symbol(s, _) if s == NOTHING => Ok(ConceptExpr::Top),
                            SExpr::Symbol(..) => Ok(ConceptExpr::Not(self.concept_name(&items[0])?)),
                            SExpr::List(_, p) => Err(err(*p, ParseErrorKind::NegatedComplexConcept)),
                        }
                    }
                    other => Err(syntax(pos, format!("unknown concept constructor `{other}`"))),
                }
            }
        }
    }

    fn role(&mut self, e: &SExpr) -> Result<RoleExpr, ParseError> {
        match e {
            SExpr::Symbol(..) => Ok(RoleExpr::Named(self.role_name(e)?)),
            SExpr::List(..) => {
                let (head, items, pos) = self.form(e)?;
                if head != "inv" {
                    return Err(syntax(pos, format!("unknown role constructor `{head}`")));
                }
                self.arg_count(items, 1, pos, head)?;
                Ok(self.role(&items[0])?.inverse())
            }
        }
    }

    fn constant(&self, e: &SExpr) -> Result<Term, ParseError> {
        match e {
            SExpr::Symbol(s, pos) if s.starts_with('?') => {
                Err(syntax(*pos, format!("facts must be ground, found variable `{s}`")))
            }
            _ => Ok(Term::Constant(self.name(e)?.to_string())),
        }
    }

    fn term(&self, e: &SExpr) -> Result<Term, ParseError> {
        match e {
            SExpr::Symbol(s, pos) => match s.strip_prefix('?') {
                Some(v) if is_identifier(v) => Ok(Term::Variable(v.to_string())),
                Some(_) => Err(syntax(*pos, format!("invalid variable `{s}`"))),
                None => self.constant(e),
            },
            SExpr::List(_, pos) => Err(syntax(*pos, "expected a term")),
        }
    }

    fn atom(&mut self, e: &SExpr) -> Result<Atom, ParseError> {
        let (head, items, pos) = self.form(e)?;
        let args = items
            .iter()
            .map(|i| self.term(i))
            .collect::<Result<Vec<_>, _>>()?;
        let predicate = match head {
            "=" => Predicate::equality(),
            O_PREDICATE => Predicate::o(),
            THING | NOTHING => {
                return Err(err(pos, ParseErrorKind::Reserved(head.into())));
            }
            name if is_identifier(name) => match self.signature.get(name) {
                Some(&kind) => Predicate {
                    name: name.into(),
                    kind,
                },
                None => {
                    if args.is_empty() {
                        return Err(syntax(pos, "atoms need at least one argument"));
                    }
                    let kind = PredicateKind::NonDl(args.len());
                    self.declare(name, kind, pos)?;
                    Predicate {
                        name: name.into(),
                        kind,
                    }
                }
            },
            other => return Err(syntax(pos, format!("invalid predicate `{other}`"))),
        };
        if predicate.arity() != args.len() {
            return Err(err(
                pos,
                ParseErrorKind::ArityMismatch {
                    predicate: predicate.name,
                    expected: predicate.kind.arity(),
                    found: args.len(),
                },
            ));
        }
        Ok(Atom::new(predicate, args))
    }

    fn rule(&mut self, items: &[SExpr], pos: Pos) -> Result<DlRule, ParseError> {
        self.arg_count(items, 2, pos, "rule")?;
        let mut parts = Vec::with_capacity(2);
        for (expected, e) in ["head", "body"].iter().zip(items) {
            let (head, atoms, p) = self.form(e)?;
            if head != *expected {
                return Err(syntax(p, format!("expected `({expected} ...)`")));
            }
            if atoms.is_empty() {
                return Err(syntax(p, format!("rule {expected} must not be empty")));
            }
            parts.push(
                atoms
                    .iter()
                    .map(|a| self.atom(a))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let body = parts.pop().expect("two parts");
        let head = parts.pop().expect("two parts");
        Ok(DlRule { head, body })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_axiom() {
        let kb = parse_kb("(disjoint Account CreditCard)").unwrap();
        assert_eq!(
            kb.tbox,
            vec![TBoxAxiom::Disjoint("Account".into(), "CreditCard".into())]
        );
    }

    #[test]
    fn empty_file() {
        let kb = parse_kb("").unwrap();
        assert_eq!(kb, CombinedKb::default());
        let kb = parse_kb("; only a comment\n\n").unwrap();
        assert_eq!(kb, CombinedKb::default());
    }

    #[test]
    fn related_fact_registers_individuals() {
        let kb = parse_kb("(related isOwnerOf Anna a1)").unwrap();
        assert_eq!(
            kb.abox,
            vec![Atom::new(
                Predicate::role("isOwnerOf"),
                vec![Term::constant("Anna"), Term::constant("a1")]
            )]
        );
        assert!(kb.individuals.contains("Anna"));
        assert!(kb.individuals.contains("a1"));
    }

    #[test]
    fn complement_equivalence_reads_as_disjointness() {
        let src = "(equivalent Account (not CreditCard))";
        let kb = parse_kb(src).unwrap();
        assert_eq!(
            kb.tbox,
            vec![TBoxAxiom::Disjoint("Account".into(), "CreditCard".into())]
        );
        let kb = parse_kb_with(
            src,
            ParseOptions {
                covering_complement: true,
            },
        )
        .unwrap();
        assert_eq!(kb.tbox.len(), 2);
        assert!(matches!(kb.tbox[1], TBoxAxiom::SubClass(ConceptExpr::Top, ConceptExpr::Or(..))));
    }

    #[test]
    fn rule_only_predicates_are_non_dl() {
        let kb = parse_kb(
            "(rule (head (p_man ?x) (p_woman ?x)) (body (Client ?x) (O ?x)))\n(instance Client Jan)",
        )
        .unwrap();
        assert_eq!(kb.signature["Client"], PredicateKind::Concept);
        assert_eq!(kb.signature["p_man"], PredicateKind::NonDl(1));
        assert_eq!(kb.rules[0].head.len(), 2);
        assert_eq!(kb.rules[0].body[1].predicate, Predicate::o());
    }

    #[test]
    fn double_inverse_is_normalized() {
        let kb = parse_kb("(subrole (inv (inv r)) s)").unwrap();
        assert_eq!(
            kb.tbox,
            vec![TBoxAxiom::SubRole(RoleExpr::Named("r".into()), RoleExpr::Named("s".into()))]
        );
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_kb("(concept A)\n  (subclass A").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 3));
        let e = parse_kb("(concept A))").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 12));
        let e = parse_kb("(frobnicate A)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_kb("(role r)\n(rule (head (r ?x)) (body (O ?x)))").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 2, found: 1, .. }));
        assert_eq!(e.pos.line, 2);
        let e = parse_kb("(fact p a)\n(fact p a b)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { .. }));
    }

    #[test]
    fn not_on_complex_concept_is_rejected() {
        let e = parse_kb("(subclass A (not (and B C)))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NegatedComplexConcept);
    }

    #[test]
    fn kind_conflict() {
        let e = parse_kb("(concept A)\n(role A)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::KindConflict { .. }));
        let e = parse_kb("(instance p a)\n(nondl p 1)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::KindConflict { .. }));
    }

    #[test]
    fn builtins_cannot_be_declared() {
        assert!(matches!(
            parse_kb("(concept O)").unwrap_err().kind,
            ParseErrorKind::Reserved(_)
        ));
        assert!(matches!(
            parse_kb("(instance Thing a)").unwrap_err().kind,
            ParseErrorKind::Reserved(_)
        ));
    }

    #[test]
    fn facts_must_be_ground() {
        assert!(parse_kb("(instance A ?x)").is_err());
    }

    #[test]
    fn n_ary_and_nests_right() {
        let kb = parse_kb("(subclass A (and B C D))").unwrap();
        let expected = ConceptExpr::and(
            ConceptExpr::atomic("B"),
            ConceptExpr::and(ConceptExpr::atomic("C"), ConceptExpr::atomic("D")),
        );
        assert_eq!(kb.tbox, vec![TBoxAxiom::SubClass(ConceptExpr::atomic("A"), expected)]);
    }
}
