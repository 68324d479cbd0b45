//! Random knowledge bases for property and oracle tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const BANK: &str = include_str!("../../fixtures/bank.kb");
pub const PAT: &str = include_str!("../../fixtures/pat.kb");

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_concepts: usize,
    pub max_roles: usize,
    pub max_individuals: usize,
    /// Allow `(some r C)` on the right of inclusions.
    pub existentials: bool,
    pub nondl: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_concepts: 3,
            max_roles: 2,
            max_individuals: 8,
            existentials: true,
            nondl: true,
        }
    }
}

/// A random KB in the s-expression syntax with at most
/// `max_concepts + max_roles + 1` predicates. `C0` is meant as the reference concept
/// and has at least two asserted instances.
pub fn random_kb(rng: &mut ChaCha8Rng, shape: Shape) -> String {
    let nc = rng.gen_range(2..=shape.max_concepts);
    let nr = rng.gen_range(1..=shape.max_roles);
    let ni = rng.gen_range(3..=shape.max_individuals);
    let with_p = shape.nondl && rng.gen_bool(0.5);
    let c: Vec<String> = (0..nc).map(|i| format!("C{i}")).collect();
    let r: Vec<String> = (0..nr).map(|i| format!("r{i}")).collect();
    let ind: Vec<String> = (0..ni).map(|i| format!("a{i}")).collect();
    let mut out = String::new();
    for x in &c {
        out += &format!("(concept {x})\n");
    }
    for x in &r {
        out += &format!("(role {x})\n");
    }
    if with_p {
        out += "(nondl p 2)\n";
    }
    let pick = |rng: &mut ChaCha8Rng, v: &Vec<String>| v.choose(rng).unwrap().clone();
    for _ in 0..rng.gen_range(0..=4) {
        let axiom = match rng.gen_range(0..8) {
            0 => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                (a != b).then(|| format!("(subclass {a} {b})"))
            }
            1 => Some(format!("(domain {} {})", pick(rng, &r), pick(rng, &c))),
            2 => Some(format!("(range {} {})", pick(rng, &r), pick(rng, &c))),
            3 if shape.existentials => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                Some(format!("(subclass {a} (some {} {b}))", pick(rng, &r)))
            }
            4 => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                (a != b && a != "C0" && b != "C0").then(|| format!("(disjoint {a} {b})"))
            }
            5 => {
                let (a, b) = (pick(rng, &r), pick(rng, &r));
                (a != b).then(|| format!("(subrole {a} {b})"))
            }
            6 => {
                let (a, b, d) = (pick(rng, &c), pick(rng, &c), pick(rng, &c));
                (a != b && a != d).then(|| format!("(subclass {a} (or {b} {d}))"))
            }
            _ => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                Some(format!("(subclass (some {} {b}) {a})", pick(rng, &r)))
            }
        };
        if let Some(a) = axiom {
            out += &a;
            out.push('\n');
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let rule = match rng.gen_range(0..3) {
            0 => format!(
                "(rule (head ({} ?x)) (body ({} ?x ?y) ({} ?y) (O ?x) (O ?y)))",
                pick(rng, &c),
                pick(rng, &r),
                pick(rng, &c)
            ),
            1 if with_p => format!("(rule (head (p ?x ?y)) (body ({} ?x ?y) (O ?x) (O ?y)))", pick(rng, &r)),
            _ => {
                let (a, b, d) = (pick(rng, &c), pick(rng, &c), pick(rng, &c));
                format!("(rule (head ({a} ?x) ({b} ?x)) (body ({d} ?x) (O ?x)))")
            }
        };
        out += &rule;
        out.push('\n');
    }
    let mut c0: Vec<&String> = ind.choose_multiple(rng, 2).collect();
    c0.sort();
    for a in c0 {
        out += &format!("(instance C0 {a})\n");
    }
    for _ in 0..rng.gen_range(ni / 2..=ni) {
        out += &format!("(instance {} {})\n", pick(rng, &c), pick(rng, &ind));
    }
    for _ in 0..rng.gen_range(1..=ni) {
        out += &format!("(related {} {} {})\n", pick(rng, &r), pick(rng, &ind), pick(rng, &ind));
    }
    if with_p {
        for _ in 0..rng.gen_range(1..=3) {
            out += &format!("(fact p {} {})\n", pick(rng, &ind), pick(rng, &ind));
        }
    }
    out
}

/// An existential-free KB dominated by disjunctive inclusions, disjointness
/// and disjunctive rules, so that programs tend to have several minimal models.
pub fn random_disjunctive_kb(rng: &mut ChaCha8Rng, max_individuals: usize) -> String {
    let c: Vec<String> = (0..4).map(|i| format!("C{i}")).collect();
    let r: Vec<String> = (0..2).map(|i| format!("r{i}")).collect();
    let ind: Vec<String> = (0..rng.gen_range(2..=max_individuals)).map(|i| format!("a{i}")).collect();
    let mut out = String::new();
    for x in &c {
        out += &format!("(concept {x})\n");
    }
    for x in &r {
        out += &format!("(role {x})\n");
    }
    out += "(nondl p 2)\n";
    let pick = |rng: &mut ChaCha8Rng, v: &Vec<String>| v.choose(rng).unwrap().clone();
    for _ in 0..rng.gen_range(1..=4) {
        let axiom = match rng.gen_range(0..6) {
            0 | 1 => {
                let (a, b, d) = (pick(rng, &c), pick(rng, &c), pick(rng, &c));
                (a != b && a != d && b != d).then(|| format!("(subclass {a} (or {b} {d}))"))
            }
            2 => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                (a != b).then(|| format!("(disjoint {a} {b})"))
            }
            3 => Some(format!("(range {} (or {} {}))", pick(rng, &r), pick(rng, &c), pick(rng, &c))),
            4 => {
                let (a, b) = (pick(rng, &c), pick(rng, &c));
                (a != b).then(|| format!("(subclass (some {} {b}) {a})", pick(rng, &r)))
            }
            _ => Some(format!("(symmetric {})", pick(rng, &r))),
        };
        if let Some(a) = axiom {
            out += &a;
            out.push('\n');
        }
    }
    for _ in 0..rng.gen_range(1..=3) {
        let rule = match rng.gen_range(0..3) {
            0 => format!(
                "(rule (head (p ?x ?y) ({} ?y)) (body ({} ?x ?y) (O ?x) (O ?y)))",
                pick(rng, &c),
                pick(rng, &r)
            ),
            1 => format!("(rule (head ({} ?x)) (body (p ?x ?y) ({} ?y) (O ?x) (O ?y)))", pick(rng, &c), pick(rng, &c)),
            _ => {
                let (a, b, d) = (pick(rng, &c), pick(rng, &c), pick(rng, &c));
                format!("(rule (head ({a} ?x) ({b} ?x)) (body ({d} ?x) (O ?x)))")
            }
        };
        out += &rule;
        out.push('\n');
    }
    for _ in 0..rng.gen_range(1..=ind.len()) {
        out += &format!("(instance {} {})\n", pick(rng, &c), pick(rng, &ind));
    }
    for _ in 0..rng.gen_range(0..=ind.len()) {
        out += &format!("(related {} {} {})\n", pick(rng, &r), pick(rng, &ind), pick(rng, &ind));
    }
    out
}
