//! Frequent pattern discovery over combined knowledge bases: a description
//! logic terminology, disjunctive DL-safe rules and ground facts.
//!
//! The pipeline is [`kb::parse_kb`] → [`clausify::clausify`] →
//! [`reasoner::chase`] for reasoning, and [`miner::mine`] for the search.

pub mod clausify;
pub mod error;
pub mod kb;
pub mod miner;
pub mod reasoner;
pub mod report;

pub use clausify::{clausify, GroundProgram};
pub use error::{Error, ParseError, Result};
pub use kb::{parse_kb, parse_kb_with, Atom, CombinedKb, ParseOptions, Predicate, PredicateKind, Term};
pub use miner::{mine, EquivScan, MiningConfig, MiningResult, Mode, Pattern, RunStats, VariableSharing};
pub use num_rational::Ratio;
pub use reasoner::{cautious_entails, chase, ChaseConfig, ModelSet, QuerySpec};
