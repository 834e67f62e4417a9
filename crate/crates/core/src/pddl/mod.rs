//! PDDL emission and parsing for learned domains and planning problems.
//!
//! The emitted subset: STRIPS with typing, negative preconditions, action
//! costs, inequality as `(not (= ?a ?b))`, and one effect shape beyond
//! literals, the exclusivity revocation
//! `(forall (?x - Wooden_cube) (when (not (= ?x ?keep)) (not (p ?h ?x))))`.
//! Emission is canonical (sorted literals, fixed layout), so emitting a
//! parsed document reproduces it byte for byte.

mod emit;
mod parse;
mod sexpr;

use thiserror::Error;

use crate::model::ModelError;
use crate::ontology::OntologyError;

pub use emit::{emit_domain, emit_domain_typed, emit_problem, DEFAULT_DOMAIN_NAME};
pub use parse::{parse_domain, parse_problem, ParsedDomain, ParsedProblem};

/// Requirement flags the parser accepts.
pub const SUPPORTED_REQUIREMENTS: [&str; 6] = [
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":action-costs",
    ":universal-preconditions",
    ":conditional-effects",
];

#[derive(Debug, Error)]
pub enum PddlError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}, column {col}: unsupported requirement `{flag}`")]
    UnsupportedRequirement {
        flag: String,
        line: usize,
        col: usize,
    },
    #[error("operator `{0}` has no cost; assign costs before emitting")]
    MissingCost(String),
    #[error("type `{0}` is not declared")]
    UnknownType(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    Domain,
    Problem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlDocument {
    pub kind: DocKind,
    pub text: String,
}
