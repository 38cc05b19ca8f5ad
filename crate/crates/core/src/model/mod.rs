//! Symbolic vocabulary: terms, atoms, rules, ontologies and queries.

mod atom;
mod rule;
mod term;
mod validate;

pub use atom::{
    apply_term_map, Atom, AtomSet, GroundRewriting, Predicate, PredicateKind, Substitution,
    AXIOM_EQUALITY_NAME, EQUALITY_NAME,
};
pub use rule::{
    apply_syntactic, skolemise, variables_of, Bcq, Egd, Ontology, Rule, RuleSet, SkolemisedRule,
    SkolemisedRuleSet, SkolemisedTgd, Tgd,
};
pub use term::{term_compare, FunctionalTerm, SkolemOrigin, SkolemSymbol, Symbol, Term, STAR};
pub use validate::{
    validate, validate_query, validate_rules, validate_with, Location, ValidationOptions, Violation,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("variable {0} is not bound by the substitution")]
    UnboundVariable(Symbol),
}
