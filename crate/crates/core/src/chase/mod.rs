//! The non-oblivious chase with renaming EGD application, and BCQ
//! entailment on top of it.
//!
//! A TGD pair fires only if no extension of the substitution embeds the head;
//! an EGD pair replaces the ≺-greater of its two terms by the lesser one, at
//! predicate-argument level, across the whole set.

mod engine;
mod homomorphism;
mod run;

pub use engine::{apply, find_applicable, is_applicable, satisfies, Effect, RuleEngine, Trigger};
pub use homomorphism::{all_homomorphisms, homomorphism};
pub use run::{
    chase, chase_observed, entails, ChaseConfig, ChaseLimits, ChaseOutcome, ChaseStats, ChaseStep,
    EntailmentVerdict, Limit, Observer, Strategy,
};

pub(crate) use engine::CompiledRule;
pub(crate) use homomorphism::Binding;

use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChaseError {
    #[error("substitution does not match the rule: {0}")]
    DomainMismatch(String),
    #[error("rule {0} is not applicable under the given substitution")]
    NotApplicable(usize),
    #[error("no rule with index {0}")]
    UnknownRule(usize),
    #[error("invalid query: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidQuery(Vec<Violation>),
}
