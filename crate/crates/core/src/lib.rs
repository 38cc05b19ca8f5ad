//! Chase-based reasoning for existential rules with equality.
//!
//! The crate provides:
//!
//! * [`model`]: terms, atoms, TGDs/EGDs, ontologies, queries and the term order
//!   that decides which of two equated terms survives a merge;
//! * [`chase`]: the non-oblivious chase that handles EGDs by renaming terms,
//!   plus Boolean conjunctive query entailment on top of it;
//! * [`axiomatisation`]: the standard equality axiomatisation, singularisation,
//!   and the `E`-class collapse used to relate chases of axiomatised and
//!   original ontologies;
//! * [`acyclicity`]: the EMFA/MFA membership checks over the critical instance;
//! * [`frontend`]: a small rule language, its serializer, the `eqchase` CLI and
//!   a benchmark harness;
//! * [`generate`]: seeded random rule sets and ontologies for property tests
//!   and benchmarks.

pub mod acyclicity;
pub mod axiomatisation;
pub mod chase;
pub mod frontend;
pub mod generate;
pub mod model;
